//! Expectation DSL.
//!
//! One check per string: `<quantity> <op> <value> [tol <t>]`, optionally
//! prefixed with `expect`. Operators are `== != < <= > >=` and `≈` (or `~=`),
//! which needs a tolerance (default 1e-9). `==` with a tolerance behaves like
//! `≈`. The value is a number, another quantity, or a bare word compared
//! against a word-valued quantity such as `status`.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Approx,
}

const OPERATORS: [(&str, Op); 8] = [
    ("≈", Op::Approx),
    ("~=", Op::Approx),
    ("==", Op::Eq),
    ("!=", Op::Ne),
    ("<=", Op::Le),
    (">=", Op::Ge),
    ("<", Op::Lt),
    (">", Op::Gt),
];

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub text: String,
    pub quantity: String,
    pub op: Op,
    pub value: Value,
    pub tol: Option<f64>,
}

fn normalize(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn is_word(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')' | ',' | '.' | '-'))
}

impl Check {
    pub fn parse(text: &str) -> Result<Check, String> {
        let body = text.trim();
        let body = body.strip_prefix("expect ").unwrap_or(body).trim();
        let (at, op_str, op) = OPERATORS
            .iter()
            .filter_map(|&(s, op)| body.find(s).map(|i| (i, s, op)))
            .min_by_key(|&(i, s, _)| (i, usize::MAX - s.len()))
            .ok_or_else(|| format!("'{text}': no comparison operator"))?;
        let quantity = normalize(&body[..at]);
        if !is_word(&quantity) {
            return Err(format!("'{text}': bad quantity '{quantity}'"));
        }
        let rest = body[at + op_str.len()..].trim();
        let (value_str, tol) = match rest.split_once(" tol ") {
            Some((v, t)) => {
                let t: f64 = t
                    .trim()
                    .parse()
                    .map_err(|_| format!("'{text}': bad tolerance '{}'", t.trim()))?;
                if !(t >= 0.0) {
                    return Err(format!("'{text}': tolerance must be nonnegative"));
                }
                (v.trim(), Some(t))
            }
            None => (rest, None),
        };
        let value = match value_str.parse::<f64>() {
            Ok(x) => Value::Number(x),
            Err(_) if is_word(&normalize(value_str)) => Value::Word(normalize(value_str)),
            Err(_) => return Err(format!("'{text}': bad value '{value_str}'")),
        };
        if tol.is_some() && !matches!(op, Op::Eq | Op::Approx) {
            return Err(format!("'{text}': tol only applies to == and ≈"));
        }
        Ok(Check {
            text: text.trim().to_string(),
            quantity,
            op,
            value,
            tol,
        })
    }

    /// `Ok(description)` when the check holds, `Err(description)` otherwise.
    pub fn evaluate(&self, facts: &Facts) -> Result<String, String> {
        if let Some(word) = facts.words.get(&self.quantity) {
            let Value::Word(want) = &self.value else {
                return Err(format!("{} is '{word}', not a number", self.quantity));
            };
            let holds = match self.op {
                Op::Eq => word == want,
                Op::Ne => word != want,
                _ => return Err(format!("{} only supports == and !=", self.quantity)),
            };
            let msg = format!("{} = {word}", self.quantity);
            return if holds { Ok(msg) } else { Err(msg) };
        }
        let got = facts
            .number(&self.quantity)
            .ok_or_else(|| format!("unknown quantity '{}'", self.quantity))?;
        let want = match &self.value {
            Value::Number(x) => *x,
            Value::Word(w) => facts
                .number(w)
                .ok_or_else(|| format!("unknown quantity '{w}'"))?,
        };
        let op = match (self.op, self.tol) {
            (Op::Eq, Some(_)) => Op::Approx,
            (op, _) => op,
        };
        let holds = match op {
            Op::Eq => got == want,
            Op::Ne => got != want,
            Op::Lt => got < want,
            Op::Le => got <= want,
            Op::Gt => got > want,
            Op::Ge => got >= want,
            Op::Approx => (got - want).abs() <= self.tol.unwrap_or(DEFAULT_TOL),
        };
        let msg = format!("{} = {got:.10e}", self.quantity);
        if holds {
            Ok(msg)
        } else {
            Err(msg)
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Named results of a run that checks can refer to.
#[derive(Debug, Clone, Default)]
pub struct Facts {
    numbers: BTreeMap<String, f64>,
    words: BTreeMap<String, String>,
}

impl Facts {
    pub fn set(&mut self, key: impl Into<String>, value: f64) {
        self.numbers.insert(normalize(&key.into()), value);
    }

    pub fn set_flag(&mut self, key: impl Into<String>, value: bool) {
        self.set(key, if value { 1.0 } else { 0.0 });
    }

    pub fn set_word(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.words.insert(normalize(&key.into()), value.into());
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.numbers.get(key).copied()
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        self.words.get(key).map(String::as_str)
    }
}

/// Evaluate every check; returns printable lines and whether all held.
pub fn run_checks(checks: &[Check], facts: &Facts) -> (Vec<String>, bool) {
    let mut ok = true;
    let lines = checks
        .iter()
        .map(|c| match c.evaluate(facts) {
            Ok(m) => format!("expect {c}: pass ({m})"),
            Err(m) => {
                ok = false;
                format!("expect {c}: FAIL ({m})")
            }
        })
        .collect();
    (lines, ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn facts() -> Facts {
        let mut f = Facts::default();
        f.set("max_count", 2.0);
        f.set("distance(max0,max1)", 0.503);
        f.set("height(max0)", 3.0);
        f.set("height(max1)", 1.5);
        f.set_word("status", "converged");
        f
    }

    #[test]
    fn parses_the_documented_forms() {
        let c = Check::parse("expect max_count == 2").unwrap();
        assert_eq!((c.quantity.as_str(), c.op, c.tol), ("max_count", Op::Eq, None));
        let c = Check::parse("distance(max0, max1) ≈ 0.5 tol 0.01").unwrap();
        assert_eq!(c.quantity, "distance(max0,max1)");
        assert_eq!((c.op, c.value.clone(), c.tol), (Op::Approx, Value::Number(0.5), Some(0.01)));
        assert_eq!(Check::parse("x<=1").unwrap().op, Op::Le);
        assert_eq!(Check::parse("x ~= 1 tol 1e-3").unwrap().op, Op::Approx);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Check::parse("max_count 2").is_err());
        assert!(Check::parse("== 2").is_err());
        assert!(Check::parse("x < 2 tol 0.1").is_err());
        assert!(Check::parse("x ≈ 2 tol -1").is_err());
        assert!(Check::parse("x == 2 +").is_err());
    }

    #[test]
    fn evaluates() {
        let f = facts();
        let ok = |s: &str| Check::parse(s).unwrap().evaluate(&f).is_ok();
        assert!(ok("max_count == 2"));
        assert!(!ok("max_count != 2"));
        assert!(ok("distance(max0,max1) ≈ 0.5 tol 0.01"));
        assert!(!ok("distance(max0,max1) ≈ 0.5 tol 0.001"));
        assert!(ok("distance(max0,max1) == 0.5 tol 0.01"));
        assert!(ok("height(max0) > height(max1)"));
        assert!(ok("status == converged"));
        assert!(!ok("status == two_cycle"));
        assert!(!ok("status < 2"));
        assert!(!ok("nothing == 1"));
    }

    #[test]
    fn report_lines() {
        let checks = vec![Check::parse("max_count == 2").unwrap(), Check::parse("max_count > 5").unwrap()];
        let (lines, ok) = run_checks(&checks, &facts());
        assert!(!ok);
        assert!(lines[0].contains("pass") && lines[1].contains("FAIL"));
    }
}

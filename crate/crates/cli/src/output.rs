//! CSV and summary writers. Every float is printed with 17 significant digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use tde_core::measures::Extremum;
use tde_core::GridFunction;

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    inner: csv::Writer<BufWriter<File>>,
}

impl Csv {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, CliError> {
        let mut inner = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        inner.write_record(header)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Output directory for one scenario run.
pub struct OutDir {
    pub path: PathBuf,
}

impl OutDir {
    pub fn create(path: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&path)?;
        Ok(Self { path })
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> Result<Csv, CliError> {
        Csv::create(&self.file(name), header)
    }

    pub fn write(&self, name: &str, text: &str) -> Result<(), CliError> {
        let mut f = BufWriter::new(File::create(self.file(name))?);
        f.write_all(text.as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

pub fn write_profile(out: &OutDir, name: &str, f: &GridFunction) -> Result<(), CliError> {
    let mut w = out.csv(name, &["theta", "f"])?;
    for (j, v) in f.values().iter().enumerate() {
        w.row([num(f.theta(j)), num(*v)])?;
    }
    w.finish()
}

pub fn write_extrema(out: &OutDir, name: &str, ext: &[Extremum]) -> Result<(), CliError> {
    let mut w = out.csv(name, &["position", "value", "kind", "prominence"])?;
    for e in ext {
        w.row([num(e.position), num(e.value), e.kind.as_str().to_string(), num(e.prominence)])?;
    }
    w.finish()
}

/// Flat `key = value` block.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, num(value));
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Single-level JSON object; numbers as written by [`num`], other values quoted.
    pub fn render_json(&self) -> String {
        let body: Vec<String> = self
            .entries
            .iter()
            .map(|(k, v)| {
                let literal = v.parse::<f64>().is_ok_and(f64::is_finite) || v == "true" || v == "false";
                if literal {
                    format!("  \"{k}\": {v}")
                } else {
                    format!("  \"{k}\": \"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""))
                }
            })
            .collect();
        format!("{{\n{}\n}}\n", body.join(",\n"))
    }
}

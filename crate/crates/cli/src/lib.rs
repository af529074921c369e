//! Scenario-driven front end for the `tde` binary.

pub mod commands;
pub mod error;
pub mod expect;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use commands::{execute, EigenArgs, Outcome};
pub use error::CliError;
pub use scenario::{load, Command, Loaded, Scenario};

/// Environment variable that replaces every output directory.
pub const OUTPUT_ENV: &str = "TDE_OUTPUT_DIR";

/// Output directory of a single run: the environment override, then the
/// scenario's `output` key, then `out/<stem>`.
pub fn output_dir(loaded: &Loaded, env: Option<PathBuf>) -> PathBuf {
    if let Some(dir) = env {
        return dir;
    }
    match &loaded.scenario.output {
        Some(p) => loaded.base_dir().join(p),
        None => PathBuf::from("out").join(loaded.stem()),
    }
}

pub fn env_output() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

#[derive(Debug)]
pub struct SweepEntry {
    pub path: PathBuf,
    pub command: Option<Command>,
    pub exit_code: i32,
    pub expected_exit: i32,
    pub message: String,
}

impl SweepEntry {
    pub fn passed(&self) -> bool {
        self.exit_code == self.expected_exit
    }
}

/// Every `*.toml` in `dir` (sorted), each into `<root>/<stem>`, run in parallel.
pub fn sweep(dir: &Path, root: &Path, eigen: EigenArgs) -> Result<Vec<SweepEntry>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files
        .par_iter()
        .map(|path| {
            let entry = |command, exit_code, expected_exit, message| SweepEntry {
                path: path.clone(),
                command,
                exit_code,
                expected_exit,
                message,
            };
            let loaded = match load(path) {
                Ok(l) => l,
                Err(e) => return entry(None, e.exit_code(), 0, e.to_string()),
            };
            let expected = loaded.scenario.expect.exit.unwrap_or(0);
            let Some(command) = loaded.scenario.command else {
                let e = CliError::Config("sweep needs a top-level `command`".into());
                return entry(None, e.exit_code(), expected, e.to_string());
            };
            let out = root.join(loaded.stem());
            let outcome = execute(command, &loaded, &out, eigen);
            let message = match &outcome.result {
                Ok(()) => "ok".into(),
                Err(e) => e.to_string(),
            };
            entry(Some(command), outcome.exit_code(), expected, message)
        })
        .collect())
}

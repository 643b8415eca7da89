use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const SCHEMA: u32 = 1;

/// Top-level report: `{"schema": 1, "command": ..., "passed": ..., <body>}`.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: u32,
    pub command: &'a str,
    pub passed: bool,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn render<T: Serialize>(command: &str, passed: bool, body: &T, pretty: bool) -> String {
    let env = Envelope { schema: SCHEMA, command, passed, body };
    let text = if pretty { serde_json::to_string_pretty(&env) } else { serde_json::to_string(&env) };
    text.expect("report types serialize to JSON")
}

/// Prints `text` and, when `out` is given, writes it there as well.
/// A closed stdout (as under `| head`) is not an error.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    // The test harness captures `print!` but not writes to the raw handle.
    if cfg!(test) {
        println!("{text}");
    } else {
        write_stdout(text)?;
    }
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    }
    Ok(())
}

fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(CliError::Io("stdout".into(), e));
        }
    }
    Ok(())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(())
}

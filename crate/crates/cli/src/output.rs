//! CSV and JSON emission with an embedded reproducibility header.

use crate::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Float with 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Header line recording the subcommand and its full configuration.
pub fn header<C: Serialize>(command: &str, config: &C) -> Result<String, CliError> {
    Ok(format!("# fracvol {command} {}", serde_json::to_string(config)?))
}

/// A reader that stops early (a closed pipe) is not a failure.
fn finish(result: std::io::Result<()>) -> Result<(), CliError> {
    match result {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

pub fn write_csv<C: Serialize>(
    path: Option<&Path>,
    command: &str,
    config: &C,
    columns: &[String],
    rows: &[Vec<f64>],
) -> Result<(), CliError> {
    let head = header(command, config)?;
    let mut out = sink(path)?;
    finish((|| {
        writeln!(out, "{head}")?;
        writeln!(out, "{}", columns.join(","))?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        out.flush()
    })())
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

pub fn write_json<C: Serialize, R: Serialize>(
    path: Option<&Path>,
    command: &str,
    config: &C,
    result: &R,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&Document { command, config, result })?;
    let mut out = sink(path)?;
    finish(writeln!(out, "{text}").and_then(|_| out.flush()))
}

/// Data produced by a job, before the header is attached.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Csv { columns: Vec<String>, rows: Vec<Vec<f64>> },
    Json(serde_json::Value),
}

pub fn emit<C: Serialize>(path: Option<&Path>, config: &C, command: &str, artifact: &Artifact) -> Result<(), CliError> {
    match artifact {
        Artifact::Csv { columns, rows } => write_csv(path, command, config, columns, rows),
        Artifact::Json(result) => write_json(path, command, config, result),
    }
}

/// Command name and configuration recorded in a CSV header line or a JSON document.
pub fn recorded_job(text: &str) -> Result<(String, serde_json::Value), CliError> {
    let bad = |m: &str| CliError::field("replay", m.to_string());
    if let Some(line) = text.lines().next().and_then(|l| l.strip_prefix("# fracvol ")) {
        let (command, config) = line.split_once(' ').ok_or_else(|| bad("header has no configuration"))?;
        let config = serde_json::from_str(config).map_err(|e| CliError::field("replay", e))?;
        return Ok((command.to_string(), config));
    }
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|_| bad("file carries no fracvol header"))?;
    let command = doc["command"].as_str().ok_or_else(|| bad("document has no command"))?.to_string();
    Ok((command, doc["config"].clone()))
}

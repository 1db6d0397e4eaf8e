//! Golden-file regression over the bundled corpus.

use std::fs;
use std::path::Path;
use std::thread;

use serde_json::{json, Value};
use solenoid::corpus::BUNDLED;

use crate::error::{io_error, CliError};
use crate::pipeline::{self, Input, Options};
use crate::{to_json_text, SCHEMA};

/// The report a corpus entry is pinned to: the full analysis, or the validation report
/// for rules that fail the axioms.
fn entry_report(name: &str, source: &str, opts: &Options) -> Result<Value, CliError> {
    let input = Input::parse(name, source.to_string())?;
    match pipeline::analyze(&input, opts) {
        Ok(r) => Ok(r),
        Err(CliError::Validation { report: Some(r), .. }) => Ok(r),
        Err(e) => Err(e),
    }
}

/// Analyzes every bundled rule in parallel and compares against `golden/<name>.json`.
/// With `bless`, writes the fresh reports instead. Differences are a consistency error.
pub fn run(golden: &Path, bless: bool, opts: &Options) -> Result<Value, CliError> {
    let reports: Vec<(&str, Result<Value, CliError>)> = thread::scope(|s| {
        let handles: Vec<_> = BUNDLED.iter().map(|(name, source)| (*name, s.spawn(move || entry_report(name, source, opts)))).collect();
        handles.into_iter().map(|(name, h)| (name, h.join().unwrap_or_else(|_| Err(CliError::Consistency(format!("{name}: worker panicked")))))).collect()
    });
    if bless {
        fs::create_dir_all(golden).map_err(|e| io_error(&golden.display().to_string(), e))?;
    }
    let mut entries = Vec::new();
    let mut mismatched = Vec::new();
    for (name, report) in reports {
        let report = report?;
        let fresh = to_json_text(&report);
        let path = golden.join(format!("{name}.json"));
        let status = if bless {
            fs::write(&path, &fresh).map_err(|e| io_error(&path.display().to_string(), e))?;
            "blessed"
        } else {
            match fs::read_to_string(&path) {
                Ok(old) if old == fresh => "match",
                Ok(_) => "differs",
                Err(_) => "missing",
            }
        };
        if status == "differs" || status == "missing" {
            mismatched.push(format!("{name} ({status})"));
        }
        let failures = report["axioms"]["failures"].clone();
        entries.push(json!({ "name": name, "status": status, "sha256": report["input"]["sha256"], "axiom_failures": failures }));
    }
    let summary = json!({
        "schema": SCHEMA,
        "command": "corpus",
        "golden": golden.display().to_string(),
        "entries": entries,
        "ok": mismatched.is_empty(),
    });
    if mismatched.is_empty() {
        Ok(summary)
    } else {
        eprint!("{}", to_json_text(&summary));
        Err(CliError::Consistency(format!("golden reports differ: {}", mismatched.join(", "))))
    }
}

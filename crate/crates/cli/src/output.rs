use std::path::{Path, PathBuf};

use serde::Serialize;
use torpid_core::report::to_json_string;

use crate::{CommonArgs, Failure};

#[derive(Serialize)]
struct Envelope<'a, C, R> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    common: &'a CommonArgs,
    config: &'a C,
    /// `None` for experiments that only measure.
    passed: Option<bool>,
    result: &'a R,
}

fn ensure_parent(path: &Path) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(())
}

pub fn json_path(common: &CommonArgs, command: &str) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| common.out_dir.join(format!("{command}.json")))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    ensure_parent(path)?;
    std::fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn write_report<C: Serialize, R: Serialize>(
    common: &CommonArgs,
    command: &str,
    config: &C,
    passed: Option<bool>,
    result: &R,
) -> Result<(), Failure> {
    let path = json_path(common, command);
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed: common.seed,
        common,
        config,
        passed,
        result,
    };
    write_text(&path, &to_json_string(&env))?;
    println!("{}", path.display());
    Ok(())
}

pub fn write_csv<T: Serialize>(common: &CommonArgs, command: &str, rows: &[T]) -> Result<(), Failure> {
    let path = common.out_dir.join(format!("{command}.csv"));
    ensure_parent(&path)?;
    let fail = |e: csv::Error| Failure::Usage(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(&path).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    w.flush()
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    println!("{}", path.display());
    Ok(())
}

/// Exit status for a finished check.
pub fn verdict(passed: bool, what: &str) -> Result<(), Failure> {
    if passed {
        Ok(())
    } else {
        Err(Failure::Check(what.to_string()))
    }
}

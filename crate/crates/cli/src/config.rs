//! `--config FILE` support: TOML keys become flags placed before the ones
//! typed on the command line, so explicit flags win.
//!
//! Top-level keys apply to every subcommand; a table named after the
//! subcommand (`[curve]`, `[solve]`, …) overrides them for that command.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

const SUBCOMMANDS: [&str; 5] = ["solve", "curve", "critical", "equivalence", "theory"];

fn config_path(args: &[OsString]) -> Result<Option<PathBuf>> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            let Some(p) = it.next() else { bail!("--config needs a file path") };
            return Ok(Some(PathBuf::from(p)));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

fn value_to_arg(key: &str, value: &toml::Value) -> Result<Option<String>> {
    Ok(match value {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(_) => None,
        toml::Value::Array(items) => {
            let parts = items
                .iter()
                .map(|v| value_to_arg(key, v).map(|s| s.unwrap_or_default()))
                .collect::<Result<Vec<_>>>()?;
            Some(parts.join(","))
        }
        other => bail!("config key {key:?} has unsupported value {other}"),
    })
}

fn push_flags(table: &toml::Table, out: &mut Vec<OsString>) -> Result<()> {
    for (key, value) in table {
        if value.is_table() {
            continue;
        }
        let key = &key.replace('_', "-");
        if let toml::Value::Boolean(b) = value {
            if *b {
                out.push(format!("--{key}").into());
            }
            continue;
        }
        out.push(format!("--{key}").into());
        out.push(value_to_arg(key, value)?.unwrap_or_default().into());
    }
    Ok(())
}

/// Returns `args` with the config file's flags spliced in right after the
/// subcommand name. Without `--config` the arguments are returned as-is.
pub fn merge_config_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args)? else { return Ok(args) };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;

    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let sub = args[pos].to_string_lossy().into_owned();
    let mut extra = Vec::new();
    push_flags(&table, &mut extra)?;
    if let Some(section) = table.get(&sub).and_then(|v| v.as_table()) {
        push_flags(section, &mut extra)?;
    }
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

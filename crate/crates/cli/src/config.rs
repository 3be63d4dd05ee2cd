//! `--config` files: a flat TOML table whose keys are long flag names.
//! Entries are spliced in right after the subcommand so that flags given on
//! the command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

const GLOBAL_VALUED: [&str; 2] = ["--out", "--config"];

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = text.strip_prefix("--config=") {
            return Some(OsString::from(rest));
        }
    }
    None
}

fn subcommand_index(argv: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let text = argv[i].to_string_lossy();
        if GLOBAL_VALUED.contains(&text.as_ref()) {
            i += 2;
        } else if text.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

fn value_tokens(key: &str, value: &toml::Value) -> Result<Vec<String>, CliError> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &toml::Value| -> Result<String, CliError> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            other => Err(CliError::usage(format!(
                "config key `{key}`: unsupported value {other}"
            ))),
        }
    };
    Ok(match value {
        toml::Value::Boolean(true) => vec![flag],
        toml::Value::Boolean(false) => Vec::new(),
        toml::Value::Array(items) => {
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            vec![flag, parts.join(",")]
        }
        other => vec![flag, scalar(other)?],
    })
}

fn read_table(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::format(format!("config {}: {e}", path.display())))
}

/// Command line with the config file's entries inserted.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let table = read_table(Path::new(&path))?;
    let mut tokens = Vec::new();
    for (key, value) in &table {
        if matches!(key.as_str(), "out" | "config" | "dry_run" | "dry-run") {
            return Err(CliError::usage(format!(
                "config key `{key}` is only accepted as a flag"
            )));
        }
        tokens.extend(value_tokens(key, value)?.into_iter().map(OsString::from));
    }
    let at = subcommand_index(&argv).map_or(argv.len(), |i| i + 1);
    let mut out = argv[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

/// Resolved flags as a flat map of kebab-case keys; unset options are dropped.
pub fn flatten<T: Serialize>(args: &T) -> BTreeMap<String, toml::Value> {
    let value = serde_json::to_value(args).expect("arguments serialize");
    let mut out = BTreeMap::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            if let Some(v) = json_to_toml(v) {
                out.insert(k.replace('_', "-"), v);
            }
        }
    }
    out
}

fn json_to_toml(v: serde_json::Value) -> Option<toml::Value> {
    use serde_json::Value as J;
    Some(match v {
        J::Null => return None,
        J::Bool(b) => toml::Value::Boolean(b),
        J::Number(n) => match n.as_i64() {
            Some(i) => toml::Value::Integer(i),
            None => match n.as_u64() {
                Some(u) => toml::Value::String(u.to_string()),
                None => toml::Value::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
        },
        J::String(s) => toml::Value::String(s),
        J::Array(items) => toml::Value::Array(items.into_iter().filter_map(json_to_toml).collect()),
        J::Object(_) => toml::Value::String(v.to_string()),
    })
}

/// Provenance strings: arrays are comma joined.
pub fn provenance(command: &str, flags: &BTreeMap<String, toml::Value>) -> BTreeMap<String, String> {
    let render = |v: &toml::Value| match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Float(f) => f.to_string(),
        other => other.to_string(),
    };
    let mut out: BTreeMap<String, String> = flags
        .iter()
        .map(|(k, v)| {
            let text = match v {
                toml::Value::Array(items) => items.iter().map(render).collect::<Vec<_>>().join(","),
                other => render(other),
            };
            (k.clone(), text)
        })
        .collect();
    out.insert("command".into(), command.into());
    out.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    out
}

/// TOML text that `--config` accepts back.
pub fn render_toml(command: &str, flags: &BTreeMap<String, toml::Value>) -> String {
    let table: toml::Table = flags.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    format!(
        "# command = {command}\n{}",
        toml::to_string(&table).expect("flat table renders")
    )
}

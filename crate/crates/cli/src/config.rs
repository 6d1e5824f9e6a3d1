//! `--config FILE` overlay: TOML keys become flags unless the flag was
//! given explicitly.

use std::ffi::OsString;
use std::fs;

use toml::{Table, Value};

use crate::commands::CliError;

const SUBCOMMANDS: [&str; 7] = [
    "hom",
    "spasm",
    "matrix",
    "featurize",
    "bound",
    "shearer",
    "convert",
];

fn config_path(argv: &[OsString]) -> Option<(usize, OsString)> {
    argv.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        if s == "--config" {
            argv.get(i + 1).map(|v| (i, v.clone()))
        } else {
            s.strip_prefix("--config=").map(|v| (i, OsString::from(v)))
        }
    })
}

fn value_text(key: &str, v: &Value) -> Result<Option<String>, CliError> {
    Ok(Some(match v {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Boolean(_) => return Ok(None),
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::String(s) => Ok(s.clone()),
                Value::Integer(i) => Ok(i.to_string()),
                Value::Float(f) => Ok(f.to_string()),
                _ => Err(CliError::Usage(format!(
                    "config key '{key}': unsupported list item"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => {
            return Err(CliError::Usage(format!(
                "config key '{key}': unsupported value"
            )))
        }
    }))
}

/// Returns `argv` with flags from the config file appended.
pub fn apply_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some((pos, path)) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| {
        CliError::Usage(format!(
            "cannot read config {}: {e}",
            path.to_string_lossy()
        ))
    })?;
    let table: Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.to_string_lossy())))?;

    let skip_value = argv[pos].to_str() == Some("--config");
    let subcommand = argv
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(i, _)| !(skip_value && i == pos + 1))
        .filter_map(|(_, a)| a.to_str())
        .find(|a| SUBCOMMANDS.contains(a));

    let mut entries: Vec<(&String, &Value)> = table.iter().filter(|(_, v)| !v.is_table()).collect();
    if let Some(Value::Table(section)) = subcommand.and_then(|s| table.get(s)) {
        entries.extend(section.iter());
    }

    let given = |flag: &str| {
        argv.iter().any(|a| {
            a.to_str()
                .is_some_and(|s| s == flag || s.starts_with(&format!("{flag}=")))
        })
    };
    let mut out = argv.clone();
    let mut added: Vec<String> = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if given(&flag) || added.contains(&flag) {
            continue;
        }
        added.push(flag.clone());
        match (value, value_text(key, value)?) {
            (Value::Boolean(true), _) => out.push(flag.into()),
            (Value::Boolean(false), _) => {}
            (_, Some(text)) => {
                out.push(flag.into());
                out.push(text.into());
            }
            (_, None) => {}
        }
    }
    Ok(out)
}

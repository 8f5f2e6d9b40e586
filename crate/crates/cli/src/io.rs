use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use commgames::GameSpec;

use crate::{AnyStrategy, CliError};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            full.strip_suffix(&suffix).unwrap_or(&full).to_string()
        },
    }
}

pub fn parse_file<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

pub fn load_game(path: &Path) -> Result<GameSpec, CliError> {
    parse_file(path)
}

/// Accepts a `kind`-tagged strategy, a report written by `synth` (its
/// `strategy` field), or a bare strategy recognised by its keys.
pub fn load_strategy(path: &Path) -> Result<AnyStrategy, CliError> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    let (value, nested) = match value.get("strategy") {
        Some(inner) if value.get("resource").is_some() => (inner.clone(), true),
        _ => (value, false),
    };
    if value.get("kind").is_some() {
        return serde_json::from_value(value).map_err(|e| parse_error(path, e));
    }
    let has = |k: &str| value.get(k).is_some();
    let kind = if has("theory") {
        "polygon"
    } else if has("branches") {
        "correlated"
    } else if has("alpha") {
        "mixed"
    } else if has("encodings") {
        "qubit"
    } else {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            column: 0,
            message: "unrecognised strategy: expected a 'kind' tag or the fields of a mixed, correlated, qubit or polygon strategy".into(),
        });
    };
    if nested {
        let mut v = value;
        v.as_object_mut()
            .expect("strategy objects")
            .insert("kind".into(), Value::String(kind.into()));
        return serde_json::from_value(v).map_err(|e| parse_error(path, e));
    }
    // Parse the text as the concrete type so errors keep their position.
    match kind {
        "polygon" => serde_json::from_str(&text).map(AnyStrategy::Polygon),
        "correlated" => serde_json::from_str(&text).map(AnyStrategy::Correlated),
        "mixed" => serde_json::from_str(&text).map(AnyStrategy::Mixed),
        _ => serde_json::from_str(&text).map(AnyStrategy::Qubit),
    }
    .map_err(|e| parse_error(path, e))
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serialises");
    s.push('\n');
    s
}

pub fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of numbers and labels is utf-8"))
}

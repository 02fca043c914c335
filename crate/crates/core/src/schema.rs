//! JSON document loading with field-path and line/column error reporting.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{location}: {message}")]
    Schema {
        path: PathBuf,
        location: Location,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

/// Where in a JSON document a schema error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
    /// Dotted field path, e.g. `thresholds.hi` or `[3].cost`.
    pub field: String,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)?;
        if !self.field.is_empty() && self.field != "." {
            write!(f, " (field `{}`)", self.field)?;
        }
        Ok(())
    }
}

/// Parse `text` as `T`, attributing errors to `path`.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        LoadError::Schema {
            path: path.to_path_buf(),
            location: Location {
                line: inner.line(),
                column: inner.column(),
                field,
            },
            message: strip_position(&inner.to_string()),
        }
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(path, &text)
}

// serde_json appends " at line L column C"; the location is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    #[allow(dead_code)]
    struct Inner {
        hi: u32,
    }

    #[derive(Debug, Deserialize)]
    #[allow(dead_code)]
    struct Outer {
        name: String,
        thresholds: Inner,
    }

    #[test]
    fn reports_field_and_line() {
        let text = "{\n  \"name\": \"x\",\n  \"thresholds\": {\n    \"hi\": \"high\"\n  }\n}";
        let err = parse_json::<Outer>(Path::new("cfg.json"), text).unwrap_err();
        match &err {
            LoadError::Schema { location, .. } => {
                assert_eq!(location.line, 4);
                assert_eq!(location.field, "thresholds.hi");
            }
            other => panic!("unexpected {other:?}"),
        }
        let shown = err.to_string();
        assert!(shown.starts_with("cfg.json:4:"), "{shown}");
        assert!(shown.contains("thresholds.hi"), "{shown}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"name": "x", "thresholds": {"hi": 1, "lo": 2}}"#;
        let err = parse_json::<Outer>(Path::new("c.json"), text).unwrap_err();
        assert!(err.to_string().contains("unknown field `lo`"), "{err}");
    }
}

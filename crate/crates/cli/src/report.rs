//! Failure classes, exit codes and output sinks.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

/// A command failure and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or an unusable output path.
    Precondition(String),
    /// Infeasible loop, ambiguous snap, failed root search and the like.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Precondition(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Precondition(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<hydromono_core::Error> for Failure {
    fn from(e: hydromono_core::Error) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn precondition<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Precondition(msg.into()))
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Precondition(format!("cannot write to standard output: {e}")))
        }
    }
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// The three-part JSON document every command emits.
pub fn document(params: Map<String, Value>, result: Map<String, Value>, diagnostics: Map<String, Value>) -> String {
    let mut root = Map::new();
    root.insert("params".into(), Value::Object(params));
    root.insert("result".into(), Value::Object(result));
    root.insert("diagnostics".into(), Value::Object(diagnostics));
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
    text.push('\n');
    text
}

/// Builds a JSON object from `(key, value)` pairs, keeping their order.
#[macro_export]
macro_rules! object {
    ($($key:expr => $value:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut map = serde_json::Map::new();
        $(map.insert(String::from($key), serde_json::Value::from($value));)*
        map
    }};
}

use std::fmt;
use std::fs;
use std::path::Path;

use hypcircle::carpet::exterior_disk;
use hypcircle::{Disk, OrientedCircle};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "ks/1";

/// Exit codes.
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    pub fn validation(code: &str, message: impl Into<String>) -> Self {
        CliError { code: code.into(), message: message.into(), exit: EXIT_VALIDATION }
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({ "error": { "code": self.code, "message": self.message } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<hypcircle::Error> for CliError {
    fn from(e: hypcircle::Error) -> Self {
        let dbg = format!("{e:?}");
        let code = dbg.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
        let exit = if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERIC };
        CliError { code, message: e.to_string(), exit }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_value(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("Io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation("Parse", format!("{}: {e}", path.display())))
}

/// Strips the `{schema, command, params, result}` envelope written by this tool.
pub fn unwrap_envelope(v: Value) -> Value {
    match v {
        Value::Object(mut m) if m.get("schema").and_then(Value::as_str) == Some(SCHEMA) && m.contains_key("result") => {
            m.remove("result").unwrap_or(Value::Null)
        }
        other => other,
    }
}

pub fn from_value<T: DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::validation("Parse", format!("{what}: {e}")))
}

/// Reads a JSON artifact, accepting either the bare value or an envelope around it.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    from_value(unwrap_envelope(read_value(path)?), &path.display().to_string())
}

/// A circle given either in Hermitian form or as a Euclidean center and radius.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CircleInput {
    Euclidean { center: [f64; 2], radius: f64 },
    Hermitian(OrientedCircle),
}

impl CircleInput {
    pub fn circle(&self) -> CliResult<OrientedCircle> {
        match self {
            CircleInput::Hermitian(c) => Ok(*c),
            CircleInput::Euclidean { center, radius } => {
                OrientedCircle::disk_boundary(Complex64::new(center[0], center[1]), *radius)
                    .ok_or_else(|| CliError::validation("InvalidParams", format!("bad radius {radius}")))
            }
        }
    }
}

pub fn read_circle(path: &Path) -> CliResult<OrientedCircle> {
    read_json::<CircleInput>(path)?.circle()
}

/// A disk given either in full or as a Euclidean center and radius; `exterior`
/// selects the complement of the closed Euclidean disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DiskInput {
    Euclidean {
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        exterior: bool,
    },
    Full(Disk),
}

impl DiskInput {
    pub fn disk(&self) -> CliResult<Disk> {
        match self {
            DiskInput::Full(d) => Ok(*d),
            DiskInput::Euclidean { center, radius, exterior } => {
                let z = Complex64::new(center[0], center[1]);
                let d = if *exterior { exterior_disk(z, *radius) } else { Disk::euclidean(z, *radius) };
                d.ok_or_else(|| CliError::validation("InvalidParams", format!("bad radius {radius}")))
            }
        }
    }
}

/// The standard output document.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, P: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub params: &'a P,
    pub result: Value,
}

pub fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError { code: "Serialize".into(), message: e.to_string(), exit: EXIT_NUMERIC })
}

pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::validation("Io", format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

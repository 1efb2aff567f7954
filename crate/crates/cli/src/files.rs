//! Input file schemas.
//!
//! * pair: `{"a": matrix, "b": matrix}`
//! * state: `{"amplitudes": [[re, im], ...]}` or `{"rho": matrix}`
//! * observable: `{"observable": matrix}` or a bare matrix
//! * model: the output of `hv build`, either the full report or its `result`
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs.

use std::io::ErrorKind as IoKind;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use vn_criterion::{Complex, DensityMatrix, HermitianOperator, HiddenVariableModel};

use crate::error::{CliError, ErrorKind};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub a: HermitianOperator,
    pub b: HermitianOperator,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<Complex>>>,
}

impl StateFile {
    pub fn into_state(self) -> Result<DensityMatrix, CliError> {
        match (self.amplitudes, self.rho) {
            (Some(amps), None) => Ok(DensityMatrix::pure(&amps)?),
            (None, Some(rows)) => Ok(DensityMatrix::new(rows)?),
            _ => Err(CliError::new(
                ErrorKind::SchemaViolation,
                "state file needs exactly one of \"amplitudes\" or \"rho\"",
            )),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ObservableFile {
    Wrapped { observable: HermitianOperator },
    Bare(HermitianOperator),
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| {
        let kind = match e.kind() {
            IoKind::NotFound => ErrorKind::FileNotFound,
            IoKind::PermissionDenied | IoKind::IsADirectory | IoKind::InvalidData => {
                ErrorKind::BadFlag
            }
            _ => ErrorKind::Internal,
        };
        CliError::new(kind, format!("{}: {e}", path.display()))
    })
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::new(
            ErrorKind::SchemaViolation,
            format!("{}: {e}", path.display()),
        )
    })
}

pub fn load_pair(path: &Path) -> Result<PairFile, CliError> {
    let pair: PairFile = read_json(path)?;
    if pair.a.dim() != pair.b.dim() {
        return Err(CliError::new(
            ErrorKind::SchemaViolation,
            format!(
                "{}: a is {}x{} but b is {}x{}",
                path.display(),
                pair.a.dim(),
                pair.a.dim(),
                pair.b.dim(),
                pair.b.dim()
            ),
        ));
    }
    Ok(pair)
}

pub fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    read_json::<StateFile>(path)?.into_state()
}

pub fn load_observable(path: &Path) -> Result<HermitianOperator, CliError> {
    let text = read_text(path)?;
    match serde_json::from_str::<ObservableFile>(&text) {
        Ok(ObservableFile::Wrapped { observable }) | Ok(ObservableFile::Bare(observable)) => {
            Ok(observable)
        }
        Err(_) => {
            // Re-run the strict parsers so the message names the real problem.
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
                CliError::new(
                    ErrorKind::SchemaViolation,
                    format!("{}: {e}", path.display()),
                )
            })?;
            let inner = value.get("observable").cloned().unwrap_or(value);
            serde_json::from_value::<HermitianOperator>(inner).map_err(|e| {
                CliError::new(
                    ErrorKind::SchemaViolation,
                    format!("{}: {e}", path.display()),
                )
            })
        }
    }
}

pub fn load_model(path: &Path) -> Result<HiddenVariableModel, CliError> {
    let mut value: serde_json::Value = read_json(path)?;
    if value.get("schema").is_some() {
        value = value
            .get_mut("result")
            .map(serde_json::Value::take)
            .ok_or_else(|| {
                CliError::new(
                    ErrorKind::SchemaViolation,
                    format!("{}: report has no result", path.display()),
                )
            })?;
    }
    serde_json::from_value(value).map_err(|e| {
        CliError::new(
            ErrorKind::SchemaViolation,
            format!("{}: {e}", path.display()),
        )
    })
}

/// Parses `'[re,im],[re,im]'` (outer brackets optional).
pub fn parse_amplitudes(text: &str) -> Result<[Complex; 2], CliError> {
    let trimmed = text.trim();
    let parsed: Result<Vec<[f64; 2]>, _> =
        serde_json::from_str(&format!("[{trimmed}]")).or_else(|_| serde_json::from_str(trimmed));
    let pairs = parsed.map_err(|e| {
        CliError::new(
            ErrorKind::BadFlag,
            format!("--amplitudes {text:?}: expected [re,im],[re,im] ({e})"),
        )
    })?;
    match pairs.as_slice() {
        [a, b] => Ok([Complex::new(a[0], a[1]), Complex::new(b[0], b[1])]),
        _ => Err(CliError::new(
            ErrorKind::BadFlag,
            format!(
                "--amplitudes needs two complex entries, got {}",
                pairs.len()
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_with_and_without_brackets() {
        let a = parse_amplitudes("[0.6,0],[0,0.8]").unwrap();
        let b = parse_amplitudes("[[0.6,0],[0,0.8]]").unwrap();
        assert_eq!(a, b);
        assert_eq!(a[1], Complex::new(0.0, 0.8));
        assert_eq!(
            parse_amplitudes("[1,0]").unwrap_err().kind,
            ErrorKind::BadFlag
        );
        assert_eq!(
            parse_amplitudes("nope").unwrap_err().kind,
            ErrorKind::BadFlag
        );
    }

    #[test]
    fn state_file_needs_one_field() {
        let both: StateFile =
            serde_json::from_str(r#"{"amplitudes": [[1,0]], "rho": [[[1,0]]]}"#).unwrap();
        assert_eq!(
            both.into_state().unwrap_err().kind,
            ErrorKind::SchemaViolation
        );
        let none = StateFile::default();
        assert_eq!(
            none.into_state().unwrap_err().kind,
            ErrorKind::SchemaViolation
        );
        let rho: StateFile =
            serde_json::from_str(r#"{"rho": [[[1,0],[0,0]],[[0,0],[0,0]]]}"#).unwrap();
        assert_eq!(rho.into_state().unwrap().dim(), 2);
    }
}

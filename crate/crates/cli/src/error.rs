use std::fmt;

use serde::{Deserialize, Serialize};
use vn_criterion::{CriterionError, HvError, OpError, OpticsError, PhaseSpaceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorKind {
    UnknownCommand,
    BadFlag,
    FileNotFound,
    SchemaViolation,
    /// Well-formed input rejected by a mathematical precondition.
    InvalidInput,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Internal => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

fn op_kind(e: &OpError) -> ErrorKind {
    match e {
        OpError::ConvergenceFailure { .. } => ErrorKind::Internal,
        _ => ErrorKind::InvalidInput,
    }
}

fn criterion_kind(e: &CriterionError) -> ErrorKind {
    match e {
        CriterionError::Op(op) => op_kind(op),
        _ => ErrorKind::InvalidInput,
    }
}

macro_rules! from_core {
    ($ty:ty, $kind:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                let kind: fn(&$ty) -> ErrorKind = $kind;
                CliError::new(kind(&e), e.to_string())
            }
        }
    };
}

from_core!(OpError, op_kind);
from_core!(CriterionError, criterion_kind);
from_core!(HvError, |e| match e {
    HvError::Op(op) => op_kind(op),
    HvError::Criterion(c) => criterion_kind(c),
    HvError::InvalidModel(_) => ErrorKind::SchemaViolation,
    _ => ErrorKind::InvalidInput,
});
from_core!(OpticsError, |e| match e {
    OpticsError::Op(op) => op_kind(op),
    OpticsError::CancellationMismatch { .. } => ErrorKind::Internal,
    _ => ErrorKind::InvalidInput,
});
from_core!(PhaseSpaceError, |e| match e {
    PhaseSpaceError::Op(op) => op_kind(op),
    PhaseSpaceError::Criterion(c) => criterion_kind(c),
    PhaseSpaceError::SolverFailure(_) => ErrorKind::Internal,
    _ => ErrorKind::InvalidInput,
});

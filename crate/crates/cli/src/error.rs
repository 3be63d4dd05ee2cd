use std::fmt;

use gbs_tda::error::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_INVARIANT: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn format(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FORMAT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_)
            | Error::IndexOutOfRange { .. }
            | Error::DuplicateEdge(..)
            | Error::DiagonalEntry(_)
            | Error::ExplicitZeroEdge(..)
            | Error::NotSymmetric(_)
            | Error::DimensionMismatch { .. }
            | Error::LengthMismatch(..) => EXIT_FORMAT,
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Invariant(_) | Error::NonClosedComplex(_) | Error::Unnormalized(_) => EXIT_INVARIANT,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

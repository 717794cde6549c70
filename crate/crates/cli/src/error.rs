// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] sechgate::Error),
    #[error("{0} self-test check(s) failed")]
    SelfTest(usize),
}

impl CliError {
    /// 0 success, 1 failed self-test, 2 configuration or i/o, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelfTest(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub(crate) fn config(e: sechgate::Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

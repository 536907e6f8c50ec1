//! Front end for the `dgbv` engine: model files, dumps, reports and the
//! subcommands behind the `dgbv` binary.

pub mod commands;
pub mod dump;
pub mod lex;
pub mod modelfile;
pub mod report;

use std::path::Path;

use dgbv::models::Model;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: lex::ParseError },
    #[error("{path}: {source}")]
    Model { path: String, source: dgbv::models::ModelError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => commands::EXIT_IO,
            CliError::Model { .. } => commands::EXIT_INVALID,
        }
    }
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    modelfile::parse(&text).map_err(|e| match e {
        modelfile::LoadError::Parse(source) => CliError::Parse { path: shown, source },
        modelfile::LoadError::Model(source) => CliError::Model { path: shown, source },
    })
}

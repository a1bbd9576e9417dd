use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("input has no header row")]
    MissingHeader,
    #[error("class column `{0}` not found")]
    ClassColumnNotFound(String),
    #[error("column `{0}` not found")]
    ColumnNotFound(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row} has a missing value in column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("no rows remaining after ingestion")]
    NoRows,
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("value {value} out of range for attribute `{attribute}` (cardinality {cardinality})")]
    ValueOutOfRange {
        attribute: String,
        value: usize,
        cardinality: usize,
    },
    #[error("value `{value}` was not seen for attribute `{attribute}` during training")]
    UnseenValue { attribute: String, value: String },
    #[error("invalid variable list: {0}")]
    InvalidVariables(String),
    #[error("expected a table over {expected} variables, got {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("contingency table is empty")]
    EmptyTable,
    #[error("attribute index {0} is the class or out of range")]
    InvalidAttribute(usize),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("instance has {found} values, expected {expected}")]
    InstanceLength { expected: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{attributes} attributes exceeds the enumeration cap of {cap}")]
    CapExceeded { attributes: usize, cap: usize },
}

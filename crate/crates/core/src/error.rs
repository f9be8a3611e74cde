use thiserror::Error;

use crate::category::CategoryReport;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("no composite declared for {g} o {f}")]
    MissingComposite { g: String, f: String },
    #[error("arrows {g} and {f} are not composable")]
    NotComposable { g: String, f: String },
    #[error("category table is invalid: {0}")]
    InvalidCategory(CategoryReport),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("cyclic order {order} does not divide ring exponent {exponent}")]
    OrderDivisibility { order: u64, exponent: u64 },
    #[error("matrix entry ({row}, {col}) = {value} is not well defined: {reason}")]
    MatrixEntry {
        row: usize,
        col: usize,
        value: i64,
        reason: String,
    },
    #[error("matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("modules live over different rings")]
    RingMismatch,
    #[error("domain/codomain mismatch: {0}")]
    Mismatch(String),
    #[error("presheaf is not functorial: {0}")]
    InvalidPresheaf(String),
    #[error("morphism is not natural: {0}")]
    NotNatural(String),
    #[error("objects do not generate the category: {u} and {v} are not separated")]
    NotGenerating { u: String, v: String },
    #[error("basis fails validation: {0}")]
    InvalidBasis(String),
    #[error("{count} arrows into `{object}` exceeds the sieve lattice cap of {cap}")]
    BoundExceeded {
        object: String,
        count: usize,
        cap: usize,
    },
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("topology invariant violated: {0}")]
    InvalidTopology(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("operation cancelled")]
    Cancelled,
}

pub type Result<T> = std::result::Result<T, Error>;

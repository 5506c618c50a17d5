use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero gcd undefined")]
    ZeroGcd,
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported field order {0}: need a prime power at most 256")]
    BadFieldOrder(u32),
    #[error("field mismatch")]
    FieldMismatch,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a direct factor")]
    NotPrimitive,
    #[error("in U_G_bullet")]
    SingularTopBlock,
    #[error("not in U_G")]
    NotInUg,
    #[error("lattice is not sharp")]
    NotSharp,
    #[error("covolume not 1")]
    NotUnimodular,
    #[error("shape undefined")]
    ShapeUndefined,
    #[error("pole of zeta at s = {0}")]
    ZetaPole(i64),
    #[error("zero ideal")]
    ZeroIdeal,
    #[error("denominators are not powers of Y")]
    NotYLocal,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration budget exceeded: {needed} nodes > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

/// Errors raised by the SIMD backends, the RLWE scheme and the MatMult engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector of length {len} does not fit in {slots} slots")]
    VectorTooLong { len: usize, slots: usize },
    #[error("value {value} overflows the plaintext modulus at the configured scale")]
    OverflowAtScale { value: String },
    #[error("scale exponent mismatch: {left} vs {right}")]
    ScaleMismatch { left: u32, right: u32 },
    #[error("slot count mismatch: {left} vs {right}")]
    SlotCountMismatch { left: usize, right: usize },
    #[error("multiplication level exhausted")]
    LevelExhausted,
    #[error("rotation offset {offset} out of range for {slots} slots")]
    OffsetOutOfRange { offset: usize, slots: usize },
    #[error("hoisted rotation offsets must be distinct (offset {0} repeated)")]
    DuplicateOffset(usize),
    #[error("no measurement scope is open")]
    ScopeNotOpen,
    #[error("ciphertext was encrypted under key {found}, expected key {expected}")]
    KeyMismatch { expected: u64, found: u64 },
    #[error("operation mixes slot-domain and coefficient-domain operands")]
    DomainMismatch,
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("polynomial moduli or degrees differ")]
    ModulusMismatch,
    #[error("no Galois key registered for rotation offset {0}")]
    MissingGaloisKey(usize),
    #[error("{m}x{n} matrix does not fit in ring degree {degree}")]
    MatrixTooLarge { m: usize, n: usize, degree: usize },
    #[error("coefficient index {index} out of range for degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },
    #[error("operand {m}x{n} exceeds {slots} slots; partition it first")]
    OperandTooLarge { m: usize, n: usize, slots: usize },
    #[error("input packing leaves no vacant slots for a {m}x{n} matrix")]
    PackingNotApplicable { m: usize, n: usize },
    #[error("{m}x{n} fits in {slots} slots; partitioning not required")]
    NotRequired { m: usize, n: usize, slots: usize },
    #[error("encoded matrix layout does not match method {0}")]
    EncodingMismatch(String),
    #[error("encrypted vector layout does not match method {0}")]
    ReplicationMismatch(String),
    #[error("reduction plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("{len} values split {parts} ways exceed {slots} slots")]
    CapacityExceeded { len: usize, parts: usize, slots: usize },
    #[error("layout unsupported: {0}")]
    LayoutUnsupported(String),
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

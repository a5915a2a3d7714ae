use hesimd_core::simd::Party;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Core(#[from] hesimd_core::Error),
    #[error("channel {from} -> {to} is closed")]
    ChannelClosed { from: Party, to: Party },
    #[error("no message waiting on {from} -> {to}")]
    NoMessage { from: Party, to: Party },
    #[error("unexpected message on {from} -> {to}: wanted {wanted}")]
    UnexpectedMessage { from: Party, to: Party, wanted: &'static str },
    #[error("transcript incomplete: {0} message(s) never received")]
    IncompleteTranscript(usize),
    #[error("backward pass needs the converted transpose of the embedding")]
    MissingConvertedTranspose,
    #[error("dataset missing: {0}")]
    DatasetMissing(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

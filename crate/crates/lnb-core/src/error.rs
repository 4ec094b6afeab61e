use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by featurization, training, knowledge storage, and
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A review produced no feature tokens (e.g. text was all punctuation).
    #[error("document contains no usable tokens")]
    EmptyDocument,

    /// A training set was empty.
    #[error("no training documents supplied")]
    NoTrainingData,

    /// A document without a gold label reached a training or scoring path
    /// that requires one.
    #[error("document in domain {0:?} has no label")]
    UnlabeledDoc(String),

    /// A model would have an empty vocabulary, leaving word probabilities
    /// undefined for every class.
    #[error("training produced an empty vocabulary")]
    EmptyVocabulary,

    /// A task with this domain id is already stored in the knowledge base.
    #[error("domain {0:?} is already present in the knowledge base")]
    DuplicateDomain(String),

    /// Knowledge aggregation needs at least one task other than the target.
    #[error("knowledge base holds no tasks other than {0:?}")]
    NoNonTargetTasks(String),

    /// The requested domain is not stored in the knowledge base.
    #[error("domain {0:?} is not present in the knowledge base")]
    UnknownDomain(String),

    /// A persisted knowledge base was written by an incompatible version.
    #[error("knowledge base schema version {found} is not supported (expected {expected})")]
    SchemaMismatch { found: u64, expected: u64 },

    /// A persisted knowledge base failed to parse or violated an invariant.
    #[error("corrupt knowledge base file {path:?}: {detail}")]
    CorruptFile { path: PathBuf, detail: String },

    /// An input record could not be parsed or failed validation.
    #[error("invalid record at line {line}: {detail}")]
    InvalidRecord { line: usize, detail: String },

    /// Prediction and ground-truth label sequences differ in length.
    #[error("got {predicted} predictions for {actual} labels")]
    LengthMismatch { predicted: usize, actual: usize },

    /// Nothing to score.
    #[error("cannot score an empty prediction list")]
    EmptyEvaluation,

    /// A class has too few documents for the requested split or sample.
    #[error("{scope}: class {class} has {available} documents, need at least {needed}")]
    InsufficientClassSize {
        scope: String,
        class: &'static str,
        available: usize,
        needed: usize,
    },

    /// A task sequence referenced a domain absent from the corpus.
    #[error("sequence {sequence:?} references unknown domain {domain:?}")]
    UnknownDomainInSequence { sequence: String, domain: String },

    /// A task sequence must contain at least two entries to define a past
    /// and a target.
    #[error("task sequence {name:?} has {len} entries, need at least 2")]
    SequenceTooShort { name: String, len: usize },

    /// An evaluation protocol needs more domains than the corpus provides.
    #[error("need at least {needed} domains, corpus has {available}")]
    NotEnoughDomains { needed: usize, available: usize },

    /// An experiment configuration violates a documented bound.
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    /// Raw training documents were accessed after mining consumed them.
    #[error("raw training data for {0:?} was destroyed after mining")]
    TrainingDataDestroyed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

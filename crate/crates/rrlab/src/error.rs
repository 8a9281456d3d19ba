//! Shared error type for codecs, constructions and the pipeline harness.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("set element {element} exceeds the bit-coding range")]
    SetElementTooLarge { element: u64 },

    #[error("set does not belong to the sized family (size {expected_size}, min {min_value}): got {got_size} elements")]
    SizedFamilyShape {
        expected_size: usize,
        got_size: usize,
        min_value: u64,
    },

    #[error("domain bound {domain} too small: construction decoded element {element}")]
    DomainTooSmall { domain: u64, element: u64 },

    #[error("sized decoding malformed: requirement {requirement} has fewer than {needed} unclaimed elements at stage {stage}")]
    PairAvailability {
        requirement: u64,
        needed: usize,
        stage: u64,
    },

    #[error("iteration cap {cap} exceeded while reducing pair ({x}, {y})")]
    IterationCap { cap: u64, x: u64, y: u64 },

    #[error("colouring is not {t}-trapped: tuple {tuple:?} has value {value}")]
    NotTrapped { t: usize, tuple: Vec<u64>, value: u64 },

    #[error("colouring fails the required stability class: {class}")]
    NotStable { class: String },

    #[error("limit table does not stabilize: argument {arg} still moves at stage {stage}")]
    NoStabilization { arg: u64, stage: u64 },

    #[error("tree measure below threshold: need at least 2^-{k}")]
    MeasureTooSmall { k: u32 },

    #[error("depth exhausted after {achieved} elements: 2^-{k} is below the tree resolution")]
    DepthExhausted { achieved: usize, k: u32 },

    #[error("bigness undecided: universe bound {universe} or length cap {len_cap} too small")]
    BignessUndecided { universe: u64, len_cap: usize },

    #[error("no admissible extension: all candidates above {last} up to {universe} land in the bad set")]
    NoExtension { last: u64, universe: u64 },

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("instance file: {0}")]
    Instance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

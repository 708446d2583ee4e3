//! Symbolic toolkit for computing the complete sequential flexibility (CSF)
//! of a component inside a multi-level sequential network.
//!
//! Given a circuit, a latch split carves it into a fixed part `F` and a
//! placeholder implementation `X_p` of the unknown part. The behavior of the
//! original circuit serves as the specification `S`, and the CSF is the most
//! general prefix-closed, input-progressive solution `X` of `F • X ⊆ S`.
//! Two flows compute it: a monolithic one that builds full transition-output
//! relations, and a partitioned one that keeps per-latch/per-output functions
//! and fuses completion, hiding, product and complementation into a single
//! subset construction driven by image computations.

pub mod aut;
pub mod automata;
pub mod dd;
pub mod gen;
pub mod netlist;
pub mod oracle;
pub mod relations;
pub mod solver;

use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum CsfError {
    /// Malformed textual input (BLIF-lite, AUT, split spec, ...).
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// An API precondition was violated by the caller.
    #[error("{0}")]
    Usage(String),
    /// Two functions from different managers were combined.
    #[error("functions belong to different decision-diagram managers")]
    ManagerMismatch,
    /// The decision-diagram node limit was exceeded.
    #[error("node limit of {0} live nodes exceeded")]
    NodeLimit(usize),
    /// A subset construction exceeded its state budget.
    #[error("subset limit of {0} states exceeded")]
    SubsetLimit(usize),
    /// The configured deadline passed while an operation was running.
    #[error("deadline exceeded")]
    Timeout,
}

impl CsfError {
    /// True for errors caused by resource exhaustion rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            CsfError::NodeLimit(_) | CsfError::SubsetLimit(_) | CsfError::Timeout
        )
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CsfError::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        CsfError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CsfError>;

//! Probabilistic circuits over binary, categorical and continuous variables,
//! with passes that move between mass functions, distribution functions and
//! generating functions, and brute-force oracles to check them.

pub mod binary;
pub mod categorical;
pub mod circuit;
pub mod cli;
pub mod continuous;
pub mod format;
pub mod oracle;
pub mod structure;

pub use circuit::{Circuit, CircuitBuilder, LeafFn, LeafMode, Node, NodeId, SemanticsTag, VarKind};

//! Signature calculus for locally finite graphs.

pub mod ordinal;
pub mod signature;
pub mod oracle;
pub mod semantics;
pub mod answer;
pub mod canonical;
pub mod poset;
pub mod classify;
pub mod flux;
pub mod atlas;
pub mod cli;

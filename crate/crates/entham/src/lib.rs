//! Entropy-method toolkit for tight Hamilton cycles in Dirac hypergraphs.

pub mod bounds;
pub mod chain;
pub mod cli;
pub mod counting;
pub mod entropy;
pub mod hypergraph;
pub mod math;
pub mod pipeline;
pub mod report;
pub mod surgery;
pub mod walk;

//! Inhomogeneous random K-out graphs: sampling, largest-component
//! measurement under random node deletion, exact finite-n cut probabilities,
//! and closed-form tail bounds.

pub mod bounds;
pub mod cli;
pub mod components;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod union_find;
pub mod validate;

pub use components::{connected_components, ComponentReport};
pub use error::{Error, Result};
pub use graph::{GraphParams, GraphView, KoutGraph};

//! Exact simulation of globally depolarized circuit sampling, with numeric
//! checks of the uniform-sampler error bounds, the randomized ancilla
//! construction and its acceptance thresholds, and the k-copy
//! distinguishability chain.
//!
//! ```
//! use depolab::{circuit::parse_circuit, depol, statevector};
//!
//! let bell = parse_circuit("qubits 2\nH 0\nCNOT 0 1\n").unwrap();
//! let p = statevector::output_distribution(&bell).unwrap();
//! let f = depol::Fidelity::new(0.5).unwrap();
//! let cert = depol::additive_certificate(&p, f);
//! assert!(cert.passed && (cert.achieved - 0.5).abs() < 1e-12);
//! ```

pub mod circuit;
pub mod depol;
pub mod discrimination;
pub mod error;
pub mod experiment;
pub mod random;
pub mod statevector;
pub mod supremacy;

pub use error::{Error, Result};

/// Shared numeric tolerances.
pub mod tolerance {
    /// Quantities equal by construction (norms, sums, algebraic identities).
    pub const EXACT: f64 = 1e-12;
    /// Comparisons against an independently computed oracle.
    pub const ORACLE: f64 = 1e-10;
}

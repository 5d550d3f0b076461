//! Numerical toolkit for linear maps on finite-dimensional quantum systems.
//!
//! Maps are stored as normalized Choi matrices `χ = (id ⊗ Λ)[P⁺]`. On top of
//! that representation the crate builds structural physical approximations
//! (admixing white noise until a positive map becomes completely positive),
//! entanglement-breaking certification, two-design measure-and-prepare
//! realizations, entanglement witnesses and detection pipelines.
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod channels;
pub mod cli;
pub mod designs;
pub mod detect;
mod error;
pub mod json;
pub mod product;
pub mod spa;
pub mod states;
pub mod tensor;
pub mod witnesses;

pub use channels::{KrausSet, MapClassification, NamedMap, PositivityEstimate, QuantumMap};
pub use designs::{DesignKind, DesignSet};
pub use detect::{DetectionReport, SeparableApproximation};
pub use error::{Error, Result};
pub use spa::{EbVerdict, MeasurePrepareChannel, SpaResult};
pub use states::DensityMatrix;
pub use tensor::{ComplexMatrix, DimProfile};
pub use witnesses::{LocalDecomposition, SpaWitness, Witness};

pub use num_complex::Complex64 as C64;

/// Numerical tolerances shared across modules.
pub mod tol {
    /// A Hermitian operator counts as PSD iff its minimum eigenvalue is at least `-PSD`.
    pub const PSD: f64 = 1e-9;
    /// Hermiticity and unit-trace tolerance for validated states.
    pub const STATE: f64 = 1e-12;
    /// Eigenvalues above this are kept when extracting Kraus operators.
    pub const KRAUS_CUTOFF: f64 = 1e-10;
    /// Trace-preservation / unitality tolerance.
    pub const TP: f64 = 1e-10;
    /// Strict margin for exact (non-sampled) detection verdicts.
    pub const DETECTION: f64 = 1e-10;
    /// Multi-start product minimum accepted as "still a witness".
    pub const WITNESS_FLOOR: f64 = 1e-6;
}

//! Simulator and optimizer for quantum-limited single-qubit gate fidelity
//! under the resonant Jaynes–Cummings model.
//!
//! The crate models a two-level qubit driven by a single bosonic mode (the
//! *drive*) through the resonant Jaynes–Cummings interaction
//!
//! ```text
//! H_int = ħ g (|e⟩⟨g| ⊗ a + |g⟩⟨e| ⊗ a†),
//! ```
//!
//! with an on–off envelope, so all dynamics depend only on the product `gT`.
//! On top of the closed-form propagator it provides:
//!
//! - [`fock`]: drive states in a truncated Fock basis — coherent, squeezed
//!   coherent, and squeezed cat states — plus Wigner functions, photon
//!   statistics, and purity.
//! - [`jc`]: the exact propagator, structured (matrix-free) evolution of
//!   joint qubit-register ⊗ drive states, partial traces, and the
//!   semiclassical gate limit.
//! - [`error`]: gate-error functionals. Every gate error is the expectation
//!   of a Hermitian Fock-space operator in the drive state,
//!   `ℰ = 1 − ⟨σ|F|σ⟩`, assembled in closed form for a pointwise qubit
//!   state, for the Bloch-sphere average, and for the worst-case qubit
//!   state of π-rotations; together with first-order analytic expressions.
//! - [`optimize`]: fidelity-optimal drive states as dominant eigenvectors
//!   of error operators, Gaussian-state fitting, and the commutator
//!   scaling diagnostic.
//! - [`protocol`]: Monte Carlo simulators for the drive-refreshing
//!   protocol in which a single itinerant pulse generates many gates and
//!   is restored by ancilla interactions (ideal, entangled-register, and
//!   corrector-pulse variants), plus ancilla diagnostics.
//! - [`budget`]: surface-code power-budget arithmetic.
//!
//! # Conventions
//!
//! - Qubit basis `|g⟩ = (1,0)ᵀ`, `|e⟩ = (0,1)ᵀ`.
//! - Composite bases are ordered qubit-major, Fock-minor: the joint index
//!   of `(qubit bits b, Fock level l)` is `b·N_cut + l`, and qubit 0 is the
//!   most significant bit.
//! - Rotations: `R'_θ(φ) = exp[−i(θ/2)(cos φ·X + sin φ·Y)]`, an angle-θ
//!   rotation about an axis in the xy-plane at angle φ from x.
//! - Squeezing: `S(r) = exp[(r* a² − r (a†)²)/2]`; displacement
//!   `D(α) = exp(α a† − α* a)`; squeezed coherent state
//!   `|α, r⟩ = D(α) S(r) |0⟩` with principal-branch exponentials. A
//!   rotated axis φ uses `α = √n̄ e^{iφ}` and `r → e^{2iφ}·r`.

pub mod budget;
pub mod error;
pub mod fock;
pub mod jc;
mod linalg;
pub mod optimize;
pub mod protocol;

use thiserror::Error as ThisError;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Errors reported by fallible operations in this crate.
#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    /// A constructed state keeps non-negligible weight on the last Fock
    /// level, so the truncation is not trustworthy.
    #[error("Fock cutoff {n_cut} too small: top-level occupation {leakage:.3e} exceeds {limit:.1e}")]
    CutoffTooSmall {
        n_cut: usize,
        leakage: f64,
        limit: f64,
    },
    /// A cutoff fails the adequacy rule `N_cut ≥ n̄ + 10√n̄ + 20`.
    #[error("Fock cutoff {n_cut} below the adequacy rule: need at least {required} for n̄ = {n_bar}")]
    CutoffBelowRule {
        n_cut: usize,
        required: usize,
        n_bar: f64,
    },
    /// The two branches of a cat state cancel to numerical zero.
    #[error("degenerate cat state: branch superposition has norm {norm:.3e}")]
    DegenerateState { norm: f64 },
    /// A qubit index does not exist in the joint state.
    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    /// A fit or scan needs more sample points.
    #[error("insufficient points: got {got}, need at least {need}")]
    InsufficientPoints { got: usize, need: usize },
    /// The requested analytic (gate, family, which) combination has no
    /// known first-order closed form.
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    /// A register simulation would exceed the in-memory budget.
    #[error("memory budget exceeded: {0}")]
    MemoryBudget(String),
    /// A configuration value is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Smallest cutoff satisfying the adequacy rule `N_cut ≥ n̄ + 10√n̄ + 20`.
///
/// Gaussian-like drive states of mean photon number n̄ have photon-number
/// spread O(√n̄); keeping ten standard deviations plus a constant margin
/// makes truncation effects negligible. Constructors in [`fock`] check the
/// realized top-level occupation instead (which is slightly more
/// permissive); this rule is what configuration validation enforces.
pub fn recommended_cutoff(n_bar: f64) -> usize {
    (n_bar + 10.0 * n_bar.sqrt() + 20.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recommended_cutoff_matches_rule() {
        assert_eq!(recommended_cutoff(0.0), 20);
        assert_eq!(recommended_cutoff(9.0), 59);
        assert_eq!(recommended_cutoff(100.0), 220);
        assert_eq!(recommended_cutoff(400.0), 620);
    }
}

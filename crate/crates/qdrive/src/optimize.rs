//! Fidelity-optimal drive states as dominant eigenvectors of error
//! operators, Gaussian characterization of states, and the
//! `[F̂_min, F̂_avg]` commutator-scaling diagnostic.
//!
//! The drive state minimizing a gate-error functional `ℰ = 1 − ⟨σ|F̂|σ⟩`
//! is the eigenvector of `F̂` with the algebraically largest eigenvalue
//! `f`; `1 − f` is then the greatest lower bound of the error over all
//! drive states in the truncated space. Raising the cutoff far beyond the
//! photon-number scale of interest reveals additional, more energetic
//! eigenstates that implement the same gate after an integer number of
//! unnecessary 2π rotations (and with correspondingly lower error), so
//! the cutoff should be chosen for the energy branch under study — the
//! adequacy rule [`crate::recommended_cutoff`] applied to the target
//! photon number does this.

use nalgebra::{DMatrix, DVector};

use crate::error::{
    error_operator_average, error_operator_min, AverageMethod, ErrorOperator,
};
use crate::fock::{squeezed_vacuum_amplitudes, DriveState};
use crate::jc::GateMatrix;
use crate::linalg::{apply_displacement, hermitian_eigen, nelder_mead};
use crate::{recommended_cutoff, C64, Error, Result};

/// Eigenvalues closer than this to the top are treated as one degenerate
/// cluster.
const DEGENERACY_WINDOW: f64 = 1e-9;
/// Largest dimension solved by direct full eigendecomposition.
const FULL_EIGEN_LIMIT: usize = 512;
/// Power-iteration budget before falling back to the full solver.
const POWER_ITERATION_CAP: usize = 50_000;
/// Residual ‖F̂σ − fσ‖ required of the returned eigenpair.
const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Result of [`optimal_drive_state`].
#[derive(Debug, Clone)]
pub struct OptimalDriveState {
    /// Normalized top eigenvector, with the global phase fixed so the
    /// largest-magnitude amplitude is real and positive.
    pub state: DriveState,
    /// The top eigenvalue `f`; the lower-bound error is `1 − f`.
    pub fidelity: f64,
    /// True when several eigenvalues lie within `1e−9` of the top; the
    /// returned state is then the cluster member with the smallest mean
    /// photon number (avoiding needlessly energetic solutions).
    pub degenerate: bool,
}

fn mean_photon_of(v: &DVector<C64>) -> f64 {
    v.iter()
        .enumerate()
        .map(|(l, a)| l as f64 * a.norm_sqr())
        .sum()
}

fn fix_phase(mut v: DVector<C64>) -> DVector<C64> {
    let mut best = 0usize;
    for i in 0..v.len() {
        if v[i].norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    let phase = v[best] / v[best].norm();
    v /= phase;
    v
}

/// Finds the drive state with the greatest fidelity expectation
/// `⟨σ|F̂|σ⟩` — the top eigenvector of the operator.
///
/// Dimensions up to 512 use a full Hermitian eigendecomposition; larger
/// ones use power iteration with deflation to probe for a degenerate
/// companion, falling back to the full solver if the iteration does not
/// reach the residual tolerance (the signature of a near-degenerate top
/// of the spectrum). Among top eigenvalues within `1e−9` of each other,
/// the eigenvector with the smallest mean photon number is returned and
/// the result is flagged degenerate.
pub fn optimal_drive_state(f: &ErrorOperator) -> OptimalDriveState {
    let n = f.n_cut();
    let (vec, val, degenerate) = if n <= FULL_EIGEN_LIMIT {
        top_eigenpair_full(f.matrix())
    } else {
        match top_eigenpair_power(f.matrix()) {
            Some(hit) => hit,
            None => top_eigenpair_full(f.matrix()),
        }
    };
    let vec = fix_phase(vec);
    let state = DriveState::from_amplitudes(vec.iter().copied().collect::<Vec<_>>())
        .expect("eigenvector is normalized");
    OptimalDriveState {
        state,
        fidelity: val,
        degenerate,
    }
}

fn top_eigenpair_full(m: &DMatrix<C64>) -> (DVector<C64>, f64, bool) {
    let n = m.nrows();
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals[n - 1];
    let mut best_idx = n - 1;
    let mut best_photon = f64::INFINITY;
    let mut cluster = 0usize;
    for i in (0..n).rev() {
        if top - vals[i] > DEGENERACY_WINDOW {
            break;
        }
        cluster += 1;
        let photon = mean_photon_of(&vecs.column(i).into_owned());
        if photon < best_photon {
            best_photon = photon;
            best_idx = i;
        }
    }
    (
        vecs.column(best_idx).into_owned(),
        vals[best_idx],
        cluster > 1,
    )
}

/// Power iteration for the dominant eigenpair (valid because error
/// operators are positive semidefinite), followed by one deflated
/// iteration to detect a near-degenerate companion. Returns `None` if
/// either stage fails to converge within the iteration cap.
fn top_eigenpair_power(m: &DMatrix<C64>) -> Option<(DVector<C64>, f64, bool)> {
    let n = m.nrows();
    let start = DVector::from_fn(n, |i, _| C64::new(1.0 / (1.0 + i as f64), 1e-3));
    let (v1, l1) = power_iterate(m, start, None)?;
    let start2 = DVector::from_fn(n, |i, _| {
        C64::new((1.0 + i as f64).sqrt().sin(), 1e-3 * (i as f64).cos())
    });
    let (v2, l2) = power_iterate(m, start2, Some(&v1))?;
    if l1 - l2 <= DEGENERACY_WINDOW {
        if mean_photon_of(&v2) < mean_photon_of(&v1) {
            Some((v2, l2, true))
        } else {
            Some((v1, l1, true))
        }
    } else {
        Some((v1, l1, false))
    }
}

fn power_iterate(
    m: &DMatrix<C64>,
    mut v: DVector<C64>,
    deflate: Option<&DVector<C64>>,
) -> Option<(DVector<C64>, f64)> {
    let orthogonalize = |v: &mut DVector<C64>| {
        if let Some(d) = deflate {
            let overlap = d.dotc(v);
            v.axpy(-overlap, d, C64::new(1.0, 0.0));
        }
    };
    orthogonalize(&mut v);
    v /= C64::new(v.norm(), 0.0);
    for _ in 0..POWER_ITERATION_CAP {
        let mut w = m * &v;
        orthogonalize(&mut w);
        let lambda = v.dotc(&w).re;
        let residual = (&w - &v * C64::new(lambda, 0.0)).norm();
        if residual < RESIDUAL_TOLERANCE {
            return Some((v, lambda));
        }
        let norm = w.norm();
        if norm < 1e-300 {
            return None;
        }
        v = w / C64::new(norm, 0.0);
    }
    None
}

/// Least-squares Gaussian characterization of a drive state.
#[derive(Debug, Clone)]
pub struct StateFit {
    /// Effective displacement of the best-fit squeezed coherent state.
    pub alpha: C64,
    /// Effective (complex) squeezing parameter.
    pub r: C64,
    /// `1 − |⟨α,r|state⟩|²`; near zero for Gaussian states, ≈ 0.5 for
    /// two-component cat states.
    pub residual: f64,
}

/// Fits `|α,r⟩ = D̂(α)Ŝ(r)|0⟩` to `state` by maximizing the overlap
/// `|⟨α,r|state⟩|²` with Nelder–Mead over `(Re α, Im α, Re r, Im r)`.
///
/// Two starts are tried and the better fit kept: a moment-based start
/// (`α₀ = ⟨a⟩`, squeezing magnitude from the photon-number variance) and
/// a cat-aware start (`α₀ = √⟨a²⟩`) for states with `|⟨a⟩|² ≪ ⟨n⟩`,
/// whose first moment vanishes.
pub fn characterize_state(state: &DriveState) -> StateFit {
    let n = state.n_cut();
    let amps = state.amplitudes();

    // Moments ⟨a⟩, ⟨a²⟩, ⟨n⟩, Var(n).
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    for l in 0..n - 1 {
        a1 += amps[l].conj() * ((l + 1) as f64).sqrt() * amps[l + 1];
    }
    for l in 0..n.saturating_sub(2) {
        a2 += amps[l].conj() * (((l + 1) * (l + 2)) as f64).sqrt() * amps[l + 2];
    }
    let n_mean = state.mean_photon();
    let n_std = state.photon_std();

    // For a squeezed coherent state with aligned phases, Δn ≈ √n̄·e^{−r}.
    let r_mag = if n_std > 1e-12 && n_mean > 1e-9 {
        (n_mean.sqrt() / n_std).ln()
    } else {
        0.0
    };

    let objective = |p: &[f64]| -> f64 {
        let alpha = C64::new(p[0], p[1]);
        let r = C64::new(p[2], p[3]);
        1.0 - overlap_with_gaussian(alpha, r, state)
    };

    let mut candidates: Vec<[f64; 4]> = Vec::new();
    let phase2 = if a1.norm() > 1e-9 {
        let u = a1 / a1.norm();
        u * u
    } else {
        C64::new(1.0, 0.0)
    };
    let r0 = phase2 * r_mag;
    candidates.push([a1.re, a1.im, r0.re, r0.im]);
    if a1.norm_sqr() < 0.5 * n_mean.max(1e-12) && a2.norm() > 1e-12 {
        // Cat-like state: ⟨a⟩ ≈ 0 but ⟨a²⟩ ≈ α².
        let alpha0 = a2.sqrt();
        let u2 = a2 / a2.norm();
        let rc = u2 * r_mag;
        candidates.push([alpha0.re, alpha0.im, rc.re, rc.im]);
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in candidates {
        let scale = [
            0.1 * (1.0 + n_mean.sqrt()),
            0.1 * (1.0 + n_mean.sqrt()),
            0.1,
            0.1,
        ];
        let (params, value) = nelder_mead(objective, &start, &scale, 4000);
        if best.as_ref().map_or(true, |(_, v)| value < *v) {
            best = Some((params, value));
        }
    }
    let (p, value) = best.unwrap();
    StateFit {
        alpha: C64::new(p[0], p[1]),
        r: C64::new(p[2], p[3]),
        residual: value.max(0.0),
    }
}

/// `|⟨α,r|state⟩|²` with the candidate normalized on the truncated space.
fn overlap_with_gaussian(alpha: C64, r: C64, state: &DriveState) -> f64 {
    let n = state.n_cut();
    let squeezed = DVector::from_vec(squeezed_vacuum_amplitudes(r, n));
    let candidate = apply_displacement(alpha, &squeezed);
    let norm = candidate.norm();
    if norm < 1e-12 {
        return 0.0;
    }
    let overlap = candidate.dotc(state.amplitudes()) / C64::new(norm, 0.0);
    overlap.norm_sqr()
}

/// `max |(AB − BA)_{ij}|` for two Hermitian banded matrices, restricted
/// to rows `row_lo..=row_hi`. Error operators have bandwidth 2, so the
/// commutator has bandwidth ≤ 4 and the scan is O(N). The row window
/// matters: near the truncation edge the operator coefficients reflect
/// the cutoff rather than the physics (`gT√k` crosses π/2 there), and
/// those elements dominate an unrestricted maximum while never touching
/// the drive support.
fn commutator_max_abs_rows(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
    bandwidth: usize,
    row_lo: usize,
    row_hi: usize,
) -> f64 {
    let n = a.nrows();
    let mut max_abs = 0.0f64;
    let w = 2 * bandwidth;
    for i in row_lo..=row_hi.min(n - 1) {
        let j_lo = i.saturating_sub(w);
        let j_hi = (i + w).min(n - 1);
        for j in j_lo..=j_hi {
            let mut ab = C64::new(0.0, 0.0);
            let mut ba = C64::new(0.0, 0.0);
            let k_lo = i.saturating_sub(bandwidth).max(j.saturating_sub(bandwidth));
            let k_hi = (i + bandwidth).min(j + bandwidth).min(n - 1);
            for k in k_lo..=k_hi {
                ab += a[(i, k)] * b[(k, j)];
                ba += b[(i, k)] * a[(k, j)];
            }
            max_abs = max_abs.max((ab - ba).norm());
        }
    }
    max_abs
}

/// Log–log slope of `max|[F̂_min, F̂_avg]|` against `n̄`, with the
/// operators built for the π-rotation about `phi_axis` at the matched
/// timing `gT = π/(2√n̄)` and the adequacy-rule cutoff for each `n̄`.
/// The maximum is taken over the drive-support window `|k − n̄| ≤ 4√n̄`,
/// where the commutator elements decay as `n̄⁻³` (measured slope −3.0),
/// so the expected slope is −3; in that limit the two operators share
/// eigenvectors and a single drive state optimizes both statistics.
/// Elements outside the window, near the truncation edge, are artifacts
/// of the cutoff and grow with `n̄`.
pub fn commutator_scaling(phi_axis: f64, n_bars: &[f64]) -> Result<f64> {
    if n_bars.len() < 2 {
        return Err(Error::InsufficientPoints {
            got: n_bars.len(),
            need: 2,
        });
    }
    let mut xs = Vec::with_capacity(n_bars.len());
    let mut ys = Vec::with_capacity(n_bars.len());
    for &n_bar in n_bars {
        if n_bar <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mean photon number must be positive, got {n_bar}"
            )));
        }
        let n_cut = recommended_cutoff(n_bar);
        let g_t = std::f64::consts::PI / (2.0 * n_bar.sqrt());
        let gate = GateMatrix::rotation(std::f64::consts::PI, phi_axis);
        let f_min = error_operator_min(phi_axis, g_t, n_cut);
        let f_avg = error_operator_average(&gate, g_t, n_cut, AverageMethod::Integral);
        let window = 4.0 * n_bar.sqrt();
        let row_lo = (n_bar - window).max(0.0) as usize;
        let row_hi = ((n_bar + window) as usize).min(n_cut - 1);
        let c = commutator_max_abs_rows(f_min.matrix(), f_avg.matrix(), 2, row_lo, row_hi);
        xs.push(n_bar.ln());
        ys.push(c.max(1e-300).ln());
    }
    // Least-squares slope.
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..xs.len() {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    Ok(num / den)
}

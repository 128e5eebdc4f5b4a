//! Bosonic drive states in a truncated Fock space.
//!
//! A drive state is a complex amplitude vector over `|0⟩ … |N_cut−1⟩`.
//! Constructors are provided for the three state families used throughout
//! the crate — coherent `|α⟩`, squeezed coherent `|α, r⟩ = D(α)S(r)|0⟩`,
//! and squeezed cat `|Σ(α)⟩ ∝ |α, r⟩ ± |−α, r⟩` — together with the
//! displacement and squeeze matrices themselves, Wigner functions via the
//! displaced-parity formula, photon statistics, and purity.
//!
//! Every constructor renormalizes over the truncated basis and rejects
//! cutoffs that leave more than `1e−8` occupation on the top Fock level.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{C64, Error, Result};

/// Maximum tolerated occupation of the top Fock level for constructed
/// states.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

/// Pure drive state: normalized amplitudes over `|0⟩ … |N_cut−1⟩`.
#[derive(Debug, Clone)]
pub struct DriveState {
    amps: DVector<C64>,
}

impl DriveState {
    /// Wraps raw amplitudes, normalizing them to unit norm.
    ///
    /// Unlike the physical-state constructors this does not check
    /// truncation leakage, so it can represent arbitrary test vectors;
    /// callers that need the leakage guarantee should use
    /// [`coherent_state`] and friends.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if !(norm > 1e-300) {
            return Err(Error::DegenerateState { norm });
        }
        Ok(Self { amps: v / C64::new(norm, 0.0) })
    }

    /// The Fock-basis vacuum `|0⟩`.
    pub fn vacuum(n_cut: usize) -> Self {
        let mut amps = DVector::from_element(n_cut, C64::new(0.0, 0.0));
        amps[0] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// The Fock state `|n⟩`.
    pub fn fock(n: usize, n_cut: usize) -> Self {
        assert!(n < n_cut, "Fock index {n} must be below the cutoff {n_cut}");
        let mut amps = DVector::from_element(n_cut, C64::new(0.0, 0.0));
        amps[n] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// Amplitude vector `c_j`.
    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// Truncation dimension.
    pub fn n_cut(&self) -> usize {
        self.amps.len()
    }

    /// Mean photon number `⟨a†a⟩ = Σ n |c_n|²`.
    pub fn mean_photon(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Photon-number standard deviation `√(⟨n²⟩ − ⟨n⟩²)`.
    pub fn photon_std(&self) -> f64 {
        let mean = self.mean_photon();
        let second: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, c)| (n as f64).powi(2) * c.norm_sqr())
            .sum();
        (second - mean * mean).max(0.0).sqrt()
    }

    /// Occupation of the top Fock level, `|c_{N_cut−1}|²`.
    pub fn leakage(&self) -> f64 {
        self.amps[self.amps.len() - 1].norm_sqr()
    }

    /// Overlap `⟨self|other⟩`.
    pub fn overlap(&self, other: &DriveState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Wigner function at phase-space point `z`, via the displaced-parity
    /// formula `W(z) = (2/π) Tr[D(−z) ρ D(z) e^{iπa†a}]`. For a pure state
    /// this is `(2/π) Σ_n (−1)^n |(D(−z)σ)_n|²`, bounded by `±2/π`.
    pub fn wigner(&self, z: C64) -> f64 {
        let padded = padded_for_displacement(&self.amps, z.norm());
        let displaced = linalg::apply_displacement(-z, &padded);
        wigner_parity_sum(displaced.as_slice())
    }

    /// Density-matrix form `|σ⟩⟨σ|`.
    pub fn to_density(&self) -> DriveDensity {
        let mat = &self.amps * self.amps.adjoint();
        DriveDensity { mat }
    }

    fn checked(self) -> Result<Self> {
        let leakage = self.leakage();
        if leakage >= LEAKAGE_LIMIT {
            return Err(Error::CutoffTooSmall {
                n_cut: self.n_cut(),
                leakage,
                limit: LEAKAGE_LIMIT,
            });
        }
        Ok(self)
    }
}

/// Mixed drive state: Hermitian, unit-trace density matrix on the
/// truncated Fock space.
#[derive(Debug, Clone)]
pub struct DriveDensity {
    mat: DMatrix<C64>,
}

impl DriveDensity {
    /// Validates and wraps a density matrix: Hermitian and unit trace
    /// within `1e−10`, eigenvalues above `−1e−10`.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidConfig(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm_defect = crate::linalg::max_abs(&(&mat - mat.adjoint()));
        if herm_defect > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "density matrix not Hermitian: defect {herm_defect:.3e}"
            )));
        }
        let trace = mat.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "density matrix trace {trace} is not 1"
            )));
        }
        let (vals, _) = linalg::hermitian_eigen(&mat);
        if vals[0] < -1e-10 {
            return Err(Error::InvalidConfig(format!(
                "density matrix has negative eigenvalue {:.3e}",
                vals[0]
            )));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is trusted to satisfy the density-matrix
    /// invariants (used on internal hot paths that preserve them).
    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>) -> Self {
        Self { mat }
    }

    /// The density matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Truncation dimension.
    pub fn n_cut(&self) -> usize {
        self.mat.nrows()
    }

    /// Mean photon number `Tr(a†a ρ) = Σ n ρ_nn`.
    pub fn mean_photon(&self) -> f64 {
        (0..self.n_cut())
            .map(|n| n as f64 * self.mat[(n, n)].re)
            .sum()
    }

    /// Purity `P(ρ) = 2 Tr(ρ²) − 1`; equals 1 exactly for pure states and
    /// reaches `−1 + 2/N_cut` for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_{ij} |ρ_ij|² for Hermitian ρ.
        let frob: f64 = self.mat.iter().map(|x| x.norm_sqr()).sum();
        2.0 * frob - 1.0
    }

    /// Wigner function at `z` via the displaced-parity formula, evaluated
    /// through the spectral decomposition of the density matrix. For
    /// repeated evaluations use [`DriveDensity::wigner_points`].
    pub fn wigner(&self, z: C64) -> f64 {
        self.wigner_points(&[z])[0]
    }

    /// Wigner function on a batch of phase-space points; the spectral
    /// decomposition is computed once and reused.
    pub fn wigner_points(&self, zs: &[C64]) -> Vec<f64> {
        let (vals, vecs) = linalg::hermitian_eigen(&self.mat);
        let n = self.n_cut();
        let z_max = zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut modes: Vec<(f64, DVector<C64>)> = Vec::new();
        for k in 0..n {
            if vals[k].abs() > 1e-12 {
                let v = vecs.column(k).into_owned();
                modes.push((vals[k], padded_for_displacement(&v, z_max)));
            }
        }
        zs.iter()
            .map(|&z| {
                modes
                    .iter()
                    .map(|(p, v)| {
                        let displaced = linalg::apply_displacement(-z, v);
                        p * wigner_parity_sum(displaced.as_slice())
                    })
                    .sum()
            })
            .collect()
    }
}

/// Zero-pads `amps` so that a subsequent displacement by `|z| = z_norm`
/// stays clear of the truncation edge. A state supported below level `n_s`
/// displaced by `z` concentrates below `(√n_s + |z|)²` with a sub-Poissonian
/// tail, so six standard deviations of headroom make the wrap-around error
/// negligible; without the headroom the displaced-parity sum is garbage for
/// `|z|` near the edge of the original space.
fn padded_for_displacement(amps: &DVector<C64>, z_norm: f64) -> DVector<C64> {
    let n = amps.len();
    let peak = amps.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut top = 0usize;
    if peak > 0.0 {
        for l in (0..n).rev() {
            if amps[l].norm() > 1e-13 * peak {
                top = l;
                break;
            }
        }
    }
    let radius = ((top + 1) as f64).sqrt() + z_norm;
    let needed = (radius + 6.0).powi(2).ceil() as usize + 1;
    if needed <= n {
        return amps.clone();
    }
    let mut out = DVector::from_element(needed, C64::new(0.0, 0.0));
    out.rows_mut(0, n).copy_from(amps);
    out
}

fn wigner_parity_sum(displaced: &[C64]) -> f64 {
    let mut acc = 0.0;
    for (n, c) in displaced.iter().enumerate() {
        let w = c.norm_sqr();
        if n % 2 == 0 {
            acc += w;
        } else {
            acc -= w;
        }
    }
    2.0 / PI * acc
}

/// Coherent state `|α⟩ = e^{−|α|²/2} Σ_n αⁿ/√n! |n⟩`, renormalized over
/// the truncated basis.
pub fn coherent_state(alpha: C64, n_cut: usize) -> Result<DriveState> {
    if n_cut == 0 {
        return Err(Error::InvalidConfig("n_cut must be positive".into()));
    }
    let mut amps = DVector::from_element(n_cut, C64::new(0.0, 0.0));
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps[0] = amp;
    for n in 1..n_cut {
        amp *= alpha / (n as f64).sqrt();
        amps[n] = amp;
    }
    let norm = amps.norm();
    DriveState { amps: amps / C64::new(norm, 0.0) }.checked()
}

/// Squeezed coherent state `|α, r⟩ = D(α) S(r) |0⟩`, built from the
/// truncated displacement and squeeze matrices and renormalized.
///
/// Complex `r = e^{2iφ}|r|` rotates the squeezed quadrature to track a
/// displacement direction φ.
pub fn squeezed_coherent_state(alpha: C64, r: C64, n_cut: usize) -> Result<DriveState> {
    if n_cut < 2 {
        return Err(Error::InvalidConfig("n_cut must be at least 2".into()));
    }
    let squeezed_vac = DVector::from_vec(squeezed_vacuum_amplitudes(r, n_cut));
    let amps = linalg::apply_displacement(alpha, &squeezed_vac);
    let norm = amps.norm();
    DriveState { amps: amps / C64::new(norm, 0.0) }.checked()
}

/// Squeezed cat state `|Σ(α)⟩ = N⁻¹(|α, r⟩ ± |−α, r⟩)`.
///
/// Since `|−α, r⟩` is the parity image of `|α, r⟩`, the `+` branch keeps
/// only even and the `−` branch only odd Fock levels.
pub fn squeezed_cat_state(alpha: C64, r: C64, sign: i8, n_cut: usize) -> Result<DriveState> {
    assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
    let plus = squeezed_coherent_state(alpha, r, n_cut)?;
    let minus = squeezed_coherent_state(-alpha, r, n_cut)?;
    let s = C64::new(sign as f64, 0.0);
    let amps = plus.amps + minus.amps.map(|c| c * s);
    let norm = amps.norm();
    if norm < 1e-12 {
        return Err(Error::DegenerateState { norm });
    }
    DriveState { amps: amps / C64::new(norm, 0.0) }.checked()
}

/// Amplitudes of the squeezed vacuum `S(r)|0⟩` from the two-photon series
/// `c_{2m} = (−e^{iθ} tanh|r|)^m √((2m)!)/(2^m m!) / √cosh|r|` with
/// `r = |r| e^{iθ}`; odd amplitudes vanish.
pub fn squeezed_vacuum_amplitudes(r: C64, n_cut: usize) -> Vec<C64> {
    let mut amps = vec![C64::new(0.0, 0.0); n_cut];
    let s = r.norm();
    if s == 0.0 {
        amps[0] = C64::new(1.0, 0.0);
        return amps;
    }
    let phase = r / s;
    let t = -phase * s.tanh();
    let mut amp = C64::new(1.0 / s.cosh().sqrt(), 0.0);
    amps[0] = amp;
    let mut m = 1usize;
    while 2 * m < n_cut {
        let k = 2 * m;
        amp *= t * ((k - 1) as f64).sqrt() / (k as f64).sqrt();
        amps[k] = amp;
        m += 1;
    }
    amps
}

/// Truncated displacement operator `D(α) = exp(α a† − α* a)`, built by
/// exponentiating the truncated generator. Unitary except for rows near
/// the cutoff, which constructed states never populate.
pub fn displacement_matrix(alpha: C64, n_cut: usize) -> DMatrix<C64> {
    assert!(n_cut >= 2, "n_cut must be at least 2");
    let mut gen = DMatrix::from_element(n_cut, n_cut, C64::new(0.0, 0.0));
    for l in 0..n_cut - 1 {
        let root = ((l + 1) as f64).sqrt();
        gen[(l + 1, l)] += alpha * root; // α a†
        gen[(l, l + 1)] -= alpha.conj() * root; // −α* a
    }
    linalg::exp_anti_hermitian(&gen)
}

/// Truncated squeeze operator `S(r) = exp[(r* a² − r (a†)²)/2]`.
pub fn squeeze_matrix(r: C64, n_cut: usize) -> DMatrix<C64> {
    assert!(n_cut >= 2, "n_cut must be at least 2");
    let mut gen = DMatrix::from_element(n_cut, n_cut, C64::new(0.0, 0.0));
    for l in 0..n_cut.saturating_sub(2) {
        // a²|l+2⟩ = √((l+1)(l+2))|l⟩ and (a†)²|l⟩ = √((l+1)(l+2))|l+2⟩.
        let root = (((l + 1) * (l + 2)) as f64).sqrt();
        gen[(l, l + 2)] += r.conj() * 0.5 * root;
        gen[(l + 2, l)] -= r * 0.5 * root;
    }
    linalg::exp_anti_hermitian(&gen)
}

//! Drive-refreshing protocol simulators.
//!
//! A single itinerant drive pulse implements gates on register qubits and
//! is refreshed between gates by π-interactions with ancilla qubits
//! prepared in the equatorial state `(|g⟩ + ie^{iφ}|e⟩)/√2`. Three
//! simulators are provided:
//!
//! * [`run_ideal`] — ancillas are perfectly re-prepared every cycle;
//!   register qubits are drawn uniformly from the Bloch sphere and traced
//!   out after their gate. The drive evolves as a density matrix through
//!   Kraus updates on the (qubit, drive) pair.
//! * [`run_ghz`] — the register starts in the GHZ state
//!   `(|g⟩^⊗N + |e⟩^⊗N)/√2` and is never traced; the joint
//!   register ⊗ drive state is propagated exactly as an ensemble of pure
//!   branches (one branching per traced ancilla, recompressed through the
//!   Gram-matrix spectrum).
//! * [`run_full`] — ancillas start in `|g⟩`, persist from cycle to cycle,
//!   and are prepared/reset by a second circulating corrector pulse of
//!   opposite phase interacting for half the drive's interaction time
//!   before and after each drive–ancilla interaction. Interacting parties
//!   are separated by mutual partial traces after every pairwise
//!   interaction (separability approximation).
//!
//! Interaction times follow the timing condition `2gT|α| = θ`, i.e.
//! `T = θ/(2g√n̄)` for the register gate and `T = π/(2g√n̄)` for ancilla
//! refreshes, independently of the register rotation angle.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{error_operator_average, AverageMethod};
use crate::fock::{squeezed_coherent_state, DriveDensity, DriveState};
use crate::jc::{apply_jc_pure, interact_qubit_drive, CsTable, GateMatrix, QubitState};
use crate::linalg::hermitian_eigen;
use crate::{recommended_cutoff, C64, Error, Result};

use std::f64::consts::PI;

/// Rotation `R'_θ(φ)` requested from the drive: angle `theta` about the
/// xy-plane axis at angle `phi` from x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub theta: f64,
    pub phi: f64,
}

impl GateSpec {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// `X_π`.
    pub fn x_pi() -> Self {
        Self::new(PI, 0.0)
    }

    /// `X_{π/2}`.
    pub fn x_half_pi() -> Self {
        Self::new(PI / 2.0, 0.0)
    }

    /// The gate matrix `R'_θ(φ)`.
    pub fn matrix(&self) -> GateMatrix {
        GateMatrix::rotation(self.theta, self.phi)
    }
}

/// How interaction times scale with the drive's mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingRule {
    /// `T = θ/(2g√n̄)`: the timing condition `2gT|α| = θ` evaluated at
    /// the drive amplitude `|α| = √n̄`. Default.
    TimingCondition,
    /// `T = θ/(2gn̄)`: an alternative normalization in which times scale
    /// inversely with the photon number instead of the amplitude,
    /// retained so such runs can be reproduced explicitly. Not the
    /// default because it does not satisfy the timing condition.
    InversePhotonNumber,
}

fn interaction_time(rule: TimingRule, theta: f64, n_bar: f64) -> f64 {
    match rule {
        TimingRule::TimingCondition => theta / (2.0 * n_bar.sqrt()),
        TimingRule::InversePhotonNumber => theta / (2.0 * n_bar),
    }
}

/// Configuration shared by the protocol simulators.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    /// Mean photon number of the freshly prepared drive.
    pub n_bar: f64,
    /// Squeezing parameter of the initial drive (and corrector).
    pub r: C64,
    /// Register gate.
    pub gate: GateSpec,
    /// Number of refreshing ancillas per cycle (`M`).
    pub ancillas: usize,
    /// Number of protocol cycles.
    pub cycles: usize,
    /// Fock-space truncation.
    pub n_cut: usize,
    /// Seed for the register-qubit sampler.
    pub seed: u64,
    /// Register size `N` for [`run_ghz`].
    pub ghz_qubits: usize,
    /// Interaction-time scaling.
    pub timing: TimingRule,
}

impl ProtocolConfig {
    /// Canonical configuration: squeezing `e^{2iφ}·ln√(π/2)` aligned with
    /// the gate axis, the adequacy-rule cutoff, one cycle, no ancillas,
    /// seed 0, single-qubit register, timing-condition scaling.
    pub fn new(n_bar: f64, gate: GateSpec) -> Result<Self> {
        if !(n_bar > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mean photon number must be positive, got {n_bar}"
            )));
        }
        let r_mag = (PI / 2.0).sqrt().ln();
        let phase = C64::from_polar(1.0, 2.0 * gate.phi);
        Ok(Self {
            n_bar,
            r: phase * r_mag,
            gate,
            ancillas: 0,
            cycles: 1,
            n_cut: recommended_cutoff(n_bar),
            seed: 0,
            ghz_qubits: 1,
            timing: TimingRule::TimingCondition,
        })
    }

    /// Validates cutoff adequacy, cycle count, and gate sanity.
    pub fn validate(&self) -> Result<()> {
        if !(self.n_bar > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mean photon number must be positive, got {}",
                self.n_bar
            )));
        }
        let required = recommended_cutoff(self.n_bar);
        if self.n_cut < required {
            return Err(Error::CutoffBelowRule {
                n_cut: self.n_cut,
                required,
                n_bar: self.n_bar,
            });
        }
        if self.cycles < 1 {
            return Err(Error::InvalidConfig("cycles must be at least 1".into()));
        }
        if !(self.gate.theta > 0.0 && self.gate.theta <= 2.0 * PI) {
            return Err(Error::InvalidConfig(format!(
                "rotation angle must lie in (0, 2π], got {}",
                self.gate.theta
            )));
        }
        if self.ghz_qubits < 1 {
            return Err(Error::InvalidConfig(
                "GHZ register needs at least one qubit".into(),
            ));
        }
        // Branch ensemble memory: cap × register ⊗ drive vector.
        let ghz_bytes = (1usize << self.ghz_qubits)
            .saturating_mul(self.n_cut)
            .saturating_mul(16)
            .saturating_mul(BRANCH_CAP);
        if ghz_bytes > 2_000_000_000 {
            return Err(Error::MemoryBudget(format!(
                "GHZ ensemble would need ~{} MB (register {} qubits, cutoff {})",
                ghz_bytes / 1_000_000,
                self.ghz_qubits,
                self.n_cut
            )));
        }
        Ok(())
    }

    /// Dimensionless register-gate interaction time `gT`.
    pub fn g_t_register(&self) -> f64 {
        interaction_time(self.timing, self.gate.theta, self.n_bar)
    }

    /// Dimensionless ancilla-refresh interaction time `gT` (always a
    /// π-rotation, independent of the register gate angle).
    pub fn g_t_ancilla(&self) -> f64 {
        interaction_time(self.timing, PI, self.n_bar)
    }

    /// Initial drive state `|√n̄·e^{iφ}, r⟩`.
    pub fn initial_drive(&self) -> Result<DriveState> {
        let alpha = C64::from_polar(self.n_bar.sqrt(), self.gate.phi);
        squeezed_coherent_state(alpha, self.r, self.n_cut)
    }

    /// Ancilla state `(|g⟩ + ie^{iφ}|e⟩)/√2`, phase-locked to the gate
    /// axis.
    fn ancilla_state(&self) -> QubitState {
        QubitState::pure(PI / 2.0, self.gate.phi + PI / 2.0)
    }
}

/// Per-cycle observables of a protocol run.
#[derive(Debug, Clone, Copy)]
pub struct CycleRecord {
    /// 1-based cycle index.
    pub cycle: usize,
    /// Mean initial pulse energy spent per register gate so far, in
    /// units of ħω: `2n̄/cycle` when a corrector is in play (`M > 0` in
    /// the full protocol), `n̄/cycle` otherwise.
    pub energy_per_gate: f64,
    /// Bloch-sphere-averaged error of a hypothetical gate generated by
    /// the current drive: `Ē = 1 − Tr(F̂_avg σ̂)`.
    pub avg_error: f64,
    /// Drive purity `P = 2Tr(σ̂²) − 1`.
    pub purity: f64,
    /// Drive mean photon number.
    pub mean_photon: f64,
}

/// Result of [`run_ideal`] or [`run_full`].
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub records: Vec<CycleRecord>,
    /// Drive density matrix after the final cycle.
    pub final_drive: DriveDensity,
}

/// Uniform Bloch-sphere qubit state: `cos ϑ` uniform on `[−1, 1]`, `φ`
/// uniform on `[0, 2π)`.
pub fn sample_uniform_qubit<R: Rng + ?Sized>(rng: &mut R) -> QubitState {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    QubitState::pure((1.0 - 2.0 * u).acos(), 2.0 * PI * v)
}

fn drive_observables(sigma: &DMatrix<C64>) -> (f64, f64) {
    let n = sigma.nrows();
    let mut sq = 0.0;
    for e in sigma.iter() {
        sq += e.norm_sqr();
    }
    let mut photon = 0.0;
    for l in 0..n {
        photon += l as f64 * sigma[(l, l)].re;
    }
    (2.0 * sq - 1.0, photon)
}

/// Restores exact Hermiticity and unit trace. The Kraus update loses a
/// trace fraction of at most `|χ_e|²·sin²(gT√N_cut)` of the occupation at
/// the truncation edge per interaction — negligible for states obeying
/// the leakage invariant — and accumulates round-off asymmetry; both are
/// squashed once per cycle.
fn renormalize(sigma: &mut DMatrix<C64>) {
    let adj = sigma.adjoint();
    *sigma += adj;
    *sigma *= C64::new(0.5, 0.0);
    let trace = sigma.trace().re;
    *sigma /= C64::new(trace, 0.0);
}

/// Same for a 2×2 qubit density. Mandatory whenever a reduced qubit is
/// fed back into another interaction: the joint trace is the product of
/// the two input traces, so an unnormalized density circulating between
/// two fields squares its trace deviation on every pass — a 1e−16
/// round-off seed becomes O(1) within ~55 interactions if left alone.
fn renormalize_qubit(m: &mut Matrix2<C64>) {
    let adj = m.adjoint();
    *m += adj;
    *m *= C64::new(0.5, 0.0);
    let trace = (m[(0, 0)] + m[(1, 1)]).re;
    *m /= C64::new(trace, 0.0);
}

/// Ideal-ancilla protocol: per cycle, one register gate on a fresh
/// uniformly random pure qubit, then `M` refreshing interactions with
/// perfectly prepared equatorial ancillas, then evaluation of the
/// averaged error of a hypothetical gate by the current drive.
pub fn run_ideal(cfg: &ProtocolConfig) -> Result<ProtocolRun> {
    cfg.validate()?;
    let f_avg = error_operator_average(
        &cfg.gate.matrix(),
        cfg.g_t_register(),
        cfg.n_cut,
        AverageMethod::Axial,
    );
    let mut sigma = cfg.initial_drive()?.to_density().matrix().clone();
    let tbl_reg = CsTable::new(cfg.g_t_register(), cfg.n_cut);
    let tbl_anc = CsTable::new(cfg.g_t_ancilla(), cfg.n_cut);
    let ancilla = cfg.ancilla_state();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::with_capacity(cfg.cycles);
    for cycle in 1..=cfg.cycles {
        let register = sample_uniform_qubit(&mut rng);
        interact_qubit_drive(&register, &mut sigma, &tbl_reg);
        for _ in 0..cfg.ancillas {
            interact_qubit_drive(&ancilla, &mut sigma, &tbl_anc);
        }
        renormalize(&mut sigma);
        let (purity, mean_photon) = drive_observables(&sigma);
        records.push(CycleRecord {
            cycle,
            energy_per_gate: cfg.n_bar / cycle as f64,
            avg_error: 1.0 - f_avg.fidelity_of_matrix(&sigma),
            purity,
            mean_photon,
        });
    }
    Ok(ProtocolRun {
        records,
        final_drive: DriveDensity::from_matrix_unchecked(sigma),
    })
}

/// Full protocol: ancillas start in `|g⟩` and persist across cycles; a
/// corrector pulse (initially `|−√n̄·e^{iφ}, r⟩`) prepares and resets
/// them around each drive–ancilla interaction with interaction times
/// `T_anc/2`, `T_anc`, `T_anc/2`. Neither pulse is ever replaced; their
/// degradation is part of the simulated physics.
pub fn run_full(cfg: &ProtocolConfig) -> Result<ProtocolRun> {
    cfg.validate()?;
    let f_avg = error_operator_average(
        &cfg.gate.matrix(),
        cfg.g_t_register(),
        cfg.n_cut,
        AverageMethod::Axial,
    );
    let mut sigma = cfg.initial_drive()?.to_density().matrix().clone();
    let corrector_alpha = -C64::from_polar(cfg.n_bar.sqrt(), cfg.gate.phi);
    let mut corrector = squeezed_coherent_state(corrector_alpha, cfg.r, cfg.n_cut)?
        .to_density()
        .matrix()
        .clone();
    let tbl_reg = CsTable::new(cfg.g_t_register(), cfg.n_cut);
    let tbl_anc = CsTable::new(cfg.g_t_ancilla(), cfg.n_cut);
    let tbl_half = CsTable::new(cfg.g_t_ancilla() / 2.0, cfg.n_cut);
    let ground = Matrix2::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    );
    let mut ancillas = vec![ground; cfg.ancillas];
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::with_capacity(cfg.cycles);
    let energy_budget = if cfg.ancillas > 0 {
        2.0 * cfg.n_bar
    } else {
        cfg.n_bar
    };
    for cycle in 1..=cfg.cycles {
        let register = sample_uniform_qubit(&mut rng);
        interact_qubit_drive(&register, &mut sigma, &tbl_reg);
        for j in 0..cfg.ancillas {
            let mut prepared =
                interact_qubit_drive(&QubitState::Density(ancillas[j]), &mut corrector, &tbl_half);
            renormalize(&mut corrector);
            renormalize_qubit(&mut prepared);
            let mut refreshed =
                interact_qubit_drive(&QubitState::Density(prepared), &mut sigma, &tbl_anc);
            renormalize(&mut sigma);
            renormalize_qubit(&mut refreshed);
            ancillas[j] =
                interact_qubit_drive(&QubitState::Density(refreshed), &mut corrector, &tbl_half);
            renormalize(&mut corrector);
            renormalize_qubit(&mut ancillas[j]);
        }
        renormalize(&mut sigma);
        let (purity, mean_photon) = drive_observables(&sigma);
        records.push(CycleRecord {
            cycle,
            energy_per_gate: energy_budget / cycle as f64,
            avg_error: 1.0 - f_avg.fidelity_of_matrix(&sigma),
            purity,
            mean_photon,
        });
    }
    Ok(ProtocolRun {
        records,
        final_drive: DriveDensity::from_matrix_unchecked(sigma),
    })
}

/// Drive supply discipline for [`run_ghz`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhzDriveMode {
    /// One itinerant pulse of `n̄` photons applies all `N` gates and is
    /// refreshed by `M` ideal ancillas between consecutive gates.
    Refreshed,
    /// A fresh pulse of `n̄` photons per register gate (the old pulse is
    /// traced out); no ancillas.
    DisposableConstant,
    /// A fresh pulse of `n̄/N` photons per register gate, so the total
    /// energy matches a single reused pulse; no ancillas.
    DisposableSplit,
}

/// Outcome of a GHZ-register pass.
#[derive(Debug, Clone, Copy)]
pub struct GhzOutcome {
    /// `ℰ_GHZ = 1 − ⟨ψ_t|ρ'_reg|ψ_t⟩` with `|ψ_t⟩ = K^⊗N|ψ_GHZ⟩`.
    pub error_total: f64,
    /// `ℰ_eff = ℰ_GHZ / N`.
    pub error_per_gate: f64,
}

const BRANCH_CAP: usize = 64;
const BRANCH_THRESHOLD: f64 = 1e-13;

/// GHZ-register protocol: `(|g⟩^⊗N + |e⟩^⊗N)/√2 ⊗ |drive⟩` evolves with
/// one gate per register qubit and no partial trace over any register
/// qubit. The mixed joint state is represented as a sum of unnormalized
/// pure branches; each traced ancilla doubles the branch count, which is
/// then recompressed through the spectrum of the branch Gram matrix
/// (discarding relative weight below `1e−13`).
pub fn run_ghz(cfg: &ProtocolConfig, mode: GhzDriveMode) -> Result<GhzOutcome> {
    cfg.validate()?;
    let n_reg = cfg.ghz_qubits;
    let dim_reg = 1usize << n_reg;
    let n_cut = cfg.n_cut;

    let pulse_photons = match mode {
        GhzDriveMode::DisposableSplit => cfg.n_bar / n_reg as f64,
        _ => cfg.n_bar,
    };
    let g_t_reg = interaction_time(cfg.timing, cfg.gate.theta, pulse_photons);
    let g_t_anc = interaction_time(cfg.timing, PI, cfg.n_bar);
    let tbl_reg = CsTable::new(g_t_reg, n_cut);
    let tbl_anc = CsTable::new(g_t_anc, n_cut);

    let fresh_drive = || -> Result<DVector<C64>> {
        let alpha = C64::from_polar(pulse_photons.sqrt(), cfg.gate.phi);
        Ok(squeezed_coherent_state(alpha, cfg.r, n_cut)?
            .amplitudes()
            .clone_owned())
    };

    // Initial single branch: GHZ ⊗ drive.
    let drive0 = fresh_drive()?;
    let mut branches: Vec<DVector<C64>> = {
        let mut b = DVector::from_element(dim_reg * n_cut, C64::new(0.0, 0.0));
        let w = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
        for l in 0..n_cut {
            b[l] = w * drive0[l];
            b[(dim_reg - 1) * n_cut + l] = w * drive0[l];
        }
        vec![b]
    };

    let (anc_g, anc_e) = cfg.ancilla_state().pure_amplitudes().unwrap();

    for target in 0..n_reg {
        if target > 0 && mode != GhzDriveMode::Refreshed {
            branches = replace_drive(branches, dim_reg, n_cut, &fresh_drive()?);
        }
        let pos = n_reg - 1 - target;
        for b in branches.iter_mut() {
            apply_jc_pure(b.as_mut_slice(), n_reg, n_cut, pos, &tbl_reg);
        }
        if target + 1 < n_reg && mode == GhzDriveMode::Refreshed {
            for _ in 0..cfg.ancillas {
                branches = ancilla_split(branches, dim_reg, n_cut, (anc_g, anc_e), &tbl_anc);
                branches = compress_branches(branches);
            }
        }
    }

    // Fidelity against |ψ_t⟩ = K^⊗N |ψ_GHZ⟩.
    let gate = cfg.gate.matrix();
    let m = gate.matrix();
    let mut target_state = vec![C64::new(0.0, 0.0); dim_reg];
    for bits in 0..dim_reg {
        let mut from_g = C64::new(1.0, 0.0);
        let mut from_e = C64::new(1.0, 0.0);
        for q in 0..n_reg {
            let bit = (bits >> (n_reg - 1 - q)) & 1;
            from_g *= m[(bit, 0)];
            from_e *= m[(bit, 1)];
        }
        target_state[bits] = (from_g + from_e) / 2.0f64.sqrt();
    }
    let mut fidelity = 0.0;
    for b in &branches {
        for l in 0..n_cut {
            let mut amp = C64::new(0.0, 0.0);
            for (bits, t) in target_state.iter().enumerate() {
                amp += t.conj() * b[bits * n_cut + l];
            }
            fidelity += amp.norm_sqr();
        }
    }
    let error_total = 1.0 - fidelity;
    Ok(GhzOutcome {
        error_total,
        error_per_gate: error_total / n_reg as f64,
    })
}

/// Traces the drive out of the branch ensemble and re-tensors the
/// (generally mixed) register with a fresh pulse.
fn replace_drive(
    branches: Vec<DVector<C64>>,
    dim_reg: usize,
    n_cut: usize,
    fresh: &DVector<C64>,
) -> Vec<DVector<C64>> {
    let mut rho_reg = DMatrix::from_element(dim_reg, dim_reg, C64::new(0.0, 0.0));
    for b in &branches {
        for ra in 0..dim_reg {
            for rb in 0..dim_reg {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..n_cut {
                    acc += b[ra * n_cut + l] * b[rb * n_cut + l].conj();
                }
                rho_reg[(ra, rb)] += acc;
            }
        }
    }
    let trace = rho_reg.trace().re;
    let (vals, vecs) = hermitian_eigen(&rho_reg);
    let mut out = Vec::new();
    for i in (0..dim_reg).rev() {
        if vals[i] <= BRANCH_THRESHOLD * trace {
            break;
        }
        let weight = C64::new(vals[i].sqrt(), 0.0);
        let mut b = DVector::from_element(dim_reg * n_cut, C64::new(0.0, 0.0));
        for reg in 0..dim_reg {
            let coeff = weight * vecs[(reg, i)];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for l in 0..n_cut {
                b[reg * n_cut + l] = coeff * fresh[l];
            }
        }
        out.push(b);
    }
    out
}

/// One ancilla–drive interaction applied across the ensemble: each
/// branch `ψ` becomes the pair `⟨g|U(ψ_A ⊗ ψ)⟩, ⟨e|U(ψ_A ⊗ ψ)⟩`.
fn ancilla_split(
    branches: Vec<DVector<C64>>,
    dim_reg: usize,
    n_cut: usize,
    (anc_g, anc_e): (C64, C64),
    tbl: &CsTable,
) -> Vec<DVector<C64>> {
    let n_qubits_ext = dim_reg.trailing_zeros() as usize + 1;
    let mut out = Vec::with_capacity(branches.len() * 2);
    for b in branches {
        // Extended layout [register bits, ancilla bit, Fock]: the
        // ancilla occupies bit position 0 (stride n_cut).
        let mut ext = DVector::from_element(2 * dim_reg * n_cut, C64::new(0.0, 0.0));
        for reg in 0..dim_reg {
            for l in 0..n_cut {
                let v = b[reg * n_cut + l];
                ext[(2 * reg) * n_cut + l] = anc_g * v;
                ext[(2 * reg + 1) * n_cut + l] = anc_e * v;
            }
        }
        apply_jc_pure(ext.as_mut_slice(), n_qubits_ext, n_cut, 0, tbl);
        let mut bg = DVector::from_element(dim_reg * n_cut, C64::new(0.0, 0.0));
        let mut be = DVector::from_element(dim_reg * n_cut, C64::new(0.0, 0.0));
        for reg in 0..dim_reg {
            for l in 0..n_cut {
                bg[reg * n_cut + l] = ext[(2 * reg) * n_cut + l];
                be[reg * n_cut + l] = ext[(2 * reg + 1) * n_cut + l];
            }
        }
        out.push(bg);
        out.push(be);
    }
    out
}

/// Re-expresses `Σ_b |w_b⟩⟨w_b|` through the eigenbasis of the Gram
/// matrix `G_{bb'} = ⟨w_b|w_b'⟩`, keeping at most [`BRANCH_CAP`] branches
/// and discarding spectral weight below `1e−13` of the trace.
fn compress_branches(branches: Vec<DVector<C64>>) -> Vec<DVector<C64>> {
    let b = branches.len();
    if b <= 1 {
        return branches;
    }
    let mut gram = DMatrix::from_element(b, b, C64::new(0.0, 0.0));
    for i in 0..b {
        for j in i..b {
            let v = branches[i].dotc(&branches[j]);
            gram[(i, j)] = v;
            if i != j {
                gram[(j, i)] = v.conj();
            }
        }
    }
    let trace = gram.trace().re;
    let (vals, vecs) = hermitian_eigen(&gram);
    let mut out = Vec::new();
    for i in (0..b).rev() {
        if out.len() >= BRANCH_CAP || vals[i] <= BRANCH_THRESHOLD * trace {
            break;
        }
        let dim = branches[0].len();
        let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
        for (k, w) in branches.iter().enumerate() {
            let coeff = vecs[(k, i)];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            v.axpy(coeff, w, C64::new(1.0, 0.0));
        }
        out.push(v);
    }
    out
}

/// Single ancilla–drive interaction diagnostics: evolves
/// `|χ_A⟩ = √(1−|β_A|²)|g⟩ + β_A|e⟩` with the drive for time `gT`,
/// traces the ancilla, and reports the purity change
/// `ΔP = P(σ̂') − P(σ̂)` and photon-number change
/// `Δ⟨N̂⟩ = Tr(N̂σ̂') − Tr(N̂σ̂)`.
pub fn ancilla_diagnostics(
    drive: &DriveDensity,
    beta_a: C64,
    g_t: f64,
) -> Result<(f64, f64)> {
    let beta_sq = beta_a.norm_sqr();
    if beta_sq > 1.0 + 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "ancilla excited amplitude must satisfy |β_A| ≤ 1, got |β_A| = {}",
            beta_sq.sqrt()
        )));
    }
    let theta = 2.0 * beta_sq.min(1.0).sqrt().asin();
    let phi = beta_a.arg();
    let ancilla = QubitState::pure(theta, phi);
    let mut sigma = drive.matrix().clone();
    let (p_before, n_before) = drive_observables(&sigma);
    let tbl = CsTable::new(g_t, drive.n_cut());
    interact_qubit_drive(&ancilla, &mut sigma, &tbl);
    let (p_after, n_after) = drive_observables(&sigma);
    Ok((p_after - p_before, n_after - n_before))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::error_operator_pointwise;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn base_config(n_bar: f64, gate: GateSpec) -> ProtocolConfig {
        ProtocolConfig::new(n_bar, gate).unwrap()
    }

    #[test]
    fn uniform_qubit_sampler_moments_and_determinism() {
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        let samples = 100_000;
        let mut sum_cos_theta = 0.0;
        let mut sum_cos_phi = 0.0;
        for _ in 0..samples {
            match sample_uniform_qubit(&mut rng) {
                QubitState::Pure { theta, phi } => {
                    sum_cos_theta += theta.cos();
                    sum_cos_phi += phi.cos();
                }
                _ => unreachable!(),
            }
        }
        assert!((sum_cos_theta / samples as f64).abs() < 0.01);
        assert!((sum_cos_phi / samples as f64).abs() < 0.01);

        let take = |seed: u64| -> Vec<(f64, f64)> {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| match sample_uniform_qubit(&mut rng) {
                    QubitState::Pure { theta, phi } => (theta, phi),
                    _ => unreachable!(),
                })
                .collect()
        };
        assert_eq!(take(7), take(7));
        assert_ne!(take(7), take(8));
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = base_config(100.0, GateSpec::x_pi());
        cfg.n_cut = 100;
        assert!(matches!(
            cfg.validate(),
            Err(Error::CutoffBelowRule { required: 220, .. })
        ));
        let mut cfg = base_config(100.0, GateSpec::x_pi());
        cfg.cycles = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = base_config(100.0, GateSpec::x_pi());
        cfg.ghz_qubits = 40;
        assert!(matches!(cfg.validate(), Err(Error::MemoryBudget(_))));
    }

    #[test]
    fn ideal_protocol_error_starts_near_lower_bound_and_degrades_without_ancillas() {
        let mut cfg = base_config(100.0, GateSpec::x_pi());
        cfg.cycles = 40;
        cfg.seed = 11;
        let run = run_ideal(&cfg).unwrap();
        let first = run.records.first().unwrap();
        let bound = PI / (6.0 * cfg.n_bar);
        assert!(
            first.avg_error < 2.0 * bound,
            "cycle-1 Ē = {} vs bound {bound}",
            first.avg_error
        );
        let last = run.records.last().unwrap();
        assert!(last.avg_error > first.avg_error);
        assert!(last.purity < 1.0);
        assert!((0.0..=1.0 + 1e-9).contains(&last.avg_error));
        // Trace and positivity are maintained.
        assert!((run.final_drive.matrix().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ideal_protocol_with_many_ancillas_saturates_quickly_near_bound() {
        let mut cfg = base_config(100.0, GateSpec::x_pi());
        cfg.cycles = 30;
        cfg.ancillas = 10;
        cfg.seed = 3;
        let run = run_ideal(&cfg).unwrap();
        let bound = PI / (6.0 * cfg.n_bar);
        let at10 = run.records[9].avg_error;
        let at30 = run.records[29].avg_error;
        assert!(
            at30 <= 2.0 * bound,
            "steady Ē = {at30}, bound {bound}"
        );
        assert!(
            (at10 - at30).abs() <= 0.25 * at30,
            "not saturated by cycle 10: {at10} vs {at30}"
        );
    }

    #[test]
    fn full_protocol_with_no_ancillas_matches_ideal_run() {
        let mut cfg = base_config(64.0, GateSpec::x_pi());
        cfg.cycles = 25;
        cfg.seed = 17;
        let ideal = run_ideal(&cfg).unwrap();
        let full = run_full(&cfg).unwrap();
        for (a, b) in ideal.records.iter().zip(full.records.iter()) {
            assert!((a.avg_error - b.avg_error).abs() < 1e-13);
            assert!((a.purity - b.purity).abs() < 1e-13);
            assert!((a.energy_per_gate - b.energy_per_gate).abs() < 1e-13);
        }
    }

    #[test]
    fn full_protocol_energy_accounting() {
        let mut cfg = base_config(64.0, GateSpec::x_pi());
        cfg.cycles = 4;
        let single = run_full(&cfg).unwrap();
        assert!((single.records[0].energy_per_gate - 64.0).abs() < 1e-12);
        assert!((single.records[3].energy_per_gate - 16.0).abs() < 1e-12);
        cfg.ancillas = 2;
        let with_corrector = run_full(&cfg).unwrap();
        assert!((with_corrector.records[0].energy_per_gate - 128.0).abs() < 1e-12);
    }

    #[test]
    fn full_protocol_with_corrector_retains_fidelity_longer() {
        let mut cfg = base_config(100.0, GateSpec::x_pi());
        cfg.cycles = 60;
        cfg.seed = 5;
        let bare = run_full(&cfg).unwrap();
        cfg.ancillas = 3;
        let corrected = run_full(&cfg).unwrap();
        let e_bare = bare.records.last().unwrap().avg_error;
        let e_corr = corrected.records.last().unwrap().avg_error;
        assert!(
            e_corr < e_bare,
            "corrector did not help: {e_corr} vs {e_bare}"
        );
    }

    #[test]
    fn ghz_single_qubit_reduces_to_pointwise_error() {
        let mut cfg = base_config(49.0, GateSpec::x_half_pi());
        cfg.ghz_qubits = 1;
        let out = run_ghz(&cfg, GhzDriveMode::Refreshed).unwrap();
        // (|g⟩+|e⟩)/√2 is the equatorial state (ϑ, φ) = (π/2, 0).
        let f = error_operator_pointwise(
            &cfg.gate.matrix(),
            cfg.g_t_register(),
            FRAC_PI_2,
            0.0,
            cfg.n_cut,
        );
        let drive = cfg.initial_drive().unwrap();
        let pointwise = f.error_of_state(&drive);
        assert!(
            (out.error_total - pointwise).abs() < 1e-9,
            "GHZ(1) {} vs pointwise {}",
            out.error_total,
            pointwise
        );
        assert!((out.error_total - out.error_per_gate).abs() < 1e-15);
    }

    #[test]
    fn ghz_two_qubits_fresh_pulses_match_entanglement_fidelity_identity() {
        // A channel acting on one half of a Bell pair leaves state fidelity
        // equal to the channel's entanglement fidelity, and for qubits
        // F_avg = (2·F_ent + 1)/3. With an independent fresh pulse per gate
        // the two gate channels are uncorrelated, so to first order
        // ℰ_GHZ(2) = 2 · (3/2) · ℰ_avg = 3·ℰ_avg.
        let mut cfg = base_config(100.0, GateSpec::x_half_pi());
        cfg.ghz_qubits = 2;
        let out = run_ghz(&cfg, GhzDriveMode::DisposableConstant).unwrap();
        let f_avg = error_operator_average(
            &cfg.gate.matrix(),
            cfg.g_t_register(),
            cfg.n_cut,
            AverageMethod::Axial,
        );
        let e_avg = 1.0 - f_avg.fidelity_of_matrix(cfg.initial_drive().unwrap().to_density().matrix());
        assert!(
            (out.error_total - 3.0 * e_avg).abs() < 0.05 * 3.0 * e_avg,
            "ℰ_GHZ = {} vs 3·ℰ_avg = {}",
            out.error_total,
            3.0 * e_avg
        );
    }

    #[test]
    fn ghz_refreshing_helps_but_cannot_beat_fresh_pulses() {
        // Gates driven by one reused pulse have correlated errors on the
        // entangled register, so even heavy refreshing sits above the
        // independent fresh-pulse line; more refreshing still has to move
        // the error monotonically toward it.
        let mut cfg = base_config(100.0, GateSpec::x_half_pi());
        cfg.ghz_qubits = 4;
        cfg.ancillas = 0;
        let m0 = run_ghz(&cfg, GhzDriveMode::Refreshed).unwrap();
        cfg.ancillas = 1;
        let m1 = run_ghz(&cfg, GhzDriveMode::Refreshed).unwrap();
        cfg.ancillas = 10;
        let m10 = run_ghz(&cfg, GhzDriveMode::Refreshed).unwrap();
        let disposable = run_ghz(&cfg, GhzDriveMode::DisposableConstant).unwrap();
        assert!(
            m0.error_per_gate > m1.error_per_gate && m1.error_per_gate > m10.error_per_gate,
            "refresh ordering violated: M=0 {}, M=1 {}, M=10 {}",
            m0.error_per_gate,
            m1.error_per_gate,
            m10.error_per_gate
        );
        assert!(
            m10.error_per_gate > disposable.error_per_gate
                && m10.error_per_gate < 2.5 * disposable.error_per_gate,
            "refreshed M=10 {} should sit within (1, 2.5)× of disposable {}",
            m10.error_per_gate,
            disposable.error_per_gate
        );
    }

    #[test]
    fn ghz_reuse_beats_energy_split_disposables() {
        let mut cfg = base_config(100.0, GateSpec::x_half_pi());
        cfg.ghz_qubits = 4;
        cfg.ancillas = 0;
        let reused = run_ghz(&cfg, GhzDriveMode::Refreshed).unwrap();
        let split = run_ghz(&cfg, GhzDriveMode::DisposableSplit).unwrap();
        assert!(
            reused.error_per_gate < split.error_per_gate,
            "reused {} should beat split {}",
            reused.error_per_gate,
            split.error_per_gate
        );
    }

    #[test]
    fn ancilla_interaction_restores_purity_of_degraded_drive() {
        let mut cfg = base_config(25.0, GateSpec::x_pi());
        cfg.cycles = 10;
        cfg.seed = 31;
        let run = run_ideal(&cfg).unwrap();
        let degraded = run.final_drive;
        assert!(degraded.purity() < 0.999);
        let beta = c(0.0, 1.0 / 2.0f64.sqrt());
        let (dp, _) = ancilla_diagnostics(&degraded, beta, cfg.g_t_ancilla()).unwrap();
        assert!(dp > 0.0, "ΔP = {dp} should be positive");
    }

    #[test]
    fn ancilla_interaction_gives_negative_photon_feedback() {
        let n_bar: f64 = 25.0;
        let n_cut = recommended_cutoff(n_bar * 1.2);
        let g_t = PI / (2.0 * n_bar.sqrt());
        let r = (PI / 2.0).sqrt().ln();
        let beta = c(0.0, 1.0 / 2.0f64.sqrt());
        for delta in [-5.0, -2.5, 2.5, 5.0] {
            let drive = squeezed_coherent_state(
                c((n_bar + delta).sqrt(), 0.0),
                c(r, 0.0),
                n_cut,
            )
            .unwrap()
            .to_density();
            let (_, dn) = ancilla_diagnostics(&drive, beta, g_t).unwrap();
            assert!(
                dn * delta < 0.0,
                "δ = {delta}: Δ⟨N̂⟩ = {dn} must oppose the deviation"
            );
        }
    }

    #[test]
    fn ancilla_diagnostics_rejects_super_unit_amplitude() {
        let drive = squeezed_coherent_state(c(5.0, 0.0), c(0.0, 0.0), 95)
            .unwrap()
            .to_density();
        assert!(ancilla_diagnostics(&drive, c(1.2, 0.0), 0.3).is_err());
    }
}

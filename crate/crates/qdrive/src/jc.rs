//! Closed-form resonant Jaynes–Cummings evolution, joint-state algebra,
//! partial traces, and the semiclassical limit.
//!
//! The resonant interaction `H = ħg(|e⟩⟨g|⊗a + |g⟩⟨e|⊗a†)` with an on–off
//! envelope has the exact propagator (with `C_k = cos(gT√k)`,
//! `S_k = sin(gT√k)`)
//!
//! ```text
//! U|g,l⟩ = C_l |g,l⟩ − i S_l |e,l−1⟩
//! U|e,l⟩ = C_{l+1} |e,l⟩ − i S_{l+1} |g,l+1⟩
//! ```
//!
//! On a truncated Fock space the upward coupling out of `|e, N_cut−1⟩` is
//! dropped (its diagonal `C_{N_cut}` is kept), which is harmless for
//! states that satisfy the leakage invariant.
//!
//! Joint states live on `(2-level)^⊗k ⊗ Fock`; the basis is ordered
//! qubit-major, Fock-minor, with qubit 0 as the most significant bit:
//! index `(bits, l) = bits·N_cut + l`. Evolution against a chosen qubit is
//! applied as a structured operator (pairwise rotations), never as a dense
//! matrix on the full space.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::fock::{DriveDensity, DriveState};
use crate::{C64, Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Qubit state: a pure Bloch-sphere point `(ϑ, φ)` or a 2×2 density
/// matrix. The pure state is `cos(ϑ/2)|g⟩ + sin(ϑ/2)e^{iφ}|e⟩`.
#[derive(Debug, Clone)]
pub enum QubitState {
    Pure { theta: f64, phi: f64 },
    Density(Matrix2<C64>),
}

impl QubitState {
    /// Pure state from Bloch angles.
    pub fn pure(theta: f64, phi: f64) -> Self {
        QubitState::Pure { theta, phi }
    }

    /// Ground state `|g⟩`.
    pub fn ground() -> Self {
        QubitState::Pure {
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// Validated density-matrix state: Hermitian, unit trace, positive
    /// semidefinite within `1e−10`.
    pub fn from_density(m: Matrix2<C64>) -> Result<Self> {
        let defect = (m - m.adjoint()).map(|x| x.norm()).max();
        if defect > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "qubit density not Hermitian: defect {defect:.3e}"
            )));
        }
        if (m.trace() - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "qubit density trace {} is not 1",
                m.trace()
            )));
        }
        let [(lo, _), (hi, _)] = eigen_qubit_density(&m);
        if lo < -1e-10 || hi > 1.0 + 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "qubit density eigenvalues [{lo:.3e}, {hi:.3e}] outside [0, 1]"
            )));
        }
        Ok(QubitState::Density(m))
    }

    /// Pure-state amplitudes `(χ_g, χ_e)` if this is the pure variant.
    pub fn pure_amplitudes(&self) -> Option<(C64, C64)> {
        match self {
            QubitState::Pure { theta, phi } => Some((
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), *phi),
            )),
            QubitState::Density(_) => None,
        }
    }

    /// Density-matrix form.
    pub fn density(&self) -> Matrix2<C64> {
        match self {
            QubitState::Pure { .. } => {
                let (g, e) = self.pure_amplitudes().unwrap();
                Matrix2::new(
                    g * g.conj(),
                    g * e.conj(),
                    e * g.conj(),
                    e * e.conj(),
                )
            }
            QubitState::Density(m) => *m,
        }
    }
}

/// 2×2 complex unitary gate.
#[derive(Debug, Clone, Copy)]
pub struct GateMatrix {
    m: Matrix2<C64>,
}

impl GateMatrix {
    /// Wraps a matrix after checking unitarity (`K†K = I` within 1e−12).
    pub fn from_matrix(m: Matrix2<C64>) -> Result<Self> {
        let defect = (m.adjoint() * m - Matrix2::identity())
            .map(|x| x.norm())
            .max();
        if defect > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "gate matrix not unitary: defect {defect:.3e}"
            )));
        }
        Ok(Self { m })
    }

    /// Identity gate.
    pub fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
        }
    }

    /// Rotation `R'_θ(φ) = exp[−i(θ/2)(cos φ·X + sin φ·Y)]`, an angle-θ
    /// rotation about the xy-plane axis at angle φ from x:
    /// `cos(θ/2)·I − i sin(θ/2)·(cos φ·X + sin φ·Y)`.
    pub fn rotation(theta: f64, phi: f64) -> Self {
        let c = C64::new((theta / 2.0).cos(), 0.0);
        let s = (theta / 2.0).sin();
        let off_top = -I * s * C64::from_polar(1.0, -phi);
        let off_bot = -I * s * C64::from_polar(1.0, phi);
        Self {
            m: Matrix2::new(c, off_top, off_bot, c),
        }
    }

    /// π-rotation about x: `−iX`.
    pub fn x_pi() -> Self {
        Self::rotation(std::f64::consts::PI, 0.0)
    }

    /// The gate matrix.
    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.m
    }

    /// Elements `(K₁₁, K₁₂, K₂₁, K₂₂)` in the `(g, e)` basis.
    pub fn elements(&self) -> (C64, C64, C64, C64) {
        (
            self.m[(0, 0)],
            self.m[(0, 1)],
            self.m[(1, 0)],
            self.m[(1, 1)],
        )
    }
}

/// Precomputed `C_k = cos(gT√k)`, `S_k = sin(gT√k)` for `k = 0 ..= n_cut`.
#[derive(Debug, Clone)]
pub struct CsTable {
    pub(crate) c: Vec<f64>,
    pub(crate) s: Vec<f64>,
}

impl CsTable {
    pub fn new(g_t: f64, n_cut: usize) -> Self {
        let mut c = Vec::with_capacity(n_cut + 1);
        let mut s = Vec::with_capacity(n_cut + 1);
        for k in 0..=n_cut {
            let x = g_t * (k as f64).sqrt();
            c.push(x.cos());
            s.push(x.sin());
        }
        Self { c, s }
    }
}

/// Dense propagator `U(gT)` on the `2·N_cut` qubit ⊗ drive space.
///
/// Unitary within round-off except for the truncation-edge column
/// `|e, N_cut−1⟩`, whose norm is `|C_{N_cut}| ≤ 1`.
pub fn jc_propagator(g_t: f64, n_cut: usize) -> DMatrix<C64> {
    assert!(g_t >= 0.0, "gT must be non-negative");
    let tbl = CsTable::new(g_t, n_cut);
    let mut u = DMatrix::from_element(2 * n_cut, 2 * n_cut, C64::new(0.0, 0.0));
    for l in 0..n_cut {
        // Column |g,l⟩.
        u[(l, l)] = C64::new(tbl.c[l], 0.0);
        if l >= 1 {
            u[(n_cut + l - 1, l)] = -I * tbl.s[l];
        }
        // Column |e,l⟩.
        u[(n_cut + l, n_cut + l)] = C64::new(tbl.c[l + 1], 0.0);
        if l + 1 < n_cut {
            u[(l + 1, n_cut + l)] = -I * tbl.s[l + 1];
        }
    }
    u
}

/// Pure vector or density matrix on `(2-level)^⊗k ⊗ Fock`.
#[derive(Debug, Clone)]
pub enum JointState {
    Pure {
        amps: DVector<C64>,
        n_qubits: usize,
        n_cut: usize,
    },
    Density {
        mat: DMatrix<C64>,
        n_qubits: usize,
        n_cut: usize,
    },
}

impl JointState {
    /// Product state of pure qubits (qubit 0 first) with a pure drive.
    pub fn product_pure(qubits: &[QubitState], drive: &DriveState) -> Result<Self> {
        let n_cut = drive.n_cut();
        let n_qubits = qubits.len();
        let mut qubit_amps: Vec<(C64, C64)> = Vec::with_capacity(n_qubits);
        for q in qubits {
            qubit_amps.push(q.pure_amplitudes().ok_or_else(|| {
                Error::InvalidConfig("product_pure requires pure qubit states".into())
            })?);
        }
        let dim = (1usize << n_qubits) * n_cut;
        let mut amps = DVector::from_element(dim, C64::new(0.0, 0.0));
        for bits in 0..(1usize << n_qubits) {
            let mut coeff = C64::new(1.0, 0.0);
            for (q, amp) in qubit_amps.iter().enumerate() {
                let bit = (bits >> (n_qubits - 1 - q)) & 1;
                coeff *= if bit == 0 { amp.0 } else { amp.1 };
            }
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for l in 0..n_cut {
                amps[bits * n_cut + l] = coeff * drive.amplitudes()[l];
            }
        }
        Ok(JointState::Pure {
            amps,
            n_qubits,
            n_cut,
        })
    }

    /// Wraps a raw pure vector (norm must be 1 within 1e−9).
    pub fn from_pure(amps: DVector<C64>, n_qubits: usize, n_cut: usize) -> Result<Self> {
        if amps.len() != (1usize << n_qubits) * n_cut {
            return Err(Error::InvalidConfig(format!(
                "vector length {} does not match {} qubit(s) x {} Fock levels",
                amps.len(),
                n_qubits,
                n_cut
            )));
        }
        if (amps.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "joint state norm {} is not 1",
                amps.norm()
            )));
        }
        Ok(JointState::Pure {
            amps,
            n_qubits,
            n_cut,
        })
    }

    /// Product of a (possibly mixed) qubit density with a drive density.
    pub fn product_density(qubit: &QubitState, drive: &DriveDensity) -> Self {
        let q = qubit.density();
        let n = drive.n_cut();
        let mut mat = DMatrix::from_element(2 * n, 2 * n, C64::new(0.0, 0.0));
        for a in 0..2 {
            for b in 0..2 {
                if q[(a, b)].norm_sqr() == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        mat[(a * n + i, b * n + j)] = q[(a, b)] * drive.matrix()[(i, j)];
                    }
                }
            }
        }
        JointState::Density {
            mat,
            n_qubits: 1,
            n_cut: n,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            JointState::Pure { n_qubits, .. } | JointState::Density { n_qubits, .. } => *n_qubits,
        }
    }

    pub fn n_cut(&self) -> usize {
        match self {
            JointState::Pure { n_cut, .. } | JointState::Density { n_cut, .. } => *n_cut,
        }
    }

    /// Density-matrix form (outer product for pure states).
    pub fn to_density(&self) -> JointState {
        match self {
            JointState::Pure {
                amps,
                n_qubits,
                n_cut,
            } => JointState::Density {
                mat: amps * amps.adjoint(),
                n_qubits: *n_qubits,
                n_cut: *n_cut,
            },
            JointState::Density { .. } => self.clone(),
        }
    }

    /// Evolves the `(target_qubit, drive)` pair under the Jaynes–Cummings
    /// propagator for a dimensionless time `gT`, leaving all other qubits
    /// untouched. The operator is applied in its structured (pairwise)
    /// form; the full-space matrix is never materialized.
    pub fn evolve(&self, g_t: f64, target_qubit: usize) -> Result<JointState> {
        let n_qubits = self.n_qubits();
        if target_qubit >= n_qubits {
            return Err(Error::IndexOutOfRange {
                index: target_qubit,
                n_qubits,
            });
        }
        let n_cut = self.n_cut();
        let tbl = CsTable::new(g_t, n_cut);
        let pos = n_qubits - 1 - target_qubit;
        match self {
            JointState::Pure { amps, .. } => {
                let mut out = amps.clone();
                apply_jc_pure(out.as_mut_slice(), n_qubits, n_cut, pos, &tbl);
                Ok(JointState::Pure {
                    amps: out,
                    n_qubits,
                    n_cut,
                })
            }
            JointState::Density { mat, .. } => {
                // ρ → UρU† as two passes of the column transform:
                // tmp = Uρ, then ρ' = (U tmp†)†.
                let mut tmp = mat.clone();
                apply_jc_columns(&mut tmp, n_qubits, n_cut, pos, &tbl);
                let mut adj = tmp.adjoint();
                apply_jc_columns(&mut adj, n_qubits, n_cut, pos, &tbl);
                Ok(JointState::Density {
                    mat: adj.adjoint(),
                    n_qubits,
                    n_cut,
                })
            }
        }
    }

    /// Partial trace over the drive: the reduced register density matrix
    /// (`2^k × 2^k`).
    pub fn partial_trace_drive(&self) -> DMatrix<C64> {
        let n_cut = self.n_cut();
        let dim_q = 1usize << self.n_qubits();
        let mut out = DMatrix::from_element(dim_q, dim_q, C64::new(0.0, 0.0));
        match self {
            JointState::Pure { amps, .. } => {
                for a in 0..dim_q {
                    for b in 0..dim_q {
                        let mut acc = C64::new(0.0, 0.0);
                        for l in 0..n_cut {
                            acc += amps[a * n_cut + l] * amps[b * n_cut + l].conj();
                        }
                        out[(a, b)] = acc;
                    }
                }
            }
            JointState::Density { mat, .. } => {
                for a in 0..dim_q {
                    for b in 0..dim_q {
                        let mut acc = C64::new(0.0, 0.0);
                        for l in 0..n_cut {
                            acc += mat[(a * n_cut + l, b * n_cut + l)];
                        }
                        out[(a, b)] = acc;
                    }
                }
            }
        }
        out
    }

    /// Partial trace over one qubit, returning the reduced joint state on
    /// the remaining `k−1` qubits (always in density form).
    pub fn partial_trace_qubit(&self, index: usize) -> Result<JointState> {
        let n_qubits = self.n_qubits();
        if index >= n_qubits {
            return Err(Error::IndexOutOfRange { index, n_qubits });
        }
        let n_cut = self.n_cut();
        let pos = n_qubits - 1 - index;
        let dim_rest = (1usize << (n_qubits - 1)) * n_cut;
        let mut out = DMatrix::from_element(dim_rest, dim_rest, C64::new(0.0, 0.0));
        let insert_bit = |rest_bits: usize, bit: usize| -> usize {
            let low = rest_bits & ((1 << pos) - 1);
            let high = rest_bits >> pos;
            (high << (pos + 1)) | (bit << pos) | low
        };
        let rest_q = 1usize << (n_qubits - 1);
        match self {
            JointState::Pure { amps, .. } => {
                for ra in 0..rest_q {
                    for rb in 0..rest_q {
                        for la in 0..n_cut {
                            for lb in 0..n_cut {
                                let mut acc = C64::new(0.0, 0.0);
                                for bit in 0..2 {
                                    let ia = insert_bit(ra, bit) * n_cut + la;
                                    let ib = insert_bit(rb, bit) * n_cut + lb;
                                    acc += amps[ia] * amps[ib].conj();
                                }
                                out[(ra * n_cut + la, rb * n_cut + lb)] = acc;
                            }
                        }
                    }
                }
            }
            JointState::Density { mat, .. } => {
                for ra in 0..rest_q {
                    for rb in 0..rest_q {
                        for la in 0..n_cut {
                            for lb in 0..n_cut {
                                let mut acc = C64::new(0.0, 0.0);
                                for bit in 0..2 {
                                    let ia = insert_bit(ra, bit) * n_cut + la;
                                    let ib = insert_bit(rb, bit) * n_cut + lb;
                                    acc += mat[(ia, ib)];
                                }
                                out[(ra * n_cut + la, rb * n_cut + lb)] = acc;
                            }
                        }
                    }
                }
            }
        }
        Ok(JointState::Density {
            mat: out,
            n_qubits: n_qubits - 1,
            n_cut,
        })
    }

    /// Extracts the drive density matrix from a zero-qubit joint state.
    pub fn into_drive_density(self) -> Result<DriveDensity> {
        match self {
            JointState::Density { mat, n_qubits: 0, .. } => {
                Ok(DriveDensity::from_matrix_unchecked(mat))
            }
            JointState::Pure {
                amps, n_qubits: 0, ..
            } => Ok(DriveDensity::from_matrix_unchecked(&amps * amps.adjoint())),
            other => Err(Error::InvalidConfig(format!(
                "cannot extract drive density while {} qubit(s) remain",
                other.n_qubits()
            ))),
        }
    }

    /// Norm (pure) or trace (density), for invariant checks.
    pub fn norm_or_trace(&self) -> f64 {
        match self {
            JointState::Pure { amps, .. } => amps.norm(),
            JointState::Density { mat, .. } => mat.trace().re,
        }
    }

    /// Total excitation number `⟨a†a + Σ_q |e⟩⟨e|_q⟩`, conserved by the
    /// Jaynes–Cummings interaction.
    pub fn total_excitation(&self) -> f64 {
        let n_cut = self.n_cut();
        let count = |idx: usize| -> f64 {
            let bits = idx / n_cut;
            let l = idx % n_cut;
            (l + bits.count_ones() as usize) as f64
        };
        match self {
            JointState::Pure { amps, .. } => (0..amps.len())
                .map(|i| count(i) * amps[i].norm_sqr())
                .sum::<f64>(),
            JointState::Density { mat, .. } => (0..mat.nrows())
                .map(|i| count(i) * mat[(i, i)].re)
                .sum::<f64>(),
        }
    }
}

/// In-place structured application of `U(gT)` on the `(qubit at bit
/// position `pos`, drive)` pair of a pure joint vector.
pub(crate) fn apply_jc_pure(
    amps: &mut [C64],
    n_qubits: usize,
    n_cut: usize,
    pos: usize,
    tbl: &CsTable,
) {
    let rest = 1usize << (n_qubits - 1);
    for o in 0..rest {
        let low = o & ((1 << pos) - 1);
        let high = o >> pos;
        let bits_g = (high << (pos + 1)) | low;
        let bits_e = bits_g | (1 << pos);
        let base_g = bits_g * n_cut;
        let base_e = bits_e * n_cut;
        // Pairs |g,l⟩ ↔ |e,l−1⟩ for l = 1..N−1; |g,0⟩ is fixed and
        // |e,N−1⟩ only picks up the diagonal C_N.
        for l in 1..n_cut {
            let x = amps[base_g + l];
            let y = amps[base_e + l - 1];
            let c = tbl.c[l];
            let s = tbl.s[l];
            amps[base_g + l] = c * x - I * s * y;
            amps[base_e + l - 1] = c * y - I * s * x;
        }
        amps[base_e + n_cut - 1] *= tbl.c[n_cut];
    }
}

/// Applies `U(gT)` to every column of `mat` (i.e. computes `U·mat`
/// in place) over the `(qubit at `pos`, drive)` pair structure.
fn apply_jc_columns(
    mat: &mut DMatrix<C64>,
    n_qubits: usize,
    n_cut: usize,
    pos: usize,
    tbl: &CsTable,
) {
    let ncols = mat.ncols();
    for col in 0..ncols {
        let mut column = mat.column_mut(col);
        let slice: &mut [C64] = column.as_mut_slice();
        apply_jc_pure(slice, n_qubits, n_cut, pos, tbl);
    }
}

/// Interaction of a single qubit with a drive density matrix, with the
/// qubit traced out afterwards and returned separately:
/// `σ' = Tr_Q[U(|χ⟩⟨χ| ⊗ σ)U†]` and `χ' = Tr_D[U(|χ⟩⟨χ| ⊗ σ)U†]`.
///
/// Works through the Kraus operators `M_a = ⟨a|U|χ⟩`, which are bidiagonal
/// in the Fock basis, so the cost is O(N²) with a small constant. Mixed
/// qubits are handled by their 2×2 spectral decomposition.
pub(crate) fn interact_qubit_drive(
    qubit: &QubitState,
    drive: &mut DMatrix<C64>,
    tbl: &CsTable,
) -> Matrix2<C64> {
    match qubit {
        QubitState::Pure { .. } => {
            let (g, e) = qubit.pure_amplitudes().unwrap();
            let (sigma, q) = kraus_pure_qubit(g, e, drive, tbl);
            *drive = sigma;
            q
        }
        QubitState::Density(m) => {
            let modes = eigen_qubit_density(m);
            let n = drive.nrows();
            let mut sigma_acc = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
            let mut q_acc = Matrix2::from_element(C64::new(0.0, 0.0));
            for (p, (g, e)) in modes {
                // Keep tiny negative weights: dropping them makes the map
                // nonlinear and lets roundoff-scale invalidity feed back and
                // grow when densities circulate between interactions.
                if p == 0.0 {
                    continue;
                }
                let (sigma, q) = kraus_pure_qubit(g, e, drive, tbl);
                sigma_acc += sigma * C64::new(p, 0.0);
                q_acc += q * C64::new(p, 0.0);
            }
            *drive = sigma_acc;
            q_acc
        }
    }
}

/// Kraus update for a pure qubit `(χ_g, χ_e)`:
/// `M_g = χ_g·diag(C_l) + χ_e·[−iS_{l+1} at (l+1, l)]`,
/// `M_e = χ_e·diag(C_{l+1}) + χ_g·[−iS_{l+1} at (l, l+1)]`.
fn kraus_pure_qubit(
    chi_g: C64,
    chi_e: C64,
    sigma: &DMatrix<C64>,
    tbl: &CsTable,
) -> (DMatrix<C64>, Matrix2<C64>) {
    let n = sigma.nrows();
    let zero = C64::new(0.0, 0.0);

    // A = M_g σ, rows combined; then B = A M_g†, columns combined.
    let mut a = DMatrix::from_element(n, n, zero);
    for l in 0..n {
        let cg = chi_g * tbl.c[l];
        let se = chi_e * -I * tbl.s[l];
        for col in 0..n {
            let mut acc = cg * sigma[(l, col)];
            if l > 0 {
                acc += se * sigma[(l - 1, col)];
            }
            a[(l, col)] = acc;
        }
    }
    let mut out = DMatrix::from_element(n, n, zero);
    for col in 0..n {
        let cg = chi_g.conj() * tbl.c[col];
        let se = chi_e.conj() * I * tbl.s[col];
        for row in 0..n {
            let mut acc = a[(row, col)] * cg;
            if col > 0 {
                acc += a[(row, col - 1)] * se;
            }
            out[(row, col)] = acc;
        }
    }

    // A2 = M_e σ; out += A2 M_e†.
    let mut a2 = DMatrix::from_element(n, n, zero);
    for l in 0..n {
        let ce = chi_e * tbl.c[l + 1];
        let sg = chi_g * -I * tbl.s[l + 1];
        for col in 0..n {
            let mut acc = ce * sigma[(l, col)];
            if l + 1 < n {
                acc += sg * sigma[(l + 1, col)];
            }
            a2[(l, col)] = acc;
        }
    }
    for col in 0..n {
        let ce = chi_e.conj() * tbl.c[col + 1];
        let sg = chi_g.conj() * I * tbl.s[col + 1];
        for row in 0..n {
            let mut acc = a2[(row, col)] * ce;
            if col + 1 < n {
                acc += a2[(row, col + 1)] * sg;
            }
            out[(row, col)] += acc;
        }
    }

    // Reduced qubit: χ'_{ab} = Tr(M_a σ M_b†), O(N) from the band overlap.
    let mut q_gg = zero;
    let mut q_ee = zero;
    let mut q_ge = zero;
    for l in 0..n {
        let mgl_l = chi_g * tbl.c[l]; // M_g[l, l]
        let mgl_lm1 = chi_e * -I * tbl.s[l]; // M_g[l, l−1]
        let mel_l = chi_e * tbl.c[l + 1]; // M_e[l, l]
        let mel_lp1 = chi_g * -I * tbl.s[l + 1]; // M_e[l, l+1]

        // Tr(M_g σ M_g†)
        let mut acc = mgl_l * sigma[(l, l)] * mgl_l.conj();
        if l > 0 {
            acc += mgl_l * sigma[(l, l - 1)] * mgl_lm1.conj()
                + mgl_lm1 * sigma[(l - 1, l)] * mgl_l.conj()
                + mgl_lm1 * sigma[(l - 1, l - 1)] * mgl_lm1.conj();
        }
        q_gg += acc;

        // Tr(M_e σ M_e†)
        let mut acc = mel_l * sigma[(l, l)] * mel_l.conj();
        if l + 1 < n {
            acc += mel_l * sigma[(l, l + 1)] * mel_lp1.conj()
                + mel_lp1 * sigma[(l + 1, l)] * mel_l.conj()
                + mel_lp1 * sigma[(l + 1, l + 1)] * mel_lp1.conj();
        }
        q_ee += acc;

        // Tr(M_g σ M_e†)
        let mut acc = mgl_l * sigma[(l, l)] * mel_l.conj();
        if l + 1 < n {
            acc += mgl_l * sigma[(l, l + 1)] * mel_lp1.conj();
        }
        if l > 0 {
            acc += mgl_lm1 * sigma[(l - 1, l)] * mel_l.conj();
            if l + 1 < n {
                acc += mgl_lm1 * sigma[(l - 1, l + 1)] * mel_lp1.conj();
            }
        }
        q_ge += acc;
    }
    let qubit = Matrix2::new(q_gg, q_ge, q_ge.conj(), q_ee);
    (out, qubit)
}

/// Spectral decomposition of a 2×2 Hermitian density matrix:
/// `[(λ_low, v_low), (λ_high, v_high)]` with normalized eigenvectors given
/// as `(g, e)` amplitude pairs.
pub(crate) fn eigen_qubit_density(m: &Matrix2<C64>) -> [(f64, (C64, C64)); 2] {
    let p = m[(0, 0)].re;
    let s = m[(1, 1)].re;
    let q = m[(0, 1)];
    let mid = 0.5 * (p + s);
    let half_gap = (0.25 * (p - s).powi(2) + q.norm_sqr()).sqrt();
    let lo = mid - half_gap;
    let hi = mid + half_gap;
    if q.norm() < 1e-15 {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        return if p <= s {
            [(lo, (one, zero)), (hi, (zero, one))]
        } else {
            [(lo, (zero, one)), (hi, (one, zero))]
        };
    }
    let vec_for = |lambda: f64| -> (C64, C64) {
        let v0 = q;
        let v1 = C64::new(lambda - p, 0.0);
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        (v0 / norm, v1 / norm)
    };
    [(lo, vec_for(lo)), (hi, vec_for(hi))]
}

/// Semiclassical gate induced by a classical field of complex amplitude
/// `α` over dimensionless time `gT`:
/// `exp[−i gT (α|e⟩⟨g| + α*|g⟩⟨e|)] = cos(gT|α|)·I − i sin(gT|α|)·(cos φ·X + sin φ·Y)`
/// with `φ = arg α`. For `2gT|α| = π` and real α this is `−iX`.
pub fn semiclassical_gate(alpha: C64, g_t: f64) -> GateMatrix {
    let amp = alpha.norm();
    if amp == 0.0 {
        return GateMatrix::identity();
    }
    let phase = alpha / amp;
    let c = C64::new((g_t * amp).cos(), 0.0);
    let s = (g_t * amp).sin();
    let m = Matrix2::new(c, -I * s * phase.conj(), -I * s * phase, c);
    GateMatrix { m }
}

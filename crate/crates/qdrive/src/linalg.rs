//! Internal dense linear-algebra helpers: Hermitian eigendecomposition,
//! unitary exponentials of anti-Hermitian generators, a matrix-free
//! displacement apply, and a small Nelder–Mead simplex minimizer.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};

use crate::C64;

/// Largest entry magnitude of a complex matrix or vector (the complex
/// analogue of `amax`).
pub(crate) fn max_abs<R, C, S>(m: &Matrix<C64, R, C, S>) -> f64
where
    R: Dim,
    C: Dim,
    S: RawStorage<C64, R, C>,
{
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a complex Hermitian matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues sorted in
/// ascending order and eigenvector `k` stored in column `k`.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `exp(A)` for an anti-Hermitian `A` (`A† = −A`), computed from the
/// eigendecomposition of the Hermitian matrix `H = iA` as `V e^{−iΛ} V†`.
/// The result is unitary to the accuracy of the eigendecomposition.
pub fn exp_anti_hermitian(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let h = a.map(|x| C64::new(0.0, 1.0) * x);
    debug_assert!(
        max_abs(&(&h - h.adjoint())) < 1e-10 * max_abs(&h).max(1.0),
        "generator is not anti-Hermitian"
    );
    let (vals, vecs) = hermitian_eigen(&h);
    // V · diag(e^{−iλ}) · V†
    let mut scaled = vecs.clone();
    for k in 0..n {
        let phase = C64::from_polar(1.0, -vals[k]);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    &scaled * vecs.adjoint()
}

/// Applies the displacement operator `D(α) = exp(α a† − α* a)` to a Fock
/// vector without materializing the matrix.
///
/// The generator is bidiagonal, so one application costs O(N); the
/// exponential is evaluated by splitting `exp(A) = [exp(A/2^s)]^{2^s}` with
/// `‖A‖/2^s ≲ 1` and summing a short Taylor series per segment. Each
/// segment is unitary up to series truncation (~1e−16), so the error stays
/// negligible even for thousands of segments.
pub fn apply_displacement(alpha: C64, v: &DVector<C64>) -> DVector<C64> {
    let n = v.len();
    if n == 0 || alpha.norm() == 0.0 {
        return v.clone();
    }
    // ‖A‖₂ ≤ 2|α|√N for A = α a† − α* a on an N-level truncation. A
    // 40-term Taylor series converges below 1e−18 for segment norms up to
    // ≈ 4 (4⁴⁰/40! ≈ 1e−24), so size the segments accordingly.
    let norm_bound = 2.0 * alpha.norm() * (n as f64).sqrt();
    let segments = (norm_bound / 4.0).ceil().max(1.0) as u64;
    let seg_alpha = alpha / segments as f64;
    let sqrt_l: Vec<f64> = (0..=n).map(|l| (l as f64).sqrt()).collect();

    let mut result = v.clone();
    let mut term = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut scratch = DVector::from_element(n, C64::new(0.0, 0.0));
    for _ in 0..segments {
        term.copy_from(&result);
        for k in 1..=40u32 {
            // scratch = A·term / k, with A tridiagonal (a† and a bands).
            let inv_k = 1.0 / k as f64;
            for l in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                if l > 0 {
                    acc += seg_alpha * (sqrt_l[l] * inv_k) * term[l - 1];
                }
                if l + 1 < n {
                    acc -= seg_alpha.conj() * (sqrt_l[l + 1] * inv_k) * term[l + 1];
                }
                scratch[l] = acc;
            }
            std::mem::swap(&mut term, &mut scratch);
            result += &term;
            if term.norm_squared() < 1e-36 * result.norm_squared().max(1e-300) {
                break;
            }
        }
    }
    result
}

/// Nelder–Mead simplex minimization of `f` over `dim = x0.len()`
/// parameters, started from `x0` with per-coordinate initial steps
/// `scale`. Returns `(argmin, min)`. Deterministic; intended for smooth
/// low-dimensional landscapes.
pub fn nelder_mead<F>(f: F, x0: &[f64], scale: &[f64], max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(dim, scale.len());
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for d in 0..dim {
        let mut v = x0.to_vec();
        v[d] += scale[d];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        if (values[worst] - values[best]).abs() < 1e-14 * (1.0 + values[best].abs()) {
            let spread: f64 = (0..dim)
                .map(|d| (simplex[worst][d] - simplex[best][d]).abs())
                .fold(0.0, f64::max);
            if spread < 1e-12 {
                break;
            }
        }

        let mut centroid = vec![0.0; dim];
        for (i, v) in simplex.iter().enumerate() {
            if i == worst {
                continue;
            }
            for d in 0..dim {
                centroid[d] += v[d] / dim as f64;
            }
        }

        let lerp = |from: &[f64], towards: &[f64], t: f64| -> Vec<f64> {
            (0..dim)
                .map(|d| from[d] + t * (towards[d] - from[d]))
                .collect()
        };

        // Reflection.
        let reflected = lerp(&centroid, &simplex[worst], -alpha);
        let f_reflected = f(&reflected);
        if f_reflected < values[second_worst] && f_reflected >= values[best] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        // Expansion.
        if f_reflected < values[best] {
            let expanded = lerp(&centroid, &simplex[worst], -gamma);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        // Contraction.
        let contracted = lerp(&centroid, &simplex[worst], rho);
        let f_contracted = f(&contracted);
        if f_contracted < values[worst] {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // Shrink towards best.
        let best_point = simplex[best].clone();
        for i in 0..=dim {
            if i == best {
                continue;
            }
            simplex[i] = lerp(&best_point, &simplex[i], sigma);
            values[i] = f(&simplex[i]);
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_eigen_reconstructs_matrix() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.3, 0.4),
                c(0.0, -0.2),
                c(0.3, -0.4),
                c(1.0, 0.0),
                c(0.1, 0.0),
                c(0.0, 0.2),
                c(0.1, 0.0),
                c(3.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        let lambda = DMatrix::from_diagonal(&vals.map(|x| C64::new(x, 0.0)));
        let rebuilt = &vecs * lambda * vecs.adjoint();
        assert!(max_abs(&(rebuilt - &m)) < 1e-12);
    }

    #[test]
    fn exp_anti_hermitian_is_unitary_and_matches_series() {
        // Small random-ish anti-Hermitian generator.
        let g = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0, 0.5),
                c(0.2, 0.1),
                c(-0.3, 0.4),
                c(-0.2, 0.1),
                c(0.0, -0.7),
                c(0.05, -0.2),
                c(0.3, 0.4),
                c(-0.05, -0.2),
                c(0.0, 0.1),
            ],
        );
        let u = exp_anti_hermitian(&g);
        let id = DMatrix::identity(3, 3);
        assert!(max_abs(&(u.adjoint() * &u - &id)) < 1e-12);

        // Compare with a plain Taylor series (norm is small enough).
        let mut series = id.clone();
        let mut term = id;
        for k in 1..30 {
            term = &term * &g / C64::new(k as f64, 0.0);
            series += &term;
        }
        assert!(max_abs(&(&u - series)) < 1e-12);
    }

    #[test]
    fn displacement_apply_matches_coherent_amplitudes() {
        // D(α)|0⟩ must give Poissonian amplitudes α^n e^{−|α|²/2} / √n!.
        let n = 64;
        let alpha = c(1.7, -0.9);
        let mut vac = DVector::from_element(n, c(0.0, 0.0));
        vac[0] = c(1.0, 0.0);
        let displaced = apply_displacement(alpha, &vac);
        let mut expected = DVector::from_element(n, c(0.0, 0.0));
        let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        expected[0] = amp;
        for k in 1..n {
            amp *= alpha / (k as f64).sqrt();
            expected[k] = amp;
        }
        assert!(max_abs(&(&displaced - &expected)) < 1e-12);
        assert!((displaced.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displacement_apply_large_amplitude_stays_unitary() {
        let n = 620;
        let alpha = c(20.0, 0.0);
        let mut vac = DVector::from_element(n, c(0.0, 0.0));
        vac[0] = c(1.0, 0.0);
        let displaced = apply_displacement(alpha, &vac);
        assert!((displaced.norm() - 1.0).abs() < 1e-10);
        // Peak of |c_n|² should sit near n̄ = 400.
        let peak = (0..n)
            .max_by(|&a, &b| displaced[a].norm_sqr().total_cmp(&displaced[b].norm_sqr()))
            .unwrap();
        assert!((peak as f64 - 400.0).abs() < 3.0);
    }

    #[test]
    fn nelder_mead_minimizes_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 2.0;
        let (xmin, fmin) = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], 500);
        assert!((xmin[0] - 1.5).abs() < 1e-6);
        assert!((xmin[1] + 0.5).abs() < 1e-6);
        assert!((fmin - 2.0).abs() < 1e-10);
    }
}

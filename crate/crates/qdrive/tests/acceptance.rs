//! Acceptance suite: one test per acceptance criterion, each printing a
//! single `criterion NN: PASS (…)` line with the measured quantities.
//!
//! Run with:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture --test-threads=1
//! ```
//!
//! Every check is deterministic (fixed seeds), so the printed numbers are
//! reproducible run to run.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use qdrive::budget::{budget_report, BudgetParams};
use qdrive::error::{
    error_operator_average, error_operator_min, error_operator_pointwise,
    exact_average_error_xpi, semiclassical_average_error, AverageMethod,
};
use qdrive::fock::{coherent_state, squeezed_cat_state, squeezed_coherent_state, DriveState};
use qdrive::jc::{jc_propagator, GateMatrix, JointState, QubitState};
use qdrive::optimize::{characterize_state, commutator_scaling, optimal_drive_state};
use qdrive::protocol::{
    ancilla_diagnostics, run_full, run_ideal, sample_uniform_qubit, GateSpec, ProtocolConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random drive vector supported on the full truncated space.
fn random_drive(rng: &mut ChaCha12Rng, n: usize) -> DriveState {
    let amps: Vec<C64> = (0..n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    DriveState::from_amplitudes(amps).unwrap()
}

/// Random SU(2) element with a random global phase.
fn random_gate(rng: &mut ChaCha12Rng) -> GateMatrix {
    let a = GateMatrix::rotation(rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI);
    let b = GateMatrix::rotation(rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI);
    let phase = C64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
    GateMatrix::from_matrix((a.matrix() * b.matrix()).map(|x| x * phase)).unwrap()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[test]
fn criterion_01_first_order_error_coefficients() {
    let start = Instant::now();
    let n_bar: f64 = 400.0;
    let n_cut = 600;
    let g_t = PI / (2.0 * n_bar.sqrt());
    let r = (PI / 2.0).sqrt().ln();
    let f_avg = error_operator_average(&GateMatrix::x_pi(), g_t, n_cut, AverageMethod::Axial);

    // Coherent drive: Ē·n̄ → (4+π²)/24.
    let coherent = coherent_state(c(n_bar.sqrt(), 0.0), n_cut).unwrap();
    let scaled_coh = f_avg.error_of_state(&coherent) * n_bar;
    let target_coh = (4.0 + PI * PI) / 24.0;
    assert!(
        (scaled_coh - target_coh).abs() < 0.05 * target_coh,
        "coherent Ē·n̄ = {scaled_coh}, expected {target_coh} ± 5%"
    );

    // Optimally squeezed drive: Ē·n̄ → π/6.
    let squeezed = squeezed_coherent_state(c(n_bar.sqrt(), 0.0), c(r, 0.0), n_cut).unwrap();
    let scaled_sq = f_avg.error_of_state(&squeezed) * n_bar;
    let target_sq = PI / 6.0;
    assert!(
        (scaled_sq - target_sq).abs() < 0.05 * target_sq,
        "squeezed Ē·n̄ = {scaled_sq}, expected {target_sq} ± 5%"
    );

    // Squeezed cat: worst-case error ℰ_max·n̄ → π/4.
    let cat = squeezed_cat_state(c(n_bar.sqrt(), 0.0), c(r, 0.0), 1, n_cut).unwrap();
    let f_min = error_operator_min(0.0, g_t, n_cut);
    let scaled_cat = f_min.error_of_state(&cat) * n_bar;
    let target_cat = PI / 4.0;
    assert!(
        (scaled_cat - target_cat).abs() < 0.10 * target_cat,
        "cat ℰ_max·n̄ = {scaled_cat}, expected {target_cat} ± 10%"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "runtime {elapsed:?} not in seconds");
    println!(
        "criterion 01: PASS (coherent {scaled_coh:.4} vs {target_coh:.4}, squeezed {scaled_sq:.4} \
         vs {target_sq:.4}, cat max {scaled_cat:.4} vs {target_cat:.4}; {elapsed:.2?} at cutoff {n_cut})"
    );
}

#[test]
fn criterion_02_optimal_state_recovery() {
    // π-rotation about x at gT = π/6: the timing condition puts the
    // optimal drive at n̄ = 9, squeezed by ln√(π/2) along the axis.
    let f = error_operator_average(&GateMatrix::x_pi(), PI / 6.0, 64, AverageMethod::Integral);
    let opt = optimal_drive_state(&f);
    let photon = opt.state.mean_photon();
    assert!(
        (photon - 9.0).abs() < 0.5,
        "optimal-state mean photon {photon}, expected 9 ± 0.5"
    );
    let fit = characterize_state(&opt.state);
    let r_target = (PI / 2.0).sqrt().ln();
    assert!(
        (fit.r - c(r_target, 0.0)).norm() < 0.03,
        "fitted r {} expected {r_target} ± 0.03",
        fit.r
    );

    // Half-π rotation about y at the matched timing gT = π/12: optimal
    // drive displaced along i with squeezing ln√(π/√8) about that axis.
    let y_half = GateMatrix::rotation(PI / 2.0, FRAC_PI_2);
    let f2 = error_operator_average(&y_half, PI / 12.0, 64, AverageMethod::Integral);
    let opt2 = optimal_drive_state(&f2);
    let fit2 = characterize_state(&opt2.state);
    let axis = fit2.alpha.arg();
    assert!(
        (axis - FRAC_PI_2).abs() < 0.03,
        "fitted axis phase {axis}, expected π/2 ± 0.03"
    );
    // Rotate the complex squeezing parameter back to the fitted axis
    // frame before comparing with the axis-aligned magnitude.
    let r_along = fit2.r * C64::from_polar(1.0, -2.0 * axis);
    let r2_target = (PI / 8.0f64.sqrt()).sqrt().ln();
    assert!(
        (r_along - c(r2_target, 0.0)).norm() < 0.03,
        "fitted squeezing {r_along} expected {r2_target} ± 0.03"
    );

    println!(
        "criterion 02: PASS (X_π: n̄ {photon:.3}, r {:.4} vs {r_target:.4}; Y_π/2: axis {axis:.5} \
         vs {:.5}, r {:.4} vs {r2_target:.4})",
        fit.r.re, FRAC_PI_2, r_along.re
    );
}

#[test]
fn criterion_03_operator_form_matches_dense_evolution() {
    let start = Instant::now();
    let n = 64;
    let mut rng = ChaCha12Rng::seed_from_u64(314);
    let mut max_point_dev = 0.0f64;
    let mut max_avg_dev = 0.0f64;
    for _ in 0..100 {
        let gate = random_gate(&mut rng);
        let g_t = 0.05 + 1.15 * rng.random::<f64>();
        let qubit_theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
        let qubit_phi = 2.0 * PI * rng.random::<f64>();
        let drive = random_drive(&mut rng, n);

        // Operator form of the pointwise gate error.
        let f = error_operator_pointwise(&gate, g_t, qubit_theta, qubit_phi, n);
        let via_operator = f.error_of_state(&drive);

        // Dense oracle: evolve the joint state and project the reduced
        // qubit onto the ideal gate output.
        let qubit = QubitState::pure(qubit_theta, qubit_phi);
        let joint = JointState::product_pure(&[qubit.clone()], &drive).unwrap();
        let psi = match joint {
            JointState::Pure { amps, .. } => amps,
            _ => unreachable!(),
        };
        let evolved = jc_propagator(g_t, n) * psi;
        let (chi_g, chi_e) = qubit.pure_amplitudes().unwrap();
        let m = gate.matrix();
        let target = (
            m[(0, 0)] * chi_g + m[(0, 1)] * chi_e,
            m[(1, 0)] * chi_g + m[(1, 1)] * chi_e,
        );
        let mut fid = 0.0;
        for k in 0..n {
            let amp = target.0.conj() * evolved[k] + target.1.conj() * evolved[n + k];
            fid += amp.norm_sqr();
        }
        let via_dense = 1.0 - fid;
        let dev = (via_operator - via_dense).abs();
        max_point_dev = max_point_dev.max(dev);
        assert!(
            dev < 1e-9,
            "operator error {via_operator} vs dense {via_dense} (dev {dev:.3e})"
        );

        // Six-axial quadrature of the averaged operator against the
        // closed-form angular integral, elementwise.
        let f_ax = error_operator_average(&gate, g_t, n, AverageMethod::Axial);
        let f_int = error_operator_average(&gate, g_t, n, AverageMethod::Integral);
        let avg_dev = max_abs(&(f_ax.matrix() - f_int.matrix()));
        max_avg_dev = max_avg_dev.max(avg_dev);
        assert!(avg_dev < 1e-10, "axial vs integral deviation {avg_dev:.3e}");
    }
    println!(
        "criterion 03: PASS (100 triples at cutoff 64: max pointwise dev {max_point_dev:.2e} < 1e-9, \
         max axial-vs-integral dev {max_avg_dev:.2e} < 1e-10; {:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_04_closed_form_average_error() {
    // Closed form vs operator expectation on random states.
    let n = 48;
    let g_t = 0.44;
    let f_avg = error_operator_average(&GateMatrix::x_pi(), g_t, n, AverageMethod::Integral);
    let mut rng = ChaCha12Rng::seed_from_u64(2718);
    let mut max_dev = 0.0f64;
    for _ in 0..50 {
        let drive = random_drive(&mut rng, n);
        let closed = exact_average_error_xpi(&drive, g_t);
        let operator = f_avg.error_of_state(&drive);
        let dev = (closed - operator).abs();
        max_dev = max_dev.max(dev);
        assert!(dev < 1e-10, "closed {closed} vs operator {operator}");
    }

    // The semiclassical error is minimized at r = ln√(π/2).
    let n_bar = 250.0;
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 0..=5000 {
        let r = 0.5 * i as f64 / 5000.0;
        let v = semiclassical_average_error(n_bar, r);
        if v < best.0 {
            best = (v, r);
        }
    }
    let r_target = (PI / 2.0).sqrt().ln();
    assert!(
        (best.1 - r_target).abs() < 1e-3,
        "grid argmin {} expected {r_target} ± 1e-3",
        best.1
    );

    println!(
        "criterion 04: PASS (50 states: max closed-vs-operator dev {max_dev:.2e} < 1e-10; \
         argmin r {:.4} vs {r_target:.4})",
        best.1
    );
}

#[test]
fn criterion_05_commutator_scaling_law() {
    let slope = commutator_scaling(0.0, &[25.0, 50.0, 100.0, 200.0]).unwrap();
    assert!(
        (slope + 3.0).abs() < 0.3,
        "log-log slope {slope}, expected −3 ± 0.3"
    );
    println!("criterion 05: PASS (max|[F_min, F_avg]| log-log slope {slope:.3} vs −3 ± 0.3)");
}

#[test]
fn criterion_06_refreshing_protocol_steady_state() {
    let start = Instant::now();
    let n_bar: f64 = 100.0;
    let g_t = PI / (2.0 * n_bar.sqrt());

    // Steady-state error, averaged over the last 10 of 40 cycles and over
    // 20 seeds, is monotone non-increasing in the ancilla count.
    let steady = |ancillas: usize| -> f64 {
        let mut acc = 0.0;
        for seed in 0..20u64 {
            let mut cfg = ProtocolConfig::new(n_bar, GateSpec::x_pi()).unwrap();
            cfg.cycles = 40;
            cfg.ancillas = ancillas;
            cfg.seed = seed;
            let run = run_ideal(&cfg).unwrap();
            acc += run.records[30..40].iter().map(|r| r.avg_error).sum::<f64>() / 10.0;
        }
        acc / 20.0
    };
    let means: Vec<f64> = [0usize, 1, 2, 3, 10].iter().map(|&m| steady(m)).collect();
    for w in means.windows(2) {
        assert!(
            w[0] >= w[1],
            "steady-state error not monotone in ancilla count: {means:?}"
        );
    }

    // Ten ancillas hold the error within 2× of the π/(6n̄) lower bound…
    let bound = PI / (6.0 * n_bar);
    assert!(
        means[4] <= 2.0 * bound,
        "M=10 steady error {} above 2× bound {bound}",
        means[4]
    );

    // …and saturate within ten cycles.
    let mut cfg = ProtocolConfig::new(n_bar, GateSpec::x_pi()).unwrap();
    cfg.cycles = 40;
    cfg.ancillas = 10;
    cfg.seed = 1;
    let run = run_ideal(&cfg).unwrap();
    let e10 = run.records[9].avg_error;
    let e40 = run.records[39].avg_error;
    assert!(
        (e10 - e40).abs() <= 0.1 * e40,
        "M=10 not saturated by cycle 10: Ē(10)={e10}, Ē(40)={e40}"
    );

    // Without refreshing the drive performs an unbiased photon random
    // walk whose stationary distribution is uniform over the truncated
    // space, so the long-run error equals the uniform Fock-mixture error.
    let attractor = |levels: usize| -> f64 {
        let mut sum = 0.0;
        for k in 0..levels {
            sum += exact_average_error_xpi(&DriveState::fock(k, levels), g_t);
        }
        sum / levels as f64
    };

    // Tether the simulator to that attractor at the working cutoff…
    let predicted = attractor(cfg.n_cut);
    let mut tails = 0.0;
    for seed in [1u64, 2] {
        let mut long = ProtocolConfig::new(n_bar, GateSpec::x_pi()).unwrap();
        long.cycles = 45_000;
        long.ancillas = 0;
        long.seed = seed;
        let run = run_ideal(&long).unwrap();
        tails += run.records[35_000..].iter().map(|r| r.avg_error).sum::<f64>() / 10_000.0;
    }
    let simulated = tails / 2.0;
    assert!(
        (simulated - predicted).abs() < 0.04,
        "simulated long-run error {simulated} vs stationary prediction {predicted}"
    );

    // …then evaluate the attractor beyond truncation: as the walk spreads
    // over many Rabi periods the long-run error approaches 0.5.
    let mut limit = 0.0;
    for levels in [1600usize, 2500, 3600, 6400] {
        limit = attractor(levels);
        assert!(
            (limit - 0.5).abs() <= 0.02,
            "long-run error {limit} at {levels} levels, expected 0.5 ± 0.02"
        );
    }

    println!(
        "criterion 06: PASS (steady Ē by M {:?}; M=10 {:.4} ≤ 2×{bound:.4}, saturated by cycle 10 \
         ({e10:.5} vs {e40:.5}); M=0 long-run: simulated {simulated:.4} vs stationary {predicted:.4}, \
         untruncated limit {limit:.4} → 0.5; {:.1?})",
        means.iter().map(|m| (m * 1e4).round() / 1e4).collect::<Vec<_>>(),
        means[4],
        start.elapsed()
    );
}

#[test]
fn criterion_07_ancilla_diagnostics() {
    let n_bar = 25.0;
    let beta = c(0.0, 1.0 / 2.0f64.sqrt());

    // Purity recovery: the equatorial ancilla (|g⟩+i|e⟩)/√2 increases the
    // purity of a drive degraded by ten random register qubits.
    let mut cfg = ProtocolConfig::new(n_bar, GateSpec::x_pi()).unwrap();
    cfg.cycles = 10;
    cfg.seed = 5;
    let degraded = run_ideal(&cfg).unwrap();
    let (dp, _dn) = ancilla_diagnostics(&degraded.final_drive, beta, cfg.g_t_ancilla()).unwrap();
    assert!(dp > 0.0, "purity change {dp} not positive");

    // Photon-number feedback: a drive prepared at n̄+δ loses photons for
    // δ > 0 and gains them for δ < 0, over a nine-point grid inside
    // [−0.2n̄, 0.2n̄] (offset by half a step so δ=0 is excluded).
    let r = c((PI / 2.0).sqrt().ln(), 0.0);
    let mut min_margin = f64::INFINITY;
    for j in 0..9 {
        let delta = (j as f64 - 4.5) * 0.4 * n_bar / 9.0;
        let drive = squeezed_coherent_state(c((n_bar + delta).sqrt(), 0.0), r, cfg.n_cut)
            .unwrap()
            .to_density();
        let (_dp, dn) = ancilla_diagnostics(&drive, beta, cfg.g_t_ancilla()).unwrap();
        assert!(
            dn.signum() == -delta.signum(),
            "Δ⟨N̂⟩ = {dn} at δ = {delta}: wrong feedback sign"
        );
        min_margin = min_margin.min(dn.abs());
    }

    println!(
        "criterion 07: PASS (ΔP = {dp:.3e} > 0 on degraded drive; photon feedback opposes δ on \
         all 9 grid points, min |Δ⟨N̂⟩| = {min_margin:.2e})"
    );
}

#[test]
fn criterion_08_full_protocol_energy_advantage() {
    let start = Instant::now();
    let mut cfg = ProtocolConfig::new(100.0, GateSpec::x_pi()).unwrap();
    cfg.cycles = 100;
    cfg.ancillas = 3;
    cfg.seed = 7;
    let run = run_full(&cfg).unwrap();

    // Error stays within 2× of its first-cycle value for all 100 cycles.
    let e1 = run.records[0].avg_error;
    let e_max = run
        .records
        .iter()
        .map(|r| r.avg_error)
        .fold(0.0f64, f64::max);
    assert!(
        e_max <= 2.0 * e1,
        "error grew to {e_max}, more than 2× the first-cycle value {e1}"
    );

    // Amortized energy per gate ends at least 10× below the number of
    // photons a disposable pulse would need for the same error, π/(6Ē).
    let last = run.records.last().unwrap();
    let disposable = PI / (6.0 * last.avg_error);
    assert!(
        10.0 * last.energy_per_gate <= disposable,
        "energy per gate {} not 10× below the disposable bound {disposable}",
        last.energy_per_gate
    );

    // Frozen golden trajectory (seeded run, relative tolerance 1e-6).
    let golden = [
        (1usize, 5.2682910926750148e-3),
        (25, 6.9873921238661207e-3),
        (50, 7.0255779531346318e-3),
        (100, 7.5677344965472404e-3),
    ];
    for (cycle, expected) in golden {
        let got = run.records[cycle - 1].avg_error;
        assert!(
            ((got - expected) / expected).abs() < 1e-6,
            "cycle {cycle}: Ē = {got:.16e}, golden {expected:.16e}"
        );
    }

    println!(
        "criterion 08: PASS (max/first error ratio {:.3} ≤ 2; E = {:.1} photons is {:.1}× below \
         the disposable bound {disposable:.1}; golden trajectory matched at 4 checkpoints; {:.2?})",
        e_max / e1,
        last.energy_per_gate,
        disposable / last.energy_per_gate,
        start.elapsed()
    );
}

#[test]
fn criterion_09_power_budget() {
    let report = budget_report(&BudgetParams::default()).unwrap();

    let checks = [
        ("total dissipation", report.total_dissipation_rounded, 2e-3),
        ("minimum photons", report.min_photons_exact, 577.9),
        ("quantum-limited π power", report.min_drive_power_rounded, 1e-13),
        ("quantum-limited total", report.min_total_dissipation_rounded, 20e-6),
    ];
    for (label, got, printed) in checks {
        assert!(
            (got - printed).abs() <= 0.10 * printed,
            "{label}: {got:.4e} differs from {printed:.4e} by more than 10%"
        );
    }

    println!(
        "criterion 09: PASS (total {:.3e} W vs 2 mW; n̄_min {:.1} vs 577.9; P_π,min {:.3e} W vs \
         1e-13; P_min {:.3e} W vs 20 µW)",
        report.total_dissipation_rounded,
        report.min_photons_exact,
        report.min_drive_power_rounded,
        report.min_total_dissipation_rounded
    );
}

#[test]
fn criterion_10_property_suite() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1618);

    // Unitarity of the structured propagator at the largest working
    // cutoff: norm preserved for random joint vectors. The propagator is
    // an isometry everywhere except the truncation-edge state
    // |e, N_cut−1⟩, so the probes avoid that single component.
    let n = 600;
    let u = jc_propagator(0.31, n);
    for _ in 0..5 {
        let mut v = DVector::from_fn(2 * n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        v[2 * n - 1] = c(0.0, 0.0);
        let w = &u * &v;
        assert!(
            (w.norm() / v.norm() - 1.0).abs() < 1e-12,
            "propagator changed the norm"
        );
    }

    // Norm and excitation-number conservation through joint evolution.
    let drive = coherent_state(c(10.0, 0.0), n).unwrap();
    let qubit = sample_uniform_qubit(&mut rng);
    let joint = JointState::product_pure(&[qubit], &drive).unwrap();
    let exc_before = joint.total_excitation();
    let norm_before = joint.norm_or_trace();
    let evolved = joint.evolve(0.2, 0).unwrap();
    assert!((evolved.norm_or_trace() - norm_before).abs() < 1e-12);
    assert!((evolved.total_excitation() - exc_before).abs() < 1e-8);

    // Trace preservation, Hermiticity, and positivity of the drive
    // density through 1000 protocol cycles.
    let mut cfg = ProtocolConfig::new(25.0, GateSpec::x_pi()).unwrap();
    cfg.cycles = 1000;
    cfg.seed = 12;
    let run = run_ideal(&cfg).unwrap();
    let rho = run.final_drive.matrix();
    let trace: C64 = (0..rho.nrows()).map(|i| rho[(i, i)]).sum();
    assert!((trace.re - 1.0).abs() < 1e-9 && trace.im.abs() < 1e-12);
    assert!(max_abs(&(rho.adjoint() - rho)) < 1e-12, "density not Hermitian");
    for _ in 0..20 {
        let v = DVector::from_fn(rho.nrows(), |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let q = v.dotc(&(rho * &v)).re / v.norm_squared();
        assert!(q >= -1e-8, "density has a negative direction: {q}");
    }

    // Cutoff stability: physical quantities indifferent to widening the
    // truncation by 32 levels. (The comparison stays on one Rabi branch:
    // at gT = π/20 the next branch sits at n = 900, outside both boxes.)
    let g_t = PI / 20.0;
    let e_small = exact_average_error_xpi(&coherent_state(c(10.0, 0.0), 220).unwrap(), g_t);
    let e_large = exact_average_error_xpi(&coherent_state(c(10.0, 0.0), 252).unwrap(), g_t);
    assert!((e_small - e_large).abs() < 1e-10, "cutoff-sensitive error");
    let opt_small = optimal_drive_state(&error_operator_average(
        &GateMatrix::x_pi(),
        g_t,
        220,
        AverageMethod::Integral,
    ));
    let opt_large = optimal_drive_state(&error_operator_average(
        &GateMatrix::x_pi(),
        g_t,
        252,
        AverageMethod::Integral,
    ));
    assert!(
        (opt_small.fidelity - opt_large.fidelity).abs() < 1e-9,
        "cutoff-sensitive optimal fidelity"
    );
    assert!(
        (opt_small.state.mean_photon() - opt_large.state.mean_photon()).abs() < 1e-6,
        "cutoff-sensitive optimal state"
    );

    // Deterministic seeding: identical configurations reproduce the exact
    // trajectory; a different seed produces a different one.
    let mut det = ProtocolConfig::new(25.0, GateSpec::x_pi()).unwrap();
    det.cycles = 20;
    det.seed = 3;
    let a = run_ideal(&det).unwrap();
    let b = run_ideal(&det).unwrap();
    assert!(a
        .records
        .iter()
        .zip(&b.records)
        .all(|(x, y)| x.avg_error == y.avg_error && x.purity == y.purity));
    det.seed = 4;
    let c_run = run_ideal(&det).unwrap();
    assert!(a
        .records
        .iter()
        .zip(&c_run.records)
        .any(|(x, y)| x.avg_error != y.avg_error));

    println!(
        "criterion 10: PASS (unitarity at cutoff 600, norm/trace preservation, excitation \
         conservation, 1000-cycle density sanity, cutoff stability, seeded determinism; {:.2?})",
        start.elapsed()
    );
}

//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line with the measured quantities. Tests serialize on a
//! shared lock so the per-criterion time budgets are honest; run with
//!
//! ```text
//! cargo test --test acceptance -- --test-threads=1 --nocapture
//! ```

use std::sync::Mutex;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secrecy_precoding::baselines::{effective_power_bound, gaussian_precoding};
use secrecy_precoding::channel::{
    exp_correlation, interference_closed_form, sample_channel, to_complex, CMatrix,
    CorrelationSet,
};
use secrecy_precoding::constellation::{
    difference_classes, enumerate_vectors, make_constellation, ConstellationKind,
};
use secrecy_precoding::lift::{
    big_f, big_g, build_quadratics, devectorize, f_minus_g, grad_f, initial_box, membership_c,
    membership_p, surrogate_value, LiftedPoint, LiftedQuadratics, Side,
    DEFAULT_MATRIX_MEMORY_CAP,
};
use secrecy_precoding::mutual_info::{mi_approx, mi_exact_mc, secrecy_rate_of_covariances};
use secrecy_precoding::optimizer::{bnb_maximize, branch, ccp_maximize, CcpOutcome};
use secrecy_precoding::Scenario;

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(name: &str, detail: &str, elapsed: f64, budget_s: f64) {
    println!("PASS {name}: {detail} [{elapsed:.1}s, budget {budget_s:.0}s]");
    assert!(
        elapsed <= budget_s,
        "{name} exceeded its time budget: {elapsed:.1}s > {budget_s:.0}s"
    );
}

fn rand_vec(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| (rng.random::<f64>() - 0.5) * 2.0 * scale)
}

fn rand_psd(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| (rng.random::<f64>() - 0.5) * 2.0);
    (&m * m.transpose()).scale(scale / n as f64)
}

/// Scale a random direction so every power/interference budget holds with
/// the given slack factor (> 1 keeps the point strictly inside).
fn rand_feasible(quad: &LiftedQuadratics, slack: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let raw = rand_vec(quad.dim, 1.0, rng);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        worst = worst.max((raw.transpose() * &quad.c[i] * &raw)[(0, 0)] / quad.beta[i]);
    }
    for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
        worst = worst.max((raw.transpose() * dj * &raw)[(0, 0)] / gj);
    }
    &raw / (worst * slack).sqrt().max(1e-12)
}

/// The one-antenna-per-transmitter BPSK instance (four real variables),
/// small enough for brute force.
fn tiny_quad() -> LiftedQuadratics {
    let cm = |rho: f64, n: usize| to_complex(&exp_correlation(rho, n).unwrap());
    let one = cm(0.0, 1);
    let corr = CorrelationSet::new(
        cm(0.3, 2),
        cm(0.6, 2),
        [one.clone(), one.clone()],
        [one.clone(), one.clone()],
        vec![cm(0.5, 2)],
        vec![[one.clone(), one.clone()]],
    )
    .unwrap();
    let c = make_constellation(ConstellationKind::Bpsk);
    let en = enumerate_vectors(&c, &c, 1, 1, 4096).unwrap();
    let classes = difference_classes(&en);
    build_quadratics(
        &corr,
        &en,
        &classes,
        [2.0, 2.0],
        vec![0.2],
        0.1,
        0.1,
        DEFAULT_MATRIX_MEMORY_CAP,
    )
    .unwrap()
}

#[test]
fn criterion_01_trivial_zeros() {
    let _g = serial();
    let t0 = Instant::now();
    let s = Scenario::builtin("paper-fig3").unwrap();
    let quad = s.quadratics().unwrap();
    let corr = s.correlation_set().unwrap();
    let en = s.enumeration().unwrap();
    let zero = DVector::zeros(quad.dim);
    assert_eq!(mi_approx(&zero, &quad, Side::Legitimate, 0.1).unwrap(), 0.0);
    assert_eq!(mi_approx(&zero, &quad, Side::Eavesdropper, 0.1).unwrap(), 0.0);
    assert_eq!(f_minus_g(&zero, &quad).unwrap(), 0.0);
    let z1 = CMatrix::zeros(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mc = mi_exact_mc(&z1, &z1, &corr, Side::Legitimate, 0.1, &en, 50, 4, &mut rng).unwrap();
    assert_eq!(mc.value, 0.0);
    assert_eq!(
        interference_closed_form(&z1, &z1, &corr.phi_f[0], &corr.psi_f[0][0], &corr.psi_f[0][1]),
        0.0
    );
    report(
        "criterion 01 (trivial zeros)",
        "zero precoders give exactly 0 for mi_approx, mi_exact_mc, f-g, interference",
        t0.elapsed().as_secs_f64(),
        1.0,
    );
}

#[test]
fn criterion_02_gradient_correctness() {
    let _g = serial();
    let t0 = Instant::now();
    let quad = Scenario::builtin("paper-fig3").unwrap().quadratics().unwrap();
    let n = quad.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-5;
    let mut max_rel = 0.0f64;
    for _ in 0..20 {
        let q = rand_psd(n, 0.15, &mut rng);
        let g = grad_f(&q, &quad).unwrap();
        for probe in 0..6 {
            let (mut i, mut j) = ((probe * 5) % n, (probe * 7 + 3) % n);
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[(i, j)] += h;
            qp[(j, i)] = qp[(i, j)];
            qm[(i, j)] -= h;
            qm[(j, i)] = qm[(i, j)];
            let fd = (big_f(&qp, &quad).unwrap() - big_f(&qm, &quad).unwrap()) / (2.0 * h)
                * if i == j { 1.0 } else { 0.5 };
            let rel = (fd - g[(i, j)]).abs() / g[(i, j)].abs().max(1.0);
            max_rel = max_rel.max(rel);
        }
    }
    assert!(max_rel <= 1e-4, "max relative gradient error {max_rel:.2e}");
    report(
        "criterion 02 (gradient correctness)",
        &format!("grad_F vs central differences, 20 PSD points, max rel err {max_rel:.2e} <= 1e-4"),
        t0.elapsed().as_secs_f64(),
        10.0,
    );
}

#[test]
fn criterion_03_convexity_and_tangency() {
    let _g = serial();
    let t0 = Instant::now();
    let quad = Scenario::builtin("paper-fig3").unwrap().quadratics().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0usize;
    for _ in 0..100 {
        let pa = rand_vec(quad.dim, 0.3, &mut rng);
        let pb = rand_vec(quad.dim, 0.3, &mut rng);
        let qa = &pa * pa.transpose();
        let qb = &pb * pb.transpose();
        let qm = (&qa + &qb) * 0.5;
        let fa = big_f(&qa, &quad).unwrap();
        let fb = big_f(&qb, &quad).unwrap();
        if big_f(&qm, &quad).unwrap() > 0.5 * (fa + fb) + 1e-9 {
            violations += 1;
        }
        let ga = big_g(&qa, &quad).unwrap();
        let gb = big_g(&qb, &quad).unwrap();
        if big_g(&qm, &quad).unwrap() > 0.5 * (ga + gb) + 1e-9 {
            violations += 1;
        }
        // tangent surrogate never exceeds the true F - G, and touches at Qc
        if surrogate_value(&qa, &qb, &quad).unwrap() > fa - ga + 1e-9 {
            violations += 1;
        }
        if (surrogate_value(&qa, &qa, &quad).unwrap() - (fa - ga)).abs() > 1e-9 {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
    report(
        "criterion 03 (convexity/tangency)",
        "midpoint convexity of F and G plus surrogate bound/tangency, 100 pairs, 0 violations",
        t0.elapsed().as_secs_f64(),
        10.0,
    );
}

#[test]
fn criterion_04_approximation_accuracy() {
    let _g = serial();
    let t0 = Instant::now();
    let s = Scenario::builtin("paper-fig3").unwrap();
    let quad = s.quadratics().unwrap();
    let corr = s.correlation_set().unwrap();
    let en = s.enumeration().unwrap();
    let log2n = (en.count as f64).log2();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_margin = f64::NEG_INFINITY;
    for trial in 0..20 {
        let p = rand_feasible(&quad, 1.0 + 0.2 * (trial % 5) as f64, &mut rng);
        let (p1, p2) = devectorize(&p, (2, 2)).unwrap();
        for side in [Side::Legitimate, Side::Eavesdropper] {
            let approx = mi_approx(&p, &quad, side, 0.1).unwrap();
            let mc =
                mi_exact_mc(&p1, &p2, &corr, side, 0.1, &en, 800, 8, &mut rng).unwrap();
            let tol = 3.0 * mc.std_error + 0.05 * log2n;
            let margin = (approx - mc.value).abs() - tol;
            worst_margin = worst_margin.max(margin);
            assert!(
                margin <= 0.0,
                "|approx - mc| = {:.4} exceeds 3*se + 0.05*log2N = {:.4}",
                (approx - mc.value).abs(),
                tol
            );
        }
    }
    report(
        "criterion 04 (approximation accuracy)",
        &format!("20 feasible precoders, both links, worst slack {:.3} bits", -worst_margin),
        t0.elapsed().as_secs_f64(),
        300.0,
    );
}

#[test]
fn criterion_05_interference_identity() {
    let _g = serial();
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_rel = 0.0f64;
    for _ in 0..10 {
        let cm = |rho: f64, n: usize| to_complex(&exp_correlation(rho, n).unwrap());
        let rho_f = 0.9 * rng.random::<f64>();
        let rho_1 = 0.9 * rng.random::<f64>();
        let rho_2 = 0.9 * rng.random::<f64>();
        let corr = CorrelationSet::new(
            cm(0.3, 2),
            cm(0.6, 2),
            [cm(0.9, 2), cm(0.8, 2)],
            [cm(0.4, 2), cm(0.9, 2)],
            vec![cm(rho_f, 2)],
            vec![[cm(rho_1, 2), cm(rho_2, 2)]],
        )
        .unwrap();
        let rp = |rng: &mut ChaCha8Rng| {
            CMatrix::from_fn(2, 2, |_, _| {
                num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        };
        let (p1, p2) = (rp(&mut rng), rp(&mut rng));
        let exact =
            interference_closed_form(&p1, &p2, &corr.phi_f[0], &corr.psi_f[0][0], &corr.psi_f[0][1]);
        let draws = 4000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let d = sample_channel(&corr, &mut rng);
            acc += (&d.f[0][0] * &p1).iter().map(|z| z.norm_sqr()).sum::<f64>()
                + (&d.f[0][1] * &p2).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let mc = acc / draws as f64;
        let rel = (mc - exact).abs() / exact.abs().max(1e-12);
        worst_rel = worst_rel.max(rel);
        assert!(rel <= 0.02, "interference MC off by {:.2}%", 100.0 * rel);
    }
    report(
        "criterion 05 (interference identity)",
        &format!("closed form vs 4000-draw MC on 10 instances, worst error {:.2}%", 100.0 * worst_rel),
        t0.elapsed().as_secs_f64(),
        60.0,
    );
}

#[test]
fn criterion_06_set_properties() {
    let _g = serial();
    let t0 = Instant::now();
    let s = Scenario::builtin("paper-fig3").unwrap();
    let quad = s.quadratics().unwrap();
    let bounds = initial_box(&quad).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // covering: every feasible lifted point belongs to the initial set C(B)
    for trial in 0..50 {
        let p = rand_feasible(&quad, 1.0 + 0.1 * (trial % 9) as f64, &mut rng);
        assert!(membership_p(&p, &quad, 1e-9).0);
        let point = LiftedPoint { q: &p * p.transpose(), p };
        assert!(
            membership_c(&point, &bounds, &quad, 1e-7).is_member,
            "feasible lifted point left C(B_init) on trial {trial}"
        );
    }

    // nesting: members of a child set belong to the parent set
    let (left, right) = branch(&bounds).unwrap();
    for trial in 0..50 {
        let p = rand_feasible(&quad, 1.0 + 0.1 * (trial % 9) as f64, &mut rng);
        let child = if left.contains(&p, 0.0) { &left } else { &right };
        assert!(child.contains(&p, 1e-12));
        let point = LiftedPoint { q: &p * p.transpose(), p };
        if membership_c(&point, child, &quad, 1e-9).is_member {
            assert!(
                membership_c(&point, &bounds, &quad, 1e-9).is_member,
                "child-set member left the parent set on trial {trial}"
            );
        }
    }

    // monotonicity: every convex-concave trace is non-decreasing
    let mut traces = 0usize;
    for _ in 0..5 {
        let q0 = rand_psd(quad.dim, 0.2, &mut rng);
        match ccp_maximize(&quad, &bounds, &q0, 0.002, 30, &Default::default()).unwrap() {
            CcpOutcome::Infeasible => panic!("initial box reported infeasible"),
            CcpOutcome::Trace(t) => {
                for w in t.values.windows(2) {
                    assert!(w[1] >= w[0] - 1e-7, "non-monotone trace step {} -> {}", w[0], w[1]);
                }
                traces += 1;
            }
        }
    }
    assert_eq!(traces, 5);
    report(
        "criterion 06 (set properties)",
        "covering (50 pts), child-in-parent (50 pts), 5 monotone traces, 0 violations",
        t0.elapsed().as_secs_f64(),
        120.0,
    );
}

#[test]
fn criterion_07_tiny_instance_enclosure() {
    let _g = serial();
    let t0 = Instant::now();
    let quad = tiny_quad();
    assert_eq!(quad.dim, 4);
    let report_bnb = bnb_maximize(&quad, &Default::default()).unwrap();
    let l = *report_bnb.lower.last().unwrap();
    let u = *report_bnb.upper.last().unwrap();
    assert!(report_bnb.iterations <= 60);
    assert!(report_bnb.gap <= 0.05, "gap {} > 0.05", report_bnb.gap);

    let bounds = initial_box(&quad).unwrap();
    let step = 0.02;
    let axis: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            let k = ((bounds.upper[i] - bounds.lower[i]) / step).ceil() as usize + 1;
            (0..=k)
                .map(|t| (bounds.lower[i] + step * t as f64).min(bounds.upper[i]))
                .collect()
        })
        .collect();
    let mut grid_max = f64::NEG_INFINITY;
    for a in &axis[0] {
        for b in &axis[1] {
            for c in &axis[2] {
                for d in &axis[3] {
                    let p = DVector::from_vec(vec![*a, *b, *c, *d]);
                    if membership_p(&p, &quad, 0.0).0 {
                        grid_max = grid_max.max(f_minus_g(&p, &quad).unwrap());
                    }
                }
            }
        }
    }
    // the enclosure holds up to grid resolution: the incumbent is a true
    // feasible value and may exceed the coarse grid's maximum slightly
    assert!(grid_max <= u + 1e-6, "grid max {grid_max} above upper bound {u}");
    assert!(l <= grid_max + step, "incumbent {l} above grid max {grid_max} + step");
    report(
        "criterion 07 (tiny-instance enclosure)",
        &format!(
            "[L,U] = [{l:.5},{u:.5}] encloses 0.02-grid max {grid_max:.5} (gap {:.4} in {} iters)",
            report_bnb.gap, report_bnb.iterations
        ),
        t0.elapsed().as_secs_f64(),
        300.0,
    );
}

#[test]
fn criterion_08_fig3_reproduction() {
    let _g = serial();
    let t0 = Instant::now();
    let s = Scenario::builtin("paper-fig3").unwrap();
    let quad = s.quadratics().unwrap();
    let mut cfg = s.bnb_config();
    cfg.k_max = 40;
    cfg.gap_tol = 0.002;
    let rep = bnb_maximize(&quad, &cfg).unwrap();
    let by15 = rep
        .rows
        .iter()
        .find(|r| r.gap <= 0.005)
        .map(|r| r.iter)
        .expect("gap never reached 0.005");
    assert!(by15 <= 15, "gap 0.005 first reached at iteration {by15} > 15");
    assert!(
        rep.gap <= 0.002 && rep.iterations <= 40,
        "incumbent quality {} after {} iterations",
        rep.gap,
        rep.iterations
    );
    report(
        "criterion 08 (paper-fig3 convergence)",
        &format!(
            "gap <= 0.005 at iter {by15} (<= 15); final gap {:.4} <= 0.002 by iter {} (<= 40); rate {:.4}",
            rep.gap, rep.iterations, rep.best_rate
        ),
        t0.elapsed().as_secs_f64(),
        1800.0,
    );
}

#[test]
fn criterion_09_ccp_start_cdf() {
    let _g = serial();
    let t0 = Instant::now();
    let s = Scenario::builtin("paper-fig3").unwrap();
    let quad = s.quadratics().unwrap();
    let bounds = initial_box(&quad).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut finals = Vec::with_capacity(300);
    for _ in 0..300 {
        let q0 = rand_psd(quad.dim, 0.3 + 0.4 * rng.random::<f64>(), &mut rng);
        match ccp_maximize(&quad, &bounds, &q0, 0.002, 50, &s.subsolver).unwrap() {
            CcpOutcome::Infeasible => panic!("initial box reported infeasible"),
            CcpOutcome::Trace(t) => finals.push(*t.values.last().unwrap()),
        }
    }
    let best = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let in_band = finals.iter().filter(|&&v| v >= best - 0.05).count();
    let frac = in_band as f64 / finals.len() as f64;
    assert!(frac >= 0.95, "only {:.1}% of finals within the 0.05 band", 100.0 * frac);
    report(
        "criterion 09 (CCP start CDF)",
        &format!("300 starts, eps 0.002: {:.1}% within 0.05 of the best final {best:.5}", 100.0 * frac),
        t0.elapsed().as_secs_f64(),
        1800.0,
    );
}

#[test]
fn criterion_10_effective_power_bound_exactness() {
    let _g = serial();
    let t0 = Instant::now();
    let s = Scenario::builtin("paper-fig45").unwrap();
    let corr = s.correlation_set().unwrap();
    let (b1, _) = effective_power_bound(&corr, [2.0, 2.0], &[0.2]);
    assert_eq!(b1, [0.5, 0.2]);
    let (b2, _) = effective_power_bound(&corr, [2.0, 2.0], &[0.02]);
    assert_eq!(b2, [0.05, 0.02]);
    report(
        "criterion 10 (beta-bar exactness)",
        "effective_power_bound = (0.5, 0.2) and (0.05, 0.02) exactly",
        t0.elapsed().as_secs_f64(),
        1.0,
    );
}

#[test]
fn criterion_11_snr_sweep_spot_checks() {
    let _g = serial();
    let t0 = Instant::now();
    let mut s = Scenario::builtin("paper-fig45").unwrap();
    // lean search settings keep the spot checks well inside the budget
    s.bnb.k_max = 6;
    s.ccp.starts = 2;
    let cfg = s.bnb_config();

    // 20 dB (sigma2 = 0.02), gamma = 0.2
    let rate_02 = bnb_maximize(&s.quadratics_at(0.02).unwrap(), &cfg)
        .unwrap()
        .best_rate
        .max(0.0);
    assert!((rate_02 - 0.90).abs() <= 0.05, "20 dB gamma=0.2 rate {rate_02:.4}");

    // 20 dB, gamma = 0.02
    let mut tight = s.clone();
    tight.gamma = vec![0.02];
    let rate_002 = bnb_maximize(&tight.quadratics_at(0.02).unwrap(), &tight.bnb_config())
        .unwrap()
        .best_rate
        .max(0.0);
    assert!((rate_002 - 0.31).abs() <= 0.05, "20 dB gamma=0.02 rate {rate_002:.4}");

    // -5 dB: the proposed design and the Gaussian-signaling design coincide
    let sigma2 = s.sigma2_for_snr_db(-5.0);
    let quad_low = s.quadratics_at(sigma2).unwrap();
    let proposed = bnb_maximize(&quad_low, &cfg).unwrap().best_rate.max(0.0);
    let corr = s.correlation_set().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let design = gaussian_precoding(
        &corr,
        (s.antennas.n_t1, s.antennas.n_t2),
        s.beta,
        &s.gamma,
        sigma2,
        sigma2,
        s.baseline.samples,
        s.baseline.ccp_epsilon,
        &mut rng,
    )
    .unwrap();
    let gauss = secrecy_rate_of_covariances(&design.q1, &design.q2, &quad_low)
        .unwrap()
        .max(0.0);
    assert!(
        (proposed - gauss).abs() <= 0.02,
        "-5 dB: proposed {proposed:.4} vs gaussian {gauss:.4}"
    );
    report(
        "criterion 11 (SNR spot checks)",
        &format!(
            "20 dB rates {rate_02:.3} (target 0.90+-0.05) and {rate_002:.3} (target 0.31+-0.05); -5 dB |proposed-gaussian| = {:.4} <= 0.02",
            (proposed - gauss).abs()
        ),
        t0.elapsed().as_secs_f64(),
        7200.0,
    );
}

#[test]
fn criterion_12_modulation_ordering() {
    let _g = serial();
    let t0 = Instant::now();
    let mut s = Scenario::builtin("paper-fig6").unwrap();
    s.bnb.k_max = 6;
    s.ccp.starts = 2;
    let cfg = s.bnb_config();
    let mut detail = String::new();
    for snr_db in [0.0, 6.0, 13.0] {
        let sigma2 = s.sigma2_for_snr_db(snr_db);
        let bpsk = bnb_maximize(&s.quadratics_at(sigma2).unwrap(), &cfg)
            .unwrap()
            .best_rate
            .max(0.0);
        let mut qpsk_s = s.clone();
        qpsk_s.modulation.tx1 = ConstellationKind::Qpsk;
        qpsk_s.modulation.tx2 = ConstellationKind::Qpsk;
        let qpsk = bnb_maximize(&qpsk_s.quadratics_at(sigma2).unwrap(), &cfg)
            .unwrap()
            .best_rate
            .max(0.0);
        assert!(
            bpsk <= qpsk + 0.02,
            "{snr_db} dB: BPSK {bpsk:.4} above QPSK {qpsk:.4} + 0.02"
        );
        detail.push_str(&format!("{snr_db} dB: {bpsk:.3} <= {qpsk:.3}; "));
    }
    report(
        "criterion 12 (modulation ordering)",
        &format!("BPSK <= QPSK + 0.02 at every grid point ({detail})"),
        t0.elapsed().as_secs_f64(),
        7200.0,
    );
}

#[test]
fn criterion_13_determinism() {
    let _g = serial();
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_secrecy-precoding");
    let base = std::env::temp_dir().join(format!("acceptance-determinism-{}", std::process::id()));
    let mut outputs = Vec::new();
    for run in 0..2 {
        let dir = base.join(run.to_string());
        std::fs::create_dir_all(&dir).unwrap();
        let status = std::process::Command::new(bin)
            .args([
                "optimize",
                "--scenario",
                "paper-fig3",
                "--max-iters",
                "3",
                "--timing",
                "none",
                "--out-dir",
            ])
            .arg(&dir)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            std::fs::read(dir.join("bnb_trace.csv")).unwrap(),
            std::fs::read(dir.join("precoders.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "bnb_trace.csv differs between runs");
    assert_eq!(outputs[0].1, outputs[1].1, "precoders.json differs between runs");
    let _ = std::fs::remove_dir_all(&base);
    report(
        "criterion 13 (determinism)",
        "two optimize runs with the same seed produced byte-identical CSV and JSON",
        t0.elapsed().as_secs_f64(),
        300.0,
    );
}

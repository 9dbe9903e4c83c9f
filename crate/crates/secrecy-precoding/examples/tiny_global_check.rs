//! Certified global optimization on an instance small enough to verify by
//! brute force: one antenna per transmitter (four real precoder variables),
//! BPSK. The final [lower, upper] interval from the branch-and-bound run is
//! compared against a dense feasible grid of objective values.
//!
//! ```text
//! cargo run --example tiny_global_check
//! ```

use nalgebra::DVector;
use secrecy_precoding::channel::{exp_correlation, to_complex, CorrelationSet};
use secrecy_precoding::constellation::{
    difference_classes, enumerate_vectors, make_constellation, ConstellationKind,
};
use secrecy_precoding::lift::{
    build_quadratics, f_minus_g, initial_box, membership_p, DEFAULT_MATRIX_MEMORY_CAP,
};
use secrecy_precoding::optimizer::{bnb_maximize, BnbConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cm = |rho: f64, n: usize| Ok::<_, secrecy_precoding::Error>(to_complex(&exp_correlation(rho, n)?));
    let one = cm(0.0, 1)?;
    let corr = CorrelationSet::new(
        cm(0.3, 2)?,
        cm(0.6, 2)?,
        [one.clone(), one.clone()],
        [one.clone(), one.clone()],
        vec![cm(0.5, 2)?],
        vec![[one.clone(), one.clone()]],
    )?;
    let c = make_constellation(ConstellationKind::Bpsk);
    let en = enumerate_vectors(&c, &c, 1, 1, 4096)?;
    let classes = difference_classes(&en);
    let quad = build_quadratics(
        &corr,
        &en,
        &classes,
        [2.0, 2.0],
        vec![0.2],
        0.1,
        0.1,
        DEFAULT_MATRIX_MEMORY_CAP,
    )?;

    let mut cfg = BnbConfig::default();
    cfg.k_max = 30;
    cfg.gap_tol = 0.01;
    let report = bnb_maximize(&quad, &cfg)?;
    println!(
        "branch and bound: L = {:.6}, U = {:.6}, gap = {:.6} ({} iterations)",
        report.lower.last().unwrap(),
        report.upper.last().unwrap(),
        report.gap,
        report.iterations
    );

    // brute force over the initial box
    let bounds = initial_box(&quad)?;
    let steps = 25;
    let mut grid_max = 0.0f64;
    let axis: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            (0..steps)
                .map(|k| {
                    bounds.lower[i]
                        + (bounds.upper[i] - bounds.lower[i]) * k as f64 / (steps - 1) as f64
                })
                .collect()
        })
        .collect();
    for a in &axis[0] {
        for b in &axis[1] {
            for c in &axis[2] {
                for d in &axis[3] {
                    let p = DVector::from_vec(vec![*a, *b, *c, *d]);
                    if membership_p(&p, &quad, 0.0).0 {
                        grid_max = grid_max.max(f_minus_g(&p, &quad)?);
                    }
                }
            }
        }
    }
    println!("brute-force grid maximum ({steps}^4 points): {grid_max:.6}");
    let u = report.upper.last().unwrap();
    println!(
        "certificate: grid max <= U is {} (difference {:.2e})",
        if grid_max <= u + 1e-6 { "satisfied" } else { "VIOLATED" },
        grid_max - u
    );
    Ok(())
}

//! Sensitivity of the convex-concave procedure to its starting point:
//! run it from many random positive-semidefinite starts on the initial
//! relaxation and print the spread of final values.
//!
//! ```text
//! cargo run --example ccp_cdf
//! ```

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secrecy_precoding::lift::initial_box;
use secrecy_precoding::optimizer::{ccp_maximize, CcpOutcome};
use secrecy_precoding::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::builtin("paper-fig3")?;
    let quad = scenario.quadratics()?;
    let bounds = initial_box(&quad)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    let trials = 30;
    let mut finals = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = DMatrix::from_fn(quad.dim, quad.dim, |_, _| (rng.random::<f64>() - 0.5) * 0.4);
        let q0 = &m * m.transpose();
        match ccp_maximize(&quad, &bounds, &q0, 0.002, 50, &scenario.subsolver)? {
            CcpOutcome::Infeasible => unreachable!("initial relaxation is feasible"),
            CcpOutcome::Trace(t) => finals.push(*t.values.last().unwrap()),
        }
    }
    finals.sort_by(|a, b| a.partial_cmp(b).unwrap());

    println!("{} runs, epsilon = 0.002", trials);
    for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let idx = ((finals.len() - 1) as f64 * q).round() as usize;
        println!("  quantile {:>4.2}: {:.6}", q, finals[idx]);
    }
    println!("spread: {:.6}", finals.last().unwrap() - finals.first().unwrap());
    Ok(())
}

//! Closed-form mutual-information approximation vs the exact Monte-Carlo
//! estimator on random feasible precoders.
//!
//! ```text
//! cargo run --example mi_accuracy
//! ```

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secrecy_precoding::lift::{devectorize, Side};
use secrecy_precoding::mutual_info::{mi_approx, mi_exact_mc};
use secrecy_precoding::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::builtin("paper-fig3")?;
    let sigma2 = scenario.sigma2()?;
    let corr = scenario.correlation_set()?;
    let en = scenario.enumeration()?;
    let quad = scenario.quadratics()?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    println!("side          exact-MC      stderr    approx      |delta|");
    for trial in 0..5 {
        // scale a random direction inside the feasible set
        let raw = DVector::from_fn(quad.dim, |_, _| rng.random::<f64>() - 0.5);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            worst = worst.max((raw.transpose() * &quad.c[i] * &raw)[(0, 0)] / quad.beta[i]);
        }
        for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
            worst = worst.max((raw.transpose() * dj * &raw)[(0, 0)] / gj);
        }
        let p = &raw / (worst * (1.0 + trial as f64 * 0.5)).sqrt();
        let (p1, p2) = devectorize(&p, quad.shapes)?;

        for (side, name) in [(Side::Legitimate, "legitimate"), (Side::Eavesdropper, "eavesdrop ")] {
            let est = mi_exact_mc(&p1, &p2, &corr, side, sigma2, &en, 2000, 10, &mut rng)?;
            let approx = mi_approx(&p, &quad, side, sigma2)?;
            println!(
                "{name}   {:>10.5}  {:>9.5}  {:>9.5}  {:>9.5}",
                est.value,
                est.std_error,
                approx,
                (approx - est.value).abs()
            );
        }
    }
    Ok(())
}

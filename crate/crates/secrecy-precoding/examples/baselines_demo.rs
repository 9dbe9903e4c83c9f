//! Comparison designs on the built-in QPSK scenario: the effective power
//! bound, the scaled-identity scheme, and the Gaussian-signaling design
//! scored on the finite alphabet.
//!
//! ```text
//! cargo run --example baselines_demo
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secrecy_precoding::baselines::{effective_power_bound, gaussian_precoding, no_precoding};
use secrecy_precoding::lift::{f_minus_g, vectorize};
use secrecy_precoding::mutual_info::secrecy_rate_of_covariances;
use secrecy_precoding::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::builtin("paper-fig45")?;
    let sigma2 = scenario.sigma2()?;
    let corr = scenario.correlation_set()?;
    let shapes = (scenario.antennas.n_t1, scenario.antennas.n_t2);
    let quad = scenario.quadratics()?;

    let (bbar, vacuous) = effective_power_bound(&corr, scenario.beta, &scenario.gamma);
    println!("effective power bounds: beta_bar = {:?} (vacuous: {:?})", bbar, vacuous);

    let (p1, p2) = no_precoding(&corr, shapes, scenario.beta, &scenario.gamma);
    let rate = f_minus_g(&vectorize(&p1, &p2), &quad)?.max(0.0);
    println!("no precoding:       {:.6} bits", rate);

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let design = gaussian_precoding(
        &corr,
        shapes,
        scenario.beta,
        &scenario.gamma,
        sigma2,
        sigma2,
        100, // channel draws in the sample average
        1e-3,
        &mut rng,
    )?;
    let scored = secrecy_rate_of_covariances(&design.q1, &design.q2, &quad)?.max(0.0);
    println!(
        "gaussian design:    {:.6} bits on the finite alphabet ({} outer iterations,",
        scored,
        design.trace.len()
    );
    println!(
        "                    {:.6} bits as its own log-det objective)",
        design.trace.last().unwrap()
    );
    Ok(())
}

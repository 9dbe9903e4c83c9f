//! Secrecy sum rate over an SNR grid: the proposed finite-alphabet design
//! against the Gaussian-signaling and no-precoding baselines (both scored
//! on the actual constellation).
//!
//! ```text
//! cargo run --example snr_sweep
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secrecy_precoding::baselines::{gaussian_precoding, no_precoding};
use secrecy_precoding::lift::{f_minus_g, vectorize};
use secrecy_precoding::mutual_info::secrecy_rate_of_covariances;
use secrecy_precoding::optimizer::bnb_maximize;
use secrecy_precoding::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut scenario = Scenario::builtin("paper-fig45")?;
    // keep the run short: a coarse grid and a lean search
    scenario.bnb.k_max = 4;
    scenario.ccp.starts = 2;
    let shapes = (scenario.antennas.n_t1, scenario.antennas.n_t2);
    let corr = scenario.correlation_set()?;

    println!("snr_db  proposed  gaussian      none");
    for snr_db in [-5.0, 5.0, 15.0] {
        let sigma2 = scenario.sigma2_for_snr_db(snr_db);
        let quad = scenario.quadratics_at(sigma2)?;

        let proposed = bnb_maximize(&quad, &scenario.bnb_config())?.best_rate.max(0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        let design = gaussian_precoding(
            &corr,
            shapes,
            scenario.beta,
            &scenario.gamma,
            sigma2,
            sigma2,
            60,
            1e-3,
            &mut rng,
        )?;
        let gaussian = secrecy_rate_of_covariances(&design.q1, &design.q2, &quad)?.max(0.0);

        let (p1, p2) = no_precoding(&corr, shapes, scenario.beta, &scenario.gamma);
        let none = f_minus_g(&vectorize(&p1, &p2), &quad)?.max(0.0);

        println!("{snr_db:>6}  {proposed:>8.4}  {gaussian:>8.4}  {none:>8.4}");
    }
    Ok(())
}

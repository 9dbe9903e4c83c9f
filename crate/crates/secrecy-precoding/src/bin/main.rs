//! Batch front-end: scenario ingestion, experiment orchestration, CSV
//! persistence, and an invariant validation suite.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use secrecy_precoding::baselines::{effective_power_bound, gaussian_precoding, no_precoding};
use secrecy_precoding::channel::{
    complex_gaussian_noise, interference_closed_form, sample_channel, CMatrix,
};
use secrecy_precoding::lift::{
    big_f, big_g, f_minus_g, grad_f, initial_box, lse_value_grad_hess, membership_c,
    membership_p, surrogate_value, vectorize, LiftedPoint, Side,
};
use secrecy_precoding::mutual_info::{mi_approx, mi_exact_mc, secrecy_rate_of_covariances};
use secrecy_precoding::optimizer::{bnb_maximize, ccp_maximize, CcpOutcome};
use secrecy_precoding::{Error, Scenario};

#[derive(Parser)]
#[command(name = "secrecy-precoding", version, about = "Secrecy precoder design for the two-transmitter cognitive multiple-access wiretap channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Built-in scenario name (paper-fig3, paper-fig45, paper-fig6) or a
    /// path to a JSON scenario file.
    #[arg(long, short = 's')]
    scenario: String,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario noise variance.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Override the interference thresholds (comma-separated).
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, Error> {
        let mut s = if self.scenario.starts_with("paper-") {
            Scenario::builtin(&self.scenario)?
        } else {
            Scenario::load(std::path::Path::new(&self.scenario))?
        };
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(sigma2) = self.sigma2 {
            if sigma2 <= 0.0 {
                return Err(Error::Config("sigma2 must be positive".into()));
            }
            s.sigma2 = Some(sigma2);
        }
        if let Some(gamma) = &self.gamma {
            if gamma.len() != s.gamma.len() {
                return Err(Error::Config(format!(
                    "gamma override has {} entries, scenario needs {}",
                    gamma.len(),
                    s.gamma.len()
                )));
            }
            if gamma.iter().any(|&g| g <= 0.0) {
                return Err(Error::Config("gamma entries must be positive".into()));
            }
            s.gamma = gamma.clone();
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Timing {
    /// Report elapsed wall-clock milliseconds per iteration.
    Wall,
    /// Write zero timings so repeated runs are byte-identical.
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Proposed,
    Gaussian,
    None,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Gaussian => "gaussian",
            Method::None => "none",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the global secrecy-rate maximization and persist the bound
    /// ledger and the best precoders.
    Optimize {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the iteration cap.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Override the bound-gap stopping tolerance.
        #[arg(long)]
        gap_tol: Option<f64>,
        /// Output directory for bnb_trace.csv and precoders.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Timing::Wall)]
        timing: Timing,
    },
    /// Evaluate methods over an SNR grid; one CSV row per point and method.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Grid start:step:stop in dB, inclusive.
        #[arg(long)]
        snr_db: String,
        /// Comma-separated subset of proposed,gaussian,none.
        #[arg(long, value_delimiter = ',', default_values_t = vec![Method::Proposed, Method::Gaussian, Method::None], value_enum)]
        methods: Vec<Method>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Run the convex-concave procedure from random starts on the initial
    /// relaxation and write the sorted final values.
    CdfInit {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Convergence tolerance of each run.
        #[arg(long, default_value_t = 0.002)]
        epsilon: f64,
        #[arg(long, default_value = "cdf_init.csv")]
        out: PathBuf,
    },
    /// Report exact Monte-Carlo and approximated mutual information for a
    /// precoder pair on both links.
    Mi {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// JSON file with p1/p2 re/im arrays; defaults to the scaled
        /// identity design.
        #[arg(long)]
        precoder: Option<PathBuf>,
        /// Channel draws for the Monte-Carlo estimate.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Evaluate the comparison designs and the effective power bound.
    Baseline {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run the cross-module invariant suite on built-in scenarios.
    Validate {
        /// Override the suite seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixJson {
    fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson {
            re: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    fn to_matrix(&self, field: &str) -> Result<CMatrix, Error> {
        let rows = self.re.len();
        if rows == 0
            || self.im.len() != rows
            || self
                .re
                .iter()
                .chain(self.im.iter())
                .any(|r| r.len() != self.re[0].len())
        {
            return Err(Error::Config(format!(
                "{field}: re and im must be equal-shaped non-empty arrays"
            )));
        }
        let cols = self.re[0].len();
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            num_complex::Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

#[derive(Serialize, Deserialize)]
struct PrecoderFile {
    p1: MatrixJson,
    p2: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Parse an inclusive `start:step:stop` grid.
fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "snr_db grid '{text}' must be start:step:stop"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("snr_db grid entry '{p}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    let (start, step, stop) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 {
        return Err(Error::Config("snr_db step must be positive".into()));
    }
    if stop < start {
        return Err(Error::Config("snr_db stop must be >= start".into()));
    }
    let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

fn run_optimize(
    scenario: &ScenarioArgs,
    max_iters: Option<usize>,
    gap_tol: Option<f64>,
    out_dir: &PathBuf,
    timing: Timing,
) -> Result<(), Error> {
    let mut s = scenario.load()?;
    if let Some(k) = max_iters {
        if k == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        s.bnb.k_max = k;
    }
    if let Some(g) = gap_tol {
        if g <= 0.0 {
            return Err(Error::Config("gap_tol must be positive".into()));
        }
        s.bnb.gap_tol = g;
    }
    let quad = s.quadratics()?;
    let report = bnb_maximize(&quad, &s.bnb_config())?;

    let mut csv = String::from("iter,U,L,gap,boxes_open,wall_ms\n");
    for r in &report.rows {
        let wall = match timing {
            Timing::Wall => r.wall_ms,
            Timing::None => 0,
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iter, r.upper, r.lower, r.gap, r.boxes_open, wall
        ));
    }
    write_file(&out_dir.join("bnb_trace.csv"), csv.as_bytes())?;

    let out = PrecoderFile {
        p1: MatrixJson::from_matrix(&report.best_precoders.0),
        p2: MatrixJson::from_matrix(&report.best_precoders.1),
        rate_bits: Some(report.best_rate.max(0.0)),
        gap: Some(report.gap),
        iterations: Some(report.iterations),
    };
    let json = serde_json::to_string_pretty(&out)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    write_file(&out_dir.join("precoders.json"), json.as_bytes())?;
    println!(
        "rate_bits={} gap={} iterations={}",
        report.best_rate.max(0.0),
        report.gap,
        report.iterations
    );
    Ok(())
}

fn sweep_point(s: &Scenario, snr_db: f64, method: Method, seed: u64) -> Result<f64, Error> {
    let sigma2 = s.sigma2_for_snr_db(snr_db);
    let quad = s.quadratics_at(sigma2)?;
    let rate = match method {
        Method::Proposed => {
            let mut cfg = s.bnb_config();
            cfg.seed = seed;
            bnb_maximize(&quad, &cfg)?.best_rate
        }
        Method::Gaussian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let corr = s.correlation_set()?;
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
            )?;
            secrecy_rate_of_covariances(&design.q1, &design.q2, &quad)?
        }
        Method::None => {
            let corr = s.correlation_set()?;
            let (p1, p2) = no_precoding(&corr, (s.antennas.n_t1, s.antennas.n_t2), s.beta, &s.gamma);
            let p = vectorize(&p1, &p2);
            f_minus_g(&p, &quad)?
        }
    };
    Ok(rate.max(0.0))
}

fn run_sweep(
    scenario: &ScenarioArgs,
    snr_db: &str,
    methods: &[Method],
    out: &PathBuf,
) -> Result<(), Error> {
    let s = scenario.load()?;
    let grid = parse_grid(snr_db)?;
    if methods.is_empty() {
        return Err(Error::Config("methods must not be empty".into()));
    }
    let mut jobs: Vec<(usize, f64, Method)> = Vec::new();
    for (i, &snr) in grid.iter().enumerate() {
        for &m in methods {
            jobs.push((i, snr, m));
        }
    }
    let workers: usize = std::env::var("SECRECY_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1);

    let run = |&(i, snr, m): &(usize, f64, Method)| -> Result<(f64, Method, f64), Error> {
        // per-point derived seed keeps rows independent of scheduling
        let seed = s
            .seed
            .wrapping_add(1_000_003u64.wrapping_mul(i as u64))
            .wrapping_add(m.name().len() as u64);
        Ok((snr, m, sweep_point(&s, snr, m, seed)?))
    };

    let mut rows: Vec<(f64, Method, f64)> = if workers <= 1 {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    } else {
        let mut out: Vec<Option<Result<(f64, Method, f64), Error>>> = Vec::new();
        out.resize_with(jobs.len(), || None);
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut out);
        std::thread::scope(|scope| {
            for _ in 0..workers.min(jobs.len()) {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if k >= jobs.len() {
                        break;
                    }
                    let r = run(&jobs[k]);
                    slots.lock().unwrap()[k] = Some(r);
                });
            }
        });
        out.into_iter()
            .map(|r| r.expect("all jobs completed"))
            .collect::<Result<_, _>>()?
    };

    // sorted rows make file bytes independent of worker interleaving
    rows.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.name().cmp(b.1.name()))
    });
    let mut csv = String::from("snr_db,method,rate_bits\n");
    for (snr, m, rate) in &rows {
        csv.push_str(&format!("{},{},{}\n", snr, m.name(), rate));
    }
    write_file(out, csv.as_bytes())?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn run_cdf_init(
    scenario: &ScenarioArgs,
    trials: usize,
    epsilon: f64,
    out: &PathBuf,
) -> Result<(), Error> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let s = scenario.load()?;
    let quad = s.quadratics()?;
    let bounds = initial_box(&quad)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let n = quad.dim;
    let mut finals = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = DMatrix::from_fn(n, n, |_, _| {
            use rand::Rng;
            (rng.random::<f64>() - 0.5) * 0.4
        });
        let q0 = &m * m.transpose();
        match ccp_maximize(&quad, &bounds, &q0, epsilon, s.ccp.max_iterations, &s.subsolver)? {
            CcpOutcome::Infeasible => {
                return Err(Error::Solver("initial relaxation is infeasible".into()))
            }
            CcpOutcome::Trace(t) => finals.push(*t.values.last().unwrap()),
        }
    }
    finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut csv = String::from("rank,final_value\n");
    for (i, v) in finals.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, v));
    }
    write_file(out, csv.as_bytes())?;
    println!(
        "wrote {} sorted finals to {} (min={}, max={})",
        finals.len(),
        out.display(),
        finals.first().unwrap(),
        finals.last().unwrap()
    );
    Ok(())
}

fn run_mi(
    scenario: &ScenarioArgs,
    precoder: Option<&PathBuf>,
    samples: Option<usize>,
) -> Result<(), Error> {
    let s = scenario.load()?;
    let sigma2 = s.sigma2()?;
    let corr = s.correlation_set()?;
    let (p1, p2) = match precoder {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: PrecoderFile =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            let p1 = file.p1.to_matrix("p1")?;
            let p2 = file.p2.to_matrix("p2")?;
            if p1.nrows() != s.antennas.n_t1 || p2.nrows() != s.antennas.n_t2 {
                return Err(Error::Config(
                    "precoder dimensions do not match scenario antennas".into(),
                ));
            }
            (p1, p2)
        }
        None => no_precoding(&corr, (s.antennas.n_t1, s.antennas.n_t2), s.beta, &s.gamma),
    };
    let en = s.enumeration()?;
    let quad = s.quadratics()?;
    let p = vectorize(&p1, &p2);
    let n_channel = samples.unwrap_or(s.mc.channel_samples);

    let mut report = Vec::new();
    for (side, label) in [(Side::Legitimate, "legitimate"), (Side::Eavesdropper, "eavesdropper")] {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ (label.len() as u64));
        let est = mi_exact_mc(
            &p1,
            &p2,
            &corr,
            side,
            sigma2,
            &en,
            n_channel,
            s.mc.noise_samples,
            &mut rng,
        )?;
        let approx = mi_approx(&p, &quad, side, sigma2)?;
        println!(
            "{label}: exact_mc={:.6} +- {:.6}  approx={:.6}  delta={:.6}",
            est.value,
            est.std_error,
            approx,
            approx - est.value
        );
        report.push((est.value, approx));
    }
    println!(
        "secrecy: exact_mc={:.6}  approx={:.6}",
        report[0].0 - report[1].0,
        report[0].1 - report[1].1
    );
    Ok(())
}

fn run_baseline(scenario: &ScenarioArgs) -> Result<(), Error> {
    let s = scenario.load()?;
    let sigma2 = s.sigma2()?;
    let corr = s.correlation_set()?;
    let shapes = (s.antennas.n_t1, s.antennas.n_t2);
    let quad = s.quadratics()?;

    let (bounds, vacuous) = effective_power_bound(&corr, s.beta, &s.gamma);
    println!(
        "effective_power_bound: beta_bar=({}, {}) vacuous=({}, {})",
        bounds[0], bounds[1], vacuous[0], vacuous[1]
    );

    let (p1, p2) = no_precoding(&corr, shapes, s.beta, &s.gamma);
    let p = vectorize(&p1, &p2);
    let none_rate = f_minus_g(&p, &quad)?.max(0.0);
    println!("no_precoding: rate_bits={none_rate}");

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let design = gaussian_precoding(
        &corr,
        shapes,
        s.beta,
        &s.gamma,
        sigma2,
        sigma2,
        s.baseline.samples,
        s.baseline.ccp_epsilon,
        &mut rng,
    )?;
    let scored = secrecy_rate_of_covariances(&design.q1, &design.q2, &quad)?.max(0.0);
    println!(
        "gaussian_precoding: objective_bits={} finite_alphabet_rate_bits={} outer_iterations={}",
        design.trace.last().unwrap(),
        scored,
        design.trace.len()
    );
    Ok(())
}

fn check(name: &str, ok: bool, failures: &mut usize) {
    if ok {
        println!("ok   {name}");
    } else {
        println!("FAIL {name}");
        *failures += 1;
    }
}

fn run_validate(seed: Option<u64>) -> Result<(), Error> {
    let seed = seed.unwrap_or(0);
    let mut failures = 0usize;
    let s = Scenario::builtin("paper-fig3")?;
    let quad = s.quadratics()?;
    let corr = s.correlation_set()?;
    let n = quad.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_p = |rng: &mut ChaCha8Rng, scale: f64| {
        use rand::Rng;
        DVector::from_fn(n, |_, _| (rng.random::<f64>() - 0.5) * 2.0 * scale)
    };

    // trivial zero point
    let zero = DVector::zeros(n);
    check(
        "zero precoder has zero secrecy rate",
        f_minus_g(&zero, &quad).map(|v| v.abs() < 1e-12).unwrap_or(false),
        &mut failures,
    );

    // gradient of the eavesdropper log-term vs central differences
    let mut grad_ok = true;
    for _ in 0..3 {
        let p = rand_p(&mut rng, 0.3);
        let q = &p * p.transpose();
        let g = grad_f(&q, &quad)?;
        let h = 1e-5;
        for probe in 0..4 {
            let (mut i, mut j) = ((probe * 5) % n, (probe * 7) % n);
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[(i, j)] += h;
            qp[(j, i)] = qp[(i, j)];
            qm[(i, j)] -= h;
            qm[(j, i)] = qm[(i, j)];
            let fp = big_f(&qp, &quad)?;
            let fm = big_f(&qm, &quad)?;
            let fd = (fp - fm) / (2.0 * h) * if i == j { 1.0 } else { 0.5 };
            let analytic = g[(i, j)];
            if (fd - analytic).abs() > 1e-4 * analytic.abs().max(1.0) {
                grad_ok = false;
            }
        }
    }
    check("log-term gradient matches finite differences", grad_ok, &mut failures);

    // midpoint convexity and surrogate tangency/bound
    let mut convex_ok = true;
    let mut surrogate_ok = true;
    for _ in 0..20 {
        let pa = rand_p(&mut rng, 0.3);
        let pb = rand_p(&mut rng, 0.3);
        let qa = &pa * pa.transpose();
        let qb = &pb * pb.transpose();
        let qm = (&qa + &qb) * 0.5;
        let fa = big_f(&qa, &quad)?;
        let fb = big_f(&qb, &quad)?;
        if big_f(&qm, &quad)? > 0.5 * (fa + fb) + 1e-9 {
            convex_ok = false;
        }
        let sv = surrogate_value(&qa, &qb, &quad)?;
        let exact = fa - big_g(&qa, &quad)?;
        if sv > exact + 1e-9 {
            surrogate_ok = false;
        }
        let tangent = surrogate_value(&qa, &qa, &quad)?;
        if (tangent - exact).abs() > 1e-9 {
            surrogate_ok = false;
        }
    }
    check("lifted objective parts are midpoint convex", convex_ok, &mut failures);
    check("surrogate is a tangent lower bound", surrogate_ok, &mut failures);

    // covering property: feasible lifted points belong to C(B_init)
    let bounds = initial_box(&quad)?;
    let mut cover_ok = true;
    for trial in 0..10 {
        // scale a random direction into the feasible set
        let raw = rand_p(&mut rng, 1.0);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            worst = worst.max((raw.transpose() * &quad.c[i] * &raw)[(0, 0)] / quad.beta[i]);
        }
        for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
            worst = worst.max((raw.transpose() * dj * &raw)[(0, 0)] / gj);
        }
        let p = &raw / (worst * (1.0 + trial as f64 * 0.3)).sqrt().max(1e-12);
        if !membership_p(&p, &quad, 1e-9).0 {
            cover_ok = false;
        }
        if !bounds.contains(&p, 1e-9) {
            cover_ok = false;
        }
        let q = &p * p.transpose();
        let point = LiftedPoint { q, p };
        if !membership_c(&point, &bounds, &quad, 1e-7).is_member {
            cover_ok = false;
        }
    }
    check(
        "feasible lifted points belong to the initial relaxed set",
        cover_ok,
        &mut failures,
    );

    // interference closed form vs Monte Carlo on the tiny scenario
    let mut mc_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
    let p1 = CMatrix::identity(2, 2).scale(0.4);
    let p2 = CMatrix::identity(2, 2).scale(0.3);
    let exact = interference_closed_form(&p1, &p2, &corr.phi_f[0], &corr.psi_f[0][0], &corr.psi_f[0][1]);
    let mut acc = 0.0;
    let draws = 4000;
    for _ in 0..draws {
        let d = sample_channel(&corr, &mut mc_rng);
        let v1 = &d.f[0][0] * &p1;
        let v2 = &d.f[0][1] * &p2;
        acc += v1.iter().map(|z| z.norm_sqr()).sum::<f64>()
            + v2.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    let mc = acc / draws as f64;
    check(
        "interference closed form matches Monte Carlo (2%)",
        (mc - exact).abs() <= 0.02 * exact.abs().max(1e-12),
        &mut failures,
    );

    // convexity machinery self-consistency: value/grad from the shared path
    let p = rand_p(&mut rng, 0.2);
    let q = &p * p.transpose();
    let x = quad.sym.svec(&q);
    let direct = big_f(&q, &quad)?;
    let consistent = lse_value_grad_hess(&quad, Side::Eavesdropper, &x, false)
        .map(|(v, _, _)| (v - direct).abs() < 1e-9)
        .unwrap_or(false);
    check("log-sum value agrees across evaluation paths", consistent, &mut failures);

    // CCP monotonicity on the tiny built-in
    let mut ccp_ok = true;
    for trial in 0..2 {
        let m = DMatrix::from_fn(n, n, |_, _| {
            use rand::Rng;
            (rng.random::<f64>() - 0.5) * 0.2
        });
        let q0 = &m * m.transpose() * (0.5 + 0.5 * trial as f64);
        match ccp_maximize(&quad, &bounds, &q0, 0.01, 10, &s.subsolver)? {
            CcpOutcome::Infeasible => ccp_ok = false,
            CcpOutcome::Trace(t) => {
                for w in t.values.windows(2) {
                    if w[1] < w[0] - 1e-7 {
                        ccp_ok = false;
                    }
                }
            }
        }
    }
    check("convex-concave traces are monotone", ccp_ok, &mut failures);

    // noise sampler variance sanity
    let mut nz = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
    let mut var = 0.0;
    let nsamp = 2000;
    for _ in 0..nsamp {
        let v = complex_gaussian_noise(2, 0.1, &mut nz);
        var += v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    var /= (nsamp * 2) as f64;
    check("noise sampler matches requested variance (5%)", (var - 0.1).abs() < 0.005, &mut failures);

    if failures == 0 {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Error::Solver(format!("{failures} validation checks failed")))
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Optimize {
            scenario,
            max_iters,
            gap_tol,
            out_dir,
            timing,
        } => run_optimize(scenario, *max_iters, *gap_tol, out_dir, *timing),
        Command::Sweep {
            scenario,
            snr_db,
            methods,
            out,
        } => run_sweep(scenario, snr_db, methods, out),
        Command::CdfInit {
            scenario,
            trials,
            epsilon,
            out,
        } => run_cdf_init(scenario, *trials, *epsilon, out),
        Command::Mi {
            scenario,
            precoder,
            samples,
        } => run_mi(scenario, precoder.as_ref(), *samples),
        Command::Baseline { scenario } => run_baseline(scenario),
        Command::Validate { seed } => run_validate(*seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match &e {
                Error::Config(_) => "config",
                Error::Io(_) => "io",
                _ => "solver",
            };
            let record = serde_json::json!({ "error": { "kind": kind, "message": e.to_string() } });
            eprintln!("{record}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

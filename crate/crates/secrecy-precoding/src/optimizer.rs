//! Two-layer global maximization of the approximated secrecy sum rate: a
//! convex-concave procedure per box-indexed convex node set, wrapped in a
//! rectangle-splitting outer approximation with an upper/lower bound ledger,
//! plus Gaussian randomization to extract feasible precoder vectors.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;

use crate::channel::CMatrix;
use crate::lift::{
    devectorize, f_minus_g, initial_box, BoxBounds, LiftedPoint, LiftedQuadratics,
};
use crate::subsolver::{solve_concave_subproblem, SolveStatus, SubsolverConfig};
use crate::{Error, Result};

/// Convex-concave procedure knobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CcpConfig {
    /// Stop when successive surrogate optima differ by at most this.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Linearization starts per node; the best final value is the bound.
    pub starts: usize,
}

impl Default for CcpConfig {
    fn default() -> Self {
        CcpConfig {
            epsilon: 0.002,
            max_iterations: 50,
            starts: 3,
        }
    }
}

/// Outer-approximation knobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BnbConfig {
    pub k_max: usize,
    pub gap_tol: f64,
    pub randomization_draws: usize,
    pub seed: u64,
    pub ccp: CcpConfig,
    pub subsolver: SubsolverConfig,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            k_max: 60,
            gap_tol: 0.002,
            randomization_draws: 100,
            seed: 0,
            ccp: CcpConfig::default(),
            subsolver: SubsolverConfig::default(),
        }
    }
}

/// One convex-concave run: the surrogate optima sequence and final point.
#[derive(Debug, Clone)]
pub struct CcpTrace {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_point: LiftedPoint,
}

/// A node set may turn out empty.
#[derive(Debug, Clone)]
pub enum CcpOutcome {
    Infeasible,
    Trace(CcpTrace),
}

/// Iterate surrogate maximizations over C(B), linearizing at the previous
/// optimum, until the value stalls.
pub fn ccp_maximize(
    quad: &LiftedQuadratics,
    bounds: &BoxBounds,
    q0: &DMatrix<f64>,
    epsilon: f64,
    max_iterations: usize,
    sub_cfg: &SubsolverConfig,
) -> Result<CcpOutcome> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidParameter("ccp epsilon must be positive".into()));
    }
    let mut qc = q0.clone();
    let mut values = Vec::new();
    let mut converged = false;
    let mut final_point: Option<LiftedPoint> = None;
    for _ in 0..max_iterations.max(1) {
        let out = solve_concave_subproblem(quad, bounds, &qc, sub_cfg)?;
        match out.status {
            SolveStatus::Infeasible => {
                return if values.is_empty() {
                    Ok(CcpOutcome::Infeasible)
                } else {
                    unreachable!("feasibility of C(B) does not depend on the linearization point")
                };
            }
            SolveStatus::MaxIterations => {
                // keep the best iterate, mark the trace unconverged
                if final_point.is_none() || out.value > *values.last().unwrap() {
                    values.push(out.value);
                    final_point = Some(out.point);
                }
                break;
            }
            SolveStatus::Optimal => {}
        }
        let done = values
            .last()
            .is_some_and(|&prev| (out.value - prev).abs() <= epsilon);
        values.push(out.value);
        qc = out.point.q.clone();
        final_point = Some(out.point);
        if done {
            converged = true;
            break;
        }
    }
    let final_point = final_point.expect("at least one subproblem solved");
    Ok(CcpOutcome::Trace(CcpTrace {
        iterations: values.len(),
        values,
        converged,
        final_point,
    }))
}

/// Split a box at the midpoint of its longest edge (lowest index on ties).
pub fn branch(bounds: &BoxBounds) -> Result<(BoxBounds, BoxBounds)> {
    let widths = bounds.widths();
    let mut best = 0usize;
    for i in 1..bounds.dim() {
        if widths[i] > widths[best] {
            best = i;
        }
    }
    if widths[best] <= 0.0 {
        return Err(Error::InvalidParameter(
            "cannot branch a zero-width box".into(),
        ));
    }
    let mid = 0.5 * (bounds.lower[best] + bounds.upper[best]);
    let mut left = bounds.clone();
    let mut right = bounds.clone();
    left.upper[best] = mid;
    right.lower[best] = mid;
    Ok((left, right))
}

/// Draw candidates from N(0, Qopt), rescale each onto the feasible set and
/// return the best by f - g.
pub fn gaussian_randomize<R: Rng + ?Sized>(
    qopt: &DMatrix<f64>,
    quad: &LiftedQuadratics,
    draws: usize,
    rng: &mut R,
) -> Result<(DVector<f64>, f64)> {
    if draws == 0 {
        return Err(Error::InvalidParameter("need at least one draw".into()));
    }
    let n = qopt.nrows();
    let sym = (qopt + qopt.transpose()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let min_eig = eig.eigenvalues.min();
    if min_eig < -1e-6 {
        return Err(Error::NotPsd(min_eig));
    }
    // factor so that factor * z, z ~ N(0, I), has covariance Qopt
    let mut factor = eig.eigenvectors.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        factor.column_mut(j).scale_mut(s);
    }

    let mut constraints: Vec<(&DMatrix<f64>, f64)> = vec![
        (&quad.c[0], quad.beta[0]),
        (&quad.c[1], quad.beta[1]),
    ];
    for (d, &g) in quad.d.iter().zip(&quad.gamma) {
        constraints.push((d, g));
    }

    let mut best_p = DVector::zeros(n);
    let mut best_value = 0.0; // p = 0 is always feasible with rate 0
    for _ in 0..draws {
        let z = DVector::from_fn(n, |_, _| {
            let v: f64 = StandardNormal.sample(rng);
            v
        });
        let xi = &factor * z;
        let mut ratio: f64 = 0.0;
        for &(m, budget) in &constraints {
            if budget <= 0.0 {
                ratio = f64::INFINITY;
                break;
            }
            let q = (xi.transpose() * m * &xi)[(0, 0)];
            ratio = ratio.max(q / budget);
        }
        if !ratio.is_finite() {
            continue;
        }
        if ratio <= 0.0 {
            // a zero draw adds nothing over the p = 0 incumbent
            continue;
        }
        // the objective is not monotone along the ray, so search the
        // amplitude from the origin to the feasible boundary
        let bound = (1.0 - 1e-12) / ratio.sqrt();
        let coarse = 32usize;
        let mut best_t = 0.0;
        let mut best_v = 0.0;
        for k in 1..=coarse {
            let t = bound * k as f64 / coarse as f64;
            let v = f_minus_g(&xi.scale(t), quad)?;
            if v > best_v {
                best_v = v;
                best_t = t;
            }
        }
        // golden-section polish around the best coarse amplitude
        let cell = bound / coarse as f64;
        let (mut lo, mut hi) = ((best_t - cell).max(0.0), (best_t + cell).min(bound));
        let phi = 0.618_033_988_749_894_9;
        let mut t1 = hi - phi * (hi - lo);
        let mut t2 = lo + phi * (hi - lo);
        let mut v1 = f_minus_g(&xi.scale(t1), quad)?;
        let mut v2 = f_minus_g(&xi.scale(t2), quad)?;
        for _ in 0..40 {
            if v1 >= v2 {
                hi = t2;
                t2 = t1;
                v2 = v1;
                t1 = hi - phi * (hi - lo);
                v1 = f_minus_g(&xi.scale(t1), quad)?;
            } else {
                lo = t1;
                t1 = t2;
                v1 = v2;
                t2 = lo + phi * (hi - lo);
                v2 = f_minus_g(&xi.scale(t2), quad)?;
            }
        }
        let (t, v) = if v1 >= v2 { (t1, v1) } else { (t2, v2) };
        let (t, v) = if v >= best_v { (t, v) } else { (best_t, best_v) };
        if v > best_value {
            best_value = v;
            best_p = xi.scale(t);
        }
    }
    Ok((best_p, best_value))
}

/// Outer-approximation node.
#[derive(Debug, Clone)]
pub struct BnbNode {
    pub id: u64,
    pub bounds: BoxBounds,
    /// CCP-converged approximate upper bound of f - g over C(B).
    pub bound: f64,
    pub qopt: DMatrix<f64>,
}

/// One ledger row, matching the trace CSV.
#[derive(Debug, Clone)]
pub struct IterationRow {
    pub iter: usize,
    pub upper: f64,
    pub lower: f64,
    pub gap: f64,
    pub boxes_open: usize,
    pub wall_ms: u64,
}

#[derive(Debug, Clone)]
pub struct BnbReport {
    pub rows: Vec<IterationRow>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub best_p: DVector<f64>,
    pub best_precoders: (CMatrix, CMatrix),
    pub best_rate: f64,
    pub iterations: usize,
    pub gap: f64,
}

fn node_rng(seed: u64, node_id: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&node_id.to_le_bytes());
    key[16] = 0x6f; // domain tag
    ChaCha8Rng::from_seed(key)
}

/// Multi-start CCP bound for one box: starts at delta*I, at the box-center
/// rank-one matrix, and at per-node random PSD seeds.
fn node_bound(
    quad: &LiftedQuadratics,
    bounds: &BoxBounds,
    cfg: &BnbConfig,
    node_id: u64,
) -> Result<Option<(f64, LiftedPoint, Vec<CcpTrace>)>> {
    let n = quad.dim;
    let mut rng = node_rng(cfg.seed, node_id);
    let mut starts: Vec<DMatrix<f64>> = Vec::with_capacity(cfg.ccp.starts.max(1));
    starts.push(DMatrix::identity(n, n).scale(0.01));
    if cfg.ccp.starts >= 2 {
        let c = bounds.center();
        starts.push(&c * c.transpose() + DMatrix::identity(n, n).scale(0.01));
    }
    while starts.len() < cfg.ccp.starts {
        let m = DMatrix::from_fn(n, n, |_, _| {
            let v: f64 = StandardNormal.sample(&mut rng);
            v * 0.1
        });
        starts.push(&m * m.transpose());
    }

    let mut best: Option<(f64, LiftedPoint)> = None;
    let mut traces = Vec::new();
    for q0 in &starts {
        match ccp_maximize(
            quad,
            bounds,
            q0,
            cfg.ccp.epsilon,
            cfg.ccp.max_iterations,
            &cfg.subsolver,
        )? {
            CcpOutcome::Infeasible => return Ok(None),
            CcpOutcome::Trace(trace) => {
                let v = *trace.values.last().unwrap();
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, trace.final_point.clone()));
                }
                traces.push(trace);
            }
        }
    }
    let (bound, point) = best.expect("at least one start");
    Ok(Some((bound, point, traces)))
}

/// Rectangle-splitting outer approximation (best-bound-first selection).
pub fn bnb_maximize(quad: &LiftedQuadratics, cfg: &BnbConfig) -> Result<BnbReport> {
    if cfg.k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let start = std::time::Instant::now();
    let root_box = initial_box(quad)?;
    let mut next_id: u64 = 0;
    let mut open: Vec<BnbNode> = Vec::new();
    let mut rows = Vec::new();
    let mut best_p = DVector::zeros(quad.dim);
    let mut lower = 0.0f64; // p = 0 is always feasible

    let register = |bounds: BoxBounds,
                        open: &mut Vec<BnbNode>,
                        lower: &mut f64,
                        best_p: &mut DVector<f64>,
                        parent_bound: f64,
                        next_id: &mut u64|
     -> Result<()> {
        let id = *next_id;
        *next_id += 1;
        let Some((ccp_bound, point, _)) = node_bound(quad, &bounds, cfg, id)? else {
            return Ok(()); // infeasible child pruned
        };
        // a child set is contained in its parent's, so the parent bound caps it
        let bound = ccp_bound.min(parent_bound);
        // candidate incumbents: the node's own p, and Gaussian randomization
        let direct = f_minus_g(&point.p, quad)?;
        if direct > *lower {
            *lower = direct;
            *best_p = point.p.clone();
        }
        let mut rng = node_rng(cfg.seed, id ^ 0x5eed_0000_0000_0000);
        let (p_rand, v_rand) =
            gaussian_randomize(&point.q, quad, cfg.randomization_draws, &mut rng)?;
        if v_rand > *lower {
            *lower = v_rand;
            *best_p = p_rand;
        }
        open.push(BnbNode {
            id,
            bounds,
            bound,
            qopt: point.q,
        });
        Ok(())
    };

    register(
        root_box,
        &mut open,
        &mut lower,
        &mut best_p,
        f64::INFINITY,
        &mut next_id,
    )?;

    let mut upper_seq = Vec::new();
    let mut lower_seq = Vec::new();
    let mut iterations = 0usize;
    for k in 1..=cfg.k_max {
        iterations = k;
        // select the open box with the largest bound (lowest id on ties)
        let Some(sel) = open
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                a.bound
                    .partial_cmp(&b.bound)
                    .unwrap()
                    .then(b.id.cmp(&a.id))
            })
            .map(|(i, _)| i)
        else {
            break;
        };
        let node = open.swap_remove(sel);
        if node.bounds.widths().max() > 0.0 {
            let (left, right) = branch(&node.bounds)?;
            register(left, &mut open, &mut lower, &mut best_p, node.bound, &mut next_id)?;
            register(right, &mut open, &mut lower, &mut best_p, node.bound, &mut next_id)?;
        }
        let upper = open
            .iter()
            .map(|nd| nd.bound)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(lower);
        upper_seq.push(upper);
        lower_seq.push(lower);
        rows.push(IterationRow {
            iter: k,
            upper,
            lower,
            gap: upper - lower,
            boxes_open: open.len(),
            wall_ms: start.elapsed().as_millis() as u64,
        });
        if upper - lower <= cfg.gap_tol {
            break;
        }
    }

    let gap = rows.last().map(|r| r.gap).unwrap_or(0.0);
    let shapes = quad.shapes;
    let best_precoders = devectorize(&best_p, shapes)?;
    Ok(BnbReport {
        rows,
        upper: upper_seq,
        lower: lower_seq,
        best_rate: lower,
        best_p,
        best_precoders,
        iterations,
        gap,
    })
}

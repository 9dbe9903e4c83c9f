//! Bespoke log-barrier Newton solver for the per-node concave maximization:
//! a linearized-convex-part surrogate over the box-indexed convex set C(B),
//! plus the looser semidefinite-relaxation bound. The problem is tiny (a few
//! hundred scalars, one small log-det block), so a dense self-contained
//! interior-point method keeps the artifact dependency-free and bit-for-bit
//! deterministic.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::lift::{
    big_f, big_g, grad_f, lse_value, lse_value_grad_hess, membership_c, surrogate_value, BoxBounds,
    LiftedPoint, LiftedQuadratics, Side,
};
use crate::{Error, Result};

/// Barrier-method knobs; every field has a textbook-safe default.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubsolverConfig {
    /// Initial barrier weight.
    pub t0: f64,
    /// Barrier weight multiplier per centering round.
    pub mu: f64,
    /// Stop when (number of constraints)/t falls below this.
    pub barrier_tol: f64,
    /// Armijo sufficient-decrease fraction of the backtracking line search.
    pub ls_alpha: f64,
    /// Backtracking shrink factor.
    pub ls_beta: f64,
    /// Total Newton-step budget across all centerings.
    pub max_newton: usize,
    /// Newton decrement^2 / 2 threshold per centering.
    pub newton_tol: f64,
}

impl Default for SubsolverConfig {
    fn default() -> Self {
        SubsolverConfig {
            t0: 1.0,
            mu: 10.0,
            barrier_tol: 1e-8,
            ls_alpha: 0.25,
            ls_beta: 0.5,
            max_newton: 1200,
            newton_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

/// Result of one concave subproblem solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub point: LiftedPoint,
    /// Surrogate objective value at the returned point.
    pub value: f64,
    /// Duality-gap bound of the final centering, m / t.
    pub kkt_residual: f64,
    /// Worst signed constraint margin of the returned point.
    pub feasibility_margin: f64,
    pub newton_iterations: usize,
}

/// One affine scalar constraint g(x) = offset + sum coeff * x >= 0, sparse.
struct LinCon {
    terms: Vec<(usize, f64)>,
    offset: f64,
}

impl LinCon {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        self.offset + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }
}

enum PsdSpec {
    /// Bordered matrix [[Q, p], [p^T, 1]] of size (n+1).
    Bordered { n: usize },
    /// Q alone, size n (semidefinite relaxation mode).
    Plain { n: usize },
}

impl PsdSpec {
    fn size(&self) -> usize {
        match *self {
            PsdSpec::Bordered { n } => n + 1,
            PsdSpec::Plain { n } => n,
        }
    }
}

enum ObjectiveKind {
    /// Minimize -w.q + G(q); the negated surrogate without its constant.
    Surrogate { wvec: DVector<f64> },
    /// Minimize the phase-I slack variable.
    Slack { index: usize },
}

/// Dense barrier-Newton engine over variables [svec(Q); p?; slack?].
struct Engine<'a> {
    quad: &'a LiftedQuadratics,
    n_vars: usize,
    n_q: usize,
    lin: Vec<LinCon>,
    psd: PsdSpec,
    obj: ObjectiveKind,
}

impl<'a> Engine<'a> {
    /// Map a variable index to its symmetric position in the PSD block.
    fn var_pair(&self, t: usize) -> Option<(usize, usize)> {
        match self.psd {
            PsdSpec::Plain { .. } => (t < self.n_q).then(|| self.quad.sym.pairs[t]),
            PsdSpec::Bordered { n } => {
                if t < self.n_q {
                    Some(self.quad.sym.pairs[t])
                } else if t < self.n_q + n {
                    Some((t - self.n_q, n))
                } else {
                    None
                }
            }
        }
    }

    fn psd_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let size = self.psd.size();
        let mut m = DMatrix::zeros(size, size);
        for t in 0..self.n_vars {
            if let Some((a, b)) = self.var_pair(t) {
                m[(a, b)] = x[t];
                m[(b, a)] = x[t];
            }
        }
        if let PsdSpec::Bordered { n } = self.psd {
            m[(n, n)] = 1.0;
        }
        m
    }

    fn constraint_count(&self) -> usize {
        self.lin.len() + self.psd.size()
    }

    /// Barrier value if x is strictly feasible, None otherwise.
    fn barrier_value(&self, x: &DVector<f64>) -> Option<f64> {
        let mut acc = 0.0;
        for con in &self.lin {
            let g = con.eval(x);
            if g <= 0.0 {
                return None;
            }
            acc -= g.ln();
        }
        let m = self.psd_matrix(x);
        let chol = m.cholesky()?;
        acc -= 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Some(acc)
    }

    fn obj_value(&self, x: &DVector<f64>) -> Result<f64> {
        match &self.obj {
            ObjectiveKind::Surrogate { wvec } => {
                let q = x.rows(0, self.n_q).into_owned();
                Ok(lse_value(self.quad, Side::Legitimate, &q)? - wvec.dot(&q))
            }
            ObjectiveKind::Slack { index } => Ok(x[*index]),
        }
    }

    fn obj_grad_hess(&self, x: &DVector<f64>) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        let mut grad = DVector::zeros(self.n_vars);
        let mut hess = DMatrix::zeros(self.n_vars, self.n_vars);
        match &self.obj {
            ObjectiveKind::Surrogate { wvec } => {
                let q = x.rows(0, self.n_q).into_owned();
                let (gval, ggrad, ghess) =
                    lse_value_grad_hess(self.quad, Side::Legitimate, &q, true)?;
                let ghess = ghess.expect("hessian requested");
                for i in 0..self.n_q {
                    grad[i] = ggrad[i] - wvec[i];
                }
                hess.view_mut((0, 0), (self.n_q, self.n_q)).copy_from(&ghess);
                Ok((gval - wvec.dot(&q), grad, hess))
            }
            ObjectiveKind::Slack { index } => {
                grad[*index] = 1.0;
                Ok((x[*index], grad, hess))
            }
        }
    }

    /// Gradient and Hessian of the barrier at a strictly feasible point.
    fn barrier_grad_hess(
        &self,
        x: &DVector<f64>,
    ) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let mut value = 0.0;
        let mut grad = DVector::zeros(self.n_vars);
        let mut hess = DMatrix::zeros(self.n_vars, self.n_vars);
        for con in &self.lin {
            let g = con.eval(x);
            if g <= 0.0 {
                return None;
            }
            value -= g.ln();
            for &(i, ci) in &con.terms {
                grad[i] -= ci / g;
                for &(j, cj) in &con.terms {
                    hess[(i, j)] += ci * cj / (g * g);
                }
            }
        }
        let m = self.psd_matrix(x);
        let chol = m.clone().cholesky()?;
        value -= 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let s = chol.inverse();
        // collect the PSD-block variables once
        let vars: Vec<(usize, usize, usize, f64)> = (0..self.n_vars)
            .filter_map(|t| {
                self.var_pair(t)
                    .map(|(a, b)| (t, a, b, if a == b { 0.5 } else { 1.0 }))
            })
            .collect();
        for &(t, a, b, wt) in &vars {
            grad[t] -= if a == b { s[(a, a)] } else { 2.0 * s[(a, b)] };
            for &(u, c, d, wu) in &vars {
                if u < t {
                    continue;
                }
                let base = 2.0 * (s[(a, c)] * s[(b, d)] + s[(a, d)] * s[(b, c)]);
                let v = base * wt * wu;
                hess[(t, u)] += v;
                if u != t {
                    hess[(u, t)] += v;
                }
            }
        }
        Some((value, grad, hess))
    }

    /// Full barrier method from a strictly feasible start. Returns the final
    /// iterate, Newton steps used, the final m/t gap bound, and whether the
    /// schedule completed within the Newton budget.
    fn solve(
        &self,
        x0: DVector<f64>,
        cfg: &SubsolverConfig,
        mut early_stop: Option<&mut dyn FnMut(&DVector<f64>) -> bool>,
    ) -> Result<(DVector<f64>, usize, f64, bool)> {
        let m = self.constraint_count() as f64;
        let mut x = x0;
        if self.barrier_value(&x).is_none() {
            return Err(Error::Solver(
                "barrier start point is not strictly feasible".into(),
            ));
        }
        let mut t = cfg.t0;
        let mut steps = 0usize;
        loop {
            // centering at weight t
            loop {
                if steps >= cfg.max_newton {
                    return Ok((x, steps, m / t, false));
                }
                let (oval, ograd, ohess) = self.obj_grad_hess(&x)?;
                let (bval, bgrad, bhess) = self
                    .barrier_grad_hess(&x)
                    .ok_or_else(|| Error::Solver("iterate left the barrier domain".into()))?;
                let total_val = t * oval + bval;
                let grad = &ograd * t + &bgrad;
                let mut hess = &ohess * t + &bhess;
                // factor, with scale-relative Levenberg damping as a fallback
                let scale = (0..self.n_vars)
                    .map(|i| hess[(i, i)].abs())
                    .fold(1.0f64, f64::max);
                let mut damp = 0.0;
                let chol = loop {
                    match hess.clone().cholesky() {
                        Some(c) => break Some(c),
                        None => {
                            if !hess.iter().all(|v| v.is_finite()) || damp > 1e8 * scale {
                                break None;
                            }
                            let bump = if damp == 0.0 { 1e-12 * scale } else { damp * 9.0 };
                            for i in 0..self.n_vars {
                                hess[(i, i)] += bump;
                            }
                            damp += bump;
                        }
                    }
                };
                // an irreparable system marks the numerical floor of this
                // centering; move on to the next barrier weight
                let Some(chol) = chol else { break };
                let step = chol.solve(&(-&grad));
                steps += 1;
                let decrement = -grad.dot(&step);
                // the decrement bounds suboptimality of the t-scaled
                // centering objective, so the tolerance scales with t
                if decrement / 2.0 <= cfg.newton_tol * t {
                    break;
                }
                // backtracking line search on the composite value
                let mut alpha = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let trial = &x + &step * alpha;
                    if let Some(bv) = self.barrier_value(&trial) {
                        let ov = self.obj_value(&trial)?;
                        if t * ov + bv <= total_val - cfg.ls_alpha * alpha * decrement {
                            x = trial;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= cfg.ls_beta;
                }
                if !moved {
                    break; // numerical floor of this centering
                }
                if let Some(stop) = early_stop.as_deref_mut() {
                    if stop(&x) {
                        return Ok((x, steps, m / t, true));
                    }
                }
            }
            if m / t < cfg.barrier_tol {
                return Ok((x, steps, m / t, true));
            }
            t *= cfg.mu;
        }
    }
}

/// Build the scalar constraints of C(B): the three elementwise box-product
/// inequalities of S(B), the box bounds, and the trace budgets.
fn build_cb_constraints(quad: &LiftedQuadratics, bounds: &BoxBounds) -> Vec<LinCon> {
    let n = quad.dim;
    let n_q = quad.sym.dim();
    let pos = |i: usize, j: usize| quad.sym.position(i, j);
    let pvar = |i: usize| n_q + i;
    let mut lin = Vec::new();
    let (l, u) = (&bounds.lower, &bounds.upper);
    for i in 0..n {
        // box bounds
        lin.push(LinCon {
            terms: vec![(pvar(i), 1.0)],
            offset: -l[i],
        });
        lin.push(LinCon {
            terms: vec![(pvar(i), -1.0)],
            offset: u[i],
        });
        for j in 0..n {
            if j >= i {
                // Q - l p^T - p l^T + l l^T >= 0 elementwise
                lin.push(LinCon {
                    terms: vec![(pos(i, j), 1.0), (pvar(j), -l[i]), (pvar(i), -l[j])],
                    offset: l[i] * l[j],
                });
                // Q - u p^T - p u^T + u u^T >= 0 elementwise
                lin.push(LinCon {
                    terms: vec![(pos(i, j), 1.0), (pvar(j), -u[i]), (pvar(i), -u[j])],
                    offset: u[i] * u[j],
                });
            }
            // Q - l p^T - p u^T + l u^T <= 0, all ordered pairs
            lin.push(LinCon {
                terms: vec![(pos(i, j), -1.0), (pvar(j), l[i]), (pvar(i), u[j])],
                offset: -l[i] * u[j],
            });
        }
    }
    for i in 0..2 {
        lin.push(LinCon {
            terms: quad.cvec[i]
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0.0)
                .map(|(k, &c)| (k, -c))
                .collect(),
            offset: quad.beta[i],
        });
    }
    for (dv, &gj) in quad.dvec.iter().zip(&quad.gamma) {
        lin.push(LinCon {
            terms: dv
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0.0)
                .map(|(k, &c)| (k, -c))
                .collect(),
            offset: gj,
        });
    }
    lin
}

/// Strictly feasible start for S(B) and the bordered cone: the box center
/// with Q = p p^T + delta I.
fn interior_start(quad: &LiftedQuadratics, bounds: &BoxBounds) -> DVector<f64> {
    let n = quad.dim;
    let p = bounds.center();
    let half_min = bounds
        .widths()
        .iter()
        .fold(f64::INFINITY, |a, &w| a.min(w / 2.0));
    let delta = 0.25 * half_min * half_min;
    let q = &p * p.transpose() + DMatrix::identity(n, n).scale(delta);
    let mut x = DVector::zeros(quad.sym.dim() + n);
    x.rows_mut(0, quad.sym.dim()).copy_from(&quad.sym.svec(&q));
    x.rows_mut(quad.sym.dim(), n).copy_from(&p);
    x
}

/// Maximize the tangent surrogate at Qc over C(B).
pub fn solve_concave_subproblem(
    quad: &LiftedQuadratics,
    bounds: &BoxBounds,
    qc: &DMatrix<f64>,
    cfg: &SubsolverConfig,
) -> Result<SolveOutcome> {
    let n = quad.dim;
    let n_q = quad.sym.dim();
    // a fully pinned box has a closed-form answer: the elementwise products
    // force Q = p p^T with p at the (single) box point
    if bounds.widths().iter().all(|&w| w < 1e-9) {
        let p = bounds.center();
        let q = &p * p.transpose();
        let budget_margin = (0..2)
            .map(|i| quad.beta[i] - (p.transpose() * &quad.c[i] * &p)[(0, 0)])
            .chain(
                quad.d
                    .iter()
                    .zip(&quad.gamma)
                    .map(|(dj, &gj)| gj - (p.transpose() * dj * &p)[(0, 0)]),
            )
            .fold(f64::INFINITY, f64::min);
        if budget_margin < -1e-9 {
            return Ok(SolveOutcome {
                status: SolveStatus::Infeasible,
                point: LiftedPoint {
                    q: DMatrix::zeros(n, n),
                    p: DVector::zeros(n),
                },
                value: f64::NEG_INFINITY,
                kkt_residual: -budget_margin,
                feasibility_margin: budget_margin,
                newton_iterations: 0,
            });
        }
        let value = surrogate_value(&q, qc, quad)?;
        return Ok(SolveOutcome {
            status: SolveStatus::Optimal,
            point: LiftedPoint { q, p },
            value,
            kkt_residual: 0.0,
            feasibility_margin: budget_margin,
            newton_iterations: 0,
        });
    }

    // degenerate edges leave the barrier no interior; widen them slightly
    let mut bounds = bounds.clone();
    for i in 0..n {
        if bounds.upper[i] - bounds.lower[i] < 1e-9 {
            bounds.lower[i] -= 1e-7;
            bounds.upper[i] += 1e-7;
        }
    }

    let w = grad_f(qc, quad)?;
    let wvec = quad.sym.svec_dual(&w);
    let constant = big_f(qc, quad)? - (w.transpose() * qc).trace();

    let mut engine = Engine {
        quad,
        n_vars: n_q + n,
        n_q,
        lin: build_cb_constraints(quad, &bounds),
        psd: PsdSpec::Bordered { n },
        obj: ObjectiveKind::Surrogate { wvec: wvec.clone() },
    };

    let mut x0 = interior_start(quad, &bounds);
    let mut phase1_steps = 0usize;
    if engine.barrier_value(&x0).is_none() {
        // only the trace budgets can fail at the interior start; phase-I
        // minimizes a shared slack on them
        match phase_one(quad, &engine.lin, &x0, n_q + n, cfg)? {
            PhaseOneResult::Feasible { x, steps, relax } => {
                x0 = x;
                phase1_steps = steps;
                if relax > 0.0 {
                    // borderline interior: widen the budgets imperceptibly
                    for con in engine.lin.iter_mut().rev().take(2 + quad.gamma.len()) {
                        con.offset += relax;
                    }
                }
            }
            PhaseOneResult::Infeasible { best_slack } => {
                return Ok(SolveOutcome {
                    status: SolveStatus::Infeasible,
                    point: LiftedPoint {
                        q: DMatrix::zeros(n, n),
                        p: DVector::zeros(n),
                    },
                    value: f64::NEG_INFINITY,
                    kkt_residual: best_slack,
                    feasibility_margin: -best_slack,
                    newton_iterations: 0,
                });
            }
        }
    }

    let (x, steps, gap, completed) = engine.solve(x0, cfg, None)?;
    let q = quad.sym.unpack(&x.rows(0, n_q).into_owned());
    let p = x.rows(n_q, n).into_owned();
    let point = LiftedPoint { q: q.clone(), p };
    let value = constant + wvec.dot(&x.rows(0, n_q).into_owned()) - big_g(&q, quad)?;
    let membership = membership_c(&point, &bounds, quad, 1e-8);
    let margin = membership
        .margins
        .iter()
        .map(|&(_, m)| m)
        .fold(f64::INFINITY, f64::min);
    Ok(SolveOutcome {
        status: if completed {
            SolveStatus::Optimal
        } else {
            SolveStatus::MaxIterations
        },
        point,
        value,
        kkt_residual: gap,
        feasibility_margin: margin,
        newton_iterations: steps + phase1_steps,
    })
}

enum PhaseOneResult {
    Feasible {
        x: DVector<f64>,
        steps: usize,
        relax: f64,
    },
    Infeasible {
        best_slack: f64,
    },
}

/// Phase-I: minimize one slack added to the trace budgets, holding the
/// geometric constraints (already strict at x0) hard.
fn phase_one(
    quad: &LiftedQuadratics,
    lin: &[LinCon],
    x0: &DVector<f64>,
    n_main: usize,
    cfg: &SubsolverConfig,
) -> Result<PhaseOneResult> {
    let n_trace = 2 + quad.gamma.len();
    let slack = n_main;
    let mut relaxed: Vec<LinCon> = lin
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut terms = c.terms.clone();
            if k >= lin.len() - n_trace {
                terms.push((slack, 1.0));
            }
            LinCon {
                terms,
                offset: c.offset,
            }
        })
        .collect();
    let worst = lin
        .iter()
        .rev()
        .take(n_trace)
        .map(|c| -c.eval(x0))
        .fold(f64::NEG_INFINITY, f64::max);
    relaxed.push(LinCon {
        terms: vec![(slack, 1.0)],
        offset: 2.0 * worst.abs() + 1.0,
    });

    let engine = Engine {
        quad,
        n_vars: n_main + 1,
        n_q: quad.sym.dim(),
        lin: relaxed,
        psd: PsdSpec::Bordered { n: quad.dim },
        obj: ObjectiveKind::Slack { index: slack },
    };
    let mut x = DVector::zeros(n_main + 1);
    x.rows_mut(0, n_main).copy_from(x0);
    x[slack] = worst.max(0.0) + 1.0;

    let mut stop = |y: &DVector<f64>| y[slack] < -1e-6;
    let (x, steps, _, _) = engine.solve(x, cfg, Some(&mut stop))?;
    let s = x[slack];
    if s > 1e-9 {
        return Ok(PhaseOneResult::Infeasible { best_slack: s });
    }
    Ok(PhaseOneResult::Feasible {
        x: x.rows(0, n_main).into_owned(),
        steps,
        relax: if s < 0.0 { 0.0 } else { 2.0 * s + 1e-12 },
    })
}

/// One surrogate maximization over the semidefinite relaxation
/// F_sdr = { Q >= 0, trace budgets }, returning (Q*, surrogate value).
pub fn solve_sdr_subproblem(
    quad: &LiftedQuadratics,
    qc: &DMatrix<f64>,
    cfg: &SubsolverConfig,
) -> Result<(DMatrix<f64>, f64)> {
    let n = quad.dim;
    let n_q = quad.sym.dim();
    let w = grad_f(qc, quad)?;
    let wvec = quad.sym.svec_dual(&w);
    let constant = big_f(qc, quad)? - (w.transpose() * qc).trace();

    let mut lin = Vec::new();
    for i in 0..2 {
        lin.push(LinCon {
            terms: quad.cvec[i]
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0.0)
                .map(|(k, &c)| (k, -c))
                .collect(),
            offset: quad.beta[i],
        });
    }
    for (dv, &gj) in quad.dvec.iter().zip(&quad.gamma) {
        lin.push(LinCon {
            terms: dv
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0.0)
                .map(|(k, &c)| (k, -c))
                .collect(),
            offset: gj,
        });
    }
    let engine = Engine {
        quad,
        n_vars: n_q,
        n_q,
        lin,
        psd: PsdSpec::Plain { n },
        obj: ObjectiveKind::Surrogate { wvec: wvec.clone() },
    };
    // Q = delta I is strictly interior for positive budgets
    let mut budget_over_trace = f64::INFINITY;
    for i in 0..2 {
        let tr: f64 = quad.c[i].diagonal().sum();
        budget_over_trace = budget_over_trace.min(quad.beta[i] / tr);
    }
    for (d, &g) in quad.d.iter().zip(&quad.gamma) {
        let tr: f64 = d.diagonal().sum();
        if tr > 0.0 {
            budget_over_trace = budget_over_trace.min(g / tr);
        }
    }
    let delta = 0.5 * budget_over_trace;
    let x0 = quad
        .sym
        .svec(&DMatrix::identity(n, n).scale(delta));
    let (x, _, _, completed) = engine.solve(x0, cfg, None)?;
    if !completed {
        return Err(Error::Solver(
            "relaxation subproblem hit the Newton budget".into(),
        ));
    }
    let q = quad.sym.unpack(&x.rows(0, n_q).into_owned());
    let value = constant + wvec.dot(&x.rows(0, n_q).into_owned()) - big_g(&q, quad)?;
    Ok((q, value))
}

/// Convex-concave iteration over the semidefinite relaxation; its converged
/// value is a comparison bound looser than any box-set bound.
pub fn solve_sdr_bound(
    quad: &LiftedQuadratics,
    cfg: &SubsolverConfig,
    epsilon: f64,
    max_rounds: usize,
) -> Result<f64> {
    if quad.beta.iter().all(|&b| b == 0.0) {
        return Ok(0.0);
    }
    let n = quad.dim;
    let mut qc = DMatrix::identity(n, n).scale(1e-3);
    let mut last = f64::NEG_INFINITY;
    for _ in 0..max_rounds.max(1) {
        let (q, value) = solve_sdr_subproblem(quad, &qc, cfg)?;
        if (value - last).abs() <= epsilon {
            return Ok(value);
        }
        last = value;
        qc = q;
    }
    Ok(last)
}

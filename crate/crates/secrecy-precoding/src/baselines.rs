//! Comparison designs: Gaussian-signaling precoding via a sample-average
//! convex-concave loop on log-det rates, the scaled identity (no-precoding)
//! scheme, and the effective power bound implied jointly by the power and
//! interference budgets.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{matrix_sqrt, sample_channel, CMatrix, CorrelationSet};
use crate::{Error, Result};

/// Gaussian-signaling transmit covariances and their square-root precoders.
#[derive(Debug, Clone)]
pub struct GaussianDesign {
    pub q1: CMatrix,
    pub q2: CMatrix,
    pub precoders: (CMatrix, CMatrix),
    /// Sample-average secrecy objective per outer iteration, in bits.
    pub trace: Vec<f64>,
}

/// Hermitian parameter basis for one n x n covariance block: n diagonal
/// parameters, then (re, im) pairs for each upper-triangle entry.
fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut re = CMatrix::zeros(n, n);
            re[(i, j)] = Complex64::new(1.0, 0.0);
            re[(j, i)] = Complex64::new(1.0, 0.0);
            basis.push(re);
            let mut im = CMatrix::zeros(n, n);
            im[(i, j)] = Complex64::new(0.0, 1.0);
            im[(j, i)] = Complex64::new(0.0, -1.0);
            basis.push(im);
        }
    }
    basis
}

fn re_trace(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

fn re_trace_prod(a: &CMatrix, b: &CMatrix) -> f64 {
    // Re tr(A B) without forming the product
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

struct SaaProblem {
    /// Per parameter: covariance block (0 or 1) and basis matrix.
    params: Vec<(usize, CMatrix)>,
    block_dims: [usize; 2],
    /// Legitimate channel draws (H1, H2) per sample.
    legit: Vec<[CMatrix; 2]>,
    /// Eavesdropper channel draws (G1, G2) per sample.
    eaves: Vec<[CMatrix; 2]>,
    sigma_r2: f64,
    sigma_e2: f64,
    /// Linear budget constraints: budget - sum coeff_a x_a >= 0.
    budgets: Vec<(Vec<f64>, f64)>,
}

impl SaaProblem {
    fn n_params(&self) -> usize {
        self.params.len()
    }

    fn covariances(&self, x: &DVector<f64>) -> [CMatrix; 2] {
        let mut q = [
            CMatrix::zeros(self.block_dims[0], self.block_dims[0]),
            CMatrix::zeros(self.block_dims[1], self.block_dims[1]),
        ];
        for (a, &(blk, ref e)) in self.params.iter().enumerate() {
            q[blk] += e.scale(x[a]);
        }
        q
    }

    /// M = I + (1/sigma2) sum_i H_i Q_i H_i^H for one draw.
    fn received_matrix(h: &[CMatrix; 2], q: &[CMatrix; 2], sigma2: f64) -> CMatrix {
        let n_r = h[0].nrows();
        let mut m = CMatrix::identity(n_r, n_r);
        for i in 0..2 {
            m += (&h[i] * &q[i] * h[i].adjoint()).scale(1.0 / sigma2);
        }
        m
    }

    fn avg_logdet(draws: &[[CMatrix; 2]], q: &[CMatrix; 2], sigma2: f64) -> Result<f64> {
        let mut acc = 0.0;
        for h in draws {
            let m = Self::received_matrix(h, q, sigma2);
            let chol = m
                .cholesky()
                .ok_or_else(|| Error::NotPsd(f64::NEG_INFINITY))?;
            acc += 2.0 * chol.l().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
        }
        Ok(acc / draws.len() as f64)
    }

    /// True sample-average objective in nats: avg R1 - avg R2.
    fn objective(&self, q: &[CMatrix; 2]) -> Result<f64> {
        Ok(Self::avg_logdet(&self.legit, q, self.sigma_r2)?
            - Self::avg_logdet(&self.eaves, q, self.sigma_e2)?)
    }

    /// Gradient matrices of avg R2 at qc (the linearization coefficients).
    fn eaves_gradient(&self, qc: &[CMatrix; 2]) -> Result<[CMatrix; 2]> {
        let mut t = [
            CMatrix::zeros(self.block_dims[0], self.block_dims[0]),
            CMatrix::zeros(self.block_dims[1], self.block_dims[1]),
        ];
        for g in &self.eaves {
            let m = Self::received_matrix(g, qc, self.sigma_e2);
            let inv = m
                .cholesky()
                .ok_or_else(|| Error::NotPsd(f64::NEG_INFINITY))?
                .inverse();
            for i in 0..2 {
                t[i] += (g[i].adjoint() * &inv * &g[i]).scale(1.0 / self.sigma_e2);
            }
        }
        let s = self.eaves.len() as f64;
        for ti in &mut t {
            *ti /= Complex64::new(s, 0.0);
        }
        Ok(t)
    }

    /// Minimize t*(-avg R1 + sum tr(T_i Q_i)) + barriers over the PSD cones
    /// and budget constraints, by damped Newton with backtracking.
    fn solve_surrogate(
        &self,
        tbar: &[CMatrix; 2],
        x0: DVector<f64>,
    ) -> Result<DVector<f64>> {
        let n = self.n_params();
        let lin_coeff: Vec<f64> = self
            .params
            .iter()
            .map(|(blk, e)| re_trace_prod(&tbar[*blk], e))
            .collect();

        let barrier_count =
            (self.block_dims[0] + self.block_dims[1] + self.budgets.len()) as f64;

        let feas = |x: &DVector<f64>| -> Option<f64> {
            let q = self.covariances(x);
            let mut acc = 0.0;
            for qi in &q {
                let chol = qi.clone().cholesky()?;
                acc -= 2.0 * chol.l().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
            }
            for (coeffs, budget) in &self.budgets {
                let g = budget - coeffs.iter().zip(x.iter()).map(|(c, v)| c * v).sum::<f64>();
                if g <= 0.0 {
                    return None;
                }
                acc -= g.ln();
            }
            Some(acc)
        };
        let obj = |x: &DVector<f64>| -> Result<f64> {
            let q = self.covariances(x);
            let c_lin: f64 = lin_coeff.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
            Ok(-Self::avg_logdet(&self.legit, &q, self.sigma_r2)? + c_lin)
        };

        let mut x = x0;
        if feas(&x).is_none() {
            return Err(Error::Solver(
                "gaussian surrogate start point infeasible".into(),
            ));
        }
        let mut t = 1.0;
        let mut steps = 0usize;
        loop {
            loop {
                if steps > 400 {
                    // best effort: the iterate is feasible and the outer
                    // convex-concave loop only needs an improving point
                    return Ok(x);
                }
                steps += 1;
                let q = self.covariances(&x);
                let mut grad = DVector::zeros(n);
                let mut hess: DMatrix<f64> = DMatrix::zeros(n, n);
                // objective part: -avg R1 + linear term
                for h in &self.legit {
                    let m = Self::received_matrix(h, &q, self.sigma_r2);
                    let inv = m
                        .cholesky()
                        .ok_or_else(|| Error::NotPsd(f64::NEG_INFINITY))?
                        .inverse();
                    let k: Vec<CMatrix> = self
                        .params
                        .iter()
                        .map(|(blk, e)| (&h[*blk] * e * h[*blk].adjoint()).scale(1.0 / self.sigma_r2))
                        .collect();
                    let ik: Vec<CMatrix> = k.iter().map(|ka| &inv * ka).collect();
                    for a in 0..n {
                        grad[a] -= t * re_trace(&ik[a]) / self.legit.len() as f64;
                        for b in a..n {
                            let v = t * re_trace_prod(&ik[a], &ik[b]) / self.legit.len() as f64;
                            hess[(a, b)] += v;
                            if a != b {
                                hess[(b, a)] += v;
                            }
                        }
                    }
                }
                for a in 0..n {
                    grad[a] += t * lin_coeff[a];
                }
                // PSD barriers
                for (blk, qi) in q.iter().enumerate() {
                    let inv = qi
                        .clone()
                        .cholesky()
                        .ok_or_else(|| Error::NotPsd(f64::NEG_INFINITY))?
                        .inverse();
                    let members: Vec<(usize, CMatrix)> = self
                        .params
                        .iter()
                        .enumerate()
                        .filter(|(_, (b, _))| *b == blk)
                        .map(|(a, (_, e))| (a, &inv * e))
                        .collect();
                    for (a, ia) in &members {
                        grad[*a] -= re_trace(ia);
                        for (b, ib) in &members {
                            if b < a {
                                continue;
                            }
                            let v = re_trace_prod(ia, ib);
                            hess[(*a, *b)] += v;
                            if a != b {
                                hess[(*b, *a)] += v;
                            }
                        }
                    }
                }
                // budget barriers
                for (coeffs, budget) in &self.budgets {
                    let g = budget
                        - coeffs.iter().zip(x.iter()).map(|(c, v)| c * v).sum::<f64>();
                    for a in 0..n {
                        if coeffs[a] != 0.0 {
                            grad[a] += coeffs[a] / g;
                            for b in 0..n {
                                if coeffs[b] != 0.0 {
                                    hess[(a, b)] += coeffs[a] * coeffs[b] / (g * g);
                                }
                            }
                        }
                    }
                }

                // damped Newton step with scale-relative regularization
                let scale = (0..n).map(|i| hess[(i, i)].abs()).fold(1.0f64, f64::max);
                let mut damp = 0.0;
                let chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> = loop {
                    match hess.clone().cholesky() {
                        Some(c) => break Some(c),
                        None => {
                            if !hess.iter().all(|v| v.is_finite()) || damp > 1e8 * scale {
                                break None;
                            }
                            let bump = if damp == 0.0 { 1e-12 * scale } else { damp * 9.0 };
                            for i in 0..n {
                                hess[(i, i)] += bump;
                            }
                            damp += bump;
                        }
                    }
                };
                // irreparable system: numerical floor of this centering
                let Some(chol) = chol else { break };
                let step = chol.solve(&(-&grad));
                let decrement = -grad.dot(&step);
                // suboptimality of the t-scaled centering objective
                if decrement / 2.0 <= 1e-9 * t {
                    break;
                }
                let current = t * obj(&x)? + feas(&x).expect("iterate feasible");
                let mut alpha = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let trial = &x + &step * alpha;
                    if let Some(bv) = feas(&trial) {
                        if t * obj(&trial)? + bv <= current - 0.25 * alpha * decrement {
                            x = trial;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            if barrier_count / t < 1e-8 {
                return Ok(x);
            }
            t *= 10.0;
        }
    }
}

/// Design Gaussian-signaling covariances by a convex-concave loop on the
/// sample-average of the log-det secrecy objective.
#[allow(clippy::too_many_arguments)]
pub fn gaussian_precoding<R: Rng + ?Sized>(
    corr: &CorrelationSet,
    shapes: (usize, usize),
    beta: [f64; 2],
    gamma: &[f64],
    sigma_r2: f64,
    sigma_e2: f64,
    n_channel_samples: usize,
    ccp_epsilon: f64,
    rng: &mut R,
) -> Result<GaussianDesign> {
    if n_channel_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let (n1, n2) = shapes;
    if beta.iter().any(|&b| b <= 0.0) {
        // zero budgets pin the covariances at zero
        let q1 = CMatrix::zeros(n1, n1);
        let q2 = CMatrix::zeros(n2, n2);
        return Ok(GaussianDesign {
            precoders: (q1.clone(), q2.clone()),
            q1,
            q2,
            trace: vec![0.0],
        });
    }

    let mut legit = Vec::with_capacity(n_channel_samples);
    let mut eaves = Vec::with_capacity(n_channel_samples);
    for _ in 0..n_channel_samples {
        let d = sample_channel(corr, rng);
        legit.push(d.h);
        eaves.push(d.g);
    }

    let mut params = Vec::new();
    for e in hermitian_basis(n1) {
        params.push((0usize, e));
    }
    for e in hermitian_basis(n2) {
        params.push((1usize, e));
    }
    let n = params.len();

    // budget rows: tr(Q_i) <= beta_i and the interference thresholds
    let mut budgets = Vec::new();
    for i in 0..2 {
        let coeffs: Vec<f64> = params
            .iter()
            .map(|(blk, e)| if *blk == i { re_trace(e) } else { 0.0 })
            .collect();
        budgets.push((coeffs, beta[i]));
    }
    for (j, &gj) in gamma.iter().enumerate() {
        let tr_phi = re_trace(&corr.phi_f[j]);
        let coeffs: Vec<f64> = params
            .iter()
            .map(|(blk, e)| tr_phi * re_trace_prod(&corr.psi_f[j][*blk], e))
            .collect();
        budgets.push((coeffs, gj));
    }

    let problem = SaaProblem {
        params,
        block_dims: [n1, n2],
        legit,
        eaves,
        sigma_r2,
        sigma_e2,
        budgets,
    };

    // strictly interior start: Q_i = delta I
    let mut delta = f64::INFINITY;
    let probe = {
        let mut x = DVector::zeros(n);
        for (a, (blk, e)) in problem.params.iter().enumerate() {
            // diagonal basis elements have trace 1
            if re_trace(e) > 0.5 {
                let _ = blk;
                x[a] = 1.0;
            }
        }
        x
    };
    for (coeffs, budget) in &problem.budgets {
        let load: f64 = coeffs.iter().zip(probe.iter()).map(|(c, v)| c * v).sum();
        if load > 0.0 {
            delta = delta.min(budget / load);
        }
    }
    let x0 = probe.scale(0.5 * delta);

    let ln2 = std::f64::consts::LN_2;
    let mut x = x0;
    let mut qc = problem.covariances(&x);
    let mut trace = vec![problem.objective(&qc)? / ln2];
    for _ in 0..100 {
        let tbar = problem.eaves_gradient(&qc)?;
        x = problem.solve_surrogate(&tbar, x)?;
        qc = problem.covariances(&x);
        let value = problem.objective(&qc)? / ln2;
        let done = (value - trace.last().unwrap()).abs() <= ccp_epsilon;
        trace.push(value);
        if done {
            break;
        }
    }

    let [q1, q2] = qc;
    let p1 = matrix_sqrt(&q1)?;
    let p2 = matrix_sqrt(&q2)?;
    Ok(GaussianDesign {
        q1,
        q2,
        precoders: (p1, p2),
        trace,
    })
}

/// Identity precoders at full per-transmitter power, scaled down together so
/// the worst interference constraint holds (scale clipped at 1).
pub fn no_precoding(
    corr: &CorrelationSet,
    shapes: (usize, usize),
    beta: [f64; 2],
    gamma: &[f64],
) -> (CMatrix, CMatrix) {
    let (n1, n2) = shapes;
    let amp = [
        (beta[0] / n1 as f64).sqrt(),
        (beta[1] / n2 as f64).sqrt(),
    ];
    let mut scale: f64 = 1.0;
    for (j, &gj) in gamma.iter().enumerate() {
        let tr_phi = re_trace(&corr.phi_f[j]);
        let interference = tr_phi
            * (amp[0] * amp[0] * re_trace(&corr.psi_f[j][0])
                + amp[1] * amp[1] * re_trace(&corr.psi_f[j][1]));
        if interference > 0.0 {
            scale = scale.min((gj / interference).sqrt());
        }
    }
    (
        CMatrix::identity(n1, n1).scale(amp[0] * scale),
        CMatrix::identity(n2, n2).scale(amp[1] * scale),
    )
}

/// Largest usable transmit powers implied jointly by the power and
/// interference budgets. The flag marks transmitters whose interference
/// bound is vacuous (singular transmit-side correlation).
pub fn effective_power_bound(
    corr: &CorrelationSet,
    beta: [f64; 2],
    gamma: &[f64],
) -> ([f64; 2], [bool; 2]) {
    let snap = |x: f64| (x * 1e12).round() / 1e12;
    let mut out = [0.0f64; 2];
    let mut vacuous = [false; 2];
    for i in 0..2 {
        let mut bound = beta[i];
        for (j, &gj) in gamma.iter().enumerate() {
            let tr_phi = re_trace(&corr.phi_f[j]);
            let lmin = crate::channel::hermitian_eigenvalues(&corr.psi_f[j][i])
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if snap(lmin) <= 0.0 || tr_phi <= 0.0 {
                vacuous[i] = true;
                continue;
            }
            bound = bound.min(snap(gj / snap(tr_phi * lmin)));
        }
        out[i] = bound;
    }
    (out, vacuous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{membership_p, vectorize};
    use crate::test_fixtures::{cm, fig3_corr, fig3_quad, tiny_quad};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Correlations of the SNR-sweep scenario (Figs. 4/5 setup).
    fn fig45_corr() -> CorrelationSet {
        CorrelationSet::new(
            cm(0.25, 2),
            cm(0.75, 2),
            [cm(0.95, 2), cm(0.9, 2)],
            [cm(0.5, 2), cm(0.3, 2)],
            vec![cm(0.5, 2)],
            vec![[cm(0.8, 2), cm(0.5, 2)]],
        )
        .unwrap()
    }

    #[test]
    fn effective_power_bound_paper_values() {
        let corr = fig45_corr();
        let (b, flags) = effective_power_bound(&corr, [2.0, 2.0], &[0.2]);
        assert_eq!(b, [0.5, 0.2]);
        assert_eq!(flags, [false, false]);
        let (b, _) = effective_power_bound(&corr, [2.0, 2.0], &[0.02]);
        assert_eq!(b, [0.05, 0.02]);
        // roomy threshold: the power budget binds
        let (b, _) = effective_power_bound(&corr, [2.0, 2.0], &[100.0]);
        assert_eq!(b, [2.0, 2.0]);
    }

    #[test]
    fn effective_power_bound_singular_psi_is_vacuous() {
        let mut corr = fig45_corr();
        // rank-1 transmit correlation for transmitter 1 at primary 1
        let ones = CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        corr.psi_f[0][0] = ones;
        let (b, flags) = effective_power_bound(&corr, [2.0, 2.0], &[0.2]);
        assert_eq!(b[0], 2.0);
        assert!(flags[0]);
        assert!(!flags[1]);
    }

    #[test]
    fn effective_bound_dominates_feasible_powers() {
        // every feasible precoder pair obeys tr(P_i^H P_i) <= beta_bar_i
        let quad = fig3_quad(crate::constellation::ConstellationKind::Bpsk);
        let corr = fig3_corr();
        let (bbar, _) = effective_power_bound(&corr, quad.beta, &quad.gamma);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..10_000 {
            // scale a random direction onto (or inside) the feasible boundary
            let raw = crate::test_fixtures::random_p(quad.dim, &mut rng, 1.0);
            let mut worst: f64 = 0.0;
            for i in 0..2 {
                worst = worst.max((raw.transpose() * &quad.c[i] * &raw)[(0, 0)] / quad.beta[i]);
            }
            for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
                worst = worst.max((raw.transpose() * dj * &raw)[(0, 0)] / gj);
            }
            let slack = 1.0 + (trial % 7) as f64 * 0.1;
            let p = raw / (worst * slack).sqrt().max(1e-12);
            assert!(membership_p(&p, &quad, 1e-9).0);
            for i in 0..2 {
                let power = (p.transpose() * &quad.c[i] * &p)[(0, 0)];
                assert!(power <= bbar[i] + 1e-8, "power {power} above {}", bbar[i]);
            }
        }
    }

    #[test]
    fn no_precoding_scales_onto_the_interference_boundary() {
        let corr = fig3_corr();
        let (p1, p2) = no_precoding(&corr, (2, 2), [2.0, 2.0], &[0.2]);
        let quad = fig3_quad(crate::constellation::ConstellationKind::Bpsk);
        let p = vectorize(&p1, &p2);
        let (ok, _) = membership_p(&p, &quad, 1e-9);
        assert!(ok);
        let interference = crate::channel::interference_closed_form(
            &p1,
            &p2,
            &corr.phi_f[0],
            &corr.psi_f[0][0],
            &corr.psi_f[0][1],
        );
        assert_relative_eq!(interference, 0.2, max_relative = 1e-10);
        // roomy threshold: no scaling, full power
        let (p1, _) = no_precoding(&corr, (2, 2), [2.0, 2.0], &[1e9]);
        assert_relative_eq!(p1[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_zero_budget_and_huge_noise() {
        let corr = fig3_corr();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = gaussian_precoding(
            &corr,
            (2, 2),
            [0.0, 0.0],
            &[0.2],
            0.1,
            0.1,
            10,
            1e-4,
            &mut rng,
        )
        .unwrap();
        assert_eq!(d.trace, vec![0.0]);
        assert!(d.q1.iter().all(|z| z.norm() == 0.0));

        let d = gaussian_precoding(
            &corr,
            (2, 2),
            [2.0, 2.0],
            &[0.2],
            1e9,
            1e9,
            20,
            1e-6,
            &mut rng,
        )
        .unwrap();
        assert!(d.trace.last().unwrap().abs() < 1e-6);
    }

    #[test]
    fn gaussian_trace_monotone_and_budgets_hold() {
        let corr = fig3_corr();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let d = gaussian_precoding(
            &corr,
            (2, 2),
            [2.0, 2.0],
            &[0.2],
            0.1,
            0.1,
            40,
            1e-4,
            &mut rng,
        )
        .unwrap();
        for w in d.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-7, "gaussian trace decreased: {:?}", d.trace);
        }
        assert!(*d.trace.last().unwrap() > 0.0);
        assert!(re_trace(&d.q1) <= 2.0 + 1e-8);
        assert!(re_trace(&d.q2) <= 2.0 + 1e-8);
        let tr_phi = re_trace(&corr.phi_f[0]);
        let interference = tr_phi
            * (re_trace(&(&corr.psi_f[0][0] * &d.q1)) + re_trace(&(&corr.psi_f[0][1] * &d.q2)));
        assert!(interference <= 0.2 + 1e-8, "interference {interference}");
        // square roots reproduce the covariances
        assert!((&d.precoders.0 * &d.precoders.0 - &d.q1).norm() < 1e-8);
    }

    #[test]
    fn gaussian_scalar_instance_matches_grid() {
        // 1x1 channels, single sample: brute-force the two scalar powers
        let one = |v: f64| CMatrix::from_element(1, 1, Complex64::new(v, 0.0));
        let corr = CorrelationSet::new(
            one(1.0),
            one(1.0),
            [one(1.0), one(1.0)],
            [one(1.0), one(1.0)],
            vec![one(1.0)],
            vec![[one(1.0), one(1.0)]],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let d = gaussian_precoding(
            &corr,
            (1, 1),
            [2.0, 2.0],
            &[0.5],
            0.1,
            0.1,
            1,
            1e-7,
            &mut rng,
        )
        .unwrap();
        // replay the single channel draw to build the scalar objective
        let mut rng2 = ChaCha8Rng::seed_from_u64(44);
        let draw = sample_channel(&corr, &mut rng2);
        let h = [draw.h[0][(0, 0)].norm_sqr(), draw.h[1][(0, 0)].norm_sqr()];
        let g = [draw.g[0][(0, 0)].norm_sqr(), draw.g[1][(0, 0)].norm_sqr()];
        let objective = |q1: f64, q2: f64| -> f64 {
            ((1.0 + (h[0] * q1 + h[1] * q2) / 0.1).ln()
                - (1.0 + (g[0] * q1 + g[1] * q2) / 0.1).ln())
                / std::f64::consts::LN_2
        };
        let mut best = f64::NEG_INFINITY;
        let steps = 400;
        for a in 0..=steps {
            for b in 0..=steps {
                let q1 = 2.0 * a as f64 / steps as f64;
                let q2 = 2.0 * b as f64 / steps as f64;
                if q1 + q2 <= 0.5 {
                    best = best.max(objective(q1, q2));
                }
            }
        }
        let achieved = *d.trace.last().unwrap();
        assert!(
            (achieved - best).abs() <= 1e-3,
            "solver {achieved} vs grid {best}"
        );
    }

    #[test]
    fn gaussian_design_scores_on_the_finite_alphabet() {
        // square-root precoders evaluate cleanly through the approximation
        let corr = fig3_corr();
        let quad = fig3_quad(crate::constellation::ConstellationKind::Bpsk);
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let d = gaussian_precoding(
            &corr,
            (2, 2),
            [2.0, 2.0],
            &[0.2],
            0.1,
            0.1,
            30,
            1e-3,
            &mut rng,
        )
        .unwrap();
        let rate =
            crate::mutual_info::secrecy_rate_of_covariances(&d.q1, &d.q2, &quad).unwrap();
        assert!(rate.is_finite());
        let p = vectorize(&d.precoders.0, &d.precoders.1);
        assert!(membership_p(&p, &quad, 1e-8).0);
        let _ = tiny_quad();
    }
}

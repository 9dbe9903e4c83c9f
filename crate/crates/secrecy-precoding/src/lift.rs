//! Vectorized quadratic-form representation of the approximated secrecy
//! objective and constraints: the real lifted matrices A/B/C/D, the DC pair
//! f/g on precoder vectors and F/G on the lifted matrix variable, gradients
//! and Hessians for the barrier subsolver, the initial bounding box, the
//! box-indexed convex sets S(B) and C(B), and the naive DC-shift constant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::{hermitian_eigenvalues, CMatrix, CorrelationSet};
use crate::constellation::{row_table, DifferenceClass, SymbolEnumeration};
use crate::{Error, Result};

/// Default cap on memory used by the stored lifted matrices, in bytes.
pub const DEFAULT_MATRIX_MEMORY_CAP: usize = 1 << 30;

/// Which receiver side of the wiretap channel an evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Legitimate,
    Eavesdropper,
}

/// Axis-aligned hyperrectangle, the branch-and-bound node geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl BoxBounds {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::ShapeMismatch("box bound lengths differ".into()));
        }
        for i in 0..lower.len() {
            if lower[i] > upper[i] {
                return Err(Error::InvalidParameter(format!(
                    "box lower[{i}] exceeds upper[{i}]"
                )));
            }
        }
        Ok(BoxBounds { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self) -> DVector<f64> {
        (&self.lower + &self.upper).scale(0.5)
    }

    pub fn widths(&self) -> DVector<f64> {
        &self.upper - &self.lower
    }

    pub fn contains(&self, p: &DVector<f64>, tol: f64) -> bool {
        (0..self.dim()).all(|i| p[i] >= self.lower[i] - tol && p[i] <= self.upper[i] + tol)
    }

    pub fn volume(&self) -> f64 {
        self.widths().iter().product()
    }
}

/// Pair (Q, p): the variable of the lifted DC problem.
#[derive(Debug, Clone)]
pub struct LiftedPoint {
    pub q: DMatrix<f64>,
    pub p: DVector<f64>,
}

/// Indexing scheme for the packed upper triangle of a symmetric n x n
/// matrix, plus trace-dual vectorization so tr(A Q) = avec(A) . svec(Q).
#[derive(Debug, Clone)]
pub struct SymIndex {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl SymIndex {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                pairs.push((i, j));
            }
        }
        SymIndex { n, pairs }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn position(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // row i starts at i*n - i(i-1)/2
        i * self.n - i * (i.wrapping_sub(1)) / 2 + (j - i)
    }

    pub fn svec(&self, m: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.pairs.iter().map(|&(i, j)| m[(i, j)]))
    }

    /// Trace-dual packing: diagonal entries once, off-diagonals doubled.
    pub fn svec_dual(&self, m: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.pairs
                .iter()
                .map(|&(i, j)| if i == j { m[(i, j)] } else { 2.0 * m[(i, j)] }),
        )
    }

    pub fn unpack(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            m[(i, j)] = v[k];
            m[(j, i)] = v[k];
        }
        m
    }
}

/// One distinct quadratic class: difference classes sharing the same
/// outer-product matrices E_mk,i collapse here, since every objective term
/// depends on e_mk only through p^T A p or tr(A Q).
#[derive(Debug, Clone)]
pub struct QuadClass {
    /// Legitimate-link matrix (built from Psi_h), real symmetric PSD.
    pub a: DMatrix<f64>,
    /// Eavesdropper-link matrix (built from Psi_g), real symmetric PSD.
    pub b: DMatrix<f64>,
    pub avec: DVector<f64>,
    pub bvec: DVector<f64>,
}

/// Precomputed real symmetric quadratic forms of one scenario.
#[derive(Debug, Clone)]
pub struct LiftedQuadratics {
    /// Number of real precoder variables: 2 (N_T1^2 + N_T2^2).
    pub dim: usize,
    pub n_symbols: usize,
    pub shapes: (usize, usize),
    pub classes: Vec<QuadClass>,
    /// Per symbol row m: (quadratic class index, multiplicity).
    pub rows: Vec<Vec<(u32, f64)>>,
    pub c: [DMatrix<f64>; 2],
    pub d: Vec<DMatrix<f64>>,
    pub cvec: [DVector<f64>; 2],
    pub dvec: Vec<DVector<f64>>,
    pub h_eigs: Vec<f64>,
    pub g_eigs: Vec<f64>,
    pub beta: [f64; 2],
    pub gamma: Vec<f64>,
    pub sigma_r2: f64,
    pub sigma_e2: f64,
    pub sym: SymIndex,
}

pub fn vectorize(p1: &CMatrix, p2: &CMatrix) -> DVector<f64> {
    let len = p1.len() + p2.len();
    let mut out = DVector::zeros(2 * len);
    for (k, z) in p1.iter().chain(p2.iter()).enumerate() {
        out[k] = z.re;
        out[k + len] = z.im;
    }
    out
}

pub fn devectorize(p: &DVector<f64>, shapes: (usize, usize)) -> Result<(CMatrix, CMatrix)> {
    let (n1, n2) = shapes;
    let len = n1 * n1 + n2 * n2;
    if p.len() != 2 * len {
        return Err(Error::ShapeMismatch(format!(
            "vector length {} does not match 2({}^2 + {}^2)",
            p.len(),
            n1,
            n2
        )));
    }
    let zs: Vec<Complex64> = (0..len)
        .map(|k| Complex64::new(p[k], p[k + len]))
        .collect();
    let p1 = CMatrix::from_column_slice(n1, n1, &zs[..n1 * n1]);
    let p2 = CMatrix::from_column_slice(n2, n2, &zs[n1 * n1..]);
    Ok((p1, p2))
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix, so
/// that p^T M p = phat^H Mhat phat for p = [Re phat; Im phat].
fn embed_hermitian(m: &CMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
            out[(i + n, j + n)] = z.re;
        }
    }
    // enforce exact symmetry against rounding in the Hermitian input
    let t = out.transpose();
    (out + t).scale(0.5)
}

fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), b.shape()).copy_from(*b);
        off += b.nrows();
    }
    out
}

fn snap12(x: f64) -> f64 {
    let s = (x * 1e12).round();
    if s == 0.0 {
        0.0
    } else {
        s / 1e12
    }
}

/// Key for grouping difference classes by their outer-product matrices.
fn quad_key(e1: &[Complex64], e2: &[Complex64]) -> Vec<u64> {
    let mut key = Vec::with_capacity(2 * (e1.len() * e1.len() + e2.len() * e2.len()));
    for e in [e1, e2] {
        for a in e {
            for b in e {
                let z = a * b.conj();
                key.push(snap12(z.re).to_bits());
                key.push(snap12(z.im).to_bits());
            }
        }
    }
    key
}

fn outer_conj_t(e: &[Complex64]) -> CMatrix {
    // (e e^H)^T
    let n = e.len();
    CMatrix::from_fn(n, n, |i, j| e[i].conj() * e[j])
}

/// Build the lifted quadratic matrices from the difference classes.
pub fn build_quadratics(
    corr: &CorrelationSet,
    en: &SymbolEnumeration,
    classes: &[DifferenceClass],
    beta: [f64; 2],
    gamma: Vec<f64>,
    sigma_r2: f64,
    sigma_e2: f64,
    memory_cap: usize,
) -> Result<LiftedQuadratics> {
    let (nt1, nt2) = en.n_streams_per_tx;
    let hat_dim = nt1 * nt1 + nt2 * nt2;
    let dim = 2 * hat_dim;
    if gamma.len() != corr.n_pr() {
        return Err(Error::ShapeMismatch(
            "one interference threshold per primary receiver required".into(),
        ));
    }

    // group difference classes that share (E_mk,1, E_mk,2)
    let mut key_index: std::collections::HashMap<Vec<u64>, usize> = std::collections::HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        let key = quad_key(c.e1(nt1), c.e2(nt1));
        match key_index.entry(key) {
            std::collections::hash_map::Entry::Occupied(o) => groups[*o.get()].push(ci),
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(groups.len());
                groups.push(vec![ci]);
            }
        }
    }

    let estimate = groups.len() * 2 * dim * dim * 8;
    if estimate > memory_cap {
        return Err(Error::InvalidParameter(format!(
            "lifted matrices need about {estimate} bytes, above the cap {memory_cap}"
        )));
    }

    let sym = SymIndex::new(dim);
    let mut quad_classes = Vec::with_capacity(groups.len());
    for group in &groups {
        let rep = &classes[group[0]];
        let e1 = outer_conj_t(rep.e1(nt1));
        let e2 = outer_conj_t(rep.e2(nt1));
        let build = |psi1: &CMatrix, psi2: &CMatrix| -> DMatrix<f64> {
            let b1 = kron(&e1, psi1);
            let b2 = kron(&e2, psi2);
            embed_hermitian(&block_diag(&[&b1, &b2])).scale(0.5)
        };
        let a = build(&corr.psi_h[0], &corr.psi_h[1]);
        let b = build(&corr.psi_g[0], &corr.psi_g[1]);
        let avec = sym.svec_dual(&a);
        let bvec = sym.svec_dual(&b);
        quad_classes.push(QuadClass { a, b, avec, bvec });
    }

    // per-row multiplicities over quadratic classes
    let e_rows = row_table(classes, en.count);
    let mut class_to_quad = vec![0u32; classes.len()];
    for (qi, group) in groups.iter().enumerate() {
        for &ci in group {
            class_to_quad[ci] = qi as u32;
        }
    }
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(en.count);
    for row in &e_rows {
        let mut acc: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
        for &(ci, mult) in row {
            *acc.entry(class_to_quad[ci as usize]).or_insert(0.0) += mult as f64;
        }
        rows.push(acc.into_iter().collect());
    }

    // power selector matrices C_i (diagonal in the real embedding)
    let mut c1 = DMatrix::zeros(dim, dim);
    let mut c2 = DMatrix::zeros(dim, dim);
    for k in 0..nt1 * nt1 {
        c1[(k, k)] = 1.0;
        c1[(k + hat_dim, k + hat_dim)] = 1.0;
    }
    for k in 0..nt2 * nt2 {
        c2[(nt1 * nt1 + k, nt1 * nt1 + k)] = 1.0;
        c2[(nt1 * nt1 + k + hat_dim, nt1 * nt1 + k + hat_dim)] = 1.0;
    }

    // interference matrices D_j
    let mut d = Vec::with_capacity(corr.n_pr());
    for j in 0..corr.n_pr() {
        let tr_phi: f64 = corr.phi_f[j].diagonal().iter().map(|z| z.re).sum();
        let i1 = CMatrix::identity(nt1, nt1);
        let i2 = CMatrix::identity(nt2, nt2);
        let b1 = kron(&i1, &corr.psi_f[j][0]);
        let b2 = kron(&i2, &corr.psi_f[j][1]);
        d.push(embed_hermitian(&block_diag(&[&b1, &b2])).scale(tr_phi));
    }

    let cvec = [sym.svec_dual(&c1), sym.svec_dual(&c2)];
    let dvec = d.iter().map(|m| sym.svec_dual(m)).collect();

    Ok(LiftedQuadratics {
        dim,
        n_symbols: en.count,
        shapes: (nt1, nt2),
        classes: quad_classes,
        rows,
        c: [c1, c2],
        d,
        cvec,
        dvec,
        h_eigs: hermitian_eigenvalues(&corr.phi_h),
        g_eigs: hermitian_eigenvalues(&corr.phi_g),
        beta,
        gamma,
        sigma_r2,
        sigma_e2,
        sym,
    })
}

impl LiftedQuadratics {
    pub fn side_params(&self, side: Side) -> (&[f64], f64) {
        match side {
            Side::Legitimate => (&self.h_eigs, self.sigma_r2),
            Side::Eavesdropper => (&self.g_eigs, self.sigma_e2),
        }
    }

    pub fn class_matrix(&self, side: Side, ci: usize) -> &DMatrix<f64> {
        match side {
            Side::Legitimate => &self.classes[ci].a,
            Side::Eavesdropper => &self.classes[ci].b,
        }
    }

    pub fn class_vec(&self, side: Side, ci: usize) -> &DVector<f64> {
        match side {
            Side::Legitimate => &self.classes[ci].avec,
            Side::Eavesdropper => &self.classes[ci].bvec,
        }
    }

    /// Copy with different noise variances; everything else is shared data
    /// independent of sigma^2, so SNR sweeps avoid a rebuild.
    pub fn with_noise(&self, sigma_r2: f64, sigma_e2: f64) -> Self {
        let mut out = self.clone();
        out.sigma_r2 = sigma_r2;
        out.sigma_e2 = sigma_e2;
        out
    }

    /// Per-class quadratic forms p^T M p.
    fn class_forms_p(&self, side: Side, p: &DVector<f64>) -> Result<Vec<f64>> {
        let mut s = Vec::with_capacity(self.classes.len());
        for ci in 0..self.classes.len() {
            let m = self.class_matrix(side, ci);
            let v = (p.transpose() * m * p)[(0, 0)];
            if v < -1e-9 {
                return Err(Error::NotPsd(v));
            }
            s.push(v.max(0.0));
        }
        Ok(s)
    }

    /// Per-class traces tr(M Q) from the packed symmetric coordinates of Q.
    fn class_forms_svec(&self, side: Side, x: &DVector<f64>) -> Vec<f64> {
        (0..self.classes.len())
            .map(|ci| self.class_vec(side, ci).dot(x))
            .collect()
    }

    /// (1/N) sum_m log2 sum_k prod_q (1 + lambda_q s / sigma^2)^{-1}, the
    /// common log-sum-of-products term, from per-class scalars s_c >= 0.
    fn log_term_from_forms(&self, side: Side, s: &[f64], sigma2: f64) -> Result<f64> {
        let (eigs, _) = self.side_params(side);
        let mut t = Vec::with_capacity(s.len());
        for (ci, &sc) in s.iter().enumerate() {
            let mut u = 0.0;
            for &l in eigs {
                let factor = 1.0 + l * sc / sigma2;
                if factor <= 0.0 {
                    return Err(Error::Solver(format!(
                        "nonpositive product factor in class {ci}: 1 + {l} * {sc} / {sigma2}"
                    )));
                }
                u += factor.ln();
            }
            t.push((-u).exp());
        }
        let n = self.n_symbols as f64;
        let mut acc = 0.0;
        for row in &self.rows {
            let mut sum = 0.0;
            for &(ci, mult) in row {
                sum += mult * t[ci as usize];
            }
            acc += sum.ln();
        }
        let val = acc / (n * std::f64::consts::LN_2);
        if !val.is_finite() {
            return Err(Error::NonFinite("log-sum-of-products term".into()));
        }
        Ok(val)
    }

    pub fn log_term_p(&self, side: Side, p: &DVector<f64>, sigma2: f64) -> Result<f64> {
        let s = self.class_forms_p(side, p)?;
        self.log_term_from_forms(side, &s, sigma2)
    }

    pub fn log_term_q(&self, side: Side, q: &DMatrix<f64>) -> Result<f64> {
        let x = self.sym.svec(q);
        let s = self.class_forms_svec(side, &x);
        let (_, sigma2) = self.side_params(side);
        self.log_term_from_forms(side, &s, sigma2)
    }
}

/// f(p): the eavesdropper-side log-sum-of-products term (to be maximized).
pub fn f_of_p(p: &DVector<f64>, quad: &LiftedQuadratics) -> Result<f64> {
    quad.log_term_p(Side::Eavesdropper, p, quad.sigma_e2)
}

/// g(p): the legitimate-side log-sum-of-products term.
pub fn g_of_p(p: &DVector<f64>, quad: &LiftedQuadratics) -> Result<f64> {
    quad.log_term_p(Side::Legitimate, p, quad.sigma_r2)
}

pub fn f_minus_g(p: &DVector<f64>, quad: &LiftedQuadratics) -> Result<f64> {
    Ok(f_of_p(p, quad)? - g_of_p(p, quad)?)
}

/// F(Q): convex lift of f with tr(B_mk Q) replacing p^T B_mk p.
pub fn big_f(q: &DMatrix<f64>, quad: &LiftedQuadratics) -> Result<f64> {
    quad.log_term_q(Side::Eavesdropper, q)
}

/// G(Q): convex lift of g.
pub fn big_g(q: &DMatrix<f64>, quad: &LiftedQuadratics) -> Result<f64> {
    quad.log_term_q(Side::Legitimate, q)
}

/// Value-only evaluation of the convex log-sum-of-products functional in
/// packed symmetric coordinates; the cheap path for line searches.
pub fn lse_value(quad: &LiftedQuadratics, side: Side, x: &DVector<f64>) -> Result<f64> {
    let s = quad.class_forms_svec(side, x);
    let (_, sigma2) = quad.side_params(side);
    quad.log_term_from_forms(side, &s, sigma2)
}

/// Value, gradient and (optionally) Hessian of the convex log-sum-of-products
/// functional in packed symmetric coordinates. Shared by grad_F, the CCP
/// tangent and the Newton subsolver.
pub fn lse_value_grad_hess(
    quad: &LiftedQuadratics,
    side: Side,
    x: &DVector<f64>,
    want_hess: bool,
) -> Result<(f64, DVector<f64>, Option<DMatrix<f64>>)> {
    let (eigs, sigma2) = quad.side_params(side);
    let nc = quad.classes.len();
    let s = quad.class_forms_svec(side, x);
    let mut t = vec![0.0; nc];
    let mut d1 = vec![0.0; nc]; // u'_c = sum_q lambda/(sigma2 + lambda s)
    let mut d2 = vec![0.0; nc]; // sum_q lambda^2/(sigma2 + lambda s)^2
    for ci in 0..nc {
        let mut u = 0.0;
        let mut a = 0.0;
        let mut b = 0.0;
        for &l in eigs {
            let denom = sigma2 + l * s[ci];
            if denom <= 0.0 {
                return Err(Error::Solver(format!(
                    "nonpositive product factor in class {ci} of the lifted objective"
                )));
            }
            u += (denom / sigma2).ln();
            a += l / denom;
            b += (l / denom) * (l / denom);
        }
        t[ci] = (-u).exp();
        d1[ci] = a;
        d2[ci] = b;
    }

    let n = quad.n_symbols as f64;
    let ln2 = std::f64::consts::LN_2;
    let mut value = 0.0;
    // class coefficients aggregated over rows
    let mut w_lin = vec![0.0; nc]; // sum_m mult t / R_m
    let mut w_sq = vec![0.0; nc]; // sum_m mult t (d1^2 + d2) / R_m
    let mut hess = want_hess.then(|| DMatrix::zeros(x.len(), x.len()));
    for row in &quad.rows {
        let mut r = 0.0;
        for &(ci, mult) in row {
            r += mult * t[ci as usize];
        }
        value += r.ln();
        for &(ci, mult) in row {
            let c = ci as usize;
            w_lin[c] += mult * t[c] / r;
            if want_hess {
                w_sq[c] += mult * t[c] * (d1[c] * d1[c] + d2[c]) / r;
            }
        }
        if let Some(h) = hess.as_mut() {
            // rank-one softmax correction per row
            let mut bm: DVector<f64> = DVector::zeros(x.len());
            for &(ci, mult) in row {
                let c = ci as usize;
                bm.axpy(mult * d1[c] * t[c] / r, quad.class_vec(side, c), 1.0);
            }
            h.ger(-1.0 / (n * ln2), &bm, &bm, 1.0);
        }
    }
    value /= n * ln2;

    let mut grad: DVector<f64> = DVector::zeros(x.len());
    for c in 0..nc {
        if w_lin[c] != 0.0 {
            grad.axpy(-w_lin[c] * d1[c] / (n * ln2), quad.class_vec(side, c), 1.0);
        }
    }
    if let Some(h) = hess.as_mut() {
        for c in 0..nc {
            if w_sq[c] != 0.0 {
                let v = quad.class_vec(side, c);
                h.ger(w_sq[c] / (n * ln2), v, v, 1.0);
            }
        }
    }
    Ok((value, grad, hess))
}

/// Analytic gradient of F(Q), as a symmetric matrix.
pub fn grad_f(qc: &DMatrix<f64>, quad: &LiftedQuadratics) -> Result<DMatrix<f64>> {
    let x = quad.sym.svec(qc);
    let (_, grad, _) = lse_value_grad_hess(quad, Side::Eavesdropper, &x, false)?;
    // grad is in trace-dual coordinates: dF = <grad_vec, d svec(Q)>; the
    // matrix gradient has grad[k] on the diagonal and grad[k]/2 off it.
    let mut m = DMatrix::zeros(quad.dim, quad.dim);
    for (k, &(i, j)) in quad.sym.pairs.iter().enumerate() {
        if i == j {
            m[(i, i)] = grad[k];
        } else {
            m[(i, j)] = grad[k] / 2.0;
            m[(j, i)] = grad[k] / 2.0;
        }
    }
    Ok(m)
}

/// Tangent-surrogate value: F(Qc) + tr(grad_F(Qc)^T (Q - Qc)) - G(Q).
pub fn surrogate_value(
    q: &DMatrix<f64>,
    qc: &DMatrix<f64>,
    quad: &LiftedQuadratics,
) -> Result<f64> {
    let fc = big_f(qc, quad)?;
    let gf = grad_f(qc, quad)?;
    let lin = (gf.transpose() * (q - qc)).trace();
    Ok(fc + lin - big_g(q, quad)?)
}

/// Componentwise exact bound of the feasible ellipsoid intersection:
/// u_i = min over constraints of max p_i subject to p^T M p <= budget.
pub fn initial_box(quad: &LiftedQuadratics) -> Result<BoxBounds> {
    let n = quad.dim;
    let mut u = vec![f64::INFINITY; n];
    let mut constraints: Vec<(&DMatrix<f64>, f64)> = Vec::new();
    constraints.push((&quad.c[0], quad.beta[0]));
    constraints.push((&quad.c[1], quad.beta[1]));
    for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
        constraints.push((dj, gj));
    }
    for (m, budget) in constraints {
        if budget <= 0.0 {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0));
        if is_diag {
            for i in 0..n {
                if m[(i, i)] > 0.0 {
                    u[i] = u[i].min((budget / m[(i, i)]).sqrt());
                }
            }
        } else if let Some(chol) = m.clone().cholesky() {
            // max p_i over the ellipsoid is sqrt(budget * (M^{-1})_{ii})
            let inv = chol.inverse();
            for i in 0..n {
                u[i] = u[i].min((budget * inv[(i, i)]).sqrt());
            }
        }
        // singular non-diagonal constraints give no safe componentwise bound
    }
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::UnboundedBox(i));
    }
    let upper = DVector::from_vec(u);
    let lower = -upper.clone();
    BoxBounds::new(lower, upper)
}

/// Membership report for the box-product set S(B).
#[derive(Debug, Clone)]
pub struct SetMembership {
    pub is_member: bool,
    /// Most negative slack; nonnegative when the point is a member.
    pub worst_margin: f64,
    pub worst_constraint: String,
}

/// Membership report for C(B): S(B) plus Q >= p p^T and the trace budgets.
#[derive(Debug, Clone)]
pub struct ConeMembership {
    pub is_member: bool,
    /// (constraint name, signed margin); negative margin means violated.
    pub margins: Vec<(String, f64)>,
}

pub fn membership_s(point: &LiftedPoint, bounds: &BoxBounds, tol: f64) -> SetMembership {
    let n = bounds.dim();
    let (q, p) = (&point.q, &point.p);
    let (l, u) = (&bounds.lower, &bounds.upper);
    let mut worst = f64::INFINITY;
    let mut name = String::from("none");
    let mut track = |margin: f64, label: &dyn Fn() -> String| {
        if margin < worst {
            worst = margin;
            name = label();
        }
    };
    for i in 0..n {
        track(p[i] - l[i], &|| format!("p[{i}] >= l[{i}]"));
        track(u[i] - p[i], &|| format!("p[{i}] <= u[{i}]"));
        for j in 0..n {
            if j >= i {
                let s1 = q[(i, j)] - l[i] * p[j] - l[j] * p[i] + l[i] * l[j];
                track(s1, &|| format!("lower-product[{i},{j}]"));
                let s2 = q[(i, j)] - u[i] * p[j] - u[j] * p[i] + u[i] * u[j];
                track(s2, &|| format!("upper-product[{i},{j}]"));
            }
            // cross product constraint is <= 0 over all ordered pairs
            let s3 = q[(i, j)] - l[i] * p[j] - p[i] * u[j] + l[i] * u[j];
            track(-s3, &|| format!("cross-product[{i},{j}]"));
        }
    }
    SetMembership {
        is_member: worst >= -tol,
        worst_margin: worst,
        worst_constraint: name,
    }
}

/// Minimum eigenvalue of the bordered matrix [[Q, p], [p^T, 1]]; nonnegative
/// exactly when Q >= p p^T.
pub fn bordered_min_eig(point: &LiftedPoint) -> f64 {
    let n = point.p.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&point.q);
    for i in 0..n {
        m[(i, n)] = point.p[i];
        m[(n, i)] = point.p[i];
    }
    m[(n, n)] = 1.0;
    m.symmetric_eigenvalues().min()
}

pub fn membership_c(
    point: &LiftedPoint,
    bounds: &BoxBounds,
    quad: &LiftedQuadratics,
    tol: f64,
) -> ConeMembership {
    let mut margins = Vec::new();
    let s = membership_s(point, bounds, tol);
    margins.push((format!("S(B): {}", s.worst_constraint), s.worst_margin));
    margins.push(("Q >= p p^T (bordered min eig)".into(), bordered_min_eig(point)));
    let x = quad.sym.svec(&point.q);
    for i in 0..2 {
        margins.push((
            format!("power budget {}", i + 1),
            quad.beta[i] - quad.cvec[i].dot(&x),
        ));
    }
    for (j, dv) in quad.dvec.iter().enumerate() {
        margins.push((
            format!("interference budget {}", j + 1),
            quad.gamma[j] - dv.dot(&x),
        ));
    }
    let is_member = margins.iter().all(|&(_, m)| m >= -tol);
    ConeMembership { is_member, margins }
}

/// Membership of a plain precoder vector in the feasible set P.
pub fn membership_p(p: &DVector<f64>, quad: &LiftedQuadratics, tol: f64) -> (bool, f64) {
    let mut worst = f64::INFINITY;
    for i in 0..2 {
        let v = (p.transpose() * &quad.c[i] * p)[(0, 0)];
        worst = worst.min(quad.beta[i] - v);
    }
    for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
        let v = (p.transpose() * dj * p)[(0, 0)];
        worst = worst.min(gj - v);
    }
    (worst >= -tol, worst)
}

/// DC-shift constant of the naive representation: k = alpha * max(tr(Phi_h)
/// lambda_max(Psi_h), tr(Phi_g) lambda_max(Psi_g)) with alpha the sum of
/// ||e_mk||^2 over all symbol pairs. Documentation and property tests only;
/// the shifted-DC algorithm itself is deliberately not implemented.
pub fn dc_shift_k(classes: &[DifferenceClass], corr: &CorrelationSet) -> f64 {
    let alpha: f64 = classes
        .iter()
        .map(|c| c.norm_sqr() * c.total_multiplicity() as f64)
        .sum();
    let lmax = |ms: &[CMatrix; 2]| -> f64 {
        ms.iter()
            .flat_map(|m| hermitian_eigenvalues(m))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let tr = |m: &CMatrix| -> f64 { m.diagonal().iter().map(|z| z.re).sum() };
    alpha * (tr(&corr.phi_h) * lmax(&corr.psi_h)).max(tr(&corr.phi_g) * lmax(&corr.psi_g))
}

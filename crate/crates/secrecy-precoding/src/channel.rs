//! Kronecker-correlated fading model: exponential correlation matrices,
//! Hermitian matrix square roots, channel sampling for Monte-Carlo oracles,
//! and the closed-form average interference power at a primary receiver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Exponential correlation model: entry (i, j) = rho^{|i-j|}.
pub fn exp_correlation(rho: f64, n: usize) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "correlation coefficient {rho} outside [0, 1)"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("matrix size must be >= 1".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        rho.powi((i as i32 - j as i32).abs())
    }))
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Hermitian check within tolerance.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a complex matrix.
fn real_embedding(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    // The real embedding of a Hermitian matrix is symmetric with every
    // eigenvalue of m doubled in multiplicity.
    let emb = real_embedding(m);
    let mut eig: Vec<f64> = emb.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig.into_iter().step_by(2).collect()
}

/// Hermitian PSD square root via eigendecomposition with clamping of small
/// negative eigenvalues at zero.
pub fn matrix_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    if n != m.ncols() || !is_hermitian(m, 1e-10) {
        return Err(Error::ShapeMismatch("matrix_sqrt needs a Hermitian matrix".into()));
    }
    let emb = real_embedding(m);
    let se = nalgebra::SymmetricEigen::new(emb);
    let min_eig = se.eigenvalues.min();
    if min_eig < -1e-6 {
        return Err(Error::NotPsd(min_eig));
    }
    let sqrt_vals = se.eigenvalues.map(|l| l.max(0.0).sqrt());
    let sqrt_emb =
        &se.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * se.eigenvectors.transpose();
    // extract the complex matrix back out of its real embedding
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = Complex64::new(sqrt_emb[(i, j)], 0.5 * (sqrt_emb[(i + n, j)] - sqrt_emb[(i, j + n)]));
        }
    }
    // re-symmetrize
    let outh = out.adjoint();
    Ok((out + outh).scale(0.5))
}

/// All correlation matrices of one scenario, stored together with their
/// Hermitian square roots so sampling is cheap.
#[derive(Debug, Clone)]
pub struct CorrelationSet {
    pub phi_h: CMatrix,
    pub phi_g: CMatrix,
    pub psi_h: [CMatrix; 2],
    pub psi_g: [CMatrix; 2],
    pub phi_f: Vec<CMatrix>,
    pub psi_f: Vec<[CMatrix; 2]>,
    sqrt_phi_h: CMatrix,
    sqrt_phi_g: CMatrix,
    sqrt_psi_h: [CMatrix; 2],
    sqrt_psi_g: [CMatrix; 2],
    sqrt_phi_f: Vec<CMatrix>,
    sqrt_psi_f: Vec<[CMatrix; 2]>,
}

fn validate_corr(name: &str, m: &CMatrix) -> Result<()> {
    if !is_hermitian(m, 1e-12) {
        return Err(Error::InvalidParameter(format!("{name} not Hermitian")));
    }
    let min_eig = hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
    if min_eig < -1e-10 {
        return Err(Error::NotPsd(min_eig));
    }
    Ok(())
}

impl CorrelationSet {
    pub fn new(
        phi_h: CMatrix,
        phi_g: CMatrix,
        psi_h: [CMatrix; 2],
        psi_g: [CMatrix; 2],
        phi_f: Vec<CMatrix>,
        psi_f: Vec<[CMatrix; 2]>,
    ) -> Result<Self> {
        if phi_f.len() != psi_f.len() {
            return Err(Error::ShapeMismatch(
                "phi_f and psi_f must list the same number of primary receivers".into(),
            ));
        }
        validate_corr("phi_h", &phi_h)?;
        validate_corr("phi_g", &phi_g)?;
        for i in 0..2 {
            validate_corr("psi_h", &psi_h[i])?;
            validate_corr("psi_g", &psi_g[i])?;
        }
        for j in 0..phi_f.len() {
            validate_corr("phi_f", &phi_f[j])?;
            validate_corr("psi_f", &psi_f[j][0])?;
            validate_corr("psi_f", &psi_f[j][1])?;
        }
        let sqrt_phi_h = matrix_sqrt(&phi_h)?;
        let sqrt_phi_g = matrix_sqrt(&phi_g)?;
        let sqrt_psi_h = [matrix_sqrt(&psi_h[0])?, matrix_sqrt(&psi_h[1])?];
        let sqrt_psi_g = [matrix_sqrt(&psi_g[0])?, matrix_sqrt(&psi_g[1])?];
        let sqrt_phi_f: Vec<CMatrix> = phi_f.iter().map(matrix_sqrt).collect::<Result<_>>()?;
        let sqrt_psi_f: Vec<[CMatrix; 2]> = psi_f
            .iter()
            .map(|p| Ok([matrix_sqrt(&p[0])?, matrix_sqrt(&p[1])?]))
            .collect::<Result<_>>()?;
        Ok(CorrelationSet {
            phi_h,
            phi_g,
            psi_h,
            psi_g,
            phi_f,
            psi_f,
            sqrt_phi_h,
            sqrt_phi_g,
            sqrt_psi_h,
            sqrt_psi_g,
            sqrt_phi_f,
            sqrt_psi_f,
        })
    }

    pub fn n_pr(&self) -> usize {
        self.phi_f.len()
    }
}

/// One realization of every channel matrix in the system.
#[derive(Debug, Clone)]
pub struct ChannelDraw {
    pub h: [CMatrix; 2],
    pub g: [CMatrix; 2],
    pub f: Vec<[CMatrix; 2]>,
}

/// i.i.d. CN(0, 1) matrix: (x + iy)/sqrt(2) with x, y standard normal.
pub fn standard_complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        Complex64::new(x * s, y * s)
    })
}

/// CN(0, sigma2 I) noise vector.
pub fn complex_gaussian_noise<R: Rng + ?Sized>(n: usize, sigma2: f64, rng: &mut R) -> DVector<Complex64> {
    let s = (sigma2 / 2.0).sqrt();
    DVector::from_fn(n, |_, _| {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        Complex64::new(x * s, y * s)
    })
}

/// Draw every channel matrix as Phi^{1/2} W Psi^{1/2}. Deterministic given
/// the rng state; draw order is fixed (H1, H2, G1, G2, F11, F21, F12, ...).
pub fn sample_channel<R: Rng + ?Sized>(corr: &CorrelationSet, rng: &mut R) -> ChannelDraw {
    let one = |phi_sqrt: &CMatrix, psi_sqrt: &CMatrix, rng: &mut R| {
        let w = standard_complex_gaussian(phi_sqrt.nrows(), psi_sqrt.nrows(), rng);
        phi_sqrt * w * psi_sqrt
    };
    let h = [
        one(&corr.sqrt_phi_h, &corr.sqrt_psi_h[0], rng),
        one(&corr.sqrt_phi_h, &corr.sqrt_psi_h[1], rng),
    ];
    let g = [
        one(&corr.sqrt_phi_g, &corr.sqrt_psi_g[0], rng),
        one(&corr.sqrt_phi_g, &corr.sqrt_psi_g[1], rng),
    ];
    let f = (0..corr.n_pr())
        .map(|j| {
            [
                one(&corr.sqrt_phi_f[j], &corr.sqrt_psi_f[j][0], rng),
                one(&corr.sqrt_phi_f[j], &corr.sqrt_psi_f[j][1], rng),
            ]
        })
        .collect();
    ChannelDraw { h, g, f }
}

/// Average interference power at PR j: tr(Phi_fj) * sum_i tr(P_i^H Psi_fij P_i).
pub fn interference_closed_form(
    p1: &CMatrix,
    p2: &CMatrix,
    phi_fj: &CMatrix,
    psi_f1j: &CMatrix,
    psi_f2j: &CMatrix,
) -> f64 {
    let tr_phi: f64 = phi_fj.diagonal().iter().map(|z| z.re).sum();
    let quad = |p: &CMatrix, psi: &CMatrix| -> f64 {
        (p.adjoint() * psi * p).diagonal().iter().map(|z| z.re).sum()
    };
    tr_phi * (quad(p1, psi_f1j) + quad(p2, psi_f2j))
}

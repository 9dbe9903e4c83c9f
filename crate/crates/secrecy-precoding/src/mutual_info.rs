//! Two evaluators of the average secrecy objective: an unbiased Monte-Carlo
//! estimator of the exact constellation-constrained average mutual
//! information and its closed-form approximation built on the lifted
//! quadratic forms.

use nalgebra::{DVector, DMatrix};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{complex_gaussian_noise, sample_channel, CMatrix, CorrelationSet};
use crate::constellation::{difference_classes, row_table, SymbolEnumeration};
use crate::lift::{LiftedQuadratics, Side};
use crate::{Error, Result};

/// Default Monte-Carlo sampling effort for the exact estimator.
pub const DEFAULT_CHANNEL_SAMPLES: usize = 10_000;
pub const DEFAULT_NOISE_SAMPLES: usize = 100;

/// Monte-Carlo estimate of an average mutual information, in bits per
/// channel use.
#[derive(Debug, Clone, Copy)]
pub struct MiEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_channel_samples: usize,
    pub n_noise_samples: usize,
}

impl MiEstimate {
    /// The estimate must land in [0, log2 N] up to sampling noise.
    pub fn check_invariants(&self, n_symbols: usize) -> Result<()> {
        let hi = (n_symbols as f64).log2() + 3.0 * self.std_error;
        if self.value < -3.0 * self.std_error || self.value > hi {
            return Err(Error::NonFinite(format!(
                "mutual information estimate {} outside [0, log2 N] band",
                self.value
            )));
        }
        Ok(())
    }
}

/// Unbiased Monte-Carlo estimate of the exact average mutual information
/// log N - (1/N) sum_m E{ log sum_k exp[(-||H P e_mk + n||^2 + ||n||^2) / sigma^2] }
/// for the selected receiver side. One fresh noise vector is drawn per
/// channel draw, noise repetition and symbol row; the inner log-sum runs in
/// the max-shifted log domain.
#[allow(clippy::too_many_arguments)]
pub fn mi_exact_mc<R: Rng + ?Sized>(
    p1: &CMatrix,
    p2: &CMatrix,
    corr: &CorrelationSet,
    side: Side,
    sigma2: f64,
    en: &SymbolEnumeration,
    n_channel_samples: usize,
    n_noise_samples: usize,
    rng: &mut R,
) -> Result<MiEstimate> {
    if sigma2 <= 0.0 {
        return Err(Error::InvalidParameter("sigma2 must be positive".into()));
    }
    if n_channel_samples == 0 || n_noise_samples == 0 {
        return Err(Error::InvalidParameter("sample counts must be >= 1".into()));
    }
    let (nt1, _) = en.n_streams_per_tx;
    let classes = difference_classes(en);
    let rows = row_table(&classes, en.count);
    let n_sym = en.count as f64;
    let ln2 = std::f64::consts::LN_2;
    let n_r = corr.phi_h.nrows();

    let mut per_draw = Vec::with_capacity(n_channel_samples);
    for d in 0..n_channel_samples {
        let draw = sample_channel(corr, rng);
        let (h1, h2) = match side {
            Side::Legitimate => (&draw.h[0], &draw.h[1]),
            Side::Eavesdropper => (&draw.g[0], &draw.g[1]),
        };
        let hp1 = h1 * p1;
        let hp2 = h2 * p2;
        // noise-independent received difference vectors, one per class
        let v: Vec<DVector<Complex64>> = classes
            .iter()
            .map(|c| {
                let e1 = DVector::from_column_slice(c.e1(nt1));
                let e2 = DVector::from_column_slice(c.e2(nt1));
                &hp1 * e1 + &hp2 * e2
            })
            .collect();
        let vn: Vec<f64> = v.iter().map(|x| x.norm_squared()).collect();

        let mut acc = 0.0;
        let mut exps: Vec<(f64, f64)> = Vec::new();
        for _ in 0..n_noise_samples {
            for (m, row) in rows.iter().enumerate() {
                let noise = complex_gaussian_noise(n_r, sigma2, rng);
                exps.clear();
                let mut hi = f64::NEG_INFINITY;
                for &(ci, mult) in row {
                    let c = ci as usize;
                    let x = (-vn[c] - 2.0 * v[c].dotc(&noise).re) / sigma2;
                    hi = hi.max(x);
                    exps.push((x, mult as f64));
                }
                let sum: f64 = exps.iter().map(|&(x, w)| w * (x - hi).exp()).sum();
                let log_sum = hi + sum.ln();
                if !log_sum.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "inner log-sum at channel draw {d}, symbol row {m}"
                    )));
                }
                // accumulate the information per row (ln N - log-sum) so the
                // zero precoder yields an exact zero
                acc += n_sym.ln() - log_sum;
            }
        }
        // this draw's contribution, in nats
        per_draw.push(acc / (n_sym * n_noise_samples as f64));
    }

    let d = per_draw.len() as f64;
    let mean = per_draw.iter().sum::<f64>() / d;
    let var = if per_draw.len() > 1 {
        per_draw.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (d - 1.0)
    } else {
        0.0
    };
    Ok(MiEstimate {
        value: mean / ln2,
        std_error: (var / d).sqrt() / ln2,
        n_channel_samples,
        n_noise_samples,
    })
}

/// Closed-form approximation of the average mutual information:
/// log2 N - (1/N) sum_m log2 sum_k prod_q (1 + (lambda_q / sigma^2) p^T M_mk p)^{-1}.
pub fn mi_approx(
    p: &DVector<f64>,
    quad: &LiftedQuadratics,
    side: Side,
    sigma2: f64,
) -> Result<f64> {
    if sigma2 <= 0.0 {
        return Err(Error::InvalidParameter("sigma2 must be positive".into()));
    }
    Ok((quad.n_symbols as f64).log2() - quad.log_term_p(side, p, sigma2)?)
}

/// Approximated average secrecy sum rate without the [.]+ clamp:
/// mi_approx on the legitimate link minus mi_approx on the eavesdropper link.
pub fn secrecy_rate_approx(
    p: &DVector<f64>,
    quad: &LiftedQuadratics,
    sigma_r2: f64,
    sigma_e2: f64,
) -> Result<f64> {
    Ok(mi_approx(p, quad, Side::Legitimate, sigma_r2)?
        - mi_approx(p, quad, Side::Eavesdropper, sigma_e2)?)
}

/// Finite-alphabet secrecy rate of Hermitian input covariances, evaluated
/// through their square-root precoders. Used to score Gaussian-design
/// baselines on the actual constellation.
pub fn secrecy_rate_of_covariances(
    q1: &DMatrix<Complex64>,
    q2: &DMatrix<Complex64>,
    quad: &LiftedQuadratics,
) -> Result<f64> {
    let p1 = crate::channel::matrix_sqrt(q1)?;
    let p2 = crate::channel::matrix_sqrt(q2)?;
    let p = crate::lift::vectorize(&p1, &p2);
    secrecy_rate_approx(&p, quad, quad.sigma_r2, quad.sigma_e2)
}

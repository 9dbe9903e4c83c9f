//! Scenario configuration: antenna counts, modulations, Kronecker
//! correlation profiles, budgets, noise levels and solver knobs, with three
//! built-in profiles matching the evaluation setups, JSON (de)serialization
//! and derived-object builders.

use serde::Deserialize;

use crate::channel::{exp_correlation, to_complex, CMatrix, CorrelationSet};
use crate::constellation::{
    difference_classes, enumerate_vectors, make_constellation, ConstellationKind,
    SymbolEnumeration, DEFAULT_ENUMERATION_CAP,
};
use crate::lift::{build_quadratics, LiftedQuadratics, DEFAULT_MATRIX_MEMORY_CAP};
use crate::optimizer::{BnbConfig, CcpConfig};
use crate::subsolver::SubsolverConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Antennas {
    pub n_t1: usize,
    pub n_t2: usize,
    pub n_r: usize,
    pub n_e: usize,
    #[serde(default)]
    pub n_pr: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modulation {
    pub tx1: ConstellationKind,
    pub tx2: ConstellationKind,
}

/// One correlation matrix: either an exponential-model coefficient or an
/// explicit Hermitian matrix as real/imaginary row-major arrays.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CorrSpec {
    Rho { rho: f64 },
    Explicit { re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>> },
}

impl CorrSpec {
    pub fn build(&self, dim: usize, field: &str) -> Result<CMatrix> {
        match self {
            CorrSpec::Rho { rho } => {
                let m = exp_correlation(*rho, dim).map_err(|_| {
                    Error::Config(format!("{field}.rho must lie in [0, 1), got {rho}"))
                })?;
                Ok(to_complex(&m))
            }
            CorrSpec::Explicit { re, im } => {
                let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<()> {
                    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                        return Err(Error::Config(format!(
                            "{field}.{part} must be a {dim}x{dim} array"
                        )));
                    }
                    Ok(())
                };
                check(re, "re")?;
                if let Some(im) = im {
                    check(im, "im")?;
                }
                Ok(CMatrix::from_fn(dim, dim, |i, j| {
                    num_complex::Complex64::new(
                        re[i][j],
                        im.as_ref().map_or(0.0, |m| m[i][j]),
                    )
                }))
            }
        }
    }
}

/// Correlation profile of one primary receiver.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimarySpec {
    pub phi_f: CorrSpec,
    pub psi_f1: CorrSpec,
    pub psi_f2: CorrSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSpec {
    pub phi_h: CorrSpec,
    pub phi_g: CorrSpec,
    pub psi_h1: CorrSpec,
    pub psi_h2: CorrSpec,
    pub psi_g1: CorrSpec,
    pub psi_g2: CorrSpec,
    #[serde(default)]
    pub primaries: Vec<PrimarySpec>,
}

/// Monte-Carlo effort for the exact mutual-information estimator.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub channel_samples: usize,
    pub noise_samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            channel_samples: crate::mutual_info::DEFAULT_CHANNEL_SAMPLES,
            noise_samples: crate::mutual_info::DEFAULT_NOISE_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BnbSection {
    pub k_max: usize,
    pub gap_tol: f64,
}

impl Default for BnbSection {
    fn default() -> Self {
        BnbSection {
            k_max: 60,
            gap_tol: 0.002,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomizationSection {
    pub draws: usize,
}

impl Default for RandomizationSection {
    fn default() -> Self {
        RandomizationSection { draws: 100 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Channel draws of the sample-average approximation.
    pub samples: usize,
    pub ccp_epsilon: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            samples: 200,
            ccp_epsilon: 1e-4,
        }
    }
}

fn default_enumeration_cap() -> usize {
    DEFAULT_ENUMERATION_CAP
}

/// A full experiment description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub antennas: Antennas,
    pub modulation: Modulation,
    pub correlation: CorrelationSpec,
    pub beta: [f64; 2],
    pub gamma: Vec<f64>,
    /// Noise variance shared by both receivers; optional when every use
    /// derives it from an SNR grid.
    #[serde(default)]
    pub sigma2: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub subsolver: SubsolverConfig,
    #[serde(default)]
    pub ccp: CcpConfig,
    #[serde(default)]
    pub bnb: BnbSection,
    #[serde(default)]
    pub randomization: RandomizationSection,
    #[serde(default)]
    pub baseline: BaselineConfig,
    #[serde(default = "default_enumeration_cap")]
    pub enumeration_cap: usize,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// The built-in evaluation profiles: `paper-fig3`, `paper-fig45`,
    /// `paper-fig6`.
    pub fn builtin(name: &str) -> Result<Self> {
        let rho = |r: f64| CorrSpec::Rho { rho: r };
        let base = |correlation: CorrelationSpec,
                    modulation: Modulation,
                    gamma: Vec<f64>,
                    sigma2: f64,
                    n_pr: Vec<usize>| Scenario {
            name: Some(name.to_string()),
            antennas: Antennas {
                n_t1: 2,
                n_t2: 2,
                n_r: 2,
                n_e: 2,
                n_pr,
            },
            modulation,
            correlation,
            beta: [2.0, 2.0],
            gamma,
            sigma2: Some(sigma2),
            seed: 0,
            mc: McConfig::default(),
            subsolver: SubsolverConfig::default(),
            ccp: CcpConfig::default(),
            bnb: BnbSection::default(),
            randomization: RandomizationSection::default(),
            baseline: BaselineConfig::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        };
        let s = match name {
            "paper-fig3" => base(
                CorrelationSpec {
                    phi_h: rho(0.3),
                    phi_g: rho(0.6),
                    psi_h1: rho(0.95),
                    psi_h2: rho(0.85),
                    psi_g1: rho(0.4),
                    psi_g2: rho(0.95),
                    primaries: vec![PrimarySpec {
                        phi_f: rho(0.5),
                        psi_f1: rho(0.3),
                        psi_f2: rho(0.5),
                    }],
                },
                Modulation {
                    tx1: ConstellationKind::Bpsk,
                    tx2: ConstellationKind::Bpsk,
                },
                vec![0.2],
                0.1,
                vec![2],
            ),
            "paper-fig45" => base(
                CorrelationSpec {
                    phi_h: rho(0.25),
                    phi_g: rho(0.75),
                    psi_h1: rho(0.95),
                    psi_h2: rho(0.9),
                    psi_g1: rho(0.5),
                    psi_g2: rho(0.3),
                    primaries: vec![PrimarySpec {
                        phi_f: rho(0.5),
                        psi_f1: rho(0.8),
                        psi_f2: rho(0.5),
                    }],
                },
                Modulation {
                    tx1: ConstellationKind::Qpsk,
                    tx2: ConstellationKind::Qpsk,
                },
                vec![0.2],
                0.02, // 20 dB at beta = 2
                vec![2],
            ),
            "paper-fig6" => base(
                CorrelationSpec {
                    phi_h: rho(0.3),
                    phi_g: rho(0.6),
                    psi_h1: rho(0.9),
                    psi_h2: rho(0.95),
                    psi_g1: rho(0.7),
                    psi_g2: rho(0.2),
                    primaries: vec![
                        PrimarySpec {
                            phi_f: rho(0.4),
                            psi_f1: rho(0.6),
                            psi_f2: rho(0.4),
                        },
                        PrimarySpec {
                            phi_f: rho(0.5),
                            psi_f1: rho(0.3),
                            psi_f2: rho(0.5),
                        },
                    ],
                },
                Modulation {
                    tx1: ConstellationKind::Bpsk,
                    tx2: ConstellationKind::Bpsk,
                },
                vec![0.2, 0.2],
                0.1,
                vec![2, 2],
            ),
            other => {
                return Err(Error::Config(format!(
                    "unknown built-in scenario '{other}' (expected paper-fig3, paper-fig45 or paper-fig6)"
                )))
            }
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.antennas;
        for (v, field) in [
            (a.n_t1, "antennas.n_t1"),
            (a.n_t2, "antennas.n_t2"),
            (a.n_r, "antennas.n_r"),
            (a.n_e, "antennas.n_e"),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{field} must be positive")));
            }
        }
        if a.n_pr.iter().any(|&v| v == 0) {
            return Err(Error::Config("antennas.n_pr entries must be positive".into()));
        }
        if a.n_pr.len() != self.correlation.primaries.len() {
            return Err(Error::Config(format!(
                "antennas.n_pr has {} entries but correlation.primaries has {}",
                a.n_pr.len(),
                self.correlation.primaries.len()
            )));
        }
        if self.gamma.len() != a.n_pr.len() {
            return Err(Error::Config(format!(
                "gamma has {} entries but antennas.n_pr has {}",
                self.gamma.len(),
                a.n_pr.len()
            )));
        }
        for (i, &b) in self.beta.iter().enumerate() {
            if b <= 0.0 {
                return Err(Error::Config(format!("beta[{i}] must be positive")));
            }
        }
        for (j, &g) in self.gamma.iter().enumerate() {
            if g <= 0.0 {
                return Err(Error::Config(format!("gamma[{j}] must be positive")));
            }
        }
        if let Some(s2) = self.sigma2 {
            if s2 <= 0.0 {
                return Err(Error::Config("sigma2 must be positive".into()));
            }
        }
        // building the correlation set performs the Hermitian/PSD checks
        self.correlation_set()?;
        Ok(())
    }

    /// Noise variance from the SNR definition SNR = beta / sigma^2, with
    /// the (shared) power budget fixed.
    pub fn sigma2_for_snr_db(&self, snr_db: f64) -> f64 {
        self.beta[0] / 10f64.powf(snr_db / 10.0)
    }

    pub fn sigma2(&self) -> Result<f64> {
        self.sigma2.ok_or_else(|| {
            Error::Config("sigma2 is not set and no SNR grid was given".into())
        })
    }

    pub fn correlation_set(&self) -> Result<CorrelationSet> {
        let a = &self.antennas;
        let c = &self.correlation;
        let mut phi_f = Vec::new();
        let mut psi_f = Vec::new();
        for (j, p) in c.primaries.iter().enumerate() {
            phi_f.push(p.phi_f.build(a.n_pr[j], &format!("correlation.primaries[{j}].phi_f"))?);
            psi_f.push([
                p.psi_f1
                    .build(a.n_t1, &format!("correlation.primaries[{j}].psi_f1"))?,
                p.psi_f2
                    .build(a.n_t2, &format!("correlation.primaries[{j}].psi_f2"))?,
            ]);
        }
        CorrelationSet::new(
            c.phi_h.build(a.n_r, "correlation.phi_h")?,
            c.phi_g.build(a.n_e, "correlation.phi_g")?,
            [
                c.psi_h1.build(a.n_t1, "correlation.psi_h1")?,
                c.psi_h2.build(a.n_t2, "correlation.psi_h2")?,
            ],
            [
                c.psi_g1.build(a.n_t1, "correlation.psi_g1")?,
                c.psi_g2.build(a.n_t2, "correlation.psi_g2")?,
            ],
            phi_f,
            psi_f,
        )
    }

    pub fn enumeration(&self) -> Result<SymbolEnumeration> {
        let c1 = make_constellation(self.modulation.tx1);
        let c2 = make_constellation(self.modulation.tx2);
        enumerate_vectors(
            &c1,
            &c2,
            self.antennas.n_t1,
            self.antennas.n_t2,
            self.enumeration_cap,
        )
    }

    /// Build the lifted quadratics at the given noise variance.
    pub fn quadratics_at(&self, sigma2: f64) -> Result<LiftedQuadratics> {
        let corr = self.correlation_set()?;
        let en = self.enumeration()?;
        let classes = difference_classes(&en);
        build_quadratics(
            &corr,
            &en,
            &classes,
            self.beta,
            self.gamma.clone(),
            sigma2,
            sigma2,
            DEFAULT_MATRIX_MEMORY_CAP,
        )
    }

    pub fn quadratics(&self) -> Result<LiftedQuadratics> {
        self.quadratics_at(self.sigma2()?)
    }

    /// Assemble the outer-approximation configuration from the sections.
    pub fn bnb_config(&self) -> BnbConfig {
        BnbConfig {
            k_max: self.bnb.k_max,
            gap_tol: self.bnb.gap_tol,
            randomization_draws: self.randomization.draws,
            seed: self.seed,
            ccp: self.ccp.clone(),
            subsolver: self.subsolver.clone(),
        }
    }
}

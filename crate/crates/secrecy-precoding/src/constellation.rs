//! Finite constellations, composite transmit-vector enumeration, and the
//! deduplicated difference-vector classes that drive every mutual-information
//! sum in this crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::{Error, Result};

/// Default cap on the number of composite transmit vectors.
pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ConstellationKind {
    Bpsk,
    Qpsk,
    Psk8,
    Qam16,
}

impl ConstellationKind {
    pub fn order(self) -> usize {
        match self {
            ConstellationKind::Bpsk => 2,
            ConstellationKind::Qpsk => 4,
            ConstellationKind::Psk8 => 8,
            ConstellationKind::Qam16 => 16,
        }
    }
}

impl std::str::FromStr for ConstellationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BPSK" => Ok(ConstellationKind::Bpsk),
            "QPSK" => Ok(ConstellationKind::Qpsk),
            "PSK8" | "8PSK" => Ok(ConstellationKind::Psk8),
            "QAM16" | "16QAM" => Ok(ConstellationKind::Qam16),
            other => Err(Error::UnsupportedConstellation(other.to_string())),
        }
    }
}

/// Equiprobable unit-energy zero-mean constellation.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub kind: ConstellationKind,
    pub points: Vec<Complex64>,
    pub order: usize,
}

/// Snap a coordinate to a short canonical grid so bit-exact keying of
/// difference vectors is safe across construction orders.
fn snap(x: f64) -> f64 {
    let scaled = (x * 1e12).round();
    if scaled == 0.0 {
        0.0
    } else {
        scaled / 1e12
    }
}

pub fn make_constellation(kind: ConstellationKind) -> Constellation {
    let points: Vec<Complex64> = match kind {
        ConstellationKind::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        ConstellationKind::Qpsk => {
            let a = 1.0 / 2f64.sqrt();
            vec![
                Complex64::new(a, a),
                Complex64::new(a, -a),
                Complex64::new(-a, a),
                Complex64::new(-a, -a),
            ]
        }
        ConstellationKind::Psk8 => (0..8)
            .map(|k| {
                let th = std::f64::consts::PI / 4.0 * k as f64;
                Complex64::new(th.cos(), th.sin())
            })
            .collect(),
        ConstellationKind::Qam16 => {
            // 16-QAM on {-3,-1,1,3}^2 normalized to unit average energy (E = 10).
            let s = 1.0 / 10f64.sqrt();
            let levels = [-3.0, -1.0, 1.0, 3.0];
            levels
                .iter()
                .flat_map(|&re| levels.iter().map(move |&im| Complex64::new(re * s, im * s)))
                .collect()
        }
    };
    let c = Constellation {
        kind,
        order: points.len(),
        points,
    };
    debug_assert!(c.check_invariants().is_ok());
    c
}

impl Constellation {
    pub fn check_invariants(&self) -> Result<()> {
        let m = self.points.len();
        if m != self.order {
            return Err(Error::InvalidParameter("order mismatch".into()));
        }
        let energy: f64 = self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "average energy {energy} not unit"
            )));
        }
        let mean: Complex64 = self.points.iter().sum();
        if mean.norm() > 1e-12 * m as f64 {
            return Err(Error::InvalidParameter("constellation not zero mean".into()));
        }
        Ok(())
    }
}

/// All composite transmit vectors d_m over both transmitters, in
/// deterministic lexicographic order (transmitter 1 coordinates vary
/// slowest, the constellation index of the last coordinate fastest).
#[derive(Debug, Clone)]
pub struct SymbolEnumeration {
    pub n_streams_per_tx: (usize, usize),
    pub vectors: Vec<Vec<Complex64>>,
    pub count: usize,
}

pub fn enumerate_vectors(
    c1: &Constellation,
    c2: &Constellation,
    n_t1: usize,
    n_t2: usize,
    cap: usize,
) -> Result<SymbolEnumeration> {
    if n_t1 < 1 || n_t2 < 1 {
        return Err(Error::InvalidParameter(
            "antenna counts must be at least 1".into(),
        ));
    }
    let count = (c1.order as u128).pow(n_t1 as u32) * (c2.order as u128).pow(n_t2 as u32);
    if count > cap as u128 {
        return Err(Error::EnumerationTooLarge {
            computed: count,
            cap,
        });
    }
    let count = count as usize;
    let dim = n_t1 + n_t2;
    let mut vectors = Vec::with_capacity(count);
    let mut idx = vec![0usize; dim];
    let order_of = |coord: usize| if coord < n_t1 { c1.order } else { c2.order };
    loop {
        let v: Vec<Complex64> = idx
            .iter()
            .enumerate()
            .map(|(coord, &i)| {
                if coord < n_t1 {
                    c1.points[i]
                } else {
                    c2.points[i]
                }
            })
            .collect();
        vectors.push(v);
        // lexicographic increment, last coordinate fastest
        let mut pos = dim;
        loop {
            if pos == 0 {
                return Ok(SymbolEnumeration {
                    n_streams_per_tx: (n_t1, n_t2),
                    vectors,
                    count,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < order_of(pos) {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// One distinct difference vector e = d_m - d_k together with, for every
/// row m, how many columns k land in this class.
#[derive(Debug, Clone)]
pub struct DifferenceClass {
    pub e: Vec<Complex64>,
    /// (row m, count of columns k with d_m - d_k == e), rows sorted.
    pub multiplicity_by_row: Vec<(u32, u32)>,
}

impl DifferenceClass {
    pub fn e1<'a>(&'a self, n_t1: usize) -> &'a [Complex64] {
        &self.e[..n_t1]
    }
    pub fn e2<'a>(&'a self, n_t1: usize) -> &'a [Complex64] {
        &self.e[n_t1..]
    }
    pub fn total_multiplicity(&self) -> u64 {
        self.multiplicity_by_row.iter().map(|&(_, c)| c as u64).sum()
    }
    pub fn norm_sqr(&self) -> f64 {
        self.e.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn key_of(e: &[Complex64]) -> Vec<u64> {
    e.iter()
        .flat_map(|z| [snap(z.re).to_bits(), snap(z.im).to_bits()])
        .collect()
}

/// Deduplicate the N^2 difference vectors into classes keyed by exact value.
/// Class order is deterministic: by first (m, k) occurrence.
pub fn difference_classes(en: &SymbolEnumeration) -> Vec<DifferenceClass> {
    let n = en.count;
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut classes: Vec<DifferenceClass> = Vec::new();
    for m in 0..n {
        for k in 0..n {
            let e: Vec<Complex64> = en.vectors[m]
                .iter()
                .zip(&en.vectors[k])
                .map(|(a, b)| {
                    let d = a - b;
                    Complex64::new(snap(d.re), snap(d.im))
                })
                .collect();
            let key = key_of(&e);
            let ci = *index.entry(key).or_insert_with(|| {
                classes.push(DifferenceClass {
                    e,
                    multiplicity_by_row: Vec::new(),
                });
                classes.len() - 1
            });
            let rows = &mut classes[ci].multiplicity_by_row;
            match rows.last_mut() {
                Some((row, cnt)) if *row == m as u32 => *cnt += 1,
                _ => rows.push((m as u32, 1)),
            }
        }
    }
    classes
}

/// Row-major view: for each row m, the (class index, multiplicity) pairs.
pub fn row_table(classes: &[DifferenceClass], n_rows: usize) -> Vec<Vec<(u32, u32)>> {
    let mut rows = vec![Vec::new(); n_rows];
    for (ci, c) in classes.iter().enumerate() {
        for &(m, cnt) in &c.multiplicity_by_row {
            rows[m as usize].push((ci as u32, cnt));
        }
    }
    rows
}

//! Bohnenblust–Hille ratios `||coeffs||_{2d/(d+1)} / sup` and seeded scans
//! over random degree-`d` instances in four settings.
//!
//! Instances have i.i.d. standard Gaussian coefficients on the degree-`d`
//! index set: real for CUBE and GM (so GM observables are Hermitian),
//! complex for CYCLIC and HW.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::cyclic_fourier::{grid_size, low_degree_indices, lp_norm, CyclicPolynomial};
use crate::error::{Error, Result};
use crate::learn::{gm_low_degree_indices, walsh_hadamard};
use crate::linalg::complex_gaussian;
use crate::qudit_algebra::{hw_weighted_degree, is_prime, BasisKind, CoeffMap, Observable};
use crate::remez::remez_bound;
use crate::rng;
use crate::tensor;

/// Hypercube BH base constants for `d = 1..=6`: the largest ratio seen in
/// the calibration sweep (`cargo run --release --example calibrate`) with 10%
/// headroom, floored at 1 (the monomial equality case).
pub const CUBE_BASE: [f64; 6] = [1.1, 1.41, 1.15, 1.1, 1.1, 1.1];

pub const MAX_SCAN_DEGREE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "UPPERCASE")]
pub enum BhSetting {
    Cube,
    Cyclic,
    Gm,
    Hw,
}

impl std::str::FromStr for BhSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CUBE" => Ok(Self::Cube),
            "CYCLIC" => Ok(Self::Cyclic),
            "GM" => Ok(Self::Gm),
            "HW" => Ok(Self::Hw),
            other => Err(Error::InvalidArgument(format!("unknown setting {other}"))),
        }
    }
}

impl std::fmt::Display for BhSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Cube => "CUBE",
            Self::Cyclic => "CYCLIC",
            Self::Gm => "GM",
            Self::Hw => "HW",
        })
    }
}

/// `p = 2d/(d+1)`.
pub fn bh_exponent(d: usize) -> f64 {
    2.0 * d as f64 / (d as f64 + 1.0)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn bh_ratio(coeff_lp: f64, sup: f64) -> Result<f64> {
    if !(sup > 0.0) {
        return Err(Error::InvalidArgument("sup norm must be positive".into()));
    }
    Ok(coeff_lp / sup)
}

/// Bound on the ratio for the setting, built from [`CUBE_BASE`]:
/// CUBE `base`; CYCLIC `(4 B log K + 4)^d base`; GM `(3/2 (K^2 - K))^d base`;
/// HW `(K+1)^d` times the CYCLIC bound.
pub fn setting_bound(setting: BhSetting, k: usize, d: usize) -> f64 {
    let base = CUBE_BASE[d.clamp(1, MAX_SCAN_DEGREE) - 1];
    let kf = k as f64;
    match setting {
        BhSetting::Cube => base,
        BhSetting::Cyclic => remez_bound(k, d) * base,
        BhSetting::Gm => (1.5 * (kf * kf - kf)).powi(d as i32) * base,
        BhSetting::Hw => (kf + 1.0).powi(d as i32) * remez_bound(k, d) * base,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: usize,
    pub coeff_norm: f64,
    pub sup: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BHReport {
    pub setting: BhSetting,
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub count: usize,
    pub seed: u64,
    pub p: f64,
    pub max_ratio: f64,
    pub bound: f64,
    pub within: bool,
    pub instances: Vec<InstanceRecord>,
}

impl BHReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for rec in &self.instances {
            out.serialize(rec).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Real multilinear polynomial on `{-1,1}^n`, coefficients indexed by subset
/// bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct CubePolynomial {
    pub n: usize,
    pub coeffs: Vec<(u64, f64)>,
}

impl CubePolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|(s, _)| s.count_ones() as usize).max().unwrap_or(0)
    }

    /// `max_x |f(x)|` by enumerating all `2^n` points.
    pub fn sup(&self) -> Result<f64> {
        let size = 1u128 << self.n;
        if self.n >= 64 || size > config::enumeration_cap() {
            return Err(Error::EnumerationCap { size, cap: config::enumeration_cap() });
        }
        let mut table = vec![0.0; size as usize];
        for &(s, c) in &self.coeffs {
            table[s as usize] += c;
        }
        walsh_hadamard(&mut table);
        Ok(table.iter().map(|v| v.abs()).fold(0.0, f64::max))
    }

    pub fn coeff_norm(&self, p: f64) -> f64 {
        lp_norm(self.coeffs.iter().map(|(_, c)| c.abs()), p)
    }
}

fn subsets_up_to(n: usize, d: usize) -> Vec<u64> {
    (0..1u64 << n).filter(|s| s.count_ones() as usize <= d).collect()
}

pub fn random_cube_instance<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> CubePolynomial {
    let coeffs = subsets_up_to(n, d).into_iter().map(|s| (s, rng.sample(StandardNormal))).collect();
    CubePolynomial { n, coeffs }
}

pub fn cube_ratio(f: &CubePolynomial, d: usize) -> Result<InstanceRecord> {
    let coeff_norm = f.coeff_norm(bh_exponent(d));
    let sup = f.sup()?;
    Ok(InstanceRecord { instance: 0, coeff_norm, sup, ratio: bh_ratio(coeff_norm, sup)? })
}

/// Ratio against `sup_{Omega_K^n} |f|`.
pub fn cyclic_ratio(f: &CyclicPolynomial, d: usize) -> Result<InstanceRecord> {
    let coeff_norm = f.coeff_norm(bh_exponent(d));
    let sup = crate::remez::omega_sup(f)?;
    Ok(InstanceRecord { instance: 0, coeff_norm, sup, ratio: bh_ratio(coeff_norm, sup)? })
}

/// Ratio of the `kind`-basis coefficients against `||A||_op`.
pub fn observable_ratio(a: &Observable, kind: BasisKind, d: usize) -> Result<InstanceRecord> {
    let map = match (kind, &a.gm_coeffs, &a.hw_coeffs) {
        (BasisKind::Gm, Some(m), _) | (BasisKind::Hw, _, Some(m)) => m.clone(),
        _ => a.expand(kind),
    };
    let coeff_norm = lp_norm(map.values().map(|c| c.norm()), bh_exponent(d));
    let sup = a.norms().op_norm;
    Ok(InstanceRecord { instance: 0, coeff_norm, sup, ratio: bh_ratio(coeff_norm, sup)? })
}

fn random_cyclic<R: Rng + ?Sized>(n: usize, k: usize, d: usize, rng: &mut R) -> Result<CyclicPolynomial> {
    let coeffs: Vec<_> = low_degree_indices(n, k, d)
        .into_iter()
        .map(|a| (a.entries().to_vec(), complex_gaussian(rng)))
        .collect();
    CyclicPolynomial::from_coeffs(n, k, coeffs)
}

fn random_gm<R: Rng + ?Sized>(n: usize, k: usize, d: usize, rng: &mut R) -> Result<Observable> {
    let coeffs: CoeffMap = gm_low_degree_indices(n, k, d)
        .into_iter()
        .map(|i| {
            let c: f64 = rng.sample(StandardNormal);
            (i, Complex64::new(c, 0.0))
        })
        .collect();
    Observable::from_coeffs(n, k, BasisKind::Gm, &coeffs)
}

fn random_hw<R: Rng + ?Sized>(n: usize, k: usize, d: usize, rng: &mut R) -> Result<Observable> {
    let k2 = k * k;
    let coeffs: CoeffMap = (0..k2.pow(n as u32))
        .map(|i| tensor::digits(i, k2, n))
        .filter(|i| hw_weighted_degree(i, k) <= d)
        .map(|i| (i, complex_gaussian(rng)))
        .collect();
    Observable::from_coeffs(n, k, BasisKind::Hw, &coeffs)
}

fn check_feasible(setting: BhSetting, n: usize, k: usize, d: usize) -> Result<()> {
    if d == 0 || d > MAX_SCAN_DEGREE {
        return Err(Error::InvalidArgument(format!("d must lie in 1..={MAX_SCAN_DEGREE}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    match setting {
        BhSetting::Cube => {
            if n >= 64 || (1u128 << n) > config::enumeration_cap() {
                return Err(Error::EnumerationCap { size: 1u128 << n.min(127), cap: config::enumeration_cap() });
            }
        }
        BhSetting::Cyclic => {
            if k < 2 {
                return Err(Error::InvalidArgument("K must be at least 2".into()));
            }
            grid_size(n, k)?;
        }
        BhSetting::Gm | BhSetting::Hw => {
            if setting == BhSetting::Hw && !is_prime(k) {
                return Err(Error::CompositeModulus(k));
            }
            if k < 2 {
                return Err(Error::InvalidArgument("K must be at least 2".into()));
            }
            let dim = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if dim > config::dense_cap() as u128 {
                return Err(Error::DenseCap { dim: dim.min(usize::MAX as u128) as usize, cap: config::dense_cap() });
            }
        }
    }
    Ok(())
}

/// Ratios of `count` random instances; instance `i` draws from substream `i`
/// of `seed`.
pub fn bh_scan(setting: BhSetting, n: usize, k: usize, d: usize, count: usize, seed: u64) -> Result<BHReport> {
    check_feasible(setting, n, k, d)?;
    let instances = (0..count)
        .into_par_iter()
        .map(|i| -> Result<InstanceRecord> {
            let mut r = rng::substream(seed, i as u64);
            let mut rec = match setting {
                BhSetting::Cube => cube_ratio(&random_cube_instance(n, d, &mut r), d)?,
                BhSetting::Cyclic => cyclic_ratio(&random_cyclic(n, k, d, &mut r)?, d)?,
                BhSetting::Gm => observable_ratio(&random_gm(n, k, d, &mut r)?, BasisKind::Gm, d)?,
                BhSetting::Hw => observable_ratio(&random_hw(n, k, d, &mut r)?, BasisKind::Hw, d)?,
            };
            rec.instance = i;
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = instances.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let bound = setting_bound(setting, k, d);
    Ok(BHReport {
        setting,
        k: if setting == BhSetting::Cube { 2 } else { k },
        n,
        d,
        count,
        seed,
        p: bh_exponent(d),
        max_ratio,
        bound,
        within: max_ratio <= bound,
        instances,
    })
}

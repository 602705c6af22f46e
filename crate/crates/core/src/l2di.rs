//! Second-moment twirls, the noise-stability bound for locally
//! 2-design-invariant (L2DI) state distributions, and truncation errors
//! measured against Haar-random product states.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::qudit_algebra::{support_degree, BasisKind, Observable};
use crate::rng;
use crate::states::DensityMatrix;
use crate::stats::RunningStats;

/// `F = sum_{j,k} |jk><kj|`.
pub fn swap_operator(k: usize) -> CMatrix {
    let dim = k * k;
    CMatrix::from_fn(dim, dim, |r, c| {
        let (a, b) = (r / k, r % k);
        if c == b * k + a {
            ONE
        } else {
            ZERO
        }
    })
}

/// `tr[(I+F) M⊗N]/(K^2+K) (I+F)/2 + tr[(I-F) M⊗N]/(K^2-K) (I-F)/2`.
pub fn twirl_closed_form(m: &CMatrix, n: &CMatrix) -> CMatrix {
    let k = m.nrows();
    let f = swap_operator(k);
    let id = CMatrix::identity(k * k, k * k);
    let mn = linalg::kron(m, n);
    let sym = &id + &f;
    let anti = &id - &f;
    let kf = k as f64;
    let a = linalg::trace_of_product(&sym, &mn) / (kf * kf + kf);
    let b = linalg::trace_of_product(&anti, &mn) / (kf * kf - kf);
    (&sym * (a * 0.5)) + (&anti * (b * 0.5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlResult {
    pub closed_form: CMatrix,
    pub monte_carlo: CMatrix,
    /// Frobenius distance between the two.
    pub distance: f64,
}

/// Closed form of `E_U[(U^dagger M U) ⊗ (U^dagger N U)]` against its Haar
/// Monte-Carlo average.
pub fn twirl_pair(m: &CMatrix, n: &CMatrix, trials: u64, seed: u64) -> Result<TwirlResult> {
    let k = m.nrows();
    if !m.is_square() || n.nrows() != k || !n.is_square() {
        return Err(Error::DimensionMismatch { expected: k, got: n.nrows() });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let closed_form = twirl_closed_form(m, n);
    let partial: Vec<CMatrix> = rng::chunk_sizes(trials, crate::learn::CHUNKS)
        .par_iter()
        .enumerate()
        .map(|(chunk, &size)| {
            let mut r = rng::substream(seed, chunk as u64);
            let mut acc = CMatrix::zeros(k * k, k * k);
            for _ in 0..size {
                let u = linalg::haar_unitary(k, &mut r);
                let ud = u.adjoint();
                acc += linalg::kron(&(&ud * m * &u), &(&ud * n * &u));
            }
            acc
        })
        .collect();
    let mut sum = CMatrix::zeros(k * k, k * k);
    for p in &partial {
        sum += p;
    }
    let monte_carlo = sum / Complex64::new(trials as f64, 0.0);
    let distance = linalg::frobenius(&(&monte_carlo - &closed_form));
    Ok(TwirlResult { closed_form, monte_carlo, distance })
}

/// L2DI state distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MuSpec {
    /// i.i.d. Haar-random pure single-qudit states.
    HaarProduct,
}

impl std::str::FromStr for MuSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HAAR_PRODUCT" => Ok(Self::HaarProduct),
            other => Err(Error::InvalidArgument(format!("unsupported distribution {other}"))),
        }
    }
}

pub fn sample_state<R: rand::Rng + ?Sized>(mu: MuSpec, n: usize, k: usize, rng: &mut R) -> DensityMatrix {
    match mu {
        MuSpec::HaarProduct => DensityMatrix::Product {
            k,
            factors: (0..n).map(|_| linalg::projector(&linalg::haar_state(k, rng))).collect(),
        },
    }
}

/// `(K/(K^2-1))`, the per-site damping of an L2DI distribution.
pub fn damping(k: usize) -> f64 {
    k as f64 / (k * k - 1) as f64
}

/// `sum_alpha (K/(K^2-1))^{|alpha|} |A_alpha|^2`.
pub fn stability_bound(a: &Observable) -> f64 {
    let q = damping(a.modulus());
    a.expand(BasisKind::Gm)
        .iter()
        .map(|(i, c)| q.powi(support_degree(i) as i32) * c.norm_sqr())
        .sum()
}

/// `tr[A^{=j} rho]` for `j = 0..=n`, where `A^{=j}` is the part of `A` on
/// GM monomials with `j` non-identity sites.
pub fn level_expectations(a: &Observable, rho: &DensityMatrix) -> Result<Vec<Complex64>> {
    let DensityMatrix::Product { factors, k } = rho else {
        return Err(Error::InvalidArgument("level expectations need a product state".into()));
    };
    if factors.len() != a.n() || *k != a.modulus() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: factors.len() });
    }
    let coeffs = match &a.gm_coeffs {
        Some(c) => std::borrow::Cow::Borrowed(c),
        None => std::borrow::Cow::Owned(a.expand(BasisKind::Gm)),
    };
    let site = BasisKind::Gm.single_site(*k);
    let traces: Vec<Vec<Complex64>> = factors
        .iter()
        .map(|r| site.iter().map(|m| linalg::trace_of_product(m, r)).collect())
        .collect();
    let mut out = vec![ZERO; a.n() + 1];
    for (index, c) in coeffs.iter() {
        let t: Complex64 = index.iter().zip(&traces).map(|(&p, tr)| tr[p]).product();
        out[support_degree(index)] += c * t;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl From<&RunningStats> for Estimate {
    fn from(s: &RunningStats) -> Self {
        Self { mean: s.mean(), std_error: s.std_error(), trials: s.count() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub d: usize,
    /// Mean of `|tr[(A - A^{<=d}) rho]|^2`.
    pub empirical: f64,
    pub std_error: f64,
    /// `(K/(K^2-1))^d ||A||_2^2`.
    pub bound: f64,
    /// `empirical <= bound + 3 std_error`.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityProfile {
    pub mu: MuSpec,
    /// Mean of `|tr[A rho]|^2`.
    pub second_moment: Estimate,
    pub stability_bound: f64,
    /// One entry per `d = 0..=n`.
    pub truncation: Vec<TruncationReport>,
}

/// One Monte-Carlo pass over `trials` states from `mu`, estimating
/// `E|tr[A rho]|^2` and `E|tr[(A - A^{<=d}) rho]|^2` for every `d`.
pub fn stability_profile(a: &Observable, mu: MuSpec, trials: u64, seed: u64) -> Result<StabilityProfile> {
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    let mut a = a.clone();
    a.expand_cached(BasisKind::Gm);
    let (n, k) = (a.n(), a.modulus());
    let levels = n + 1;
    let partial: Vec<Vec<RunningStats>> = rng::chunk_sizes(trials, crate::learn::CHUNKS)
        .par_iter()
        .enumerate()
        .map(|(chunk, &size)| -> Result<Vec<RunningStats>> {
            let mut r = rng::substream(seed, chunk as u64);
            // slot 0: |tr[A rho]|^2; slot 1 + d: tail above d
            let mut acc = vec![RunningStats::default(); levels + 1];
            for _ in 0..size {
                let rho = sample_state(mu, n, k, &mut r);
                let lv = level_expectations(&a, &rho)?;
                let total: Complex64 = lv.iter().sum();
                acc[0].push(total.norm_sqr());
                let mut tail = total;
                for d in 0..levels {
                    tail -= lv[d];
                    acc[1 + d].push(tail.norm_sqr());
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut merged = vec![RunningStats::default(); levels + 1];
    for p in &partial {
        for (m, s) in merged.iter_mut().zip(p) {
            m.merge(s);
        }
    }
    let l2 = a.l2_norm().powi(2);
    let q = damping(k);
    let truncation = (0..levels)
        .map(|d| {
            let s = &merged[1 + d];
            let bound = q.powi(d as i32) * l2;
            TruncationReport {
                d,
                empirical: s.mean(),
                std_error: s.std_error(),
                bound,
                within: s.mean() <= bound + 3.0 * s.std_error(),
            }
        })
        .collect();
    Ok(StabilityProfile {
        mu,
        second_moment: Estimate::from(&merged[0]),
        stability_bound: stability_bound(&a),
        truncation,
    })
}

/// Truncation error at a single degree.
pub fn truncation_error(a: &Observable, d: usize, mu: MuSpec, trials: u64, seed: u64) -> Result<TruncationReport> {
    let profile = stability_profile(a, mu, trials, seed)?;
    let idx = d.min(a.n());
    let mut report = profile.truncation[idx];
    report.d = d;
    if d > a.n() {
        report.bound = damping(a.modulus()).powi(d as i32) * a.l2_norm().powi(2);
        report.within = report.empirical <= report.bound + 3.0 * report.std_error;
    }
    Ok(report)
}

/// `E |tr[(A - B) rho]|^2` over `mu`, e.g. for a learned `B = A~`.
pub fn mean_squared_deviation(a: &Observable, b: &Observable, mu: MuSpec, trials: u64, seed: u64) -> Result<Estimate> {
    let diff = a.sub(b)?;
    Ok(stability_profile(&diff, mu, trials, seed)?.second_moment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit_algebra::{gm_basis, CoeffMap};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn swap_properties() {
        let f = swap_operator(2);
        let want = CMatrix::from_row_slice(
            4,
            4,
            &[ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ONE],
        );
        assert_eq!(f, want);
        for k in 2..=6 {
            let f = swap_operator(k);
            assert_eq!(linalg::trace(&f), c(k as f64));
            assert!(linalg::max_abs_diff(&(&f * &f), &CMatrix::identity(k * k, k * k)) < 1e-15);
            let mut resolved = CMatrix::zeros(k * k, k * k);
            for m in gm_basis(k) {
                resolved += linalg::kron(&m, &m);
            }
            assert!(linalg::max_abs_diff(&(resolved / c(k as f64)), &f) < 1e-12);
        }
        let mut r = rng::stream(0);
        let u = linalg::haar_state(3, &mut r);
        let v = linalg::haar_state(3, &mut r);
        let uv = linalg::kron(&CMatrix::from_column_slice(3, 1, u.as_slice()), &CMatrix::from_column_slice(3, 1, v.as_slice()));
        let vu = linalg::kron(&CMatrix::from_column_slice(3, 1, v.as_slice()), &CMatrix::from_column_slice(3, 1, u.as_slice()));
        assert!(linalg::max_abs_diff(&(swap_operator(3) * uv), &vu) < 1e-14);
    }

    #[test]
    fn twirl_closed_form_cases() {
        let id = CMatrix::identity(3, 3);
        assert!(linalg::max_abs_diff(&twirl_closed_form(&id, &id), &CMatrix::identity(9, 9)) < 1e-14);

        let sz = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let f = swap_operator(2);
        let want = (&f - CMatrix::identity(4, 4) * c(0.5)) * c(2.0 / 3.0);
        assert!(linalg::max_abs_diff(&twirl_closed_form(&sz, &sz), &want) < 1e-14);

        let zero = twirl_closed_form(&sz, &CMatrix::identity(2, 2));
        assert!(linalg::frobenius(&zero) < 1e-14);
    }

    #[test]
    fn twirl_trace_consistent() {
        let mut r = rng::stream(4);
        let m = linalg::random_hermitian(3, &mut r);
        let n = linalg::random_hermitian(3, &mut r);
        let t = twirl_closed_form(&m, &n);
        assert!((linalg::trace(&t) - linalg::trace(&linalg::kron(&m, &n))).norm() < 1e-12);
        let f = swap_operator(3);
        assert!((linalg::trace_of_product(&f, &linalg::kron(&m, &n)) - linalg::trace_of_product(&m, &n)).norm() < 1e-12);
    }

    #[test]
    fn twirl_monte_carlo_sigma_z() {
        let sz = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let res = twirl_pair(&sz, &sz, 100_000, 1).unwrap();
        assert!(res.distance < 0.02, "{}", res.distance);
    }

    #[test]
    fn stability_bound_examples() {
        assert!((stability_bound(&Observable::identity(2, 3).unwrap()) - 1.0).abs() < 1e-12);
        let mut m = CoeffMap::new();
        m.insert(vec![1], ONE);
        let a = Observable::from_coeffs(1, 2, BasisKind::Gm, &m).unwrap();
        assert!((stability_bound(&a) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_examples() {
        let mut m = CoeffMap::new();
        m.insert(vec![3, 1], ONE);
        let a = Observable::from_coeffs(2, 2, BasisKind::Gm, &m).unwrap();
        let rep = truncation_error(&a, 1, MuSpec::HaarProduct, 2000, 0).unwrap();
        assert!((rep.bound - 2.0 / 3.0).abs() < 1e-12);
        let full = truncation_error(&a, 2, MuSpec::HaarProduct, 2000, 0).unwrap();
        assert!(full.empirical < 1e-20);
        assert!(full.bound > 0.0);
    }

    #[test]
    fn haar_second_moment_below_bound() {
        let mut r = rng::stream(12);
        let a = Observable::new(2, 2, linalg::random_hermitian(4, &mut r)).unwrap();
        let p = stability_profile(&a, MuSpec::HaarProduct, 20_000, 3).unwrap();
        assert!(p.second_moment.mean <= p.stability_bound + 3.0 * p.second_moment.std_error);
        assert!(p.truncation.iter().all(|t| t.within));
    }

    #[test]
    fn purity_chain() {
        let mut r = rng::stream(2);
        for k in [2usize, 3] {
            let id = CMatrix::identity(k * k, k * k);
            let g = swap_operator(k) - id * c(1.0 / k as f64);
            for m in 1..=3usize {
                let factors: Vec<CMatrix> = (0..m).map(|_| linalg::random_density(k, &mut r)).collect();
                let rho = linalg::kron_all(&factors);
                // (F - I/K)^{⊗m} acting on rho ⊗ rho, with the site pairs regrouped
                let lhs: Complex64 = factors
                    .iter()
                    .map(|f| linalg::trace_of_product(&g, &linalg::kron(f, f)))
                    .product();
                let purity = linalg::trace_of_product(&rho, &rho).re;
                assert!(lhs.re <= purity + 1e-12 && purity <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn mu_parse() {
        assert_eq!("haar_product".parse::<MuSpec>().unwrap(), MuSpec::HaarProduct);
        assert!("clifford".parse::<MuSpec>().is_err());
    }
}

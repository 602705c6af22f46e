//! Low-degree learners: the generic thresholding estimator, the cyclic
//! learner on `Z_K^n`, and the qudit learners built on GM product states.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclic_fourier::{grid_point, grid_size, low_degree_indices, CyclicPolynomial, MultiIndex, SampleSet};
use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, ZERO};
use crate::qudit_algebra::{support_degree, BasisKind, CoeffMap, Observable};
use crate::rng;
use crate::states::{self, gm_scale, CubeLabel, DensityMatrix, StateLabel};

/// Sample spaces up to this size are sampled as a multinomial count table
/// and each distinct point is queried once.
pub const COUNT_TABLE_LIMIT: usize = 1 << 20;
/// Fixed number of parallel chunks, so results do not depend on the thread
/// count.
pub const CHUNKS: u64 = 64;
pub const MAX_BUDGET: f64 = 4_611_686_018_427_387_904.0; // 2^62

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: usize,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    /// Stand-in for the BH constant.
    #[serde(rename = "B")]
    pub bh_bound: f64,
    /// Promised bound on `||A||_op` (qudit learners only).
    pub op_norm_bound: f64,
    /// Overrides the sample budget.
    pub samples: Option<u64>,
    /// Overrides `eta`.
    pub eta: Option<f64>,
}

impl LearnerConfig {
    pub fn new(n: usize, k: usize, d: usize, eps: f64, delta: f64, seed: u64) -> Self {
        Self { n, k, d, eps, delta, seed, bh_bound: 1.0, op_norm_bound: 1.0, samples: None, eta: None }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.k < 2 {
            return bad("K must be at least 2");
        }
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.d == 0 {
            return bad("d must be at least 1");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.bh_bound >= 1.0) {
            return bad("B must be at least 1");
        }
        if !(self.op_norm_bound > 0.0) {
            return bad("operator norm bound must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Setting {
    Cyclic,
    Qudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Unrounded value of the formula.
    pub exact: f64,
    pub samples: u64,
}

/// CYCLIC: `4 e^5 d^2 B^{2d} / eps^{d+1} log(4 e n / delta)`;
/// QUDIT: `e^6 K^{3/2} d^2 (B ||A||_op)^{2d} log(2 e n / delta) eps^{-d-1}`.
pub fn sample_budget(config: &LearnerConfig, setting: Setting) -> Result<Budget> {
    config.validate()?;
    let (n, d, eps, delta) = (config.n as f64, config.d as i32, config.eps, config.delta);
    let e = std::f64::consts::E;
    let exact = match setting {
        Setting::Cyclic => {
            4.0 * e.powi(5) * (d * d) as f64 * config.bh_bound.powi(2 * d) / eps.powi(d + 1)
                * (4.0 * e * n / delta).ln()
        }
        Setting::Qudit => {
            e.powi(6)
                * (config.k as f64).powf(1.5)
                * (d * d) as f64
                * (config.bh_bound * config.op_norm_bound).powi(2 * d)
                * (2.0 * e * n / delta).ln()
                * eps.powi(-d - 1)
        }
    };
    if !exact.is_finite() || exact > MAX_BUDGET {
        return Err(Error::BudgetOverflow(exact));
    }
    Ok(Budget { exact, samples: exact.ceil().max(1.0) as u64 })
}

/// `eta` with `eta^2 = eps^{d+1} e^{-5} d^{-1} b^{-2d}`, where `b` is `B`
/// (cyclic) or `B ||A||_op` (qudit).
pub fn proof_eta(config: &LearnerConfig, setting: Setting) -> f64 {
    let b = match setting {
        Setting::Cyclic => config.bh_bound,
        Setting::Qudit => config.bh_bound * config.op_norm_bound,
    };
    let d = config.d as i32;
    (config.eps.powi(d + 1) * (-5.0f64).exp() / config.d as f64 * b.powi(-2 * d)).sqrt()
}

/// `t = eta (1 + sqrt(d + 1))`.
pub fn threshold(eta: f64, d: usize) -> f64 {
    eta * (1.0 + ((d + 1) as f64).sqrt())
}

/// Guarantee `(e^5 eta^2 d B^{2d})^{1/(d+1)}` of [`ei_threshold`].
pub fn ei_bound(eta: f64, d: usize, b: f64) -> f64 {
    let d_f = d as f64;
    ((5.0f64).exp() * eta * eta * d_f * b.powi(2 * d as i32)).powf(1.0 / (d_f + 1.0))
}

/// Zero every entry with modulus below `eta (1 + sqrt(d + 1))`.
pub fn ei_threshold(w: &[Complex64], eta: f64, d: usize) -> Vec<Complex64> {
    let t = threshold(eta, d);
    w.iter().map(|&x| if x.norm() >= t { x } else { ZERO }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry<I> {
    pub index: I,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome<I: Ord> {
    pub config: LearnerConfig,
    pub setting: Setting,
    /// Retained coefficients, all of modulus at least `threshold`.
    pub coeffs: Vec<CoeffEntry<I>>,
    pub samples: u64,
    pub budget_exact: Option<f64>,
    pub eta: f64,
    pub threshold: f64,
    /// Distinct oracle queries issued.
    pub queries: u64,
    /// `||f - f~||_2^2` against the ground truth, when known.
    pub true_error: Option<f64>,
    /// Ground truth has degree above `d`.
    pub promise_violated: Option<bool>,
    #[serde(skip)]
    pub wall_time: f64,
}

impl<I: Ord + Clone> LearnOutcome<I> {
    pub fn coeff_map(&self) -> BTreeMap<I, Complex64> {
        self.coeffs.iter().map(|e| (e.index.clone(), Complex64::new(e.re, e.im))).collect()
    }

    pub fn succeeded(&self) -> Option<bool> {
        self.true_error.map(|e| e <= self.config.eps)
    }
}

fn entries<I: Clone>(map: &BTreeMap<I, Complex64>) -> Vec<CoeffEntry<I>> {
    map.iter().map(|(i, c)| CoeffEntry { index: i.clone(), re: c.re, im: c.im }).collect()
}

/// Oracle for functions on `Z_K^n`.
pub trait CyclicOracle: Sync {
    fn query(&self, x: &[u32]) -> Result<Complex64>;
}

impl CyclicOracle for CyclicPolynomial {
    fn query(&self, x: &[u32]) -> Result<Complex64> {
        Ok(self.evaluate_at(x))
    }
}

/// Wraps a closure as an oracle.
pub struct FnOracle<F>(pub F);

impl<F: Fn(&[u32]) -> Result<Complex64> + Sync> CyclicOracle for FnOracle<F> {
    fn query(&self, x: &[u32]) -> Result<Complex64> {
        (self.0)(x)
    }
}

/// Oracle returning `tr[A rho]` for product states.
pub trait QuditOracle: Sync {
    fn query(&self, rho: &DensityMatrix) -> Result<f64>;
}

impl QuditOracle for Observable {
    fn query(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(states::expectation(self, rho)?.re)
    }
}

/// Multinomial counts of `s` uniform draws over `cells` cells.
pub fn multinomial_counts<R: Rng + ?Sized>(s: u64, cells: usize, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; cells];
    let mut left = s;
    for (i, slot) in out.iter_mut().enumerate() {
        if left == 0 {
            break;
        }
        let remaining = cells - i;
        let c = if remaining == 1 {
            left
        } else {
            Binomial::new(left, 1.0 / remaining as f64).expect("valid p").sample(rng)
        };
        *slot = c;
        left -= c;
    }
    out
}

fn resolve_samples(config: &LearnerConfig, setting: Setting) -> Result<(u64, Option<f64>)> {
    match config.samples {
        Some(s) if s > 0 => Ok((s, sample_budget(config, setting).ok().map(|b| b.exact))),
        Some(_) => Err(Error::InvalidArgument("sample count must be positive".into())),
        None => {
            let b = sample_budget(config, setting)?;
            Ok((b.samples, Some(b.exact)))
        }
    }
}

/// Empirical coefficients `w_alpha = (1/s) sum_j f(x_j) omega^{-alpha.x_j}`
/// for every `|alpha| <= d`, from `s` uniform points. Returns the map and the
/// number of distinct oracle queries.
pub fn empirical_cyclic_coefficients<O: CyclicOracle + ?Sized>(
    n: usize,
    k: usize,
    d: usize,
    s: u64,
    seed: u64,
    oracle: &O,
) -> Result<(BTreeMap<MultiIndex, Complex64>, u64)> {
    cyclic_coefficients_with_limit(n, k, d, s, seed, oracle, COUNT_TABLE_LIMIT)
}

fn cyclic_coefficients_with_limit<O: CyclicOracle + ?Sized>(
    n: usize,
    k: usize,
    d: usize,
    s: u64,
    seed: u64,
    oracle: &O,
    table_limit: usize,
) -> Result<(BTreeMap<MultiIndex, Complex64>, u64)> {
    let indices = low_degree_indices(n, k, d);
    let small = grid_size(n, k).ok().filter(|&g| g <= table_limit);
    if let Some(cells) = small {
        let counts = multinomial_counts(s, cells, &mut rng::stream(seed));
        let mut values = vec![ZERO; cells];
        let mut queries = 0;
        for (idx, &c) in counts.iter().enumerate() {
            if c > 0 {
                values[idx] = oracle.query(&grid_point(idx, n, k))? * (c as f64 / s as f64);
                queries += 1;
            }
        }
        // sum_x g(x) omega^{-alpha.x} = K^n * (Fourier coefficient of g)
        let poly = crate::cyclic_fourier::expand_from_table(n, k, &values)?;
        let scale = cells as f64;
        let map = indices.into_iter().map(|a| {
            let c = poly.coeff(&a) * scale;
            (a, c)
        });
        return Ok((map.collect(), queries));
    }
    let sizes = rng::chunk_sizes(s, CHUNKS);
    let partial: Vec<Vec<Complex64>> = sizes
        .par_iter()
        .enumerate()
        .map(|(chunk, &size)| -> Result<Vec<Complex64>> {
            let mut r = rng::substream(seed, chunk as u64);
            let mut acc = vec![ZERO; indices.len()];
            let mut x = vec![0u32; n];
            for _ in 0..size {
                for xi in x.iter_mut() {
                    *xi = r.random_range(0..k as u32);
                }
                let f = oracle.query(&x)?;
                for (slot, a) in acc.iter_mut().zip(&indices) {
                    *slot += f * root_of_unity(k, -(a.pairing(&x, k) as i64));
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![ZERO; indices.len()];
    for p in &partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Ok((indices.into_iter().zip(total.into_iter().map(|v| v / s as f64)).collect(), s))
}

fn finish_cyclic(
    config: &LearnerConfig,
    raw: BTreeMap<MultiIndex, Complex64>,
    s: u64,
    budget_exact: Option<f64>,
    queries: u64,
    truth: Option<&CyclicPolynomial>,
    start: Instant,
) -> LearnOutcome<MultiIndex> {
    let eta = config.eta.unwrap_or_else(|| proof_eta(config, Setting::Cyclic));
    let t = threshold(eta, config.d);
    let kept: BTreeMap<MultiIndex, Complex64> = raw.into_iter().filter(|(_, c)| c.norm() >= t).collect();
    let (true_error, promise_violated) = match truth {
        Some(f) => {
            let mut err = 0.0;
            for (a, c) in f.iter() {
                err += (c - kept.get(a).copied().unwrap_or(ZERO)).norm_sqr();
            }
            for (a, c) in &kept {
                if f.coeff(a) == ZERO {
                    err += c.norm_sqr();
                }
            }
            (Some(err), Some(f.degree() > config.d))
        }
        None => (None, None),
    };
    LearnOutcome {
        config: config.clone(),
        setting: Setting::Cyclic,
        coeffs: entries(&kept),
        samples: s,
        budget_exact,
        eta,
        threshold: t,
        queries,
        true_error,
        promise_violated,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Learn a degree-`d` function on `Z_K^n` from uniform random queries.
pub fn learn_cyclic<O: CyclicOracle + ?Sized>(
    config: &LearnerConfig,
    oracle: &O,
    truth: Option<&CyclicPolynomial>,
) -> Result<LearnOutcome<MultiIndex>> {
    let start = Instant::now();
    config.validate()?;
    let (s, budget_exact) = resolve_samples(config, Setting::Cyclic)?;
    let (raw, queries) = empirical_cyclic_coefficients(config.n, config.k, config.d, s, config.seed, oracle)?;
    Ok(finish_cyclic(config, raw, s, budget_exact, queries, truth, start))
}

/// Same estimator on a fixed set of samples (e.g. read from a file).
pub fn learn_cyclic_from_samples(
    config: &LearnerConfig,
    samples: &SampleSet,
    truth: Option<&CyclicPolynomial>,
) -> Result<LearnOutcome<MultiIndex>> {
    let start = Instant::now();
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::Oracle("sample file is empty".into()));
    }
    let (n, k) = (config.n, config.k);
    let indices = low_degree_indices(n, k, config.d);
    let mut acc = vec![ZERO; indices.len()];
    for (x, f) in samples.points.iter().zip(&samples.values) {
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        for (slot, a) in acc.iter_mut().zip(&indices) {
            *slot += f * root_of_unity(k, -(a.pairing(x, k) as i64));
        }
    }
    let s = samples.len() as u64;
    let raw = indices.into_iter().zip(acc.into_iter().map(|v| v / s as f64)).collect();
    Ok(finish_cyclic(config, raw, s, None, s, truth, start))
}

/// GM indices (per-site positions) with at most `d` non-identity sites.
pub fn gm_low_degree_indices(n: usize, k: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(site: usize, n: usize, k2: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if site == n {
            out.push(cur.clone());
            return;
        }
        for p in 0..k2 {
            if p > 0 && left == 0 {
                break;
            }
            cur.push(p);
            rec(site + 1, n, k2, if p > 0 { left - 1 } else { left }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k * k, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Per-qudit labels from a bit string over `n (K^2 - 1)` cube coordinates.
pub fn labels_from_bits(n: usize, k: usize, bits: &[bool]) -> Vec<StateLabel> {
    let w = k * k - 1;
    (0..n)
        .map(|i| {
            let coords: Vec<i8> = bits[i * w..(i + 1) * w].iter().map(|&b| if b { -1 } else { 1 }).collect();
            StateLabel::Gm(CubeLabel::from_coords(k, &coords).expect("lengths match"))
        })
        .collect()
}

/// Bit positions of the cube coordinates read by `alpha`.
fn gm_bit_set(index: &[usize], k: usize) -> Vec<usize> {
    let w = k * k - 1;
    index
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0)
        .map(|(site, &p)| site * w + p - 1)
        .collect()
}

/// In-place Walsh–Hadamard transform: `out[S] = sum_x g(x) (-1)^{|x & S|}`.
pub fn walsh_hadamard(data: &mut [f64]) {
    let mut h = 1;
    while h < data.len() {
        for i in (0..data.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (data[j], data[j + h]);
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Rescaled empirical GM coefficients
/// `W(alpha) = c^{-|alpha|} (1/s) sum_t f(x_t) prod_{j in S(alpha)} x_{t,j}`.
pub fn empirical_gm_coefficients<O: QuditOracle + ?Sized>(
    n: usize,
    k: usize,
    d: usize,
    s: u64,
    seed: u64,
    oracle: &O,
) -> Result<(CoeffMap, u64)> {
    let indices = gm_low_degree_indices(n, k, d);
    let c = gm_scale(k);
    let bits = n * (k * k - 1);
    let rescale = |a: &[usize]| c.powi(-(support_degree(a) as i32));
    if bits <= 20 {
        let cells = 1usize << bits;
        let counts = multinomial_counts(s, cells, &mut rng::stream(seed));
        let mut g = vec![0.0; cells];
        let mut queries = 0;
        for (x, &cnt) in counts.iter().enumerate() {
            if cnt > 0 {
                let b: Vec<bool> = (0..bits).map(|i| x >> i & 1 == 1).collect();
                let rho = states::product_state(&labels_from_bits(n, k, &b), k)?;
                g[x] = oracle.query(&rho)? * cnt as f64 / s as f64;
                queries += 1;
            }
        }
        walsh_hadamard(&mut g);
        let map = indices
            .into_iter()
            .map(|a| {
                let mask = gm_bit_set(&a, k).into_iter().fold(0usize, |m, b| m | 1 << b);
                let w = g[mask] * rescale(&a);
                (a, Complex64::new(w, 0.0))
            })
            .collect();
        return Ok((map, queries));
    }
    let sets: Vec<Vec<usize>> = indices.iter().map(|a| gm_bit_set(a, k)).collect();
    let sizes = rng::chunk_sizes(s, CHUNKS);
    let partial: Vec<Vec<f64>> = sizes
        .par_iter()
        .enumerate()
        .map(|(chunk, &size)| -> Result<Vec<f64>> {
            let mut r = rng::substream(seed, chunk as u64);
            let mut acc = vec![0.0; indices.len()];
            let mut b = vec![false; bits];
            for _ in 0..size {
                for bit in b.iter_mut() {
                    *bit = r.random();
                }
                let rho = states::product_state(&labels_from_bits(n, k, &b), k)?;
                let f = oracle.query(&rho)?;
                for (slot, set) in acc.iter_mut().zip(&sets) {
                    let sign = if set.iter().filter(|&&j| b[j]).count() % 2 == 0 { 1.0 } else { -1.0 };
                    *slot += f * sign;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0.0; indices.len()];
    for p in &partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    let map = indices
        .into_iter()
        .zip(total)
        .map(|(a, v)| {
            let w = v / s as f64 * rescale(&a);
            (a, Complex64::new(w, 0.0))
        })
        .collect();
    Ok((map, s))
}

/// Learn a degree-`d` observable with `||A||_op <= op_norm_bound` from its
/// expectations on random GM product states.
pub fn learn_qudit<O: QuditOracle + ?Sized>(
    config: &LearnerConfig,
    oracle: &O,
    truth: Option<&Observable>,
) -> Result<LearnOutcome<Vec<usize>>> {
    let start = Instant::now();
    config.validate()?;
    let (s, budget_exact) = resolve_samples(config, Setting::Qudit)?;
    let (raw, queries) = empirical_gm_coefficients(config.n, config.k, config.d, s, config.seed, oracle)?;
    let eta = config.eta.unwrap_or_else(|| proof_eta(config, Setting::Qudit));
    let t = threshold(eta, config.d);
    let kept: CoeffMap = raw.into_iter().filter(|(_, c)| c.norm() >= t).collect();
    let (true_error, promise_violated) = match truth {
        Some(a) => {
            let full = a.expand(BasisKind::Gm);
            let mut err = 0.0;
            for (i, c) in &full {
                err += (c - kept.get(i).copied().unwrap_or(ZERO)).norm_sqr();
            }
            for (i, c) in &kept {
                if !full.contains_key(i) {
                    err += c.norm_sqr();
                }
            }
            let deg = full.keys().map(|i| support_degree(i)).max().unwrap_or(0);
            (Some(err), Some(deg > config.d))
        }
        None => (None, None),
    };
    Ok(LearnOutcome {
        config: config.clone(),
        setting: Setting::Qudit,
        coeffs: entries(&kept),
        samples: s,
        budget_exact,
        eta,
        threshold: t,
        queries,
        true_error,
        promise_violated,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// `ceil(log_{K^2-1}(4/eps))`, at least 1.
pub fn arbitrary_degree(k: usize, eps: f64) -> usize {
    let base = (k * k - 1) as f64;
    let t = (4.0 / eps).ln() / base.ln();
    // guard against 2.0000000001-style rounding of exact powers
    let r = t.round();
    let d = if (t - r).abs() < 1e-9 { r } else { t.ceil() };
    (d as usize).max(1)
}

/// Learn an arbitrary observable up to mean-squared error `eps` over L2DI
/// state distributions: truncate at [`arbitrary_degree`] and run
/// [`learn_qudit`] with target `eps / 4`. `truth`, when given, is compared
/// against its own truncation.
pub fn learn_arbitrary<O: QuditOracle + ?Sized>(
    config: &LearnerConfig,
    oracle: &O,
    truth: Option<&Observable>,
) -> Result<LearnOutcome<Vec<usize>>> {
    let mut inner = config.clone();
    inner.d = arbitrary_degree(config.k, config.eps);
    inner.eps = config.eps / 4.0;
    let truncated = truth.map(|a| a.truncate(inner.d, BasisKind::Gm)).transpose()?;
    let mut out = learn_qudit(&inner, oracle, truncated.as_ref())?;
    out.promise_violated = None;
    Ok(out)
}

/// Budget of the informal qudit statement,
/// `C^{log^2(1/eps)} K^{3/2} ||A^{<=t}||_op^{2t}`, with `C` supplied by the
/// caller; reported, never asserted.
pub fn informal_qudit_budget(c_const: f64, eps: f64, k: usize, trunc_op_norm: f64, t: usize) -> f64 {
    let l = (1.0 / eps).ln();
    c_const.powf(l * l) * (k as f64).powf(1.5) * trunc_op_norm.powi(2 * t as i32)
}

/// Observable from a learned GM coefficient map.
pub fn synthesize(n: usize, k: usize, coeffs: &CoeffMap) -> Result<Observable> {
    Observable::from_coeffs(n, k, BasisKind::Gm, coeffs)
}

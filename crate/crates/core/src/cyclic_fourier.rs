//! Fourier analysis of complex functions on `Z_K^n` and their harmonic
//! extensions to the polytorus.
//!
//! A [`CyclicPolynomial`] stores `f(z) = sum_alpha c_alpha z^alpha` sparsely,
//! keyed by [`MultiIndex`] in lexicographic order. On grid points
//! `x in Z_K^n` the variable `z_j` is `omega^{x_j}` with `omega = e^{2 pi i/K}`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, root_of_unity, ZERO};
use crate::rng;
use crate::tensor;

/// Exponent vector `alpha in {0..K-1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>, k: usize) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e as usize >= k) {
            return Err(Error::InvalidArgument(format!(
                "multi-index entry {bad} outside [0, {}]",
                k - 1
            )));
        }
        Ok(Self(entries))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|alpha| = sum_j alpha_j`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// Coordinates with a nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(j, _)| j)
            .collect()
    }

    /// `<alpha, x> mod K`.
    pub fn pairing(&self, x: &[u32], k: usize) -> usize {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &b)| (a as usize) * (b as usize))
            .sum::<usize>()
            % k
    }
}

/// Number of grid points `K^n`, refusing beyond the enumeration cap.
pub fn grid_size(n: usize, k: usize) -> Result<usize> {
    let size = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let cap = config::enumeration_cap();
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    Ok(size as usize)
}

/// Grid point with lexicographic rank `index` (first coordinate most significant).
pub fn grid_point(index: usize, n: usize, k: usize) -> Vec<u32> {
    tensor::digits(index, k, n).into_iter().map(|d| d as u32).collect()
}

pub fn grid_index(x: &[u32], k: usize) -> usize {
    tensor::from_digits(x.iter().map(|&d| d as usize), k)
}

/// All multi-indices with `|alpha| <= d`, lexicographic.
pub fn low_degree_indices(n: usize, k: usize, d: usize) -> Vec<MultiIndex> {
    fn rec(pos: usize, left: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos == cur.len() {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for a in 0..k.min(left + 1) {
            cur[pos] = a as u32;
            rec(pos + 1, left - a, k, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut vec![0; n], &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPolynomial {
    n: usize,
    k: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl CyclicPolynomial {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(k >= 2, "modulus K must be at least 2");
        Self { n, k, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, k: usize, c: Complex64) -> Self {
        let mut f = Self::zero(n, k);
        f.set(MultiIndex::zero(n), c);
        f
    }

    pub fn from_coeffs<I>(n: usize, k: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        if k < 2 {
            return Err(Error::InvalidArgument("modulus K must be at least 2".into()));
        }
        let mut f = Self::zero(n, k);
        for (alpha, c) in coeffs {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: alpha.len() });
            }
            let alpha = MultiIndex::new(alpha, k)?;
            let entry = f.coeffs.entry(alpha).or_insert(ZERO);
            *entry += c;
        }
        f.coeffs.retain(|_, c| *c != ZERO);
        Ok(f)
    }

    /// Sets a coefficient, removing the entry when `c == 0`.
    pub fn set(&mut self, alpha: MultiIndex, c: Complex64) {
        assert_eq!(alpha.len(), self.n);
        if c == ZERO {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> usize {
        self.k
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or(ZERO)
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Maximum total degree over stored indices (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Drop coefficients with modulus `<= tol`.
    pub fn prune(&mut self, tol: f64) {
        self.coeffs.retain(|_, c| c.norm() > tol);
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, v)| (k.0.clone(), v * a));
        Self::from_coeffs(self.n, self.k, coeffs).expect("same shape")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let coeffs = self
            .coeffs
            .iter()
            .chain(other.coeffs.iter())
            .map(|(k, v)| (k.0.clone(), *v));
        Self::from_coeffs(self.n, self.k, coeffs)
    }

    /// Largest coefficient difference, treating absent entries as zero.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(a)).norm());
        }
        for (a, c) in &other.coeffs {
            if !self.coeffs.contains_key(a) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Harmonic extension at a point of the polytorus.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.len() });
        }
        let tol = config::tolerance();
        for (index, zj) in z.iter().enumerate() {
            if (zj.norm() - 1.0).abs() > tol {
                return Err(Error::NotUnimodular { index, modulus: zj.norm() });
            }
        }
        Ok(self.evaluate_unchecked(z))
    }

    /// Evaluation without the unimodularity check (used by optimizers that
    /// stay on the torus by construction).
    pub fn evaluate_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zj| {
                let mut p = Vec::with_capacity(self.k);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..self.k {
                    p.push(acc);
                    acc *= zj;
                }
                p
            })
            .collect();
        self.coeffs
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .0
                    .iter()
                    .zip(&powers)
                    .fold(*c, |acc, (&a, p)| acc * p[a as usize])
            })
            .sum()
    }

    /// Value at the grid point `x in Z_K^n`, i.e. at `z_j = omega^{x_j}`.
    pub fn evaluate_at(&self, x: &[u32]) -> Complex64 {
        debug_assert_eq!(x.len(), self.n);
        self.coeffs
            .iter()
            .map(|(alpha, c)| c * root_of_unity(self.k, alpha.pairing(x, self.k) as i64))
            .sum()
    }

    /// Dense coefficient tensor of shape `[K; n]`.
    pub fn dense_coeffs(&self) -> Result<Vec<Complex64>> {
        let size = grid_size(self.n, self.k)?;
        let mut out = vec![ZERO; size];
        for (alpha, c) in &self.coeffs {
            out[grid_index(&alpha.0, self.k)] = *c;
        }
        Ok(out)
    }

    /// Values at every grid point, lexicographic order.
    pub fn table(&self) -> Result<Vec<Complex64>> {
        let mut data = self.dense_coeffs()?;
        let k = self.k;
        let synth: Vec<Complex64> = (0..k * k)
            .map(|rc| root_of_unity(k, ((rc / k) * (rc % k)) as i64))
            .collect();
        tensor::apply_along_all_axes(&mut data, self.n, &synth);
        Ok(data)
    }

    /// `(sum |c_alpha|^p)^{1/p}`.
    pub fn coeff_norm(&self, p: f64) -> f64 {
        lp_norm(self.coeffs.values().map(|c| c.norm()), p)
    }

    /// `sum |c_alpha|^2`, the squared L2 norm under the uniform measure.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }
}

/// `(sum |x|^p)^{1/p}` for `p > 0`.
pub fn lp_norm<I: IntoIterator<Item = f64>>(moduli: I, p: f64) -> f64 {
    assert!(p > 0.0, "p must be positive");
    let xs: Vec<f64> = moduli.into_iter().collect();
    let scale = xs.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = xs.iter().map(|&x| (x / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// Fourier expansion of a full table over `Z_K^n` (lexicographic order).
pub fn expand_from_table(n: usize, k: usize, values: &[Complex64]) -> Result<CyclicPolynomial> {
    let expected = grid_size(n, k)?;
    if values.len() != expected {
        return Err(Error::TableSize { expected, got: values.len() });
    }
    let mut data = values.to_vec();
    let inv_k = 1.0 / k as f64;
    let analysis: Vec<Complex64> = (0..k * k)
        .map(|rc| root_of_unity(k, -(((rc / k) * (rc % k)) as i64)) * inv_k)
        .collect();
    tensor::apply_along_all_axes(&mut data, n, &analysis);
    let mut f = CyclicPolynomial::zero(n, k);
    for (idx, c) in data.into_iter().enumerate() {
        if c.norm() > 1e-13 {
            f.coeffs.insert(MultiIndex(grid_point(idx, n, k)), c);
        }
    }
    Ok(f)
}

/// Random polynomial with i.i.d. standard complex Gaussian coefficients on
/// every index of total degree `<= d`.
///
/// With `normalize`, the result is rescaled so its sup over `Omega_K^n` is 1:
/// exhaustive when `K^n <= 10^6`, otherwise estimated from `2^17` random grid
/// points (and then only approximately bounded).
pub fn random_low_degree(
    n: usize,
    k: usize,
    d: usize,
    seed: u64,
    normalize: bool,
) -> Result<CyclicPolynomial> {
    if k < 2 || d > n * (k - 1) {
        return Err(Error::InfeasibleDegree { n, k, d });
    }
    let mut rng = rng::stream(seed);
    let coeffs = low_degree_indices(n, k, d)
        .into_iter()
        .map(|alpha| (alpha.0, complex_gaussian(&mut rng)));
    let f = CyclicPolynomial::from_coeffs(n, k, coeffs)?;
    if !normalize {
        return Ok(f);
    }
    let sup = omega_sup_estimate(&f, &mut rng)?;
    Ok(if sup > 0.0 { f.scale(Complex64::new(1.0 / sup, 0.0)) } else { f })
}

fn omega_sup_estimate(f: &CyclicPolynomial, rng: &mut rng::Rng) -> Result<f64> {
    let size = (f.k as u128).checked_pow(f.n as u32).unwrap_or(u128::MAX);
    if size <= 1_000_000 {
        return Ok(f.table()?.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut best: f64 = 0.0;
    let mut x = vec![0u32; f.n];
    for _ in 0..(1 << 17) {
        for xj in x.iter_mut() {
            *xj = rng.random_range(0..f.k as u32);
        }
        best = best.max(f.evaluate_at(&x).norm());
    }
    Ok(best)
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    coeffs: Vec<CoeffEntry>,
}

impl Serialize for CyclicPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            n: self.n,
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, c)| CoeffEntry { alpha: a.0.clone(), re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclicPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(|e| (e.alpha, Complex64::new(e.re, e.im)));
        CyclicPolynomial::from_coeffs(raw.n, raw.k, coeffs).map_err(serde::de::Error::custom)
    }
}

/// Oracle samples `(x, f(x))`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Vec<u32>>,
    pub values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SampleLine {
    x: Vec<u32>,
    re: f64,
    im: f64,
}

impl SampleSet {
    pub fn new(points: Vec<Vec<u32>>, values: Vec<Complex64>, k: usize) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: values.len() });
        }
        if points.iter().flatten().any(|&e| e as usize >= k) {
            return Err(Error::InvalidArgument(format!("sample point entry outside Z_{k}")));
        }
        Ok(Self { points, values })
    }

    /// `count` uniform samples of `f`.
    pub fn draw(f: &CyclicPolynomial, count: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed);
        let mut points = Vec::with_capacity(count);
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let x: Vec<u32> = (0..f.n).map(|_| rng.random_range(0..f.k as u32)).collect();
            values.push(f.evaluate_at(&x));
            points.push(x);
        }
        Self { points, values }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (x, v) in self.points.iter().zip(&self.values) {
            let line = SampleLine { x: x.clone(), re: v.re, im: v.im };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R, k: usize) -> Result<Self> {
        let mut points = Vec::new();
        let mut values = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let s: SampleLine = serde_json::from_str(&line)?;
            points.push(s.x);
            values.push(Complex64::new(s.re, s.im));
        }
        Self::new(points, values, k)
    }
}

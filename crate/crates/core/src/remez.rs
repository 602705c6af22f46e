//! Dimension-free Remez machinery.
//!
//! A unimodular point `z` is written as a combination of the `K`-th roots of
//! unity ([`interpolation_weights`]); the weights are split into four
//! non-negative parts and laid out on `[0, D]` so that a single uniform draw
//! `T` reproduces `z^k = D E[r(T) w(T)^k]`. Sharing `m` draws across all
//! coordinates gives the correlated sampler behind the `(4 B log K + 4)^d`
//! comparison between `sup_{T^n} |f|` and `sup_{Omega_K^n} |f|`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::cyclic_fourier::{grid_size, CyclicPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, I, ONE, ZERO};
use crate::rng;

/// Constant in `||c||_1 <= B log K`.
///
/// Measured by sweeping `z` over 4097 points of one inter-node arc for every
/// `K <= 64`: the maximum of `||c||_1 / ln K` is `sqrt(2)/ln 2 = 2.0403` (at
/// `K = 2`, `z = i`); stored with 10% headroom.
pub const MEASURED_B: f64 = 2.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationWeights {
    pub k: usize,
    pub z: Complex64,
    pub c: Vec<Complex64>,
}

impl InterpolationWeights {
    pub fn l1_norm(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).sum()
    }

    /// `sum_j c_j omega^{j power}`; equals `z^power` for `power < K`.
    pub fn reconstruct(&self, power: usize) -> Complex64 {
        self.c
            .iter()
            .enumerate()
            .map(|(j, c)| c * root_of_unity(self.k, (j * power) as i64))
            .sum()
    }

    pub fn max_reconstruction_error(&self) -> f64 {
        let mut zk = ONE;
        let mut worst: f64 = 0.0;
        for power in 0..self.k {
            worst = worst.max((self.reconstruct(power) - zk).norm());
            zk *= self.z;
        }
        worst
    }
}

/// Weights `c_j = (1/K) sum_k z^k omega^{-jk}` (inverse DFT of `(1, z, ..., z^{K-1})`).
pub fn interpolation_weights(z: Complex64, k: usize) -> Result<InterpolationWeights> {
    if k < 2 {
        return Err(Error::InvalidArgument("K must be at least 2".into()));
    }
    if (z.norm() - 1.0).abs() > config::tolerance() {
        return Err(Error::NotUnimodular { index: 0, modulus: z.norm() });
    }
    for j in 0..k {
        if (z - root_of_unity(k, j as i64)).norm() <= 1e-12 {
            let mut c = vec![ZERO; k];
            c[j] = ONE;
            return Ok(InterpolationWeights { k, z, c });
        }
    }
    let c = (0..k)
        .map(|j| {
            let mut zk = ONE;
            let mut acc = ZERO;
            for power in 0..k {
                acc += zk * root_of_unity(k, -((j * power) as i64));
                zk *= z;
            }
            acc / k as f64
        })
        .collect();
    Ok(InterpolationWeights { k, z, c })
}

/// Largest `||c||_1` over `points + 1` equally spaced `z` on the arc between
/// the nodes `1` and `omega` (rotation by `omega` permutes the weights, so
/// the arc covers the whole circle).
pub fn sweep_l1(k: usize, points: usize) -> f64 {
    (0..=points)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / (points as f64 * k as f64);
            interpolation_weights(Complex64::from_polar(1.0, theta), k)
                .expect("unimodular by construction")
                .l1_norm()
        })
        .fold(0.0, f64::max)
}

/// `c_j = sum_s i^s c_j^(s)` with non-negative parts and disjoint supports
/// within the pairs `(0, 2)` and `(1, 3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitWeights {
    pub parts: [Vec<f64>; 4],
}

impl SplitWeights {
    pub fn k(&self) -> usize {
        self.parts[0].len()
    }

    pub fn reconstruct(&self, j: usize) -> Complex64 {
        let mut unit = ONE;
        let mut acc = ZERO;
        for part in &self.parts {
            acc += unit * part[j];
            unit *= I;
        }
        acc
    }

    pub fn part_l1(&self, s: usize) -> f64 {
        self.parts[s].iter().sum()
    }
}

pub fn split_weights(w: &InterpolationWeights) -> SplitWeights {
    let pos = |x: f64| x.max(0.0);
    SplitWeights {
        parts: [
            w.c.iter().map(|c| pos(c.re)).collect(),
            w.c.iter().map(|c| pos(c.im)).collect(),
            w.c.iter().map(|c| pos(-c.re)).collect(),
            w.c.iter().map(|c| pos(-c.im)).collect(),
        ],
    }
}

/// `C = B log K` for the configured constant.
pub fn weight_budget(k: usize) -> f64 {
    MEASURED_B * (k as f64).ln()
}

/// Layout length `D = max(4C + 1, 11)`.
pub fn layout_length(k: usize) -> f64 {
    (4.0 * weight_budget(k) + 1.0).max(11.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    /// `r = i^quarter` on this segment.
    pub quarter: u8,
    /// `w = omega^node` on this segment.
    pub node: u32,
}

/// Piecewise-constant `r, w : [0, D] -> Omega_4 x Omega_K`.
///
/// Quarter `s` occupies `[sC + 1, (s+1)C + 1]` (quarter 0 also owns `[0, 1]`),
/// with `C = (D - 1)/4`. Intervals `I_j^(s)` of length `c_j^(s)` are packed
/// left to right from `sC + 1` in index order. Whatever remains of the
/// quarter is cut into `K` cells of equal total length, assigned nodes
/// `0, 1, ..., K-1` in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLayout {
    pub k: usize,
    pub c_bound: f64,
    pub length: f64,
    pub segments: Vec<Segment>,
}

impl PiecewiseLayout {
    pub fn new(split: &SplitWeights) -> Result<Self> {
        let k = split.k();
        let length = layout_length(k);
        let c_bound = (length - 1.0) / 4.0;
        let mut segments = Vec::with_capacity(8 * k + 8);
        for s in 0..4 {
            let used = split.part_l1(s);
            if used > c_bound * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "||c^({s})||_1 = {used} exceeds C = {c_bound}"
                )));
            }
            let lo = s as f64 * c_bound + 1.0;
            let hi = lo + c_bound;
            let mut cursor = lo;
            let mut packed = Vec::new();
            for (j, &len) in split.parts[s].iter().enumerate() {
                if len > 0.0 {
                    packed.push(Segment { start: cursor, end: cursor + len, quarter: s as u8, node: j as u32 });
                    cursor += len;
                }
            }
            let mut residual = Vec::new();
            if s == 0 {
                residual.push((0.0, 1.0));
            }
            if hi > cursor {
                residual.push((cursor, hi));
            }
            segments.extend(packed);
            segments.extend(split_residual(&residual, k, s as u8));
        }
        segments.retain(|s| s.end > s.start);
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        if let Some(last) = segments.last_mut() {
            last.end = length;
        }
        Ok(Self { k, c_bound, length, segments })
    }

    /// Layout for the weights of a single unimodular coordinate.
    pub fn for_point(z: Complex64, k: usize) -> Result<Self> {
        Self::new(&split_weights(&interpolation_weights(z, k)?))
    }

    pub fn lookup(&self, t: f64) -> Segment {
        let idx = self.segments.partition_point(|s| s.end <= t);
        self.segments[idx.min(self.segments.len() - 1)]
    }

    pub fn total_measure(&self) -> f64 {
        self.segments.iter().map(|s| s.end - s.start).sum()
    }
}

fn split_residual(pieces: &[(f64, f64)], k: usize, quarter: u8) -> Vec<Segment> {
    let total: f64 = pieces.iter().map(|(a, b)| b - a).sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let cell = total / k as f64;
    let mut out = Vec::new();
    let mut node = 0usize;
    let mut left_in_cell = cell;
    for &(a, b) in pieces {
        let mut start = a;
        while start < b {
            let end = if node == k - 1 { b } else { b.min(start + left_in_cell) };
            out.push(Segment { start, end, quarter, node: node as u32 });
            left_in_cell -= end - start;
            start = end;
            if node < k - 1 && left_in_cell <= 1e-15 * total.max(1.0) {
                node += 1;
                left_in_cell = cell;
            }
        }
    }
    out
}

/// `r(T) = i^quarter`.
pub fn quarter_unit(q: u8) -> Complex64 {
    match q % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Correlated sampler `(R, W)` for a point of `T^n` and `m` shared draws.
#[derive(Debug, Clone)]
pub struct CorrelatedSampler {
    k: usize,
    m: usize,
    length: f64,
    layouts: Vec<PiecewiseLayout>,
}

/// One draw: `R` in `Omega_4` and `W` as exponents of `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct RwSample {
    pub r: Complex64,
    pub w: Vec<u32>,
}

impl CorrelatedSampler {
    pub fn new(z: &[Complex64], m: usize, k: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be positive".into()));
        }
        let layouts = z
            .iter()
            .map(|&zj| PiecewiseLayout::for_point(zj, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { k, m, length: layout_length(k), layouts })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.layouts.len()
    }

    /// Draws `T_1..T_m` and a uniform assignment `P : [n] -> [m]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RwSample {
        let assignment: Vec<usize> = (0..self.n()).map(|_| rng.random_range(0..self.m)).collect();
        self.sample_with_assignment(rng, &assignment)
    }

    /// Same as [`sample`](Self::sample) with the assignment `P` fixed.
    pub fn sample_with_assignment<R: Rng + ?Sized>(&self, rng: &mut R, assignment: &[usize]) -> RwSample {
        let t: Vec<f64> = (0..self.m).map(|_| rng.random::<f64>() * self.length).collect();
        let r = t
            .iter()
            .map(|&ti| quarter_unit(quarter_of(ti, self.length)))
            .fold(ONE, |acc, u| acc * u);
        let w = self
            .layouts
            .iter()
            .zip(assignment)
            .map(|(layout, &p)| layout.lookup(t[p]).node)
            .collect();
        RwSample { r, w }
    }

    /// `D^m R W^alpha` for one draw, i.e. an unbiased-up-to-`p(1/m)` estimate
    /// of `z^alpha`.
    pub fn monomial_term(&self, sample: &RwSample, alpha: &[u32]) -> Complex64 {
        let phase: usize = sample.w.iter().zip(alpha).map(|(&w, &a)| (w * a) as usize).sum();
        sample.r * root_of_unity(self.k, phase as i64) * self.length.powi(self.m as i32)
    }
}

fn quarter_of(t: f64, length: f64) -> u8 {
    let c = (length - 1.0) / 4.0;
    if t <= c + 1.0 {
        0
    } else {
        (((t - 1.0) / c).floor() as u8).min(3)
    }
}

/// One `(R, W)` draw with an explicit seed.
pub fn sample_rw(z: &[Complex64], m: usize, k: usize, seed: u64) -> Result<RwSample> {
    let sampler = CorrelatedSampler::new(z, m, k)?;
    Ok(sampler.sample(&mut rng::stream(seed)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VandermondeWeights {
    pub d: usize,
    /// `a_1, ..., a_d`.
    pub a: Vec<f64>,
}

pub const MAX_VANDERMONDE_DEGREE: usize = 120;

/// `a_m = (-1)^{d-m} m^d / (m! (d-m)!)`.
pub fn vandermonde_weights(d: usize) -> Result<VandermondeWeights> {
    if d == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if d > MAX_VANDERMONDE_DEGREE {
        return Err(Error::DegreeTooLarge(d, MAX_VANDERMONDE_DEGREE));
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=d).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let a = (1..=d)
        .map(|m| {
            let sign = if (d - m).is_multiple_of(2) { 1.0 } else { -1.0 };
            let magnitude = if d <= 14 {
                // exact integers below 2^53
                let fact = |x: usize| (1..=x).map(|i| i as f64).product::<f64>();
                (m as f64).powi(d as i32) / (fact(m) * fact(d - m))
            } else {
                (d as f64 * (m as f64).ln() - ln_fact[m] - ln_fact[d - m]).exp()
            };
            sign * magnitude
        })
        .collect();
    Ok(VandermondeWeights { d, a })
}

impl VandermondeWeights {
    /// `sum_m a_m m^{-t}`; 1 for `t = 0`, 0 for `t = 1..d-1`.
    pub fn moment(&self, t: usize) -> f64 {
        self.a
            .iter()
            .enumerate()
            .map(|(i, a)| a * ((i + 1) as f64).powi(-(t as i32)))
            .sum()
    }

    /// `sum_m a_m p(1/m)` for `p(x) = sum_t coeffs[t] x^t`.
    pub fn apply(&self, coeffs: &[f64]) -> f64 {
        coeffs.iter().enumerate().map(|(t, c)| c * self.moment(t)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Domain {
    Omega,
    Torus,
}

/// Sup of `|f|` over `Omega_K^n` (exact, by enumeration) or over `T^n`
/// (a lower bound).
///
/// The torus search evaluates every grid with `g` points per coordinate,
/// `g in {2^j} u {K 2^j}` and `g^n <= budget`, then refines the best three
/// points of each grid by coordinate-wise golden-section search on the
/// angles. The result is the best value seen, so it is monotone in `budget`;
/// whenever `K^n <= budget` the grids contain `Omega_K^n`.
pub fn sup_norm(f: &CyclicPolynomial, domain: Domain, budget: usize) -> Result<f64> {
    match domain {
        Domain::Omega => omega_sup(f),
        Domain::Torus => Ok(torus_sup_lower_bound(f, budget)),
    }
}

pub fn omega_sup(f: &CyclicPolynomial) -> Result<f64> {
    grid_size(f.n(), f.modulus())?;
    Ok(f.table()?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

fn grid_resolutions(n: usize, k: usize, budget: usize) -> Vec<usize> {
    let fits = |g: usize| (g as u128).checked_pow(n as u32).is_some_and(|p| p <= budget as u128);
    let mut out = Vec::new();
    for base in [1usize, k] {
        let mut g = base;
        while fits(g) {
            if !out.contains(&g) {
                out.push(g);
            }
            g *= 2;
        }
    }
    if out.is_empty() {
        out.push(1);
    }
    out.sort_unstable();
    out
}

pub fn torus_sup_lower_bound(f: &CyclicPolynomial, budget: usize) -> f64 {
    let n = f.n();
    if n == 0 || f.is_empty() {
        return f.evaluate_unchecked(&[]).norm();
    }
    let mut best: f64 = 0.0;
    for g in grid_resolutions(n, f.modulus(), budget) {
        let step = 2.0 * std::f64::consts::PI / g as f64;
        let total = g.pow(n as u32);
        let mut top: Vec<(f64, usize)> = Vec::with_capacity(4);
        let mut z = vec![ONE; n];
        for idx in 0..total {
            let mut rest = idx;
            for zj in z.iter_mut().rev() {
                *zj = Complex64::from_polar(1.0, (rest % g) as f64 * step);
                rest /= g;
            }
            let v = f.evaluate_unchecked(&z).norm();
            if top.len() < 3 || v > top[top.len() - 1].0 {
                top.push((v, idx));
                top.sort_by(|a, b| b.0.total_cmp(&a.0));
                top.truncate(3);
            }
        }
        for &(v, idx) in &top {
            best = best.max(v);
            let mut theta = vec![0.0; n];
            let mut rest = idx;
            for th in theta.iter_mut().rev() {
                *th = (rest % g) as f64 * step;
                rest /= g;
            }
            best = best.max(refine(f, &mut theta, step));
        }
    }
    best
}

fn modulus_at(f: &CyclicPolynomial, theta: &[f64]) -> f64 {
    let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    f.evaluate_unchecked(&z).norm()
}

fn refine(f: &CyclicPolynomial, theta: &mut [f64], half_width: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut current = modulus_at(f, theta);
    for _sweep in 0..6 {
        let before = current;
        for j in 0..theta.len() {
            let center = theta[j];
            let (mut a, mut b) = (center - half_width, center + half_width);
            let eval = |t: f64, th: &mut [f64]| {
                th[j] = t;
                modulus_at(f, th)
            };
            let mut x1 = b - INV_PHI * (b - a);
            let mut x2 = a + INV_PHI * (b - a);
            let mut f1 = eval(x1, theta);
            let mut f2 = eval(x2, theta);
            while b - a > 1e-10 {
                if f1 < f2 {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + INV_PHI * (b - a);
                    f2 = eval(x2, theta);
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - INV_PHI * (b - a);
                    f1 = eval(x1, theta);
                }
            }
            let cand = 0.5 * (a + b);
            let v = eval(cand, theta);
            if v > current {
                current = v;
            } else {
                theta[j] = center;
            }
        }
        if current - before <= 1e-14 {
            break;
        }
    }
    current
}

/// Outcome of comparing the two sup norms of one polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemezCertificate {
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub omega_sup: f64,
    pub torus_sup_lb: f64,
    pub ratio: f64,
    pub bound: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub budget: usize,
    pub seed: Option<u64>,
    pub violation: bool,
}

/// `(4 B log K + 4)^d`.
pub fn remez_bound(k: usize, d: usize) -> f64 {
    (4.0 * MEASURED_B * (k as f64).ln() + 4.0).powi(d as i32)
}

pub fn remez_certificate(f: &CyclicPolynomial, budget: usize, seed: Option<u64>) -> Result<RemezCertificate> {
    let omega_sup = omega_sup(f)?;
    let torus_sup_lb = torus_sup_lower_bound(f, budget);
    let ratio = if omega_sup > 0.0 {
        torus_sup_lb / omega_sup
    } else if torus_sup_lb == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let d = f.degree();
    let bound = remez_bound(f.modulus(), d);
    Ok(RemezCertificate {
        k: f.modulus(),
        n: f.n(),
        d,
        omega_sup,
        torus_sup_lb,
        ratio,
        bound,
        b: MEASURED_B,
        budget,
        seed,
        violation: ratio > bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn node_gives_indicator() {
        let w = interpolation_weights(root_of_unity(5, 2), 5).unwrap();
        let expected = [0.0, 0.0, 1.0, 0.0, 0.0];
        for (cj, e) in w.c.iter().zip(expected) {
            assert!((cj - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_point_weights_at_i() {
        let w = interpolation_weights(I, 2).unwrap();
        assert!((w.c[0] - c(0.5, 0.5)).norm() < 1e-12);
        assert!((w.c[1] - c(0.5, -0.5)).norm() < 1e-12);
        assert!((w.c[0] + w.c[1] - ONE).norm() < 1e-12);
        assert!((w.c[0] - w.c[1] - I).norm() < 1e-12);

        let s = split_weights(&w);
        let expected = [[0.5, 0.5], [0.5, 0.0], [0.0, 0.0], [0.0, 0.5]];
        for (part, want) in s.parts.iter().zip(expected) {
            for (x, y) in part.iter().zip(want) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_of_unit_weights() {
        let w = InterpolationWeights { k: 2, z: ONE, c: vec![ONE, -I] };
        let s = split_weights(&w);
        assert_eq!(s.parts[0], vec![1.0, 0.0]);
        assert_eq!(s.parts[3], vec![0.0, 1.0]);
        assert_eq!(s.parts[1], vec![0.0, 0.0]);
        assert_eq!(s.parts[2], vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_off_circle() {
        assert!(matches!(interpolation_weights(c(0.9, 0.0), 4), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn layout_partitions_interval() {
        for k in [2, 3, 5, 8] {
            let z = Complex64::from_polar(1.0, 0.37);
            let layout = PiecewiseLayout::for_point(z, k).unwrap();
            assert!((layout.total_measure() - layout.length).abs() < 1e-9);
            for pair in layout.segments.windows(2) {
                assert!((pair[0].end - pair[1].start).abs() < 1e-12);
            }
            assert_eq!(layout.segments[0].start, 0.0);
            // the measure of each (quarter, node) pair equals c^(s)_j plus a
            // uniform share of the quarter's residual
            let split = split_weights(&interpolation_weights(z, k).unwrap());
            let c_bound = layout.c_bound;
            for s in 0..4u8 {
                let quarter_len = if s == 0 { c_bound + 1.0 } else { c_bound };
                let residual = quarter_len - split.part_l1(s as usize);
                for j in 0..k as u32 {
                    let got: f64 = layout
                        .segments
                        .iter()
                        .filter(|g| g.quarter == s && g.node == j)
                        .map(|g| g.end - g.start)
                        .sum();
                    let want = split.parts[s as usize][j as usize] + residual / k as f64;
                    assert!((got - want).abs() < 1e-9, "K={k} s={s} j={j}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn vandermonde_small_cases() {
        assert_eq!(vandermonde_weights(1).unwrap().a, vec![1.0]);
        assert_eq!(vandermonde_weights(2).unwrap().a, vec![-1.0, 2.0]);
        let v3 = vandermonde_weights(3).unwrap();
        assert_eq!(v3.a, vec![0.5, -4.0, 4.5]);
        assert!((v3.moment(0) - 1.0).abs() < 1e-15);
        assert!(v3.moment(1).abs() < 1e-15);
        assert!(v3.moment(2).abs() < 1e-15);
        assert!(matches!(vandermonde_weights(121), Err(Error::DegreeTooLarge(121, 120))));
        assert!(vandermonde_weights(120).is_ok());
    }

    #[test]
    fn sup_norm_examples() {
        let z1 = CyclicPolynomial::from_coeffs(2, 3, [(vec![1, 0], ONE)]).unwrap();
        assert!((sup_norm(&z1, Domain::Omega, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((sup_norm(&z1, Domain::Torus, 100).unwrap() - 1.0).abs() < 1e-12);

        let f = CyclicPolynomial::from_coeffs(1, 3, [(vec![0], ONE), (vec![1], ONE), (vec![2], ONE)]).unwrap();
        assert!((sup_norm(&f, Domain::Omega, 0).unwrap() - 3.0).abs() < 1e-12);
        assert!((sup_norm(&f, Domain::Torus, 64).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn torus_exceeds_omega_for_one_minus_z() {
        // |1 - z| is sqrt(3) on Omega_3 but 2 at z = -1.
        let f = CyclicPolynomial::from_coeffs(1, 3, [(vec![0], ONE), (vec![1], -ONE)]).unwrap();
        let omega = sup_norm(&f, Domain::Omega, 0).unwrap();
        let torus = sup_norm(&f, Domain::Torus, 64).unwrap();
        // dense 1-D sweep oracle
        let dense = (0..100_000)
            .map(|i| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / 100_000.0);
                (ONE - z).norm()
            })
            .fold(0.0, f64::max);
        assert!((omega - 3f64.sqrt()).abs() < 1e-12);
        assert!((torus - dense).abs() < 1e-8);
        assert!(torus - omega > 1e-3);
    }

    #[test]
    fn torus_search_monotone_in_budget() {
        let f = crate::cyclic_fourier::random_low_degree(2, 4, 3, 17, true).unwrap();
        let mut prev = 0.0;
        for budget in [1, 4, 16, 64, 256, 1024, 4096] {
            let v = torus_sup_lower_bound(&f, budget);
            assert!(v >= prev - 1e-15, "budget {budget}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn certificate_trivial_cases() {
        let konst = CyclicPolynomial::constant(2, 3, c(2.0, 0.0));
        let cert = remez_certificate(&konst, 256, None).unwrap();
        assert!((cert.ratio - 1.0).abs() < 1e-12);
        assert!(cert.bound >= 1.0);
        assert!(!cert.violation);

        let mono = CyclicPolynomial::from_coeffs(3, 4, [(vec![1, 3, 2], c(0.0, 1.0))]).unwrap();
        let cert = remez_certificate(&mono, 4096, Some(3)).unwrap();
        assert!((cert.ratio - 1.0).abs() < 1e-12);
        assert_eq!(cert.d, 6);
    }

    #[test]
    fn certificate_json_fields() {
        let f = CyclicPolynomial::constant(1, 3, ONE);
        let v = serde_json::to_value(remez_certificate(&f, 10, Some(7)).unwrap()).unwrap();
        for key in ["K", "n", "d", "omega_sup", "torus_sup_lb", "ratio", "bound", "B", "budget", "seed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}

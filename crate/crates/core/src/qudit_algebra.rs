//! Gell-Mann and Heisenberg–Weyl operator bases on `C^K`, and observables
//! on `(C^K)^{⊗n}` expanded in either basis.
//!
//! Both bases are orthonormal under `<A, B> = (1/K) tr[A^dagger B]`. A
//! multi-qudit basis index is a vector of per-site positions in the fixed
//! ordering of [`GellMannIndex::all`] or [`HWIndex::all`]; position 0 is the
//! identity in both.

use std::collections::BTreeMap;

use base64::Engine;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{Error, Result};
use crate::linalg::{self, root_of_unity, CMatrix, CVector, I, ONE, ZERO};
use crate::tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GellMannIndex {
    Ident,
    /// `A_jk`, `1 <= j < k <= K`.
    Sym(usize, usize),
    /// `B_jk`.
    Antisym(usize, usize),
    /// `C_m`, `1 <= m <= K-1`.
    Diag(usize),
}

impl GellMannIndex {
    /// All `K^2` labels: identity, symmetric pairs, antisymmetric pairs, then
    /// diagonals.
    pub fn all(k: usize) -> Vec<Self> {
        let pairs: Vec<(usize, usize)> = (1..=k)
            .flat_map(|j| (j + 1..=k).map(move |l| (j, l)))
            .collect();
        std::iter::once(Self::Ident)
            .chain(pairs.iter().map(|&(j, l)| Self::Sym(j, l)))
            .chain(pairs.iter().map(|&(j, l)| Self::Antisym(j, l)))
            .chain((1..k).map(Self::Diag))
            .collect()
    }

    pub fn position(&self, k: usize) -> usize {
        let pairs = k * (k - 1) / 2;
        let pair_rank = |j: usize, l: usize| {
            // pairs with first index below j, then offset within row j
            (1..j).map(|a| k - a).sum::<usize>() + (l - j - 1)
        };
        match *self {
            Self::Ident => 0,
            Self::Sym(j, l) => 1 + pair_rank(j, l),
            Self::Antisym(j, l) => 1 + pairs + pair_rank(j, l),
            Self::Diag(m) => 1 + 2 * pairs + (m - 1),
        }
    }

    pub fn matrix(&self, k: usize) -> CMatrix {
        let mut out = CMatrix::zeros(k, k);
        let s = Complex64::new((k as f64 / 2.0).sqrt(), 0.0);
        match *self {
            Self::Ident => out.fill_with_identity(),
            Self::Sym(j, l) => {
                out[(j - 1, l - 1)] = s;
                out[(l - 1, j - 1)] = s;
            }
            Self::Antisym(j, l) => {
                out[(j - 1, l - 1)] = -I * s;
                out[(l - 1, j - 1)] = I * s;
            }
            Self::Diag(m) => {
                let gamma = (k as f64 / (m * m + m) as f64).sqrt();
                for i in 0..m {
                    out[(i, i)] = Complex64::new(gamma, 0.0);
                }
                out[(m, m)] = Complex64::new(-(m as f64) * gamma, 0.0);
            }
        }
        out
    }
}

pub fn gm_basis(k: usize) -> Vec<CMatrix> {
    GellMannIndex::all(k).iter().map(|g| g.matrix(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HWIndex {
    pub l: usize,
    pub m: usize,
}

impl HWIndex {
    /// Lexicographic in `(l, m)`.
    pub fn all(k: usize) -> Vec<Self> {
        (0..k).flat_map(|l| (0..k).map(move |m| Self { l, m })).collect()
    }

    pub fn from_position(p: usize, k: usize) -> Self {
        Self { l: p / k, m: p % k }
    }

    pub fn position(&self, k: usize) -> usize {
        self.l * k + self.m
    }

    pub fn weight(&self) -> usize {
        self.l + self.m
    }

    pub fn matrix(&self, k: usize) -> CMatrix {
        hw_element(self.l, self.m, k)
    }
}

/// Shift `X|j> = |j+1>`.
pub fn shift(k: usize) -> CMatrix {
    CMatrix::from_fn(k, k, |r, c| if r == (c + 1) % k { ONE } else { ZERO })
}

/// Clock `Z|j> = omega^j |j>`.
pub fn clock(k: usize) -> CMatrix {
    CMatrix::from_fn(k, k, |r, c| if r == c { root_of_unity(k, r as i64) } else { ZERO })
}

/// `X^l Z^m`, exponents taken mod `K`.
pub fn hw_element(l: usize, m: usize, k: usize) -> CMatrix {
    let (l, m) = (l % k, m % k);
    CMatrix::from_fn(k, k, |r, c| {
        if r == (c + l) % k {
            root_of_unity(k, (c * m) as i64)
        } else {
            ZERO
        }
    })
}

pub fn hw_basis(k: usize) -> Vec<CMatrix> {
    HWIndex::all(k).iter().map(|h| h.matrix(k)).collect()
}

pub fn is_prime(k: usize) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    /// Eigenvalue is `phase * omega^k`.
    pub k: usize,
    pub eigenvalue: Complex64,
    pub vector: CVector,
}

/// Eigenpairs of `X^l Z^m` for prime `K`, ordered by `k`.
///
/// For `l != 0` the vectors are
/// `zeta_k = sum_j phi^{-j} omega^{j(j-1)lm/2 - jk} e_{jl}` with eigenvalue
/// `phi omega^k`, where `phi = exp(i pi (K-1) l m / K)`. For odd `K` the
/// phase is a power of `omega` and is dropped (`phi = 1`); for `K = 2` with
/// `l m` odd (the operator `XZ = -i sigma_y`) it is `i`, and the spectrum is
/// `{i, -i}` rather than `{1, -1}`. For `l = 0` the operator is diagonal.
pub fn hw_eigensystem(l: usize, m: usize, k: usize) -> Result<Vec<Eigenpair>> {
    if !is_prime(k) {
        return Err(Error::CompositeModulus(k));
    }
    let (l, m) = (l % k, m % k);
    if l == 0 && m == 0 {
        return Err(Error::TrivialIndex);
    }
    if l == 0 {
        // Z^m e_j = omega^{jm} e_j; eigenvalue omega^q sits at j = q m^{-1}
        let m_inv = (1..k).find(|x| (x * m) % k == 1).expect("K prime");
        return Ok((0..k)
            .map(|q| {
                let j = (q * m_inv) % k;
                let mut v = CVector::zeros(k);
                v[j] = ONE;
                Eigenpair { k: q, eigenvalue: root_of_unity(k, q as i64), vector: v }
            })
            .collect());
    }
    let phase = hw_phase(l, m, k);
    let norm = 1.0 / (k as f64).sqrt();
    Ok((0..k)
        .map(|q| {
            let mut v = CVector::zeros(k);
            let mut phase_pow = ONE;
            for j in 0..k {
                let exp = (j * j.saturating_sub(1) / 2 * l * m) as i64 - (j * q) as i64;
                v[(j * l) % k] = root_of_unity(k, exp) * phase_pow.conj() * norm;
                phase_pow *= phase;
            }
            Eigenpair { k: q, eigenvalue: phase * root_of_unity(k, q as i64), vector: v }
        })
        .collect())
}

/// Global eigenvalue phase `phi` of `X^l Z^m` (`l != 0`), see [`hw_eigensystem`].
pub fn hw_phase(l: usize, m: usize, k: usize) -> Complex64 {
    if !k.is_multiple_of(2) || (l * m).is_multiple_of(2) {
        ONE
    } else {
        Complex64::from_polar(1.0, std::f64::consts::PI * ((k - 1) * l * m % (2 * k)) as f64 / k as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BasisKind {
    Gm,
    Hw,
}

impl BasisKind {
    pub fn single_site(&self, k: usize) -> Vec<CMatrix> {
        match self {
            Self::Gm => gm_basis(k),
            Self::Hw => hw_basis(k),
        }
    }
}

/// Sparse coefficients keyed by per-site basis positions.
pub type CoeffMap = BTreeMap<Vec<usize>, Complex64>;

/// Number of non-identity sites.
pub fn support_degree(index: &[usize]) -> usize {
    index.iter().filter(|&&p| p != 0).count()
}

/// `sum_j (l_j + m_j)` for an HW index.
pub fn hw_weighted_degree(index: &[usize], k: usize) -> usize {
    index.iter().map(|&p| HWIndex::from_position(p, k).weight()).sum()
}

/// Tensor-product basis element `M_alpha`.
pub fn basis_element(index: &[usize], kind: BasisKind, k: usize) -> CMatrix {
    let site = kind.single_site(k);
    linalg::kron_all(index.iter().map(|&p| &site[p]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n: usize,
    k: usize,
    matrix: CMatrix,
    pub gm_coeffs: Option<CoeffMap>,
    pub hw_coeffs: Option<CoeffMap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub op_norm: f64,
    pub l2_norm: f64,
}

fn check_dim(n: usize, k: usize) -> Result<usize> {
    let dim = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let cap = config::dense_cap();
    if dim > cap as u128 {
        return Err(Error::DenseCap { dim: dim.min(usize::MAX as u128) as usize, cap });
    }
    Ok(dim as usize)
}

/// `spread(x) = sum_j x_j (K^2)^{n-1-j}` for the digits `x_j` of `x`.
fn spread_table(n: usize, k: usize) -> Vec<usize> {
    let dim = k.pow(n as u32);
    (0..dim)
        .map(|x| tensor::digits(x, k, n).into_iter().fold(0, |acc, d| acc * k * k + d))
        .collect()
}

impl Observable {
    pub fn new(n: usize, k: usize, matrix: CMatrix) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument("K must be at least 2".into()));
        }
        let dim = check_dim(n, k)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        Ok(Self { n, k, matrix, gm_coeffs: None, hw_coeffs: None })
    }

    pub fn identity(n: usize, k: usize) -> Result<Self> {
        let dim = check_dim(n, k)?;
        Self::new(n, k, CMatrix::identity(dim, dim))
    }

    /// `sum_alpha c_alpha M_alpha`.
    pub fn from_coeffs(n: usize, k: usize, kind: BasisKind, coeffs: &CoeffMap) -> Result<Self> {
        let dim = check_dim(n, k)?;
        let k2 = k * k;
        let mut data = vec![ZERO; k2.pow(n as u32)];
        for (index, c) in coeffs {
            if index.len() != n || index.iter().any(|&p| p >= k2) {
                return Err(Error::InvalidArgument(format!("bad basis index {index:?}")));
            }
            data[tensor::from_digits(index.iter().copied(), k2)] = *c;
        }
        let site = kind.single_site(k);
        // S[(r, c), alpha] = M_alpha[r, c]
        let synth: Vec<Complex64> = (0..k2 * k2)
            .map(|i| {
                let (rc, alpha) = (i / k2, i % k2);
                site[alpha][(rc / k, rc % k)]
            })
            .collect();
        tensor::apply_along_all_axes(&mut data, n, &synth);
        let spread = spread_table(n, k);
        let matrix = CMatrix::from_fn(dim, dim, |r, c| data[k * spread[r] + spread[c]]);
        let mut out = Self::new(n, k, matrix)?;
        let cleaned: CoeffMap = coeffs.iter().filter(|(_, c)| c.norm() > 0.0).map(|(i, c)| (i.clone(), *c)).collect();
        match kind {
            BasisKind::Gm => out.gm_coeffs = Some(cleaned),
            BasisKind::Hw => out.hw_coeffs = Some(cleaned),
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Coefficients `K^{-n} tr[M_alpha^dagger A]`; entries with modulus at or
    /// below `1e-13` are dropped.
    pub fn expand(&self, kind: BasisKind) -> CoeffMap {
        if let Some(map) = self.cached(kind) {
            return map.clone();
        }
        let (n, k) = (self.n, self.k);
        let k2 = k * k;
        let dim = self.dim();
        let spread = spread_table(n, k);
        let mut data = vec![ZERO; k2.pow(n as u32)];
        for c in 0..dim {
            for r in 0..dim {
                data[k * spread[r] + spread[c]] = self.matrix[(r, c)];
            }
        }
        let site = kind.single_site(k);
        let inv_k = 1.0 / k as f64;
        // T[alpha, (r, c)] = conj(M_alpha[r, c]) / K
        let analysis: Vec<Complex64> = (0..k2 * k2)
            .map(|i| {
                let (alpha, rc) = (i / k2, i % k2);
                site[alpha][(rc / k, rc % k)].conj() * inv_k
            })
            .collect();
        tensor::apply_along_all_axes(&mut data, n, &analysis);
        data.iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-13)
            .map(|(i, c)| (tensor::digits(i, k2, n), *c))
            .collect()
    }

    /// Caches the expansion in `kind` and returns it.
    pub fn expand_cached(&mut self, kind: BasisKind) -> &CoeffMap {
        if self.cached(kind).is_none() {
            let map = self.expand(kind);
            match kind {
                BasisKind::Gm => self.gm_coeffs = Some(map),
                BasisKind::Hw => self.hw_coeffs = Some(map),
            }
        }
        self.cached(kind).expect("just filled")
    }

    fn cached(&self, kind: BasisKind) -> Option<&CoeffMap> {
        match kind {
            BasisKind::Gm => self.gm_coeffs.as_ref(),
            BasisKind::Hw => self.hw_coeffs.as_ref(),
        }
    }

    /// `A^{<=d}`: keep terms with at most `d` non-identity sites.
    pub fn truncate(&self, d: usize, kind: BasisKind) -> Result<Self> {
        let kept: CoeffMap = self
            .expand(kind)
            .into_iter()
            .filter(|(index, _)| support_degree(index) <= d)
            .collect();
        Self::from_coeffs(self.n, self.k, kind, &kept)
    }

    /// HW truncation by weighted degree `sum (l_j + m_j) <= d`.
    pub fn truncate_hw_weighted(&self, d: usize) -> Result<Self> {
        let k = self.k;
        let kept: CoeffMap = self
            .expand(BasisKind::Hw)
            .into_iter()
            .filter(|(index, _)| hw_weighted_degree(index, k) <= d)
            .collect();
        Self::from_coeffs(self.n, self.k, BasisKind::Hw, &kept)
    }

    /// Largest support degree among nonzero coefficients.
    pub fn degree(&self, kind: BasisKind) -> usize {
        self.expand(kind).keys().map(|i| support_degree(i)).max().unwrap_or(0)
    }

    pub fn norms(&self) -> Norms {
        Norms { op_norm: linalg::op_norm(&self.matrix), l2_norm: self.l2_norm() }
    }

    /// `sqrt(K^{-n} tr[A^dagger A])`.
    pub fn l2_norm(&self) -> f64 {
        (self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.dim() as f64).sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        linalg::is_hermitian(&self.matrix, config::tolerance())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Self::new(self.n, self.k, &self.matrix - &other.matrix)
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = Self::new(self.n, self.k, &self.matrix * Complex64::new(a, 0.0)).expect("same shape");
        let s = |m: &CoeffMap| m.iter().map(|(i, c)| (i.clone(), c * a)).collect();
        out.gm_coeffs = self.gm_coeffs.as_ref().map(s);
        out.hw_coeffs = self.hw_coeffs.as_ref().map(s);
        out
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    index: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ObservableRepr {
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    /// Row-major, little-endian `f64` pairs `(re, im)`, base-64.
    matrix: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gm_coeffs: Option<Vec<CoeffEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hw_coeffs: Option<Vec<CoeffEntry>>,
}

fn entries(map: &CoeffMap) -> Vec<CoeffEntry> {
    map.iter().map(|(i, c)| CoeffEntry { index: i.clone(), re: c.re, im: c.im }).collect()
}

fn from_entries(v: Vec<CoeffEntry>) -> CoeffMap {
    v.into_iter().map(|e| (e.index, Complex64::new(e.re, e.im))).collect()
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dim = self.dim();
        let mut bytes = Vec::with_capacity(dim * dim * 16);
        for r in 0..dim {
            for c in 0..dim {
                let z = self.matrix[(r, c)];
                bytes.extend_from_slice(&z.re.to_le_bytes());
                bytes.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        ObservableRepr {
            n: self.n,
            k: self.k,
            matrix: base64::engine::general_purpose::STANDARD.encode(bytes),
            gm_coeffs: self.gm_coeffs.as_ref().map(entries),
            hw_coeffs: self.hw_coeffs.as_ref().map(entries),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ObservableRepr::deserialize(d)?;
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(repr.matrix.as_bytes())
            .map_err(D::Error::custom)?;
        let dim = check_dim(repr.n, repr.k).map_err(D::Error::custom)?;
        if bytes.len() != dim * dim * 16 {
            return Err(D::Error::custom(format!(
                "matrix has {} bytes, expected {}",
                bytes.len(),
                dim * dim * 16
            )));
        }
        let word = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        let matrix = CMatrix::from_fn(dim, dim, |r, c| {
            let base = 2 * (r * dim + c);
            Complex64::new(word(base), word(base + 1))
        });
        let mut obs = Observable::new(repr.n, repr.k, matrix).map_err(D::Error::custom)?;
        obs.gm_coeffs = repr.gm_coeffs.map(from_entries);
        obs.hw_coeffs = repr.hw_coeffs.map(from_entries);
        Ok(obs)
    }
}

/// Random observable `sum c_alpha M_alpha` over GM indices of support degree
/// `<= d`, with i.i.d. real Gaussian `c_alpha` (Hermitian by construction),
/// rescaled to operator norm `op_norm` when given.
pub fn random_gm_observable<R: rand::Rng + ?Sized>(
    n: usize,
    k: usize,
    d: usize,
    op_norm: Option<f64>,
    rng: &mut R,
) -> Result<Observable> {
    use rand_distr::StandardNormal;
    let k2 = k * k;
    check_dim(n, k)?;
    let mut coeffs = CoeffMap::new();
    for i in 0..k2.pow(n as u32) {
        let index = tensor::digits(i, k2, n);
        if support_degree(&index) <= d {
            let c: f64 = rng.sample(StandardNormal);
            coeffs.insert(index, Complex64::new(c, 0.0));
        }
    }
    let obs = Observable::from_coeffs(n, k, BasisKind::Gm, &coeffs)?;
    Ok(match op_norm {
        Some(target) => {
            let norm = obs.norms().op_norm;
            if norm > 0.0 { obs.scale(target / norm) } else { obs }
        }
        None => obs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli() -> [CMatrix; 4] {
        [
            CMatrix::identity(2, 2),
            CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        ]
    }

    #[test]
    fn gm_k2_is_pauli() {
        let gm = gm_basis(2);
        for (a, b) in gm.iter().zip(pauli().iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn gm_orthonormal_hermitian() {
        for k in 2..=6 {
            let gm = gm_basis(k);
            assert_eq!(gm.len(), k * k);
            for (i, a) in gm.iter().enumerate() {
                assert!(linalg::is_hermitian(a, 1e-14));
                if i > 0 {
                    assert!(linalg::trace(a).norm() < 1e-12);
                }
                for (j, b) in gm.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((linalg::normalized_inner(a, b) - c(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gm_positions_match_order() {
        for k in 2..=5 {
            for (p, g) in GellMannIndex::all(k).iter().enumerate() {
                assert_eq!(g.position(k), p);
            }
        }
    }

    #[test]
    fn hw_k2_elements() {
        let [_, sx, sy, sz] = pauli();
        assert_eq!(shift(2), sx);
        assert!(linalg::max_abs_diff(&clock(2), &sz) < 1e-15);
        assert!(linalg::max_abs_diff(&hw_element(1, 1, 2), &(sy * -I)) < 1e-15);
    }

    #[test]
    fn hw_relations() {
        for k in 2..=7 {
            let (x, z) = (shift(k), clock(k));
            let id = CMatrix::identity(k, k);
            assert!(linalg::max_abs_diff(&x.pow(k as u32), &id) < 1e-12);
            assert!(linalg::max_abs_diff(&z.pow(k as u32), &id) < 1e-12);
            let lhs = &z * &x;
            let rhs = (&x * &z) * root_of_unity(k, 1);
            assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-12);
            for (i, a) in hw_basis(k).iter().enumerate() {
                for (j, b) in hw_basis(k).iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((linalg::normalized_inner(a, b) - c(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigensystem_prime() {
        for k in [2, 3, 5, 7] {
            for h in HWIndex::all(k).into_iter().skip(1) {
                let op = h.matrix(k);
                let pairs = hw_eigensystem(h.l, h.m, k).unwrap();
                assert_eq!(pairs.len(), k);
                for p in &pairs {
                    assert!((p.vector.norm() - 1.0).abs() < 1e-12);
                    let resid = &op * &p.vector - &p.vector * p.eigenvalue;
                    assert!(resid.norm() < 1e-9, "K={k} {h:?} k={}", p.k);
                }
            }
        }
    }

    #[test]
    fn eigensystem_sigma_x() {
        let pairs = hw_eigensystem(1, 0, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pairs[0].eigenvalue - ONE).norm() < 1e-15);
        assert!((pairs[1].eigenvalue + ONE).norm() < 1e-15);
        assert!((pairs[0].vector[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((pairs[0].vector[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((pairs[1].vector[1] + c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn xz_at_k2_has_imaginary_spectrum() {
        let ev = linalg::general_eigenvalues(&hw_element(1, 1, 2));
        assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
        let pairs = hw_eigensystem(1, 1, 2).unwrap();
        assert!((pairs[0].eigenvalue - I).norm() < 1e-15);
        assert!((pairs[1].eigenvalue + I).norm() < 1e-15);
    }

    #[test]
    fn eigensystem_refusals() {
        assert!(matches!(hw_eigensystem(2, 0, 4), Err(Error::CompositeModulus(4))));
        assert!(matches!(hw_eigensystem(0, 0, 3), Err(Error::TrivialIndex)));
        let ev = linalg::general_eigenvalues(&hw_element(2, 0, 4));
        assert_eq!(ev.iter().filter(|z| (*z - ONE).norm() < 1e-9).count(), 2);
    }

    #[test]
    fn expand_examples() {
        let id = Observable::identity(3, 2).unwrap();
        let map = id.expand(BasisKind::Gm);
        assert_eq!(map.len(), 1);
        assert!((map[&vec![0, 0, 0]] - ONE).norm() < 1e-14);

        let zi = Observable::new(2, 2, linalg::kron(&pauli()[3], &CMatrix::identity(2, 2))).unwrap();
        let map = zi.expand(BasisKind::Gm);
        assert_eq!(map.len(), 1);
        assert!((map[&vec![3, 0]] - ONE).norm() < 1e-14);
    }

    #[test]
    fn expand_matches_naive() {
        let mut r = rng::stream(5);
        let a = Observable::new(2, 3, CMatrix::from_fn(9, 9, |_, _| linalg::complex_gaussian(&mut r))).unwrap();
        for kind in [BasisKind::Gm, BasisKind::Hw] {
            let map = a.expand(kind);
            for i in 0..81 {
                let index = tensor::digits(i, 9, 2);
                let m = basis_element(&index, kind, 3);
                let naive = linalg::normalized_inner(&m, a.matrix());
                let got = map.get(&index).copied().unwrap_or(ZERO);
                assert!((got - naive).norm() < 1e-12);
            }
            let back = Observable::from_coeffs(2, 3, kind, &map).unwrap();
            assert!(linalg::max_abs_diff(back.matrix(), a.matrix()) < 1e-10);
        }
    }

    #[test]
    fn truncation_is_basis_independent() {
        let mut r = rng::stream(9);
        let a = Observable::new(2, 3, linalg::random_hermitian(9, &mut r)).unwrap();
        for d in 0..=2 {
            let g = a.truncate(d, BasisKind::Gm).unwrap();
            let h = a.truncate(d, BasisKind::Hw).unwrap();
            assert!(linalg::max_abs_diff(g.matrix(), h.matrix()) < 1e-8, "d = {d}");
        }
        let t0 = a.truncate(0, BasisKind::Gm).unwrap();
        let tr = linalg::trace(a.matrix()) / 9.0;
        assert!(linalg::max_abs_diff(t0.matrix(), &(CMatrix::identity(9, 9) * tr)) < 1e-10);
        // weighted HW degree is a different filter
        let w = a.truncate_hw_weighted(1).unwrap();
        assert!(linalg::max_abs_diff(w.matrix(), a.truncate(1, BasisKind::Gm).unwrap().matrix()) > 1e-3);
    }

    #[test]
    fn gm_coefficients_of_hermitian_are_real() {
        let mut r = rng::stream(2);
        let a = Observable::new(2, 3, linalg::random_hermitian(9, &mut r)).unwrap();
        let map = a.expand(BasisKind::Gm);
        assert!(map.values().all(|c| c.im.abs() < 1e-9));
        let parseval: f64 = map.values().map(|c| c.norm_sqr()).sum();
        assert!((parseval.sqrt() - a.l2_norm()).abs() < 1e-9);
    }

    #[test]
    fn norms_examples() {
        let sx = Observable::new(1, 2, pauli()[1].clone()).unwrap();
        let nm = sx.norms();
        assert!((nm.op_norm - 1.0).abs() < 1e-12 && (nm.l2_norm - 1.0).abs() < 1e-12);
        let d = CMatrix::from_diagonal(&CVector::from_vec((1..=4).map(|x| c(x as f64, 0.0)).collect()));
        let nm = Observable::new(2, 2, d).unwrap().norms();
        assert!((nm.op_norm - 4.0).abs() < 1e-12);
        assert!((nm.l2_norm - (30.0f64 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dense_cap_refuses() {
        assert!(matches!(Observable::identity(13, 2), Err(Error::DenseCap { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let mut r = rng::stream(4);
        let mut a = Observable::new(1, 3, linalg::random_hermitian(3, &mut r)).unwrap();
        a.expand_cached(BasisKind::Gm);
        let text = serde_json::to_string(&a).unwrap();
        let back: Observable = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }
}

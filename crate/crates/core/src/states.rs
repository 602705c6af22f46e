//! Product states used by the reductions from qudit observables to
//! functions on the cube `{-1,1}^{n(K^2-1)}` (Gell-Mann) and on `Omega_K^{n(K+1)}`
//! (Heisenberg–Weyl).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::qudit_algebra::{basis_element, hw_eigensystem, BasisKind, GellMannIndex, Observable};

pub fn binom2(k: usize) -> usize {
    k * (k - 1) / 2
}

/// `c = sqrt(K/2) / (3 binom(K, 2))`, the per-site expectation scale of a
/// normalized GM state.
pub fn gm_scale(k: usize) -> f64 {
    (k as f64 / 2.0).sqrt() / (3 * binom2(k)) as f64
}

/// Per-qudit sign triple `(x, y, z)` with lengths `binom(K,2)`,
/// `binom(K,2)`, `K-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeLabel {
    pub x: Vec<i8>,
    pub y: Vec<i8>,
    pub z: Vec<i8>,
}

impl CubeLabel {
    pub fn new(k: usize, x: Vec<i8>, y: Vec<i8>, z: Vec<i8>) -> Result<Self> {
        let label = Self { x, y, z };
        label.validate(k)?;
        Ok(label)
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        let p = binom2(k);
        if self.x.len() != p || self.y.len() != p || self.z.len() != k - 1 {
            return Err(Error::Label(format!(
                "expected lengths ({p}, {p}, {}), got ({}, {}, {})",
                k - 1,
                self.x.len(),
                self.y.len(),
                self.z.len()
            )));
        }
        if self.coords().any(|s| s != 1 && s != -1) {
            return Err(Error::Label("entries must be +1 or -1".into()));
        }
        Ok(())
    }

    /// `x`, then `y`, then `z`; coordinate `g - 1` pairs with GM position `g`.
    pub fn coords(&self) -> impl Iterator<Item = i8> + '_ {
        self.x.iter().chain(&self.y).chain(&self.z).copied()
    }

    pub fn from_coords(k: usize, coords: &[i8]) -> Result<Self> {
        let p = binom2(k);
        if coords.len() != k * k - 1 {
            return Err(Error::Label(format!("expected {} coordinates, got {}", k * k - 1, coords.len())));
        }
        Self::new(k, coords[..p].to_vec(), coords[p..2 * p].to_vec(), coords[2 * p..].to_vec())
    }

    /// Label from the low `K^2 - 1` bits of `bits` (bit set means `-1`).
    pub fn from_bits(k: usize, bits: u64) -> Self {
        let coords: Vec<i8> = (0..k * k - 1).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
        Self::from_coords(k, &coords).expect("lengths match")
    }
}

/// `Sigma_K = {(1,0), (1,1), ..., (1,K-1), (0,1)}`.
pub fn sigma_k(k: usize) -> Vec<(usize, usize)> {
    (0..k).map(|m| (1, m)).chain(std::iter::once((0, 1))).collect()
}

/// Per-qudit choice of an eigenvalue for each generator in [`sigma_k`],
/// stored as exponents of `omega`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaLabel {
    pub exponents: Vec<u32>,
}

impl OmegaLabel {
    pub fn new(k: usize, exponents: Vec<u32>) -> Result<Self> {
        if exponents.len() != k + 1 {
            return Err(Error::Label(format!("expected {} entries, got {}", k + 1, exponents.len())));
        }
        if exponents.iter().any(|&e| e as usize >= k) {
            return Err(Error::Label(format!("exponents must lie in [0, {k})")));
        }
        Ok(Self { exponents })
    }

    pub fn value(&self, k: usize, slot: usize) -> Complex64 {
        linalg::root_of_unity(k, self.exponents[slot] as i64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmState {
    /// Unnormalized, `tr rho = 3 binom(K, 2)`.
    pub rho: CMatrix,
    /// `rho / (3 binom(K, 2))`.
    pub r: CMatrix,
}

/// `rho = sum A_jk^(x_jk) + sum B_jk^(y_jk) + sum z_m C_m / sqrt(2K) + (K-1)/2 I`
/// with `A^(b)`, `B^(b)` the projectors onto `(e_j + b e_k)/sqrt 2` and
/// `(e_j + i b e_k)/sqrt 2`.
pub fn gm_state(label: &CubeLabel, k: usize) -> Result<GmState> {
    label.validate(k)?;
    let mut rho = CMatrix::identity(k, k) * Complex64::new((k as f64 - 1.0) / 2.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let mut p = 0;
    for j in 0..k {
        for l in j + 1..k {
            let bx = label.x[p] as f64;
            let by = label.y[p] as f64;
            rho[(j, j)] += 2.0 * half;
            rho[(l, l)] += 2.0 * half;
            rho[(j, l)] += half * bx + Complex64::new(0.0, -0.5 * by);
            rho[(l, j)] += half * bx + Complex64::new(0.0, 0.5 * by);
            p += 1;
        }
    }
    let scale = 1.0 / (2.0 * k as f64).sqrt();
    for (m, &zm) in label.z.iter().enumerate() {
        rho += GellMannIndex::Diag(m + 1).matrix(k) * Complex64::new(zm as f64 * scale, 0.0);
    }
    let r = &rho / Complex64::new((3 * binom2(k)) as f64, 0.0);
    Ok(GmState { rho, r })
}

/// `rho = (1/(K+1)) sum_{(l,m) in Sigma_K} |e^{l,m}><e^{l,m}|`, where
/// `e^{l,m}` is the eigenvector of `X^l Z^m` selected by the label.
pub fn hw_state(label: &OmegaLabel, k: usize) -> Result<CMatrix> {
    let label = OmegaLabel::new(k, label.exponents.clone())?;
    let mut rho = CMatrix::zeros(k, k);
    for (slot, (l, m)) in sigma_k(k).into_iter().enumerate() {
        let pairs = hw_eigensystem(l, m, k)?;
        let v = &pairs[label.exponents[slot] as usize].vector;
        rho += linalg::projector(v);
    }
    Ok(rho / Complex64::new((k + 1) as f64, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum StateLabel {
    Gm(CubeLabel),
    Hw(OmegaLabel),
}

/// Density matrix on `(C^K)^{⊗n}`, kept as per-qudit factors when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityMatrix {
    Product { k: usize, factors: Vec<CMatrix> },
    Dense { n: usize, k: usize, matrix: CMatrix },
}

impl DensityMatrix {
    pub fn n(&self) -> usize {
        match self {
            Self::Product { factors, .. } => factors.len(),
            Self::Dense { n, .. } => *n,
        }
    }

    pub fn modulus(&self) -> usize {
        match self {
            Self::Product { k, .. } | Self::Dense { k, .. } => *k,
        }
    }

    /// Full `K^n x K^n` matrix, refused above the dense cap.
    pub fn materialize(&self) -> Result<CMatrix> {
        match self {
            Self::Dense { matrix, .. } => Ok(matrix.clone()),
            Self::Product { k, factors } => {
                let dim = (*k as u128).checked_pow(factors.len() as u32).unwrap_or(u128::MAX);
                let cap = config::dense_cap();
                if dim > cap as u128 {
                    return Err(Error::DenseCap { dim: dim.min(usize::MAX as u128) as usize, cap });
                }
                Ok(linalg::kron_all(factors))
            }
        }
    }

    /// Hermitian, `lambda_min >= -1e-9` and unit trace, each to tolerance.
    pub fn check(&self) -> Result<()> {
        let mats: Vec<CMatrix> = match self {
            Self::Product { factors, .. } => factors.clone(),
            Self::Dense { matrix, .. } => vec![matrix.clone()],
        };
        let tol = config::tolerance();
        for m in &mats {
            if !linalg::is_hermitian(m, tol) {
                return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
            }
            let lo = linalg::hermitian_eigenvalues(m)[0];
            if lo < -1e-9 {
                return Err(Error::InvalidArgument(format!("negative eigenvalue {lo}")));
            }
            if (linalg::trace(m) - ONE).norm() > tol {
                return Err(Error::InvalidArgument("trace is not 1".into()));
            }
        }
        Ok(())
    }

    /// `tr[(⊗ M_j) rho]` for a product operator.
    pub fn expectation_product(&self, ops: &[CMatrix]) -> Result<Complex64> {
        match self {
            Self::Product { factors, .. } => {
                if ops.len() != factors.len() {
                    return Err(Error::DimensionMismatch { expected: factors.len(), got: ops.len() });
                }
                Ok(ops.iter().zip(factors).map(|(m, r)| linalg::trace_of_product(m, r)).product())
            }
            Self::Dense { matrix, .. } => Ok(linalg::trace_of_product(&linalg::kron_all(ops), matrix)),
        }
    }
}

/// `⊗_j rho_j` in factored form; GM factors are the normalized `r`.
pub fn product_state(labels: &[StateLabel], k: usize) -> Result<DensityMatrix> {
    let factors = labels
        .iter()
        .map(|label| match label {
            StateLabel::Gm(c) => gm_state(c, k).map(|s| s.r),
            StateLabel::Hw(o) => hw_state(o, k),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityMatrix::Product { k, factors })
}

/// `tr[A rho]`.
///
/// For a product state and an observable with cached coefficients this uses
/// `sum_alpha A_alpha prod_j tr[M_{alpha_j} rho_j]` and never forms the full
/// state; otherwise the state is materialized.
pub fn expectation(a: &Observable, rho: &DensityMatrix) -> Result<Complex64> {
    if a.n() != rho.n() || a.modulus() != rho.modulus() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: rho.n() });
    }
    let k = a.modulus();
    if let DensityMatrix::Product { factors, .. } = rho {
        for (kind, map) in [(BasisKind::Gm, &a.gm_coeffs), (BasisKind::Hw, &a.hw_coeffs)] {
            if let Some(map) = map {
                let site = kind.single_site(k);
                let traces: Vec<Vec<Complex64>> = factors
                    .iter()
                    .map(|r| site.iter().map(|m| linalg::trace_of_product(m, r)).collect())
                    .collect();
                return Ok(map
                    .iter()
                    .map(|(index, c)| c * index.iter().zip(&traces).map(|(&p, t)| t[p]).product::<Complex64>())
                    .sum());
            }
        }
    }
    let full = rho.materialize()?;
    if full.nrows() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: full.nrows() });
    }
    Ok(linalg::trace_of_product(a.matrix(), &full))
}

/// `tr[M_alpha rho]` for a GM or HW basis monomial.
pub fn monomial_expectation(index: &[usize], kind: BasisKind, rho: &DensityMatrix) -> Result<Complex64> {
    let k = rho.modulus();
    match rho {
        DensityMatrix::Product { .. } => {
            let site = kind.single_site(k);
            let ops: Vec<CMatrix> = index.iter().map(|&p| site[p].clone()).collect();
            rho.expectation_product(&ops)
        }
        DensityMatrix::Dense { matrix, .. } => Ok(linalg::trace_of_product(&basis_element(index, kind, k), matrix)),
    }
}

pub fn zero_if_tiny(z: Complex64) -> Complex64 {
    if z.norm() < 1e-15 {
        ZERO
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::root_of_unity;
    use crate::qudit_algebra::{hw_element, hw_phase, GellMannIndex};
    use crate::rng;
    use rand::Rng;

    #[test]
    fn qubit_gm_state() {
        let label = CubeLabel::new(2, vec![1], vec![1], vec![1]).unwrap();
        let s = gm_state(&label, 2).unwrap();
        assert!((linalg::trace(&s.rho) - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        for g in GellMannIndex::all(2).into_iter().skip(1) {
            let t = linalg::trace_of_product(&g.matrix(2), &s.rho);
            assert!((t - ONE).norm() < 1e-12, "{g:?}: {t}");
        }
        let neg = CubeLabel::new(2, vec![-1], vec![-1], vec![-1]).unwrap();
        let s = gm_state(&neg, 2).unwrap();
        for g in GellMannIndex::all(2).into_iter().skip(1) {
            assert!((linalg::trace_of_product(&g.matrix(2), &s.rho) + ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn gm_state_identities_exhaustive() {
        for k in 2..=4 {
            let coords = k * k - 1;
            let s2 = (k as f64 / 2.0).sqrt();
            let basis = GellMannIndex::all(k);
            for bits in 0..1u64 << coords {
                let label = CubeLabel::from_bits(k, bits);
                let s = gm_state(&label, k).unwrap();
                assert_eq!(linalg::trace(&s.rho).re, (3 * binom2(k)) as f64);
                for (g, x) in basis.iter().skip(1).zip(label.coords()) {
                    let t = linalg::trace_of_product(&g.matrix(k), &s.rho);
                    assert!((t - Complex64::new(s2 * x as f64, 0.0)).norm() < 1e-9);
                }
                if bits % 97 == 0 {
                    DensityMatrix::Dense { n: 1, k, matrix: s.r }.check().unwrap();
                }
            }
        }
    }

    #[test]
    fn gm_label_errors() {
        assert!(matches!(CubeLabel::new(3, vec![1; 2], vec![1; 3], vec![1; 2]), Err(Error::Label(_))));
        assert!(matches!(CubeLabel::new(2, vec![0], vec![1], vec![1]), Err(Error::Label(_))));
    }

    #[test]
    fn hw_state_identity() {
        let mut r = rng::stream(1);
        for k in [2usize, 3, 5] {
            for _ in 0..5 {
                let exps = (0..=k).map(|_| r.random_range(0..k as u32)).collect();
                let label = OmegaLabel::new(k, exps).unwrap();
                let rho = hw_state(&label, k).unwrap();
                DensityMatrix::Dense { n: 1, k, matrix: rho.clone() }.check().unwrap();
                for (slot, (l, m)) in sigma_k(k).into_iter().enumerate() {
                    let phase = hw_phase(l, m, k);
                    for p in 1..k {
                        let op = hw_element(p * l, p * m, k);
                        let got = linalg::trace_of_product(&op, &rho);
                        let half = (p * (p - 1) / 2 * l * m) as i64;
                        let want = (phase * label.value(k, slot)).powu(p as u32) * root_of_unity(k, -half)
                            / (k + 1) as f64;
                        assert!((got - want).norm() < 1e-9, "K={k} ({l},{m}) p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn qutrit_hw_all_ones() {
        let rho = hw_state(&OmegaLabel::new(3, vec![0; 4]).unwrap(), 3).unwrap();
        let t = linalg::trace_of_product(&hw_element(1, 0, 3), &rho);
        assert!((t - Complex64::new(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn qubit_hw_state_is_mix_of_three() {
        let label = OmegaLabel::new(2, vec![0, 1, 0]).unwrap();
        let rho = hw_state(&label, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = crate::linalg::CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        // XZ = [[0, -1], [1, 0]] has eigenvector (1, i)/sqrt 2 for -i
        let y = crate::linalg::CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
        let zero = crate::linalg::CVector::from_vec(vec![ONE, ZERO]);
        let want = (linalg::projector(&plus) + linalg::projector(&y) + linalg::projector(&zero)) / Complex64::new(3.0, 0.0);
        assert!(linalg::max_abs_diff(&rho, &want) < 1e-12);
    }

    #[test]
    fn cross_generator_vanishing() {
        for k in [3usize, 5] {
            let gens = sigma_k(k);
            for &(l, m) in &gens {
                for pair in hw_eigensystem(l, m, k).unwrap() {
                    let proj = linalg::projector(&pair.vector);
                    for &(l2, m2) in &gens {
                        if (l2, m2) == (l, m) {
                            continue;
                        }
                        for p in 1..k {
                            let t = linalg::trace_of_product(&hw_element(p * l2, p * m2, k), &proj);
                            assert!(t.norm() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_state_factorizes() {
        let mut r = rng::stream(3);
        let k = 3;
        let labels: Vec<StateLabel> = (0..3)
            .map(|_| StateLabel::Gm(CubeLabel::from_bits(k, r.random::<u64>())))
            .collect();
        let rho = product_state(&labels, k).unwrap();
        rho.check().unwrap();
        let full = rho.materialize().unwrap();
        let c = gm_scale(k);
        for _ in 0..20 {
            let index: Vec<usize> = (0..3).map(|_| r.random_range(0..k * k)).collect();
            let dense = linalg::trace_of_product(&basis_element(&index, BasisKind::Gm, k), &full);
            let fact = monomial_expectation(&index, BasisKind::Gm, &rho).unwrap();
            assert!((dense - fact).norm() < 1e-9);
            // c^{|alpha|} times the product of the selected label signs
            let mut want = 1.0;
            for (site, &p) in index.iter().enumerate() {
                if p > 0 {
                    let StateLabel::Gm(lab) = &labels[site] else { unreachable!() };
                    want *= c * lab.coords().nth(p - 1).unwrap() as f64;
                }
            }
            assert!((fact - Complex64::new(want, 0.0)).norm() < 1e-9);
        }
        let single = product_state(&labels[..1], k).unwrap().materialize().unwrap();
        let StateLabel::Gm(l0) = &labels[0] else { unreachable!() };
        assert!(linalg::max_abs_diff(&single, &gm_state(l0, k).unwrap().r) < 1e-15);
    }

    #[test]
    fn expectation_bounds() {
        let mut r = rng::stream(8);
        let a = Observable::new(2, 3, linalg::random_hermitian(9, &mut r)).unwrap();
        let rho = DensityMatrix::Dense { n: 2, k: 3, matrix: linalg::random_density(9, &mut r) };
        let e = expectation(&a, &rho).unwrap();
        assert!(e.im.abs() < 1e-9);
        assert!(e.re.abs() <= a.norms().op_norm + 1e-9);
        let id = Observable::identity(2, 3).unwrap();
        assert!((expectation(&id, &rho).unwrap() - ONE).norm() < 1e-12);

        let v = linalg::haar_state(9, &mut r);
        let p = linalg::projector(&v);
        let pa = Observable::new(2, 3, p.clone()).unwrap();
        let pr = DensityMatrix::Dense { n: 2, k: 3, matrix: p };
        assert!((expectation(&pa, &pr).unwrap() - ONE).norm() < 1e-12);
    }

    #[test]
    fn coefficient_path_matches_dense() {
        let mut r = rng::stream(6);
        let mut a = Observable::new(2, 3, linalg::random_hermitian(9, &mut r)).unwrap();
        let labels = vec![
            StateLabel::Gm(CubeLabel::from_bits(3, 5)),
            StateLabel::Hw(OmegaLabel::new(3, vec![0, 1, 2, 1]).unwrap()),
        ];
        let rho = product_state(&labels, 3).unwrap();
        let dense = expectation(&a, &rho).unwrap();
        a.expand_cached(BasisKind::Gm);
        let fast = expectation(&a, &rho).unwrap();
        assert!((dense - fast).norm() < 1e-10);
    }

    #[test]
    fn label_json() {
        let l = StateLabel::Gm(CubeLabel::from_bits(2, 0b101));
        let text = serde_json::to_string(&l).unwrap();
        assert_eq!(text, r#"{"kind":"GM","x":[-1],"y":[1],"z":[-1]}"#);
        let back: StateLabel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
    }
}

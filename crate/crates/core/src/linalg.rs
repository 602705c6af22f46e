//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Primitive `k`-th root of unity raised to `power` (reduced mod `k` first).
pub fn root_of_unity(k: usize, power: i64) -> Complex64 {
    let p = power.rem_euclid(k as i64);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * p as f64 / k as f64)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all<'a, I: IntoIterator<Item = &'a CMatrix>>(factors: I) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr[A B]` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Normalized trace inner product `(1/dim) tr[A^dagger B]`.
pub fn normalized_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc / a.nrows() as f64
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Largest singular value. Hermitian inputs go through the eigensolver.
pub fn op_norm(m: &CMatrix) -> f64 {
    if is_hermitian(m, 1e-12) {
        hermitian_eigenvalues(m)
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    } else {
        m.clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of a general square matrix from the diagonal of its complex
/// Schur form.
pub fn general_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: QR of a complex Ginibre matrix, with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state (first column of a Haar unitary).
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    haar_unitary(dim, rng).column(0).into_owned()
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Random Hermitian matrix with i.i.d. complex Gaussian off-diagonal entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random density matrix `G G^dagger / tr`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = trace(&rho);
    rho / tr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn haar_is_unitary() {
        let mut r = rng::stream(3);
        for dim in [2, 3, 5] {
            let u = haar_unitary(dim, &mut r);
            let id = CMatrix::identity(dim, dim);
            assert!(max_abs_diff(&(&u * u.adjoint()), &id) < 1e-12);
        }
    }

    #[test]
    fn schur_eigenvalues_of_permutation() {
        let mut p = CMatrix::zeros(3, 3);
        p[(1, 0)] = ONE;
        p[(2, 1)] = ONE;
        p[(0, 2)] = ONE;
        let mut ev = general_eigenvalues(&p);
        ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        let expect = [root_of_unity(3, 2), ONE, root_of_unity(3, 1)];
        for (a, b) in ev.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn op_norm_diag() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert!((op_norm(&m) - 3.0).abs() < 1e-12);
    }
}

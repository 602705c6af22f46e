//! Axis-wise linear maps on flat row-major tensors.

use num_complex::Complex64;

/// Apply the square matrix `mat` (row-major, `dims[axis]` squared entries)
/// along `axis` of the tensor stored in `data` with shape `dims`.
pub fn apply_along_axis(data: &mut [Complex64], dims: &[usize], axis: usize, mat: &[Complex64]) {
    let len = dims[axis];
    debug_assert_eq!(mat.len(), len * len);
    debug_assert_eq!(data.len(), dims.iter().product::<usize>());
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        let base = o * len * stride;
        for i in 0..stride {
            for (a, slot) in buf.iter_mut().enumerate() {
                *slot = data[base + a * stride + i];
            }
            for r in 0..len {
                let row = &mat[r * len..(r + 1) * len];
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, v) in row.iter().zip(&buf) {
                    acc += m * v;
                }
                data[base + r * stride + i] = acc;
            }
        }
    }
}

/// Apply `mat` along every axis of a tensor whose axes all have length
/// `sqrt(mat.len())`.
pub fn apply_along_all_axes(data: &mut [Complex64], rank: usize, mat: &[Complex64]) {
    let len = (mat.len() as f64).sqrt().round() as usize;
    let dims = vec![len; rank];
    for axis in 0..rank {
        apply_along_axis(data, &dims, axis, mat);
    }
}

/// Mixed-radix digits of `index`, most significant first.
pub fn digits(mut index: usize, base: usize, width: usize) -> Vec<usize> {
    let mut out = vec![0; width];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

pub fn from_digits<I: IntoIterator<Item = usize>>(digits: I, base: usize) -> usize {
    digits.into_iter().fold(0, |acc, d| acc * base + d)
}

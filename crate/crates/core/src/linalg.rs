//! Small helpers over `nalgebra` complex matrices shared by the analytic modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn from_real(m: &DMatrix<f64>) -> CMat {
    m.map(re)
}

/// Max-modulus entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Spectral norm via the largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |a: f64, &s| a.max(s))
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn unitarity_residual(u: &CMat) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &eye(u.ncols()))
}

/// Hermitian eigendecomposition with eigenvalues ascending. Input is
/// symmetrized first, so tiny anti-Hermitian noise is ignored.
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()) * re(0.5);
    let eig = sym.symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Eigenvalues of a general complex square matrix (diagonal of the Schur form).
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    if m.is_empty() {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Row-major JSON form (`rows`, `cols`, `re`, `im`) used in input digests.
pub fn matrix_json(m: &CMat) -> serde_json::Value {
    let t = m.transpose();
    serde_json::json!({
        "rows": m.nrows(),
        "cols": m.ncols(),
        "re": t.iter().map(|v| v.re).collect::<Vec<_>>(),
        "im": t.iter().map(|v| v.im).collect::<Vec<_>>(),
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn transpose(m: &CMat) -> CMat {
    m.transpose()
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.is_empty() {
        return Some(m.clone());
    }
    let lu = m.clone().full_piv_lu();
    let inv = lu.try_inverse()?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(inv)
}

/// Determinant through LU; zero-size matrices have determinant one.
pub fn det(m: &CMat) -> C64 {
    if m.is_empty() {
        return re(1.0);
    }
    m.clone().full_piv_lu().determinant()
}

/// Smallest singular value divided by the largest.
pub fn inverse_condition(m: &CMat) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let s = m.clone().svd(false, false).singular_values;
    let max = s.iter().fold(0.0_f64, |a, &b| a.max(b));
    let min = s.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending() {
        let h = CMat::from_row_slice(2, 2, &[re(2.0), c(0.0, 1.0), c(0.0, -1.0), re(2.0)]);
        let (vals, vecs) = eigh(&h);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let back = &vecs * CMat::from_diagonal(&CVec::from_vec(vals.iter().map(|&v| re(v)).collect())) * vecs.adjoint();
        assert!(max_abs_diff(&back, &h) < 1e-12);
    }

    #[test]
    fn schur_eigenvalues_of_triangular() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 1.0), re(5.0), re(0.0), c(2.0, -1.0)]);
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(1.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(2.0, -1.0)).norm() < 1e-12);
    }
}

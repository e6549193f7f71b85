//! Polar decomposition, Hermitian functional calculus, canonical forms of
//! the Sp/O parameter matrices, and the identities tying `R`, `z`, `h`, `A`.

mod canonical;

pub use canonical::{canonical_form, o_pairing, varsigma, vartheta, CanonicalForm};

use serde_json::json;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::groups::GroupKind;
use crate::linalg::{c, eigh, matrix_json, eye, hermitian_residual, inverse, max_abs, max_abs_diff, CMat};

/// Tolerance of the `R` identities.
pub const R_TOL: f64 = 1e-10;

/// `M = U P` with `P = (M*M)^{1/2}`; `left = (MM*)^{1/2}` so that also
/// `M = left · U`.
#[derive(Clone, Debug)]
pub struct PolarParts {
    pub u: CMat,
    pub p: CMat,
    pub left: CMat,
    pub singular_values: Vec<f64>,
    /// Some singular value is below `1e−12 · σ_max`; `U` is then only
    /// determined on the support.
    pub rank_deficient: bool,
}

pub fn polar_decompose(m: &CMat) -> PolarParts {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "polar decomposition needs a square matrix");
    if n == 0 {
        return PolarParts {
            u: m.clone(),
            p: m.clone(),
            left: m.clone(),
            singular_values: Vec::new(),
            rank_deficient: false,
        };
    }
    // Square roots from Hermitian eigendecompositions; the complex SVD
    // resolves clustered singular values only to about 1e-8.
    let (evals, v) = eigh(&(m.adjoint() * m));
    let s: Vec<f64> = evals.iter().rev().map(|&e| e.max(0.0).sqrt()).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let rank_deficient = s.iter().any(|&x| x <= 1e-12 * smax) || smax == 0.0;
    if rank_deficient || s[n - 1] <= 1e-6 * smax {
        return polar_by_svd(m);
    }
    let diag = |f: &dyn Fn(f64) -> f64| {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, evals.iter().map(|&e| c(f(e.max(0.0)), 0.0))))
    };
    let p = &v * diag(&f64::sqrt) * v.adjoint();
    let p_inv = &v * diag(&|e: f64| 1.0 / e.sqrt()) * v.adjoint();
    let u = m * p_inv;
    let left = &u * &p * u.adjoint();
    PolarParts { u, p, left, singular_values: s, rank_deficient }
}

fn polar_by_svd(m: &CMat) -> PolarParts {
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let w = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, s.iter().map(|&v| c(v, 0.0))));
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let rank_deficient = s.iter().any(|&v| v <= 1e-12 * smax) || smax == 0.0;
    PolarParts {
        u: &w * &vt,
        p: vt.adjoint() * &sigma * &vt,
        left: &w * &sigma * w.adjoint(),
        singular_values: s,
        rank_deficient,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermitianFn {
    Ln,
    Cosh,
    Sinh,
    /// `x ↦ √(1 + 4x²)`.
    SqrtOnePlusFourSquare,
}

impl HermitianFn {
    fn apply(self, x: f64) -> f64 {
        match self {
            HermitianFn::Ln => x.ln(),
            HermitianFn::Cosh => x.cosh(),
            HermitianFn::Sinh => x.sinh(),
            HermitianFn::SqrtOnePlusFourSquare => (1.0 + 4.0 * x * x).sqrt(),
        }
    }
}

/// Reject matrices whose anti-Hermitian part exceeds `1e−10 (1 + ‖H‖)`.
pub fn require_hermitian(h: &CMat) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("Hermitian input must be square".into()));
    }
    let r = hermitian_residual(h);
    if r > 1e-10 * (1.0 + max_abs(h)) {
        return Err(Error::NotHermitian(r));
    }
    Ok(())
}

pub fn hermitian_calculus(h: &CMat, f: HermitianFn) -> Result<CMat> {
    require_hermitian(h)?;
    let (vals, vecs) = eigh(h);
    if f == HermitianFn::Ln {
        if let Some(v) = vals.iter().find(|&&v| v <= 0.0) {
            return Err(Error::Spectrum(format!("logarithm of nonpositive eigenvalue {v:.3e}")));
        }
    }
    let n = vals.len();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        vals.iter().map(|&v| c(f.apply(v), 0.0)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// `¼ zᵗ h⁻¹ z`.
pub fn build_r(z: &CMat, h: &CMat) -> Result<CMat> {
    if !z.is_square() || z.shape() != h.shape() {
        return Err(Error::DimensionMismatch("z and h must be square of equal size".into()));
    }
    if inverse(z).is_none() || crate::linalg::inverse_condition(z) < 1e-14 {
        return Err(Error::Singular("z".into()));
    }
    let hi = inverse(h).ok_or_else(|| Error::Singular("h".into()))?;
    if crate::linalg::inverse_condition(h) < 1e-14 {
        return Err(Error::Singular("h".into()));
    }
    Ok(z.transpose() * hi * z * c(0.25, 0.0))
}

/// As [`build_r`], also requiring `h` symmetric (Sp) or antisymmetric (O).
pub fn build_r_checked(z: &CMat, h: &CMat, kind: GroupKind) -> Result<CMat> {
    let target = match kind {
        GroupKind::Sp => h.transpose(),
        GroupKind::O => -h.transpose(),
        GroupKind::GL => return Err(Error::Unsupported("R is defined for Sp and O".into())),
    };
    let r = max_abs_diff(h, &target);
    if r > 1e-12 * (1.0 + max_abs(h)) {
        return Err(Error::SymmetryViolated(format!(
            "h must be {} (residual {r:.3e})",
            if kind == GroupKind::Sp { "symmetric" } else { "antisymmetric" }
        )));
    }
    build_r(z, h)
}

/// `I + 4(Aᵗ)² = 4RR*` and `−A = u* Aᵗ u` with `R = |RR*|^{1/2} u`.
pub fn check_r_identities(a: &CMat, r: &CMat) -> Result<Certificate> {
    if !a.is_square() || a.shape() != r.shape() {
        return Err(Error::DimensionMismatch("A and R must be square of equal size".into()));
    }
    require_hermitian(a)?;
    let q = a.nrows();
    let at = a.transpose();
    let lhs = eye(q) + &at * &at * c(4.0, 0.0);
    let rr = r * r.adjoint() * c(4.0, 0.0);
    let res_norm = max_abs_diff(&lhs, &rr);
    let polar = polar_decompose(r);
    let u = polar.u.clone();
    let mut rhs = u.adjoint() * &at * &u;
    let mut target = -a.clone();
    if polar.rank_deficient {
        // restrict to the support of |RR*|
        let (vals, vecs) = eigh(&(r * r.adjoint()));
        let smax = vals.iter().cloned().fold(0.0, f64::max);
        let mut proj = CMat::zeros(q, q);
        for (k, &v) in vals.iter().enumerate() {
            if v > 1e-24 * smax.max(1e-300) {
                let col = vecs.column(k);
                proj += col * col.adjoint();
            }
        }
        rhs = &proj * rhs * &proj;
        target = &proj * target * &proj;
    }
    let res_conj = max_abs_diff(&rhs, &target);
    let inputs = json!({"A": matrix_json(a), "R": matrix_json(r)});
    let parts = [
        Certificate::new("I + 4(A^t)^2 = 4RR*", &inputs, res_norm, R_TOL),
        Certificate::new("-A = u* A^t u", &inputs, res_conj, R_TOL),
    ];
    let mut cert = Certificate::combine("R identities", &inputs, &parts, R_TOL);
    if polar.rank_deficient {
        cert = cert.with_note("R is rank deficient; the conjugation identity was checked on the support only");
    }
    Ok(cert)
}

/// `z z* = 4 h (z⁻¹)ᵗ (1+4A²)ᵗ ((z⁻¹)ᵗ)* h*`.
pub fn check_consistency_26(z: &CMat, h: &CMat, a: &CMat) -> Result<Certificate> {
    let q = z.nrows();
    if !z.is_square() || h.shape() != (q, q) || a.shape() != (q, q) {
        return Err(Error::DimensionMismatch("z, h, A must be q×q".into()));
    }
    require_hermitian(a)?;
    let zi = inverse(z).ok_or_else(|| Error::Singular("z".into()))?;
    if inverse(h).is_none() {
        return Err(Error::Singular("h".into()));
    }
    let zit = zi.transpose();
    let mid = (eye(q) + a * a * c(4.0, 0.0)).transpose();
    let rhs = h * &zit * mid * zit.adjoint() * h.adjoint() * c(4.0, 0.0);
    let lhs = z * z.adjoint();
    let res = max_abs_diff(&lhs, &rhs);
    let tol = R_TOL * (1.0 + max_abs(&lhs));
    let inputs = json!({"z": matrix_json(z), "h": matrix_json(h), "A": matrix_json(a)});
    Ok(Certificate::new("zz* consistency", &inputs, res, tol)
        .with_note("right side read as 4h(z^-1)^t(1+4A^2)^t((z^-1)^t)*h*, which is Hermitian"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;

    fn diag(v: &[crate::linalg::C64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_row_slice(v))
    }

    #[test]
    fn polar_of_imaginary_scalar() {
        let p = polar_decompose(&diag(&[c(0.0, 2.0)]));
        assert!((p.u[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((p.p[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polar_reconstructs() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 0.3), c(0.0, -2.0)]);
        let p = polar_decompose(&m);
        assert!(max_abs_diff(&(&p.u * &p.p), &m) < 1e-12 * max_abs(&m));
        assert!(max_abs_diff(&(&p.left * &p.u), &m) < 1e-12 * max_abs(&m));
        assert!(unitarity_residual(&p.u) < 1e-13);
        assert!(!p.rank_deficient);
    }

    #[test]
    fn calculus_examples() {
        let z = CMat::zeros(2, 2);
        assert!(max_abs_diff(&hermitian_calculus(&z, HermitianFn::Cosh).unwrap(), &eye(2)) < 1e-15);
        let h = diag(&[c(2f64.ln(), 0.0)]);
        let s = hermitian_calculus(&h, HermitianFn::Sinh).unwrap();
        assert!((s[(0, 0)] - 0.75).norm() < 1e-14);
        let a = varsigma(1.0);
        let r = hermitian_calculus(&a, HermitianFn::SqrtOnePlusFourSquare).unwrap();
        assert!(max_abs_diff(&r, &(eye(2) * c(5f64.sqrt(), 0.0))) < 1e-14);
        assert!(matches!(hermitian_calculus(&eye(1).scale(-1.0), HermitianFn::Ln), Err(Error::Spectrum(_))));
        let nh = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(hermitian_calculus(&nh, HermitianFn::Cosh), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn build_r_examples() {
        let r = build_r(&eye(2), &eye(2)).unwrap();
        assert!(max_abs_diff(&r, &(eye(2) * c(0.25, 0.0))) < 1e-15);
        let r = build_r(&(eye(2) * c(2.0, 0.0)), &eye(2)).unwrap();
        assert!(max_abs_diff(&r, &eye(2)) < 1e-15);
        assert!(matches!(build_r(&eye(2), &CMat::zeros(2, 2)), Err(Error::Singular(_))));
    }

    #[test]
    fn r_identity_examples() {
        let u = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(check_r_identities(&CMat::zeros(2, 2), &(u * c(0.5, 0.0))).unwrap().passed());
        let eps: f64 = 0.3;
        let r = eye(2) * c(0.5 * (1.0 + 4.0 * eps * eps).sqrt(), 0.0);
        assert!(check_r_identities(&varsigma(eps), &r).unwrap().passed());
        assert!(!check_r_identities(&varsigma(1.0), &eye(2)).unwrap().passed());
    }

    #[test]
    fn consistency_examples() {
        let z = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let half = eye(2) * c(0.5, 0.0);
        assert!(check_consistency_26(&z, &half, &CMat::zeros(2, 2)).unwrap().passed());
        assert!(!check_consistency_26(&eye(2), &eye(2), &CMat::zeros(2, 2)).unwrap().passed());
        assert!(matches!(
            check_consistency_26(&eye(2), &eye(3), &CMat::zeros(2, 2)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}

//! The representations `Π_{Az}` of the motion groups `G_n^I` and of GL(∞)
//! on `L²(Λ_m, ν)` truncated to `m×K` matrices, the commutant action
//! `τ(u)`, and isotypic projections.
//!
//! Coordinates: `λ` is `m×K`, flattened row-major (`λ_{ik}` at `i·K + k`).

mod ops;
mod tau;

pub use ops::{
    commutator_norm, difference_norm, distance_to_scalar, galerkin, gram_of, images,
    isometry_residual, FnOp, OperatorMatrix,
};
pub use tau::{
    commutant_check, in_commutant_group, projection_check, projection_fn, projection_operator, tau_fn,
    tau_operator, CommutantReport, CompactSubgroup, Irrep, ProjectionReport, DEFAULT_TORUS_NODES,
    PROJECTION_TOL,
};

use serde_json::json;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::gaussint::{Basis, GaussPoly, Measure};
use crate::groups::{GeneratorSpec, GroupElement, GroupKind};
use crate::linalg::{c, det, eye, inverse, kron, matrix_json, CMat, CVec, C64};
use crate::matrixfn::require_hermitian;

/// Operator-norm tolerance for unitarity and homomorphism certificates.
pub const REP_TOL: f64 = 1e-8;

pub const NORMALIZATION_NOTE: &str =
    "block-diagonal images carry the factor |det g|^m so that they are unitary for the Gaussian measure";

#[derive(Clone, Debug)]
pub struct GaussRepParams {
    pub m: usize,
    pub n: usize,
    pub a: CMat,
    pub z: CMat,
    pub beta: f64,
    pub k: usize,
    pub degree: usize,
}

impl GaussRepParams {
    /// `n = 0` parameters (GL(∞)).
    pub fn gl(a: CMat, beta: f64, k: usize, degree: usize) -> Self {
        let m = a.nrows();
        Self { m, n: 0, a, z: CMat::zeros(0, m), beta, k, degree }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.shape() != (self.m, self.m) {
            return Err(Error::DimensionMismatch(format!("A must be {0}x{0}", self.m)));
        }
        require_hermitian(&self.a)?;
        if self.z.shape() != (self.n, self.m) {
            return Err(Error::DimensionMismatch(format!(
                "z must be {}x{}",
                self.n, self.m
            )));
        }
        if self.m == 0 || self.k == 0 {
            return Err(Error::Guard("m and K must be positive".into()));
        }
        Ok(())
    }

    pub fn coords(&self) -> usize {
        self.m * self.k
    }

    pub fn basis(&self) -> Result<Basis> {
        self.validate()?;
        Basis::new(self.coords(), self.degree, Measure::Nu)
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "m": self.m, "n": self.n, "A": matrix_json(&self.a), "z": matrix_json(&self.z),
            "beta": self.beta, "K": self.k, "D": self.degree,
        })
    }
}

/// Element `[[I_n, 0], [h, g]]` of the motion group; `h` is `K×n`, `g` is
/// `K×K` (both already padded to the truncation).
#[derive(Clone, Debug, PartialEq)]
pub struct Motion {
    pub h: CMat,
    pub g: CMat,
}

impl Motion {
    pub fn identity(k: usize, n: usize) -> Self {
        Self { h: CMat::zeros(k, n), g: eye(k) }
    }

    pub fn compose(&self, o: &Motion) -> Motion {
        Motion { h: &self.h + &self.g * &o.h, g: &self.g * &o.g }
    }

    pub fn inverse(&self) -> Result<Motion> {
        let gi = inverse(&self.g).ok_or_else(|| Error::Singular("g".into()))?;
        Ok(Motion { h: -(&gi * &self.h), g: gi })
    }
}

/// Generators accepted by [`rep_operator`]. Blocks smaller than the
/// truncation are padded with the identity (zero for `h`).
#[derive(Clone, Debug)]
pub enum RepGenerator {
    Block(CMat),
    Unipotent(CMat),
    Motion(Motion),
    /// A GL window element `[[I_n, 0], [h, g]]` over indices `1..=n+K′`.
    Element(GroupElement<C64>),
}

impl RepGenerator {
    pub fn from_spec(spec: &GeneratorSpec<C64>, n: usize) -> Result<Self> {
        let to_cmat = |m: &crate::groups::Mat<C64>| m.to_cmat();
        match spec {
            GeneratorSpec::DiagEmbed { g, level } if *level == n => Ok(RepGenerator::Block(to_cmat(g))),
            GeneratorSpec::LowerUnipotent { h, level } if *level == n => {
                Ok(RepGenerator::Unipotent(to_cmat(h)))
            }
            _ => Err(Error::Unsupported(format!(
                "only level-{n} diagonal and lower-unipotent generators act here"
            ))),
        }
    }

    /// Normalize to a [`Motion`] of truncation `K`.
    pub fn motion(&self, k: usize, n: usize) -> Result<Motion> {
        let pad_g = |g: &CMat| -> Result<CMat> {
            if !g.is_square() || g.nrows() > k {
                return Err(Error::Guard(format!(
                    "block of size {} exceeds truncation K = {k}",
                    g.nrows()
                )));
            }
            let mut out = eye(k);
            out.view_mut((0, 0), g.shape()).copy_from(g);
            Ok(out)
        };
        let pad_h = |h: &CMat| -> Result<CMat> {
            if h.ncols() != n || h.nrows() > k {
                return Err(Error::Guard(format!(
                    "h must have {n} columns and at most K = {k} rows"
                )));
            }
            let mut out = CMat::zeros(k, n);
            out.view_mut((0, 0), h.shape()).copy_from(h);
            Ok(out)
        };
        match self {
            RepGenerator::Block(g) => Ok(Motion { h: CMat::zeros(k, n), g: pad_g(g)? }),
            RepGenerator::Unipotent(h) => Ok(Motion { h: pad_h(h)?, g: eye(k) }),
            RepGenerator::Motion(mo) => Ok(Motion { h: pad_h(&mo.h)?, g: pad_g(&mo.g)? }),
            RepGenerator::Element(el) => {
                if el.kind() != GroupKind::GL {
                    return Err(Error::Unsupported("Π_Az acts on GL elements".into()));
                }
                let w = el.window();
                if w > n + k {
                    return Err(Error::Guard(format!("window {w} exceeds n + K = {}", n + k)));
                }
                let full = el.enlarge(n + k)?.matrix().to_cmat();
                let top_left = full.view((0, 0), (n, n)).into_owned();
                let top_right = full.view((0, n), (n, k)).into_owned();
                if crate::linalg::max_abs_diff(&top_left, &eye(n)) > 1e-12
                    || crate::linalg::max_abs(&top_right) > 1e-12
                {
                    return Err(Error::Unsupported(
                        "element is not of the form [[I_n, 0], [h, g]]".into(),
                    ));
                }
                Ok(Motion {
                    h: full.view((n, 0), (k, n)).into_owned(),
                    g: full.view((n, n), (k, k)).into_owned(),
                })
            }
        }
    }
}

fn check_dims(a: &CMat, lambda: &CMat, g: &CMat) -> Result<()> {
    let (m, k) = lambda.shape();
    if a.shape() != (m, m) || g.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "need A {m}x{m}, λ {m}x{k}, g {k}x{k}"
        )));
    }
    Ok(())
}

/// `exp{−½ Tr[(I − 2iA) λ(gg* − 1)λ*]}`.
pub fn alpha_hat(a: &CMat, lambda: &CMat, g: &CMat) -> Result<C64> {
    check_dims(a, lambda, g)?;
    let m = a.nrows();
    let k = g.nrows();
    let mm = eye(m) - a * c(0.0, 2.0);
    let h = g * g.adjoint() - eye(k);
    let tr = (mm * lambda * h * lambda.adjoint()).trace();
    Ok((-0.5 * tr).exp())
}

/// `α̂(λ, gh) = α̂(λ, g) α̂(λg, h)`, residual relative to `max(1, |lhs|)`.
pub fn alpha_cocycle_check(a: &CMat, lambda: &CMat, g: &CMat, h: &CMat) -> Result<Certificate> {
    check_dims(a, lambda, g)?;
    check_dims(a, lambda, h)?;
    let lhs = alpha_hat(a, lambda, &(g * h))?;
    let rhs = alpha_hat(a, lambda, g)? * alpha_hat(a, &(lambda * g), h)?;
    let res = (lhs - rhs).norm() / lhs.norm().max(1.0);
    let inputs = json!({
        "A": matrix_json(a), "lambda": matrix_json(lambda), "g": matrix_json(g), "h": matrix_json(h),
    });
    Ok(Certificate::new("alpha cocycle", &inputs, res, 1e-12)
        .with_note("residual relative to max(1, |alpha(lambda, gh)|)"))
}

/// Multiplier `α̂(λ, g)` as a Gaussian factor on `m·K` coordinates.
pub fn alpha_factor(a: &CMat, g: &CMat) -> GaussPoly {
    let (m, k) = (a.nrows(), g.nrows());
    let mm = eye(m) - a * c(0.0, 2.0);
    let h = g * g.adjoint() - eye(k);
    let mut f = GaussPoly::one(m * k);
    f.add_hermitian(&(kron(&mm, &h.transpose()) * c(0.5, 0.0)));
    f
}

/// Matrix of `vec(λ) ↦ vec(λg)` for `λ` of size `m×K`.
pub fn right_mult(m: usize, g: &CMat) -> CMat {
    kron(&eye(m), &g.transpose())
}

/// Linear coefficient vector `a` with `Re Tr(zλh) = Re(aᵗ vec λ)`.
pub fn trace_phase_vector(z: &CMat, h: &CMat, m: usize, k: usize) -> CVec {
    let hz = h * z; // K×m
    CVec::from_fn(m * k, |idx, _| hz[(idx % k, idx / k)])
}

/// `Π_{Az}` of a motion-group element as an operator on functions.
pub fn rep_fn(params: &GaussRepParams, gen: &RepGenerator) -> Result<FnOp> {
    params.validate()?;
    let mo = gen.motion(params.k, params.n)?;
    let (m, k) = (params.m, params.k);
    let d = det(&mo.g);
    if d.norm() < 1e-14 || inverse(&mo.g).is_none() {
        return Err(Error::Singular("group element".into()));
    }
    let ad = d.norm();
    let factor = c(ad.powi(m as i32), 0.0) * c(0.0, params.beta * ad.ln()).exp();
    let mut mult = alpha_factor(&params.a, &mo.g).scale(factor);
    if params.n > 0 {
        mult.add_real_phase(&trace_phase_vector(&params.z, &mo.h, m, k));
    }
    Ok(FnOp::weighted_substitution(mult, right_mult(m, &mo.g), CVec::zeros(m * k)))
}

/// Galerkin matrix of `Π_{Az}(g)` on the truncated basis.
pub fn rep_operator(params: &GaussRepParams, gen: &RepGenerator, basis: &Basis) -> Result<OperatorMatrix> {
    galerkin(&rep_fn(params, gen)?, basis)
}

/// Isometry of `Π(g)` and `Π(g)Π(h) = Π(gh)` on the basis span.
pub fn rep_certify_pair(
    params: &GaussRepParams,
    g: &RepGenerator,
    h: &RepGenerator,
    basis: &Basis,
) -> Result<Certificate> {
    let (mg, mh) = (g.motion(params.k, params.n)?, h.motion(params.k, params.n)?);
    let pg = rep_fn(params, &RepGenerator::Motion(mg.clone()))?;
    let ph = rep_fn(params, &RepGenerator::Motion(mh.clone()))?;
    let pgh = rep_fn(params, &RepGenerator::Motion(mg.compose(&mh)))?;
    let inputs = json!({
        "params": params.describe(),
        "g": {"h": matrix_json(&mg.h), "g": matrix_json(&mg.g)},
        "h": {"h": matrix_json(&mh.h), "g": matrix_json(&mh.g)},
    });
    let parts = [
        Certificate::new("isometry of Pi(g)", &inputs, isometry_residual(&pg, basis)?, REP_TOL),
        Certificate::new("isometry of Pi(h)", &inputs, isometry_residual(&ph, basis)?, REP_TOL),
        Certificate::new("homomorphism", &inputs, difference_norm(&pg.after(&ph), &pgh, basis)?, REP_TOL),
    ];
    Ok(Certificate::combine("Pi_Az unitarity and homomorphism", &inputs, &parts, REP_TOL)
        .with_note(NORMALIZATION_NOTE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    #[test]
    fn alpha_examples() {
        let a = CMat::zeros(1, 1);
        let lam = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let v = alpha_hat(&a, &lam, &diag(&[2.0, 1.0])).unwrap();
        assert!((v - (-1.5f64).exp()).norm() < 1e-15);
        let u = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((alpha_hat(&a, &lam, &u).unwrap() - 1.0).norm() < 1e-15);
        assert!((alpha_hat(&a, &CMat::zeros(1, 2), &diag(&[3.0, 2.0])).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn alpha_factor_matches_pointwise() {
        let a = CMat::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(-0.4, 0.0)]);
        let g = CMat::from_row_slice(2, 2, &[c(1.2, 0.1), c(0.3, 0.0), c(-0.2, 0.4), c(0.9, 0.0)]);
        let lam = CMat::from_row_slice(2, 2, &[c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0), c(0.1, -0.3)]);
        let f = alpha_factor(&a, &g);
        let flat: Vec<C64> = lam.transpose().iter().copied().collect();
        let lhs = f.eval(&flat);
        let rhs = alpha_hat(&a, &lam, &g).unwrap();
        assert!((lhs - rhs).norm() < 1e-14, "{lhs} {rhs}");
    }

    #[test]
    fn vacuum_element_scalar() {
        let p = GaussRepParams::gl(CMat::zeros(1, 1), 0.0, 1, 0);
        let basis = p.basis().unwrap();
        let op = rep_operator(&p, &RepGenerator::Block(diag(&[2.0])), &basis).unwrap();
        assert!((op.matrix[(0, 0)] - 0.8).norm() < 1e-14);
    }

    #[test]
    fn identity_images() {
        let mut p = GaussRepParams::gl(CMat::zeros(1, 1), 0.3, 2, 2);
        let basis = p.basis().unwrap();
        let op = rep_operator(&p, &RepGenerator::Block(eye(2)), &basis).unwrap();
        assert!(max_abs_diff(&op.matrix, &eye(basis.len())) < 1e-12);
        p.n = 1;
        p.z = CMat::from_row_slice(1, 1, &[c(0.5, 0.2)]);
        let op = rep_operator(&p, &RepGenerator::Unipotent(CMat::zeros(2, 1)), &basis).unwrap();
        assert!(max_abs_diff(&op.matrix, &eye(basis.len())) < 1e-12);
    }

    #[test]
    fn homomorphism_and_isometry() {
        let a = CMat::from_row_slice(1, 1, &[c(0.7, 0.0)]);
        let p = GaussRepParams { m: 1, n: 1, a, z: CMat::from_row_slice(1, 1, &[c(0.4, -0.3)]), beta: 0.5, k: 2, degree: 2 };
        let basis = p.basis().unwrap();
        let g = RepGenerator::Motion(Motion {
            h: CMat::from_row_slice(2, 1, &[c(0.3, 0.1), c(-0.5, 0.0)]),
            g: CMat::from_row_slice(2, 2, &[c(1.3, 0.2), c(0.1, 0.0), c(-0.3, 0.1), c(0.8, -0.1)]),
        });
        let h = RepGenerator::Block(CMat::from_row_slice(2, 2, &[c(0.9, 0.0), c(0.0, 0.4), c(0.2, 0.0), c(1.1, 0.0)]));
        let cert = rep_certify_pair(&p, &g, &h, &basis).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert!(cert.residual < 1e-10);
    }

    #[test]
    fn unipotent_symbol_is_unimodular() {
        let p = GaussRepParams { m: 1, n: 1, a: CMat::zeros(1, 1), z: CMat::from_row_slice(1, 1, &[c(1.0, 0.5)]), beta: 0.0, k: 2, degree: 2 };
        let basis = p.basis().unwrap();
        let op = rep_fn(&p, &RepGenerator::Unipotent(CMat::from_row_slice(2, 1, &[c(0.5, 0.0), c(0.0, 1.0)]))).unwrap();
        assert!(isometry_residual(&op, &basis).unwrap() < 1e-10);
    }

    #[test]
    fn element_decomposition() {
        let el = GroupElement::from_matrix(
            GroupKind::GL,
            2,
            crate::groups::Mat::from_cmat(&CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)])),
        )
        .unwrap();
        let mo = RepGenerator::Element(el).motion(1, 1).unwrap();
        assert!((mo.h[(0, 0)] - 0.5).norm() < 1e-15);
        assert!((mo.g[(0, 0)] - 2.0).norm() < 1e-15);
    }
}

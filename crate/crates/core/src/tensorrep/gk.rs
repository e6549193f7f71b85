//! The level-`q` operator system on `L²(Λ_q, ν_q)` for one fiber `(z, h)`.

use serde_json::json;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::gaussint::{Basis, GaussPoly, Measure};
use crate::gaussrep::{difference_norm, isometry_residual, rep_fn, trace_phase_vector, FnOp, GaussRepParams, OperatorMatrix, RepGenerator};
use crate::groups::GroupKind;
use crate::linalg::{c, eye, inverse, matrix_json, max_abs_diff, CMat, CVec, C64};
use crate::matrixfn::{build_r, canonical_form, check_r_identities, require_hermitian};

use super::quadratic_phase;

pub const GK_TOL: f64 = 1e-8;
pub const TRANSLATION_TOL: f64 = 1e-9;

/// One fiber of the level-`q` data: `A`, `z`, `h` and `R = ¼ zᵗ h⁻¹ z`.
#[derive(Clone, Debug)]
pub struct GkParams {
    pub kind: GroupKind,
    pub a: CMat,
    pub z: CMat,
    pub h: CMat,
    pub r: CMat,
    pub k: usize,
    pub degree: usize,
}

impl GkParams {
    pub fn new(kind: GroupKind, a: CMat, z: CMat, h: CMat, k: usize, degree: usize) -> Result<Self> {
        require_hermitian(&a)?;
        let q = a.nrows();
        if z.shape() != (q, q) || h.shape() != (q, q) {
            return Err(Error::DimensionMismatch(format!("z and h must be {q}x{q}")));
        }
        let r = crate::matrixfn::build_r_checked(&z, &h, kind)?;
        let cert = check_r_identities(&a, &r)?;
        if !cert.passed() {
            return Err(Error::Unsupported(format!(
                "inadmissible parameters: R identities fail (residual {:.3e})",
                cert.residual
            )));
        }
        if k == 0 {
            return Err(Error::Guard("need K ≥ 1".into()));
        }
        Ok(Self { kind, a, z, h, r, k, degree })
    }

    /// Admissible parameters from the canonical `R` of `A` and a chosen
    /// invertible `z`: `h = ¼ z R⁻¹ zᵗ`.
    pub fn from_canonical(kind: GroupKind, a: CMat, z: CMat, k: usize, degree: usize) -> Result<Self> {
        let r = canonical_form(&a, kind)?.r_for_original()?;
        let ri = inverse(&r).ok_or_else(|| Error::Singular("R".into()))?;
        let mut h = &z * ri * z.transpose() * c(0.25, 0.0);
        h = match kind {
            GroupKind::Sp => (&h + h.transpose()) * c(0.5, 0.0),
            _ => (&h - h.transpose()) * c(0.5, 0.0),
        };
        Self::new(kind, a, z, h, k, degree)
    }

    /// Same `A` and `R` with `z′ = Xz`, `h′ = XhXᵗ`.
    pub fn equal_r_partner(&self, x: &CMat) -> Result<Self> {
        if inverse(x).is_none() {
            return Err(Error::Singular("X".into()));
        }
        let z = x * &self.z;
        let h = x * &self.h * x.transpose();
        let mut out = Self::new(self.kind, self.a.clone(), z, h, self.k, self.degree)?;
        out.r = build_r(&out.z, &out.h)?;
        Ok(out)
    }

    pub fn q(&self) -> usize {
        self.a.nrows()
    }

    pub fn basis(&self) -> Result<Basis> {
        Basis::new(self.q() * self.k, self.degree, Measure::Nu)
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "kind": self.kind.name(), "A": matrix_json(&self.a), "z": matrix_json(&self.z),
            "h": matrix_json(&self.h), "K": self.k, "D": self.degree,
        })
    }

    /// Translation `c = 2 z⁻¹ (y h)ᵗ` (`q×K`).
    pub fn translation(&self, y: &CMat) -> Result<CMat> {
        if y.ncols() != self.q() || y.nrows() > self.k {
            return Err(Error::WindowTooSmall(format!(
                "y must be at most {}x{} to stay in the truncation",
                self.k,
                self.q()
            )));
        }
        let mut yk = CMat::zeros(self.k, self.q());
        yk.view_mut((0, 0), y.shape()).copy_from(y);
        let zi = inverse(&self.z).ok_or_else(|| Error::Singular("z".into()))?;
        Ok(zi * (yk * &self.h).transpose() * c(2.0, 0.0))
    }
}

/// Generators of the level-`q` system. Matrices with fewer than `K` rows
/// are padded.
#[derive(Clone, Debug)]
pub enum GkGenerator {
    /// `δ^{(q)}(a)`, `a` is `q×q`.
    Delta(CMat),
    /// `g_q` with `g` acting on the `K` columns of `λ`.
    Diag(CMat),
    /// `θ^{(q)}(x, 0)`, `x` is `K×q`.
    ThetaX(CMat),
    /// `θ^{(q)}(0, y)`, `y` is `K×q`.
    ThetaY(CMat),
    /// `γ_u^{(q)}(b)`, `b` is `K×K`.
    GammaU(CMat),
}

fn pad_rows(x: &CMat, k: usize, cols: usize, what: &str) -> Result<CMat> {
    if x.ncols() != cols || x.nrows() > k {
        return Err(Error::WindowTooSmall(format!("{what} must be at most {k}x{cols}")));
    }
    let mut out = CMat::zeros(k, cols);
    out.view_mut((0, 0), x.shape()).copy_from(x);
    Ok(out)
}

fn flat(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.transpose().iter().copied())
}

/// `U(y, λ) = exp{2i Tr[λ*Ad + d*Aλ + 2d*Ad]}` with `d = z⁻¹(yh)ᵗ`.
pub fn gk_cocycle(params: &GkParams, y: &CMat, lambda: &CMat) -> Result<C64> {
    let d = params.translation(y)? * c(0.5, 0.0);
    let a = &params.a;
    let t = (lambda.adjoint() * a * &d + d.adjoint() * a * lambda + d.adjoint() * a * &d * c(2.0, 0.0)).trace();
    Ok((c(0.0, 2.0) * t).exp())
}

/// `|U(y₁+y₂, λ) − U(y₁, λ) U(y₂, λ + c₁)|`.
pub fn gk_cocycle_residual(params: &GkParams, y1: &CMat, y2: &CMat, lambda: &CMat) -> Result<f64> {
    let c1 = params.translation(y1)?;
    let lhs = gk_cocycle(params, &(y1 + y2), lambda)?;
    let rhs = gk_cocycle(params, y1, lambda)? * gk_cocycle(params, y2, &(lambda + c1))?;
    Ok((lhs - rhs).norm())
}

pub fn gk_fn(params: &GkParams, gen: &GkGenerator) -> Result<FnOp> {
    let (q, k) = (params.q(), params.k);
    let p = q * k;
    match gen {
        GkGenerator::Delta(a) => {
            if a.shape() != (q, q) {
                return Err(Error::DimensionMismatch(format!("a must be {q}x{q}")));
            }
            let phase = c(0.0, (a * &params.h).trace().re).exp();
            Ok(FnOp::identity().scale(phase))
        }
        GkGenerator::Diag(g) => {
            let rp = GaussRepParams::gl(params.a.clone(), 0.0, k, params.degree);
            rep_fn(&rp, &RepGenerator::Block(g.clone()))
        }
        GkGenerator::ThetaX(x) => {
            let x = pad_rows(x, k, q, "x")?;
            let mut f = GaussPoly::one(p);
            f.add_real_phase(&trace_phase_vector(&params.z, &x, q, k));
            Ok(FnOp::multiplication(f))
        }
        GkGenerator::ThetaY(y) => {
            let cm = params.translation(y)?;
            let d = &cm * c(0.5, 0.0);
            let a = &params.a;
            let mut f = GaussPoly::one(p);
            // U: 4i Re Tr(λ*Ad) + 4i Tr(d*Ad).
            f.add_real_phase(&(flat(&(a * &d)).map(|v| v.conj()) * c(4.0, 0.0)));
            let const_phase = (c(0.0, 4.0) * (d.adjoint() * a * &d).trace()).exp();
            // Radon–Nikodym square root: exp(−Re Tr(λc*) − ½ Tr cc*).
            let cf = flat(&cm);
            f.add_linear(&(cf.map(|v| v.conj()) * c(-0.5, 0.0)), &(&cf * c(-0.5, 0.0)));
            let rn_const = c((-0.5 * cf.norm_squared()).exp(), 0.0);
            Ok(FnOp::weighted_substitution(f.scale(const_phase * rn_const), eye(p), cf))
        }
        GkGenerator::GammaU(b) => {
            if !b.is_square() || b.nrows() > k {
                return Err(Error::WindowTooSmall(format!("b must be at most {k}x{k}")));
            }
            let mut bk = CMat::zeros(k, k);
            bk.view_mut((0, 0), b.shape()).copy_from(b);
            Ok(FnOp::multiplication(quadratic_phase(&(-&params.r), &bk)))
        }
    }
}

pub fn gk_operator(params: &GkParams, gen: &GkGenerator, basis: &Basis) -> Result<OperatorMatrix> {
    crate::gaussrep::galerkin(&gk_fn(params, gen)?, basis)
}

/// Isometry residual of each generator image.
pub fn gk_unitarity_check(params: &GkParams, gens: &[GkGenerator], basis: &Basis) -> Result<Certificate> {
    let inputs = json!({"params": params.describe(), "generators": gens.len()});
    let parts = gens
        .iter()
        .map(|g| {
            let r = isometry_residual(&gk_fn(params, g)?, basis)?;
            Ok(Certificate::new(format!("isometry {}", label(g)), &inputs, r, GK_TOL))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate::combine("level-q system unitarity", &inputs, &parts, GK_TOL)
        .with_note("g_q images carry |det g|^q"))
}

fn label(g: &GkGenerator) -> &'static str {
    match g {
        GkGenerator::Delta(_) => "delta",
        GkGenerator::Diag(_) => "g_q",
        GkGenerator::ThetaX(_) => "theta(x,0)",
        GkGenerator::ThetaY(_) => "theta(0,y)",
        GkGenerator::GammaU(_) => "gamma_u",
    }
}

/// Operator-level commutation relations:
/// `θ(0,y₁)θ(0,y₂) = θ(0,y₁+y₂)`, `[θ(0,y₁), θ(0,y₂)] = 0`,
/// `θ(x₁,0)θ(x₂,0) = θ(x₁+x₂,0)`, and
/// `θ(0,y)θ(x,0)θ(0,y)⁻¹ = δ(xᵗy + y♯x)θ(x,0)`.
pub fn gk_relations_check(params: &GkParams, x1: &CMat, x2: &CMat, y1: &CMat, y2: &CMat, basis: &Basis) -> Result<Certificate> {
    let (q, k) = (params.q(), params.k);
    let (x1, x2) = (pad_rows(x1, k, q, "x")?, pad_rows(x2, k, q, "x")?);
    let (y1, y2) = (pad_rows(y1, k, q, "y")?, pad_rows(y2, k, q, "y")?);
    let op = |g: GkGenerator| gk_fn(params, &g);
    let ty1 = op(GkGenerator::ThetaY(y1.clone()))?;
    let ty2 = op(GkGenerator::ThetaY(y2.clone()))?;
    let ty1_inv = op(GkGenerator::ThetaY(-&y1))?;
    let tx1 = op(GkGenerator::ThetaX(x1.clone()))?;
    let tx2 = op(GkGenerator::ThetaX(x2.clone()))?;
    let sharp = match params.kind {
        GroupKind::Sp => y1.transpose(),
        _ => -y1.transpose(),
    };
    let a = x1.transpose() * &y1 + sharp * &x1;
    let inputs = json!({
        "params": params.describe(),
        "x1": matrix_json(&x1), "x2": matrix_json(&x2), "y1": matrix_json(&y1), "y2": matrix_json(&y2),
    });
    let d = |l: &FnOp, r: &FnOp| difference_norm(l, r, basis);
    let parts = vec![
        Certificate::new("translation composition", &inputs, d(&ty1.after(&ty2), &op(GkGenerator::ThetaY(&y1 + &y2))?)?, GK_TOL),
        Certificate::new("translation commutativity", &inputs, d(&ty1.after(&ty2), &ty2.after(&ty1))?, TRANSLATION_TOL),
        Certificate::new("theta(x,0) composition", &inputs, d(&tx1.after(&tx2), &op(GkGenerator::ThetaX(&x1 + &x2))?)?, GK_TOL),
        Certificate::new(
            "mixed reorder phase",
            &inputs,
            d(&ty1.after(&tx1).after(&ty1_inv), &op(GkGenerator::Delta(a))?.after(&tx1))?,
            GK_TOL,
        ),
        Certificate::new("translation inverse", &inputs, d(&ty1.after(&ty1_inv), &FnOp::identity())?, GK_TOL),
    ];
    Ok(Certificate::combine("level-q commutation relations", &inputs, &parts, GK_TOL))
}

/// Images of `g_q` and `γ_u(b)` for two fibers with equal `(A, R)`.
pub fn r_dependence_check(first: &GkParams, second: &GkParams, g: &CMat, b: &CMat, basis: &Basis) -> Result<Certificate> {
    let inputs = json!({"first": first.describe(), "second": second.describe(), "g": matrix_json(g), "b": matrix_json(b)});
    let r_gap = max_abs_diff(&first.r, &second.r) + max_abs_diff(&first.a, &second.a);
    let mut parts = vec![Certificate::new("equal (A, R)", &inputs, r_gap, 1e-10)];
    for gen in [GkGenerator::Diag(g.clone()), GkGenerator::GammaU(b.clone())] {
        let res = difference_norm(&gk_fn(first, &gen)?, &gk_fn(second, &gen)?, basis)?;
        parts.push(Certificate::new(format!("{} image depends on (A, R) only", label(&gen)), &inputs, res, 1e-10));
    }
    Ok(Certificate::combine("dependence on (A, R)", &inputs, &parts, 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::matrixfn::varsigma;

    fn sp_params(k: usize) -> GkParams {
        let a = CMat::from_element(1, 1, c(0.0, 0.0));
        let z = CMat::from_element(1, 1, c(0.8, 0.3));
        GkParams::from_canonical(GroupKind::Sp, a, z, k, 2).unwrap()
    }

    #[test]
    fn trivial_images() {
        let p = sp_params(2);
        let basis = p.basis().unwrap();
        let d = gk_operator(&p, &GkGenerator::Delta(CMat::zeros(1, 1)), &basis).unwrap();
        assert!(max_abs_diff(&d.matrix, &eye(basis.len())) < 1e-13);
        let t = gk_operator(&p, &GkGenerator::ThetaY(CMat::zeros(2, 1)), &basis).unwrap();
        assert!(max_abs_diff(&t.matrix, &eye(basis.len())) < 1e-12);
        let a = CMat::from_element(1, 1, c(0.7, -0.2));
        let d = gk_operator(&p, &GkGenerator::Delta(a.clone()), &basis).unwrap();
        let phase = c(0.0, (a * &p.h).trace().re).exp();
        assert!(max_abs_diff(&d.matrix, &(eye(basis.len()) * phase)) < 1e-13);
    }

    #[test]
    fn cocycle_law() {
        let p = sp_params(2);
        let y1 = CMat::from_row_slice(2, 1, &[c(0.3, 0.1), c(-0.2, 0.4)]);
        let y2 = CMat::from_row_slice(2, 1, &[c(0.1, -0.5), c(0.2, 0.0)]);
        let lam = CMat::from_row_slice(1, 2, &[c(0.4, -0.1), c(0.7, 0.2)]);
        assert!(gk_cocycle_residual(&p, &y1, &y2, &lam).unwrap() < 1e-12);
        assert!((gk_cocycle(&p, &y1, &lam).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!((gk_cocycle(&p, &CMat::zeros(2, 1), &lam).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn unitarity_and_relations_sp() {
        let a = CMat::from_element(1, 1, c(0.0, 0.0));
        let z = CMat::from_element(1, 1, c(0.8, 0.3));
        let p = GkParams::from_canonical(GroupKind::Sp, a, z, 2, 2).unwrap();
        let basis = p.basis().unwrap();
        let x = CMat::from_row_slice(2, 1, &[c(0.3, 0.2), c(-0.1, 0.0)]);
        let y = CMat::from_row_slice(2, 1, &[c(0.2, -0.1), c(0.1, 0.3)]);
        let gens = [
            GkGenerator::Delta(CMat::from_element(1, 1, c(0.4, 0.0))),
            GkGenerator::Diag(CMat::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.3, 0.1), c(0.0, 0.0), c(0.8, 0.0)])),
            GkGenerator::ThetaX(x.clone()),
            GkGenerator::ThetaY(y.clone()),
            GkGenerator::GammaU(CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(-0.3, 0.0)])),
        ];
        let u = gk_unitarity_check(&p, &gens, &basis).unwrap();
        assert!(u.passed(), "{u:#?}");
        let r = gk_relations_check(&p, &x, &(-&x * c(0.5, 0.0)), &y, &CMat::from_row_slice(2, 1, &[c(-0.3, 0.0), c(0.1, 0.1)]), &basis).unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn relations_o_kind() {
        let a = varsigma(0.0) + crate::matrixfn::vartheta(0.6);
        let z = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.2, 0.1), c(-0.1, 0.0), c(0.9, 0.0)]);
        let p = GkParams::from_canonical(GroupKind::O, a, z, 1, 2).unwrap();
        let basis = p.basis().unwrap();
        let x = CMat::from_row_slice(1, 2, &[c(0.3, 0.2), c(-0.1, 0.0)]);
        let y = CMat::from_row_slice(1, 2, &[c(0.2, -0.1), c(0.1, 0.3)]);
        let r = gk_relations_check(&p, &x, &x, &y, &(&y * c(-0.5, 0.0)), &basis).unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn equal_r_images_agree() {
        let p = sp_params(2);
        let partner = p.equal_r_partner(&CMat::from_element(1, 1, c(0.6, 0.5))).unwrap();
        let basis = p.basis().unwrap();
        let cert = r_dependence_check(
            &p,
            &partner,
            &CMat::from_row_slice(2, 2, &[c(1.1, 0.0), c(0.2, 0.0), c(0.0, 0.1), c(0.9, 0.0)]),
            &CMat::from_row_slice(2, 2, &[c(0.4, 0.0), c(0.2, 0.0), c(0.2, 0.0), c(0.1, 0.0)]),
            &basis,
        )
        .unwrap();
        assert!(cert.passed(), "{cert:#?}");
    }
}

//! Linear operators on Gaussian-polynomial functions and their certified
//! restrictions to a truncated basis.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::gaussint::{Basis, BasisDescriptor, GaussPoly, GaussSum};
use crate::linalg::{eigh, eye, CMat, CVec, C64};

type ApplyFn = dyn Fn(&GaussPoly) -> Result<GaussSum> + Send + Sync;

/// A linear map acting term by term on [`GaussSum`]s.
#[derive(Clone)]
pub struct FnOp {
    apply: Arc<ApplyFn>,
}

impl std::fmt::Debug for FnOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("FnOp")
    }
}

impl FnOp {
    pub fn new(f: impl Fn(&GaussPoly) -> Result<GaussSum> + Send + Sync + 'static) -> Self {
        Self { apply: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Self::new(|f| Ok(GaussSum::from_term(f.clone())))
    }

    pub fn apply_term(&self, f: &GaussPoly) -> Result<GaussSum> {
        (self.apply)(f)
    }

    pub fn apply(&self, f: &GaussSum) -> Result<GaussSum> {
        f.map(|t| (self.apply)(t))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &FnOp) -> FnOp {
        let (a, b) = (self.clone(), first.clone());
        FnOp::new(move |f| a.apply(&b.apply_term(f)?))
    }

    pub fn scale(&self, s: C64) -> FnOp {
        let a = self.clone();
        FnOp::new(move |f| Ok(a.apply_term(f)?.scale(s)))
    }

    pub fn sum(&self, o: &FnOp) -> FnOp {
        let (a, b) = (self.clone(), o.clone());
        FnOp::new(move |f| Ok(a.apply_term(f)?.add(&b.apply_term(f)?)))
    }

    /// `f ↦ m · f(Sλ + t)`.
    pub fn weighted_substitution(multiplier: GaussPoly, s: CMat, t: CVec) -> Self {
        FnOp::new(move |f| Ok(GaussSum::from_term(multiplier.mul(&f.substitute_linear(&s, &t)))))
    }

    /// `f ↦ m · f`.
    pub fn multiplication(multiplier: GaussPoly) -> Self {
        FnOp::new(move |f| Ok(GaussSum::from_term(multiplier.mul(f))))
    }
}

/// Galerkin matrix `M_ij = ⟨Op e_j, e_i⟩` with the basis it refers to.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorMatrix {
    #[serde(skip)]
    pub matrix: CMat,
    pub basis: BasisDescriptor,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "matrix": crate::linalg::matrix_json(&self.matrix),
            "basis": self.basis,
        })
    }
}

pub fn images(op: &FnOp, basis: &Basis) -> Result<Vec<GaussSum>> {
    basis.functions().iter().map(|e| op.apply(e)).collect()
}

pub fn galerkin(op: &FnOp, basis: &Basis) -> Result<OperatorMatrix> {
    let imgs = images(op, basis)?;
    let n = basis.len();
    let mut m = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] = basis.inner(&imgs[j], basis.function(i))?;
        }
    }
    Ok(OperatorMatrix { matrix: m, basis: basis.descriptor() })
}

/// `G_ij = ⟨f_j, f_i⟩`, so that `‖Σ c_i f_i‖² = c* G c`.
pub fn gram_of(fs: &[GaussSum], basis: &Basis) -> Result<CMat> {
    let n = fs.len();
    let mut g = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = basis.inner(&fs[j], &fs[i])?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// `max |‖Op ξ‖² − ‖ξ‖²|` over unit `ξ` in the span of the basis.
pub fn isometry_residual(op: &FnOp, basis: &Basis) -> Result<f64> {
    let g = gram_of(&images(op, basis)?, basis)?;
    let (vals, _) = eigh(&(g - eye(basis.len())));
    Ok(vals.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
}

/// `max ‖(A − B) ξ‖` over unit `ξ` in the span of the basis, computed from
/// the exact Gram matrix of the differences.
pub fn difference_norm(a: &FnOp, b: &FnOp, basis: &Basis) -> Result<f64> {
    let diffs: Vec<GaussSum> = basis
        .functions()
        .iter()
        .map(|e| Ok(a.apply(e)?.sub(&b.apply(e)?)))
        .collect::<Result<_>>()?;
    let g = gram_of(&diffs, basis)?;
    let (vals, _) = eigh(&g);
    Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// `‖AB − BA‖` on the basis span.
pub fn commutator_norm(a: &FnOp, b: &FnOp, basis: &Basis) -> Result<f64> {
    difference_norm(&a.after(b), &b.after(a), basis)
}

/// `‖Op − c·I‖` on the basis span.
pub fn distance_to_scalar(op: &FnOp, s: C64, basis: &Basis) -> Result<f64> {
    difference_norm(op, &FnOp::identity().scale(s), basis)
}

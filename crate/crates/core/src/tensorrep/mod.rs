//! Realizations of Sp(2∞) and O(2∞) on the stabilized tensor product of
//! site spaces `L²(Cᵐ, dλ)`, the site Fourier transform, and the per-fiber
//! operator system of the level-`q` subgroup.
//!
//! A truncation to `K` sites uses `λ ∈ Mat(m×K)` flattened row-major, so the
//! coordinates of site `k` are `i·K + k`.

mod gk;

pub use gk::{
    gk_cocycle, gk_cocycle_residual, gk_fn, gk_operator, gk_relations_check, gk_unitarity_check, r_dependence_check,
    GkGenerator, GkParams, GK_TOL, TRANSLATION_TOL,
};

use serde::Serialize;
use serde_json::json;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::gaussint::{Basis, FockVector, GaussPoly, GaussSum, Measure};
use crate::gaussrep::{
    commutator_norm, difference_norm, galerkin, isometry_residual, projection_operator, right_mult, tau_fn,
    CompactSubgroup, FnOp, Irrep, OperatorMatrix,
};
use crate::groups::{GeneratorSpec, GroupKind, ShiftMap};
use crate::linalg::{c, det, eye, inverse, kron, matrix_json, max_abs_diff, op_norm, unitarity_residual, CMat, CVec, C64};
use crate::matrixfn::{hermitian_calculus, o_pairing, require_hermitian, HermitianFn};

pub const SP_O_TOL: f64 = 1e-8;
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Kernel scale `s` in `exp{i s Re[(Bλ)ᵗ λ̂]}`.
pub const FOURIER_SCALE: f64 = 1.0;

pub const CALIBRATION_NOTE: &str =
    "Fourier kernel c*exp{i s Re[(B lambda)^t lambda_hat]}, B = sqrt(1+4A^2), s = 1, c = det(B)/(2 pi)^m per site";

fn symmetric_residual(a: &CMat, sign: f64) -> f64 {
    max_abs_diff(a, &(a.transpose() * c(sign, 0.0)))
}

/// `η^A(v) = exp(−i v*Av) ρ(v)^{1/2}` on `m` coordinates.
pub fn stabilizer_vector(a: &CMat) -> Result<GaussSum> {
    require_hermitian(a)?;
    let mut f = GaussPoly::sqrt_nu_density(a.nrows());
    f.add_hermitian(&(a * c(0.0, 1.0)));
    Ok(GaussSum::from_term(f))
}

/// Coefficients of `η^A` against a site basis (Lebesgue measure).
pub fn stabilizer_coefficients(a: &CMat, basis: &Basis) -> Result<FockVector> {
    if basis.measure() != Measure::Lebesgue || basis.coordinates() != a.nrows() {
        return Err(Error::DimensionMismatch("need a Lebesgue basis on one site".into()));
    }
    basis.project(&stabilizer_vector(a)?)
}

/// `f_1 ⊗ … ⊗ f_p ⊗ η^A ⊗ η^A ⊗ …`.
#[derive(Clone, Debug)]
pub struct StabilizedVector {
    pub a: CMat,
    pub sites: Vec<GaussSum>,
}

impl StabilizedVector {
    pub fn new(a: CMat, sites: Vec<GaussSum>) -> Result<Self> {
        require_hermitian(&a)?;
        if sites.iter().any(|f| f.dim() != a.nrows()) {
            return Err(Error::DimensionMismatch("each site function needs m coordinates".into()));
        }
        Ok(Self { a, sites })
    }

    /// Inner product; sites beyond both finite parts contribute `‖η‖² = 1`.
    pub fn inner(&self, o: &Self) -> Result<C64> {
        let eta = stabilizer_vector(&self.a)?;
        let n = self.sites.len().max(o.sites.len());
        let mut out = c(1.0, 0.0);
        for k in 0..n {
            let f = self.sites.get(k).unwrap_or(&eta);
            let g = o.sites.get(k).unwrap_or(&eta);
            out *= f.inner(g, Measure::Lebesgue)?;
        }
        Ok(out)
    }

    /// The first `k` sites as one function on `m·k` coordinates.
    pub fn truncate(&self, k: usize) -> Result<GaussSum> {
        let m = self.a.nrows();
        let eta = stabilizer_vector(&self.a)?;
        let mut out = GaussSum::from_term(GaussPoly::one(m * k));
        for site in 0..k {
            let f = self.sites.get(site).unwrap_or(&eta);
            let map: Vec<usize> = (0..m).map(|i| i * k + site).collect();
            let mut next = GaussSum::zero(m * k);
            for t in out.terms() {
                for s in f.terms() {
                    next.push(t.mul(&s.embed(m * k, &map)));
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// `√(1 + 4A²)`.
pub fn fourier_root(a: &CMat) -> Result<CMat> {
    hermitian_calculus(a, HermitianFn::SqrtOnePlusFourSquare)
}

/// `(Ff)(λ) = c ∫ exp{i s Re Σ_k (B λ_k)ᵗ λ̂_k} f(λ̂) dλ̂` on `K` sites,
/// `c = (s^{2m} det B / (2π)^m)^K`.
pub fn fourier_kernel_fn(b: &CMat, k: usize) -> FnOp {
    let m = b.nrows();
    let p = m * k;
    let s = FOURIER_SCALE;
    let per_site = det(b) * s.powi(2 * m as i32) / (2.0 * std::f64::consts::PI).powi(m as i32);
    let pref = per_site.powi(k as i32);
    let mut hol = CMat::zeros(2 * p, 2 * p);
    let mut anti = CMat::zeros(2 * p, 2 * p);
    for site in 0..k {
        for a in 0..m {
            for bb in 0..m {
                let (out_idx, in_idx) = (bb * k + site, p + a * k + site);
                let v = c(0.0, -0.25 * s) * b[(a, bb)];
                let vb = c(0.0, -0.25 * s) * b[(a, bb)].conj();
                hol[(in_idx, out_idx)] += v;
                hol[(out_idx, in_idx)] += v;
                anti[(in_idx, out_idx)] += vb;
                anti[(out_idx, in_idx)] += vb;
            }
        }
    }
    let mut kernel = GaussPoly::one(2 * p);
    kernel.add_holomorphic(&hol);
    kernel.add_antiholomorphic(&anti);
    let kernel = kernel.scale(pref);
    let map: Vec<usize> = (p..2 * p).collect();
    let inner: Vec<usize> = (p..2 * p).collect();
    FnOp::new(move |f| {
        let joint = kernel.mul(&f.embed(2 * p, &map));
        Ok(GaussSum::from_term(joint.integrate_partial(&inner)?))
    })
}

fn sites_of(basis: &Basis, m: usize) -> Result<usize> {
    let p = basis.coordinates();
    if m == 0 || !p.is_multiple_of(m) {
        return Err(Error::DimensionMismatch(format!("{p} coordinates are not a multiple of m = {m}")));
    }
    Ok(p / m)
}

fn require_pm_symmetric(a: &CMat) -> Result<()> {
    require_hermitian(a)?;
    let tol = SYMMETRY_TOL * (1.0 + crate::linalg::max_abs(a));
    if symmetric_residual(a, 1.0) > tol && symmetric_residual(a, -1.0) > tol {
        return Err(Error::SymmetryViolated("need A = A^t or A = -A^t".into()));
    }
    Ok(())
}

pub fn fourier_fn(a: &CMat, k: usize) -> Result<FnOp> {
    require_pm_symmetric(a)?;
    Ok(fourier_kernel_fn(&fourier_root(a)?, k))
}

/// Galerkin matrix of the Fourier transform on a Lebesgue basis.
pub fn fourier_operator(a: &CMat, basis: &Basis) -> Result<OperatorMatrix> {
    let k = sites_of(basis, a.nrows())?;
    galerkin(&fourier_fn(a, k)?, basis)
}

/// `‖F η^A − η^A‖ / ‖η^A‖` on one site.
pub fn lemma_1_1_check(a: &CMat) -> Result<Certificate> {
    require_pm_symmetric(a)?;
    let m = a.nrows();
    let eta = stabilizer_vector(a)?;
    let f_eta = fourier_fn(a, 1)?.apply(&eta)?;
    let diff = f_eta.sub(&eta);
    let nd = diff.inner(&diff, Measure::Lebesgue)?.re.max(0.0).sqrt();
    let ne = eta.inner(&eta, Measure::Lebesgue)?.re.sqrt();
    let inputs = json!({"A": matrix_json(a), "m": m});
    Ok(Certificate::new("Fourier fixed point of the stabilizing vector", &inputs, nd / ne, SP_O_TOL)
        .with_note(CALIBRATION_NOTE))
}

#[derive(Clone, Debug)]
pub struct SpORepParams {
    pub kind: GroupKind,
    pub a: CMat,
    pub k: usize,
    pub degree: usize,
}

impl SpORepParams {
    pub fn new(kind: GroupKind, a: CMat, k: usize, degree: usize) -> Result<Self> {
        require_hermitian(&a)?;
        let m = a.nrows();
        let tol = SYMMETRY_TOL * (1.0 + crate::linalg::max_abs(&a));
        match kind {
            GroupKind::Sp => {
                let r = symmetric_residual(&a, -1.0);
                if r > tol {
                    return Err(Error::SymmetryViolated(format!("Sp realization needs A = -A^t ({r:.3e})")));
                }
            }
            GroupKind::O => {
                if !m.is_multiple_of(2) {
                    return Err(Error::DimensionMismatch("O realization needs even m".into()));
                }
                let p = o_pairing(m / 2);
                let r = max_abs_diff(&a.transpose(), &(&p * &a * p.transpose()));
                if r > tol {
                    return Err(Error::SymmetryViolated(format!("O realization needs A^t = PAP^-1 ({r:.3e})")));
                }
            }
            GroupKind::GL => return Err(Error::Unsupported("use the Gaussian representation for GL".into())),
        }
        if k == 0 {
            return Err(Error::Guard("need at least one site".into()));
        }
        Ok(Self { kind, a, k, degree })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn basis(&self) -> Result<Basis> {
        Basis::new(self.m() * self.k, self.degree, Measure::Lebesgue)
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({"kind": self.kind.name(), "A": matrix_json(&self.a), "K": self.k, "D": self.degree})
    }

    /// Matrix `C` with `γ_u(x) ↦ exp{i Re Tr[C λ x λᵗ]}`.
    fn gamma_matrix(&self) -> Result<CMat> {
        match self.kind {
            GroupKind::Sp => fourier_root(&self.a),
            _ => Ok(fourier_root(&self.a.transpose())? * o_pairing(self.m() / 2)),
        }
    }

    /// Matrix `B` of the transform realizing the reflection generator.
    fn fourier_matrix(&self) -> Result<CMat> {
        match self.kind {
            GroupKind::Sp => fourier_root(&self.a),
            _ => fourier_root(&self.a.transpose()),
        }
    }
}

/// Generators of the Sp/O realizations at level 0.
#[derive(Clone, Debug)]
pub enum SpOGenerator {
    /// `g_0 = diag((g⁻¹)′, g)`.
    Diag(CMat),
    /// `γ_u^{(0)}(x)`.
    GammaU(CMat),
    /// `s⁻` (Sp) or `s⁺` (O).
    Reflection,
}

impl SpOGenerator {
    pub fn from_spec(spec: &GeneratorSpec<C64>) -> Result<Self> {
        match spec {
            GeneratorSpec::DiagEmbed { g, level: 0 } => Ok(SpOGenerator::Diag(g.to_cmat())),
            GeneratorSpec::GammaU { b, level: 0 } => Ok(SpOGenerator::GammaU(b.to_cmat())),
            _ => Err(Error::Unsupported("only level-0 g_0 and gamma_u act here".into())),
        }
    }

    pub fn from_shift(kind: GroupKind, shift: ShiftMap) -> Result<Self> {
        match (kind, shift) {
            (GroupKind::Sp, ShiftMap::SMinus) | (GroupKind::O, ShiftMap::SPlus) => Ok(SpOGenerator::Reflection),
            _ => Err(Error::Unsupported(format!("{shift:?} is not realized for {}", kind.name()))),
        }
    }
}

fn pad(g: &CMat, k: usize, identity: bool) -> Result<CMat> {
    if !g.is_square() || g.nrows() > k {
        return Err(Error::Guard(format!("block of size {} exceeds K = {k}", g.nrows())));
    }
    let mut out = if identity { eye(k) } else { CMat::zeros(k, k) };
    out.view_mut((0, 0), g.shape()).copy_from(g);
    Ok(out)
}

/// Multiplication by `exp{i Re Tr[C λ x λᵗ]}` on `m×K` coordinates.
pub fn quadratic_phase(cm: &CMat, x: &CMat) -> GaussPoly {
    let p = cm.nrows() * x.nrows();
    let mm = kron(&cm.transpose(), x);
    let mut f = GaussPoly::one(p);
    f.add_holomorphic(&(&mm * c(0.0, -0.5)));
    f.add_antiholomorphic(&(mm.map(|v| v.conj()) * c(0.0, -0.5)));
    f
}

pub fn rep_sp_o_fn(params: &SpORepParams, gen: &SpOGenerator) -> Result<FnOp> {
    let (m, k) = (params.m(), params.k);
    let p = m * k;
    match gen {
        SpOGenerator::Diag(g) => {
            let g = pad(g, k, true)?;
            if inverse(&g).is_none() {
                return Err(Error::Singular("g".into()));
            }
            let w = c(det(&g).norm().powi(m as i32), 0.0);
            Ok(FnOp::weighted_substitution(GaussPoly::one(p).scale(w), right_mult(m, &g), CVec::zeros(p)))
        }
        SpOGenerator::GammaU(x) => {
            let x = pad(x, k, false)?;
            let sign = if params.kind == GroupKind::Sp { 1.0 } else { -1.0 };
            let r = symmetric_residual(&x, sign);
            if r > SYMMETRY_TOL * (1.0 + crate::linalg::max_abs(&x)) {
                return Err(Error::SymmetryViolated(format!("gamma_u parameter symmetry ({r:.3e})")));
            }
            Ok(FnOp::multiplication(quadratic_phase(&params.gamma_matrix()?, &x)))
        }
        SpOGenerator::Reflection => Ok(fourier_kernel_fn(&params.fourier_matrix()?, k)),
    }
}

pub fn rep_sp_o(params: &SpORepParams, gen: &SpOGenerator, basis: &Basis) -> Result<OperatorMatrix> {
    galerkin(&rep_sp_o_fn(params, gen)?, basis)
}

/// Isometry of every image and the relations
/// `g_0(g)g_0(h) = g_0(gh)`, `γ(x)γ(y) = γ(x+y)`, `g_0 γ(x) g_0⁻¹ = γ(g x gᵗ)`,
/// `F² = parity`, `F g_0(g) = g_0(g^{-t}) F`.
pub fn sp_o_relations_check(
    params: &SpORepParams,
    g: &CMat,
    h: &CMat,
    x: &CMat,
    y: &CMat,
    basis: &Basis,
) -> Result<Certificate> {
    let k = params.k;
    let (g, h) = (pad(g, k, true)?, pad(h, k, true)?);
    let (x, y) = (pad(x, k, false)?, pad(y, k, false)?);
    let gi = inverse(&g).ok_or_else(|| Error::Singular("g".into()))?;
    let op = |gen: SpOGenerator| rep_sp_o_fn(params, &gen);
    let pg = op(SpOGenerator::Diag(g.clone()))?;
    let ph = op(SpOGenerator::Diag(h.clone()))?;
    let pgi = op(SpOGenerator::Diag(gi.clone()))?;
    let gx = op(SpOGenerator::GammaU(x.clone()))?;
    let gy = op(SpOGenerator::GammaU(y.clone()))?;
    let f = op(SpOGenerator::Reflection)?;
    let p = params.m() * k;
    let parity = FnOp::weighted_substitution(GaussPoly::one(p), -eye(p), CVec::zeros(p));
    let inputs = json!({
        "params": params.describe(),
        "g": matrix_json(&g), "h": matrix_json(&h), "x": matrix_json(&x), "y": matrix_json(&y),
    });
    let mut parts = Vec::new();
    for (name, o) in [("isometry g_0", &pg), ("isometry gamma_u", &gx), ("isometry reflection", &f)] {
        parts.push(Certificate::new(name, &inputs, isometry_residual(o, basis)?, SP_O_TOL));
    }
    let rel = |a: &FnOp, b: &FnOp| difference_norm(a, b, basis);
    parts.push(Certificate::new("g_0 product", &inputs, rel(&pg.after(&ph), &op(SpOGenerator::Diag(&g * &h))?)?, SP_O_TOL));
    parts.push(Certificate::new("gamma_u sum", &inputs, rel(&gx.after(&gy), &op(SpOGenerator::GammaU(&x + &y))?)?, SP_O_TOL));
    let conj = pg.after(&gx).after(&pgi);
    parts.push(Certificate::new(
        "g_0 conjugation of gamma_u",
        &inputs,
        rel(&conj, &op(SpOGenerator::GammaU(&g * &x * g.transpose()))?)?,
        SP_O_TOL,
    ));
    parts.push(Certificate::new("reflection squared", &inputs, rel(&f.after(&f), &parity)?, SP_O_TOL));
    parts.push(Certificate::new(
        "reflection conjugation of g_0",
        &inputs,
        rel(&f.after(&pg), &op(SpOGenerator::Diag(gi.transpose()))?.after(&f))?,
        SP_O_TOL,
    ));
    Ok(Certificate::combine("Sp/O realization relations", &inputs, &parts, SP_O_TOL)
        .with_note(CALIBRATION_NOTE)
        .with_note("g_0 images carry |det g|^m"))
}

/// Membership defect for `O(A, m)` (Sp realization) or `Sp(A, m)` (O).
pub fn sp_o_commutant_defect(kind: GroupKind, a: &CMat, u: &CMat) -> f64 {
    let comm = max_abs_diff(&(u * a), &(a * u));
    let sym = match kind {
        GroupKind::Sp => max_abs_diff(&u.transpose(), &u.adjoint()),
        _ => {
            let p = o_pairing(u.nrows() / 2);
            max_abs_diff(&u.transpose(), &(&p * u.adjoint() * p.transpose()))
        }
    };
    comm + sym
}

#[derive(Clone, Debug, Serialize)]
pub struct SpOCommutantReport {
    pub certificate: Certificate,
    pub commutator: f64,
    pub member: bool,
}

pub const SEPARATION: f64 = 1e-3;

/// Max `‖[τ(u), Π_A(g)]‖` over samples; passes iff the commutator vanishes
/// exactly when `u` is in the commutant group. An optional isotypic
/// projection is checked for idempotence and invariance.
pub fn commutant_sp_o_check(
    params: &SpORepParams,
    u: &CMat,
    samples: &[SpOGenerator],
    basis: &Basis,
    projection: Option<(&CompactSubgroup, &Irrep, usize)>,
) -> Result<SpOCommutantReport> {
    let m = params.m();
    if u.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!("u must be {m}x{m}")));
    }
    let ur = unitarity_residual(u);
    if ur > 1e-10 {
        return Err(Error::NotUnitary(ur));
    }
    let tau = tau_fn(u, params.k)?;
    let ops: Vec<FnOp> = samples.iter().map(|g| rep_sp_o_fn(params, g)).collect::<Result<_>>()?;
    let mut commutator: f64 = 0.0;
    for o in &ops {
        commutator = commutator.max(commutator_norm(&tau, o, basis)?);
    }
    let member = sp_o_commutant_defect(params.kind, &params.a, u) <= 1e-10;
    let inputs = json!({"params": params.describe(), "u": matrix_json(u), "samples": samples.len()});
    let mut parts = vec![if member {
        Certificate::new("commutator vanishes on the commutant group", &inputs, commutator, SP_O_TOL)
    } else {
        Certificate::new("commutator separated off the commutant group", &inputs, (SEPARATION - commutator).max(0.0), 0.0)
            .with_note(format!("commutator {commutator:.3e} must reach {SEPARATION:e}"))
    }];
    if let Some((group, irrep, index)) = projection {
        let pm = projection_operator(group, irrep, index, basis, m)?.matrix;
        parts.push(Certificate::new("projection idempotence", &inputs, op_norm(&(&pm * &pm - &pm)), 1e-6));
        parts.push(Certificate::new("projection self-adjointness", &inputs, op_norm(&(&pm - pm.adjoint())), 1e-6));
        let mut inv: f64 = 0.0;
        for o in &ops {
            let pi = galerkin(o, basis)?.matrix;
            inv = inv.max(op_norm(&(&pm * &pi - &pi * &pm)));
        }
        parts.push(Certificate::new("projection invariance", &inputs, inv, 1e-6));
    }
    let tol = parts.iter().map(|p| p.tolerance).fold(0.0, f64::max);
    let certificate = Certificate::combine("Sp/O commutant", &inputs, &parts, tol)
        .with_note(format!("u in commutant group: {member}"));
    Ok(SpOCommutantReport { certificate, commutator, member })
}

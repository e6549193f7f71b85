//! The commutant action `τ(u)ξ(λ) = ξ(u*λ)` and isotypic projections.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::gaussint::{Basis, GaussPoly, Poly};
use crate::linalg::{c, eye, kron, matrix_json, max_abs, max_abs_diff, op_norm, unitarity_residual, CMat, CVec, C64};

use super::ops::{commutator_norm, FnOp, OperatorMatrix};
use super::{rep_fn, GaussRepParams, RepGenerator, REP_TOL};

const UNITARY_TOL: f64 = 1e-10;

fn require_unitary(u: &CMat) -> Result<()> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch("u must be square".into()));
    }
    let r = unitarity_residual(u);
    if r > UNITARY_TOL {
        return Err(Error::NotUnitary(r));
    }
    Ok(())
}

/// Substitution matrix of `vec λ ↦ vec(u*λ)` for `λ` of size `m×K`.
fn tau_substitution(u: &CMat, k: usize) -> CMat {
    kron(&u.adjoint(), &eye(k))
}

pub fn tau_fn(u: &CMat, k: usize) -> Result<FnOp> {
    require_unitary(u)?;
    let s = tau_substitution(u, k);
    let p = u.nrows() * k;
    Ok(FnOp::weighted_substitution(GaussPoly::one(p), s, CVec::zeros(p)))
}

/// Matrix of `τ(u)` on the basis. The basis span is `τ`-invariant, so this
/// is computed on monomial coefficients and is exact.
pub fn tau_operator(u: &CMat, basis: &Basis) -> Result<OperatorMatrix> {
    require_unitary(u)?;
    let p = basis.coordinates();
    if !p.is_multiple_of(u.nrows()) {
        return Err(Error::DimensionMismatch(format!(
            "{p} coordinates are not a multiple of m = {}",
            u.nrows()
        )));
    }
    let s = tau_substitution(u, p / u.nrows());
    let images: Vec<Poly> = (0..2 * p)
        .map(|v| {
            let (row, conj) = if v < p { (v, false) } else { (v - p, true) };
            let mut q = Poly::zero(2 * p);
            for j in 0..p {
                let coef = if conj { s[(row, j)].conj() } else { s[(row, j)] };
                if coef != c(0.0, 0.0) {
                    let var = if conj { p + j } else { j };
                    q = q.add(&Poly::var(2 * p, var).scale(coef));
                }
            }
            q
        })
        .collect();
    let idx = basis.indices();
    let n = idx.len();
    let exps: Vec<Vec<u8>> = idx.iter().map(|ix| ix.holo.iter().chain(&ix.anti).copied().collect()).collect();
    let mut mono_action = CMat::zeros(n, n);
    for (l, e) in exps.iter().enumerate() {
        let img = Poly::monomial(e.clone(), c(1.0, 0.0)).substitute(&images);
        for (r, er) in exps.iter().enumerate() {
            mono_action[(r, l)] = img.coeff(er);
        }
    }
    let t = basis.coefficients();
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("basis coefficients".into()))?;
    Ok(OperatorMatrix {
        matrix: t_inv.transpose() * mono_action * t.transpose(),
        basis: basis.descriptor(),
    })
}

/// `‖uA − Au‖ + ‖zu − z‖` (max-modulus entries).
pub fn in_commutant_group(u: &CMat, a: &CMat, z: &CMat) -> f64 {
    let comm = max_abs_diff(&(u * a), &(a * u));
    let fix = if z.is_empty() { 0.0 } else { max_abs_diff(&(z * u), z) };
    comm + fix
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutantReport {
    pub certificate: Certificate,
    pub commutator: f64,
    pub membership_defect: f64,
}

/// Max over samples of `‖[τ(u), Π_{Az}(g)]‖`. Passes iff `u` lies in
/// `{v ∈ U(m): vA = Av, zv = z}` and the commutators vanish.
pub fn commutant_check(
    params: &GaussRepParams,
    u: &CMat,
    samples: &[RepGenerator],
    basis: &Basis,
) -> Result<CommutantReport> {
    params.validate()?;
    if u.shape() != (params.m, params.m) {
        return Err(Error::DimensionMismatch(format!("u must be {0}x{0}", params.m)));
    }
    let tau = tau_fn(u, params.k)?;
    let mut commutator: f64 = 0.0;
    for g in samples {
        commutator = commutator.max(commutator_norm(&tau, &rep_fn(params, g)?, basis)?);
    }
    let defect = in_commutant_group(u, &params.a, &params.z);
    let inputs = json!({
        "params": params.describe(),
        "u": matrix_json(u),
        "samples": samples.len(),
    });
    let certificate = Certificate::new("commutant", &inputs, commutator + defect, REP_TOL)
        .with_note(format!(
            "residual = max commutator norm {commutator:.3e} + membership defect {defect:.3e}"
        ));
    Ok(CommutantReport { certificate, commutator, membership_defect: defect })
}

/// Compact subgroups of `U(m)` with a Haar quadrature.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CompactSubgroup {
    /// `u(θ) = W diag(e^{i Σ_j c_{lj} θ_j}) W*` with integer charges `c`
    /// (`m` rows, one column per circle factor).
    Torus {
        #[serde(skip, default)]
        frame: Option<CMat>,
        charges: Vec<Vec<i64>>,
        nodes: Option<usize>,
    },
    /// An explicitly listed finite group.
    Finite {
        #[serde(skip, default)]
        elements: Vec<CMat>,
    },
}

/// Irreducible representation of a [`CompactSubgroup`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Irrep {
    /// Character `e^{i Σ w_j θ_j}` of a torus.
    Character { weights: Vec<i64> },
    /// Matrices of the representation, one per listed element.
    Matrices {
        #[serde(skip, default)]
        images: Vec<CMat>,
    },
    Trivial,
}

impl Irrep {
    fn dim(&self) -> usize {
        match self {
            Irrep::Matrices { images } => images.first().map_or(1, |m| m.nrows()),
            _ => 1,
        }
    }
}

pub const DEFAULT_TORUS_NODES: usize = 64;

/// Nodes, weights and `κ_ii` values of the Haar quadrature.
fn haar_nodes(group: &CompactSubgroup, irrep: &Irrep, index: usize, m: usize, degree: usize) -> Result<Vec<(CMat, f64, C64)>> {
    match group {
        CompactSubgroup::Torus { frame, charges, nodes } => {
            if charges.len() != m {
                return Err(Error::DimensionMismatch(format!("charges need {m} rows")));
            }
            let d = charges.first().map_or(0, |r| r.len());
            if charges.iter().any(|r| r.len() != d) {
                return Err(Error::DimensionMismatch("ragged charge table".into()));
            }
            let weights = match irrep {
                Irrep::Character { weights } if weights.len() == d => weights.clone(),
                Irrep::Trivial => vec![0; d],
                _ => return Err(Error::Unsupported("torus irreps are characters of matching rank".into())),
            };
            if index != 0 {
                return Err(Error::DimensionMismatch("characters have a single index".into()));
            }
            let w = frame.clone().unwrap_or_else(|| eye(m));
            require_unitary(&w)?;
            let max_charge = charges.iter().flatten().fold(0, |a, &v| a.max(v.unsigned_abs()));
            let max_weight = weights.iter().fold(0, |a, &v| a.max(v.unsigned_abs()));
            let need = 2 * degree as u64 * max_charge + max_weight + 1;
            let n = nodes.unwrap_or(DEFAULT_TORUS_NODES).max(need as usize);
            if (n as f64).powi(d as i32) > 1e6 {
                return Err(Error::Guard(format!("{n}^{d} quadrature nodes")));
            }
            let total = n.pow(d as u32);
            let mut out = Vec::with_capacity(total);
            for flat in 0..total {
                let mut rest = flat;
                let theta: Vec<f64> = (0..d)
                    .map(|_| {
                        let k = rest % n;
                        rest /= n;
                        2.0 * std::f64::consts::PI * k as f64 / n as f64
                    })
                    .collect();
                let phase = |row: &[i64]| -> C64 {
                    let a: f64 = row.iter().zip(&theta).map(|(&q, t)| q as f64 * t).sum();
                    c(0.0, a).exp()
                };
                let diag = CMat::from_diagonal(&CVec::from_iterator(m, charges.iter().map(|r| phase(r))));
                out.push((&w * diag * w.adjoint(), 1.0 / total as f64, phase(&weights)));
            }
            Ok(out)
        }
        CompactSubgroup::Finite { elements } => {
            if elements.is_empty() {
                return Err(Error::Unsupported("empty finite group".into()));
            }
            let values: Vec<C64> = match irrep {
                Irrep::Trivial => vec![c(1.0, 0.0); elements.len()],
                Irrep::Matrices { images } if images.len() == elements.len() => {
                    if index >= irrep.dim() {
                        return Err(Error::DimensionMismatch(format!("index {index} ≥ dim")));
                    }
                    images.iter().map(|k| k[(index, index)]).collect()
                }
                _ => return Err(Error::Unsupported("finite irreps need one matrix per element".into())),
            };
            let w = 1.0 / elements.len() as f64;
            elements
                .iter()
                .zip(values)
                .map(|(u, v)| {
                    if u.shape() != (m, m) {
                        return Err(Error::DimensionMismatch(format!("group elements must be {m}x{m}")));
                    }
                    Ok((u.clone(), w, v))
                })
                .collect()
        }
    }
}

/// `P = dim κ · ∫ conj(κ_ii(u)) τ(u) du` on the basis.
pub fn projection_operator(
    group: &CompactSubgroup,
    irrep: &Irrep,
    index: usize,
    basis: &Basis,
    m: usize,
) -> Result<OperatorMatrix> {
    let nodes = haar_nodes(group, irrep, index, m, basis.degree())?;
    let n = basis.len();
    let mut p = CMat::zeros(n, n);
    for (u, w, kii) in nodes {
        let t = tau_operator(&u, basis)?;
        p += t.matrix * (kii.conj() * w);
    }
    p *= c(irrep.dim() as f64, 0.0);
    Ok(OperatorMatrix { matrix: p, basis: basis.descriptor() })
}

/// Function-level version of [`projection_operator`] for a finite group.
pub fn projection_fn(group: &CompactSubgroup, irrep: &Irrep, index: usize, m: usize, k: usize) -> Result<FnOp> {
    let nodes = haar_nodes(group, irrep, index, m, 0)?;
    let dim = irrep.dim() as f64;
    let mut op: Option<FnOp> = None;
    for (u, w, kii) in nodes {
        let term = tau_fn(&u, k)?.scale(kii.conj() * w * dim);
        op = Some(match op {
            None => term,
            Some(o) => o.sum(&term),
        });
    }
    op.ok_or_else(|| Error::Unsupported("empty quadrature".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub certificate: Certificate,
    pub rank: usize,
    pub idempotence: f64,
    pub hermiticity: f64,
    pub invariance: f64,
}

pub const PROJECTION_TOL: f64 = 1e-6;

/// Idempotence, self-adjointness and `Π(g)`-invariance of a projection.
pub fn projection_check(
    params: &GaussRepParams,
    projection: &OperatorMatrix,
    samples: &[RepGenerator],
    basis: &Basis,
) -> Result<ProjectionReport> {
    let p = &projection.matrix;
    let idem = op_norm(&(p * p - p));
    let herm = op_norm(&(p - p.adjoint()));
    let mut inv: f64 = 0.0;
    for g in samples {
        let pi = super::rep_operator(params, g, basis)?.matrix;
        inv = inv.max(op_norm(&(p * &pi - &pi * p)));
    }
    let rank = p.trace().re.round().max(0.0) as usize;
    let inputs = json!({
        "params": params.describe(),
        "projection": matrix_json(p),
        "samples": samples.len(),
    });
    let parts = [
        Certificate::new("idempotence", &inputs, idem, PROJECTION_TOL),
        Certificate::new("self-adjointness", &inputs, herm, PROJECTION_TOL),
        Certificate::new("invariance", &inputs, inv, PROJECTION_TOL),
    ];
    let certificate = Certificate::combine("isotypic projection", &inputs, &parts, PROJECTION_TOL)
        .with_note(format!("trace {:.6}", p.trace().re))
        .with_note(format!("max entry {:.3e}", max_abs(p)));
    Ok(ProjectionReport { certificate, rank, idempotence: idem, hermiticity: herm, invariance: inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussint::Measure;

    fn phase(t: f64) -> CMat {
        CMat::from_element(1, 1, c(0.0, t).exp())
    }

    #[test]
    fn tau_phase_on_monomials() {
        let basis = Basis::new(1, 3, Measure::Nu).unwrap();
        let th = 0.7;
        let t = tau_operator(&phase(th), &basis).unwrap();
        for (i, ix) in basis.indices().iter().enumerate() {
            let want = c(0.0, th * (ix.anti[0] as f64 - ix.holo[0] as f64)).exp();
            assert!((t.matrix[(i, i)] - want).norm() < 1e-13);
        }
        assert!(max_abs_diff(&t.matrix, &CMat::from_diagonal(&t.matrix.diagonal())) < 1e-13);
    }

    #[test]
    fn tau_matrix_matches_galerkin() {
        let u = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let basis = Basis::new(2, 2, Measure::Nu).unwrap();
        let exact = tau_operator(&u, &basis).unwrap();
        let gal = super::super::galerkin(&tau_fn(&u, 1).unwrap(), &basis).unwrap();
        assert!(max_abs_diff(&exact.matrix, &gal.matrix) < 1e-12);
        assert!(unitarity_residual(&exact.matrix) < 1e-12);
    }

    #[test]
    fn circle_projection_rank_two() {
        let basis = Basis::new(1, 2, Measure::Nu).unwrap();
        let g = CompactSubgroup::Torus { frame: None, charges: vec![vec![1]], nodes: None };
        let p = projection_operator(&g, &Irrep::Trivial, 0, &basis, 1).unwrap();
        assert!((p.matrix.trace() - 2.0).norm() < 1e-12);
        assert!(op_norm(&(&p.matrix * &p.matrix - &p.matrix)) < 1e-12);
    }

    #[test]
    fn trivial_group_gives_identity() {
        let basis = Basis::new(1, 2, Measure::Nu).unwrap();
        let g = CompactSubgroup::Finite { elements: vec![eye(1)] };
        let p = projection_operator(&g, &Irrep::Trivial, 0, &basis, 1).unwrap();
        assert!(max_abs_diff(&p.matrix, &eye(basis.len())) < 1e-13);
    }

    #[test]
    fn swap_breaks_commutant() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let p = GaussRepParams::gl(a, 0.0, 1, 2);
        let basis = p.basis().unwrap();
        let swap = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let g = RepGenerator::Block(CMat::from_element(1, 1, c(1.5, 0.0)));
        let r = commutant_check(&p, &swap, std::slice::from_ref(&g), &basis).unwrap();
        assert!(!r.certificate.passed());
        assert!(r.commutator >= 1e-3, "{}", r.commutator);
        let id = commutant_check(&p, &eye(2), &[g], &basis).unwrap();
        assert!(id.certificate.passed() && id.certificate.residual < 1e-12);
    }

    #[test]
    fn phase_commutes_scalar() {
        let p = GaussRepParams::gl(CMat::from_element(1, 1, c(0.8, 0.0)), 0.3, 2, 2);
        let basis = p.basis().unwrap();
        let g = RepGenerator::Block(CMat::from_row_slice(2, 2, &[c(1.2, 0.3), c(0.2, 0.0), c(0.0, -0.4), c(0.7, 0.0)]));
        let r = commutant_check(&p, &phase(1.1), &[g], &basis).unwrap();
        assert!(r.certificate.passed(), "{:?}", r.certificate);
    }
}

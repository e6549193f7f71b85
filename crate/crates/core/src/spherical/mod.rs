//! Spherical functions of the Gaussian representations: closed form,
//! vacuum oracle, positive-definiteness and asymptotic estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::gaussint::{GaussPoly, Measure};
use crate::gaussrep::{alpha_factor, GaussRepParams};
use crate::groups::{aa_sequence_check_with, default_sequence, sample_subgroup, AaSequence, GroupElement, GroupKind};
use crate::linalg::{c, det, eigh, eye, inverse, matrix_json, CMat, C64};
use crate::matrixfn::require_hermitian;
use crate::sampling::random_unitary;

pub const INVERSE_NOTE: &str =
    "the Kronecker determinant enters with power -1, which keeps |phi| <= 1 and matches the vacuum integral";

pub const PSD_TOL: f64 = 1e-8;
pub const BI_INVARIANCE_TOL: f64 = 1e-10;
pub const STABLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SphericalParams {
    pub rank: usize,
    pub beta: f64,
    pub a: CMat,
}

impl SphericalParams {
    pub fn new(a: CMat, beta: f64) -> Result<Self> {
        require_hermitian(&a)?;
        if a.nrows() == 0 {
            return Err(Error::DimensionMismatch("rank must be positive".into()));
        }
        Ok(Self { rank: a.nrows(), beta, a })
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({"rank": self.rank, "beta": self.beta, "A": matrix_json(&self.a)})
    }
}

fn window_matrix(g: &GroupElement<C64>) -> Result<CMat> {
    if g.kind() != GroupKind::GL {
        return Err(Error::Unsupported("spherical functions are defined on GL".into()));
    }
    Ok(g.matrix().to_cmat())
}

/// `φ` on a plain invertible matrix (identity outside it).
pub fn spherical_of_matrix(params: &SphericalParams, g: &CMat) -> Result<C64> {
    if inverse(g).is_none() {
        return Err(Error::Singular("g".into()));
    }
    let (vals, _) = eigh(&(g.adjoint() * g));
    let r = params.rank;
    let mut out = c(0.0, params.beta * det(g).norm().ln()).exp();
    for s2 in vals {
        if s2 <= 0.0 {
            return Err(Error::Singular("g".into()));
        }
        let mu = 0.5 * s2.ln();
        if mu == 0.0 {
            continue;
        }
        let block = eye(r) * c(mu.cosh(), 0.0) - &params.a * c(0.0, 2.0 * mu.sinh());
        out /= det(&block);
    }
    Ok(out)
}

/// `|det g|^{iβ} ∏_j det(cosh μ_j − 2i sinh μ_j A)⁻¹` over the eigenvalues
/// `μ_j` of `ln |g|`.
pub fn eval_spherical(params: &SphericalParams, g: &GroupElement<C64>) -> Result<C64> {
    spherical_of_matrix(params, &window_matrix(g)?)
}

/// `∫ |det g|^{m+iβ} α̂_A(λ, g) dν(λ)` for a `K×K` block.
pub fn vacuum_of_matrix(a: &CMat, beta: f64, g: &CMat) -> Result<C64> {
    let m = a.nrows();
    let k = g.nrows();
    if inverse(g).is_none() {
        return Err(Error::Singular("g".into()));
    }
    let ad = det(g).norm();
    let pref = c(ad.powi(m as i32), 0.0) * c(0.0, beta * ad.ln()).exp();
    let f = alpha_factor(a, g).mul(&GaussPoly::one(m * k));
    Ok(pref * f.integrate(Measure::Nu)?)
}

/// `(Π_{A0}(g) 1, 1)` for `n = 0` parameters; `g` must fit in `K`.
pub fn vacuum_element(params: &GaussRepParams, g: &GroupElement<C64>) -> Result<C64> {
    params.validate()?;
    if params.n != 0 {
        return Err(Error::Unsupported("the vacuum element is defined for n = 0".into()));
    }
    let w = g.window();
    if w > params.k {
        return Err(Error::WindowTooSmall(format!("window {w} exceeds K = {}", params.k)));
    }
    let full = window_matrix(&g.enlarge(params.k)?)?;
    vacuum_of_matrix(&params.a, params.beta, &full)
}

/// Indices where `g` differs from the identity (rows or columns).
fn active_support(g: &CMat) -> Vec<usize> {
    let n = g.nrows();
    (0..n)
        .filter(|&i| {
            (0..n).any(|j| {
                let id = if i == j { 1.0 } else { 0.0 };
                (g[(i, j)] - id).norm() > 0.0 || (g[(j, i)] - id).norm() > 0.0
            })
        })
        .collect()
}

fn restrict(g: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| g[(idx[i], idx[j])])
}


/// Gram matrix `[φ(g_i⁻¹ g_j)]` is positive semidefinite, and `φ` is
/// invariant under random unitary multiplication on both sides.
pub fn gram_psd_certify(params: &SphericalParams, samples: &[GroupElement<C64>], seed: u64) -> Result<Certificate> {
    let w = samples.iter().map(|g| g.window()).max().unwrap_or(1).max(1);
    let mats: Vec<CMat> = samples
        .iter()
        .map(|g| window_matrix(&g.enlarge(w)?))
        .collect::<Result<_>>()?;
    let invs: Vec<CMat> = mats
        .iter()
        .map(|g| inverse(g).ok_or_else(|| Error::Singular("sample".into())))
        .collect::<Result<_>>()?;
    let n = mats.len();
    let mut gram = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = spherical_of_matrix(params, &(&invs[i] * &mats[j]))?;
        }
    }
    let herm = crate::linalg::hermitian_residual(&gram);
    let (ev, _) = eigh(&gram);
    let min_eig = ev.first().copied().unwrap_or(0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bi: f64 = 0.0;
    for g in &mats {
        let (u, v) = (random_unitary(&mut rng, w), random_unitary(&mut rng, w));
        let lhs = spherical_of_matrix(params, &(&u * g * &v))?;
        bi = bi.max((lhs - spherical_of_matrix(params, g)?).norm());
    }
    let inputs = json!({
        "params": params.describe(),
        "samples": mats.iter().map(matrix_json).collect::<Vec<_>>(),
        "seed": seed,
    });
    let psd = Certificate::new("Gram positive semidefinite", &inputs, (-min_eig).max(0.0), PSD_TOL)
        .with_note(format!("minimum eigenvalue {min_eig:.6e}"));
    let hermitian = Certificate::new("Gram Hermitian", &inputs, herm, PSD_TOL);
    let bi_cert = Certificate::new("bi-invariance", &inputs, bi, BI_INVARIANCE_TOL);
    Ok(Certificate::combine("spherical positive definiteness", &inputs, &[psd, hermitian, bi_cert], PSD_TOL)
        .with_note(INVERSE_NOTE))
}

#[derive(Clone, Debug, Serialize)]
pub struct AsfReport {
    pub values: Vec<C64>,
    pub stabilization_index: Option<usize>,
    pub limit: C64,
    pub oracle: C64,
    pub certificate: Certificate,
}

/// `(Π(u_l g u_l*) 1, 1)` along a shift sequence. Without `shifts`, block
/// 3-cycles moving the window of `g` to ever farther blocks are used;
/// explicit sequences must pass the asymptotic-abelian check.
pub fn asf_estimate(
    params: &GaussRepParams,
    g: &GroupElement<C64>,
    shifts: Option<&AaSequence>,
    count: usize,
) -> Result<AsfReport> {
    params.validate()?;
    if params.n != 0 {
        return Err(Error::Unsupported("asymptotic estimates use n = 0".into()));
    }
    let w = g.window().max(1);
    let seq = match shifts {
        Some(s) => {
            let sw = s.elements.iter().map(|u| u.window()).max().unwrap_or(0);
            if sw < w {
                return Err(Error::WindowTooSmall(format!("shift window {sw} < window of g {w}")));
            }
            let samples = sample_subgroup(GroupKind::GL, w, sw, 4, 0xa5f)?;
            let rep = aa_sequence_check_with(GroupKind::GL, w, &samples, s)?;
            if !rep.certificate.passed() {
                return Err(Error::Unsupported("shift sequence is not asymptotically abelian".into()));
            }
            s.clone()
        }
        None => default_sequence(GroupKind::GL, w, w, count.max(2))?,
    };
    let mut values = Vec::with_capacity(seq.elements.len());
    for u in &seq.elements {
        let uf = u.to_float();
        let big = uf.window().max(w);
        let um = uf.enlarge(big)?.matrix().to_cmat();
        let gm = window_matrix(&g.enlarge(big)?)?;
        let conj = &um * gm * um.adjoint();
        let support = active_support(&conj);
        let v = if support.is_empty() {
            c(1.0, 0.0)
        } else {
            vacuum_of_matrix(&params.a, params.beta, &restrict(&conj, &support))?
        };
        values.push(v);
    }
    let limit = *values.last().unwrap();
    let mut stab = None;
    for i in (0..values.len()).rev() {
        if (values[i] - limit).norm() <= STABLE_TOL {
            stab = Some(i);
        } else {
            break;
        }
    }
    let gm = window_matrix(g)?;
    let support = active_support(&gm);
    let oracle = if support.is_empty() {
        c(1.0, 0.0)
    } else {
        vacuum_of_matrix(&params.a, params.beta, &restrict(&gm, &support))?
    };
    let inputs = json!({"params": params.describe(), "g": matrix_json(&gm), "count": values.len()});
    let certificate = Certificate::new("asymptotic spherical function", &inputs, (limit - oracle).norm(), 1e-12)
        .with_note(format!("stabilized from index {stab:?}"));
    Ok(AsfReport { values, stabilization_index: stab, limit, oracle, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Mat;

    fn gl(m: CMat) -> GroupElement<C64> {
        GroupElement::from_matrix(GroupKind::GL, m.nrows(), Mat::from_cmat(&m)).unwrap()
    }

    fn diag(v: &[f64]) -> CMat {
        CMat::from_fn(v.len(), v.len(), |i, j| if i == j { c(v[i], 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn scalar_examples() {
        let p = SphericalParams::new(CMat::zeros(1, 1), 0.0).unwrap();
        assert!((eval_spherical(&p, &gl(diag(&[2.0, 1.0]))).unwrap() - 0.8).norm() < 1e-14);
        assert!((eval_spherical(&p, &gl(eye(3))).unwrap() - 1.0).norm() < 1e-15);
        let rp = GaussRepParams::gl(CMat::zeros(1, 1), 0.0, 1, 0);
        assert!((vacuum_element(&rp, &gl(diag(&[3.0]))).unwrap() - 0.6).norm() < 1e-14);
        assert!((vacuum_element(&rp, &gl(diag(&[2.0]))).unwrap() - 0.8).norm() < 1e-14);
    }

    #[test]
    fn oracle_agreement_rank_two() {
        let a = CMat::from_row_slice(2, 2, &[c(0.4, 0.0), c(0.1, -0.3), c(0.1, 0.3), c(-0.2, 0.0)]);
        let g = CMat::from_row_slice(2, 2, &[c(1.3, 0.2), c(0.4, 0.0), c(-0.1, 0.5), c(0.8, 0.0)]);
        let sp = SphericalParams::new(a.clone(), 0.7).unwrap();
        let rp = GaussRepParams::gl(a, 0.7, 2, 0);
        let lhs = eval_spherical(&sp, &gl(g.clone())).unwrap();
        let rhs = vacuum_element(&rp, &gl(g)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12, "{lhs} {rhs}");
    }

    #[test]
    fn vacuum_independent_of_truncation() {
        let a = CMat::from_element(1, 1, c(0.3, 0.0));
        let g = gl(CMat::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.2, 0.1), c(0.0, 0.0), c(0.9, 0.0)]));
        let v2 = vacuum_element(&GaussRepParams::gl(a.clone(), 0.2, 2, 0), &g).unwrap();
        let v4 = vacuum_element(&GaussRepParams::gl(a, 0.2, 4, 0), &g).unwrap();
        assert!((v2 - v4).norm() < 1e-13);
    }

    #[test]
    fn two_sample_gram() {
        let p = SphericalParams::new(CMat::zeros(1, 1), 0.0).unwrap();
        let cert = gram_psd_certify(&p, &[gl(eye(1)), gl(diag(&[2.0]))], 1).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert!(cert.notes.iter().any(|n| n.contains("2.0000")), "{:?}", cert.notes);
    }

    #[test]
    fn asf_stabilizes() {
        let rp = GaussRepParams::gl(CMat::zeros(1, 1), 0.0, 1, 0);
        let r = asf_estimate(&rp, &gl(diag(&[2.0])), None, 4).unwrap();
        assert_eq!(r.stabilization_index, Some(0));
        assert!((r.limit - 0.8).norm() < 1e-14);
        assert!(r.certificate.passed());
        let id = asf_estimate(&rp, &gl(eye(1)), None, 3).unwrap();
        assert!(id.values.iter().all(|v| (v - 1.0).norm() < 1e-15));
    }
}

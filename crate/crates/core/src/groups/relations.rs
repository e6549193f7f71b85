use serde_json::json;

use super::generators::{generator_matrix, sharp};
use super::{GeneratorSpec, GroupElement, GroupKind, Mat, Scalar};
use crate::certificate::Certificate;
use crate::error::{Error, Result};

/// Parameters for the commutation relations of the generator families.
///
/// `x`, `y` (and the optional second pair) are `M×n`, `b` is `M×M` and `g`
/// is an invertible `M×M` matrix (a GL window element). `b` is replaced by
/// its admissible part `b + bᵗ` (Sp) or `b − bᵗ` (O) before use.
#[derive(Clone, Debug)]
pub struct RelationInputs<S> {
    pub x: Mat<S>,
    pub y: Mat<S>,
    pub b: Mat<S>,
    pub g: GroupElement<S>,
    /// Second `θ` for the product relation; defaults to `(y, x)`.
    pub second: Option<(Mat<S>, Mat<S>)>,
}

impl<S: Scalar> RelationInputs<S> {
    pub fn new(x: Mat<S>, y: Mat<S>, b: Mat<S>, g: GroupElement<S>) -> Self {
        Self { x, y, b, g, second: None }
    }
}

/// Exact (for rational inputs) certificate of the four conjugation and
/// product relations between `γ_o`, `γ_u`, `θ`, `δ` and the diagonal
/// embedding at level `n`, together with the transpose symmetry of `γ_o`
/// and `γ_u` at levels 0 and `n`. The residual is the largest entrywise
/// difference between the two sides of any relation.
pub fn verify_relations<S: Scalar>(
    inp: &RelationInputs<S>,
    n: usize,
    kind: GroupKind,
) -> Result<Certificate> {
    if !kind.is_symmetric_type() {
        return Err(Error::Unsupported("relations are stated for Sp and O".into()));
    }
    let m = inp.x.rows();
    let shape_ok = |a: &Mat<S>, r: usize, c: usize| a.rows() == r && a.cols() == c;
    if !shape_ok(&inp.x, m, n) || !shape_ok(&inp.y, m, n) || !shape_ok(&inp.b, m, m) {
        return Err(Error::DimensionMismatch(format!(
            "need x, y of shape {m}x{n} and b of shape {m}x{m}"
        )));
    }
    if m == 0 {
        return Err(Error::DimensionMismatch("parameters must have at least one row".into()));
    }
    if inp.g.kind() != GroupKind::GL || inp.g.window() > m {
        return Err(Error::DimensionMismatch(format!(
            "g must be a GL element with window at most {m}"
        )));
    }
    let g = inp.g.enlarge(m)?.matrix().clone();
    let (x2, y2) = inp.second.clone().unwrap_or_else(|| (inp.y.clone(), inp.x.clone()));
    if !shape_ok(&x2, m, n) || !shape_ok(&y2, m, n) {
        return Err(Error::DimensionMismatch("second θ pair has the wrong shape".into()));
    }
    let window = m + n;
    let b = match kind {
        GroupKind::Sp => inp.b.add(&inp.b.transpose()),
        _ => inp.b.sub(&inp.b.transpose()),
    };
    let build = |spec: GeneratorSpec<S>| generator_matrix(&spec, kind, window);
    let theta = |x: &Mat<S>, y: &Mat<S>| {
        build(GeneratorSpec::Theta { x: x.clone(), y: y.clone(), level: n })
    };
    let delta = |a: Mat<S>| build(GeneratorSpec::Delta { a, level: n });
    let zero = Mat::<S>::zeros(m, n);

    let t = theta(&inp.x, &inp.y)?;
    let mut parts = Vec::new();
    let inputs = json!({
        "kind": kind.name(),
        "level": n,
        "x": inp.x.describe(),
        "y": inp.y.describe(),
        "b": inp.b.describe(),
        "g": inp.g.matrix().describe(),
        "x2": x2.describe(),
        "y2": y2.describe(),
    });

    // γ_o(b) θ γ_o(−b) = δ(−(bx)♯ x) θ(0, bx) θ
    {
        let go = build(GeneratorSpec::GammaO { b: b.clone(), level: n })?;
        let go_inv = build(GeneratorSpec::GammaO { b: b.neg(), level: n })?;
        let bx = b.mul(&inp.x);
        let lhs = go.mul(&t).mul(&go_inv);
        let rhs = delta(sharp(&bx, kind).mul(&inp.x).neg())?
            .mul(&theta(&zero, &bx)?)
            .mul(&t);
        parts.push(Certificate::new("gamma_o conjugation", &inputs, lhs.max_diff(&rhs), 0.0));
    }
    // γ_u(b) θ γ_u(−b) = δ((by)ᵗ y) θ(by, 0) θ
    {
        let gu = build(GeneratorSpec::GammaU { b: b.clone(), level: n })?;
        let gu_inv = build(GeneratorSpec::GammaU { b: b.neg(), level: n })?;
        let by = b.mul(&inp.y);
        let lhs = gu.mul(&t).mul(&gu_inv);
        let rhs = delta(by.transpose().mul(&inp.y))?
            .mul(&theta(&by, &zero)?)
            .mul(&t);
        parts.push(Certificate::new("gamma_u conjugation", &inputs, lhs.max_diff(&rhs), 0.0));
    }
    // θ₁ θ₂ = δ(x₂ᵗy₁ − y₂♯x₁ − x₁ᵗy₂ + y₁♯x₂) θ₂ θ₁
    {
        let t2 = theta(&x2, &y2)?;
        let (x1, y1) = (&inp.x, &inp.y);
        let a = x2
            .transpose()
            .mul(y1)
            .sub(&sharp(&y2, kind).mul(x1))
            .sub(&x1.transpose().mul(&y2))
            .add(&sharp(y1, kind).mul(&x2));
        let lhs = t.mul(&t2);
        let rhs = delta(a)?.mul(&t2).mul(&t);
        parts.push(Certificate::new("theta product", &inputs, lhs.max_diff(&rhs), 0.0));
    }
    // g_n θ(x, y) g_n⁻¹ = θ(gx, (gᵗ)⁻¹ y)
    {
        let gi = g.inverse().ok_or_else(|| Error::Singular("g".into()))?;
        let gi_t = gi.transpose();
        let gn = build(GeneratorSpec::DiagEmbed { g: g.clone(), level: n })?;
        let gn_inv = build(GeneratorSpec::DiagEmbed { g: gi, level: n })?;
        if S::exact() && gn.mul(&gn_inv).max_diff(&Mat::identity(gn.rows())) != 0.0 {
            return Err(Error::Singular("g_n(g) g_n(g^-1) is not the identity".into()));
        }
        let lhs = gn.mul(&t).mul(&gn_inv);
        let rhs = theta(&g.mul(&inp.x), &gi_t.mul(&inp.y))?;
        parts.push(Certificate::new("diagonal conjugation", &inputs, lhs.max_diff(&rhs), 0.0));
    }
    // γ(b) = γ(b♭) with b♭ = bᵗ (Sp) or −bᵗ (O), at level 0 and level n.
    {
        let flat = sharp(&b, kind);
        let mut r: f64 = 0.0;
        for level in [0, n] {
            let w = m + level;
            let pad = |a: &Mat<S>| {
                Mat::from_fn(w, w, |i, j| {
                    if i < m && j < m {
                        a.get(i, j).clone()
                    } else {
                        S::zero()
                    }
                })
            };
            for upper in [true, false] {
                let mk = |a: Mat<S>| {
                    let spec = if upper {
                        GeneratorSpec::GammaO { b: a, level }
                    } else {
                        GeneratorSpec::GammaU { b: a, level }
                    };
                    generator_matrix(&spec, kind, w)
                };
                let lhs = mk(pad(&b).clone())?;
                let rhs = mk(pad(&flat))?;
                r = r.max(lhs.max_diff(&rhs));
                let el = GroupElement::from_matrix(kind, w, lhs)?;
                r = r.max(el.membership_residual()?);
            }
        }
        parts.push(
            Certificate::new("gamma transpose symmetry", &inputs, r, 0.0)
                .with_note("b replaced by its admissible part before use"),
        );
    }
    let tol = if S::exact() { 0.0 } else { super::MEMBER_TOL };
    let parts: Vec<_> = parts.into_iter().map(|c| c.with_tolerance(tol)).collect();
    Ok(Certificate::combine("generator relations", &inputs, &parts, tol))
}

#[cfg(test)]
mod tests {
    use super::super::{cq, CQ};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat<CQ> {
        Mat::from_fn(r, c, |_, _| cq(rng.gen_range(-3..=3), 1))
    }

    fn rand_unimodular(rng: &mut ChaCha8Rng, m: usize) -> Mat<CQ> {
        let l = Mat::from_fn(m, m, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => cq(1, 1),
            std::cmp::Ordering::Greater => cq(rng.gen_range(-3..=3), 1),
            _ => cq(0, 1),
        });
        l.mul(&l.transpose())
    }

    #[test]
    fn zero_parameters_pass() {
        for kind in [GroupKind::Sp, GroupKind::O] {
            let z = Mat::<CQ>::zeros(3, 2);
            let inp = RelationInputs::new(
                z.clone(),
                z,
                Mat::zeros(3, 3),
                GroupElement::identity(GroupKind::GL, 3),
            );
            let c = verify_relations(&inp, 2, kind).unwrap();
            assert!(c.passed());
            assert_eq!(c.residual, 0.0);
        }
    }

    #[test]
    fn random_integer_parameters_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [GroupKind::Sp, GroupKind::O] {
            for _ in 0..3 {
                let (m, n) = (6, 2);
                let g = GroupElement::from_matrix(GroupKind::GL, m, rand_unimodular(&mut rng, m))
                    .unwrap();
                let mut inp = RelationInputs::new(
                    rand_mat(&mut rng, m, n),
                    rand_mat(&mut rng, m, n),
                    rand_mat(&mut rng, m, m),
                    g,
                );
                inp.second = Some((rand_mat(&mut rng, m, n), rand_mat(&mut rng, m, n)));
                let c = verify_relations(&inp, n, kind).unwrap();
                assert!(c.passed(), "{c:?}");
                assert_eq!(c.residual, 0.0);
            }
        }
    }

    #[test]
    fn scalar_two_conjugation() {
        let m = 3;
        let g = GroupElement::from_matrix(GroupKind::GL, m, Mat::<CQ>::identity(m).scale(&cq(2, 1)))
            .unwrap();
        let x = Mat::from_i64(m, 1, &[1, -2, 3]);
        let y = Mat::from_i64(m, 1, &[0, 1, 1]);
        let c = verify_relations(&RelationInputs::new(x, y, Mat::zeros(m, m), g), 1, GroupKind::Sp)
            .unwrap();
        assert!(c.passed());
    }

    #[test]
    fn shape_mismatch_errors() {
        let inp = RelationInputs::new(
            Mat::<CQ>::zeros(3, 2),
            Mat::zeros(3, 1),
            Mat::zeros(3, 3),
            GroupElement::identity(GroupKind::GL, 3),
        );
        assert!(matches!(
            verify_relations(&inp, 2, GroupKind::Sp),
            Err(Error::DimensionMismatch(_))
        ));
    }
}

use super::{pos, GroupElement, GroupKind, Mat, Scalar};
use crate::error::{Error, Result};

/// A generator family member with its parameters.
///
/// Parameter shapes, with `M = N − level` for a window of half-width `N`:
/// `b` is `M×M`, `x` and `y` are `M×level`, `a` is `level×level`, and the
/// embedded `g` is at most `M×M` (padded with the identity).
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec<S> {
    /// GL: `diag(I_n, g)`. Sp/O: `diag((g⁻¹)′, I_n, I_n, g)`.
    DiagEmbed { g: Mat<S>, level: usize },
    /// GL only: `[[I_n, 0], [h, I]]` with `h` of shape `M×n`.
    LowerUnipotent { h: Mat<S>, level: usize },
    GammaO { b: Mat<S>, level: usize },
    GammaU { b: Mat<S>, level: usize },
    Theta { x: Mat<S>, y: Mat<S>, level: usize },
    Delta { a: Mat<S>, level: usize },
}

impl<S: Scalar> GeneratorSpec<S> {
    pub fn level(&self) -> usize {
        match self {
            GeneratorSpec::DiagEmbed { level, .. }
            | GeneratorSpec::LowerUnipotent { level, .. }
            | GeneratorSpec::GammaO { level, .. }
            | GeneratorSpec::GammaU { level, .. }
            | GeneratorSpec::Theta { level, .. }
            | GeneratorSpec::Delta { level, .. } => *level,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            GeneratorSpec::DiagEmbed { .. } => "diag-embed",
            GeneratorSpec::LowerUnipotent { .. } => "lower-unipotent",
            GeneratorSpec::GammaO { .. } => "gamma_o",
            GeneratorSpec::GammaU { .. } => "gamma_u",
            GeneratorSpec::Theta { .. } => "theta",
            GeneratorSpec::Delta { .. } => "delta",
        }
    }
}

/// `(g′)_{ik} = g_{−k,−i}` for `g` indexed by `1..M`. The result is indexed
/// by `−M..−1`, stored in ascending order.
pub fn paper_prime_transpose<S: Scalar>(g: &Mat<S>) -> Mat<S> {
    let m = g.rows();
    assert_eq!(m, g.cols(), "prime transpose needs a square matrix");
    Mat::from_fn(m, m, |p, q| g.get(m - 1 - q, m - 1 - p).clone())
}

/// Resize to `rows×cols`, failing if a dropped entry is nonzero.
fn fit<S: Scalar>(m: &Mat<S>, rows: usize, cols: usize, what: &str) -> Result<Mat<S>> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if (i >= rows || j >= cols) && !m.get(i, j).is_zero() {
                return Err(Error::WindowTooSmall(format!(
                    "{what} has a nonzero entry at ({}, {}) outside the {rows}x{cols} block",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(Mat::from_fn(rows, cols, |i, j| {
        if i < m.rows() && j < m.cols() {
            m.get(i, j).clone()
        } else {
            S::zero()
        }
    }))
}

/// Resize a square block to `m×m`, padding with the identity and failing if
/// a dropped part differs from the identity.
fn fit_block<S: Scalar>(g: &Mat<S>, m: usize) -> Result<Mat<S>> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("embedded block must be square".into()));
    }
    for i in m..g.rows() {
        for j in 0..g.cols() {
            let id = if i == j { S::one() } else { S::zero() };
            if g.get(i, j) != &id || g.get(j, i) != &id {
                return Err(Error::WindowTooSmall(format!(
                    "embedded block of size {} does not fit in {m}",
                    g.rows()
                )));
            }
        }
    }
    Ok(Mat::from_fn(m, m, |i, j| {
        if i < g.rows() && j < g.cols() {
            g.get(i, j).clone()
        } else if i == j {
            S::one()
        } else {
            S::zero()
        }
    }))
}

/// Sp wants `a = aᵗ`, O wants `a = −aᵗ`.
fn check_symmetry<S: Scalar>(a: &Mat<S>, kind: GroupKind, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{what} must be square")));
    }
    let target = match kind {
        GroupKind::Sp => a.transpose(),
        _ => a.transpose().neg(),
    };
    let r = a.max_diff(&target);
    let ok = if S::exact() { r == 0.0 } else { r <= super::MEMBER_TOL };
    if ok {
        Ok(())
    } else {
        let shape = if kind == GroupKind::Sp { "symmetric" } else { "antisymmetric" };
        Err(Error::SymmetryViolated(format!(
            "{what} must be {shape} for {} (residual {r:.3e})",
            kind.name()
        )))
    }
}

/// `y♯ = yᵗ` for Sp and `−yᵗ` for O.
pub(crate) fn sharp<S: Scalar>(y: &Mat<S>, kind: GroupKind) -> Mat<S> {
    match kind {
        GroupKind::O => y.transpose().neg(),
        _ => y.transpose(),
    }
}

/// Matrix of a generator straight from the index tables, without any
/// parameter-symmetry or membership checks.
pub(crate) fn generator_matrix<S: Scalar>(
    spec: &GeneratorSpec<S>,
    kind: GroupKind,
    window: usize,
) -> Result<Mat<S>> {
    let n = spec.level();
    if window == 0 {
        return Err(Error::WindowTooSmall("window half-width must be positive".into()));
    }
    if n > window {
        return Err(Error::WindowTooSmall(format!("level {n} exceeds window {window}")));
    }
    let big_n = window as i64;
    let ni = n as i64;
    let m = window - n;
    let d = kind.dim(window);
    let mut out = Mat::identity(d);
    let p = |i: i64| pos(kind, window, i);

    match (kind, spec) {
        (GroupKind::GL, GeneratorSpec::DiagEmbed { g, .. }) => {
            let g = fit_block(g, m)?;
            for i in 0..m {
                for k in 0..m {
                    out.set(n + i, n + k, g.get(i, k).clone());
                }
            }
        }
        (GroupKind::GL, GeneratorSpec::LowerUnipotent { h, .. }) => {
            let h = fit(h, m, n, "h")?;
            for i in 0..m {
                for k in 0..n {
                    out.set(n + i, k, h.get(i, k).clone());
                }
            }
        }
        (GroupKind::GL, other) => {
            return Err(Error::Unsupported(format!(
                "{} is not a GL generator",
                other.label()
            )))
        }
        (_, GeneratorSpec::LowerUnipotent { .. }) => {
            return Err(Error::Unsupported(
                "lower-unipotent generators are GL only".into(),
            ))
        }
        (_, GeneratorSpec::DiagEmbed { g, .. }) => {
            let g = fit_block(g, m)?;
            let gi = g
                .inverse()
                .ok_or_else(|| Error::Singular("embedded block".into()))?;
            let neg = paper_prime_transpose(&gi);
            // Negative block −N..−n−1 occupies storage 0..m; positive block
            // n+1..N occupies the top m positions.
            let off = d - m;
            for i in 0..m {
                for k in 0..m {
                    out.set(i, k, neg.get(i, k).clone());
                    out.set(off + i, off + k, g.get(i, k).clone());
                }
            }
        }
        (_, GeneratorSpec::GammaO { b, .. }) => {
            let b = fit(b, m, m, "b")?;
            for j in -big_n..-ni {
                for k in (ni + 1)..=big_n {
                    let v = b.get((-j - ni - 1) as usize, (k - ni - 1) as usize).clone();
                    out.add_at(p(j), p(k), v);
                }
            }
        }
        (_, GeneratorSpec::GammaU { b, .. }) => {
            let b = fit(b, m, m, "b")?;
            for j in (ni + 1)..=big_n {
                for k in -big_n..-ni {
                    let v = b.get((j - ni - 1) as usize, (-k - ni - 1) as usize).clone();
                    out.add_at(p(j), p(k), v);
                }
            }
        }
        (_, GeneratorSpec::Theta { x, y, .. }) => {
            let x = fit(x, m, n, "x")?;
            let y = fit(y, m, n, "y")?;
            let xt = x.transpose();
            let ys = sharp(&y, kind);
            for mm in 1..=ni {
                for i in (ni + 1)..=big_n {
                    let v = x.get((i - ni - 1) as usize, (mm - 1) as usize).clone();
                    out.add_at(p(i), p(mm), v);
                }
                for i in -big_n..-ni {
                    let v = y.get((-i - ni - 1) as usize, (mm - 1) as usize).clone();
                    out.add_at(p(i), p(mm), v);
                }
            }
            for i in -ni..=-1 {
                for mm in -big_n..-ni {
                    let v = xt.get((-i - 1) as usize, (-mm - ni - 1) as usize).clone();
                    out.add_at(p(i), p(mm), -v);
                }
                for mm in (ni + 1)..=big_n {
                    let v = ys.get((-i - 1) as usize, (mm - ni - 1) as usize).clone();
                    out.add_at(p(i), p(mm), v);
                }
            }
        }
        (_, GeneratorSpec::Delta { a, .. }) => {
            let a = fit(a, n, n, "a")?;
            for i in -ni..=-1 {
                for mm in 1..=ni {
                    let v = a.get((-i - 1) as usize, (mm - 1) as usize).clone();
                    out.add_at(p(i), p(mm), v);
                }
            }
        }
    }
    Ok(out)
}

/// Build a generator in a window of half-width `window`. Parameters that are
/// smaller than their block are zero-padded (identity-padded for embedded
/// `g`). The result is guaranteed to pass the membership test.
pub fn build_generator<S: Scalar>(
    spec: &GeneratorSpec<S>,
    kind: GroupKind,
    window: usize,
) -> Result<GroupElement<S>> {
    if kind.is_symmetric_type() {
        match spec {
            GeneratorSpec::Delta { a, .. } => check_symmetry(a, kind, "a")?,
            GeneratorSpec::GammaO { b, .. } | GeneratorSpec::GammaU { b, .. } => {
                check_symmetry(b, kind, "b")?
            }
            _ => {}
        }
    }
    let m = generator_matrix(spec, kind, window)?;
    let g = GroupElement::from_matrix(kind, window, m)?;
    if !g.is_member()? {
        return Err(Error::NotInGroup(format!(
            "{} with these parameters violates the {} relation (residual {:.3e})",
            spec.label(),
            kind.name(),
            g.membership_residual()?
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::super::{cq, CQ};
    use super::*;

    fn q(rows: usize, cols: usize, v: &[i64]) -> Mat<CQ> {
        Mat::from_i64(rows, cols, v)
    }

    #[test]
    fn zero_gamma_is_identity() {
        for kind in [GroupKind::Sp, GroupKind::O] {
            let spec = GeneratorSpec::GammaU { b: Mat::<CQ>::zeros(1, 1), level: 0 };
            let g = build_generator(&spec, kind, 3).unwrap();
            assert_eq!(g.matrix(), &Mat::identity(6));
        }
    }

    #[test]
    fn delta_table_by_hand() {
        // a = [[0,1],[-1,0]], level 2, O window 4: a_{(−i)m} lands at row −i,
        // column m, for i ∈ {−1,−2}, m ∈ {1,2}.
        let a = q(2, 2, &[0, 1, -1, 0]);
        let g = build_generator(&GeneratorSpec::Delta { a, level: 2 }, GroupKind::O, 4).unwrap();
        let mut expect = Mat::<CQ>::identity(8);
        let p = |i| pos(GroupKind::O, 4, i);
        expect.set(p(-1), p(2), cq(1, 1));
        expect.set(p(-2), p(1), cq(-1, 1));
        assert_eq!(g.matrix(), &expect);
    }

    #[test]
    fn theta_single_entry_by_hand() {
        // x = e_{(2,1)} in the M×1 parameter: entry at row i = 1 + 2 = 3,
        // column 1, and −(xᵗ)_{1,2} at row −1, column −(2+1) = −3.
        let x = q(3, 1, &[0, 1, 0]);
        let y = Mat::<CQ>::zeros(3, 1);
        let g = build_generator(&GeneratorSpec::Theta { x, y, level: 1 }, GroupKind::Sp, 4)
            .unwrap();
        let p = |i| pos(GroupKind::Sp, 4, i);
        let mut expect = Mat::<CQ>::identity(8);
        expect.set(p(3), p(1), cq(1, 1));
        expect.set(p(-1), p(-3), cq(-1, 1));
        assert_eq!(g.matrix(), &expect);
    }

    #[test]
    fn diag_embed_scalar_is_member() {
        let g = build_generator(
            &GeneratorSpec::DiagEmbed { g: q(1, 1, &[2]), level: 0 },
            GroupKind::Sp,
            2,
        )
        .unwrap();
        let p = |i| pos(GroupKind::Sp, 2, i);
        assert_eq!(g.matrix().get(p(1), p(1)), &cq(2, 1));
        assert_eq!(g.matrix().get(p(-1), p(-1)), &cq(1, 2));
    }

    #[test]
    fn prime_transpose_is_anti_transpose() {
        let g = q(2, 2, &[1, 2, 3, 4]);
        // indices −2, −1: (g′)_{−2,−1} = g_{1,2} = 2.
        let gp = paper_prime_transpose(&g);
        assert_eq!(gp.get(0, 1), &cq(2, 1));
        assert_eq!(gp.get(1, 0), &cq(3, 1));
        assert_eq!(gp.get(0, 0), &cq(4, 1));
        assert_eq!(paper_prime_transpose(&gp), g);
    }

    #[test]
    fn delta_symmetry_enforced() {
        let a = q(2, 2, &[0, 1, -1, 0]);
        let e = build_generator(&GeneratorSpec::Delta { a, level: 2 }, GroupKind::Sp, 3);
        assert!(matches!(e, Err(Error::SymmetryViolated(_))));
    }

    #[test]
    fn out_of_window_support_rejected() {
        let b = q(3, 3, &[0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let e = build_generator(&GeneratorSpec::GammaO { b, level: 0 }, GroupKind::Sp, 2);
        assert!(matches!(e, Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn mixed_theta_outside_group_rejected() {
        let x = q(1, 1, &[1]);
        let y = q(1, 1, &[1]);
        // xᵗy = 1 is symmetric: member for Sp.
        assert!(build_generator(
            &GeneratorSpec::Theta { x: x.clone(), y: y.clone(), level: 1 },
            GroupKind::Sp,
            2
        )
        .is_ok());
        let x = q(2, 2, &[1, 0, 0, 0]);
        let y = q(2, 2, &[0, 1, 0, 0]);
        let e = build_generator(&GeneratorSpec::Theta { x, y, level: 2 }, GroupKind::Sp, 4);
        assert!(matches!(e, Err(Error::NotInGroup(_))));
    }

    #[test]
    fn gl_lower_unipotent() {
        let h = q(2, 2, &[1, 2, 3, 4]);
        let g = build_generator(&GeneratorSpec::LowerUnipotent { h, level: 2 }, GroupKind::GL, 4)
            .unwrap();
        assert_eq!(g.entry(3, 1), cq(1, 1));
        assert_eq!(g.entry(4, 2), cq(4, 1));
        assert_eq!(g.entry(1, 3), cq(0, 1));
    }
}

//! Finite-window models of GL(∞), Sp(2∞) and O(2∞).
//!
//! GL windows are indexed by `1..=N`, stored at `0..N`. Sp/O windows are
//! indexed by `−N..−1, 1..N`, stored negatives first in ascending order, so
//! index `i` lives at `i + N` when negative and `i + N − 1` when positive.

mod aa;
mod generators;
mod relations;
pub mod scalar;
mod shift;

pub use aa::{
    aa_sequence_check, aa_sequence_check_with, default_sequence, sample_subgroup, subgroup_generators,
    AaReport, AaSequence, MAX_AA_WINDOW,
};
pub use generators::{build_generator, paper_prime_transpose, GeneratorSpec};
pub use relations::{verify_relations, RelationInputs};
pub use scalar::{cq, Mat, Scalar, CQ};
pub use shift::{shift_embed, shift_matrix, ShiftMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Float membership tolerance on the max-norm residual.
pub const MEMBER_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "GL", alias = "gl")]
    GL,
    #[serde(rename = "Sp", alias = "sp")]
    Sp,
    #[serde(rename = "O", alias = "o")]
    O,
}

impl GroupKind {
    pub fn is_symmetric_type(self) -> bool {
        !matches!(self, GroupKind::GL)
    }

    /// Matrix size of a window of half-width `n`.
    pub fn dim(self, n: usize) -> usize {
        match self {
            GroupKind::GL => n,
            _ => 2 * n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::GL => "GL",
            GroupKind::Sp => "Sp",
            GroupKind::O => "O",
        }
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(GroupKind::GL),
            "sp" => Ok(GroupKind::Sp),
            "o" => Ok(GroupKind::O),
            other => Err(Error::Parse(format!("unknown group kind '{other}'"))),
        }
    }
}

/// Storage position of a signed index in a window of half-width `n`.
pub fn pos(kind: GroupKind, n: usize, i: i64) -> usize {
    let ni = n as i64;
    match kind {
        GroupKind::GL => {
            assert!(i >= 1 && i <= ni, "GL index {i} outside window {n}");
            (i - 1) as usize
        }
        _ => {
            assert!(i != 0 && i.abs() <= ni, "index {i} outside window {n}");
            if i < 0 {
                (i + ni) as usize
            } else {
                (i + ni - 1) as usize
            }
        }
    }
}

/// Signed index stored at position `p`.
pub fn index_at(kind: GroupKind, n: usize, p: usize) -> i64 {
    let ni = n as i64;
    let p = p as i64;
    match kind {
        GroupKind::GL => p + 1,
        _ => {
            if p < ni {
                p - ni
            } else {
                p - ni + 1
            }
        }
    }
}

/// All signed indices of a window in storage order.
pub fn indices(kind: GroupKind, n: usize) -> Vec<i64> {
    (0..kind.dim(n)).map(|p| index_at(kind, n, p)).collect()
}

/// `s_+ e_i = e_{−i}`.
pub fn s_plus<S: Scalar>(n: usize) -> Mat<S> {
    let mut s = Mat::zeros(2 * n, 2 * n);
    for i in indices(GroupKind::Sp, n) {
        s.set(pos(GroupKind::Sp, n, -i), pos(GroupKind::Sp, n, i), S::one());
    }
    s
}

/// `s_- e_i = sign(i) e_{−i}`.
pub fn s_minus<S: Scalar>(n: usize) -> Mat<S> {
    let mut s = Mat::zeros(2 * n, 2 * n);
    for i in indices(GroupKind::Sp, n) {
        let v = if i > 0 { S::one() } else { -S::one() };
        s.set(pos(GroupKind::Sp, n, -i), pos(GroupKind::Sp, n, i), v);
    }
    s
}

/// Matrix over a finite window; the identity outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<S = C64> {
    kind: GroupKind,
    window: usize,
    entries: Mat<S>,
}

impl<S: Scalar> GroupElement<S> {
    /// Wrap a matrix without checking membership.
    pub fn from_matrix(kind: GroupKind, window: usize, entries: Mat<S>) -> Result<Self> {
        let d = kind.dim(window);
        if window == 0 {
            return Err(Error::WindowTooSmall("window half-width must be positive".into()));
        }
        if entries.rows() != d || entries.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} window {window} needs a {d}x{d} matrix, got {}x{}",
                kind.name(),
                entries.rows(),
                entries.cols()
            )));
        }
        Ok(Self { kind, window, entries })
    }

    pub fn identity(kind: GroupKind, window: usize) -> Self {
        Self {
            kind,
            window,
            entries: Mat::identity(kind.dim(window)),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.entries
    }

    /// Entry at signed indices; identity outside the window.
    pub fn entry(&self, i: i64, j: i64) -> S {
        let n = self.window as i64;
        let inside = |k: i64| match self.kind {
            GroupKind::GL => k >= 1 && k <= n,
            _ => k != 0 && k.abs() <= n,
        };
        if inside(i) && inside(j) {
            self.entries
                .get(pos(self.kind, self.window, i), pos(self.kind, self.window, j))
                .clone()
        } else if i == j {
            S::one()
        } else {
            S::zero()
        }
    }

    /// The same element seen in a window of half-width `window ≥ self.window`.
    pub fn enlarge(&self, window: usize) -> Result<Self> {
        if window < self.window {
            return Err(Error::WindowTooSmall(format!(
                "cannot shrink window {} to {window}",
                self.window
            )));
        }
        let idx = indices(self.kind, window);
        let m = Mat::from_fn(idx.len(), idx.len(), |p, q| self.entry(idx[p], idx[q]));
        Ok(Self {
            kind: self.kind,
            window,
            entries: m,
        })
    }

    fn common(&self, o: &Self) -> Result<(Self, Self)> {
        if self.kind != o.kind {
            return Err(Error::DimensionMismatch("group kinds differ".into()));
        }
        let w = self.window.max(o.window);
        Ok((self.enlarge(w)?, o.enlarge(w)?))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let (a, b) = self.common(o)?;
        Ok(Self {
            kind: a.kind,
            window: a.window,
            entries: a.entries.mul(&b.entries),
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .entries
            .inverse()
            .ok_or_else(|| Error::Singular("group element".into()))?;
        Ok(Self {
            kind: self.kind,
            window: self.window,
            entries: inv,
        })
    }

    /// Largest entrywise difference after aligning windows.
    pub fn max_diff(&self, o: &Self) -> Result<f64> {
        let (a, b) = self.common(o)?;
        Ok(a.entries.max_diff(&b.entries))
    }

    pub fn commutes_with(&self, o: &Self) -> Result<f64> {
        self.mul(o)?.max_diff(&o.mul(self)?)
    }

    /// Residual of the defining relation: `s_- gᵗ s_-⁻¹ g = 1` for Sp and
    /// `s_+ gᵗ s_+ g = 1` for O, as a max-norm difference. Zero for GL.
    pub fn membership_residual(&self) -> Result<f64> {
        let n = self.window;
        let lhs = match self.kind {
            GroupKind::GL => return Ok(0.0),
            GroupKind::Sp => {
                let s = s_minus::<S>(n);
                let s_inv = s.neg();
                s.mul(&self.entries.transpose()).mul(&s_inv)
            }
            GroupKind::O => {
                let s = s_plus::<S>(n);
                s.mul(&self.entries.transpose()).mul(&s)
            }
        };
        Ok(lhs.mul(&self.entries).max_diff(&Mat::identity(self.entries.rows())))
    }

    pub fn is_member(&self) -> Result<bool> {
        let r = self.membership_residual()?;
        Ok(if S::exact() { r == 0.0 } else { r <= MEMBER_TOL })
    }

    pub fn to_float(&self) -> GroupElement<C64> {
        GroupElement {
            kind: self.kind,
            window: self.window,
            entries: Mat::from_cmat(&self.entries.to_cmat()),
        }
    }
}

/// Free-function form of [`GroupElement::is_member`].
pub fn is_member<S: Scalar>(g: &GroupElement<S>) -> Result<bool> {
    g.is_member()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_bijection() {
        assert_eq!(pos(GroupKind::Sp, 3, -3), 0);
        assert_eq!(pos(GroupKind::Sp, 3, -1), 2);
        assert_eq!(pos(GroupKind::Sp, 3, 1), 3);
        assert_eq!(pos(GroupKind::Sp, 3, 3), 5);
        for kind in [GroupKind::GL, GroupKind::Sp, GroupKind::O] {
            for (p, i) in indices(kind, 4).into_iter().enumerate() {
                assert_eq!(pos(kind, 4, i), p);
            }
        }
    }

    #[test]
    fn s_minus_squares_to_minus_identity() {
        let s = s_minus::<CQ>(3);
        assert_eq!(s.mul(&s), Mat::identity(6).neg());
        let t = s_plus::<CQ>(3);
        assert_eq!(t.mul(&t), Mat::identity(6));
    }

    #[test]
    fn s_maps_are_members() {
        for n in 1..4 {
            let sp = GroupElement::from_matrix(GroupKind::Sp, n, s_minus::<CQ>(n)).unwrap();
            assert!(sp.is_member().unwrap());
            let o = GroupElement::from_matrix(GroupKind::O, n, s_plus::<CQ>(n)).unwrap();
            assert!(o.is_member().unwrap());
        }
    }

    #[test]
    fn identity_is_member() {
        for kind in [GroupKind::GL, GroupKind::Sp, GroupKind::O] {
            assert!(GroupElement::<CQ>::identity(kind, 3).is_member().unwrap());
        }
    }

    #[test]
    fn off_diagonal_entry_breaks_sp() {
        let mut m = Mat::<CQ>::identity(4);
        // e_1 → e_1 + e_2 on the positive side without the compensating
        // negative-side entry.
        m.set(pos(GroupKind::Sp, 2, 2), pos(GroupKind::Sp, 2, 1), cq(1, 1));
        let g = GroupElement::from_matrix(GroupKind::Sp, 2, m).unwrap();
        assert!(!g.is_member().unwrap());
    }

    #[test]
    fn singular_matrix_is_not_a_member() {
        let g = GroupElement::from_matrix(GroupKind::Sp, 1, Mat::<CQ>::zeros(2, 2)).unwrap();
        assert_eq!(g.membership_residual().unwrap(), 1.0);
        assert!(!g.is_member().unwrap());
    }

    #[test]
    fn enlarge_pads_identity() {
        let g = GroupElement::from_matrix(GroupKind::O, 1, s_plus::<CQ>(1)).unwrap();
        let h = g.enlarge(3).unwrap();
        assert_eq!(h.entry(1, -1), cq(1, 1));
        assert_eq!(h.entry(2, 2), cq(1, 1));
        assert_eq!(h.entry(1, 1), cq(0, 1));
        assert!(h.is_member().unwrap());
    }
}

use serde::{Deserialize, Serialize};

use super::{indices, pos, s_minus, s_plus, GroupElement, GroupKind, Mat, Scalar};
use crate::error::{Error, Result};

/// Shift isometries on the index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShiftMap {
    /// Fixes `e_i` for `|i| ≤ n`, sends `e_{±i} ↦ e_{±(i+q)}` otherwise.
    SigmaLevel { q: usize, n: usize },
    /// `SigmaLevel` with `n = 0`.
    Sigma { q: usize },
    SPlus,
    SMinus,
    /// `s_+` away from `|i| ≤ q`, identity on it.
    SPlusFixed { q: usize },
    /// `s_-` away from `|i| ≤ q`, identity on it.
    SMinusFixed { q: usize },
}

impl ShiftMap {
    fn sigma(self) -> Option<(usize, usize)> {
        match self {
            ShiftMap::SigmaLevel { q, n } => Some((q, n)),
            ShiftMap::Sigma { q } => Some((q, 0)),
            _ => None,
        }
    }
}

/// Image index of `i` under `σ_q^{(n)}`.
fn sigma_index(i: i64, q: usize, n: usize) -> i64 {
    if i.unsigned_abs() as usize <= n {
        i
    } else {
        i + i.signum() * q as i64
    }
}

/// Matrix of a shift. A σ-shift maps the window of half-width `window` into
/// the window of half-width `window + q` (a rectangular isometry); the `s`
/// maps are square on `window` and require Sp/O indexing.
pub fn shift_matrix<S: Scalar>(kind: GroupKind, shift: ShiftMap, window: usize) -> Result<Mat<S>> {
    if let Some((q, n)) = shift.sigma() {
        let target = window + q;
        let mut m = Mat::zeros(kind.dim(target), kind.dim(window));
        for i in indices(kind, window) {
            m.set(pos(kind, target, sigma_index(i, q, n)), pos(kind, window, i), S::one());
        }
        return Ok(m);
    }
    if !kind.is_symmetric_type() {
        return Err(Error::Unsupported("s-maps need signed indexing (Sp or O)".into()));
    }
    let (full, fixed) = match shift {
        ShiftMap::SPlus => (s_plus::<S>(window), 0),
        ShiftMap::SMinus => (s_minus::<S>(window), 0),
        ShiftMap::SPlusFixed { q } => (s_plus::<S>(window), q),
        ShiftMap::SMinusFixed { q } => (s_minus::<S>(window), q),
        _ => unreachable!("σ handled above"),
    };
    if fixed > window {
        return Err(Error::WindowTooSmall(format!("fixed block {fixed} exceeds window {window}")));
    }
    let mut m = full;
    for i in indices(kind, window) {
        if i.unsigned_abs() as usize <= fixed {
            let (p, mp) = (pos(kind, window, i), pos(kind, window, -i));
            m.set(mp, p, S::zero());
            m.set(p, p, S::one());
        }
    }
    Ok(m)
}

/// `g_σ = σ g σ* + identity on the vacated indices` for σ-shifts; plain
/// conjugation `s g s⁻¹` for the `s` maps. The result lives in the window of
/// half-width `g.window() + q` (σ) or `g.window()` (`s`).
pub fn shift_embed<S: Scalar>(g: &GroupElement<S>, shift: ShiftMap) -> Result<GroupElement<S>> {
    let target = g.window() + shift.sigma().map_or(0, |(q, _)| q);
    shift_embed_into(g, shift, target)
}

/// As [`shift_embed`], failing with `WindowTooSmall` when the result does not
/// fit in a window of half-width `max_window`.
pub fn shift_embed_into<S: Scalar>(
    g: &GroupElement<S>,
    shift: ShiftMap,
    max_window: usize,
) -> Result<GroupElement<S>> {
    let kind = g.kind();
    let w = g.window();
    match shift.sigma() {
        Some((q, n)) => {
            if n > w {
                return Err(Error::WindowTooSmall(format!("level {n} exceeds window {w}")));
            }
            let target = w + q;
            if target > max_window {
                return Err(Error::WindowTooSmall(format!(
                    "shift by {q} overflows window {max_window}"
                )));
            }
            let sig = shift_matrix::<S>(kind, shift, w)?;
            let mut h = sig.mul(g.matrix()).mul(&sig.transpose());
            for i in indices(kind, target) {
                let a = i.unsigned_abs() as usize;
                if a > n && a <= n + q {
                    let p = pos(kind, target, i);
                    h.set(p, p, S::one());
                }
            }
            let out = GroupElement::from_matrix(kind, target, h)?;
            debug_assert!(out.is_member().unwrap_or(false) || !g.is_member().unwrap_or(false));
            Ok(out)
        }
        None => {
            if w > max_window {
                return Err(Error::WindowTooSmall(format!("window {w} exceeds {max_window}")));
            }
            let s = shift_matrix::<S>(kind, shift, w)?;
            let s_inv = s
                .inverse()
                .ok_or_else(|| Error::Singular("shift".into()))?;
            GroupElement::from_matrix(kind, w, s.mul(g.matrix()).mul(&s_inv))
        }
    }
}

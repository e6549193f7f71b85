use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::GroupKind;
use crate::linalg::{c, eigh, eye, max_abs, max_abs_diff, unitarity_residual, CMat, CVec};

use super::require_hermitian;

/// Relative tolerance for eigenvalue clustering and ± pairing.
pub const PAIRING_TOL: f64 = 1e-9;

/// `[[0, iλ], [−iλ, 0]]`.
pub fn varsigma(lambda: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, lambda), c(0.0, -lambda), c(0.0, 0.0)])
}

/// `[[λ, 0], [0, −λ]]`.
pub fn vartheta(lambda: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[c(lambda, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-lambda, 0.0)])
}

/// `P = [[0, −I_k], [I_k, 0]]`.
pub fn o_pairing(k: usize) -> CMat {
    let mut p = CMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        p[(i, k + i)] = c(-1.0, 0.0);
        p[(k + i, i)] = c(1.0, 0.0);
    }
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalForm {
    pub kind: GroupKind,
    #[serde(skip)]
    pub w: CMat,
    #[serde(skip)]
    pub d: CMat,
    /// O only: `w̄ P w*`, with `[[0,1],[−1,0]]` blocks.
    #[serde(skip)]
    pub u_o: Option<CMat>,
    /// Block parameters `λ₁ ≥ λ₂ ≥ … > 0`.
    pub spectrum: Vec<f64>,
    pub zero_block: usize,
    /// `‖wAw* − d‖_max`.
    pub residual: f64,
    /// `‖w*w − I‖_max`.
    pub unitarity: f64,
}

fn block_diag(blocks: &[CMat], total: usize) -> CMat {
    let mut out = CMat::zeros(total, total);
    let mut off = 0;
    for b in blocks {
        let n = b.nrows();
        out.view_mut((off, off), (n, n)).copy_from(b);
        off += n;
    }
    out
}

/// Orthonormal vectors spanning `span(basis)`, chosen by projecting standard
/// basis vectors in order and orthogonalizing against `taken` and the
/// vectors already picked; the first nonzero component is made real positive.
fn pick_vectors(
    basis: &[CVec],
    count: usize,
    taken: &[CVec],
    mut extra: impl FnMut(&CVec) -> Option<CVec>,
) -> Vec<CVec> {
    let n = basis.first().map_or(0, |v| v.len());
    let mut out: Vec<CVec> = Vec::new();
    let mut blocked: Vec<CVec> = taken.to_vec();
    for k in 0..n {
        if out.len() >= count {
            break;
        }
        let mut v = CVec::zeros(n);
        for b in basis {
            v += b * b[k].conj();
        }
        for t in &blocked {
            let proj = t.dotc(&v);
            v -= t * proj;
        }
        // second pass for stability
        for t in &blocked {
            let proj = t.dotc(&v);
            v -= t * proj;
        }
        let nrm = v.norm();
        if nrm < 1e-6 {
            continue;
        }
        v /= c(nrm, 0.0);
        if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
            v *= first.conj() / first.norm();
        }
        blocked.push(v.clone());
        if let Some(partner) = extra(&v) {
            blocked.push(partner);
        }
        out.push(v);
    }
    out
}

fn clusters(vals: &[f64], scale: f64) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match out.last_mut() {
            Some((rep, idx)) if (v - *rep).abs() <= PAIRING_TOL * scale => idx.push(i),
            _ => out.push((v, vec![i])),
        }
    }
    for (rep, idx) in &mut out {
        *rep = idx.iter().map(|&i| vals[i]).sum::<f64>() / idx.len() as f64;
    }
    out
}

/// Unitary `w` with `wAw*` block diagonal.
///
/// Sp: `A = A*`, `A = −Aᵗ`; `d = ⊕ς(λ_j) ⊕ 0` and `w` is real orthogonal.
/// O: `A = A*`, `Aᵗ = −PAP⁻¹`; `d = ⊕ϑ(λ_j) ⊕ 0` and `u_o = w̄Pw*`.
pub fn canonical_form(a: &CMat, kind: GroupKind) -> Result<CanonicalForm> {
    require_hermitian(a)?;
    let q = a.nrows();
    let scale = 1.0 + max_abs(a);
    match kind {
        GroupKind::Sp => {
            let r = max_abs_diff(a, &(-a.transpose()));
            if r > 1e-12 * scale {
                return Err(Error::SymmetryViolated(format!(
                    "Sp canonical form needs A = -A^t (residual {r:.3e})"
                )));
            }
            sp_form(a, scale)
        }
        GroupKind::O => {
            if !q.is_multiple_of(2) {
                return Err(Error::DimensionMismatch("O canonical form needs even size".into()));
            }
            let p = o_pairing(q / 2);
            let pinv = -&p;
            let r = max_abs_diff(&a.transpose(), &(-(&p * a * &pinv)));
            if r > 1e-12 * scale {
                return Err(Error::SymmetryViolated(format!(
                    "O canonical form needs A^t = -P A P^-1 (residual {r:.3e})"
                )));
            }
            o_form(a, &p, scale)
        }
        GroupKind::GL => Err(Error::Unsupported("canonical forms exist for Sp and O".into())),
    }
}

fn finish(
    kind: GroupKind,
    a: &CMat,
    rows: Vec<CVec>,
    blocks: Vec<CMat>,
    spectrum: Vec<f64>,
    zero_block: usize,
    u_o: Option<CMat>,
) -> CanonicalForm {
    let q = a.nrows();
    let mut w = CMat::zeros(q, q);
    for (i, f) in rows.iter().enumerate() {
        for j in 0..q {
            w[(i, j)] = f[j].conj();
        }
    }
    let d = block_diag(&blocks, q);
    let residual = max_abs_diff(&(&w * a * w.adjoint()), &d);
    let unitarity = unitarity_residual(&w);
    CanonicalForm { kind, w, d, u_o, spectrum, zero_block, residual, unitarity }
}

fn sp_form(a: &CMat, scale: f64) -> Result<CanonicalForm> {
    let q = a.nrows();
    // B = −iA is real antisymmetric. For Av = μv with μ > 0, √2 Re v and
    // √2 Im v span the real invariant plane on which B acts as a rotation.
    let b = a.map(|z| (c(0.0, -1.0) * z).re);
    let bc = b.map(|v| c(v, 0.0));
    let (vals, vecs) = eigh(a);
    let desc: Vec<usize> = (0..q).rev().collect();
    let dvals: Vec<f64> = desc.iter().map(|&i| vals[i]).collect();
    let col = |i: usize| -> CVec { vecs.column(desc[i]).into_owned() };
    let mut rows = Vec::new();
    let mut blocks = Vec::new();
    let mut spectrum = Vec::new();
    let mut zero_vectors = Vec::new();
    let mut pos_count = 0usize;
    let mut neg_count = 0usize;
    let s2 = std::f64::consts::SQRT_2;
    for (mu, idx) in clusters(&dvals, scale) {
        if mu.abs() <= PAIRING_TOL * scale {
            for &k in &idx {
                let v = col(k);
                // kernel of a real matrix: real and imaginary parts stay in it
                zero_vectors.push(v.map(|z| c(z.re, 0.0)));
                zero_vectors.push(v.map(|z| c(z.im, 0.0)));
            }
            continue;
        }
        if mu < 0.0 {
            neg_count += idx.len();
            continue;
        }
        pos_count += idx.len();
        let mut space = Vec::new();
        for &k in &idx {
            let v = col(k);
            space.push(v.map(|z| c(s2 * z.re, 0.0)));
            space.push(v.map(|z| c(s2 * z.im, 0.0)));
        }
        let partner = |f: &CVec| Some(-(&bc * f) / c(mu, 0.0));
        let firsts = pick_vectors(&space, idx.len(), &rows, partner);
        if firsts.len() != idx.len() {
            return Err(Error::Spectrum(format!("could not pair eigenspace of {mu:.6}")));
        }
        for f1 in firsts {
            let f2 = -(&bc * &f1) / c(mu, 0.0);
            rows.push(f1);
            rows.push(f2);
            blocks.push(super::varsigma(mu));
            spectrum.push(mu);
        }
    }
    if pos_count != neg_count {
        return Err(Error::Spectrum(format!(
            "{pos_count} positive eigenvalues against {neg_count} negative ones: unpaired"
        )));
    }
    let zero_block = q - rows.len();
    if zero_block > 0 {
        let zs = pick_vectors(&zero_vectors, zero_block, &rows, |_| None);
        if zs.len() != zero_block {
            return Err(Error::Spectrum("kernel basis construction failed".into()));
        }
        rows.extend(zs);
        blocks.push(CMat::zeros(zero_block, zero_block));
    }
    Ok(finish(GroupKind::Sp, a, rows, blocks, spectrum, zero_block, None))
}

fn o_form(a: &CMat, p: &CMat, scale: f64) -> Result<CanonicalForm> {
    let q = a.nrows();
    let pinv = -p;
    // J v = P⁻¹ v̄ is antiunitary, J² = −1, and maps E_μ onto E_{−μ}.
    let jmap = |v: &CVec| -> CVec { &pinv * v.map(|z| z.conj()) };
    let (vals, vecs) = eigh(a);
    let desc: Vec<usize> = (0..q).rev().collect();
    let dvals: Vec<f64> = desc.iter().map(|&i| vals[i]).collect();
    let col = |i: usize| -> CVec { vecs.column(desc[i]).into_owned() };
    let mut rows = Vec::new();
    let mut blocks = Vec::new();
    let mut spectrum = Vec::new();
    let mut zero_vectors = Vec::new();
    let mut neg_count = 0usize;
    let mut pos_count = 0usize;
    for (mu, idx) in clusters(&dvals, scale) {
        let space: Vec<CVec> = idx.iter().map(|&k| col(k)).collect();
        if mu.abs() <= PAIRING_TOL * scale {
            zero_vectors.extend(space);
            continue;
        }
        if mu < 0.0 {
            neg_count += idx.len();
            continue;
        }
        pos_count += idx.len();
        let firsts = pick_vectors(&space, idx.len(), &rows, |f| Some(jmap(f)));
        if firsts.len() != idx.len() {
            return Err(Error::Spectrum(format!("could not build eigenbasis of {mu:.6}")));
        }
        for f1 in firsts {
            let f2 = jmap(&f1);
            rows.push(f1);
            rows.push(f2);
            blocks.push(super::vartheta(mu));
            spectrum.push(mu);
        }
    }
    if pos_count != neg_count {
        return Err(Error::Spectrum(format!(
            "{pos_count} positive eigenvalues against {neg_count} negative ones: unpaired"
        )));
    }
    let zero_block = zero_vectors.len();
    if zero_block % 2 != 0 {
        return Err(Error::Spectrum("odd-dimensional kernel cannot be paired".into()));
    }
    if zero_block > 0 {
        let firsts = pick_vectors(&zero_vectors, zero_block / 2, &rows, |f| Some(jmap(f)));
        if firsts.len() != zero_block / 2 {
            return Err(Error::Spectrum("kernel pairing failed".into()));
        }
        for f1 in firsts {
            let f2 = jmap(&f1);
            rows.push(f1);
            rows.push(f2);
        }
        blocks.push(CMat::zeros(zero_block, zero_block));
    }
    let mut form = finish(GroupKind::O, a, rows, blocks, spectrum, zero_block, None);
    let w = &form.w;
    form.u_o = Some(w.map(|z| z.conj()) * p * w.adjoint());
    Ok(form)
}

impl CanonicalForm {
    /// `½ √(1 + 4d²)` times `I` (Sp) or `u_o` (O).
    pub fn canonical_r(&self) -> Result<CMat> {
        let root = super::hermitian_calculus(&self.d, super::HermitianFn::SqrtOnePlusFourSquare)?;
        let u = self.u_o.clone().unwrap_or_else(|| eye(self.d.nrows()));
        Ok(root * u * c(0.5, 0.0))
    }

    /// The canonical `R` transported back to `A`: `wᵗ R_c w`.
    pub fn r_for_original(&self) -> Result<CMat> {
        Ok(self.w.transpose() * self.canonical_r()? * &self.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixfn::check_r_identities;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sp(rng: &mut ChaCha8Rng, q: usize) -> CMat {
        crate::sampling::random_sp_hermitian(rng, q)
    }

    fn random_o(rng: &mut ChaCha8Rng, k: usize) -> CMat {
        crate::sampling::random_o_hermitian(rng, k)
    }

    #[test]
    fn zero_matrix() {
        let f = canonical_form(&CMat::zeros(3, 3), GroupKind::Sp).unwrap();
        assert_eq!(f.zero_block, 3);
        assert!(max_abs_diff(&f.w, &eye(3)) < 1e-15);
        assert!(f.spectrum.is_empty());
    }

    #[test]
    fn already_canonical() {
        let f = canonical_form(&varsigma(2.0), GroupKind::Sp).unwrap();
        assert!(max_abs_diff(&f.w, &eye(2)) < 1e-12);
        assert!(max_abs_diff(&f.d, &varsigma(2.0)) < 1e-12);
    }

    #[test]
    fn random_sp_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in 1..=6 {
            let a = random_sp(&mut rng, q);
            let f = canonical_form(&a, GroupKind::Sp).unwrap();
            assert!(f.residual <= 1e-10, "q={q} residual {}", f.residual);
            assert!(f.unitarity <= 1e-12);
            assert!(max_abs_diff(&(f.w.adjoint() * &f.d * &f.w), &a) < 1e-10);
            assert!(check_r_identities(&f.d, &f.canonical_r().unwrap()).unwrap().passed());
            assert!(check_r_identities(&a, &f.r_for_original().unwrap()).unwrap().passed());
        }
    }

    #[test]
    fn random_o_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 1..=3 {
            let a = random_o(&mut rng, k);
            let f = canonical_form(&a, GroupKind::O).unwrap();
            assert!(f.residual <= 1e-10, "k={k} residual {}", f.residual);
            assert!(f.unitarity <= 1e-12);
            let u = f.u_o.clone().unwrap();
            let mut want = CMat::zeros(2 * k, 2 * k);
            for b in 0..k {
                want[(2 * b, 2 * b + 1)] = c(1.0, 0.0);
                want[(2 * b + 1, 2 * b)] = c(-1.0, 0.0);
            }
            assert!(max_abs_diff(&u, &want) < 1e-10);
            assert!(check_r_identities(&f.d, &f.canonical_r().unwrap()).unwrap().passed());
            assert!(check_r_identities(&a, &f.r_for_original().unwrap()).unwrap().passed());
        }
    }

    #[test]
    fn precondition_reported() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(canonical_form(&a, GroupKind::Sp), Err(Error::SymmetryViolated(_))));
        assert!(matches!(canonical_form(&a, GroupKind::O), Err(Error::SymmetryViolated(_))));
    }
}

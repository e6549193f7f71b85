use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{build_generator, cq, GeneratorSpec, GroupElement, GroupKind, Mat, CQ};
use crate::certificate::Certificate;
use crate::error::{Error, Result};

/// Largest window the default sequence may use.
pub const MAX_AA_WINDOW: usize = 256;

/// Candidate asymptotically abelian sequence `u_1, …, u_count` (all in one
/// window).
#[derive(Clone, Debug)]
pub struct AaSequence {
    pub elements: Vec<GroupElement<CQ>>,
}

#[derive(Clone, Debug)]
pub struct AaReport {
    pub certificate: Certificate,
    /// Per sampled `g`: smallest `k0` with `u_k g u_k*` commuting with all of
    /// `G(n)` for every `k ≥ k0` (1-based), or `None`.
    pub k_thresholds: Vec<Option<usize>>,
    /// Smallest `l0` with `u_k u_l* ∈ G′(n)` for all `k > l ≥ l0`, or `None`.
    pub l_threshold: Option<usize>,
}

fn elementary(m: usize, i: usize, j: usize, v: i64) -> Mat<CQ> {
    let mut e = Mat::identity(m);
    e.set(i, j, cq(v, 1));
    if i != j {
        e.set(i, i, cq(1, 1));
    }
    e
}

/// Generators of `G(n)` inside a window: elementary and diagonal GL moves
/// on `1..n`, and for Sp/O also the level-0 upper and lower unipotents.
pub fn subgroup_generators(kind: GroupKind, n: usize, window: usize) -> Result<Vec<GroupElement<CQ>>> {
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let mut gl = Vec::new();
    for i in 0..n {
        gl.push(elementary(n, i, i, 2));
        for j in 0..n {
            if i != j {
                gl.push(elementary(n, i, j, 1));
            }
        }
    }
    for g in gl {
        out.push(build_generator(&GeneratorSpec::DiagEmbed { g, level: 0 }, kind, window)?);
    }
    if kind.is_symmetric_type() {
        for i in 0..n {
            for j in i..n {
                let mut b = Mat::<CQ>::zeros(n, n);
                match kind {
                    GroupKind::Sp => {
                        b.set(i, j, cq(1, 1));
                        b.set(j, i, cq(1, 1));
                    }
                    _ => {
                        if i == j {
                            continue;
                        }
                        b.set(i, j, cq(1, 1));
                        b.set(j, i, cq(-1, 1));
                    }
                }
                for upper in [true, false] {
                    let spec = if upper {
                        GeneratorSpec::GammaO { b: b.clone(), level: 0 }
                    } else {
                        GeneratorSpec::GammaU { b: b.clone(), level: 0 }
                    };
                    out.push(build_generator(&spec, kind, window)?);
                }
            }
        }
    }
    Ok(out)
}

/// Random products of `G(l)` generators with small integer entries.
pub fn sample_subgroup(
    kind: GroupKind,
    l: usize,
    window: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<GroupElement<CQ>>> {
    let gens = subgroup_generators(kind, l, window)?;
    if gens.is_empty() {
        return Ok(vec![GroupElement::identity(kind, window)]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut g = GroupElement::identity(kind, window);
        for _ in 0..4 {
            let h = &gens[rng.gen_range(0..gens.len())];
            g = g.mul(h)?;
        }
        out.push(g);
    }
    Ok(out)
}

/// Permutation of `1..window` (mirrored on negatives for Sp/O) taking block
/// `B_1 → B_0 → B_t → B_1`, blocks `B_j = j·b+1 ..= (j+1)·b`.
fn block_cycle(kind: GroupKind, window: usize, b: usize, t: usize) -> Result<GroupElement<CQ>> {
    let mut perm: Vec<usize> = (0..window).collect();
    for r in 0..b {
        perm[b + r] = r; // B_1 → B_0
        perm[r] = t * b + r; // B_0 → B_t
        perm[t * b + r] = b + r; // B_t → B_1
    }
    let mut p = Mat::<CQ>::zeros(window, window);
    for (src, &dst) in perm.iter().enumerate() {
        p.set(dst, src, cq(1, 1));
    }
    build_generator(&GeneratorSpec::DiagEmbed { g: p, level: 0 }, kind, window)
}

/// The default sequence: `u_k` is the block 3-cycle with target block
/// `k + 1`, block size `max(n, l, 1)`.
pub fn default_sequence(kind: GroupKind, n: usize, l: usize, count: usize) -> Result<AaSequence> {
    let b = n.max(l).max(1);
    let window = b * (count + 2);
    if window > MAX_AA_WINDOW {
        return Err(Error::WindowTooSmall(format!(
            "{count} shifts of block size {b} need window {window} > {MAX_AA_WINDOW}"
        )));
    }
    let elements = (1..=count)
        .map(|k| block_cycle(kind, window, b, k + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(AaSequence { elements })
}

/// Check both asymptotic-abelian properties of the default block-cycle
/// sequence on sampled `g ∈ G(l)`.
pub fn aa_sequence_check(kind: GroupKind, n: usize, l: usize, count: usize) -> Result<AaReport> {
    if count < 2 {
        return Err(Error::WindowTooSmall("need at least two sequence elements".into()));
    }
    let seq = default_sequence(kind, n, l, count)?;
    let window = seq.elements[0].window();
    let samples = sample_subgroup(kind, l, window, 6, 0x5eed)?;
    aa_sequence_check_with(kind, n, &samples, &seq)
}

/// Check both properties for an explicit sequence and sample set.
pub fn aa_sequence_check_with(
    kind: GroupKind,
    n: usize,
    samples: &[GroupElement<CQ>],
    seq: &AaSequence,
) -> Result<AaReport> {
    let count = seq.elements.len();
    if count < 2 {
        return Err(Error::WindowTooSmall("need at least two sequence elements".into()));
    }
    let window = seq
        .elements
        .iter()
        .chain(samples)
        .map(|g| g.window())
        .max()
        .unwrap_or(1)
        .max(n.max(1));
    let gens = subgroup_generators(kind, n, window)?;
    let commutes_all = |h: &GroupElement<CQ>| -> Result<bool> {
        for v in &gens {
            if h.commutes_with(v)? != 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let us: Vec<GroupElement<CQ>> = seq.elements.iter().map(|u| u.enlarge(window)).collect::<Result<_>>()?;
    let us_inv: Vec<GroupElement<CQ>> = us.iter().map(|u| u.inverse()).collect::<Result<_>>()?;

    let mut k_thresholds = Vec::with_capacity(samples.len());
    for g in samples {
        let mut ok = vec![false; count];
        for k in 0..count {
            ok[k] = commutes_all(&us[k].mul(g)?.mul(&us_inv[k])?)?;
        }
        let mut thr = None;
        for k0 in (0..count).rev() {
            if ok[k0] {
                thr = Some(k0 + 1);
            } else {
                break;
            }
        }
        k_thresholds.push(thr);
    }

    // pair_ok[l] = every k > l passes
    let mut pair_ok = vec![true; count];
    for l in 0..count {
        for k in (l + 1)..count {
            if !commutes_all(&us[k].mul(&us_inv[l])?)? {
                pair_ok[l] = false;
                break;
            }
        }
    }
    let mut l_threshold = None;
    for l0 in (0..count - 1).rev() {
        if pair_ok[l0] {
            l_threshold = Some(l0 + 1);
        } else {
            break;
        }
    }

    let failures = k_thresholds.iter().filter(|t| t.is_none()).count()
        + usize::from(l_threshold.is_none());
    let inputs = json!({
        "kind": kind.name(),
        "n": n,
        "sequence": seq.elements.iter().map(|u| u.matrix().describe()).collect::<Vec<_>>(),
        "samples": samples.iter().map(|g| g.matrix().describe()).collect::<Vec<_>>(),
    });
    let mut cert = Certificate::new("asymptotic abelian sequence", &inputs, failures as f64, 0.0);
    let ks: Vec<String> = k_thresholds
        .iter()
        .map(|t| t.map_or("none".into(), |v| v.to_string()))
        .collect();
    cert = cert.with_note(format!("k(g,n) per sample: [{}]", ks.join(", ")));
    cert = cert.with_note(format!(
        "l(n): {}",
        l_threshold.map_or("none".into(), |v| v.to_string())
    ));
    Ok(AaReport { certificate: cert, k_thresholds, l_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_level_passes() {
        for kind in [GroupKind::GL, GroupKind::Sp, GroupKind::O] {
            let r = aa_sequence_check(kind, 0, 1, 3).unwrap();
            assert!(r.certificate.passed());
        }
    }

    #[test]
    fn block_shifts_pass() {
        for kind in [GroupKind::GL, GroupKind::Sp, GroupKind::O] {
            let r = aa_sequence_check(kind, 2, 2, 4).unwrap();
            assert!(r.certificate.passed(), "{:?}", r.certificate);
            assert!(r.k_thresholds.iter().all(|t| t.unwrap() <= 4));
            assert_eq!(r.l_threshold, Some(1));
        }
    }

    #[test]
    fn identity_sequence_fails_property_one() {
        let kind = GroupKind::GL;
        let window = 4;
        let g = build_generator(
            &GeneratorSpec::DiagEmbed { g: elementary(2, 0, 1, 1), level: 0 },
            kind,
            window,
        )
        .unwrap();
        let seq = AaSequence { elements: vec![GroupElement::identity(kind, window); 3] };
        let r = aa_sequence_check_with(kind, 2, &[g], &seq).unwrap();
        assert!(!r.certificate.passed());
        assert_eq!(r.k_thresholds, vec![None]);
    }
}

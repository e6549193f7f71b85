//! Orthonormal polynomial bases of truncated Gaussian `L²` spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, CMat, C64};

use super::gausspoly::{GaussPoly, GaussSum, Measure};
use super::poly::Poly;

pub const DEFAULT_MAX_COORDS: usize = 2;
pub const DEFAULT_MAX_DEGREE: usize = 4;

/// Exponents of `λ` and of `λ̄` over the complex coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub holo: Vec<u8>,
    pub anti: Vec<u8>,
}

impl BasisIndex {
    pub fn degree(&self) -> usize {
        self.holo.iter().chain(&self.anti).map(|&v| v as usize).sum()
    }

    fn exponent(&self) -> Vec<u8> {
        self.holo.iter().chain(&self.anti).copied().collect()
    }
}

/// All exponents of total degree `≤ degree` in `n` variables, graded, and
/// lexicographically descending within a degree.
pub fn graded_lex(n: usize, degree: usize) -> Vec<Vec<u8>> {
    fn fill(n: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n - 1 {
            cur.push(left as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k as u8);
            fill(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    for d in 0..=degree {
        fill(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Orthonormalized monomials `λᵃλ̄ᵇ` (times `ρ^{1/2}` for Lebesgue measure).
#[derive(Clone, Debug)]
pub struct Basis {
    p: usize,
    degree: usize,
    measure: Measure,
    indices: Vec<BasisIndex>,
    gram: CMat,
    coeffs: CMat,
    functions: Vec<GaussSum>,
}

/// Serializable description of a basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub coordinates: usize,
    pub degree: usize,
    pub measure: String,
    pub order: String,
    pub indices: Vec<BasisIndex>,
}

/// Gram matrix of the monomials of degree `≤ D` in `m·K` complex coordinates
/// under `ν`, with the triangular factor `T` such that `T G T* = I`.
pub fn gram_matrix(m: usize, k: usize, d: usize) -> Result<(CMat, CMat)> {
    let b = Basis::new(m * k, d, Measure::Nu)?;
    Ok((b.gram.clone(), b.coeffs.clone()))
}

impl Basis {
    pub fn new(p: usize, degree: usize, measure: Measure) -> Result<Self> {
        Self::with_guard(p, degree, measure, DEFAULT_MAX_COORDS, DEFAULT_MAX_DEGREE)
    }

    pub fn with_guard(
        p: usize,
        degree: usize,
        measure: Measure,
        max_coords: usize,
        max_degree: usize,
    ) -> Result<Self> {
        if p == 0 || p > max_coords {
            return Err(Error::Guard(format!(
                "coordinate count {p} outside 1..={max_coords}"
            )));
        }
        if degree > max_degree {
            return Err(Error::Guard(format!("degree {degree} exceeds {max_degree}")));
        }
        let exps = graded_lex(2 * p, degree);
        let indices: Vec<BasisIndex> = exps
            .iter()
            .map(|e| BasisIndex { holo: e[..p].to_vec(), anti: e[p..].to_vec() })
            .collect();
        let monos: Vec<GaussPoly> = indices
            .iter()
            .map(|ix| GaussPoly::polynomial(p, Poly::monomial(ix.exponent(), c(1.0, 0.0))))
            .collect();
        let n = monos.len();
        let mut gram = CMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = monos[i].mul(&monos[j].conj()).integrate(Measure::Nu)?;
                gram[(i, j)] = v;
                gram[(j, i)] = v.conj();
            }
        }
        let (ev, _) = eigh(&gram);
        if !(ev[0] > 0.0) {
            return Err(Error::Spectrum(format!("monomial Gram not positive definite ({:.3e})", ev[0])));
        }
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Spectrum("monomial Gram Cholesky failed".into()))?;
        let coeffs = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::Singular("Cholesky factor".into()))?;
        let factor = match measure {
            Measure::Nu => GaussPoly::one(p),
            Measure::Lebesgue => GaussPoly::sqrt_nu_density(p),
        };
        let functions = (0..n)
            .map(|i| {
                let mut poly = Poly::zero(2 * p);
                for j in 0..=i {
                    let t = coeffs[(i, j)];
                    if t != c(0.0, 0.0) {
                        poly = poly.add(&Poly::monomial(indices[j].exponent(), t));
                    }
                }
                GaussSum::from_term(factor.mul_poly(&poly))
            })
            .collect();
        Ok(Self { p, degree, measure, indices, gram, coeffs, functions })
    }

    pub fn coordinates(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[BasisIndex] {
        &self.indices
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// Row `i` holds the monomial coefficients of basis function `i`.
    pub fn coefficients(&self) -> &CMat {
        &self.coeffs
    }

    pub fn function(&self, i: usize) -> &GaussSum {
        &self.functions[i]
    }

    pub fn functions(&self) -> &[GaussSum] {
        &self.functions
    }

    pub fn inner(&self, f: &GaussSum, g: &GaussSum) -> Result<C64> {
        f.inner(g, self.measure)
    }

    pub fn descriptor(&self) -> BasisDescriptor {
        BasisDescriptor {
            coordinates: self.p,
            degree: self.degree,
            measure: match self.measure {
                Measure::Nu => "gaussian".into(),
                Measure::Lebesgue => "lebesgue".into(),
            },
            order: "graded-lex, Cholesky-orthonormalized".into(),
            indices: self.indices.clone(),
        }
    }

    /// Coefficients `⟨f, e_i⟩`.
    pub fn project(&self, f: &GaussSum) -> Result<FockVector> {
        let coeffs = self
            .functions
            .iter()
            .map(|e| self.inner(f, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(FockVector { coeffs })
    }

    pub fn synthesize(&self, v: &FockVector) -> GaussSum {
        let mut out = GaussSum::zero(self.p);
        for (e, &a) in self.functions.iter().zip(&v.coeffs) {
            if a != c(0.0, 0.0) {
                out = out.add(&e.scale(a));
            }
        }
        out
    }
}

/// Coefficients over a [`Basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub coeffs: Vec<C64>,
}

impl FockVector {
    pub fn basis_vector(n: usize, i: usize) -> Self {
        let mut coeffs = vec![c(0.0, 0.0); n];
        coeffs[i] = c(1.0, 0.0);
        Self { coeffs }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn graded_lex_order() {
        let e = graded_lex(2, 2);
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn gram_reference_entries() {
        let (g, t) = gram_matrix(1, 1, 2).unwrap();
        // order: 1, λ, λ̄, λ², λλ̄, λ̄²
        assert!((g[(0, 0)] - 1.0).norm() < 1e-14);
        assert!((g[(1, 1)] - 1.0).norm() < 1e-14);
        assert!(g[(1, 2)].norm() < 1e-14);
        assert!((g[(4, 4)] - 2.0).norm() < 1e-14);
        assert!((g[(0, 4)] - 1.0).norm() < 1e-14);
        let id = &t * &g * t.adjoint();
        assert!(max_abs_diff(&id, &crate::linalg::eye(6)) < 1e-12);
    }

    #[test]
    fn basis_is_orthonormal_under_its_measure() {
        for measure in [Measure::Nu, Measure::Lebesgue] {
            let b = Basis::new(2, 2, measure).unwrap();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let v = b.inner(b.function(i), b.function(j)).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).norm() < 1e-11, "({i},{j}) {v}");
                }
            }
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(Basis::new(3, 1, Measure::Nu), Err(Error::Guard(_))));
        assert!(matches!(Basis::new(1, 5, Measure::Nu), Err(Error::Guard(_))));
    }

    #[test]
    fn project_synthesize_round_trip() {
        let b = Basis::new(1, 3, Measure::Nu).unwrap();
        let v = FockVector { coeffs: (0..b.len()).map(|i| c(i as f64, 1.0)).collect() };
        let back = b.project(&b.synthesize(&v)).unwrap();
        for (a, w) in back.coeffs.iter().zip(&v.coeffs) {
            assert!((a - w).norm() < 1e-10);
        }
    }
}

//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;

use crate::linalg::C64;

pub type Exponent = Vec<u8>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, C64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C64::new(1.0, 0.0))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    pub fn monomial(exp: Exponent, c: C64) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// `c₀ + Σ cᵢ xᵢ`.
    pub fn linear(c0: C64, coeffs: &[C64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, c0);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != C64::new(0.0, 0.0) {
                let mut e = vec![0; n];
                e[i] = 1;
                p.add_term(e, c);
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u8]) -> C64 {
        self.terms.get(exp).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, exp: Exponent, c: C64) {
        assert_eq!(exp.len(), self.nvars, "exponent length mismatch");
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry(exp).or_default();
        *e += c;
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&v| v as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &xi)| acc * xi.powu(k as u32))
            })
            .sum()
    }

    /// Replace each variable `xᵢ` by `images[i]` (all over the same new
    /// variable set).
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let nnew = images.first().map_or(0, |p| p.nvars);
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars), p.clone()]).collect();
        let mut out = Poly::zero(nnew);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(nnew, *c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(next);
                }
                term = term.mul(&cache[i][k as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Reorder variables: old variable `i` becomes new variable `map[i]` in a
    /// space of `nnew` variables.
    pub fn relabel(&self, nnew: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(nnew);
        for (e, c) in &self.terms {
            let mut ne = vec![0u8; nnew];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] += k;
            }
            out.add_term(ne, *c);
        }
        out
    }

    /// Conjugate coefficients and swap the two halves of the variables, i.e.
    /// `conj(f(w))` written in `w` when `w = (λ, λ̄)`.
    pub fn conj_swap(&self) -> Poly {
        let p = self.nvars / 2;
        let map: Vec<usize> = (0..self.nvars).map(|i| if i < p { i + p } else { i - p }).collect();
        let mut out = self.relabel(self.nvars, &map);
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop exactly-zero coefficients left by cancellation.
    pub fn prune(&mut self) {
        self.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn substitution_expands_binomials() {
        // (x0 + 1)^2 with x0 = y0 + y1
        let p = Poly::linear(c(1.0), &[c(1.0)]).pow(2);
        let img = Poly::linear(c(0.0), &[c(1.0), c(1.0)]);
        let q = p.substitute(&[img]);
        assert_eq!(q.coeff(&[1, 1]), c(2.0));
        assert_eq!(q.coeff(&[0, 0]), c(1.0));
        assert_eq!(q.coeff(&[1, 0]), c(2.0));
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn eval_matches_product() {
        let p = Poly::var(2, 0).mul(&Poly::var(2, 1)).add(&Poly::one(2));
        let v = p.eval(&[C64::new(2.0, 1.0), C64::new(0.0, 3.0)]);
        assert!((v - (C64::new(2.0, 1.0) * C64::new(0.0, 3.0) + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn conj_swap_is_involution() {
        let p = Poly::monomial(vec![2, 0, 1, 1], C64::new(1.0, 2.0));
        let q = p.conj_swap();
        assert_eq!(q.coeff(&[1, 1, 2, 0]), C64::new(1.0, -2.0));
        assert_eq!(q.conj_swap(), p);
    }
}

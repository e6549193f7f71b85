//! Functions `c · exp(−½ wᵀKw + lᵀw) · poly(w)` on `Cᵖ`, written in the
//! doubled coordinates `w = (λ₁..λₚ, λ̄₁..λ̄ₚ)`, and their exact integrals.
//!
//! Real coordinates interleave real and imaginary parts:
//! `λ_k = x_{2k} + i x_{2k+1}`. Lebesgue measure is `dx` over `R²ᵖ`; the
//! unit Gaussian measure `ν` has density `π⁻ᵖ e^{−|λ|²}`.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, eigenvalues, eye, inverse, CMat, CVec, C64};

use super::poly::{Exponent, Poly};

/// Relative tolerance for treating two Gaussian factors as identical.
pub const MERGE_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// Unit Gaussian `π⁻ᵖ e^{−|λ|²} dλ`.
    Nu,
    /// Lebesgue measure on the real coordinates.
    Lebesgue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussPoly {
    p: usize,
    weight: C64,
    k: CMat,
    l: CVec,
    poly: Poly,
}

/// `w = B x` for the interleaved real coordinates.
pub fn real_form_map(p: usize) -> CMat {
    let mut b = CMat::zeros(2 * p, 2 * p);
    for k in 0..p {
        b[(k, 2 * k)] = c(1.0, 0.0);
        b[(k, 2 * k + 1)] = c(0.0, 1.0);
        b[(p + k, 2 * k)] = c(1.0, 0.0);
        b[(p + k, 2 * k + 1)] = c(0.0, -1.0);
    }
    b
}

/// `(2π)^{d/2} det(Σ)^{−1/2}` for a complex symmetric `Σ` with `Re Σ ≻ 0`,
/// on the branch continuous from real positive definite forms.
pub fn gaussian_volume(sigma: &CMat) -> Result<C64> {
    let d = sigma.nrows();
    if d == 0 {
        return Ok(c(1.0, 0.0));
    }
    let re = sigma.map(|v| v.re);
    let re = (&re + re.transpose()) * 0.5;
    let eig = re.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = sigma.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    if !(min > 1e-12 * scale) {
        return Err(Error::NotIntegrable(format!(
            "real part of the quadratic form has minimum eigenvalue {min:.3e}"
        )));
    }
    let ln_det: C64 = eigenvalues(sigma).iter().map(|ev| ev.ln()).sum();
    Ok((c(0.5 * d as f64 * (2.0 * PI).ln(), 0.0) - 0.5 * ln_det).exp())
}

/// `E[wᵅ]` for a Gaussian with the given mean and covariance, memoized.
pub struct Moments<'a> {
    mean: &'a CVec,
    cov: &'a CMat,
    memo: HashMap<Exponent, C64>,
}

impl<'a> Moments<'a> {
    pub fn new(mean: &'a CVec, cov: &'a CMat) -> Self {
        Self { mean, cov, memo: HashMap::new() }
    }

    pub fn get(&mut self, alpha: &[u8]) -> C64 {
        let Some(i) = alpha.iter().position(|&a| a > 0) else {
            return c(1.0, 0.0);
        };
        if let Some(v) = self.memo.get(alpha) {
            return *v;
        }
        let mut beta = alpha.to_vec();
        beta[i] -= 1;
        let mut v = self.mean[i] * self.get(&beta);
        for j in 0..beta.len() {
            if beta[j] == 0 {
                continue;
            }
            let cij = self.cov[(i, j)];
            if cij == c(0.0, 0.0) {
                continue;
            }
            let mut gamma = beta.clone();
            gamma[j] -= 1;
            v += cij * beta[j] as f64 * self.get(&gamma);
        }
        self.memo.insert(alpha.to_vec(), v);
        v
    }

    pub fn expect(&mut self, poly: &Poly) -> C64 {
        poly.terms().map(|(e, coef)| coef * self.get(e)).sum()
    }
}

fn symmetrize(k: &CMat) -> CMat {
    (k + k.transpose()) * c(0.5, 0.0)
}

fn submatrix(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn subvector(v: &CVec, idx: &[usize]) -> CVec {
    CVec::from_fn(idx.len(), |i, _| v[idx[i]])
}

impl GaussPoly {
    /// A polynomial in `w` with no Gaussian factor.
    pub fn polynomial(p: usize, poly: Poly) -> Self {
        assert_eq!(poly.nvars(), 2 * p);
        Self {
            p,
            weight: c(1.0, 0.0),
            k: CMat::zeros(2 * p, 2 * p),
            l: CVec::zeros(2 * p),
            poly,
        }
    }

    pub fn one(p: usize) -> Self {
        Self::polynomial(p, Poly::one(2 * p))
    }

    /// Density of `ν` with respect to Lebesgue measure.
    pub fn nu_density(p: usize) -> Self {
        let mut g = Self::one(p);
        g.weight = c(PI.powi(-(p as i32)), 0.0);
        g.add_hermitian(&eye(p));
        g
    }

    /// `ρ^{1/2}` with `ρ` the density of `ν`.
    pub fn sqrt_nu_density(p: usize) -> Self {
        let mut g = Self::one(p);
        g.weight = c(PI.powf(-(p as f64) / 2.0), 0.0);
        g.add_hermitian(&(eye(p) * c(0.5, 0.0)));
        g
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn weight(&self) -> C64 {
        self.weight
    }

    pub fn quadratic(&self) -> &CMat {
        &self.k
    }

    pub fn linear_term(&self) -> &CVec {
        &self.l
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.weight == c(0.0, 0.0) || self.poly.is_empty()
    }

    /// Multiply by `exp(−λ̄ᵀ Q λ)`.
    pub fn add_hermitian(&mut self, q: &CMat) {
        let p = self.p;
        assert_eq!((q.nrows(), q.ncols()), (p, p));
        for i in 0..p {
            for j in 0..p {
                self.k[(p + i, j)] += q[(i, j)];
                self.k[(j, p + i)] += q[(i, j)];
            }
        }
    }

    /// Multiply by `exp(−λᵀ S λ)`.
    pub fn add_holomorphic(&mut self, s: &CMat) {
        let p = self.p;
        assert_eq!((s.nrows(), s.ncols()), (p, p));
        for i in 0..p {
            for j in 0..p {
                self.k[(i, j)] += s[(i, j)] + s[(j, i)];
            }
        }
    }

    /// Multiply by `exp(−λ̄ᵀ S λ̄)`.
    pub fn add_antiholomorphic(&mut self, s: &CMat) {
        let p = self.p;
        assert_eq!((s.nrows(), s.ncols()), (p, p));
        for i in 0..p {
            for j in 0..p {
                self.k[(p + i, p + j)] += s[(i, j)] + s[(j, i)];
            }
        }
    }

    /// Multiply by `exp(aᵀλ + bᵀλ̄)`.
    pub fn add_linear(&mut self, a: &CVec, b: &CVec) {
        let p = self.p;
        for i in 0..p {
            self.l[i] += a[i];
            self.l[p + i] += b[i];
        }
    }

    /// Multiply by `exp(i Re(aᵀλ))`.
    pub fn add_real_phase(&mut self, a: &CVec) {
        let half_i = c(0.0, 0.5);
        let hol = a.map(|v| half_i * v);
        let anti = a.map(|v| half_i * v.conj());
        self.add_linear(&hol, &anti);
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut g = self.clone();
        g.weight *= s;
        g
    }

    pub fn mul_poly(&self, q: &Poly) -> Self {
        let mut g = self.clone();
        g.poly = g.poly.mul(q);
        g
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "dimension mismatch in product");
        Self {
            p: self.p,
            weight: self.weight * o.weight,
            k: &self.k + &o.k,
            l: &self.l + &o.l,
            poly: self.poly.mul(&o.poly),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        let p = self.p;
        let perm = |i: usize| if i < p { i + p } else { i - p };
        let k = CMat::from_fn(2 * p, 2 * p, |i, j| self.k[(perm(i), perm(j))].conj());
        let l = CVec::from_fn(2 * p, |i, _| self.l[perm(i)].conj());
        Self {
            p,
            weight: self.weight.conj(),
            k,
            l,
            poly: self.poly.conj_swap(),
        }
    }

    /// `f(w) ↦ f(Ŝw + t̂)` for a general affine map from `2p′` new
    /// coordinates to the `2p` old ones.
    pub fn substitute(&self, s_hat: &CMat, t_hat: &CVec) -> Self {
        assert_eq!(s_hat.nrows(), 2 * self.p);
        let nnew = s_hat.ncols();
        assert!(nnew.is_multiple_of(2));
        let kt = &self.k * t_hat;
        let constant = (-0.5 * t_hat.dot(&kt) + self.l.dot(t_hat)).exp();
        let k = symmetrize(&(s_hat.transpose() * &self.k * s_hat));
        let l = s_hat.transpose() * (&self.l - kt);
        let images: Vec<Poly> = (0..2 * self.p)
            .map(|i| {
                let row: Vec<C64> = (0..nnew).map(|j| s_hat[(i, j)]).collect();
                Poly::linear(t_hat[i], &row)
            })
            .collect();
        Self {
            p: nnew / 2,
            weight: self.weight * constant,
            k,
            l,
            poly: self.poly.substitute(&images),
        }
    }

    /// `f(λ) ↦ f(Sλ + t)` for a holomorphic affine map (`S` is `p×p′`).
    pub fn substitute_linear(&self, s: &CMat, t: &CVec) -> Self {
        let (p, q) = (s.nrows(), s.ncols());
        assert_eq!(p, self.p);
        let mut s_hat = CMat::zeros(2 * p, 2 * q);
        for i in 0..p {
            for j in 0..q {
                s_hat[(i, j)] = s[(i, j)];
                s_hat[(p + i, q + j)] = s[(i, j)].conj();
            }
        }
        let mut t_hat = CVec::zeros(2 * p);
        for i in 0..p {
            t_hat[i] = t[i];
            t_hat[p + i] = t[i].conj();
        }
        self.substitute(&s_hat, &t_hat)
    }

    /// View as a function of `p_new ≥ p` coordinates; coordinate `i` becomes
    /// `map[i]`, the others are ignored.
    pub fn embed(&self, p_new: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.p);
        let p = self.p;
        let wmap: Vec<usize> = (0..2 * p)
            .map(|i| if i < p { map[i] } else { p_new + map[i - p] })
            .collect();
        let mut k = CMat::zeros(2 * p_new, 2 * p_new);
        let mut l = CVec::zeros(2 * p_new);
        for i in 0..2 * p {
            l[wmap[i]] = self.l[i];
            for j in 0..2 * p {
                k[(wmap[i], wmap[j])] = self.k[(i, j)];
            }
        }
        Self {
            p: p_new,
            weight: self.weight,
            k,
            l,
            poly: self.poly.relabel(2 * p_new, &wmap),
        }
    }

    pub fn eval(&self, lambda: &[C64]) -> C64 {
        assert_eq!(lambda.len(), self.p);
        let w: Vec<C64> = lambda.iter().copied().chain(lambda.iter().map(|v| v.conj())).collect();
        let wv = CVec::from_vec(w.clone());
        let expo = -0.5 * wv.dot(&(&self.k * &wv)) + self.l.dot(&wv);
        self.weight * expo.exp() * self.poly.eval(&w)
    }

    /// Integral over `Cᵖ` against the given measure.
    pub fn integrate(&self, measure: Measure) -> Result<C64> {
        match measure {
            Measure::Lebesgue => self.integrate_lebesgue(),
            Measure::Nu => self.mul(&Self::nu_density(self.p)).integrate_lebesgue(),
        }
    }

    fn integrate_lebesgue(&self) -> Result<C64> {
        if self.is_zero() {
            return Ok(c(0.0, 0.0));
        }
        let p = self.p;
        let b = real_form_map(p);
        let sigma = symmetrize(&(b.transpose() * &self.k * &b));
        let vol = gaussian_volume(&sigma)?;
        let cov = inverse(&self.k).ok_or_else(|| Error::NotIntegrable("singular form".into()))?;
        let mean = &cov * &self.l;
        let shift = (0.5 * self.l.dot(&mean)).exp();
        let e = Moments::new(&mean, &cov).expect(&self.poly);
        Ok(self.weight * vol * shift * e)
    }

    /// Integrate out the complex coordinates in `inner` against Lebesgue
    /// measure; the remaining coordinates keep their relative order.
    pub fn integrate_partial(&self, inner: &[usize]) -> Result<Self> {
        let p = self.p;
        let mut inner: Vec<usize> = inner.to_vec();
        inner.sort_unstable();
        inner.dedup();
        if inner.iter().any(|&i| i >= p) {
            return Err(Error::DimensionMismatch("inner coordinate out of range".into()));
        }
        let outer: Vec<usize> = (0..p).filter(|i| !inner.contains(i)).collect();
        let (q, pp) = (inner.len(), outer.len());
        let vw: Vec<usize> = inner.iter().copied().chain(inner.iter().map(|i| i + p)).collect();
        let uw: Vec<usize> = outer.iter().copied().chain(outer.iter().map(|i| i + p)).collect();
        let kuu = submatrix(&self.k, &uw, &uw);
        let kuv = submatrix(&self.k, &uw, &vw);
        let kvv = submatrix(&self.k, &vw, &vw);
        let lu = subvector(&self.l, &uw);
        let lv = subvector(&self.l, &vw);

        let b = real_form_map(q);
        let sigma_v = symmetrize(&(b.transpose() * &kvv * &b));
        let vol = gaussian_volume(&sigma_v)?;
        let kvv_inv = inverse(&kvv).ok_or_else(|| Error::NotIntegrable("singular form".into()))?;
        let kvu = kuv.transpose();
        let mean0 = &kvv_inv * &lv;
        let mean_lin = -(&kvv_inv * &kvu);
        let k_new = symmetrize(&(&kuu - &kuv * &kvv_inv * &kvu));
        let l_new = &lu - &kuv * &mean0;
        let weight = self.weight * vol * (0.5 * lv.dot(&mean0)).exp();

        // Old variables in terms of (u, ξ): u stays, v = mean(u) + ξ.
        let nu = 2 * pp;
        let nv = 2 * q;
        let ntot = nu + nv;
        let mut images = vec![Poly::zero(ntot); 2 * p];
        for (r, &wi) in uw.iter().enumerate() {
            images[wi] = Poly::var(ntot, r);
        }
        for (s, &wi) in vw.iter().enumerate() {
            let mut coeffs = vec![c(0.0, 0.0); ntot];
            for r in 0..nu {
                coeffs[r] = mean_lin[(s, r)];
            }
            coeffs[nu + s] = c(1.0, 0.0);
            images[wi] = Poly::linear(mean0[s], &coeffs);
        }
        let expanded = self.poly.substitute(&images);
        let zero = CVec::zeros(nv);
        let mut mom = Moments::new(&zero, &kvv_inv);
        let mut poly = Poly::zero(nu);
        for (e, coef) in expanded.terms() {
            let m = mom.get(&e[nu..]);
            if m != c(0.0, 0.0) {
                poly.add_term(e[..nu].to_vec(), coef * m);
            }
        }
        Ok(Self { p: pp, weight, k: k_new, l: l_new, poly })
    }

    /// Same Gaussian factor up to `MERGE_TOL` (relative).
    fn same_gaussian(&self, o: &Self) -> bool {
        if self.p != o.p {
            return false;
        }
        let scale = 1.0 + crate::linalg::max_abs(&self.k).max(self.l.iter().map(|v| v.norm()).fold(0.0, f64::max));
        let dk = (&self.k - &o.k).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let dl = (&self.l - &o.l).iter().map(|v| v.norm()).fold(0.0, f64::max);
        dk <= MERGE_TOL * scale && dl <= MERGE_TOL * scale
    }
}

/// Finite sum of [`GaussPoly`] terms; terms with the same Gaussian factor are
/// merged so that differences cancel at the coefficient level.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussSum {
    p: usize,
    terms: Vec<GaussPoly>,
}

impl GaussSum {
    pub fn zero(p: usize) -> Self {
        Self { p, terms: Vec::new() }
    }

    pub fn from_term(t: GaussPoly) -> Self {
        let mut s = Self::zero(t.p);
        s.push(t);
        s
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn terms(&self) -> &[GaussPoly] {
        &self.terms
    }

    pub fn push(&mut self, t: GaussPoly) {
        assert_eq!(t.p, self.p, "dimension mismatch in sum");
        if t.is_zero() {
            return;
        }
        for e in &mut self.terms {
            if e.same_gaussian(&t) {
                if e.weight == c(0.0, 0.0) {
                    continue;
                }
                let ratio = t.weight / e.weight;
                e.poly = e.poly.add(&t.poly.scale(ratio));
                e.poly.prune();
                return;
            }
        }
        self.terms.push(t);
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for t in &o.terms {
            s.push(t.clone());
        }
        s
    }

    pub fn scale(&self, f: C64) -> Self {
        Self {
            p: self.p,
            terms: self.terms.iter().map(|t| t.scale(f)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(c(-1.0, 0.0)))
    }

    /// Apply a term-wise linear map.
    pub fn map(&self, f: impl Fn(&GaussPoly) -> Result<GaussSum>) -> Result<Self> {
        let mut out: Option<Self> = None;
        for t in &self.terms {
            let img = f(t)?;
            out = Some(match out {
                None => img,
                Some(acc) => acc.add(&img),
            });
        }
        Ok(out.unwrap_or_else(|| Self::zero(self.p)))
    }

    pub fn eval(&self, lambda: &[C64]) -> C64 {
        self.terms.iter().map(|t| t.eval(lambda)).sum()
    }

    /// `∫ f ḡ dμ`.
    pub fn inner(&self, o: &Self, measure: Measure) -> Result<C64> {
        let mut acc = c(0.0, 0.0);
        for a in &self.terms {
            for b in &o.terms {
                acc += a.mul(&b.conj()).integrate(measure)?;
            }
        }
        Ok(acc)
    }
}

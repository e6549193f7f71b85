//! Gaussian integrands in real coordinates: closed-form evaluation and a
//! tensor Gauss–Hermite cross-check.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c, inverse, CMat, CVec, C64};

use super::gausspoly::{gaussian_volume, real_form_map, GaussPoly, Measure, Moments};
use super::poly::Poly;

/// Largest real dimension accepted by the quadrature cross-check.
pub const QUADRATURE_MAX_DIM: usize = 4;
pub const DEFAULT_NODES: usize = 20;

/// `scale · ∫ p(x) exp(−½ xᵀΣx + bᵀx) dx` over `Rᵈ`.
#[derive(Clone, Debug)]
pub struct GaussianIntegrand {
    pub sigma: CMat,
    pub b: CVec,
    pub poly: Poly,
    pub scale: C64,
}

impl GaussianIntegrand {
    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    /// The real-coordinate form of `∫ f dμ` for a function on `Cᵖ`.
    pub fn from_gauss_poly(f: &GaussPoly, measure: Measure) -> Self {
        let f = match measure {
            Measure::Nu => f.mul(&GaussPoly::nu_density(f.dim())),
            Measure::Lebesgue => f.clone(),
        };
        let p = f.dim();
        let bmap = real_form_map(p);
        let sigma = bmap.transpose() * f.quadratic() * &bmap;
        let sigma = (&sigma + sigma.transpose()) * c(0.5, 0.0);
        let b = bmap.transpose() * f.linear_term();
        let images: Vec<Poly> = (0..2 * p)
            .map(|i| {
                let row: Vec<C64> = (0..2 * p).map(|j| bmap[(i, j)]).collect();
                Poly::linear(c(0.0, 0.0), &row)
            })
            .collect();
        Self {
            sigma,
            b,
            poly: f.poly().substitute(&images),
            scale: f.weight(),
        }
    }

    fn integrand_at(&self, x: &[f64]) -> C64 {
        let xv = CVec::from_iterator(x.len(), x.iter().map(|&v| c(v, 0.0)));
        let expo = -0.5 * xv.dot(&(&self.sigma * &xv)) + self.b.dot(&xv);
        self.scale * expo.exp() * self.poly.eval(xv.as_slice())
    }
}

/// Closed-form value via the Gaussian volume and moment recursion.
pub fn wick_integrate(f: &GaussianIntegrand) -> Result<C64> {
    let d = f.dim();
    if f.b.len() != d || f.poly.nvars() != d {
        return Err(Error::DimensionMismatch("integrand parts disagree on dimension".into()));
    }
    let vol = gaussian_volume(&f.sigma)?;
    let cov = inverse(&f.sigma).ok_or_else(|| Error::NotIntegrable("singular form".into()))?;
    let mean = &cov * &f.b;
    let shift = (0.5 * f.b.dot(&mean)).exp();
    Ok(f.scale * vol * shift * Moments::new(&mean, &cov).expect(&f.poly))
}

/// Gauss–Hermite nodes and weights for the weight `e^{−t²}`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let v = (k as f64 / 2.0).sqrt();
        jac[(k, k - 1)] = v;
        jac[(k - 1, k)] = v;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Tensor Gauss–Hermite rule adapted to `Re Σ`; `d ≤ 4`.
pub fn quadrature_integrate(f: &GaussianIntegrand, nodes: usize) -> Result<C64> {
    let d = f.dim();
    if d > QUADRATURE_MAX_DIM {
        return Err(Error::Guard(format!(
            "quadrature dimension {d} exceeds {QUADRATURE_MAX_DIM}"
        )));
    }
    if nodes == 0 {
        return Err(Error::Guard("need at least one node".into()));
    }
    if d == 0 {
        return Ok(f.integrand_at(&[]));
    }
    let re = f.sigma.map(|v| v.re);
    let re = (&re + re.transpose()) * 0.5;
    let chol = re
        .cholesky()
        .ok_or_else(|| Error::NotIntegrable("real part not positive definite".into()))?;
    let l = chol.l();
    let lt_inv = l
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::NotIntegrable("singular real part".into()))?;
    let det_l: f64 = (0..d).map(|i| l[(i, i)]).product();
    // x = √2 L⁻ᵀ t turns −½xᵀ(ReΣ)x into −tᵀt.
    let jac = 2f64.powf(d as f64 / 2.0) / det_l;
    let (t, w) = gauss_hermite(nodes);
    let mut idx = vec![0usize; d];
    let mut acc = c(0.0, 0.0);
    let sqrt2 = 2f64.sqrt();
    loop {
        let tv: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
        let weight: f64 = idx.iter().map(|&i| w[i]).product();
        let x: Vec<f64> = (0..d)
            .map(|r| sqrt2 * (0..d).map(|s| lt_inv[(r, s)] * tv[s]).sum::<f64>())
            .collect();
        let tt: f64 = tv.iter().map(|v| v * v).sum();
        acc += f.integrand_at(&x) * (weight * tt.exp());
        // odometer over the tensor grid, last axis fastest
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(acc * jac);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < nodes {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eye;

    fn nu1(poly: Poly, extra: f64) -> GaussianIntegrand {
        let mut f = GaussPoly::polynomial(1, poly);
        f.add_hermitian(&(eye(1) * c(extra, 0.0)));
        GaussianIntegrand::from_gauss_poly(&f, Measure::Nu)
    }

    #[test]
    fn hermite_rule_moments() {
        let (t, w) = gauss_hermite(10);
        let m0: f64 = w.iter().sum();
        let m2: f64 = t.iter().zip(&w).map(|(x, w)| x * x * w).sum();
        assert!((m0 - PI.sqrt()).abs() < 1e-13);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn three_reference_integrals() {
        let cases = [
            (Poly::one(2), 0.0, 1.0),
            (Poly::monomial(vec![1, 1], c(1.0, 0.0)), 0.0, 1.0),
            (Poly::one(2), 1.5, 0.4),
        ];
        for (poly, extra, want) in cases {
            let f = nu1(poly, extra);
            let w = wick_integrate(&f).unwrap();
            let q = quadrature_integrate(&f, DEFAULT_NODES).unwrap();
            assert!((w - want).norm() < 1e-13, "{w}");
            assert!((q - want).norm() < 1e-8, "{q}");
        }
    }

    #[test]
    fn odd_monomial_vanishes() {
        let f = nu1(Poly::monomial(vec![1, 0], c(1.0, 0.0)), 0.0);
        assert!(quadrature_integrate(&f, DEFAULT_NODES).unwrap().norm() < 1e-12);
        assert!(wick_integrate(&f).unwrap().norm() < 1e-15);
    }

    #[test]
    fn dimension_guard() {
        let f = GaussianIntegrand::from_gauss_poly(&GaussPoly::one(3), Measure::Nu);
        assert!(matches!(quadrature_integrate(&f, 4), Err(Error::Guard(_))));
    }
}

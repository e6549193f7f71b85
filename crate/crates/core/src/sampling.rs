//! Seeded random inputs shared by the certificate suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, CMat};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit(rng: &mut Rng64) -> f64 {
    rng.gen_range(-1.0..1.0)
}

pub fn random_complex(rng: &mut Rng64, rows: usize, cols: usize, scale: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(scale * unit(rng), scale * unit(rng)))
}

pub fn random_hermitian(rng: &mut Rng64, n: usize, scale: f64) -> CMat {
    let m = random_complex(rng, n, n, scale);
    (&m + m.adjoint()) * c(0.5, 0.0)
}

/// Haar-distributed unitary (QR of a complex Gaussian matrix).
pub fn random_unitary(rng: &mut Rng64, n: usize) -> CMat {
    let z = CMat::from_fn(n, n, |_, _| {
        let (x, y): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
        c(x, y)
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_fn(n, n, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / r[(i, i)].norm()
        } else {
            c(0.0, 0.0)
        }
    });
    q * phases
}

/// `U diag(s) V` with singular values in `[lo, hi]`.
pub fn random_invertible(rng: &mut Rng64, n: usize, lo: f64, hi: f64) -> CMat {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let s = CMat::from_fn(n, n, |i, j| if i == j { c(rng.gen_range(lo..hi), 0.0) } else { c(0.0, 0.0) });
    u * s * v
}

/// `u diag(s) u*` with `s ∈ [lo, hi]`: diagonalizable with positive spectrum
/// when `u` is unitary.
pub fn random_diagonalizable(rng: &mut Rng64, n: usize, lo: f64, hi: f64) -> CMat {
    let u = random_unitary(rng, n);
    let s = CMat::from_fn(n, n, |i, j| if i == j { c(rng.gen_range(lo..hi), 0.0) } else { c(0.0, 0.0) });
    &u * s * u.adjoint()
}

/// Hermitian `A` with `A = −Aᵗ` (purely imaginary antisymmetric).
pub fn random_sp_hermitian(rng: &mut Rng64, q: usize) -> CMat {
    let mut b = CMat::zeros(q, q);
    for i in 0..q {
        for j in (i + 1)..q {
            let v = unit(rng);
            b[(i, j)] = c(0.0, v);
            b[(j, i)] = c(0.0, -v);
        }
    }
    b
}

/// Hermitian `A` with `Aᵗ = −PAP⁻¹`: `[[X, Y], [Y*, −X̄]]`, `X` Hermitian,
/// `Y` symmetric.
pub fn random_o_hermitian(rng: &mut Rng64, k: usize) -> CMat {
    let mut x = CMat::zeros(k, k);
    let mut y = CMat::zeros(k, k);
    for i in 0..k {
        x[(i, i)] = c(unit(rng), 0.0);
        y[(i, i)] = c(unit(rng), unit(rng));
        for j in (i + 1)..k {
            let v = c(unit(rng), unit(rng));
            x[(i, j)] = v;
            x[(j, i)] = v.conj();
            let u = c(unit(rng), unit(rng));
            y[(i, j)] = u;
            y[(j, i)] = u;
        }
    }
    let mut a = CMat::zeros(2 * k, 2 * k);
    a.view_mut((0, 0), (k, k)).copy_from(&x);
    a.view_mut((0, k), (k, k)).copy_from(&y);
    a.view_mut((k, 0), (k, k)).copy_from(&y.adjoint());
    a.view_mut((k, k), (k, k)).copy_from(&(-x.map(|z| z.conj())));
    a
}

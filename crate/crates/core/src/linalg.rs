//! Dense complex/real helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn spectral_norm_real(m: &RMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Spectral norm of a real symmetric matrix (largest |eigenvalue|).
pub fn symmetric_norm(m: &RMat) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// `exp(i·t·h)` for Hermitian `h`, via its eigendecomposition. The result is
/// unitary to rounding.
pub fn expm_i_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l * t)),
    );
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// Complex Ginibre matrix with E|z|² = 1.
pub fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Writes the digits of `x` in base `q`, most significant first.
pub fn digits(mut x: usize, q: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = x % q;
        x /= q;
    }
}

pub fn from_digits(ds: &[usize], q: usize) -> usize {
    ds.iter().fold(0, |acc, &d| acc * q + d)
}

/// Embeds an operator acting on `sites` (in the given order, first site most
/// significant) into `n` sites of local dimension `q`. Site 0 is the most
/// significant digit of the global index.
pub fn embed<T>(op: &DMatrix<T>, sites: &[usize], n: usize, q: usize) -> DMatrix<T>
where
    T: nalgebra::Scalar + num_traits_zero::Zero + Copy,
{
    let dim = q.pow(n as u32);
    let loc = q.pow(sites.len() as u32);
    assert_eq!(op.nrows(), loc);
    let mut out = DMatrix::<T>::from_element(dim, dim, T::zero());
    let mut xd = vec![0usize; n];
    let mut local = vec![0usize; sites.len()];
    for x in 0..dim {
        digits(x, q, &mut xd);
        for (s, &site) in sites.iter().enumerate() {
            local[s] = xd[site];
        }
        let col_local = from_digits(&local, q);
        let mut yd = xd.clone();
        for row_local in 0..loc {
            let v = op[(row_local, col_local)];
            if v.is_zero() {
                continue;
            }
            let mut r = row_local;
            for &site in sites.iter().rev() {
                yd[site] = r % q;
                r /= q;
            }
            let y = from_digits(&yd, q);
            out[(y, x)] = v;
        }
    }
    out
}

/// Minimal zero trait so `embed` serves both real and complex matrices.
pub mod num_traits_zero {
    pub trait Zero {
        fn zero() -> Self;
        fn is_zero(&self) -> bool;
    }
    impl Zero for f64 {
        fn zero() -> Self {
            0.0
        }
        fn is_zero(&self) -> bool {
            *self == 0.0
        }
    }
    impl Zero for super::C64 {
        fn zero() -> Self {
            super::ZERO
        }
        fn is_zero(&self) -> bool {
            self.re == 0.0 && self.im == 0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Smallest,
    Largest,
}

#[derive(Debug, Clone)]
pub struct LanczosResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Extremal eigenvalue of a real symmetric operator restricted to the
/// orthogonal complement of `deflate` (whose vectors must be orthonormal).
/// Full reorthogonalization; stops when the Ritz residual drops below `tol`.
pub fn lanczos<F, R>(
    apply: F,
    dim: usize,
    deflate: &[DVector<f64>],
    which: Extremal,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<LanczosResult>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    R: Rng + ?Sized,
{
    let project = |v: &mut DVector<f64>| {
        for k in deflate {
            let ov = k.dot(v);
            v.axpy(-ov, k, 1.0);
        }
    };
    let mut v = DVector::<f64>::from_fn(dim, |_, _| rng.sample(StandardNormal));
    project(&mut v);
    let nv = v.norm();
    if nv < 1e-300 {
        return Err(Error::InvalidInput("deflation space spans everything".into()));
    }
    v /= nv;

    let mut basis: Vec<DVector<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let cap = max_iter.min(dim.saturating_sub(deflate.len())).max(1);
    let mut last = LanczosResult {
        value: f64::NAN,
        residual: f64::INFINITY,
        iterations: 0,
    };
    for j in 0..cap {
        let mut w = apply(&basis[j]);
        let a = basis[j].dot(&w);
        alphas.push(a);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            project(&mut w);
            for b in &basis {
                let ov = b.dot(&w);
                w.axpy(-ov, b, 1.0);
            }
        }
        let b = w.norm();

        let m = alphas.len();
        let mut t = RMat::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = t.symmetric_eigen();
        let idx = match which {
            Extremal::Smallest => (0..m)
                .min_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
                .unwrap(),
            Extremal::Largest => (0..m)
                .max_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
                .unwrap(),
        };
        let value = eig.eigenvalues[idx];
        let residual = (b * eig.eigenvectors[(m - 1, idx)]).abs();
        last = LanczosResult {
            value,
            residual,
            iterations: m,
        };
        if residual < tol || b < 1e-14 {
            return Ok(last);
        }
        betas.push(b);
        basis.push(w / b);
    }
    if last.residual < tol.max(1e-8) {
        Ok(last)
    } else {
        Err(Error::NoConvergence(format!(
            "lanczos stopped after {} iterations with residual {:e}",
            last.iterations, last.residual
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn expm_of_pauli_z() {
        let z = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let u = expm_i_hermitian(&z, 0.3);
        assert!((u[(0, 0)] - C64::from_polar(1.0, 0.3)).norm() < 1e-14);
        assert!((u[(1, 1)] - C64::from_polar(1.0, -0.3)).norm() < 1e-14);
    }

    #[test]
    fn embed_matches_kronecker() {
        let mut rng = seeded(1);
        let a = ginibre(2, &mut rng);
        let id = CMat::identity(2, 2);
        let e = embed(&a, &[1], 3, 2);
        let k = id.kronecker(&a).kronecker(&id);
        assert!((e - k).norm() < 1e-14);
        let b = ginibre(4, &mut rng);
        let e = embed(&b, &[0, 1], 3, 2);
        let k = b.kronecker(&id);
        assert!((e - k).norm() < 1e-14);
    }

    #[test]
    fn embed_reversed_sites_is_swap_conjugate() {
        let mut rng = seeded(2);
        let b = ginibre(4, &mut rng);
        let swap = CMat::from_fn(4, 4, |i, j| {
            let (a1, a0) = (i / 2, i % 2);
            if j == a0 * 2 + a1 {
                ONE
            } else {
                ZERO
            }
        });
        let e = embed(&b, &[1, 0], 2, 2);
        let expect = &swap * &b * &swap;
        assert!((e - expect).norm() < 1e-14);
    }

    #[test]
    fn lanczos_finds_deflated_minimum() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let m = RMat::from_diagonal(&DVector::from_vec(diag));
        let mut e0 = DVector::zeros(n);
        e0[0] = 1.0;
        let mut rng = seeded(3);
        let r = lanczos(|v| &m * v, n, &[e0], Extremal::Smallest, 1e-10, 200, &mut rng).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        let r = lanczos(|v| &m * v, n, &[], Extremal::Largest, 1e-10, 200, &mut rng).unwrap();
        assert!((r.value - 19.5).abs() < 1e-9);
    }
}

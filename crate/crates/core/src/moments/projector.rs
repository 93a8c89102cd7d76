//! Permutation vectors, the Haar moment projector and moment-operator layouts.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{digits, from_digits, spectral_norm, CMat, RMat, C64};

/// Default cap on `D^{2k}` for dense moment operators.
pub const DEFAULT_OPERATOR_CAP: usize = 4096;
/// Relative eigenvalue cutoff when orthonormalizing permutation vectors.
pub const GRAM_CUTOFF: f64 = 1e-10;

/// Index layout of a `D^{2k}`-dimensional moment operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// `(i₁…i_k, j₁…j_k)`, each index in base `D`.
    Natural,
    /// Site by site `(a₁…a_k, b₁…b_k)` for `n` sites of local dimension `q`.
    SiteMajor { n: usize, q: usize },
}

#[derive(Debug, Clone)]
pub struct MomentOperator {
    pub k: usize,
    pub base_dim: usize,
    pub layout: Layout,
    pub matrix: CMat,
}

impl MomentOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectral-norm distance, after bringing both to the natural layout.
    pub fn distance(&self, other: &MomentOperator) -> Result<f64> {
        if self.k != other.k || self.base_dim != other.base_dim {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let a = self.to_natural();
        let b = other.to_natural();
        Ok(spectral_norm(&(a.matrix - b.matrix)))
    }

    pub fn to_natural(&self) -> MomentOperator {
        match self.layout {
            Layout::Natural => self.clone(),
            Layout::SiteMajor { n, q } => {
                let perm = natural_to_site_major(n, q, self.k);
                let m = &self.matrix;
                MomentOperator {
                    k: self.k,
                    base_dim: self.base_dim,
                    layout: Layout::Natural,
                    matrix: CMat::from_fn(m.nrows(), m.ncols(), |r, c| m[(perm[r], perm[c])]),
                }
            }
        }
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }
}

pub(crate) fn check_cap(what: &str, required: usize, cap: usize) -> Result<()> {
    if required > cap {
        Err(Error::Capacity {
            what: what.into(),
            required,
            cap,
        })
    } else {
        Ok(())
    }
}

/// `base^exp`, rejected when it exceeds `cap`.
pub(crate) fn checked_pow(base: usize, exp: usize, what: &str, cap: usize) -> Result<usize> {
    let required = (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base)).unwrap_or(usize::MAX);
    check_cap(what, required, cap)?;
    Ok(required)
}

/// All permutations of `0..k` in lexicographic order; the identity comes first.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

pub fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for s in 0..p.len() {
        if !seen[s] {
            cycles += 1;
            let mut t = s;
            while !seen[t] {
                seen[t] = true;
                t = p[t];
            }
        }
    }
    cycles
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (s, &t) in p.iter().enumerate() {
        inv[t] = s;
    }
    inv
}

/// `π⁻¹σ`.
pub fn relative(pi: &[usize], sigma: &[usize]) -> Vec<usize> {
    let inv = inverse(pi);
    sigma.iter().map(|&t| inv[t]).collect()
}

/// `vec(P_π)` in the natural layout on `D^{2k}`: entry 1 where
/// `i_s = j_{π(s)}` for every `s`.
pub fn perm_vector(pi: &[usize], d: usize, k: usize) -> DVector<f64> {
    let dk = d.pow(k as u32);
    let mut v = DVector::zeros(dk * dk);
    let mut is = vec![0usize; k];
    let mut js = vec![0usize; k];
    for i in 0..dk {
        digits(i, d, &mut is);
        for s in 0..k {
            js[pi[s]] = is[s];
        }
        v[i * dk + from_digits(&js, d)] = 1.0;
    }
    v
}

/// `G_{πσ} = D^{#cycles(π⁻¹σ)}`.
pub fn permutation_gram(d: usize, k: usize) -> RMat {
    let perms = permutations(k);
    let m = perms.len();
    RMat::from_fn(m, m, |a, b| (d as f64).powi(cycle_count(&relative(&perms[a], &perms[b])) as i32))
}

/// Orthonormal basis of `span(vectors)` given their Gram matrix, dropping
/// directions with Gram eigenvalue below `GRAM_CUTOFF · λ_max`.
pub fn orthonormal_span(vectors: &[DVector<f64>], gram: &RMat) -> Vec<DVector<f64>> {
    let eig = gram.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (m, &l) in eig.eigenvalues.iter().enumerate() {
        if l > GRAM_CUTOFF * lmax {
            let mut q = DVector::zeros(vectors[0].len());
            for (p, v) in vectors.iter().enumerate() {
                q.axpy(eig.eigenvectors[(p, m)] / l.sqrt(), v, 1.0);
            }
            out.push(q);
        }
    }
    out
}

pub fn projector_from_basis(basis: &[DVector<f64>], dim: usize) -> RMat {
    let mut p = RMat::zeros(dim, dim);
    for q in basis {
        p.ger(1.0, q, q, 1.0);
    }
    p
}

pub fn real_to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// `∫ U^{⊗k} ⊗ Ū^{⊗k} dU` over Haar on `U(D)`.
pub fn haar_moment_projector(d: usize, k: usize) -> Result<MomentOperator> {
    haar_moment_projector_capped(d, k, DEFAULT_OPERATOR_CAP)
}

pub fn haar_moment_projector_capped(d: usize, k: usize, cap: usize) -> Result<MomentOperator> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidDimension(format!("D = {d}, k = {k}")));
    }
    let dim = checked_pow(d, 2 * k, "Haar moment projector D^{2k}", cap)?;
    let perms = permutations(k);
    let vecs: Vec<_> = perms.iter().map(|p| perm_vector(p, d, k)).collect();
    let basis = orthonormal_span(&vecs, &permutation_gram(d, k));
    Ok(MomentOperator {
        k,
        base_dim: d,
        layout: Layout::Natural,
        matrix: real_to_complex(&projector_from_basis(&basis, dim)),
    })
}

/// `perm[natural] = site_major` for `n` sites of local dimension `q`.
pub fn natural_to_site_major(n: usize, q: usize, k: usize) -> Vec<usize> {
    let d = q.pow(n as u32);
    let dim = d.pow(2 * k as u32);
    let mut outer = vec![0usize; 2 * k];
    let mut site = vec![0usize; n];
    let mut sm = vec![0usize; 2 * k * n];
    (0..dim)
        .map(|x| {
            digits(x, d, &mut outer);
            for (slot, &idx) in outer.iter().enumerate() {
                digits(idx, q, &mut site);
                for t in 0..n {
                    sm[t * 2 * k + slot] = site[t];
                }
            }
            from_digits(&sm, q)
        })
        .collect()
}

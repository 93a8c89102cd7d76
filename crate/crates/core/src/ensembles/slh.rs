//! Stochastic local Hamiltonian increments.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed, expm_i_hermitian, CMat, C64, ZERO};
use crate::qmath::Unitary;

/// Trace normalization of the local Hermitian basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `tr(A_μ A_ν) = δ_{μν}/q²`: `Σ_μ A_μ² = I`, so the one-edge drift is `−1/2`.
    #[default]
    CasimirUnit,
    /// `2q² tr(A_μ A_ν) = δ_{μν}`: half the above, drift `−1/4` per edge.
    Killing2q2,
}

impl Normalization {
    /// The constant `c` in `tr(A_μ A_ν) = c δ_{μν}` on dimension `q²`.
    pub fn trace_constant(&self, q: usize) -> f64 {
        let q2 = (q * q) as f64;
        match self {
            Normalization::CasimirUnit => 1.0 / q2,
            Normalization::Killing2q2 => 1.0 / (2.0 * q2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SlhIncrementBasis {
    pub q: usize,
    pub ops: Vec<CMat>,
    pub normalization: Normalization,
}

/// Generalized Gell-Mann matrices on dimension `D` (`tr(λ_a λ_b) = 2δ`),
/// followed by the identity.
pub fn gell_mann_with_identity(dim: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(dim * dim);
    let unit = |r: usize, c: usize| {
        let mut m = CMat::from_element(dim, dim, ZERO);
        m[(r, c)] = C64::new(1.0, 0.0);
        m
    };
    for j in 0..dim {
        for k in j + 1..dim {
            out.push(unit(j, k) + unit(k, j));
            out.push((unit(j, k) - unit(k, j)) * C64::new(0.0, -1.0));
        }
    }
    for l in 1..dim {
        let s = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMat::from_element(dim, dim, ZERO);
        for j in 0..l {
            m[(j, j)] = C64::new(s, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * s, 0.0);
        out.push(m);
    }
    out.push(CMat::identity(dim, dim));
    out
}

impl SlhIncrementBasis {
    pub fn new(q: usize, normalization: Normalization) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(format!("local dimension {q}")));
        }
        let dim = q * q;
        let c = normalization.trace_constant(q);
        let ops = gell_mann_with_identity(dim)
            .into_iter()
            .map(|m| {
                let tr = (&m * &m).trace().re;
                m * C64::new((c / tr).sqrt(), 0.0)
            })
            .collect();
        Ok(SlhIncrementBasis { q, ops, normalization })
    }

    /// Largest deviation of `tr(A_μ A_ν)/c` from `δ_{μν}`.
    pub fn orthonormality_defect(&self) -> f64 {
        let c = self.normalization.trace_constant(self.q);
        let mut worst: f64 = 0.0;
        for (i, a) in self.ops.iter().enumerate() {
            for (j, b) in self.ops.iter().enumerate() {
                let t = (a * b).trace() / c;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((t - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `Σ_μ ξ_μ A_μ` with `ξ_μ ~ N(0, 1/dt)`.
    pub fn sample_local<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> CMat {
        let normal = Normal::new(0.0, (1.0 / dt).sqrt()).unwrap();
        let dim = self.q * self.q;
        let mut h = CMat::from_element(dim, dim, ZERO);
        for a in &self.ops {
            let xi: f64 = normal.sample(rng);
            h += a * C64::new(xi, 0.0);
        }
        h
    }
}

/// One increment `exp(i H dt)` with `H = Σ_e Σ_μ ξ^{(e,μ)} A_μ^{(e)}`.
pub fn slh_increment<R: Rng + ?Sized>(
    basis: &SlhIncrementBasis,
    edges: &[(usize, usize)],
    n: usize,
    dt: f64,
    rng: &mut R,
) -> Result<Unitary> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("time step dt = {dt} must be positive")));
    }
    let q = basis.q;
    let d = q.pow(n as u32);
    let mut h = CMat::from_element(d, d, ZERO);
    for &(a, b) in edges {
        let local = basis.sample_local(dt, rng);
        if n == 2 && (a, b) == (0, 1) {
            h += local;
        } else {
            h += embed(&local, &[a, b], n, q);
        }
    }
    Ok(Unitary::trusted(expm_i_hermitian(&h, dt)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_are_orthonormal() {
        for q in [2, 3] {
            for norm in [Normalization::CasimirUnit, Normalization::Killing2q2] {
                let b = SlhIncrementBasis::new(q, norm).unwrap();
                assert_eq!(b.ops.len(), q.pow(4));
                assert!(b.orthonormality_defect() < 1e-10);
                for a in &b.ops {
                    assert!((a - a.adjoint()).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn killing_invariant_literal() {
        let b = SlhIncrementBasis::new(2, Normalization::Killing2q2).unwrap();
        for a in &b.ops {
            assert!((2.0 * 4.0 * (a * a).trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn casimir_sum_is_identity() {
        let b = SlhIncrementBasis::new(2, Normalization::CasimirUnit).unwrap();
        let s = b.ops.iter().fold(CMat::zeros(4, 4), |acc, a| acc + a * a);
        assert!((s - CMat::identity(4, 4)).norm() < 1e-12);
    }
}

//! The frustration-free design Hamiltonian `Σ_e (I − P_H)_e`, its gap, and
//! the exact one-step moment operator of a local random circuit.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::projector::{
    checked_pow, orthonormal_span, permutations, perm_vector, projector_from_basis,
    real_to_complex, relative, cycle_count, Layout, MomentOperator, DEFAULT_OPERATOR_CAP,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{embed, lanczos, symmetric_norm, Extremal, RMat};
use crate::rng::seeded;

/// Eigenvalues below this are counted as kernel.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HamiltonianCaps {
    /// Largest total dimension diagonalized densely.
    pub dense_max: usize,
    /// Largest total dimension handled at all.
    pub total_max: usize,
}

impl Default for HamiltonianCaps {
    fn default() -> Self {
        HamiltonianCaps {
            dense_max: 1024,
            total_max: 1 << 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignHamiltonian {
    pub n: usize,
    pub q: usize,
    pub k: usize,
    pub graph: Graph,
    /// `q^{2k}`.
    pub local_dim: usize,
    /// Orthonormal columns spanning the range of the two-site `P_H`.
    two_site: RMat,
    dense: Option<RMat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Dense,
    Iterative,
}

impl std::fmt::Display for GapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GapMethod::Dense => "dense",
            GapMethod::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub gap: f64,
    /// `1 − Δ/|E|`.
    pub expander_norm: f64,
    /// `1 − Δ/n`, the per-site normalization used for chains in the literature.
    pub expander_norm_per_site: f64,
    pub edges: usize,
    pub n: usize,
    pub method: GapMethod,
    pub kernel_dim: usize,
    pub lambda_min: f64,
    /// `‖H w‖` for each known kernel vector, then the Ritz residual when iterative.
    pub residuals: Vec<f64>,
}

/// Two-site invariant vectors `v_π ⊗ v_π` in site-major order.
fn two_site_basis(q: usize, k: usize) -> RMat {
    let perms = permutations(k);
    let vecs: Vec<DVector<f64>> = perms
        .iter()
        .map(|p| {
            let v = perm_vector(p, q, k);
            kron_vec(&v, &v)
        })
        .collect();
    let gram = RMat::from_fn(perms.len(), perms.len(), |a, b| {
        ((q * q) as f64).powi(cycle_count(&relative(&perms[a], &perms[b])) as i32)
    });
    let basis = orthonormal_span(&vecs, &gram);
    RMat::from_columns(&basis)
}

fn kron_vec(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(a.len() * b.len(), |i, _| a[i / b.len()] * b[i % b.len()])
}

/// `P_H` on two sites of dimension `q^{2k}`, site-major.
pub fn two_site_projector(q: usize, k: usize) -> RMat {
    let b = two_site_basis(q, k);
    &b * b.transpose()
}

pub fn design_hamiltonian(n: usize, q: usize, k: usize, graph: &Graph) -> Result<DesignHamiltonian> {
    design_hamiltonian_with(n, q, k, graph, HamiltonianCaps::default())
}

pub fn design_hamiltonian_with(
    n: usize,
    q: usize,
    k: usize,
    graph: &Graph,
    caps: HamiltonianCaps,
) -> Result<DesignHamiltonian> {
    if n < 2 || q < 2 || k < 1 {
        return Err(Error::InvalidDimension(format!("n = {n}, q = {q}, k = {k}")));
    }
    if graph.n != n {
        return Err(Error::Architecture(format!("graph has {} sites, expected {n}", graph.n)));
    }
    graph.require_hamiltonian_path()?;
    let local_dim = q.pow(2 * k as u32);
    let dim = checked_pow(local_dim, n, "design Hamiltonian q^{2kn}", caps.total_max)?;
    let two_site = two_site_basis(q, k);
    let dense = if dim <= caps.dense_max {
        let local = RMat::identity(local_dim * local_dim, local_dim * local_dim) - &two_site * two_site.transpose();
        let mut h = RMat::zeros(dim, dim);
        for &(a, b) in &graph.edges {
            h += embed(&local, &[a, b], n, local_dim);
        }
        Some(h)
    } else {
        None
    };
    Ok(DesignHamiltonian {
        n,
        q,
        k,
        graph: graph.clone(),
        local_dim,
        two_site,
        dense,
    })
}

impl DesignHamiltonian {
    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.n as u32)
    }

    pub fn dense(&self) -> Option<&RMat> {
        self.dense.as_ref()
    }

    /// `Σ_e P_e v`, matrix-free.
    fn apply_projectors(&self, v: &DVector<f64>) -> DVector<f64> {
        let l = self.local_dim;
        let n = self.n;
        let dim = v.len();
        let stride = |t: usize| l.pow((n - 1 - t) as u32);
        let r = self.two_site.ncols();
        let mut out = DVector::zeros(dim);
        let mut sub = DVector::<f64>::zeros(l * l);
        let mut idx = vec![0usize; l * l];
        for &(a, b) in &self.graph.edges {
            let (sa, sb) = (stride(a), stride(b));
            for base in 0..dim {
                if (base / sa) % l != 0 || (base / sb) % l != 0 {
                    continue;
                }
                for x in 0..l {
                    for y in 0..l {
                        let i = base + x * sa + y * sb;
                        idx[x * l + y] = i;
                        sub[x * l + y] = v[i];
                    }
                }
                for c in 0..r {
                    let col = self.two_site.column(c);
                    let coef = col.dot(&sub);
                    if coef != 0.0 {
                        for (m, &i) in idx.iter().enumerate() {
                            out[i] += coef * col[m];
                        }
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.dense {
            Some(h) => h * v,
            None => v * self.graph.num_edges() as f64 - self.apply_projectors(v),
        }
    }

    /// Orthonormal basis of `span{v_π^{⊗n}}`, the permutation product states.
    pub fn known_kernel(&self) -> Vec<DVector<f64>> {
        let perms = permutations(self.k);
        let vecs: Vec<DVector<f64>> = perms
            .iter()
            .map(|p| {
                let v = perm_vector(p, self.q, self.k);
                (1..self.n).fold(v.clone(), |acc, _| kron_vec(&acc, &v))
            })
            .collect();
        let d = (self.q.pow(self.n as u32)) as f64;
        let gram = RMat::from_fn(perms.len(), perms.len(), |a, b| {
            d.powi(cycle_count(&relative(&perms[a], &perms[b])) as i32)
        });
        orthonormal_span(&vecs, &gram)
    }
}

pub fn spectral_gap(h: &DesignHamiltonian) -> Result<GapReport> {
    let kernel = h.known_kernel();
    let mut residuals: Vec<f64> = kernel.iter().map(|w| h.apply(w).norm()).collect();
    let e = h.graph.num_edges() as f64;
    let finish = |gap: f64, lambda_min: f64, kernel_dim: usize, method, residuals| GapReport {
        gap,
        expander_norm: 1.0 - gap / e,
        expander_norm_per_site: 1.0 - gap / h.n as f64,
        edges: h.graph.num_edges(),
        n: h.n,
        method,
        kernel_dim,
        lambda_min,
        residuals,
    };
    if let Some(dense) = &h.dense {
        let mut ev: Vec<f64> = dense.clone().symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        let kernel_dim = ev.iter().filter(|&&x| x < KERNEL_TOL).count();
        let gap = ev.iter().cloned().find(|&x| x >= KERNEL_TOL).unwrap_or(f64::NAN);
        return Ok(finish(gap, ev[0], kernel_dim, GapMethod::Dense, residuals));
    }
    if let Some(bad) = residuals.iter().find(|&&r| r > KERNEL_TOL) {
        return Err(Error::NoConvergence(format!(
            "permutation product state is not annihilated (‖Hw‖ = {bad:e})"
        )));
    }
    let mut rng = seeded(0x6a70);
    let res = lanczos(|v| h.apply(v), h.dim(), &kernel, Extremal::Smallest, 1e-10, 600, &mut rng)?;
    if res.value < KERNEL_TOL {
        return Err(Error::NoConvergence(format!(
            "kernel exceeds the permutation span (deflated λ_min = {:e})",
            res.value
        )));
    }
    residuals.push(res.residual);
    Ok(finish(res.value, 0.0, kernel.len(), GapMethod::Iterative, residuals))
}

/// `(1/|E|) Σ_e (P_H)_e` on the full chain, site-major.
pub fn rqc_step_moment_operator(n: usize, q: usize, k: usize, graph: &Graph) -> Result<MomentOperator> {
    Ok(real_moment(n, q, k, &rqc_step_real(n, q, k, graph)?))
}

pub(crate) fn rqc_step_real(n: usize, q: usize, k: usize, graph: &Graph) -> Result<RMat> {
    if graph.n != n || graph.num_edges() == 0 {
        return Err(Error::Architecture("step operator needs a graph with edges on n sites".into()));
    }
    graph.require_hamiltonian_path()?;
    let l = q.pow(2 * k as u32);
    let dim = checked_pow(l, n, "step moment operator q^{2kn}", DEFAULT_OPERATOR_CAP)?;
    let p = two_site_projector(q, k);
    let mut m = RMat::zeros(dim, dim);
    for &(a, b) in &graph.edges {
        m += embed(&p, &[a, b], n, l);
    }
    Ok(m / graph.num_edges() as f64)
}

/// Projector onto the permutation product states: the global Haar moment
/// operator, site-major.
pub fn global_projector_site_major(n: usize, q: usize, k: usize) -> Result<MomentOperator> {
    Ok(real_moment(n, q, k, &global_projector_real(n, q, k)?))
}

pub(crate) fn global_projector_real(n: usize, q: usize, k: usize) -> Result<RMat> {
    let l = q.pow(2 * k as u32);
    let dim = checked_pow(l, n, "global projector q^{2kn}", DEFAULT_OPERATOR_CAP)?;
    let h = DesignHamiltonian {
        n,
        q,
        k,
        graph: Graph::chain(n),
        local_dim: l,
        two_site: RMat::zeros(0, 0),
        dense: None,
    };
    Ok(projector_from_basis(&h.known_kernel(), dim))
}

fn real_moment(n: usize, q: usize, k: usize, m: &RMat) -> MomentOperator {
    MomentOperator {
        k,
        base_dim: q.pow(n as u32),
        layout: Layout::SiteMajor { n, q },
        matrix: real_to_complex(m),
    }
}

/// `‖M^t − P‖` for a one-step operator `M` with invariant projector `P`.
/// Since `MP = PM = P`, this is `‖(M − P)^t‖`.
pub fn step_expander_norm(n: usize, q: usize, k: usize, graph: &Graph, t: u32) -> Result<f64> {
    let m = rqc_step_real(n, q, k, graph)?;
    let p = global_projector_real(n, q, k)?;
    let diff = m - p;
    let mut acc = diff.clone();
    for _ in 1..t {
        acc = &acc * &diff;
    }
    Ok(symmetric_norm(&acc))
}

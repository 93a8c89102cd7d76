//! Monte Carlo moment operators.

use rand::Rng;
use rayon::prelude::*;

use super::projector::{check_cap, Layout, MomentOperator, DEFAULT_OPERATOR_CAP};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::qmath::Unitary;
use crate::rng::{fork_seed, substream, Stream, CHUNK};

/// `U^{⊗k} ⊗ Ū^{⊗k}`.
pub fn moment_tensor(u: &CMat, k: usize) -> CMat {
    let mut uk = u.clone();
    for _ in 1..k {
        uk = uk.kronecker(u);
    }
    let conj = uk.map(|z| z.conj());
    uk.kronecker(&conj)
}

/// Sample mean of `U^{⊗k} ⊗ Ū^{⊗k}`. Chunk sums are combined in chunk order,
/// so the result does not depend on the thread count.
pub fn mc_moment_operator<F, R>(sampler: F, k: usize, n_samples: usize, rng: &mut R) -> Result<MomentOperator>
where
    F: Fn(&mut Stream) -> Unitary + Sync,
    R: Rng + ?Sized,
{
    if n_samples == 0 || k == 0 {
        return Err(Error::InvalidInput("need k ≥ 1 and at least one sample".into()));
    }
    let base = fork_seed(rng);
    let d = sampler(&mut substream(base, "moment.probe", 0)).dim();
    let dim = d.checked_pow(2 * k as u32).unwrap_or(usize::MAX);
    check_cap("Monte Carlo moment operator D^{2k}", dim, DEFAULT_OPERATOR_CAP)?;
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<CMat> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = substream(base, "moment", c as u64);
            let len = CHUNK.min(n_samples - c * CHUNK);
            let mut acc = CMat::zeros(dim, dim);
            for _ in 0..len {
                acc += moment_tensor(sampler(&mut r).matrix(), k);
            }
            acc
        })
        .collect();
    let mut total = CMat::zeros(dim, dim);
    for p in parts {
        total += p;
    }
    Ok(MomentOperator {
        k,
        base_dim: d,
        layout: Layout::Natural,
        matrix: total / crate::linalg::C64::new(n_samples as f64, 0.0),
    })
}

//! Brute-force ε-complexity by breadth-first enumeration of gate words.
//!
//! Words grow by multiplying a new gate on the left, so a word with indices
//! `[i₁, …, i_r]` (application order) has product `g_{i_r} ⋯ g_{i₁}`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::GateSet;
use crate::error::{Error, Result};
use crate::geometry::{greedy_packing_from, PackingResult};
use crate::graph::Graph;
use crate::linalg::{embed, CMat, CVec};
use crate::qmath::{distance_matrices, distance_vectors, PureState, Unitary, UnitaryChannel};

/// Words closer than this are the same channel.
pub const EXACT_TOL: f64 = 1e-9;
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;
const EXACT_CELL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "radius", rename_all = "snake_case")]
pub enum DedupMode {
    ExactDedup,
    /// Drops a child within the radius of a kept word and does not expand it.
    /// Errors compound along a word: every word of length `r` lies within
    /// `r·ρ` of a kept word of length `≤ r`.
    NetDedup(f64),
}

impl DedupMode {
    fn radius(&self) -> f64 {
        match *self {
            DedupMode::ExactDedup => EXACT_TOL,
            DedupMode::NetDedup(r) => r,
        }
    }

    fn cell(&self) -> f64 {
        match *self {
            DedupMode::ExactDedup => EXACT_CELL,
            DedupMode::NetDedup(r) => r.max(EXACT_CELL),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DedupMode::ExactDedup => "exact".into(),
            DedupMode::NetDedup(r) => format!("net({r})"),
        }
    }
}

/// Gates placed on the register, one matrix per letter.
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub labels: Vec<String>,
    pub mats: Vec<CMat>,
}

impl Alphabet {
    /// Every gate at every placement on `graph` (vertices for single-site
    /// gates, edges in both orientations for two-site gates).
    pub fn from_gateset(gs: &GateSet, graph: &Graph) -> Result<Self> {
        let n = graph.n;
        let mut labels = Vec::new();
        let mut mats = Vec::new();
        if gs.locality == 1 {
            for v in 0..n {
                for (g, l) in gs.gates.iter().zip(&gs.labels) {
                    labels.push(if n == 1 { l.clone() } else { format!("{l}@{v}") });
                    mats.push(if n == 1 { g.matrix().clone() } else { embed(g.matrix(), &[v], n, gs.q) });
                }
            }
        } else {
            if n < 2 {
                return Err(Error::GateSet("two-site gates need at least two sites".into()));
            }
            let mut placements = Vec::new();
            for &(a, b) in &graph.edges {
                placements.push((a, b));
                placements.push((b, a));
            }
            if n == 2 {
                placements = vec![(0, 1)];
            }
            for &(a, b) in &placements {
                for (g, l) in gs.gates.iter().zip(&gs.labels) {
                    labels.push(if n == 2 { l.clone() } else { format!("{l}@{a},{b}") });
                    mats.push(embed(g.matrix(), &[a, b], n, gs.q));
                }
            }
        }
        Ok(Alphabet { labels, mats })
    }

    /// The gates themselves, acting on their own dimension.
    pub fn native(gs: &GateSet) -> Self {
        Alphabet {
            labels: gs.labels.clone(),
            mats: gs.gates.iter().map(|g| g.matrix().clone()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn product(&self, indices: &[usize]) -> CMat {
        let d = self.dim();
        indices
            .iter()
            .fold(CMat::identity(d, d), |acc, &i| &self.mats[i] * acc)
    }
}

#[derive(Debug, Clone)]
pub struct GateWord {
    /// Application order.
    pub indices: Vec<usize>,
    pub product: UnitaryChannel,
}

impl GateWord {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Distance between the stored product and a fresh recomputation.
    pub fn product_defect(&self, alphabet: &Alphabet) -> f64 {
        distance_matrices(self.product.rep.matrix(), &alphabet.product(&self.indices))
    }
}

#[derive(Debug, Clone)]
struct Node<T> {
    value: T,
    parent: Option<usize>,
    letter: usize,
    level: usize,
    key: (f64, f64),
}

/// Grid over two 1-Lipschitz, phase-invariant keys.
#[derive(Debug, Clone, Default)]
struct KeyGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl KeyGrid {
    fn new(cell: f64) -> Self {
        KeyGrid {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn coord(&self, key: (f64, f64)) -> (i64, i64) {
        ((key.0 / self.cell).floor() as i64, (key.1 / self.cell).floor() as i64)
    }

    fn insert(&mut self, key: (f64, f64), id: usize) {
        let c = self.coord(key);
        self.buckets.entry(c).or_default().push(id);
    }

    /// Ids whose keys may lie within `radius · lip` of `key`.
    fn near(&self, key: (f64, f64), radius: f64, lip: f64) -> impl Iterator<Item = usize> + '_ {
        let span = ((radius * lip) / self.cell).ceil() as i64;
        let (cx, cy) = self.coord(key);
        (cx - span..=cx + span)
            .flat_map(move |x| (cy - span..=cy + span).map(move |y| (x, y)))
            .filter_map(move |c| self.buckets.get(&c))
            .flat_map(|v| v.iter().copied())
    }
}

fn unitary_key(m: &CMat) -> (f64, f64) {
    let d = m.nrows() as f64;
    (m.trace().norm() / d, m[(0, 0)].norm())
}

fn state_key(v: &CVec) -> (f64, f64) {
    (v[0].norm(), if v.len() > 1 { v[1].norm() } else { 0.0 })
}

/// Generic BFS over values reachable by left multiplication with letters.
#[derive(Debug, Clone)]
struct Bfs<T> {
    nodes: Vec<Node<T>>,
    level_ranges: Vec<std::ops::Range<usize>>,
    truncated: bool,
    generated: usize,
}

trait Searchable: Clone + Send + Sync {
    fn key(&self) -> (f64, f64);
    fn lipschitz() -> f64;
    fn dist(&self, other: &Self) -> f64;
    fn step(&self, gate: &CMat) -> Self;
}

impl Searchable for CMat {
    fn key(&self) -> (f64, f64) {
        unitary_key(self)
    }
    fn lipschitz() -> f64 {
        1.0
    }
    fn dist(&self, other: &Self) -> f64 {
        distance_matrices(self, other)
    }
    fn step(&self, gate: &CMat) -> Self {
        gate * self
    }
}

impl Searchable for CVec {
    fn key(&self) -> (f64, f64) {
        state_key(self)
    }
    fn lipschitz() -> f64 {
        std::f64::consts::SQRT_2
    }
    fn dist(&self, other: &Self) -> f64 {
        distance_vectors(self, other)
    }
    fn step(&self, gate: &CMat) -> Self {
        gate * self
    }
}

impl<T: Searchable> Bfs<T> {
    fn run(root: T, alphabet: &Alphabet, r_max: usize, mode: DedupMode, budget: usize) -> Self {
        let radius = mode.radius();
        let mut grid = KeyGrid::new(mode.cell() * T::lipschitz());
        let key = root.key();
        grid.insert(key, 0);
        let mut bfs = Bfs {
            nodes: vec![Node {
                value: root,
                parent: None,
                letter: usize::MAX,
                level: 0,
                key,
            }],
            level_ranges: std::iter::once(0..1).collect(),
            truncated: false,
            generated: 1,
        };
        for level in 1..=r_max {
            let prev = bfs.level_ranges[level - 1].clone();
            if prev.is_empty() {
                bfs.level_ranges.push(bfs.nodes.len()..bfs.nodes.len());
                continue;
            }
            let want = prev.len() * alphabet.len();
            if bfs.generated + want > budget {
                bfs.truncated = true;
                break;
            }
            bfs.generated += want;
            let candidates: Vec<(usize, usize, T)> = prev
                .clone()
                .into_par_iter()
                .flat_map_iter(|p| {
                    let v = &bfs.nodes[p].value;
                    alphabet
                        .mats
                        .iter()
                        .enumerate()
                        .map(move |(g, m)| (p, g, v.step(m)))
                })
                .collect();
            let start = bfs.nodes.len();
            for (p, g, value) in candidates {
                let key = value.key();
                let dup = grid
                    .near(key, radius, T::lipschitz())
                    .any(|id| bfs.nodes[id].value.dist(&value) < radius);
                if !dup {
                    let id = bfs.nodes.len();
                    grid.insert(key, id);
                    bfs.nodes.push(Node {
                        value,
                        parent: Some(p),
                        letter: g,
                        level,
                        key,
                    });
                }
            }
            bfs.level_ranges.push(start..bfs.nodes.len());
        }
        bfs
    }

    fn word(&self, mut id: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes[id].level);
        while let Some(p) = self.nodes[id].parent {
            out.push(self.nodes[id].letter);
            id = p;
        }
        out.reverse();
        out
    }

    /// First node (by level, then enumeration order) within `eps` of `target`.
    fn first_within(&self, target: &T, eps: f64) -> Option<usize> {
        let tk = target.key();
        let slack = eps * T::lipschitz();
        for range in &self.level_ranges {
            let hit = range.clone().find(|&id| {
                let k = self.nodes[id].key;
                (k.0 - tk.0).abs() <= slack + 1e-12
                    && (k.1 - tk.1).abs() <= slack + 1e-12
                    && self.nodes[id].value.dist(target) <= eps
            });
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

/// BFS levels of distinct channels.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub mode: DedupMode,
    pub r_max: usize,
    pub alphabet: Alphabet,
    bfs: Bfs<CMat>,
}

#[derive(Debug, Clone)]
pub struct WordNet {
    pub level: usize,
    pub representatives: Vec<GateWord>,
    pub dedup_radius: f64,
}

pub fn enumerate_words(alphabet: &Alphabet, r_max: usize, mode: DedupMode) -> Enumeration {
    enumerate_words_with_budget(alphabet, r_max, mode, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_words_with_budget(alphabet: &Alphabet, r_max: usize, mode: DedupMode, budget: usize) -> Enumeration {
    let d = alphabet.dim();
    Enumeration {
        mode,
        r_max,
        alphabet: alphabet.clone(),
        bfs: Bfs::run(CMat::identity(d, d), alphabet, r_max, mode, budget),
    }
}

impl Enumeration {
    pub fn truncated(&self) -> bool {
        self.bfs.truncated
    }

    /// Number of levels actually completed (`r_max + 1` unless truncated).
    pub fn completed_levels(&self) -> usize {
        self.bfs.level_ranges.len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.bfs.level_ranges.iter().map(|r| r.len()).collect()
    }

    pub fn total(&self) -> usize {
        self.bfs.nodes.len()
    }

    fn gate_word(&self, id: usize) -> GateWord {
        GateWord {
            indices: self.bfs.word(id),
            product: UnitaryChannel::new(Unitary::trusted(self.bfs.nodes[id].value.clone())),
        }
    }

    pub fn levels(&self) -> Vec<WordNet> {
        self.bfs
            .level_ranges
            .iter()
            .enumerate()
            .map(|(level, r)| WordNet {
                level,
                representatives: r.clone().map(|id| self.gate_word(id)).collect(),
                dedup_radius: self.mode.radius(),
            })
            .collect()
    }

    /// All representatives of length `≤ r`, in enumeration order.
    pub fn words_up_to(&self, r: usize) -> Vec<GateWord> {
        let end = self.bfs.level_ranges.get(r).map(|x| x.end).unwrap_or(self.bfs.nodes.len());
        (0..end).map(|id| self.gate_word(id)).collect()
    }

    pub fn complexity(&self, target: &CMat, eps: f64) -> ComplexityResult {
        let hit = self.bfs.first_within(target, eps);
        ComplexityResult {
            value: hit.map(|id| self.bfs.nodes[id].level as u32),
            eps,
            witness: hit.map(|id| self.gate_word(id)),
            r_max: self.completed_levels().saturating_sub(1) as u32,
            mode: self.mode,
            truncated: self.truncated(),
        }
    }

    /// Complexity level only, for hot loops.
    pub fn complexity_value(&self, target: &CMat, eps: f64) -> Option<u32> {
        self.bfs.first_within(target, eps).map(|id| self.bfs.nodes[id].level as u32)
    }
}

#[derive(Debug, Clone)]
pub struct ComplexityResult {
    /// `None` when no word of length `≤ r_max` is within ε.
    pub value: Option<u32>,
    pub eps: f64,
    pub witness: Option<GateWord>,
    pub r_max: u32,
    pub mode: DedupMode,
    pub truncated: bool,
}

/// Under `NetDedup(ρ)` the value `v` satisfies `C_ε ≤ v ≤ C_{ε−vρ}`, where
/// `C` is the exact complexity.
pub fn complexity_unitary(
    target: &UnitaryChannel,
    alphabet: &Alphabet,
    eps: f64,
    r_max: usize,
    mode: DedupMode,
) -> Result<ComplexityResult> {
    if target.dim() != alphabet.dim() {
        return Err(Error::DimensionMismatch {
            left: target.dim(),
            right: alphabet.dim(),
        });
    }
    Ok(enumerate_words(alphabet, r_max, mode).complexity(target.rep.matrix(), eps))
}

/// BFS over states `W|ψ₀⟩`.
#[derive(Debug, Clone)]
pub struct StateEnumeration {
    pub mode: DedupMode,
    pub alphabet: Alphabet,
    bfs: Bfs<CVec>,
}

pub fn enumerate_states(alphabet: &Alphabet, psi0: &PureState, r_max: usize, mode: DedupMode) -> Result<StateEnumeration> {
    if psi0.dim() != alphabet.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: alphabet.dim(),
        });
    }
    Ok(StateEnumeration {
        mode,
        alphabet: alphabet.clone(),
        bfs: Bfs::run(psi0.amplitudes().clone(), alphabet, r_max, mode, DEFAULT_NODE_BUDGET),
    })
}

impl StateEnumeration {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.bfs.level_ranges.iter().map(|r| r.len()).collect()
    }

    pub fn complexity(&self, target: &PureState, eps: f64) -> ComplexityResult {
        let hit = self.bfs.first_within(target.amplitudes(), eps);
        let word = |id: usize| {
            let indices = self.bfs.word(id);
            GateWord {
                product: UnitaryChannel::new(Unitary::trusted(self.alphabet.product(&indices))),
                indices,
            }
        };
        ComplexityResult {
            value: hit.map(|id| self.bfs.nodes[id].level as u32),
            eps,
            witness: hit.map(word),
            r_max: self.bfs.level_ranges.len().saturating_sub(1) as u32,
            mode: self.mode,
            truncated: self.bfs.truncated,
        }
    }
}

pub fn complexity_state(
    target: &PureState,
    alphabet: &Alphabet,
    psi0: &PureState,
    eps: f64,
    r_max: usize,
    mode: DedupMode,
) -> Result<ComplexityResult> {
    if target.dim() != alphabet.dim() {
        return Err(Error::DimensionMismatch {
            left: target.dim(),
            right: alphabet.dim(),
        });
    }
    Ok(enumerate_states(alphabet, psi0, r_max, mode)?.complexity(target, eps))
}

#[derive(Debug, Clone)]
pub struct LowComplexityPacking {
    pub packing: PackingResult<UnitaryChannel>,
    pub candidates: usize,
    /// Enumeration hit the budget and candidates were sampled instead.
    pub partial: bool,
}

/// Greedy `2ε`-separated subset of the words of length `≤ r`: a lower bound
/// on the number of disjoint ε-balls centered on such words. Falls back to
/// `budget` random words when enumeration exceeds the budget.
pub fn low_complexity_packing<R: Rng + ?Sized>(
    alphabet: &Alphabet,
    r: usize,
    eps: f64,
    budget: usize,
    rng: &mut R,
) -> LowComplexityPacking {
    let en = enumerate_words_with_budget(alphabet, r, DedupMode::ExactDedup, budget);
    let (words, partial): (Vec<UnitaryChannel>, bool) = if en.truncated() {
        let ws = (0..budget)
            .map(|_| {
                let len = rng.random_range(0..=r);
                let idx: Vec<usize> = (0..len).map(|_| rng.random_range(0..alphabet.len())).collect();
                UnitaryChannel::new(Unitary::trusted(alphabet.product(&idx)))
            })
            .collect();
        (ws, true)
    } else {
        (en.words_up_to(r).into_iter().map(|w| w.product).collect(), false)
    };
    let candidates = words.len();
    LowComplexityPacking {
        packing: greedy_packing_from(words, 2.0 * eps),
        candidates,
        partial,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub c_u: Option<u32>,
    pub c_wu: Option<u32>,
    pub word_len: usize,
    /// `None` when `C_ε(u)` exceeds the search depth.
    pub holds: Option<bool>,
}

/// Checks `C_ε(W·U) ≤ C_ε(U) + |W|` for an exact word `W`.
pub fn stability_check(en: &Enumeration, u: &UnitaryChannel, word: &[usize], eps: f64) -> StabilityReport {
    let wu = en.alphabet.product(word) * u.rep.matrix();
    let c_u = en.complexity_value(u.rep.matrix(), eps);
    let c_wu = en.complexity_value(&wu, eps);
    let r_max = en.completed_levels() as u32 - 1;
    let holds = match (c_u, c_wu) {
        (None, _) => None,
        (Some(a), Some(b)) => Some(b as usize <= a as usize + word.len()),
        (Some(a), None) => {
            if a as usize + word.len() <= r_max as usize {
                Some(false)
            } else {
                None
            }
        }
    };
    StabilityReport {
        c_u,
        c_wu,
        word_len: word.len(),
        holds,
    }
}

/// Fills the trace's complexity columns from a unitary enumeration.
pub fn annotate_trace(trace: &mut crate::ensembles::WalkTrace, en: &Enumeration) -> Result<()> {
    let us = trace
        .unitaries
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("complexity annotation needs a full trace".into()))?;
    let cols = trace
        .eps
        .iter()
        .map(|&e| us.iter().map(|u| en.complexity_value(u.matrix(), e)).collect())
        .collect();
    trace.complexity = Some(cols);
    Ok(())
}

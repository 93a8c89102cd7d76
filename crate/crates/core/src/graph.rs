//! Interaction graphs on `n` sites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Exhaustive Hamiltonian-path search is limited to this many vertices.
pub const MAX_PATH_SEARCH: usize = 20;

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Architecture(format!("bad edge ({a}, {b}) on {n} sites")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Architecture(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Graph { n, edges })
    }

    /// Open chain `0–1–…–(n−1)`.
    pub fn chain(n: usize) -> Self {
        Graph {
            n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::chain(n);
        if n > 2 {
            g.edges.push((n - 1, 0));
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph { n, edges }
    }

    pub fn star(n: usize) -> Self {
        Graph {
            n,
            edges: (1..n).map(|i| (0, i)).collect(),
        }
    }

    /// Named families: `chain`, `cycle`, `complete`, `star`.
    pub fn named(name: &str, n: usize) -> Result<Self> {
        match name {
            "chain" | "1d" => Ok(Self::chain(n)),
            "cycle" | "ring" => Ok(Self::cycle(n)),
            "complete" => Ok(Self::complete(n)),
            "star" => Ok(Self::star(n)),
            other => Err(Error::Architecture(format!("unknown graph family `{other}`"))),
        }
    }

    pub fn id(&self) -> String {
        if *self == Self::chain(self.n) {
            return format!("chain{}", self.n);
        }
        if *self == Self::cycle(self.n) {
            return format!("cycle{}", self.n);
        }
        if *self == Self::complete(self.n) {
            return format!("complete{}", self.n);
        }
        let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("g{}[{}]", self.n, parts.join(","))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn adjacency(&self) -> Vec<u32> {
        let mut adj = vec![0u32; self.n];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// Some Hamiltonian path, by dynamic programming over vertex subsets.
    pub fn hamiltonian_path(&self) -> Result<Option<Vec<usize>>> {
        let n = self.n;
        if n == 0 {
            return Ok(None);
        }
        if n == 1 {
            return Ok(Some(vec![0]));
        }
        if n > MAX_PATH_SEARCH {
            return Err(Error::Capacity {
                what: "Hamiltonian path search".into(),
                required: n,
                cap: MAX_PATH_SEARCH,
            });
        }
        let adj = self.adjacency();
        let full = (1usize << n) - 1;
        // reach[mask] = bitset of end vertices of paths covering exactly `mask`.
        let mut reach = vec![0u32; 1 << n];
        for v in 0..n {
            reach[1 << v] = 1 << v;
        }
        for mask in 1..=full {
            let ends = reach[mask];
            if ends == 0 {
                continue;
            }
            for (v, &nbrs) in adj.iter().enumerate() {
                if ends >> v & 1 == 1 {
                    let mut nb = nbrs & !(mask as u32);
                    while nb != 0 {
                        let w = nb.trailing_zeros() as usize;
                        nb &= nb - 1;
                        reach[mask | 1 << w] |= 1 << w;
                    }
                }
            }
        }
        if reach[full] == 0 {
            return Ok(None);
        }
        let mut path = Vec::with_capacity(n);
        let mut mask = full;
        let mut v = reach[full].trailing_zeros() as usize;
        loop {
            path.push(v);
            let prev_mask = mask & !(1 << v);
            if prev_mask == 0 {
                break;
            }
            let cands = reach[prev_mask] & adj[v];
            v = cands.trailing_zeros() as usize;
            mask = prev_mask;
        }
        path.reverse();
        Ok(Some(path))
    }

    pub fn require_hamiltonian_path(&self) -> Result<Vec<usize>> {
        self.hamiltonian_path()?
            .ok_or_else(|| Error::Architecture(format!("graph {} has no Hamiltonian path", self.id())))
    }
}

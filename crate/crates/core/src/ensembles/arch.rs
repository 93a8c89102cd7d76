//! Circuit architectures and their one-step samplers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gateset::GateSet;
use super::slh::{slh_increment, Normalization, SlhIncrementBasis};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::embed;
use crate::qmath::{haar_matrix, Unitary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchKind {
    Rqc1d,
    GrqcHaar,
    GrqcGateset,
    Slh,
    /// One Haar-random unitary on the whole register per step.
    Haar,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlhParams {
    pub dt: f64,
    pub normalization: Normalization,
}

pub const DEFAULT_DT: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct CircuitArchitecture {
    pub kind: ArchKind,
    pub n: usize,
    pub q: usize,
    pub graph: Graph,
    pub gateset: Option<GateSet>,
    pub slh: Option<SlhParams>,
    slh_basis: Option<SlhIncrementBasis>,
}

/// What one discrete step applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLabel {
    /// Edge index, or vertex index for single-site gates.
    pub site: usize,
    /// Gate index for gateset architectures.
    pub gate: Option<usize>,
}

impl CircuitArchitecture {
    fn base(kind: ArchKind, graph: Graph, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(format!("local dimension {q}")));
        }
        if graph.n == 0 {
            return Err(Error::InvalidDimension("architecture on zero sites".into()));
        }
        graph.require_hamiltonian_path()?;
        Ok(CircuitArchitecture {
            kind,
            n: graph.n,
            q,
            graph,
            gateset: None,
            slh: None,
            slh_basis: None,
        })
    }

    fn needs_edges(&self) -> Result<()> {
        if self.graph.num_edges() == 0 {
            Err(Error::Architecture(format!("{:?} needs at least two sites", self.kind)))
        } else {
            Ok(())
        }
    }

    pub fn rqc1d(n: usize, q: usize) -> Result<Self> {
        let a = Self::base(ArchKind::Rqc1d, Graph::chain(n), q)?;
        a.needs_edges()?;
        Ok(a)
    }

    pub fn grqc_haar(graph: Graph, q: usize) -> Result<Self> {
        let a = Self::base(ArchKind::GrqcHaar, graph, q)?;
        a.needs_edges()?;
        Ok(a)
    }

    /// Locality-1 sets act on a uniformly chosen vertex, locality-2 sets on a
    /// uniformly chosen edge (in the edge's stated orientation).
    pub fn grqc_gateset(graph: Graph, gateset: GateSet) -> Result<Self> {
        let mut a = Self::base(ArchKind::GrqcGateset, graph, gateset.q)?;
        if gateset.locality == 2 {
            a.needs_edges()?;
        }
        a.gateset = Some(gateset);
        Ok(a)
    }

    pub fn slh(graph: Graph, q: usize, dt: f64, normalization: Normalization) -> Result<Self> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::InvalidInput(format!("time step dt = {dt} must be positive")));
        }
        let mut a = Self::base(ArchKind::Slh, graph, q)?;
        a.needs_edges()?;
        a.slh = Some(SlhParams { dt, normalization });
        a.slh_basis = Some(SlhIncrementBasis::new(q, normalization)?);
        Ok(a)
    }

    /// Global Haar steps on `n` sites of dimension `q`.
    pub fn haar(n: usize, q: usize) -> Result<Self> {
        Self::base(ArchKind::Haar, Graph::chain(n), q)
    }

    pub fn dim(&self) -> usize {
        self.q.pow(self.n as u32)
    }

    /// Edge count `m`, as used by the SLH bounds.
    pub fn edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn is_continuous(&self) -> bool {
        self.kind == ArchKind::Slh
    }

    pub fn id(&self) -> String {
        let extra = match (&self.gateset, &self.slh) {
            (Some(g), _) => format!(":{}", g.name),
            (_, Some(p)) => format!(":dt={}", p.dt),
            _ => String::new(),
        };
        format!("{:?}:q{}:{}{}", self.kind, self.q, self.graph.id(), extra).to_lowercase()
    }

    /// One step of a discrete architecture, with what was applied.
    pub fn sample_step_labeled<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Unitary, StepLabel)> {
        let n = self.n;
        let q = self.q;
        match self.kind {
            ArchKind::Slh => Err(Error::Architecture(
                "continuous architecture: use slh_step".into(),
            )),
            ArchKind::Haar => Ok((
                Unitary::trusted(haar_matrix(self.dim(), rng)),
                StepLabel { site: 0, gate: None },
            )),
            ArchKind::Rqc1d | ArchKind::GrqcHaar => {
                let e = rng.random_range(0..self.graph.num_edges());
                let (a, b) = self.graph.edges[e];
                let g = haar_matrix(q * q, rng);
                let u = if n == 2 && (a, b) == (0, 1) { g } else { embed(&g, &[a, b], n, q) };
                Ok((Unitary::trusted(u), StepLabel { site: e, gate: None }))
            }
            ArchKind::GrqcGateset => {
                let gs = self.gateset.as_ref().expect("gateset architecture carries a gate set");
                let gi = rng.random_range(0..gs.size());
                let gate = gs.gates[gi].matrix();
                if gs.locality == 1 {
                    let v = if n == 1 { 0 } else { rng.random_range(0..n) };
                    let u = if n == 1 { gate.clone() } else { embed(gate, &[v], n, q) };
                    Ok((Unitary::trusted(u), StepLabel { site: v, gate: Some(gi) }))
                } else {
                    let e = rng.random_range(0..self.graph.num_edges());
                    let (a, b) = self.graph.edges[e];
                    let u = if n == 2 && (a, b) == (0, 1) { gate.clone() } else { embed(gate, &[a, b], n, q) };
                    Ok((Unitary::trusted(u), StepLabel { site: e, gate: Some(gi) }))
                }
            }
        }
    }
}

pub fn sample_step<R: Rng + ?Sized>(arch: &CircuitArchitecture, rng: &mut R) -> Result<Unitary> {
    arch.sample_step_labeled(rng).map(|(u, _)| u)
}

/// `exp(i H dt) · state` for one SLH increment.
pub fn slh_step<R: Rng + ?Sized>(arch: &CircuitArchitecture, state: &Unitary, rng: &mut R) -> Result<Unitary> {
    let (Some(p), Some(basis)) = (&arch.slh, &arch.slh_basis) else {
        return Err(Error::Architecture("slh_step needs an SLH architecture".into()));
    };
    if state.dim() != arch.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: arch.dim(),
        });
    }
    let inc = slh_increment(basis, &arch.graph.edges, arch.n, p.dt, rng)?;
    Ok(inc.compose(state))
}

/// Serializable description of an architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchSpec {
    pub kind: ArchKind,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "two")]
    pub q: usize,
    /// Graph family name (`chain`, `cycle`, `complete`, `star`) or omitted for a chain.
    #[serde(default)]
    pub graph: Option<String>,
    /// Explicit edges; overrides `graph`.
    #[serde(default)]
    pub edges: Option<Vec<(usize, usize)>>,
    /// Built-in name or path.
    #[serde(default)]
    pub gateset: Option<String>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub normalization: Option<Normalization>,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}

impl ArchSpec {
    pub fn build(&self) -> Result<CircuitArchitecture> {
        let graph = match (&self.edges, &self.graph) {
            (Some(e), _) => Graph::new(self.n, e.clone())?,
            (None, Some(name)) => Graph::named(name, self.n)?,
            (None, None) => Graph::chain(self.n),
        };
        match self.kind {
            ArchKind::Rqc1d => CircuitArchitecture::rqc1d(self.n, self.q),
            ArchKind::GrqcHaar => CircuitArchitecture::grqc_haar(graph, self.q),
            ArchKind::GrqcGateset => {
                let name = self
                    .gateset
                    .as_deref()
                    .ok_or_else(|| Error::Architecture("gateset architecture needs `gateset`".into()))?;
                CircuitArchitecture::grqc_gateset(graph, GateSet::resolve(name)?)
            }
            ArchKind::Slh => CircuitArchitecture::slh(
                graph,
                self.q,
                self.dt.unwrap_or(DEFAULT_DT),
                self.normalization.unwrap_or_default(),
            ),
            ArchKind::Haar => CircuitArchitecture::haar(self.n, self.q),
        }
    }
}

//! Unitaries, unitary channels, pure states and their metrics.

use std::f64::consts::TAU;

use nalgebra::{DVector, Schur};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{ginibre, spectral_norm, CMat, CVec, C64, ONE, ZERO};

/// Tolerance for `U†U = I` in spectral norm on checked construction.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for the squared norm of a pure state.
pub const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    m: CMat,
}

impl Unitary {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension("unitary of dimension 0".into()));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let defect = unitarity_defect(&m);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Unitary { m })
    }

    /// Wraps a matrix known to be unitary (products, exponentials, QR factors).
    pub(crate) fn trusted(m: CMat) -> Self {
        debug_assert!(unitarity_defect(&m) < 1e-8);
        Unitary { m }
    }

    pub fn from_rows(d: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: d * d,
            });
        }
        Self::new(CMat::from_row_slice(d, d, entries))
    }

    pub fn identity(d: usize) -> Self {
        Unitary {
            m: CMat::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    /// `self · other`.
    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary {
            m: &self.m * &other.m,
        }
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            m: self.m.adjoint(),
        }
    }

    pub fn kron(&self, other: &Unitary) -> Unitary {
        Unitary {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn scale_phase(&self, phi: f64) -> Unitary {
        Unitary {
            m: self.m.map(|z| z * C64::from_polar(1.0, phi)),
        }
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        same_dim(self.dim(), psi.dim())?;
        Ok(PureState {
            amps: &self.m * &psi.amps,
        })
    }

    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.m)
    }
}

/// `‖U†U − I‖` in spectral norm.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let d = m.nrows();
    spectral_norm(&(m.adjoint() * m - CMat::identity(d, d)))
}

/// A unitary up to global phase. Equality is only ever decided through
/// [`distance_unitary`].
#[derive(Debug, Clone)]
pub struct UnitaryChannel {
    pub rep: Unitary,
}

impl UnitaryChannel {
    pub fn new(rep: Unitary) -> Self {
        UnitaryChannel { rep }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(Unitary::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

impl From<Unitary> for UnitaryChannel {
    fn from(rep: Unitary) -> Self {
        UnitaryChannel { rep }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVec,
}

impl PureState {
    pub fn new(amps: CVec) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension("state of dimension 0".into()));
        }
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidInput(format!(
                "state has squared norm {n2}, expected 1"
            )));
        }
        Ok(PureState { amps })
    }

    /// Normalizes `amps` first.
    pub fn normalized(amps: CVec) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(PureState { amps: amps / C64::new(n, 0.0) })
    }

    /// Computational basis state `|i⟩`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if d == 0 || i >= d {
            return Err(Error::InvalidDimension(format!("basis state {i} in dimension {d}")));
        }
        let mut v = CVec::from_element(d, ZERO);
        v[i] = ONE;
        Ok(PureState { amps: v })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps).norm_sqr())
    }
}

/// Multiset of eigenphases reduced to `[0, 2π)`.
#[derive(Debug, Clone)]
pub struct PhaseSet {
    phases: Vec<f64>,
}

impl PhaseSet {
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        PhaseSet {
            phases: phases.into_iter().map(reduce_phase).collect(),
        }
    }

    /// Eigenphases of a unitary matrix.
    pub fn of(u: &CMat) -> Self {
        Self::new(eigenvalues(u).iter().map(|z| z.arg()))
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

fn reduce_phase(p: f64) -> f64 {
    let r = p.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn eigenvalues(u: &CMat) -> DVector<C64> {
    Schur::new(u.clone())
        .eigenvalues()
        .expect("complex Schur form is triangular")
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

/// Length of the shortest closed arc of the circle containing every phase.
pub fn shortest_arc(p: &PhaseSet) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidInput("empty phase set".into()));
    }
    Ok(arc_of(p.phases.clone()))
}

fn arc_of(mut ph: Vec<f64>) -> f64 {
    ph.sort_by(f64::total_cmp);
    let mut gap = ph[0] + TAU - ph[ph.len() - 1];
    for w in ph.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    (TAU - gap).max(0.0)
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Unitary> {
    if d == 0 {
        return Err(Error::InvalidDimension("Haar sample of dimension 0".into()));
    }
    Ok(Unitary::trusted(haar_matrix(d, rng)))
}

/// QR of a Ginibre matrix, columns rephased by the diagonal of R.
pub(crate) fn haar_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let qr = ginibre(d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let ph = if n > 0.0 { rjj / n } else { ONE };
        q.column_mut(j).scale_mut_c(ph);
    }
    q
}

trait ScaleC {
    fn scale_mut_c(&mut self, z: C64);
}

impl<S> ScaleC for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_c(&mut self, z: C64) {
        for x in self.iter_mut() {
            *x *= z;
        }
    }
}

pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d == 0 {
        return Err(Error::InvalidDimension("Haar state of dimension 0".into()));
    }
    let v = CVec::from_fn(d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    PureState::normalized(v)
}

/// `min_φ ‖A − e^{iφ}B‖`, evaluated as `2 sin(arc/4)` on the eigenphases of
/// `A B†`.
pub fn distance_unitary(a: &UnitaryChannel, b: &UnitaryChannel) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    Ok(distance_matrices(a.rep.matrix(), b.rep.matrix()))
}

pub fn distance_to_identity(u: &Unitary) -> f64 {
    distance_from_product(u.matrix())
}

/// Unchecked variant of [`distance_unitary`] for hot loops.
pub fn distance_matrices(a: &CMat, b: &CMat) -> f64 {
    if a.nrows() == 2 {
        // (A B†) without materializing B†.
        let w = [
            a[(0, 0)] * b[(0, 0)].conj() + a[(0, 1)] * b[(0, 1)].conj(),
            a[(0, 0)] * b[(1, 0)].conj() + a[(0, 1)] * b[(1, 1)].conj(),
            a[(1, 0)] * b[(0, 0)].conj() + a[(1, 1)] * b[(0, 1)].conj(),
            a[(1, 0)] * b[(1, 0)].conj() + a[(1, 1)] * b[(1, 1)].conj(),
        ];
        return qubit_distance(w);
    }
    distance_from_product(&(a * b.adjoint()))
}

fn distance_from_product(w: &CMat) -> f64 {
    match w.nrows() {
        1 => 0.0,
        2 => qubit_distance([w[(0, 0)], w[(0, 1)], w[(1, 0)], w[(1, 1)]]),
        _ => {
            let arc = arc_of(eigenvalues(w).iter().map(|z| reduce_phase(z.arg())).collect());
            2.0 * (arc / 4.0).sin()
        }
    }
}

/// For a 2×2 unitary `W` with eigenphases `φ ± θ`, the traceless part has
/// Frobenius norm `√2 |sin θ|`; this stays accurate near the identity.
fn qubit_distance(w: [C64; 4]) -> f64 {
    let h = (w[0] + w[3]) * 0.5;
    let f2 = (w[0] - h).norm_sqr() + w[1].norm_sqr() + w[2].norm_sqr() + (w[3] - h).norm_sqr();
    // Half the eigenphase gap; atan2 stays accurate near a half-turn.
    let theta = (f2 / 2.0).sqrt().atan2(h.norm());
    2.0 * (theta / 2.0).sin()
}

/// `√(1 − |⟨a|b⟩|²)`.
pub fn distance_state(a: &PureState, b: &PureState) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    Ok(distance_vectors(a.amplitudes(), b.amplitudes()))
}

/// Unchecked state distance for unit vectors. Evaluated as
/// `‖a − e^{iφ}b‖ · √((1 + |⟨a|b⟩|)/2)` with `φ` aligning the phases, which
/// keeps full relative precision near zero.
pub(crate) fn distance_vectors(a: &CVec, b: &CVec) -> f64 {
    let o = b.dotc(a);
    let m = o.norm();
    let phase = if m > 0.0 { o / m } else { ONE };
    let diff = (a - b * phase).norm();
    (diff * ((1.0 + m) / 2.0).sqrt()).min(1.0)
}

/// Trace distance between the Choi states of two unitary channels.
pub fn choi_trace_distance(a: &UnitaryChannel, b: &UnitaryChannel) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    let d = a.dim() as f64;
    let ov = a.rep.matrix().dotc(b.rep.matrix()).norm() / d;
    Ok((1.0 - ov * ov).max(0.0).sqrt())
}

/// Brute-force `min_φ ‖A − e^{iφ}B‖`: a uniform grid over the chord maximum
/// followed by ternary refinement with true spectral norms. Oracle only.
pub fn distance_unitary_grid(a: &UnitaryChannel, b: &UnitaryChannel, grid: usize) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    let am = a.rep.matrix();
    let bm = b.rep.matrix();
    let eig = eigenvalues(&(am * bm.adjoint()));
    let chord = |phi: f64| {
        let z = C64::from_polar(1.0, phi);
        eig.iter().map(|l| (l - z).norm()).fold(0.0, f64::max)
    };
    let norm_at = |phi: f64| spectral_norm(&(am - bm * C64::from_polar(1.0, phi)));
    let h = TAU / grid as f64;
    let mut scored: Vec<(f64, f64)> = (0..grid).map(|i| (chord(i as f64 * h), i as f64 * h)).collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for &(_, phi0) in scored.iter().take(3) {
        let (mut lo, mut hi) = (phi0 - h, phi0 + h);
        for _ in 0..80 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if norm_at(m1) <= norm_at(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = best.min(norm_at(0.5 * (lo + hi)));
    }
    Ok(best)
}

/// Chord length for an arc, `2 sin(arc/4)` when the arc is known.
pub fn arc_to_distance(arc: f64) -> f64 {
    2.0 * (arc.clamp(0.0, TAU) / 4.0).sin()
}

/// Inverse of [`arc_to_distance`] on `[0, 2]`.
pub fn distance_to_arc(dist: f64) -> f64 {
    4.0 * (dist.clamp(0.0, 2.0) / 2.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::PI;

    fn diag(ph: &[f64]) -> Unitary {
        let d = ph.len();
        let mut m = CMat::identity(d, d);
        for (i, &p) in ph.iter().enumerate() {
            m[(i, i)] = C64::from_polar(1.0, p);
        }
        Unitary::new(m).unwrap()
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMat::from_element(2, 2, ONE);
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary(_))));
        assert!(Unitary::new(CMat::zeros(0, 0)).is_err());
    }

    #[test]
    fn arc_examples() {
        assert_eq!(shortest_arc(&PhaseSet::new([0.0])).unwrap(), 0.0);
        let a = shortest_arc(&PhaseSet::new([0.0, PI / 2.0])).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-15);
        let a = shortest_arc(&PhaseSet::new([0.0, TAU / 3.0, 2.0 * TAU / 3.0])).unwrap();
        assert!((a - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(shortest_arc(&PhaseSet::new([])).is_err());
        // wraps across 0
        let a = shortest_arc(&PhaseSet::new([-0.1, 0.2])).unwrap();
        assert!((a - 0.3).abs() < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let mut rng = seeded(11);
        let u = UnitaryChannel::new(haar_unitary(2, &mut rng).unwrap());
        assert!(distance_unitary(&u, &u).unwrap() < 1e-7);
        let v = UnitaryChannel::new(u.rep.scale_phase(1.234));
        assert!(distance_unitary(&v, &u).unwrap() < 1e-7);
        let z = UnitaryChannel::new(diag(&[0.0, PI]));
        let d = distance_unitary(&z, &UnitaryChannel::identity(2)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        let g = distance_unitary_grid(&z, &UnitaryChannel::identity(2), 10_000).unwrap();
        assert!((g - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn qubit_fast_path_matches_schur_route() {
        let mut rng = seeded(12);
        for _ in 0..200 {
            let u = haar_unitary(2, &mut rng).unwrap();
            let fast = distance_to_identity(&u);
            let arc = shortest_arc(&PhaseSet::of(u.matrix())).unwrap();
            assert!((fast - arc_to_distance(arc)).abs() < 1e-10);
        }
    }

    #[test]
    fn tiny_rotation_is_resolved() {
        let u = diag(&[1e-9, -1e-9]);
        let d = distance_to_identity(&u);
        assert!((d - 1e-9).abs() < 1e-18);
    }

    #[test]
    fn state_distance_examples() {
        let z0 = PureState::basis(2, 0).unwrap();
        let z1 = PureState::basis(2, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(CVec::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])).unwrap();
        assert_eq!(distance_state(&z0, &z0).unwrap(), 0.0);
        assert!((distance_state(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        assert!((distance_state(&z0, &plus).unwrap() - s).abs() < 1e-15);
        assert!(distance_state(&z0, &PureState::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn haar_one_dimensional_is_a_phase() {
        let mut rng = seeded(13);
        let u = haar_unitary(1, &mut rng).unwrap();
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(haar_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = UnitaryChannel::identity(2);
        let b = UnitaryChannel::identity(4);
        assert!(matches!(
            distance_unitary(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

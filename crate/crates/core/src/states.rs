//! Pure states, transition probabilities and orthogonality.
//!
//! A pure state of `⊕_a M_{d_a}` is a vector state `A ↦ <A_a x, x>` for a unit
//! vector `x` in one block `a`. Two pure states are unitarily equivalent
//! exactly when they live in the same block, so blocks play the role of the
//! fibres `[ω]`.
//!
//! Orthogonality (`‖ω0 − ω1‖ = 2`) has three independent computational
//! routes here: the inner-product test [`is_orthogonal`], the trace-norm
//! distance [`state_distance`], and the existence of a separating projection
//! [`projection_witness`].

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::rng;

/// Components with modulus at or below this are skipped when fixing the phase.
pub const PHASE_EPS: f64 = 1e-12;

/// Default tolerance for orthogonality decisions.
pub const DEFAULT_ORTHOGONALITY_TOL: f64 = 1e-9;

/// A vector state in one block, stored as its canonical unit representative:
/// the first component with modulus above [`PHASE_EPS`] is real and positive.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureStateWire", into = "PureStateWire")]
pub struct PureState {
    algebra: AlgebraSpec,
    block: usize,
    vector: CVector,
}

impl PureState {
    pub fn new(algebra: &AlgebraSpec, block: usize, v: CVector) -> Result<Self> {
        let d = algebra.dim(block)?;
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { block });
        }
        let norm = v.norm();
        if norm <= PHASE_EPS {
            return Err(Error::ZeroVector);
        }
        // Leave unit vectors untouched so canonicalization is idempotent.
        let mut x = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            v
        } else {
            v / Complex64::from(norm)
        };
        canonicalize_phase(&mut x);
        Ok(Self {
            algebra: algebra.clone(),
            block,
            vector: x,
        })
    }

    /// Basis ray `e_i` of `block`.
    pub fn basis(algebra: &AlgebraSpec, block: usize, i: usize) -> Result<Self> {
        let d = algebra.dim(block)?;
        if i >= d {
            return Err(Error::DimensionMismatch { expected: d, found: i + 1 });
        }
        let mut v = CVector::zeros(d);
        v[i] = Complex64::from(1.0);
        Self::new(algebra, block, v)
    }

    /// Ray drawn from the unitarily invariant distribution on `block`.
    pub fn random<R: Rng + ?Sized>(algebra: &AlgebraSpec, block: usize, rng: &mut R) -> Result<Self> {
        let d = algebra.dim(block)?;
        Self::new(algebra, block, rng::unit_vector(rng, d))
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    /// `<A_a x, x>`.
    pub fn evaluate(&self, a: &Element) -> Result<Complex64> {
        self.algebra.ensure_same(a.algebra())?;
        let m = &a.blocks()[self.block];
        Ok(linalg::inner(&(m * &self.vector), &self.vector))
    }

    /// Rank-one projection onto this ray, placed in its block.
    pub fn projection(&self) -> Element {
        let mut blocks = self.algebra.zero().into_blocks();
        blocks[self.block] = &self.vector * self.vector.adjoint();
        Element::new(self.algebra.clone(), blocks).expect("shape follows the algebra")
    }
}

impl std::fmt::Debug for PureState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PureState({:?}, block {}, {:?})", self.algebra, self.block, self.vector.as_slice())
    }
}

fn canonicalize_phase(x: &mut CVector) {
    if let Some(lead) = x.iter().copied().find(|z| z.norm() > PHASE_EPS) {
        let phase = lead.conj() / lead.norm();
        let mut first = true;
        for z in x.iter_mut() {
            *z *= phase;
            if first && z.norm() > PHASE_EPS {
                *z = Complex64::new(z.norm(), 0.0);
                first = false;
            }
        }
    }
}

pub fn make_pure_state(algebra: &AlgebraSpec, block: usize, v: CVector) -> Result<PureState> {
    PureState::new(algebra, block, v)
}

/// `|<x0, x1>|²` for states in the same block, `0` otherwise.
pub fn transition_probability(w0: &PureState, w1: &PureState) -> Result<f64> {
    w0.algebra.ensure_same(&w1.algebra)?;
    Ok(tp_unchecked(w0, w1))
}

pub(crate) fn tp_unchecked(w0: &PureState, w1: &PureState) -> f64 {
    if w0.block != w1.block {
        return 0.0;
    }
    let overlap = linalg::inner(&w0.vector, &w1.vector).norm_sqr();
    if overlap <= 0.5 {
        return overlap;
    }
    // Near 1 use 1 − |<x0,x1>|² = Σ_{i<j} |x0_i x1_j − x0_j x1_i|², which
    // keeps 1 − TP accurate for nearly equal rays.
    let (x0, x1) = (&w0.vector, &w1.vector);
    let mut gap = 0.0;
    for i in 0..x0.len() {
        for j in i + 1..x0.len() {
            gap += (x0[i] * x1[j] - x0[j] * x1[i]).norm_sqr();
        }
    }
    1.0 - gap / (x0.norm_squared() * x1.norm_squared())
}

/// Disjoint blocks, or `|<x0, x1>| <= tol` within one block.
pub fn is_orthogonal(w0: &PureState, w1: &PureState, tol: f64) -> Result<bool> {
    w0.algebra.ensure_same(&w1.algebra)?;
    Ok(orthogonal_unchecked(w0, w1, tol))
}

pub(crate) fn orthogonal_unchecked(w0: &PureState, w1: &PureState, tol: f64) -> bool {
    w0.block != w1.block || linalg::inner(&w0.vector, &w1.vector).norm() <= tol
}

/// Dual norm `‖ω0 − ω1‖`, as the trace norm of the block-diagonal difference
/// of the two rank-one density matrices.
pub fn state_distance(w0: &PureState, w1: &PureState) -> Result<f64> {
    w0.algebra.ensure_same(&w1.algebra)?;
    let diff = w0.projection().sub(&w1.projection())?;
    Ok(diff.blocks().iter().map(linalg::hermitian_trace_norm).sum())
}

/// A projection `E` with `ω0(E·E) = ω0` and `ω1(E·E) = 0`, if one exists.
/// The candidate is the projection onto `x0` (same block) or the identity of
/// `ω0`'s block; it is returned when the separating identities hold within
/// `tol` on every matrix unit.
pub fn projection_witness(w0: &PureState, w1: &PureState, tol: f64) -> Result<Option<Element>> {
    w0.algebra.ensure_same(&w1.algebra)?;
    let candidate = if w0.block == w1.block {
        w0.projection()
    } else {
        w0.algebra.block_identity(w0.block)?
    };
    let residual = projection_witness_residual(&candidate, w0, w1)?;
    Ok((residual <= tol).then_some(candidate))
}

/// Largest residual of the four separating identities
/// `ω0(E·E) = ω0`, `ω0((I−E)·(I−E)) = 0`, `ω1(E·E) = 0`, `ω1((I−E)·(I−E)) = ω1`,
/// over every matrix unit.
pub fn projection_witness_residual(e: &Element, w0: &PureState, w1: &PureState) -> Result<f64> {
    let alg = w0.algebra();
    alg.ensure_same(w1.algebra())?;
    alg.ensure_same(e.algebra())?;
    let complement = alg.identity().sub(e)?;
    let mut worst: f64 = 0.0;
    for unit in alg.matrix_units() {
        let a = alg.matrix_unit(unit)?;
        let inside = e.mul(&a)?.mul(e)?;
        let outside = complement.mul(&a)?.mul(&complement)?;
        let r = [
            w0.evaluate(&inside)? - w0.evaluate(&a)?,
            w0.evaluate(&outside)?,
            w1.evaluate(&inside)?,
            w1.evaluate(&outside)? - w1.evaluate(&a)?,
        ];
        worst = r.iter().map(|z| z.norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

/// Whether `e` is an orthogonal projection within `tol`.
pub fn is_projection(e: &Element, tol: f64) -> bool {
    let sq = e.mul(e).and_then(|s| s.sub(e)).map(|d| d.operator_norm());
    let herm = e.sub(&e.adjoint()).map(|d| d.operator_norm());
    matches!((sq, herm), (Ok(a), Ok(b)) if a <= tol && b <= tol)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureStateWire {
    algebra: AlgebraSpec,
    block: usize,
    vector: Vec<[f64; 2]>,
}

impl From<PureState> for PureStateWire {
    fn from(s: PureState) -> Self {
        PureStateWire {
            vector: s.vector.iter().map(|z| [z.re, z.im]).collect(),
            algebra: s.algebra,
            block: s.block,
        }
    }
}

impl TryFrom<PureStateWire> for PureState {
    type Error = Error;

    fn try_from(w: PureStateWire) -> Result<Self> {
        let v = CVector::from_iterator(w.vector.len(), w.vector.iter().map(|z| Complex64::new(z[0], z[1])));
        PureState::new(&w.algebra, w.block, v)
    }
}

/// Hermitian block of `P_x0 − P_x1` for two vectors of one block.
pub fn rank_one_difference(x0: &CVector, x1: &CVector) -> CMatrix {
    x0 * x0.adjoint() - x1 * x1.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_algebra, MatrixUnit};
    use nalgebra::dvector;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn st(alg: &AlgebraSpec, b: usize, v: CVector) -> PureState {
        PureState::new(alg, b, v).unwrap()
    }

    #[test]
    fn make_pure_state_examples() {
        let a = make_algebra(&[2]).unwrap();
        let s = st(&a, 0, dvector![c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(s.vector(), &dvector![c(1.0, 0.0), c(0.0, 0.0)]);
        let s = st(&a, 0, dvector![c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(s.vector(), &dvector![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(PureState::new(&a, 0, dvector![c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroVector));
        assert!(matches!(
            PureState::new(&a, 0, dvector![c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            PureState::new(&a, 1, dvector![c(1.0, 0.0)]),
            Err(Error::BlockOutOfRange { .. })
        ));
    }

    #[test]
    fn phase_gauge_is_invisible() {
        let a = make_algebra(&[3]).unwrap();
        let mut r = rng::stream(5, 0);
        let v = rng::unit_vector(&mut r, 3);
        let rotated = &v * Complex64::from_polar(1.0, 2.2);
        let s0 = st(&a, 0, v);
        let s1 = st(&a, 0, rotated);
        assert!((&s0.vector - &s1.vector).norm() < 1e-14);
        assert!((transition_probability(&s0, &s1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s0.vector[0].im, 0.0);
        assert!(s0.vector[0].re > 0.0);
    }

    #[test]
    fn evaluate_examples() {
        let a = make_algebra(&[2]).unwrap();
        let e1 = PureState::basis(&a, 0, 0).unwrap();
        assert!((e1.evaluate(&a.identity()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let e11 = a.matrix_unit(MatrixUnit::new(0, 0, 0)).unwrap();
        let e22 = a.matrix_unit(MatrixUnit::new(0, 1, 1)).unwrap();
        let e12 = a.matrix_unit(MatrixUnit::new(0, 0, 1)).unwrap();
        assert_eq!(e1.evaluate(&e11).unwrap(), c(1.0, 0.0));
        assert_eq!(e1.evaluate(&e22).unwrap(), c(0.0, 0.0));
        let plus = st(&a, 0, dvector![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        assert!((plus.evaluate(&e12).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let other = make_algebra(&[1, 1]).unwrap();
        assert!(plus.evaluate(&other.identity()).is_err());
    }

    #[test]
    fn transition_probability_examples() {
        let a = make_algebra(&[2, 2]).unwrap();
        let x = PureState::basis(&a, 0, 0).unwrap();
        let y = PureState::basis(&a, 1, 0).unwrap();
        assert_eq!(transition_probability(&x, &y).unwrap(), 0.0);
        assert!((transition_probability(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let plus = st(&a, 0, dvector![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((transition_probability(&x, &plus).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_examples() {
        let a = make_algebra(&[2, 3]).unwrap();
        let e1 = PureState::basis(&a, 0, 0).unwrap();
        let e2 = PureState::basis(&a, 0, 1).unwrap();
        assert!(is_orthogonal(&e1, &e2, 1e-9).unwrap());
        let mut r = rng::stream(9, 1);
        let u = PureState::random(&a, 0, &mut r).unwrap();
        let v = PureState::random(&a, 1, &mut r).unwrap();
        assert!(is_orthogonal(&u, &v, 1e-9).unwrap());
        let plus = st(&a, 0, dvector![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(!is_orthogonal(&e1, &plus, 1e-9).unwrap());
    }

    #[test]
    fn distance_examples() {
        let a = make_algebra(&[2]).unwrap();
        let e1 = PureState::basis(&a, 0, 0).unwrap();
        let e2 = PureState::basis(&a, 0, 1).unwrap();
        assert!(state_distance(&e1, &e1).unwrap().abs() < 1e-12);
        assert!((state_distance(&e1, &e2).unwrap() - 2.0).abs() < 1e-12);
        let plus = st(&a, 0, dvector![c(1.0, 0.0), c(1.0, 0.0)]);
        // eigenvalues of P0 - P1 are ±sqrt(1 - 1/2)
        assert!((state_distance(&e1, &plus).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);

        let b = make_algebra(&[1, 1]).unwrap();
        let p = PureState::basis(&b, 0, 0).unwrap();
        let q = PureState::basis(&b, 1, 0).unwrap();
        assert!((state_distance(&p, &q).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn witness_examples() {
        let a = make_algebra(&[2]).unwrap();
        let e1 = PureState::basis(&a, 0, 0).unwrap();
        let e2 = PureState::basis(&a, 0, 1).unwrap();
        let w = projection_witness(&e1, &e2, 1e-9).unwrap().unwrap();
        assert_eq!(w, a.matrix_unit(MatrixUnit::new(0, 0, 0)).unwrap());
        assert!(projection_witness_residual(&w, &e1, &e2).unwrap() < 1e-15);

        let b = make_algebra(&[1, 1]).unwrap();
        let p = PureState::basis(&b, 0, 0).unwrap();
        let q = PureState::basis(&b, 1, 0).unwrap();
        let w = projection_witness(&p, &q, 1e-9).unwrap().unwrap();
        assert_eq!(w, b.block_identity(0).unwrap());
        assert!(projection_witness_residual(&w, &p, &q).unwrap() < 1e-15);

        let plus = st(&a, 0, dvector![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(projection_witness(&e1, &plus, 1e-9).unwrap(), None);
    }

    #[test]
    fn supremum_route_via_two_e_minus_one() {
        // (ω0 − ω1)(2E − I) = 2 for an orthogonal pair and its witness E,
        // attaining the dual norm on a unit-norm element.
        let a = make_algebra(&[3, 2]).unwrap();
        let mut r = rng::stream(21, 0);
        let x = PureState::random(&a, 0, &mut r).unwrap();
        let y0 = PureState::random(&a, 0, &mut r).unwrap();
        let z = linalg::orthogonal_complement(x.vector(), y0.vector()).unwrap();
        let y = st(&a, 0, z);
        let e = projection_witness(&x, &y, 1e-9).unwrap().unwrap();
        let probe = e.scale(c(2.0, 0.0)).sub(&a.identity()).unwrap();
        assert!((probe.operator_norm() - 1.0).abs() < 1e-12);
        let val = x.evaluate(&probe).unwrap() - y.evaluate(&probe).unwrap();
        assert!((val - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn json_roundtrip_canonicalizes() {
        let a = make_algebra(&[1, 2]).unwrap();
        let s: PureState =
            serde_json::from_str(r#"{"algebra":[1,2],"block":1,"vector":[[0,0],[0,3]]}"#).unwrap();
        assert_eq!(s, PureState::basis(&a, 1, 1).unwrap());
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"algebra":[1,2],"block":1,"vector":[[0.0,0.0],[1.0,0.0]]}"#);
    }
}

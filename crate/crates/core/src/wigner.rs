//! Reconstruction of the linear map behind a Wigner-type ray map.
//!
//! On each fibre a transition-probability preserving ray map with a locally
//! solid range is `ω_z ↦ ω_{Uz}` or `ω_z ↦ ω_{U conj z}` for an isometry `U`.
//! [`reconstruct_fiber`] recovers `U` and the kind from a handful of probe
//! rays and then validates the candidate on random rays; [`assemble`] does
//! this for every source block and packages the result as an [`InducedMap`],
//! whose dual action reproduces the ray map.
//!
//! Conventions: the ray map goes `P(B) → P(A)`, the induced linear map goes
//! `A → B`. For the antilinear kind `φ(A) = (U* A U)ᵀ`, transposition being
//! taken in the standard basis, so that `ω_z ∘ φ = ω_{U conj z}`.

#![allow(clippy::result_large_err)]

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::{self, CMatrix, CVector};
use crate::raymaps::{fibre_assignment, FibreError, Fiber, MapKind, RayMapBlackBox, RayMapCanonical, Witness};
use crate::rng;
use crate::states::{tp_unchecked, PureState};

/// Number of random rays used to validate a reconstructed fibre.
pub const VALIDATION_RAYS: usize = 50;
const VALIDATION_SEED: u64 = 0x5749_474e_4552;

/// Why a fibre could not be reconstructed. Every variant names the probe
/// state (and its image) that exposed the failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "failure", content = "detail", rename_all = "snake_case")]
pub enum ReconstructionFailure {
    #[error("source dimension {source_dim} exceeds target dimension {target_dim}")]
    DimensionTooSmall { source_dim: usize, target_dim: usize },
    #[error("probe image left target block {expected}")]
    WrongTargetBlock {
        probe: PureState,
        image: PureState,
        expected: usize,
    },
    #[error("images of basis rays overlap by {overlap:e}")]
    NonOrthonormalImages {
        probes: Box<[PureState; 2]>,
        images: Box<[PureState; 2]>,
        overlap: f64,
    },
    #[error("phase probe image has transition probabilities {tp_anchor} / {tp_partner}, expected 1/2")]
    PhaseProbeMismatch {
        probe: PureState,
        image: PureState,
        tp_anchor: f64,
        tp_partner: f64,
    },
    #[error("kind probe fits neither or both kinds (linear {tp_linear}, antilinear {tp_antilinear})")]
    KindUndecided {
        probe: PureState,
        image: PureState,
        tp_linear: f64,
        tp_antilinear: f64,
    },
    #[error("kind probe for column {column} disagrees with column 2")]
    KindInconsistent { probe: PureState, column: usize },
    #[error("validation ray maps off the candidate (transition probability {tp})")]
    ValidationFailed {
        probe: PureState,
        image: PureState,
        predicted: PureState,
        tp: f64,
    },
    #[error(transparent)]
    Evaluation(#[from] Error),
}

fn superpose(x: &CVector, coeff: Complex64, y: &CVector) -> CVector {
    (x + y * coeff) * Complex64::from(FRAC_1_SQRT_2)
}

/// Recovers `(kind, U)` for source block `source_block` mapping into
/// `target_block`. `U` is determined up to one global phase.
pub fn reconstruct_fiber(
    map: &RayMapBlackBox,
    source_block: usize,
    target_block: usize,
    tol: f64,
) -> std::result::Result<(MapKind, CMatrix), ReconstructionFailure> {
    let source = map.source();
    let target = map.target();
    let d_b = source.dim(source_block)?;
    let d_a = target.dim(target_block)?;
    if d_b > d_a {
        return Err(ReconstructionFailure::DimensionTooSmall {
            source_dim: d_b,
            target_dim: d_a,
        });
    }
    let probe = |v: CVector| -> std::result::Result<(PureState, PureState), ReconstructionFailure> {
        let s = PureState::new(source, source_block, v)?;
        let image = map.eval(&s)?;
        if image.block() != target_block {
            return Err(ReconstructionFailure::WrongTargetBlock {
                probe: s,
                image,
                expected: target_block,
            });
        }
        Ok((s, image))
    };
    let basis = |j: usize| {
        let mut e = CVector::zeros(d_b);
        e[j] = Complex64::from(1.0);
        e
    };

    // Images of the basis rays must be orthonormal.
    let mut probes = Vec::with_capacity(d_b);
    let mut columns: Vec<CVector> = Vec::with_capacity(d_b);
    for j in 0..d_b {
        let (s, image) = probe(basis(j))?;
        columns.push(image.vector().clone());
        probes.push((s, image));
    }
    for i in 0..d_b {
        for j in i + 1..d_b {
            let overlap = linalg::inner(&columns[i], &columns[j]).norm();
            if overlap > tol {
                return Err(ReconstructionFailure::NonOrthonormalImages {
                    probes: Box::new([probes[i].0.clone(), probes[j].0.clone()]),
                    images: Box::new([probes[i].1.clone(), probes[j].1.clone()]),
                    overlap,
                });
            }
        }
    }

    // Relative phases from (e_1 + e_j)/√2, anchored at e_1.
    let one = Complex64::from(1.0);
    for j in 1..d_b {
        let (s, g) = probe(superpose(&basis(0), one, &basis(j)))?;
        let c1 = linalg::inner(g.vector(), &columns[0]);
        let cj = linalg::inner(g.vector(), &columns[j]);
        let (tp_anchor, tp_partner) = (c1.norm_sqr(), cj.norm_sqr());
        if (tp_anchor - 0.5).abs() > tol || (tp_partner - 0.5).abs() > tol {
            return Err(ReconstructionFailure::PhaseProbeMismatch {
                probe: s,
                image: g,
                tp_anchor,
                tp_partner,
            });
        }
        let rel = cj / c1;
        columns[j] *= rel / rel.norm();
    }

    // Kind from (e_1 + i e_j)/√2.
    let i_unit = Complex64::new(0.0, 1.0);
    let mut kind = MapKind::Linear;
    for j in 1..d_b {
        let (s, h) = probe(superpose(&basis(0), i_unit, &basis(j)))?;
        let linear = superpose(&columns[0], i_unit, &columns[j]);
        let antilinear = superpose(&columns[0], -i_unit, &columns[j]);
        let tp_linear = linalg::inner(h.vector(), &linear).norm_sqr();
        let tp_antilinear = linalg::inner(h.vector(), &antilinear).norm_sqr();
        let this = match (tp_linear >= 1.0 - tol, tp_antilinear >= 1.0 - tol) {
            (true, false) => MapKind::Linear,
            (false, true) => MapKind::Antilinear,
            _ => {
                return Err(ReconstructionFailure::KindUndecided {
                    probe: s,
                    image: h,
                    tp_linear,
                    tp_antilinear,
                })
            }
        };
        if j == 1 {
            kind = this;
        } else if this != kind {
            return Err(ReconstructionFailure::KindInconsistent { probe: s, column: j });
        }
    }

    let mut u = CMatrix::from_columns(&columns);
    orthonormalize_columns(&mut u);

    // Probes alone cannot separate a Wigner symmetry from a bi-orthogonal
    // distortion in dimension 2, so the candidate is always checked on
    // random rays.
    let fiber = Fiber {
        source_block,
        target_block,
        kind,
        isometry: u,
    };
    let mut r = rng::stream(VALIDATION_SEED, source_block as u64);
    for _ in 0..VALIDATION_RAYS {
        let s = PureState::random(source, source_block, &mut r)?;
        let image = map.eval(&s)?;
        let predicted = PureState::new(target, target_block, fiber.apply_vector(s.vector()))?;
        let tp = tp_unchecked(&image, &predicted);
        if tp < 1.0 - tol {
            return Err(ReconstructionFailure::ValidationFailed {
                probe: s,
                image,
                predicted,
                tp,
            });
        }
    }
    Ok((fiber.kind, fiber.isometry))
}

/// Modified Gram-Schmidt in place; keeps each column's phase.
fn orthonormalize_columns(u: &mut CMatrix) {
    for j in 0..u.ncols() {
        for i in 0..j {
            let proj = u.column(i).dotc(&u.column(j));
            let ci = u.column(i).clone_owned();
            let mut cj = u.column_mut(j);
            cj -= ci * proj;
        }
        let n = u.column(j).norm();
        if n > 0.0 {
            u.column_mut(j).unscale_mut(n);
        }
    }
}

/// Linear map `φ: A → B` reconstructed from (or defining) a ray map `P(B) → P(A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InducedMap {
    canonical: RayMapCanonical,
}

impl InducedMap {
    pub fn new(canonical: RayMapCanonical) -> Self {
        Self { canonical }
    }

    pub fn canonical(&self) -> &RayMapCanonical {
        &self.canonical
    }

    /// The algebra `φ` reads from (the ray map's target).
    pub fn domain(&self) -> &AlgebraSpec {
        self.canonical.target()
    }

    /// The algebra `φ` writes to (the ray map's source).
    pub fn codomain(&self) -> &AlgebraSpec {
        self.canonical.source()
    }

    /// Block `b` of the result is `U_b* A_{a(b)} U_b`, transposed for
    /// antilinear fibres. Target blocks hit by no fibre are ignored.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.domain().ensure_same(a.algebra())?;
        let blocks = self
            .canonical
            .fibers()
            .iter()
            .map(|f| {
                let compressed = f.isometry.adjoint() * &a.blocks()[f.target_block] * &f.isometry;
                match f.kind {
                    MapKind::Linear => compressed,
                    MapKind::Antilinear => compressed.transpose(),
                }
            })
            .collect();
        Element::new(self.codomain().clone(), blocks)
    }
}

pub fn apply_induced(phi: &InducedMap, a: &Element) -> Result<Element> {
    phi.apply(a)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "failure", content = "detail", rename_all = "snake_case")]
pub enum AssemblyFailure {
    #[error("map is not fibre-preserving")]
    NotFibrePreserving(Box<Witness>),
    #[error("fiber {source_block} -> {target_block}: {cause}")]
    Fiber {
        source_block: usize,
        target_block: usize,
        cause: ReconstructionFailure,
    },
    #[error(transparent)]
    Evaluation(#[from] Error),
}

pub fn assemble(map: &RayMapBlackBox, tol: f64) -> std::result::Result<InducedMap, AssemblyFailure> {
    assemble_with(map, tol, Execution::default())
}

/// Reconstructs every fibre (independently, possibly in parallel) and merges
/// them in source-block order.
pub fn assemble_with(
    map: &RayMapBlackBox,
    tol: f64,
    execution: Execution,
) -> std::result::Result<InducedMap, AssemblyFailure> {
    let assignment = fibre_assignment(map).map_err(|e| match e {
        FibreError::NotFibrePreserving(w) => AssemblyFailure::NotFibrePreserving(w),
        FibreError::Evaluation(e) => AssemblyFailure::Evaluation(e),
    })?;
    let results = exec::map_slice(execution, &assignment, |&(b, a)| reconstruct_fiber(map, b, a, tol));
    let mut fibers = Vec::with_capacity(assignment.len());
    for (&(source_block, target_block), result) in assignment.iter().zip(results) {
        let (kind, isometry) = result.map_err(|cause| AssemblyFailure::Fiber {
            source_block,
            target_block,
            cause,
        })?;
        fibers.push(Fiber {
            source_block,
            target_block,
            kind,
            isometry,
        });
    }
    let canonical = RayMapCanonical::new(map.source().clone(), map.target().clone(), fibers)?;
    Ok(InducedMap::new(canonical))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductionWitness {
    pub state: PureState,
    pub element: Element,
    /// `map(ω)(A)`.
    pub via_map: [f64; 2],
    /// `ω(φ(A))`.
    pub via_induced: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InductionOutcome {
    Verified { checks: usize, max_residual: f64 },
    Fails { witness: Box<InductionWitness> },
    Undetermined { reason: String },
}

impl InductionOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, InductionOutcome::Verified { .. })
    }
}

pub fn verify_induction(
    map: &RayMapBlackBox,
    phi: &InducedMap,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<InductionOutcome> {
    verify_induction_with(map, phi, samples, seed, tol, Execution::default())
}

/// Checks `map(ω)(A) = ω(φ(A))` within `tol·(1 + ‖A‖)` on seeded random
/// pure states `ω` and elements `A`.
pub fn verify_induction_with(
    map: &RayMapBlackBox,
    phi: &InducedMap,
    samples: usize,
    seed: u64,
    tol: f64,
    execution: Execution,
) -> Result<InductionOutcome> {
    map.source().ensure_same(phi.codomain())?;
    map.target().ensure_same(phi.domain())?;
    let source = map.source();
    let target = map.target();
    let checks = exec::map_range(execution, samples, |k| -> Result<(f64, Option<InductionWitness>)> {
        let mut r = rng::stream(seed, k as u64);
        let block = r.random_range(0..source.num_blocks());
        let state = PureState::random(source, block, &mut r)?;
        let element = target.random_element(&mut r);
        let via_map = map.eval(&state)?.evaluate(&element)?;
        let via_induced = state.evaluate(&phi.apply(&element)?)?;
        let residual = (via_map - via_induced).norm();
        let bound = tol * (1.0 + element.operator_norm());
        let witness = (residual > bound).then_some(InductionWitness {
            state,
            element,
            via_map: [via_map.re, via_map.im],
            via_induced: [via_induced.re, via_induced.im],
            residual,
        });
        Ok((residual, witness))
    });
    let mut max_residual: f64 = 0.0;
    for check in checks {
        match check {
            Ok((_, Some(w))) => return Ok(InductionOutcome::Fails { witness: Box::new(w) }),
            Ok((res, None)) => max_residual = max_residual.max(res),
            Err(e) => {
                return Ok(InductionOutcome::Undetermined {
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok(InductionOutcome::Verified {
        checks: samples,
        max_residual,
    })
}

/// Bloch-sphere latitude distortion on `M_2`: `(θ, φ) ↦ (θ + α sin 2θ, φ)`.
///
/// The distortion commutes with the antipodal map, so orthogonal rays go to
/// orthogonal rays in both directions and the map is a bijection, yet it
/// changes transition probabilities between generic rays.
pub fn dim2_biorthogonal_not_tp(alpha: f64) -> Result<RayMapBlackBox> {
    if !alpha.is_finite() || alpha == 0.0 || alpha.abs() >= 0.5 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let alg = AlgebraSpec::new(&[2])?;
    let out = alg.clone();
    Ok(RayMapBlackBox::new(alg.clone(), alg, move |s| {
        PureState::new(&out, 0, bloch_distort(s.vector(), alpha))
    }))
}

/// Black-box maps selectable by name, e.g. `dim2-bloch:alpha=0.25`.
/// `dim2-bloch` without parameters uses `alpha = 0.25`.
pub fn builtin_map(spec: &str) -> Result<RayMapBlackBox> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    match name.trim() {
        "dim2-bloch" => {
            let mut alpha = 0.25;
            for param in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                match param.split_once('=') {
                    Some(("alpha", v)) => {
                        alpha = v.trim().parse().map_err(|_| Error::UnknownMap(spec.to_string()))?;
                    }
                    _ => return Err(Error::UnknownMap(spec.to_string())),
                }
            }
            dim2_biorthogonal_not_tp(alpha)
        }
        _ => Err(Error::UnknownMap(spec.to_string())),
    }
}

/// Latitude distortion of a unit vector in `C²`.
pub fn bloch_distort(x: &CVector, alpha: f64) -> CVector {
    let (a, b) = (x[0], x[1]);
    let theta = 2.0 * b.norm().atan2(a.norm());
    let azimuth = b.arg() - a.arg();
    let warped = theta + alpha * (2.0 * theta).sin();
    nalgebra::dvector![
        Complex64::from((warped / 2.0).cos()),
        Complex64::from_polar((warped / 2.0).sin(), azimuth)
    ]
}

/// Haar-random canonical map with the given fibre layout. `d_b = 1` fibres
/// are stored as linear (the two kinds coincide there).
pub fn random_canonical(
    source_dims: &[usize],
    target_dims: &[usize],
    assignment: &[usize],
    kinds: &[MapKind],
    seed: u64,
) -> Result<RayMapCanonical> {
    let source = AlgebraSpec::new(source_dims)?;
    let target = AlgebraSpec::new(target_dims)?;
    for len in [assignment.len(), kinds.len()] {
        if len != source.num_blocks() {
            return Err(Error::DimensionMismatch {
                expected: source.num_blocks(),
                found: len,
            });
        }
    }
    let mut fibers = Vec::with_capacity(assignment.len());
    for (b, (&a, &kind)) in assignment.iter().zip(kinds).enumerate() {
        let d_b = source.dim(b)?;
        let d_a = target.dim(a)?;
        if d_b > d_a {
            return Err(Error::DimensionMismatch {
                expected: d_a,
                found: d_b,
            });
        }
        let mut r = rng::stream(seed, b as u64);
        fibers.push(Fiber {
            source_block: b,
            target_block: a,
            kind: if d_b == 1 { MapKind::Linear } else { kind },
            isometry: linalg::haar_isometry(&mut r, d_a, d_b),
        });
    }
    RayMapCanonical::new(source, target, fibers)
}

/// Random fibre layout plus map: 1-3 source blocks of dimension 1-5, each
/// sent to one of 1-3 target blocks (often several into the same one),
/// sometimes with an extra target block that receives no fibre.
pub fn random_canonical_layout(seed: u64) -> Result<RayMapCanonical> {
    layout(seed, true)
}

/// Like [`random_canonical_layout`] but with distinct target blocks, so the
/// map is bi-orthogonal.
pub fn random_injective_layout(seed: u64) -> Result<RayMapCanonical> {
    layout(seed, false)
}

fn layout(seed: u64, shared: bool) -> Result<RayMapCanonical> {
    let mut r = rng::stream(seed, u64::MAX);
    let m_src = r.random_range(1..=3usize);
    let source_dims: Vec<usize> = (0..m_src).map(|_| r.random_range(1..=5)).collect();
    let (m_hit, assignment): (usize, Vec<usize>) = if shared {
        let m_hit = r.random_range(1..=m_src);
        (m_hit, (0..m_src).map(|_| r.random_range(0..m_hit)).collect())
    } else {
        let mut order: Vec<usize> = (0..m_src).collect();
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut r);
        (m_src, order)
    };
    let mut target_dims: Vec<usize> = (0..m_hit).map(|_| r.random_range(1..=5)).collect();
    for (b, &a) in assignment.iter().enumerate() {
        target_dims[a] = target_dims[a].max(source_dims[b]);
    }
    if r.random_bool(0.5) {
        target_dims.push(r.random_range(1..=4));
    }
    let kinds: Vec<MapKind> = (0..m_src)
        .map(|_| if r.random_bool(0.5) { MapKind::Linear } else { MapKind::Antilinear })
        .collect();
    random_canonical(&source_dims, &target_dims, &assignment, &kinds, seed)
}

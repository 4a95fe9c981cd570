//! Transformations between pure-state spaces and their classification.
//!
//! A ray map sends pure states of a source algebra `B` to pure states of a
//! target algebra `A` (the dual direction of a linear map `A → B`). It comes
//! either in canonical form (per source block: a target block, a
//! linear/antilinear kind and an isometry) or as an opaque evaluator.
//!
//! [`classify`] decides the orthogonality, fibre and local properties of a
//! black box by sampling. A `Fails` verdict always carries a witness pair that
//! reproduces the violation; a `Holds` verdict only means no violation was
//! found among the sampled pairs.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{wire, AlgebraSpec};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::{self, CMatrix, CVector};
use crate::rng;
use crate::states::{orthogonal_unchecked, tp_unchecked, PureState};

/// Isometry check tolerance for canonical maps.
pub const ISOMETRY_TOL: f64 = 1e-9;

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Linear,
    Antilinear,
}

/// One source block's action: `z ↦ U z` or `z ↦ U conj(z)` into `target_block`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub source_block: usize,
    pub target_block: usize,
    pub kind: MapKind,
    pub isometry: CMatrix,
}

impl Fiber {
    pub fn apply_vector(&self, z: &CVector) -> CVector {
        match self.kind {
            MapKind::Linear => &self.isometry * z,
            MapKind::Antilinear => &self.isometry * z.map(|c| c.conj()),
        }
    }
}

/// Canonical ray map, one [`Fiber`] per source block in block order.
/// Fibres out of one-dimensional blocks are stored as linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CanonicalWire", into = "CanonicalWire")]
pub struct RayMapCanonical {
    source: AlgebraSpec,
    target: AlgebraSpec,
    fibers: Vec<Fiber>,
}

impl RayMapCanonical {
    pub fn new(source: AlgebraSpec, target: AlgebraSpec, mut fibers: Vec<Fiber>) -> Result<Self> {
        fibers.sort_by_key(|f| f.source_block);
        if fibers.len() != source.num_blocks()
            || fibers.iter().enumerate().any(|(b, f)| f.source_block != b)
        {
            return Err(Error::MalformedMap(format!(
                "expected exactly one fiber per source block (0..{})",
                source.num_blocks()
            )));
        }
        for f in &mut fibers {
            let d_b = source.dim(f.source_block)?;
            let d_a = target.dim(f.target_block)?;
            if f.isometry.nrows() != d_a || f.isometry.ncols() != d_b {
                return Err(Error::ShapeMismatch {
                    block: f.source_block,
                    rows: f.isometry.nrows(),
                    cols: f.isometry.ncols(),
                    dim: d_a,
                });
            }
            if f.isometry.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { block: f.source_block });
            }
            let residual = linalg::isometry_residual(&f.isometry);
            if residual > ISOMETRY_TOL {
                return Err(Error::NonIsometry {
                    block: f.source_block,
                    residual,
                });
            }
            // Both kinds act identically on a one-dimensional block.
            if d_b == 1 {
                f.kind = MapKind::Linear;
            }
        }
        Ok(Self { source, target, fibers })
    }

    pub fn source(&self) -> &AlgebraSpec {
        &self.source
    }

    pub fn target(&self) -> &AlgebraSpec {
        &self.target
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn assignment(&self) -> Vec<(usize, usize)> {
        self.fibers.iter().map(|f| (f.source_block, f.target_block)).collect()
    }

    /// The induced action `ω_z ↦ ω_{Uz}` (or `ω_{U conj z}`).
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        self.source.ensure_same(state.algebra())?;
        let fiber = &self.fibers[state.block()];
        PureState::new(&self.target, fiber.target_block, fiber.apply_vector(state.vector()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberWire {
    source_block: usize,
    target_block: usize,
    kind: MapKind,
    isometry: Vec<Vec<wire::ComplexWire>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalWire {
    source: AlgebraSpec,
    target: AlgebraSpec,
    fibers: Vec<FiberWire>,
}

impl From<RayMapCanonical> for CanonicalWire {
    fn from(m: RayMapCanonical) -> Self {
        CanonicalWire {
            fibers: m
                .fibers
                .iter()
                .map(|f| FiberWire {
                    source_block: f.source_block,
                    target_block: f.target_block,
                    kind: f.kind,
                    isometry: wire::matrix_to_wire(&f.isometry),
                })
                .collect(),
            source: m.source,
            target: m.target,
        }
    }
}

impl TryFrom<CanonicalWire> for RayMapCanonical {
    type Error = Error;

    fn try_from(w: CanonicalWire) -> Result<Self> {
        let mut fibers = Vec::with_capacity(w.fibers.len());
        for f in w.fibers {
            let d_b = w.source.dim(f.source_block)?;
            let isometry = wire::matrix_from_wire(&f.isometry).map_err(Error::MalformedMap)?;
            // An empty row list carries no column count.
            let isometry = if f.isometry.is_empty() { CMatrix::zeros(0, d_b) } else { isometry };
            fibers.push(Fiber {
                source_block: f.source_block,
                target_block: f.target_block,
                kind: f.kind,
                isometry,
            });
        }
        RayMapCanonical::new(w.source, w.target, fibers)
    }
}

/// Deterministic evaluator of a black-box ray map.
pub type Evaluator = dyn Fn(&PureState) -> Result<PureState> + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Canonical,
    Opaque,
}

/// A ray map known only through evaluation.
#[derive(Clone)]
pub struct RayMapBlackBox {
    source: AlgebraSpec,
    target: AlgebraSpec,
    eval: Arc<Evaluator>,
    origin: Origin,
}

impl RayMapBlackBox {
    pub fn new<F>(source: AlgebraSpec, target: AlgebraSpec, eval: F) -> Self
    where
        F: Fn(&PureState) -> Result<PureState> + Send + Sync + 'static,
    {
        Self {
            source,
            target,
            eval: Arc::new(eval),
            origin: Origin::Opaque,
        }
    }

    pub fn source(&self) -> &AlgebraSpec {
        &self.source
    }

    pub fn target(&self) -> &AlgebraSpec {
        &self.target
    }

    /// Whether this box wraps a canonical map (its range is then locally solid).
    pub fn is_canonical(&self) -> bool {
        self.origin == Origin::Canonical
    }

    pub fn eval(&self, state: &PureState) -> Result<PureState> {
        self.source.ensure_same(state.algebra())?;
        let out = (self.eval)(state)?;
        if out.algebra() != &self.target {
            return Err(Error::Evaluation(format!(
                "evaluator returned a state of {:?}, expected {:?}",
                out.algebra(),
                self.target
            )));
        }
        Ok(out)
    }
}

impl fmt::Debug for RayMapBlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RayMapBlackBox")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

pub fn as_blackbox(map: &RayMapCanonical) -> Result<RayMapBlackBox> {
    for f in &map.fibers {
        let residual = linalg::isometry_residual(&f.isometry);
        if residual > ISOMETRY_TOL {
            return Err(Error::NonIsometry {
                block: f.source_block,
                residual,
            });
        }
    }
    let inner = Arc::new(map.clone());
    let mut bb = RayMapBlackBox::new(map.source.clone(), map.target.clone(), move |s| inner.apply(s));
    bb.origin = Origin::Canonical;
    Ok(bb)
}

/// A sampled property of a ray map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Orthogonal,
    CoOrthogonal,
    FibrePreserving,
    LocallyInjective,
    LocallyTpPreserving,
}

/// A pair of input states whose images violate a property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub property: Property,
    pub inputs: [PureState; 2],
    pub outputs: [PureState; 2],
    pub input_tp: f64,
    pub output_tp: f64,
}

impl Witness {
    /// `|input_tp − output_tp|`.
    pub fn tp_gap(&self) -> f64 {
        (self.input_tp - self.output_tp).abs()
    }

    fn severity(&self) -> f64 {
        match self.property {
            Property::Orthogonal => self.output_tp,
            Property::CoOrthogonal => self.input_tp,
            Property::LocallyTpPreserving => self.tp_gap(),
            Property::FibrePreserving | Property::LocallyInjective => 0.0,
        }
    }
}

/// Checks one property on one input pair with known images.
pub fn check_pair(
    property: Property,
    inputs: (&PureState, &PureState),
    outputs: (&PureState, &PureState),
    tol: f64,
) -> Option<Witness> {
    let (x, y) = inputs;
    let (fx, fy) = outputs;
    let same_fibre = x.block() == y.block();
    let input_tp = tp_unchecked(x, y);
    let output_tp = tp_unchecked(fx, fy);
    let violated = match property {
        Property::Orthogonal => orthogonal_unchecked(x, y, tol) && !orthogonal_unchecked(fx, fy, tol),
        Property::CoOrthogonal => orthogonal_unchecked(fx, fy, tol) && !orthogonal_unchecked(x, y, tol),
        Property::FibrePreserving => same_fibre && fx.block() != fy.block(),
        Property::LocallyInjective => {
            same_fibre && input_tp < 1.0 - tol && fx.block() == fy.block() && output_tp >= 1.0 - tol
        }
        Property::LocallyTpPreserving => same_fibre && (input_tp - output_tp).abs() > tol,
    };
    violated.then(|| Witness {
        property,
        inputs: [x.clone(), y.clone()],
        outputs: [fx.clone(), fy.clone()],
        input_tp,
        output_tp,
    })
}

/// Re-evaluates the witness inputs and checks the property again.
pub fn replay_witness(map: &RayMapBlackBox, witness: &Witness, tol: f64) -> Result<Option<Witness>> {
    let [x, y] = &witness.inputs;
    let fx = map.eval(x)?;
    let fy = map.eval(y)?;
    Ok(check_pair(witness.property, (x, y), (&fx, &fy), tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails { witness: Box<Witness> },
    Undetermined { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fails { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solidity {
    StructurallyTrue,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub orthogonal: Verdict,
    pub co_orthogonal: Verdict,
    pub bi_orthogonal: Verdict,
    pub fibre_preserving: Verdict,
    pub locally_injective: Verdict,
    pub locally_tp_preserving: Verdict,
    pub locally_solid: Solidity,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub pairs_checked: usize,
}

impl ClassificationReport {
    fn verdicts(&self) -> [&Verdict; 6] {
        [
            &self.orthogonal,
            &self.co_orthogonal,
            &self.bi_orthogonal,
            &self.fibre_preserving,
            &self.locally_injective,
            &self.locally_tp_preserving,
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts().iter().all(|v| v.holds())
    }

    pub fn any_fails(&self) -> bool {
        self.verdicts().iter().any(|v| v.fails())
    }

    pub fn witnesses(&self) -> Vec<&Witness> {
        self.verdicts().iter().filter_map(|v| v.witness()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    /// Random pairs per fibre (and per pair of fibres).
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub execution: Execution,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            tol: DEFAULT_TOL,
            execution: Execution::default(),
        }
    }
}

/// Input states and the pairs to check, as indices into `states`.
#[derive(Debug, Default)]
struct SamplePlan {
    states: Vec<PureState>,
    pairs: Vec<(usize, usize)>,
}

impl SamplePlan {
    fn push(&mut self, s: PureState) -> usize {
        self.states.push(s);
        self.states.len() - 1
    }

    /// Orthogonal pair plus both pairs with their midpoint, which is
    /// orthogonal to neither.
    fn push_orthogonal_with_midpoint(&mut self, x: usize, z: usize) {
        let alg = self.states[x].algebra().clone();
        let block = self.states[x].block();
        let mid = self.states[x].vector() + self.states[z].vector();
        self.pairs.push((x, z));
        if let Ok(m) = PureState::new(&alg, block, mid) {
            let m = self.push(m);
            self.pairs.push((x, m));
            self.pairs.push((z, m));
        }
    }
}

const CROSS_STREAM_BASE: u64 = 1 << 32;

fn build_plan(source: &AlgebraSpec, samples: usize, seed: u64) -> Result<SamplePlan> {
    let mut plan = SamplePlan::default();
    let mut first_of_block = Vec::with_capacity(source.num_blocks());
    for (b, &d) in source.block_dims().iter().enumerate() {
        let basis: Vec<usize> = (0..d)
            .map(|i| PureState::basis(source, b, i).map(|s| plan.push(s)))
            .collect::<Result<_>>()?;
        first_of_block.push(basis[0]);
        for i in 0..d {
            for j in i + 1..d {
                plan.push_orthogonal_with_midpoint(basis[i], basis[j]);
            }
        }
        if d < 2 {
            continue;
        }
        let mut r = rng::stream(seed, b as u64);
        for _ in 0..samples {
            let x = PureState::random(source, b, &mut r)?;
            let y = PureState::random(source, b, &mut r)?;
            let Some(z) = linalg::orthogonal_complement(x.vector(), y.vector()) else {
                continue;
            };
            let z = PureState::new(source, b, z)?;
            let (x, y, z) = (plan.push(x), plan.push(y), plan.push(z));
            plan.pairs.push((x, y));
            plan.pairs.push((y, z));
            plan.push_orthogonal_with_midpoint(x, z);
        }
    }
    let m = source.num_blocks();
    for b0 in 0..m {
        for b1 in b0 + 1..m {
            plan.pairs.push((first_of_block[b0], first_of_block[b1]));
            let mut r = rng::stream(seed, CROSS_STREAM_BASE + (b0 * m + b1) as u64);
            for _ in 0..samples {
                let x = plan.push(PureState::random(source, b0, &mut r)?);
                let y = plan.push(PureState::random(source, b1, &mut r)?);
                plan.pairs.push((x, y));
            }
        }
    }
    Ok(plan)
}

/// Worst violation of `property` over the pairs whose images are known.
fn scan(
    property: Property,
    plan: &SamplePlan,
    images: &[Result<PureState>],
    tol: f64,
) -> Option<Witness> {
    let mut worst: Option<Witness> = None;
    for &(i, j) in &plan.pairs {
        let (Ok(fi), Ok(fj)) = (&images[i], &images[j]) else {
            continue;
        };
        if let Some(w) = check_pair(property, (&plan.states[i], &plan.states[j]), (fi, fj), tol) {
            if worst.as_ref().is_none_or(|cur| w.severity() > cur.severity()) {
                worst = Some(w);
            }
        }
    }
    worst
}

/// Classifies `map` with `samples` random pairs per fibre.
pub fn classify(map: &RayMapBlackBox, samples: usize, seed: u64, tol: f64) -> ClassificationReport {
    classify_with(
        map,
        &ClassifyConfig {
            samples,
            seed,
            tol,
            ..ClassifyConfig::default()
        },
    )
}

pub fn classify_with(map: &RayMapBlackBox, config: &ClassifyConfig) -> ClassificationReport {
    let locally_solid = if map.is_canonical() {
        Solidity::StructurallyTrue
    } else {
        Solidity::Unverified
    };
    let undetermined = |reason: &str| Verdict::Undetermined {
        reason: reason.to_string(),
    };
    let mut report = ClassificationReport {
        orthogonal: undetermined("no samples"),
        co_orthogonal: undetermined("no samples"),
        bi_orthogonal: undetermined("no samples"),
        fibre_preserving: undetermined("no samples"),
        locally_injective: undetermined("no samples"),
        locally_tp_preserving: undetermined("no samples"),
        locally_solid,
        samples: config.samples,
        seed: config.seed,
        tolerance: config.tol,
        pairs_checked: 0,
    };
    if config.samples == 0 {
        return report;
    }
    let mut plan = match build_plan(map.source(), config.samples, config.seed) {
        Ok(p) => p,
        Err(e) => {
            let reason = format!("sampling failed: {e}");
            for v in [
                &mut report.orthogonal,
                &mut report.co_orthogonal,
                &mut report.bi_orthogonal,
                &mut report.fibre_preserving,
                &mut report.locally_injective,
                &mut report.locally_tp_preserving,
            ] {
                *v = undetermined(&reason);
            }
            return report;
        }
    };
    let mut images = exec::map_slice(config.execution, &plan.states, |s| map.eval(s));
    let tol = config.tol;

    // Close the sample set under the constructions that tie fibre failures to
    // co-orthogonality and injectivity failures to bi-orthogonality.
    let fibre = scan(Property::FibrePreserving, &plan, &images, tol);
    let injective = scan(Property::LocallyInjective, &plan, &images, tol);
    let first_new = plan.states.len();
    if let Some(w) = &fibre {
        let [x, y] = &w.inputs;
        let (xi, yi) = (plan.push(x.clone()), plan.push(y.clone()));
        plan.push_orthogonal_with_midpoint(xi, yi);
    }
    if let Some(w) = &injective {
        let [x, y] = &w.inputs;
        if let Some(z) = linalg::orthogonal_complement(x.vector(), y.vector()) {
            if let Ok(z) = PureState::new(x.algebra(), x.block(), z) {
                let (xi, yi, zi) = (plan.push(x.clone()), plan.push(y.clone()), plan.push(z));
                plan.pairs.push((xi, zi));
                plan.pairs.push((yi, zi));
            }
        }
    }
    images.extend(exec::map_slice(config.execution, &plan.states[first_new..], |s| map.eval(s)));

    let eval_error = images.iter().find_map(|r| r.as_ref().err()).map(|e| format!("evaluation failed: {e}"));
    let verdict = |found: Option<Witness>| match (found, &eval_error) {
        (Some(w), _) => Verdict::Fails { witness: Box::new(w) },
        (None, Some(reason)) => Verdict::Undetermined { reason: reason.clone() },
        (None, None) => Verdict::Holds,
    };

    report.orthogonal = verdict(scan(Property::Orthogonal, &plan, &images, tol));
    report.co_orthogonal = verdict(scan(Property::CoOrthogonal, &plan, &images, tol));
    report.bi_orthogonal = match (&report.orthogonal, &report.co_orthogonal) {
        (Verdict::Fails { witness }, _) | (_, Verdict::Fails { witness }) => Verdict::Fails {
            witness: witness.clone(),
        },
        (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
        (Verdict::Undetermined { reason }, _) | (_, Verdict::Undetermined { reason }) => Verdict::Undetermined {
            reason: reason.clone(),
        },
    };
    report.fibre_preserving = verdict(scan(Property::FibrePreserving, &plan, &images, tol));
    report.locally_injective = verdict(scan(Property::LocallyInjective, &plan, &images, tol));
    report.locally_tp_preserving = verdict(scan(Property::LocallyTpPreserving, &plan, &images, tol));
    report.pairs_checked = plan.pairs.len();
    report
}

/// Failure of [`fibre_assignment`].
#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "failure", content = "detail", rename_all = "snake_case")]
pub enum FibreError {
    #[error("source block {} is split across target blocks {} and {}",
        .0.inputs[0].block(), .0.outputs[0].block(), .0.outputs[1].block())]
    NotFibrePreserving(Box<Witness>),
    #[error(transparent)]
    Evaluation(#[from] Error),
}

/// Probes every source block with its basis rays and the midpoints
/// `(e_1 + e_j)/√2` and reports the target block each one lands in.
pub fn fibre_assignment(map: &RayMapBlackBox) -> std::result::Result<Vec<(usize, usize)>, FibreError> {
    let source = map.source();
    let mut out = Vec::with_capacity(source.num_blocks());
    for (b, &d) in source.block_dims().iter().enumerate() {
        let anchor = PureState::basis(source, b, 0)?;
        let anchor_image = map.eval(&anchor)?;
        for j in 1..d {
            let mut probes = vec![PureState::basis(source, b, j)?];
            let mut mid = CVector::zeros(d);
            mid[0] = Complex64::from(1.0);
            mid[j] = Complex64::from(1.0);
            probes.push(PureState::new(source, b, mid)?);
            for probe in probes {
                let image = map.eval(&probe)?;
                if image.block() != anchor_image.block() {
                    return Err(FibreError::NotFibrePreserving(Box::new(Witness {
                        property: Property::FibrePreserving,
                        input_tp: tp_unchecked(&anchor, &probe),
                        output_tp: tp_unchecked(&anchor_image, &image),
                        inputs: [anchor, probe],
                        outputs: [anchor_image, image],
                    })));
                }
            }
        }
        out.push((b, anchor_image.block()));
    }
    Ok(out)
}

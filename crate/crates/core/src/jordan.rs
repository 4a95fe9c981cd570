//! Jordan *-maps given by their action on matrix units.
//!
//! A [`LinearMapTable`] stores `φ(E_ij)` for every matrix unit of the source;
//! identities that are bilinear in their arguments are therefore checked
//! exactly on the basis. The remaining checks (isometry, positivity,
//! orthogonality of projections, trace) are sampled with a seed.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::wire::{matrix_from_wire, matrix_to_wire, ComplexWire};
use crate::algebra::{AlgebraSpec, Element, MatrixUnit};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::{self, CMatrix};
use crate::raymaps::RayMapBlackBox;
use crate::rng;
use crate::states::{is_projection, PureState};
use crate::wigner::InducedMap;

/// Smallest top eigenvalue accepted when pulling a pure state back.
const PURITY_TOL: f64 = 1e-9;

/// Linear map `source → target` tabulated on the source's matrix units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableWire", into = "TableWire")]
pub struct LinearMapTable {
    source: AlgebraSpec,
    target: AlgebraSpec,
    /// Indexed like `source.matrix_units()`.
    images: Vec<Element>,
}

impl LinearMapTable {
    pub fn new(source: AlgebraSpec, target: AlgebraSpec, images: Vec<Element>) -> Result<Self> {
        let expected: usize = source.block_dims().iter().map(|d| d * d).sum();
        if images.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: images.len(),
            });
        }
        for image in &images {
            target.ensure_same(image.algebra())?;
        }
        Ok(Self { source, target, images })
    }

    /// Tabulates an arbitrary linear map.
    pub fn from_fn<F>(source: AlgebraSpec, target: AlgebraSpec, f: F) -> Result<Self>
    where
        F: Fn(&Element) -> Result<Element>,
    {
        let images = source
            .matrix_units()
            .into_iter()
            .map(|u| f(&source.matrix_unit(u)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    pub fn from_induced(phi: &InducedMap) -> Result<Self> {
        Self::from_fn(phi.domain().clone(), phi.codomain().clone(), |a| phi.apply(a))
    }

    pub fn source(&self) -> &AlgebraSpec {
        &self.source
    }

    pub fn target(&self) -> &AlgebraSpec {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    fn index(&self, unit: MatrixUnit) -> usize {
        let offset: usize = self.source.block_dims()[..unit.block].iter().map(|d| d * d).sum();
        offset + unit.row * self.source.block_dims()[unit.block] + unit.col
    }

    pub fn image(&self, unit: MatrixUnit) -> Result<&Element> {
        let d = self.source.dim(unit.block)?;
        if unit.row >= d || unit.col >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: unit.row.max(unit.col) + 1,
            });
        }
        Ok(&self.images[self.index(unit)])
    }

    /// Linear extension.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.source.ensure_same(a.algebra())?;
        let mut blocks: Vec<CMatrix> = self.target.zero().into_blocks();
        for (unit, image) in self.source.matrix_units().into_iter().zip(&self.images) {
            let c = a.coefficient(unit);
            if c == Complex64::from(0.0) {
                continue;
            }
            for (acc, b) in blocks.iter_mut().zip(image.blocks()) {
                *acc += b * c;
            }
        }
        Element::new(self.target.clone(), blocks)
    }

    /// The component `M_{d_a} → M_{d_b}` from source block `a` into target block `b`.
    pub fn restrict(&self, a: usize, b: usize) -> Result<LinearMapTable> {
        let source = AlgebraSpec::new(&[self.source.dim(a)?])?;
        let target = AlgebraSpec::new(&[self.target.dim(b)?])?;
        let images = self
            .source
            .matrix_units()
            .into_iter()
            .filter(|u| u.block == a)
            .map(|u| Element::new(target.clone(), vec![self.images[self.index(u)].blocks()[b].clone()]))
            .collect::<Result<Vec<_>>>()?;
        LinearMapTable::new(source, target, images)
    }

    /// Largest entrywise difference between two tables of the same shape.
    pub fn max_entry_distance(&self, other: &LinearMapTable) -> Result<f64> {
        self.source.ensure_same(&other.source)?;
        self.target.ensure_same(&other.target)?;
        let mut worst: f64 = 0.0;
        for (a, b) in self.images.iter().zip(&other.images) {
            worst = worst.max(a.distance(b)?);
        }
        Ok(worst)
    }

    /// The pullback `ω ↦ ω ∘ φ` as a ray map `P(target) → P(source)`.
    ///
    /// Evaluation fails when the pulled-back functional is not a pure state,
    /// which happens unless `φ` is a Jordan *-map that is surjective onto the
    /// block the state lives in.
    pub fn dual_ray_map(&self) -> RayMapBlackBox {
        let table = self.clone();
        RayMapBlackBox::new(self.target.clone(), self.source.clone(), move |s| table.pull_back(s))
    }

    fn pull_back(&self, state: &PureState) -> Result<PureState> {
        let mut best: Option<(f64, usize, CMatrix)> = None;
        for (block, &d) in self.source.block_dims().iter().enumerate() {
            // ρ[i][j] = ω(φ(E_ji)), so that ω(φ(A)) = tr(ρ A).
            let mut rho = CMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    rho[(i, j)] = state.evaluate(self.image(MatrixUnit::new(block, j, i))?)?;
                }
            }
            let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitian_part(&rho));
            let top = values.last().copied().unwrap_or(0.0);
            if best.as_ref().is_none_or(|(t, _, _)| top > *t) {
                best = Some((top, block, vectors));
            }
        }
        let (top, block, vectors) = best.ok_or(Error::ZeroVector)?;
        if (top - 1.0).abs() > PURITY_TOL {
            return Err(Error::Evaluation(format!(
                "pulled-back functional is not a pure state (largest weight {top})"
            )));
        }
        let d = vectors.ncols();
        PureState::new(&self.source, block, vectors.column(d - 1).clone_owned())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableWire {
    source: AlgebraSpec,
    target: AlgebraSpec,
    images: Vec<Vec<Vec<Vec<ComplexWire>>>>,
}

impl From<LinearMapTable> for TableWire {
    fn from(t: LinearMapTable) -> Self {
        TableWire {
            images: t
                .images
                .iter()
                .map(|e| e.blocks().iter().map(matrix_to_wire).collect())
                .collect(),
            source: t.source,
            target: t.target,
        }
    }
}

impl TryFrom<TableWire> for LinearMapTable {
    type Error = Error;

    fn try_from(w: TableWire) -> Result<Self> {
        let images = w
            .images
            .iter()
            .map(|blocks| {
                let blocks = blocks
                    .iter()
                    .map(|b| matrix_from_wire(b))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(Error::MalformedMap)?;
                Element::new(w.target.clone(), blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        LinearMapTable::new(w.source, w.target, images)
    }
}

/// Which identity a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    JordanProduct,
    Adjoint,
    Norm,
    Unit,
    Positivity,
    ProjectionPreservation,
    Orthogonality,
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckWitness {
    pub identity: Identity,
    pub inputs: Vec<Element>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Check {
    Verified { max_residual: f64 },
    Fails { witness: Box<CheckWitness> },
}

impl Check {
    pub fn is_verified(&self) -> bool {
        matches!(self, Check::Verified { .. })
    }

    pub fn witness(&self) -> Option<&CheckWitness> {
        match self {
            Check::Fails { witness } => Some(witness),
            Check::Verified { .. } => None,
        }
    }

    /// Folds per-item residuals; the worst violation becomes the witness.
    fn collect(results: impl IntoIterator<Item = Result<(f64, CheckWitness)>>, tol: f64) -> Result<Check> {
        let mut max_residual: f64 = 0.0;
        let mut worst: Option<CheckWitness> = None;
        for r in results {
            let (residual, witness) = r?;
            if residual > tol && worst.as_ref().is_none_or(|w| residual > w.residual) {
                worst = Some(witness);
            }
            max_residual = max_residual.max(residual);
        }
        Ok(match worst {
            Some(w) => Check::Fails { witness: Box::new(w) },
            None => Check::Verified { max_residual },
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "failure", content = "detail", rename_all = "snake_case")]
pub enum JordanError {
    #[error("map is not a Jordan *-homomorphism")]
    NotJordan(Box<CheckWitness>),
    #[error("map is not a block-permuting bijection: {0}")]
    NotBijective(String),
    #[error("block {source_block} is neither multiplicative ({mult_residual:e}) nor anti-multiplicative ({anti_residual:e})")]
    NeitherMultNorAnti {
        source_block: usize,
        probes: Box<[Element; 2]>,
        mult_residual: f64,
        anti_residual: f64,
    },
    #[error("image of a projection is not a projection")]
    NotProjectionPreserving(Box<CheckWitness>),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Algebra(#[from] Error),
}

pub fn is_jordan_star_homomorphism(t: &LinearMapTable, tol: f64) -> Check {
    is_jordan_star_homomorphism_with(t, tol, Execution::default())
}

/// `φ(AB + BA) = φ(A)φ(B) + φ(B)φ(A)` on all ordered pairs of matrix units
/// and `φ(E*) = φ(E)*` on all matrix units.
pub fn is_jordan_star_homomorphism_with(t: &LinearMapTable, tol: f64, execution: Execution) -> Check {
    let units = t.source.matrix_units();
    let n = units.len();
    let pair_results = exec::map_range(execution, n * n, |k| -> Result<(f64, CheckWitness)> {
        let (i, j) = (k / n, k % n);
        let (ei, ej) = (t.source.matrix_unit(units[i])?, t.source.matrix_unit(units[j])?);
        let lhs = t.apply(&ei.jordan_product(&ej)?)?;
        let rhs = t.images[i].jordan_product(&t.images[j])?;
        let residual = lhs.sub(&rhs)?.operator_norm();
        Ok((
            residual,
            CheckWitness {
                identity: Identity::JordanProduct,
                inputs: vec![ei, ej],
                residual,
            },
        ))
    });
    let adjoint_results = units.iter().enumerate().map(|(i, &u)| -> Result<(f64, CheckWitness)> {
        let flipped = t.image(MatrixUnit::new(u.block, u.col, u.row))?;
        let residual = flipped.sub(&t.images[i].adjoint())?.operator_norm();
        Ok((
            residual,
            CheckWitness {
                identity: Identity::Adjoint,
                inputs: vec![t.source.matrix_unit(u)?],
                residual,
            },
        ))
    });
    // Tables are shape-checked on construction, so the arithmetic cannot fail.
    Check::collect(pair_results.into_iter().chain(adjoint_results), tol).expect("table arithmetic")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Multiplicative,
    AntiMultiplicative,
}

/// Probe pair used to decide multiplicativity of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Probe {
    /// `(E_11, E_12)`.
    #[default]
    Standard,
    /// `(E_12, E_23)` on blocks of dimension at least 3, standard otherwise.
    Alternate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTag {
    pub source_block: usize,
    pub target_block: usize,
    pub tag: Tag,
}

/// Central decomposition of a Jordan *-isomorphism into its multiplicative
/// and anti-multiplicative parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KadisonSplit {
    /// Central projection in the target: identities of multiplicative blocks.
    pub f: Element,
    pub f_blocks: Vec<usize>,
    /// Its preimage in the source.
    pub e: Element,
    pub e_blocks: Vec<usize>,
    pub tags: Vec<BlockTag>,
}

pub fn kadison_split(t: &LinearMapTable, tol: f64) -> std::result::Result<KadisonSplit, JordanError> {
    kadison_split_with_probe(t, tol, Probe::Standard)
}

pub fn kadison_split_with_probe(
    t: &LinearMapTable,
    tol: f64,
    probe: Probe,
) -> std::result::Result<KadisonSplit, JordanError> {
    if let Check::Fails { witness } = is_jordan_star_homomorphism(t, tol) {
        return Err(JordanError::NotJordan(witness));
    }
    let targets = block_permutation(t, tol)?;
    let mut tags = Vec::with_capacity(targets.len());
    for (a, &b) in targets.iter().enumerate() {
        let d = t.source.dim(a)?;
        let tag = if d == 1 {
            Tag::Multiplicative
        } else {
            let (x, y) = match probe {
                Probe::Alternate if d >= 3 => (MatrixUnit::new(a, 0, 1), MatrixUnit::new(a, 1, 2)),
                _ => (MatrixUnit::new(a, 0, 0), MatrixUnit::new(a, 0, 1)),
            };
            let (xe, ye) = (t.source.matrix_unit(x)?, t.source.matrix_unit(y)?);
            let (fx, fy) = (t.image(x)?, t.image(y)?);
            let fxy = t.apply(&xe.mul(&ye)?)?;
            let mult_residual = fxy.sub(&fx.mul(fy)?)?.operator_norm();
            let anti_residual = fxy.sub(&fy.mul(fx)?)?.operator_norm();
            match (mult_residual <= tol, anti_residual <= tol) {
                (true, false) => Tag::Multiplicative,
                (false, true) => Tag::AntiMultiplicative,
                _ => {
                    return Err(JordanError::NeitherMultNorAnti {
                        source_block: a,
                        probes: Box::new([xe, ye]),
                        mult_residual,
                        anti_residual,
                    })
                }
            }
        };
        tags.push(BlockTag {
            source_block: a,
            target_block: b,
            tag,
        });
    }
    let mult: Vec<&BlockTag> = tags.iter().filter(|t| t.tag == Tag::Multiplicative).collect();
    let mut f_blocks: Vec<usize> = mult.iter().map(|t| t.target_block).collect();
    f_blocks.sort_unstable();
    let e_blocks: Vec<usize> = mult.iter().map(|t| t.source_block).collect();
    Ok(KadisonSplit {
        f: block_sum(&t.target, &f_blocks)?,
        e: block_sum(&t.source, &e_blocks)?,
        f_blocks,
        e_blocks,
        tags,
    })
}

fn block_sum(alg: &AlgebraSpec, blocks: &[usize]) -> Result<Element> {
    let mut sum = alg.zero();
    for &b in blocks {
        sum = sum.add(&alg.block_identity(b)?)?;
    }
    Ok(sum)
}

/// Target block of each source block, if the table permutes blocks of equal
/// dimension bijectively.
fn block_permutation(t: &LinearMapTable, tol: f64) -> std::result::Result<Vec<usize>, JordanError> {
    let m = t.source.num_blocks();
    if t.target.num_blocks() != m {
        return Err(JordanError::NotBijective(format!(
            "{} source blocks but {} target blocks",
            m,
            t.target.num_blocks()
        )));
    }
    let mut targets = Vec::with_capacity(m);
    let mut hit = vec![false; m];
    for a in 0..m {
        let units: Vec<MatrixUnit> = t.source.matrix_units().into_iter().filter(|u| u.block == a).collect();
        let mut support: Vec<usize> = Vec::new();
        for u in &units {
            for (b, block) in t.image(*u)?.blocks().iter().enumerate() {
                if linalg::max_abs_entry(block) > tol && !support.contains(&b) {
                    support.push(b);
                }
            }
        }
        let [b] = support[..] else {
            return Err(JordanError::NotBijective(format!(
                "source block {a} is sent to target blocks {support:?}"
            )));
        };
        if hit[b] || t.target.dim(b)? != t.source.dim(a)? {
            return Err(JordanError::NotBijective(format!(
                "source block {a} cannot be matched with target block {b}"
            )));
        }
        hit[b] = true;
        targets.push(b);
    }
    Ok(targets)
}

/// Seeded random elements for sample `k`.
fn sample_rng(seed: u64, k: usize) -> rand_chacha::ChaCha8Rng {
    rng::stream(seed, k as u64)
}

fn basis_and_random(t: &LinearMapTable, samples: usize, seed: u64) -> Result<Vec<Element>> {
    let mut inputs = t
        .source
        .matrix_units()
        .into_iter()
        .map(|u| t.source.matrix_unit(u))
        .collect::<Result<Vec<_>>>()?;
    inputs.extend((0..samples).map(|k| t.source.random_element(&mut sample_rng(seed, k))));
    Ok(inputs)
}

/// `‖φ(A)‖ = ‖A‖` within `tol·(1 + ‖A‖)` on matrix units and random elements.
pub fn verify_isometry(t: &LinearMapTable, samples: usize, seed: u64, tol: f64) -> Result<Check> {
    verify_isometry_with(t, samples, seed, tol, Execution::default())
}

pub fn verify_isometry_with(
    t: &LinearMapTable,
    samples: usize,
    seed: u64,
    tol: f64,
    execution: Execution,
) -> Result<Check> {
    let inputs = basis_and_random(t, samples, seed)?;
    let results = exec::map_slice(execution, &inputs, |a| -> Result<(f64, CheckWitness)> {
        let norm = a.operator_norm();
        let residual = (t.apply(a)?.operator_norm() - norm).abs() / (1.0 + norm);
        Ok((
            residual,
            CheckWitness {
                identity: Identity::Norm,
                inputs: vec![a.clone()],
                residual,
            },
        ))
    });
    Check::collect(results, tol)
}

/// `φ(𝕀) = 𝕀` and `φ(G*G) ≥ −tol` on random positive elements.
pub fn verify_order_iso(t: &LinearMapTable, samples: usize, seed: u64, tol: f64) -> Result<Check> {
    let one = t.source.identity();
    let unit_residual = t.apply(&one)?.distance(&t.target.identity())?;
    if unit_residual > tol {
        return Ok(Check::Fails {
            witness: Box::new(CheckWitness {
                identity: Identity::Unit,
                inputs: vec![one],
                residual: unit_residual,
            }),
        });
    }
    let results = (0..samples).map(|k| -> Result<(f64, CheckWitness)> {
        let a = t.source.random_positive(&mut sample_rng(seed, k));
        let residual = (-t.apply(&a)?.min_hermitian_eigenvalue()).max(0.0);
        Ok((
            residual,
            CheckWitness {
                identity: Identity::Positivity,
                inputs: vec![a],
                residual,
            },
        ))
    });
    let results: Vec<_> = results.collect();
    Ok(match Check::collect(results, tol)? {
        Check::Verified { max_residual } => Check::Verified {
            max_residual: max_residual.max(unit_residual),
        },
        fails => fails,
    })
}

/// Spectral projections of a random Hermitian below and at-or-above its
/// median eigenvalue (taken over all blocks together).
fn median_split(alg: &AlgebraSpec, h: &Element) -> Result<(Element, Element)> {
    let eig: Vec<(Vec<f64>, CMatrix)> = h.blocks().iter().map(linalg::hermitian_eigen).collect();
    let mut all: Vec<f64> = eig.iter().flat_map(|(v, _)| v.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let median = all[all.len() / 2];
    let mut low = Vec::with_capacity(eig.len());
    let mut high = Vec::with_capacity(eig.len());
    for (values, vectors) in &eig {
        let d = values.len();
        let mut lo = CMatrix::zeros(d, d);
        let mut hi = CMatrix::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            let col = vectors.column(i);
            let p = col * col.adjoint();
            if v < median {
                lo += p;
            } else {
                hi += p;
            }
        }
        low.push(lo);
        high.push(hi);
    }
    Ok((Element::new(alg.clone(), low)?, Element::new(alg.clone(), high)?))
}

/// `EF = 0 ⇔ φ(E)φ(F) = 0` on diagonal matrix units and on random spectral
/// projections, after checking that `φ` sends each of them to a projection.
pub fn verify_orthoisomorphism(
    t: &LinearMapTable,
    samples: usize,
    seed: u64,
    tol: f64,
) -> std::result::Result<Check, JordanError> {
    let alg = &t.source;
    let mut projections: Vec<Element> = alg
        .matrix_units()
        .into_iter()
        .filter(|u| u.row == u.col)
        .map(|u| alg.matrix_unit(u))
        .collect::<Result<Vec<_>>>()?;
    let diagonal = projections.len();
    let mut pairs: Vec<(usize, usize)> = (0..diagonal)
        .flat_map(|i| (i + 1..diagonal).map(move |j| (i, j)))
        .collect();
    for k in 0..samples {
        let mut r = sample_rng(seed, k);
        let (lo1, hi1) = median_split(alg, &alg.random_hermitian(&mut r))?;
        let (lo2, _) = median_split(alg, &alg.random_hermitian(&mut r))?;
        let base = projections.len();
        projections.extend([lo1, hi1, lo2]);
        pairs.extend([(base, base + 1), (base, base + 2), (base + 1, base + 2)]);
    }
    let images = projections.iter().map(|p| t.apply(p)).collect::<Result<Vec<_>>>()?;
    for (p, image) in projections.iter().zip(&images) {
        if !is_projection(image, tol) {
            let residual = image.mul(image)?.sub(image)?.operator_norm();
            return Err(JordanError::NotProjectionPreserving(Box::new(CheckWitness {
                identity: Identity::ProjectionPreservation,
                inputs: vec![p.clone()],
                residual,
            })));
        }
    }
    let results = pairs.iter().map(|&(i, j)| -> Result<(f64, CheckWitness)> {
        let before = projections[i].mul(&projections[j])?.operator_norm();
        let after = images[i].mul(&images[j])?.operator_norm();
        // Mismatch: one side vanishes and the other does not.
        let residual = if (before <= tol) == (after <= tol) {
            0.0
        } else {
            before.max(after)
        };
        Ok((
            residual,
            CheckWitness {
                identity: Identity::Orthogonality,
                inputs: vec![projections[i].clone(), projections[j].clone()],
                residual,
            },
        ))
    });
    let results: Vec<_> = results.collect();
    Ok(Check::collect(results, tol)?)
}

/// `tr φ(A) = tr A` for a *-isomorphism or *-anti-isomorphism between two
/// single blocks of equal dimension.
pub fn check_trace_preservation(
    t: &LinearMapTable,
    samples: usize,
    seed: u64,
    tol: f64,
) -> std::result::Result<Check, JordanError> {
    let (src, tgt) = (t.source.block_dims(), t.target.block_dims());
    if src.len() != 1 || tgt.len() != 1 || src[0] != tgt[0] {
        return Err(JordanError::PreconditionFailed(format!(
            "expected two single blocks of equal dimension, got {src:?} and {tgt:?}"
        )));
    }
    kadison_split(t, tol).map_err(|e| JordanError::PreconditionFailed(e.to_string()))?;
    let inputs = basis_and_random(t, samples, seed)?;
    let results = inputs.iter().map(|a| -> Result<(f64, CheckWitness)> {
        let residual = (t.apply(a)?.trace(0)? - a.trace(0)?).norm();
        Ok((
            residual,
            CheckWitness {
                identity: Identity::Trace,
                inputs: vec![a.clone()],
                residual,
            },
        ))
    });
    let results: Vec<_> = results.collect();
    Ok(Check::collect(results, tol)?)
}

/// A Jordan *-isomorphism of `dims` onto itself with its planted structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedJordan {
    pub table: LinearMapTable,
    /// Target block of each source block.
    pub targets: Vec<usize>,
    pub tags: Vec<Tag>,
    pub unitaries: Vec<CMatrix>,
}

/// `A_a ↦ U_a A_a U_a*` or `U_a A_aᵀ U_a*` placed in block `π(a)`, where `π`
/// shuffles blocks of equal dimension. One-dimensional blocks are tagged
/// multiplicative.
pub fn random_jordan_iso(dims: &[usize], seed: u64) -> Result<PlantedJordan> {
    let alg = AlgebraSpec::new(dims)?;
    let mut r = rng::stream(seed, u64::MAX);
    let mut targets: Vec<usize> = (0..dims.len()).collect();
    let mut distinct: Vec<usize> = dims.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for d in distinct {
        let group: Vec<usize> = (0..dims.len()).filter(|&a| dims[a] == d).collect();
        let mut shuffled = group.clone();
        shuffled.shuffle(&mut r);
        for (a, b) in group.into_iter().zip(shuffled) {
            targets[a] = b;
        }
    }
    let tags: Vec<Tag> = dims
        .iter()
        .map(|&d| {
            if d > 1 && r.random_bool(0.5) {
                Tag::AntiMultiplicative
            } else {
                Tag::Multiplicative
            }
        })
        .collect();
    let unitaries: Vec<CMatrix> = dims
        .iter()
        .enumerate()
        .map(|(a, &d)| linalg::haar_isometry(&mut rng::stream(seed, a as u64), d, d))
        .collect();
    let table = LinearMapTable::from_fn(alg.clone(), alg.clone(), |x| {
        let mut blocks = alg.zero().into_blocks();
        for (a, block) in x.blocks().iter().enumerate() {
            let inner = match tags[a] {
                Tag::Multiplicative => block.clone(),
                Tag::AntiMultiplicative => block.transpose(),
            };
            blocks[targets[a]] = &unitaries[a] * inner * unitaries[a].adjoint();
        }
        Element::new(alg.clone(), blocks)
    })?;
    Ok(PlantedJordan {
        table,
        targets,
        tags,
        unitaries,
    })
}

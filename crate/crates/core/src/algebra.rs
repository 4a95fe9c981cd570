//! Finite-dimensional C*-algebras as direct sums of full matrix blocks.
//!
//! Every finite-dimensional C*-algebra is *-isomorphic to
//! `M_{d_1}(C) ⊕ … ⊕ M_{d_m}(C)`, so an algebra is just the ordered list of
//! block dimensions and an element is one square matrix per block.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rng;

/// Ordered block dimensions `(d_1, …, d_m)`. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraSpec {
    dims: Arc<[usize]>,
}

impl AlgebraSpec {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyDims);
        }
        if let Some(index) = dims.iter().position(|&d| d == 0) {
            return Err(Error::NonPositiveDim { index });
        }
        Ok(Self { dims: dims.into() })
    }

    /// `n` one-dimensional blocks: the algebra of functions on `n` points.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(&vec![1; n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, block: usize) -> Result<usize> {
        self.dims.get(block).copied().ok_or(Error::BlockOutOfRange {
            block,
            blocks: self.dims.len(),
        })
    }

    /// `Σ d_a²`, the linear dimension of the algebra.
    pub fn linear_dim(&self) -> usize {
        self.dims.iter().map(|d| d * d).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    pub fn identity(&self) -> Element {
        self.element_from_fn(|_, d| CMatrix::identity(d, d))
    }

    pub fn zero(&self) -> Element {
        self.element_from_fn(|_, d| CMatrix::zeros(d, d))
    }

    /// The identity of one block, zero elsewhere (a central projection).
    pub fn block_identity(&self, block: usize) -> Result<Element> {
        self.dim(block)?;
        Ok(self.element_from_fn(|a, d| {
            if a == block {
                CMatrix::identity(d, d)
            } else {
                CMatrix::zeros(d, d)
            }
        }))
    }

    /// Matrix unit `E^{(block)}_{ij}`.
    pub fn matrix_unit(&self, unit: MatrixUnit) -> Result<Element> {
        let d = self.dim(unit.block)?;
        if unit.row >= d || unit.col >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: unit.row.max(unit.col) + 1,
            });
        }
        let mut e = self.zero();
        e.blocks[unit.block][(unit.row, unit.col)] = Complex64::from(1.0);
        Ok(e)
    }

    /// All matrix units, block by block, row-major inside each block.
    pub fn matrix_units(&self) -> Vec<MatrixUnit> {
        self.dims
            .iter()
            .enumerate()
            .flat_map(|(block, &d)| {
                (0..d).flat_map(move |row| (0..d).map(move |col| MatrixUnit { block, row, col }))
            })
            .collect()
    }

    /// Random layout with `1..=max_blocks` blocks of dimension `1..=max_dim`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_blocks: usize, max_dim: usize) -> Result<Self> {
        let m = rng.random_range(1..=max_blocks.max(1));
        let dims: Vec<usize> = (0..m).map(|_| rng.random_range(1..=max_dim.max(1))).collect();
        Self::new(&dims)
    }

    /// Element with independent complex Gaussian entries.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        self.element_from_fn(|_, d| rng::gaussian_matrix(rng, d, d))
    }

    /// Random Hermitian element.
    pub fn random_hermitian<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        self.element_from_fn(|_, d| linalg::hermitian_part(&rng::gaussian_matrix(rng, d, d)))
    }

    /// Random positive semidefinite element `G*G`.
    pub fn random_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        self.element_from_fn(|_, d| {
            let g = rng::gaussian_matrix(rng, d, d);
            g.adjoint() * g
        })
    }

    fn element_from_fn(&self, mut f: impl FnMut(usize, usize) -> CMatrix) -> Element {
        let blocks = self.dims.iter().enumerate().map(|(a, &d)| f(a, d)).collect();
        Element {
            algebra: self.clone(),
            blocks,
        }
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                left: self.dims.to_vec(),
                right: other.dims.to_vec(),
            })
        }
    }
}

impl fmt::Debug for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraSpec{:?}", &*self.dims)
    }
}

impl TryFrom<Vec<usize>> for AlgebraSpec {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(&dims)
    }
}

impl From<AlgebraSpec> for Vec<usize> {
    fn from(spec: AlgebraSpec) -> Self {
        spec.dims.to_vec()
    }
}

/// Convenience constructor mirroring [`AlgebraSpec::new`].
pub fn make_algebra(dims: &[usize]) -> Result<AlgebraSpec> {
    AlgebraSpec::new(dims)
}

/// Index of a matrix unit `E^{(block)}_{row,col}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl MatrixUnit {
    pub fn new(block: usize, row: usize, col: usize) -> Self {
        Self { block, row, col }
    }
}

/// An element of an [`AlgebraSpec`]: one `d_a × d_a` complex matrix per block.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "wire::ElementWire", into = "wire::ElementWire")]
pub struct Element {
    algebra: AlgebraSpec,
    blocks: Vec<CMatrix>,
}

impl Element {
    pub fn new(algebra: AlgebraSpec, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::DimensionMismatch {
                expected: algebra.num_blocks(),
                found: blocks.len(),
            });
        }
        for (block, (m, &d)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::ShapeMismatch {
                    block,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    dim: d,
                });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { block });
            }
        }
        Ok(Self { algebra, blocks })
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, block: usize) -> Result<&CMatrix> {
        self.algebra.dim(block)?;
        Ok(&self.blocks[block])
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    /// Entry `(row, col)` of block `block`, i.e. the coefficient of that matrix unit.
    pub fn coefficient(&self, unit: MatrixUnit) -> Complex64 {
        self.blocks[unit.block][(unit.row, unit.col)]
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Element> {
        self.algebra.ensure_same(&other.algebra)?;
        Ok(Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Element {
        self.map_blocks(|a| a * c)
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|a| a.adjoint())
    }

    /// Blockwise transpose in the standard basis (`c A* c` for entrywise conjugation `c`).
    pub fn transpose(&self) -> Element {
        self.map_blocks(|a| a.transpose())
    }

    /// `AB + BA`.
    pub fn jordan_product(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a * b + b * a)
    }

    /// `max_a ‖A_a‖`, the largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    pub fn trace(&self, block: usize) -> Result<Complex64> {
        Ok(self.block(block)?.trace())
    }

    /// Largest absolute entry over all blocks.
    pub fn max_abs_entry(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs_entry).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part, over all blocks.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(linalg::hermitian_eigenvalues)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn distance(&self, other: &Element) -> Result<f64> {
        Ok(self.sub(other)?.operator_norm())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("algebra", &self.algebra)
            .field("blocks", &self.blocks)
            .finish()
    }
}

pub fn identity(alg: &AlgebraSpec) -> Element {
    alg.identity()
}

pub(crate) mod wire {
    use super::*;

    /// A complex number on the wire: `[re, im]`.
    pub type ComplexWire = [f64; 2];

    pub fn complex_to_wire(z: Complex64) -> ComplexWire {
        [z.re, z.im]
    }

    pub fn complex_from_wire(z: ComplexWire) -> Complex64 {
        Complex64::new(z[0], z[1])
    }

    pub fn matrix_to_wire(m: &CMatrix) -> Vec<Vec<ComplexWire>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| complex_to_wire(m[(i, j)])).collect())
            .collect()
    }

    /// Row-major nested arrays to a matrix; rows must be rectangular.
    pub fn matrix_from_wire(rows: &[Vec<ComplexWire>]) -> std::result::Result<CMatrix, String> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err("ragged matrix rows".into());
        }
        Ok(CMatrix::from_fn(nrows, ncols, |i, j| complex_from_wire(rows[i][j])))
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct ElementWire {
        pub algebra: AlgebraSpec,
        pub blocks: Vec<Vec<Vec<ComplexWire>>>,
    }

    impl From<Element> for ElementWire {
        fn from(e: Element) -> Self {
            ElementWire {
                blocks: e.blocks.iter().map(matrix_to_wire).collect(),
                algebra: e.algebra,
            }
        }
    }

    impl TryFrom<ElementWire> for Element {
        type Error = Error;

        fn try_from(w: ElementWire) -> Result<Self> {
            let blocks = w
                .blocks
                .iter()
                .map(|b| matrix_from_wire(b))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(Error::MalformedMap)?;
            Element::new(w.algebra, blocks)
        }
    }
}

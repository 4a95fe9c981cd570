//! Composition operators on functions over finite point sets.
//!
//! `C(K)` for `|K| = n` is the algebra with `n` one-dimensional blocks. A
//! point map `ν: S → K` acts by `f ↦ f ∘ ν`, and every unital
//! *-homomorphism `C(K) → C(S)` has this form.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Element, MatrixUnit};
use crate::error::{Error, Result};
use crate::jordan::LinearMapTable;
use crate::linalg::CMatrix;

/// `ν: {0..s} → {0..n}` as a table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PointMapWire", into = "PointMapWire")]
pub struct PointMap {
    n: usize,
    nu: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointMapWire {
    n: usize,
    s: usize,
    nu: Vec<usize>,
}

impl PointMap {
    pub fn new(n: usize, nu: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDims);
        }
        if nu.is_empty() {
            return Err(Error::EmptyDims);
        }
        if let Some(&k) = nu.iter().find(|&&k| k >= n) {
            return Err(Error::BlockOutOfRange { block: k, blocks: n });
        }
        Ok(Self { n, nu })
    }

    /// Source point count `|K|`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Target point count `|S|`.
    pub fn s(&self) -> usize {
        self.nu.len()
    }

    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.n];
        self.nu.iter().all(|&k| !std::mem::replace(&mut seen[k], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.n == self.s() && self.is_injective()
    }

    /// Uniformly random table.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, s: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDims);
        }
        Self::new(n, (0..s).map(|_| rng.random_range(0..n)).collect())
    }

    /// Every point map with the given sizes, in lexicographic order.
    pub fn enumerate(n: usize, s: usize) -> Vec<PointMap> {
        if n == 0 || s == 0 {
            return Vec::new();
        }
        let total = n.pow(s as u32);
        (0..total)
            .map(|mut code| {
                let mut nu = vec![0; s];
                for slot in nu.iter_mut().rev() {
                    *slot = code % n;
                    code /= n;
                }
                PointMap { n, nu }
            })
            .collect()
    }
}

impl From<PointMap> for PointMapWire {
    fn from(p: PointMap) -> Self {
        PointMapWire {
            n: p.n,
            s: p.nu.len(),
            nu: p.nu,
        }
    }
}

impl TryFrom<PointMapWire> for PointMap {
    type Error = Error;

    fn try_from(w: PointMapWire) -> Result<Self> {
        if w.s != w.nu.len() {
            return Err(Error::DimensionMismatch {
                expected: w.s,
                found: w.nu.len(),
            });
        }
        PointMap::new(w.n, w.nu)
    }
}

/// `φ(e_k) = Σ_{ν(s) = k} e_s`.
pub fn composition_operator(nu: &PointMap) -> LinearMapTable {
    let source = AlgebraSpec::commutative(nu.n).expect("n > 0");
    let target = AlgebraSpec::commutative(nu.s()).expect("s > 0");
    let images = (0..nu.n)
        .map(|k| {
            let blocks = nu
                .nu
                .iter()
                .map(|&j| CMatrix::from_element(1, 1, Complex64::from(if j == k { 1.0 } else { 0.0 })))
                .collect();
            Element::new(target.clone(), blocks).expect("shape")
        })
        .collect();
    LinearMapTable::new(source, target, images).expect("table shape")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotStarHomomorphism {
    /// Target point where the failure shows up.
    pub point: usize,
    /// Values `φ(e_k)(point)` for every `k`.
    pub values: Vec<[f64; 2]>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "failure", content = "detail", rename_all = "snake_case")]
pub enum ExtractError {
    #[error("not a unital *-homomorphism at point {}: {}", .0.point, .0.reason)]
    NotStarHomomorphism(Box<NotStarHomomorphism>),
    #[error(transparent)]
    Algebra(#[from] Error),
}

/// Recovers `ν` from a unital *-homomorphism between commutative algebras.
///
/// At each target point `s` the values `φ(e_k)(s)` must be `1` for exactly
/// one `k` and `0` for the others. This is the basis form of unitality,
/// multiplicativity and self-adjointness at `s`.
pub fn extract_point_map(t: &LinearMapTable, tol: f64) -> std::result::Result<PointMap, ExtractError> {
    if !t.source().is_commutative() || !t.target().is_commutative() {
        return Err(Error::MalformedMap("extract_point_map needs all blocks of dimension 1".into()).into());
    }
    let n = t.source().num_blocks();
    let s = t.target().num_blocks();
    let mut nu = Vec::with_capacity(s);
    for point in 0..s {
        let values: Vec<Complex64> = (0..n)
            .map(|k| t.image(MatrixUnit::new(k, 0, 0)).map(|e| e.blocks()[point][(0, 0)]))
            .collect::<Result<_>>()?;
        let fail = |reason: String| {
            ExtractError::NotStarHomomorphism(Box::new(NotStarHomomorphism {
                point,
                values: values.iter().map(|z| [z.re, z.im]).collect(),
                reason,
            }))
        };
        let ones: Vec<usize> = (0..n).filter(|&k| (values[k] - 1.0).norm() <= tol).collect();
        let zeros = (0..n).filter(|&k| values[k].norm() <= tol).count();
        match ones[..] {
            [k] if zeros == n - 1 => nu.push(k),
            [] if zeros == n => return Err(fail("unit is not preserved".into())),
            [] | [_] => {
                return Err(fail("some φ(e_k) takes a value other than 0 or 1".into()));
            }
            _ => return Err(fail("several points map to the same target point".into())),
        }
    }
    Ok(PointMap::new(n, nu)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raymaps::classify;
    use crate::states::PureState;
    use crate::wigner::assemble;

    #[test]
    fn composition_examples() {
        let id = composition_operator(&PointMap::new(3, vec![0, 1, 2]).unwrap());
        let alg = AlgebraSpec::commutative(3).unwrap();
        for u in alg.matrix_units() {
            assert_eq!(id.image(u).unwrap(), &alg.matrix_unit(u).unwrap());
        }

        let phi = composition_operator(&PointMap::new(3, vec![2, 0]).unwrap());
        let tgt = AlgebraSpec::commutative(2).unwrap();
        let e = |k| tgt.matrix_unit(MatrixUnit::new(k, 0, 0)).unwrap();
        assert_eq!(phi.image(MatrixUnit::new(2, 0, 0)).unwrap(), &e(0));
        assert_eq!(phi.image(MatrixUnit::new(0, 0, 0)).unwrap(), &e(1));
        assert_eq!(phi.image(MatrixUnit::new(1, 0, 0)).unwrap(), &tgt.zero());

        let constant = composition_operator(&PointMap::new(3, vec![0, 0]).unwrap());
        let f = Element::new(
            alg.clone(),
            [5.0, -1.0, 2.0].iter().map(|&v| CMatrix::from_element(1, 1, Complex64::from(v))).collect(),
        )
        .unwrap();
        assert_eq!(constant.apply(&f).unwrap(), tgt.identity().scale(Complex64::from(5.0)));
    }

    #[test]
    fn extract_examples() {
        for nu in PointMap::enumerate(3, 2) {
            let back = extract_point_map(&composition_operator(&nu), 1e-10).unwrap();
            assert_eq!(back, nu);
        }
        let k = AlgebraSpec::commutative(3).unwrap();
        let average = LinearMapTable::from_fn(k.clone(), k.clone(), |f| {
            let mean = (0..3).map(|i| f.blocks()[i][(0, 0)]).sum::<Complex64>() / 3.0;
            Ok(k.identity().scale(mean))
        })
        .unwrap();
        assert!(matches!(
            extract_point_map(&average, 1e-10),
            Err(ExtractError::NotStarHomomorphism(_))
        ));
        let zero = LinearMapTable::from_fn(k.clone(), k.clone(), |_| Ok(k.zero())).unwrap();
        assert!(matches!(extract_point_map(&zero, 1e-10), Err(ExtractError::NotStarHomomorphism(_))));
    }

    #[test]
    fn bijective_iff_invertible() {
        for nu in PointMap::enumerate(3, 3) {
            let table = composition_operator(&nu);
            let split = crate::jordan::kadison_split(&table, 1e-10);
            assert_eq!(split.is_ok(), nu.is_bijective(), "{nu:?}");
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(PointMap::enumerate(3, 3).len(), 27);
        assert_eq!(PointMap::enumerate(2, 3).len(), 8);
        assert_eq!(PointMap::enumerate(1, 2), vec![PointMap::new(1, vec![0, 0]).unwrap()]);
    }

    #[test]
    fn json_shape() {
        let p = PointMap::new(3, vec![2, 0]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"n":3,"s":2,"nu":[2,0]}"#);
        assert!(serde_json::from_str::<PointMap>(r#"{"n":3,"s":3,"nu":[2,0]}"#).is_err());
        assert!(serde_json::from_str::<PointMap>(r#"{"n":2,"s":1,"nu":[2]}"#).is_err());
    }

    #[test]
    fn dual_ray_map_orthogonal_iff_injective() {
        for nu in PointMap::enumerate(2, 3).into_iter().chain(PointMap::enumerate(3, 2)) {
            let bb = composition_operator(&nu).dual_ray_map();
            let report = classify(&bb, 10, 0, 1e-8);
            assert!(report.co_orthogonal.holds());
            assert!(report.fibre_preserving.holds());
            assert_eq!(report.orthogonal.holds(), nu.is_injective(), "{nu:?}");
            let s = PureState::basis(bb.source(), 1, 0).unwrap();
            assert_eq!(bb.eval(&s).unwrap().block(), nu.nu()[1]);
        }
    }

    #[test]
    fn general_pipeline_agrees() {
        let nu = PointMap::new(4, vec![2, 0, 3, 1]).unwrap();
        let table = composition_operator(&nu);
        let phi = assemble(&table.dual_ray_map(), 1e-8).unwrap();
        let rebuilt = LinearMapTable::from_induced(&phi).unwrap();
        assert!(rebuilt.max_entry_distance(&table).unwrap() <= 1e-10);
    }
}

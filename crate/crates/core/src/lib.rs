//! Pure-state transformations of finite-dimensional C*-algebras.
//!
//! An algebra is a direct sum of full matrix blocks ([`algebra`]); its pure
//! states are rays inside single blocks ([`states`]). A map between pure-state
//! spaces ([`raymaps`]) can be classified against orthogonality, fibre and
//! transition-probability properties, and, when it is a Wigner-type symmetry
//! on each fibre, the linear map inducing it is reconstructed
//! ([`wigner`]). [`jordan`] checks the structure of Jordan *-maps and
//! [`commutative`] handles composition operators `f ↦ f ∘ ν` on finite point
//! sets.

pub mod algebra;
pub mod commutative;
pub mod error;
pub mod exec;
pub mod jordan;
pub mod linalg;
pub mod raymaps;
pub mod rng;
pub mod states;
pub mod wigner;

pub use algebra::{make_algebra, AlgebraSpec, Element, MatrixUnit};
pub use commutative::{composition_operator, extract_point_map, PointMap};
pub use error::{Error, Result};
pub use exec::Execution;
pub use jordan::{is_jordan_star_homomorphism, kadison_split, LinearMapTable};
pub use raymaps::{as_blackbox, classify, ClassificationReport, MapKind, RayMapBlackBox, RayMapCanonical, Verdict};
pub use states::{
    is_orthogonal, make_pure_state, projection_witness, state_distance, transition_probability, PureState,
};
pub use wigner::{apply_induced, assemble, reconstruct_fiber, verify_induction, InducedMap};

pub use num_complex::Complex64;

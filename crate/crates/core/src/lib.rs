//! Exact-arithmetic engine for compact and finite *-algebraic quantum groups.
//!
//! A quantum group is given as a [`hopf::Presentation`]: a graded basis with
//! structure maps and a positive right integral. From it the engine derives
//! the modular automorphisms, the modular element, Fourier duality, the GNS
//! operators `T`, `∇`, `J` and their duals, and the multiplicative unitary,
//! and checks the identities relating them on degree truncations.

pub mod coverage;
pub mod error;
pub mod duality;
pub mod examples;
pub mod gns;
pub mod hopf;
pub mod linalg;
pub mod modular;
pub mod munitary;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod suites;

pub use error::{AqgError, Result};
pub use hopf::{BasisIndex, Element, Presentation, StructureMaps, TensorElement};
pub use scalar::{scalar_pow_it, scalar_pow_z, PositiveEigenvalue, Scalar, DEFAULT_TOLERANCE};

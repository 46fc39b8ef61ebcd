//! Numerical verification library for the nine connected Lie groups that act
//! transitively and effectively on a sphere: `SO(n)`, `U(n)`, `SU(n)`, `Sp(n)`,
//! `Sp(n)U(1)`, `Sp(n)Sp(1)`, `G2`, `Spin(7)` and `Spin(9)`.
//!
//! The crate builds the defining invariant structures of each group (complex and
//! quaternionic structures, the `G2` three-form, the `Spin(7)` four-form, the
//! `Spin(9)` Clifford generators), computes Lie algebra bases and stabilizer
//! subalgebras as nullspaces of linear constraint systems, searches for special
//! subspaces under two non-equivalent definitions, integrates parallel transport
//! around loops on round spheres, and checks the resulting weak-holonomy
//! identities and counterexamples at desk scale.
//!
//! All computations are dense double-precision linear algebra in ambient
//! dimension at most 16; every randomized routine takes an explicit seed.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod liealg;
pub mod report;
pub mod special;
pub mod structures;
pub mod transport;
pub mod weakcheck;

pub use error::HoloError;
pub use linalg::{Operator, SubspaceBasis, Tolerances};
pub use structures::{GroupFamily, GroupSpec};

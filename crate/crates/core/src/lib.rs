//! Finite subgroups of O(4) in quaternion-pair notation.
//!
//! The crate builds groups from generators, decides whether a group has a
//! common invariant line, contains an element without one, or is conjugate
//! to the order-16 group `K = <*[i,i][i,1], *[k,k][i,1]>`, and computes the
//! linking-sign chirality invariant of double rotations.

pub mod error;
pub mod tolerance;

pub mod scalar;
pub mod quat;
pub mod elem;
pub mod linalg;
pub mod group;
pub mod chirality;
pub mod catalog;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use catalog::FamilySpec;
pub use elem::{parse_element, OrthElement};
pub use group::{Case, Classification, FiniteGroup};
pub use quat::{Quaternion, UnitQuaternion};
pub use scalar::{parse_scalar, ExactScalar, Rational};

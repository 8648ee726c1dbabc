//! Certified lower bounds on dimensions of joins and secant varieties of
//! toric cones, computed from the linear, affine and Voronoi partition
//! problems over the rationals, plus a Terracini rank oracle mod p.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod codes;
pub mod error;
pub mod geometry;
pub mod models;
pub mod oracle;
pub mod rational;
pub mod search;

pub use bounds::{PartitionResult, Problem, Witness};
pub use error::{Error, Result};
pub use geometry::{affine_dim, dist_sq, rank, AffineMap, GramForm};
pub use models::{LabelledSet, ModelDescriptor, PointConfig};
pub use rational::{Rational, RationalPoint};

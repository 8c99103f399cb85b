//! Convex algebras on the unit interval whose operations are monotone and
//! one-sidedly continuous.
//!
//! Every such algebra is determined by a closed eater set `E ∋ 0` and a tag
//! in `{1, ∞}` per gap of `E`. This crate builds the algebra for given data
//! ([`plonka`]), recovers the data from an algebra ([`classify`]), decides
//! isomorphy ([`iso`]) and checks the defining laws by sampling ([`laws`]).

pub mod algebra;
pub mod blocks;
pub mod classify;
pub mod error;
pub mod fixtures;
pub mod iso;
pub mod laws;
pub mod plonka;
pub mod point;
pub mod rational;
pub mod spec;

pub use algebra::{AlgebraHandle, ExactOp, KernelClass, NumericOp, PointDist};
pub use blocks::BlockKind;
pub use error::{Error, Result, SpecViolation};
pub use plonka::{build, Block, LocateMode, PlonkaAlgebra, SPoint};
pub use point::{Param, Point};
pub use rational::Rational;
pub use spec::{Component, EaterSpec, GapTag, LadderSpec};

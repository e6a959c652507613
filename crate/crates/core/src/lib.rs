//! Verified interval numerics for counting the relative equilibria of the
//! planar circular restricted 4-body problem.
//!
//! The layers build on each other: [`interval`] arithmetic, [`taylor`]
//! jets, the [`potential`] system `F(r, φ; s, t)`, zero certification in
//! [`solve`], bifurcation analysis in [`bifurcation`], the light-primary
//! bounds of [`small_masses`], and the proof orchestration in [`search`].

pub mod bifurcation;
pub mod interval;
pub mod potential;
pub mod search;
pub mod small_masses;
pub mod solve;
pub mod taylor;

pub use interval::{IBox, Interval, IntervalError, PBox};
pub use potential::{Masses, ParamRect};
pub use taylor::{Jet1, Jet2, JetError};

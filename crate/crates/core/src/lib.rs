//! Slide statistics of finite point sets.
//!
//! The nearest-neighbour distances of a point set, sorted in descending
//! order, define a step density on `[0, 1)`. Deforming that density by
//! powers `f^t` and tracking its genial entropy gives the slide function
//! `σ(t)`; its right-derivatives at zero are the scale-invariant slide
//! numbers `ρ₁, ρ₂, …`. This crate computes `ρ₁` and `ρ₂` in closed form,
//! checks them against finite-difference oracles, and provides the point
//! generators, return-series embedding and Monte Carlo harness used to
//! study them.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generators;
pub mod genial;
pub mod harness;
pub mod io;
pub mod nn;
pub mod profile;
pub mod returns;
pub mod slide;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use genial::{
    genial_entropy_complement_ecdf, genial_entropy_quadrature, genial_entropy_step, Domain,
    StepDensity,
};
pub use profile::{make_profile, DistanceProfile};
pub use slide::{rho1, rho1_fd, rho2, rho2_fd, slide_function_step, SlideEstimate};
pub use special::{dimension_from_rho2, log_slide_reference, tangible_target, TangibilityTarget};
pub use generators::{SourceKind, SourceSpec};
pub use nn::{nn_distances, nn_distances_1d, Engine, Mode, PointCloud};
pub use returns::{delay_embed, log_returns, rho_curve, scatter_point, ReturnSeries, RhoCurve, Windows};

//! Box-constrained maximization engine built around sign-quantized steps
//! with conjugate directions, plus the analytics to study its behavior.
//!
//! The crate has four layers:
//!
//! * **Geometry and objectives** ([`geometry`], [`objective`]): box regions
//!   formed by intersecting a coordinate-wise budget with the unit cube, and
//!   differentiable objectives over them - the classification margin of a
//!   small dense network ([`mlp`], trained on the toy data in [`dataset`]),
//!   strictly convex quadratics, and a rugged two-dimensional test surface.
//! * **Attack engine** ([`attack`], [`beta`]): the conjugate sign-step
//!   maximizer with automatic step-size halving at scheduled checkpoints,
//!   the momentum sign-step baseline, and hybrids that hand over between the
//!   two families as the step size decays. Seven interchangeable conjugate
//!   coefficient rules live in [`beta`].
//! * **Reference algorithms** ([`cg`]): classical conjugate gradient on
//!   quadratics, the unconstrained ideal the engine generalizes.
//! * **Analytics** ([`diversity`]): threshold-graph clustering and the
//!   diversity index that quantifies how broadly a run explored, exactly
//!   integrated over all thresholds.
//!
//! Batch work (restarts, window scans) goes through [`parallel`], which runs
//! on rayon when the default `parallel` feature is enabled and sequentially
//! otherwise; either way results are in deterministic input order.

pub mod attack;
pub mod beta;
pub mod cg;
pub mod dataset;
pub mod diversity;
pub mod error;
pub mod geometry;
pub mod mlp;
pub mod objective;
pub mod parallel;
pub mod vecmath;

pub use attack::{
    checkpoint_schedule, run_attack, run_restarts, AttackConfig, AttackTrace, Family,
    IterationRecord, Method,
};
pub use beta::{conjugate_coefficient, BetaRule, DEFAULT_RULES};
pub use cg::{cg_quadratic_minimize, CgOutcome};
pub use dataset::{gaussian_blobs, two_moons, Dataset};
pub use diversity::{di_trace, diversity_index, global_clustering, local_clustering};
pub use error::{CoreError, Result};
pub use geometry::FeasibleRegion;
pub use mlp::{
    accuracy, mean_cross_entropy, train_toy, Activation, DenseLayer, MlpClassifier, TrainConfig,
    TrainOutcome,
};
pub use objective::{
    margin_grad_logits, margin_loss, runner_up_class, MarginObjective, MultimodalSurface,
    Objective, Quadratic,
};
pub use parallel::{par_map, seq_map};

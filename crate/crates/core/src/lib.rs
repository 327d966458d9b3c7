//! Exact information-theoretic tooling for the one-message index-retrieval
//! game and the Gray-Wyner rate region of small discrete sources.
//!
//! The crate has four layers:
//!
//! - [`pmf`] / [`shannon`]: finite joint distributions, conditional
//!   channels, and the Shannon quantities on them (all base-2, all exact);
//! - [`boxes`]: bipartite no-signaling boxes with CHSH scoring, including
//!   the PR box and the isotropic noise family;
//! - [`game`]: the game itself — nested XOR protocols over boxes and
//!   classical shared-randomness protocols, evaluated by full enumeration
//!   of the joint distribution;
//! - [`gray_wyner`] / [`explorer`]: the rate region (achievable points,
//!   facet checks, the dual support function with certified bounds, and
//!   membership verdicts) plus a reproducible sweep harness.
//!
//! Core math is generic over the scalar type through [`Real`]
//! (`f32`/`f64`); every public struct defaults to `f64`, which is the
//! precision the harness and CLI use.

pub mod boxes;
pub mod error;
pub mod explorer;
pub mod game;
pub mod gray_wyner;
pub mod pmf;
pub mod real;
pub mod shannon;

pub use boxes::BipartiteBox;
pub use error::{Error, Result};
pub use game::{
    evaluate_ic, run_box_strategy, run_classical_strategy, BoxStrategy, ClassicalStrategy,
    ICEvaluation,
};
pub use gray_wyner::{
    achievable_point, dual_value, entropy_facets_check, membership_test,
    product_region_membership, DualOptions, DualValue, DualWeights, FacetReport, FacetSlack,
    MembershipOptions, MembershipVerdict, RatePoint,
};
pub use pmf::{Channel, JointPmf};
pub use real::Real;

/// Default scalar used by the CLI and the sweep harness.
pub type Float = f64;

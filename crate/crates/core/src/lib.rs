//! Closest fair clustering and ℓ-mean fair consensus for red/blue points.
//!
//! A clustering is fair when every cluster has blue and red points in the
//! same `p:q` ratio as the whole point set. [`closest_fair`] moves an input
//! clustering to a nearby fair one (exactly for 1:1, within a constant
//! factor otherwise) and [`fair_consensus`] aggregates several inputs into
//! one fair clustering. The [`oracle`] module solves small instances by
//! exhaustive search.

pub mod balance_frac;
pub mod balance_int;
pub mod distance;
pub mod equifair;
pub mod error;
pub mod fairify;
pub mod instances;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pipeline;
mod rebalance;
pub mod workspace;

pub use distance::{compare_lmean, dist, dist_fast, lmean, lmean_within, ConsensusObjective, Distance, Ell};
pub use error::{FairError, Result};
pub use model::{is_balanced, is_fair, ClusterStats, Clustering, Color, ColoredInstance, Regime};
pub use pipeline::{closest_fair, fair_consensus, ConsensusResult, Factor, Guarantee, GuaranteeReport};
pub use workspace::{replay, Transcript};

/// ℓ-mean objective in double precision.
pub type Objective = ConsensusObjective<f64>;
/// ℓ-mean objective in single precision.
pub type Objective32 = ConsensusObjective<f32>;
/// Consensus exponent in double precision.
pub type Exponent = Ell<f64>;

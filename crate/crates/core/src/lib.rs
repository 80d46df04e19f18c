//! Forecasting decision trees and the hs scoring rule for randomized query
//! complexity of small Boolean functions.
//!
//! The crate covers scoring rules and their matching distance measures,
//! deterministic and randomized forecasting trees with exhaustive
//! enumeration, linear amplification of hs scores, exact rational linear
//! programming, brute-force complexity oracles, a solver for the hard input
//! distribution of the cost/score ratio game, and univariate amplification
//! polynomials.

pub mod amplify;
pub mod distances;
pub mod error;
pub mod foundation;
pub mod lp;
pub mod oracle;
pub mod polyamp;
pub mod rational;
pub mod scoring;
pub mod solver;
pub mod trees;

pub use distances::{distance, max_score, FinitePair, Measure};
pub use error::{Error, Result};
pub use foundation::{is_balanced, Balance, ExtendedReal, InputDistribution, PartialFunction};
pub use rational::Rational;
pub use scoring::ScoringRule;
pub use solver::{HardDistributionCertificate, SplitHardPair};

pub use trees::{ForecastTree, RandomizedForecastTree, Shape, Transcript};

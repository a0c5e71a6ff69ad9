//! Exact L² discrepancy of the two-dimensional lattices
//! `L(α,N) = {({nα}, n/N)}` and their symmetrizations `S(α,N)`, together
//! with continued-fraction based enclosures and limit-law experiments.

pub mod alpha;
pub mod bounds;
pub mod cf;
pub mod discrepancy;
pub mod error;
pub mod fixedpoint;
pub mod interval;
pub mod lattice;
pub mod metric;
pub mod parseval;
pub mod quadratic;

pub use alpha::{Alpha, AlphaSpec, AlphaValue};
pub use cf::{
    cf_of_rational, cf_of_surd, cf_stats, convergents, optimality_stats, CfStats, ContinuedFraction, Convergent,
    QuadraticSurd,
};
pub use discrepancy::{d2, d2_exact, d2_exact_fast, d2_exact_quadratic, Algo, DiscrepancyValue, PointSet};
pub use error::{Error, Result};
pub use fixedpoint::{BirkhoffSums, FixedPointReal};
pub use interval::Interval;
pub use lattice::{build_L, build_S, LatticePointSet, Precision};
pub use metric::{kolmogorov_distance, levy_cdf, EmpiricalDistribution, Estimator, Measure, SweepConfig, SweepMode};
pub use parseval::{dioph_sum, prop1_enclosure, Enclosure, Expansion, Variant, Weight};
pub use quadratic::{a_constant, beck_constant_estimate, lambda_constant};

//! Scores, significance tests and corpus distribution tables.

mod chisq;
mod cv;
mod distribution;
mod metrics;

pub use chisq::{chi2_sf, chi_square, chi_square_location, chi_square_senses, gamma_q, ln_gamma, ChiSquareResult};
pub use cv::{cross_validate, CvReport, FoldScore};
pub use distribution::{distribution, Axis, DistRow, DistributionReport};
pub use metrics::{
    confusion, evaluate, harmonic, macro_f1, micro_f1, prf, solve_inter_weight, weighted_overall, ConfusionMatrix,
    GroupScores, LabelRow, MetricsReport, Prf, Scored,
};

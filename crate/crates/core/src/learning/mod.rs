//! Itô calculus of linear functionals, the OU representation and elastic-net regression on signatures.

mod elastic_net;
mod ito;
mod ou_repr;
mod regression;

pub use elastic_net::{coordinate_descent, fit_elastic_net, kkt_violation, Gram, NetFit, TOLERANCE};
pub use ito::{ito_decompose, ito_residuals, rms, FunctionalDecomposition};
pub use ou_repr::{ou_coefficients, ou_representation, ou_representation_mc, ou_word, OuApproxError};
pub use regression::{
    run_langevin_experiment, run_regression_on_data, langevin_config, HyperGrid, Model, RegressionMetrics, Split,
};

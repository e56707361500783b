//! Seeded simulation of Brownian, Ornstein–Uhlenbeck and Langevin drivers and
//! Monte Carlo experiments on EFM-signatures.

pub mod batch;
mod ergodic;
mod identity;
mod l2bound;
mod moments;
pub mod rng;
mod sim;
mod stationarity;

pub use ergodic::{ergodic_decay_experiment, fit_line, DecayReport};
pub use identity::{exp_moment_identity_check, exp_moment_identity_on_simulated, identity_coefficients, IdentityResidual};
pub use l2bound::{c_lambda, explicit_bound, l2_bound_check, recursive_bound, L2BoundReport};
pub use moments::{mc_signature_moments, Moments};
pub use sim::{
    simulate_bm, simulate_bm_path, simulate_langevin, simulate_langevin_with_driver, simulate_ou, simulate_ou_path,
    BmIncrements, SimConfig,
};
pub use stationarity::{ks_p_value, ks_statistic, stationarity_check, StationarityReport, WordTest};

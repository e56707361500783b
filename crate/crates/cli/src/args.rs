use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug, Serialize)]
#[command(name = "efmsig", version, about = "EFM-signatures: compute, simulate, learn, predict")]
pub struct Cli {
    /// Directory receiving all outputs plus manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; falls back to EFMSIG_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Suppress the human-readable tables on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Signature of a piecewise-linear path given as CSV.
    Sig(SigArgs),
    /// Expected signature of time-augmented Brownian motion.
    Expected(ExpectedArgs),
    /// Simulate a process on a grid and write the path CSV.
    Simulate {
        #[command(subcommand)]
        kind: SimulateKind,
    },
    /// Monte Carlo experiments.
    Lab {
        #[command(subcommand)]
        kind: LabKind,
    },
    /// Elastic-net regression of a signal on signature features of its driver.
    Regress(RegressArgs),
    /// Conditional mean and variance of a linear functional.
    Predict(PredictArgs),
    /// Characteristic function through the Riccati equation.
    Charfunc(CharfuncArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SigArgs {
    /// Path CSV with header t,x1,...,xd.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated rates; the first is the clock rate with --time-augment.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub time_augment: bool,
    /// Also write the signature at every breakpoint (wide CSV, one row per time).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(group(clap::ArgGroup::new("when").required(true).args(["stationary", "horizon"])))]
pub struct ExpectedArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub stationary: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
}

/// Grid and randomness shared by the simulation commands.
#[derive(Args, Debug, Serialize, Clone)]
pub struct SimOpts {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Length of the emulated past before t0.
    #[arg(long, allow_negative_numbers = true)]
    pub burn_in: Option<f64>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum SimulateKind {
    /// Brownian motion started at zero.
    Bm {
        #[command(flatten)]
        sim: SimOpts,
        /// Index of the path within the seed's family.
        #[arg(long, default_value_t = 0)]
        path_index: u64,
    },
    /// Ornstein-Uhlenbeck process, exact recursion.
    Ou {
        #[command(flatten)]
        sim: SimOpts,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// Draw the initial value from the stationary law.
        #[arg(long)]
        stationary_start: bool,
        #[arg(long, default_value_t = 0)]
        path_index: u64,
    },
    /// dY = -mu Y^p dt + dW by Euler-Maruyama; the driver W goes to driver.csv under --out.
    Langevin {
        #[command(flatten)]
        sim: SimOpts,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 5)]
        p: u32,
        #[arg(long, default_value_t = 0)]
        path_index: u64,
    },
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct LabOpts {
    #[command(flatten)]
    pub sim: SimOpts,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum LabKind {
    /// Monte Carlo mean and standard error of the signature against the exact expectation.
    Moments {
        #[command(flatten)]
        lab: LabOpts,
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        horizon: f64,
    },
    /// Coupled gap between burned-in and flat-past signatures.
    Ergodic {
        #[command(flatten)]
        lab: LabOpts,
    },
    /// Kolmogorov-Smirnov comparison of coefficient laws at two times.
    Stationarity {
        #[command(flatten)]
        lab: LabOpts,
        #[arg(long, allow_negative_numbers = true)]
        ta: f64,
        #[arg(long, allow_negative_numbers = true)]
        tb: f64,
    },
    /// Second-moment bound versus its empirical supremum (d = 1).
    L2bound {
        #[command(flatten)]
        lab: LabOpts,
    },
    /// Exponential-moment identity residuals on one simulated path.
    #[command(visible_alias = "exp-identity")]
    Appendixc {
        #[command(flatten)]
        sim: SimOpts,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        lambda: Vec<f64>,
        /// Comma-separated values of k.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        k: Vec<usize>,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct RegressArgs {
    /// Target path CSV; simulated Langevin data is used when absent.
    #[arg(long, requires = "driver")]
    pub signal: Option<PathBuf>,
    /// Driver path CSV on the same grid as the signal.
    #[arg(long, requires = "signal")]
    pub driver: Option<PathBuf>,
    /// Comma-separated models among sig_bm, sig_ou, efm_sig.
    #[arg(long, value_delimiter = ',', default_value = "sig_bm,sig_ou,efm_sig")]
    pub model: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Rate grid: the OU rate for sig_ou, each component for efm_sig.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega_grid: Option<Vec<f64>>,
    /// train,select,test end times.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4", allow_negative_numbers = true)]
    pub split: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 5)]
    pub p: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub burn_in: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct PredictArgs {
    /// Observed Brownian path CSV (t,x1,...,xd); the clock is added.
    #[arg(long)]
    pub input: PathBuf,
    /// Functional in the coefficient CSV format.
    #[arg(long)]
    pub ell: PathBuf,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub order: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: f64,
    /// Skip the variance, which needs twice the degree of the functional.
    #[arg(long)]
    pub mean_only: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CharfuncArgs {
    /// Functional in the coefficient CSV format; complex entries must be real.
    #[arg(long)]
    pub ell: PathBuf,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub order: usize,
    #[arg(long = "T", alias = "horizon", allow_negative_numbers = true)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub dt: f64,
    /// CSV of t, phi_re, phi_im at every step.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

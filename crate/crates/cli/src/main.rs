mod args;
mod commands;
mod output;

use args::{Cli, Command, LabKind, SimulateKind};
use clap::Parser;
use output::Run;
use std::process::ExitCode;

/// Exit code and kind for the first recognizable cause in the chain.
fn classify(e: &anyhow::Error) -> (u8, &'static str) {
    for cause in e.chain() {
        if let Some(le) = cause.downcast_ref::<efmsig::Error>() {
            return match le {
                efmsig::Error::Io(_) => (1, "io"),
                efmsig::Error::Csv(c) if c.is_io_error() => (1, "io"),
                efmsig::Error::BlowUp(_) | efmsig::Error::Unstable(_) => (3, "numerical_blow_up"),
                _ => (2, "invalid_input"),
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return (1, "io");
        }
    }
    (2, "invalid_input")
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Sig(_) => "sig".into(),
        Command::Expected(_) => "expected".into(),
        Command::Simulate { kind } => match kind {
            SimulateKind::Bm { .. } => "simulate bm",
            SimulateKind::Ou { .. } => "simulate ou",
            SimulateKind::Langevin { .. } => "simulate langevin",
        }
        .into(),
        Command::Lab { kind } => match kind {
            LabKind::Moments { .. } => "lab moments",
            LabKind::Ergodic { .. } => "lab ergodic",
            LabKind::Stationarity { .. } => "lab stationarity",
            LabKind::L2bound { .. } => "lab l2bound",
            LabKind::Appendixc { .. } => "lab appendixc",
        }
        .into(),
        Command::Regress(_) => "regress".into(),
        Command::Predict(_) => "predict".into(),
        Command::Charfunc(_) => "charfunc".into(),
    }
}

fn thread_count(flag: Option<usize>) -> anyhow::Result<usize> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("EFMSIG_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| efmsig::Error::InvalidArgument(format!("EFMSIG_THREADS={s:?} is not a count")))?),
            Err(_) => None,
        },
    };
    match n {
        Some(0) => Err(efmsig::Error::InvalidArgument("thread count must be at least 1".into()).into()),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn run(cli: &Cli, argv: &[String]) -> anyhow::Result<()> {
    let threads = thread_count(cli.threads)?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    let mut run = Run::new(cli.out.clone(), cli.quiet)?;
    run.command = command_name(&cli.command);
    log::info!("{} with {threads} threads", run.command);
    match &cli.command {
        Command::Sig(a) => commands::sig(a, &mut run)?,
        Command::Expected(a) => commands::expected(a, &mut run)?,
        Command::Simulate { kind } => commands::simulate(kind, &mut run)?,
        Command::Lab { kind } => commands::lab(kind, &mut run)?,
        Command::Regress(a) => commands::regress(a, &mut run)?,
        Command::Predict(a) => commands::predict_cmd(a, &mut run)?,
        Command::Charfunc(a) => commands::charfunc(a, &mut run)?,
    }
    run.finish(argv, &serde_json::to_value(cli)?, threads)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = classify(&e);
            let msg = format!("{e:#}");
            eprintln!("{}", serde_json::json!({ "error": kind, "exit_code": code, "message": msg }));
            ExitCode::from(code)
        }
    }
}

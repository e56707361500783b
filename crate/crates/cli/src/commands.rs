use crate::args::*;
use crate::output::{json_bytes, render_table, Run};
use anyhow::Result;
use efmsig::efm::{signature_of_path, signature_trajectory, Origin, PiecewisePath};
use efmsig::expectation::{expected_signature_stationary, expected_signature_transient, predict, predict_mean};
use efmsig::lab::{
    exp_moment_identity_on_simulated, ergodic_decay_experiment, l2_bound_check, mc_signature_moments, simulate_bm_path, simulate_langevin_with_driver,
    simulate_ou_path, stationarity_check, SimConfig,
};
use efmsig::learning::{run_langevin_experiment, run_regression_on_data, langevin_config, HyperGrid, Model, Split};
use efmsig::riccati::solve_charfunc;
use efmsig::tensor::{read_coeff_csv, read_rows, write_coeff_csv};
use efmsig::{Error, Rates, Shape, TensorSeq};
use num_complex::Complex64;
use serde::Serialize;

fn invalid(msg: String) -> anyhow::Error {
    Error::InvalidArgument(msg).into()
}

/// Rates with the arity the alphabet requires.
fn rates(lambda: &[f64], width: usize, hint: &str) -> Result<Rates> {
    if lambda.len() != width {
        return Err(invalid(format!("--lambda has {} entries, the alphabet has {width} letters ({hint})", lambda.len())));
    }
    Ok(Rates::new(lambda.to_vec())?)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must be nonnegative and finite, got {v}")))
    }
}

fn order_at_least_one(order: usize) -> Result<()> {
    if order == 0 {
        return Err(invalid("--order must be at least 1".into()));
    }
    Ok(())
}

fn coeff_csv(t: &TensorSeq) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_coeff_csv(t, &mut buf)?;
    Ok(buf)
}

fn num(x: f64) -> String {
    format!("{x:.6e}")
}

fn sim_config(s: &SimOpts, dt: f64, t1: f64, burn_in: f64) -> Result<SimConfig> {
    positive("dt", s.dt.unwrap_or(dt))?;
    nonnegative("burn-in", s.burn_in.unwrap_or(burn_in))?;
    if s.dim == 0 {
        return Err(invalid("--dim must be at least 1".into()));
    }
    Ok(SimConfig::new(s.seed, s.dt.unwrap_or(dt), s.t0, s.t1.unwrap_or(t1), s.dim, s.burn_in.unwrap_or(burn_in))?)
}

#[derive(Serialize)]
struct SigSidecar<'a> {
    lambda: &'a [f64],
    order: usize,
    t_final: f64,
}

pub fn sig(a: &SigArgs, run: &mut Run) -> Result<()> {
    order_at_least_one(a.order)?;
    let bytes = run.read_input(&a.input)?;
    let path = PiecewisePath::read_csv(bytes.as_slice(), a.time_augment)?;
    let hint = if a.time_augment { "clock rate first, then one per path column" } else { "one per path column" };
    let r = rates(&a.lambda, path.width(), hint)?;
    let st = signature_of_path(&r, &path, a.order, Origin::Start)?;
    run.primary("sig.csv", &coeff_csv(&st.sig)?)?;
    run.secondary("sig.json", &json_bytes(&SigSidecar { lambda: r.lambda(), order: a.order, t_final: st.t })?)?;
    if let Some(p) = &a.trajectory {
        let traj = signature_trajectory(&r, &path, a.order)?;
        let shape = st.sig.shape();
        let mut s = String::from("t");
        for i in 0..shape.len() {
            s.push(',');
            s.push_str(&shape.word(i).to_string());
        }
        s.push('\n');
        for (t, sig) in path.times().iter().zip(&traj) {
            s.push_str(&format!("{t:.16e}"));
            for c in sig.coeffs() {
                s.push_str(&format!(",{c:.16e}"));
            }
            s.push('\n');
        }
        run.write_at(p, s.as_bytes())?;
    }
    Ok(())
}

pub fn expected(a: &ExpectedArgs, run: &mut Run) -> Result<()> {
    order_at_least_one(a.order)?;
    if a.dim == 0 {
        return Err(invalid("--dim must be at least 1".into()));
    }
    let r = rates(&a.lambda, a.dim + 1, "clock rate first, then one per Brownian component")?;
    let e = match a.horizon {
        Some(h) => {
            nonnegative("horizon", h)?;
            expected_signature_transient(&r, a.dim, a.order, h)?
        }
        None => expected_signature_stationary(&r, a.dim, a.order)?,
    };
    run.primary("expected.csv", &coeff_csv(&e.value)?)
}

fn path_csv(p: &PiecewisePath) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    p.write_csv(&mut buf)?;
    Ok(buf)
}

pub fn simulate(k: &SimulateKind, run: &mut Run) -> Result<()> {
    match k {
        SimulateKind::Bm { sim, path_index } => {
            let cfg = sim_config(sim, 1e-3, sim.t0 + 1.0, 0.0)?;
            run.seed = Some(cfg.seed);
            run.primary("path.csv", &path_csv(&simulate_bm_path(&cfg, *path_index)?)?)
        }
        SimulateKind::Ou { sim, mu, stationary_start, path_index } => {
            positive("mu", *mu)?;
            let cfg = sim_config(sim, 1e-3, sim.t0 + 1.0, 0.0)?;
            run.seed = Some(cfg.seed);
            run.primary("path.csv", &path_csv(&simulate_ou_path(&cfg, *mu, *stationary_start, *path_index)?)?)
        }
        SimulateKind::Langevin { sim, mu, p, path_index } => {
            positive("mu", *mu)?;
            if p.is_multiple_of(2) {
                return Err(invalid(format!("--p must be odd, got {p}")));
            }
            let cfg = sim_config(sim, 1e-3, sim.t0 + 1.0, 0.0)?;
            run.seed = Some(cfg.seed);
            let (y, w) = simulate_langevin_with_driver(&cfg, *mu, *p, *path_index)?;
            run.primary("path.csv", &path_csv(&y)?)?;
            run.secondary("driver.csv", &path_csv(&w)?)
        }
    }
}

/// Rates for a clocked Brownian alphabet and the experiment window; burn-in defaults to `10 / min λ`.
fn lab_setup(l: &LabOpts, t1_span: f64) -> Result<(Rates, SimConfig)> {
    order_at_least_one(l.order)?;
    if l.paths < 2 {
        return Err(invalid(format!("--paths must be at least 2, got {}", l.paths)));
    }
    let r = rates(&l.lambda, l.sim.dim + 1, "clock rate first, then one per Brownian component")?;
    let cfg = sim_config(&l.sim, 1e-2, l.sim.t0 + t1_span, SimConfig::default_burn_in(&r))?;
    Ok((r, cfg))
}

#[derive(Serialize)]
struct MomentRow {
    word: String,
    mean: f64,
    stderr: f64,
    exact: f64,
    z: f64,
}

#[derive(Serialize)]
struct MomentsReport {
    horizon: f64,
    n_paths: usize,
    max_abs_z: f64,
    words: Vec<MomentRow>,
}

pub fn lab(k: &LabKind, run: &mut Run) -> Result<()> {
    match k {
        LabKind::Moments { lab, horizon } => {
            positive("horizon", *horizon)?;
            let (r, cfg) = lab_setup(lab, *horizon)?;
            run.seed = Some(cfg.seed);
            let m = mc_signature_moments(&cfg, &r, lab.order, lab.paths, *horizon)?;
            let exact = expected_signature_transient(&r, cfg.d, lab.order, *horizon)?.value;
            let shape = m.mean.shape();
            let words: Vec<MomentRow> = (0..shape.len())
                .map(|i| {
                    let (mean, se, ex) = (m.mean.coeffs()[i], m.stderr.coeffs()[i], exact.coeffs()[i]);
                    let z = if se > 0.0 { (mean - ex) / se } else { 0.0 };
                    MomentRow { word: shape.word(i).to_string(), mean, stderr: se, exact: ex, z }
                })
                .collect();
            let max_abs_z = words.iter().map(|w| w.z.abs()).fold(0.0, f64::max);
            let rows: Vec<Vec<String>> =
                words.iter().map(|w| vec![w.word.clone(), num(w.mean), num(w.stderr), num(w.exact), format!("{:.2}", w.z)]).collect();
            run.table(&render_table(&["word", "mc_mean", "stderr", "exact", "z"], &rows))?;
            run.primary("moments.json", &json_bytes(&MomentsReport { horizon: *horizon, n_paths: m.n_paths, max_abs_z, words })?)
        }
        LabKind::Ergodic { lab } => {
            let (r, cfg) = lab_setup(lab, 8.0)?;
            run.seed = Some(cfg.seed);
            let rep = ergodic_decay_experiment(&cfg, &r, lab.order, lab.paths)?;
            let rows = vec![
                vec!["fitted_rate".into(), num(rep.fitted_rate)],
                vec!["expected_rate".into(), num(rep.expected_rate)],
                vec!["fit_window".into(), format!("[{}, {}]", rep.fit_window.0, rep.fit_window.1)],
                vec!["excess_slope".into(), format!("{} ± {}", num(rep.excess_slope), num(rep.excess_slope_se))],
            ];
            run.table(&render_table(&["quantity", "value"], &rows))?;
            run.primary("ergodic.json", &json_bytes(&rep)?)
        }
        LabKind::Stationarity { lab, ta, tb } => {
            let (r, cfg) = lab_setup(lab, ta.max(*tb) - lab.sim.t0)?;
            run.seed = Some(cfg.seed);
            let rep = stationarity_check(&cfg, &r, lab.order, lab.paths, *ta, *tb)?;
            let rows: Vec<Vec<String>> = rep
                .tests
                .iter()
                .map(|t| vec![t.word.clone(), t.stochastic.to_string(), num(t.statistic), num(t.p_value), t.rejected.to_string()])
                .collect();
            run.table(&render_table(&["word", "stochastic", "statistic", "p_value", "rejected"], &rows))?;
            run.primary("stationarity.json", &json_bytes(&rep)?)
        }
        LabKind::L2bound { lab } => {
            let (r, cfg) = lab_setup(lab, 8.0)?;
            run.seed = Some(cfg.seed);
            let rep = l2_bound_check(&cfg, &r, lab.order, lab.paths)?;
            let rows = vec![
                vec!["empirical_sup".into(), num(rep.empirical_sup)],
                vec!["argmax_time".into(), num(rep.argmax_time)],
                vec!["recursive_bound".into(), num(rep.recursive_bound)],
                vec!["explicit_bound".into(), num(rep.bound)],
                vec!["holds".into(), rep.holds.to_string()],
            ];
            run.table(&render_table(&["quantity", "value"], &rows))?;
            run.primary("l2bound.json", &json_bytes(&rep)?)
        }
        LabKind::Appendixc { sim, lambda, k } => {
            let r = rates(lambda, sim.dim + 1, "clock rate first, then one per Brownian component")?;
            if k.contains(&0) {
                return Err(invalid("--k values must be at least 1".into()));
            }
            let cfg = sim_config(sim, 1e-3, sim.t0 + 2.0, 0.0)?;
            run.seed = Some(cfg.seed);
            let res = k.iter().map(|&k| exp_moment_identity_on_simulated(&cfg, &r, k)).collect::<efmsig::Result<Vec<_>>>()?;
            let rows: Vec<Vec<String>> = res.iter().map(|x| vec![x.k.to_string(), num(x.lhs), num(x.rhs), num(x.residual)]).collect();
            run.table(&render_table(&["k", "lhs", "rhs", "residual"], &rows))?;
            run.primary("identity.json", &json_bytes(&res)?)
        }
    }
}

pub fn regress(a: &RegressArgs, run: &mut Run) -> Result<()> {
    order_at_least_one(a.order)?;
    let models = a.model.iter().map(|m| m.parse::<Model>()).collect::<efmsig::Result<Vec<_>>>()?;
    let mut grid = HyperGrid::default();
    if let Some(l) = &a.lambda {
        grid.lambdas = l.clone();
    }
    if let Some(v) = &a.alpha_grid {
        grid.alphas = v.clone();
    }
    if let Some(v) = &a.omega_grid {
        grid.omegas = v.clone();
    }
    for &l in &grid.lambdas {
        positive("lambda", l)?;
    }
    for &x in &grid.alphas {
        nonnegative("alpha-grid", x)?;
    }
    if let Some(w) = grid.omegas.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(invalid(format!("--omega-grid entries must lie in [0, 1], got {w}")));
    }
    if grid.lambdas.is_empty() || grid.alphas.is_empty() || grid.omegas.is_empty() {
        return Err(invalid("hyperparameter grids must be nonempty".into()));
    }
    let split = match a.split[..] {
        [train, select, test] => Split { train, select, test },
        _ => return Err(invalid(format!("--split needs three values train,select,test, got {}", a.split.len()))),
    };
    let data = match (&a.signal, &a.driver) {
        (Some(s), Some(d)) => {
            let sig = PiecewisePath::read_csv(run.read_input(s)?.as_slice(), false)?;
            let drv = PiecewisePath::read_csv(run.read_input(d)?.as_slice(), false)?;
            Some((sig, drv))
        }
        _ => {
            positive("mu", a.mu)?;
            if a.p.is_multiple_of(2) {
                return Err(invalid(format!("--p must be odd, got {}", a.p)));
            }
            None
        }
    };
    let mut metrics = Vec::new();
    for m in models {
        let res = match &data {
            Some((sig, drv)) => run_regression_on_data(sig, drv, m, a.order, &grid, split)?,
            None => {
                let mut cfg = langevin_config(a.seed);
                if let Some(dt) = a.dt {
                    positive("dt", dt)?;
                    cfg.dt = dt;
                }
                if let Some(b) = a.burn_in {
                    nonnegative("burn-in", b)?;
                    cfg.burn_in = b;
                }
                cfg.t1 = split.test;
                run.seed = Some(a.seed);
                run_langevin_experiment(&cfg, m, a.mu, a.p, a.order, &grid, split)?
            }
        };
        run.secondary(&format!("ell_{m}.csv"), &coeff_csv(&res.ell)?)?;
        metrics.push(res);
    }
    let rows: Vec<Vec<String>> = metrics
        .iter()
        .map(|x| {
            let lam = x.lambda.as_ref().map(|l| l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")).unwrap_or("-".into());
            vec![x.model.to_string(), num(x.train_mse), num(x.select_mse), num(x.test_mse), num(x.alpha), x.omega.to_string(), lam]
        })
        .collect();
    run.table(&render_table(&["model", "train_mse", "select_mse", "test_mse", "alpha", "omega", "lambda"], &rows))?;
    run.primary("metrics.json", &json_bytes(&metrics)?)
}

#[derive(Serialize)]
struct PredictOut {
    t: f64,
    horizon: f64,
    mean: f64,
    variance: Option<f64>,
}

pub fn predict_cmd(a: &PredictArgs, run: &mut Run) -> Result<()> {
    order_at_least_one(a.order)?;
    nonnegative("horizon", a.horizon)?;
    let path = PiecewisePath::read_csv(run.read_input(&a.input)?.as_slice(), true)?;
    let r = rates(&a.lambda, path.width(), "clock rate first, then one per path column")?;
    let shape = Shape::new(path.width(), a.order)?;
    let ell: TensorSeq = read_coeff_csv(shape, run.read_input(&a.ell)?.as_slice())?;
    let state = signature_of_path(&r, &path, a.order, Origin::Start)?;
    let out = if a.mean_only {
        PredictOut { t: state.t, horizon: a.horizon, mean: predict_mean(&r, &ell, &state, a.horizon)?, variance: None }
    } else {
        let p = predict(&r, &ell, &state, a.horizon)?;
        PredictOut { t: state.t, horizon: a.horizon, mean: p.mean, variance: Some(p.variance) }
    };
    run.primary("prediction.json", &json_bytes(&out)?)
}

#[derive(Serialize)]
struct CharfuncOut {
    phi_re: f64,
    phi_im: f64,
    #[serde(rename = "T")]
    horizon: f64,
    dt: f64,
    order: usize,
    stationary: bool,
    non_empty_mass: f64,
}

/// Reads a functional whose entries may be written as complex strings; all must be real.
fn real_functional(bytes: &[u8], width: usize) -> Result<TensorSeq> {
    let rows = read_rows::<Complex64, _>(bytes)?;
    let order = rows.iter().map(|(w, _)| w.len()).max().unwrap_or(0).max(1);
    let mut ell = TensorSeq::zeros(Shape::new(width, order)?);
    for (w, v) in rows {
        if v.im != 0.0 {
            return Err(invalid(format!("coefficient of {w} is {v}; the functional must be real")));
        }
        ell.add_to(&w, v.re)?;
    }
    Ok(ell)
}

pub fn charfunc(a: &CharfuncArgs, run: &mut Run) -> Result<()> {
    order_at_least_one(a.order)?;
    nonnegative("T", a.horizon)?;
    positive("dt", a.dt)?;
    let r = Rates::new(a.lambda.clone())?;
    let ell = real_functional(&run.read_input(&a.ell)?, r.width())?;
    let sol = solve_charfunc(&r, &ell, a.horizon, a.dt, a.order)?;
    let mut traj = String::from("t,phi_re,phi_im\n");
    for (k, t) in sol.times.iter().enumerate() {
        let phi = sol.phi_at(k);
        traj.push_str(&format!("{t:.16e},{:.16e},{:.16e}\n", phi.re, phi.im));
    }
    match &a.trajectory {
        Some(p) => run.write_at(p, traj.as_bytes())?,
        None => run.secondary("trajectory.csv", traj.as_bytes())?,
    }
    let out = CharfuncOut {
        phi_re: sol.phi_t.re,
        phi_im: sol.phi_t.im,
        horizon: a.horizon,
        dt: a.dt,
        order: a.order,
        stationary: sol.stationary,
        non_empty_mass: sol.non_empty_mass,
    };
    run.primary("charfunc.json", &json_bytes(&out)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_and_sign_checks() {
        assert!(rates(&[1.0, 2.0], 3, "").is_err());
        assert!(rates(&[1.0, -2.0], 2, "").is_err());
        assert!(rates(&[1.0, 2.0], 2, "").is_ok());
        assert!(positive("dt", 0.0).is_err());
        assert!(nonnegative("h", f64::NAN).is_err());
    }

    #[test]
    fn complex_functional_must_be_real() {
        let ok = real_functional(b"word,value\n1-1-1-1,1\n", 2).unwrap();
        assert_eq!(ok.order(), 4);
        assert!(real_functional(b"word,value\n1,0.5+1j\n", 2).is_err());
    }
}

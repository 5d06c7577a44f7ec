//! The five commands. Each one turns a validated configuration into a
//! payload string; the caller decides whether it goes to stdout or a file.
//!
//! CSV fields use shortest round-trip decimal formatting, `\n` line
//! endings, and `.` as the decimal point regardless of locale.

use ruinlab_core::{
    dpp_consistency, estimate_ruin, estimate_value, merton_fraction, sweep_table, HjbSolution,
    SimGrid, Strategy,
};

use crate::config::{ConfigError, RunConfig};
use crate::Failure;

type CommandResult = Result<String, Failure>;

fn require<'a, T>(section: &str, command: &str, value: &'a Option<T>) -> Result<&'a T, Failure> {
    value.as_ref().ok_or_else(|| {
        Failure::Config(ConfigError(format!(
            "the {command} command requires a [{section}] section"
        )))
    })
}

/// Investment fraction and the closed-form value profile constants at the
/// reference surplus.
pub fn merton(cfg: &RunConfig) -> CommandResult {
    let solution = HjbSolution::new(&cfg.model, &cfg.market, &cfg.utility)?;
    let raw = merton_fraction(&cfg.market, &cfg.utility);
    let f0 = solution.f_profile(0.0)?;
    Ok(format!(
        "theta_star={raw:.6}\ntheta_clamped={:.6}\nR={}\nf0={}\n",
        solution.theta_clamped, solution.rate, f0
    ))
}

/// One-row ruin probability CSV for the configured strategy.
pub fn ruin(cfg: &RunConfig) -> CommandResult {
    let strategy = require("ruin", "ruin", &cfg.ruin_strategy)?;
    let grid = SimGrid::new(cfg.sim.n_steps)?;
    let est = estimate_ruin(
        &cfg.model,
        &cfg.market,
        &cfg.utility,
        strategy,
        &grid,
        cfg.sim.n_paths,
        cfg.sim.master_seed,
    )?;
    let mut out = String::from("x0,strategy,p_hat,std_err,ci95_low,ci95_high,n_paths,n_steps,seed\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{}\n",
        cfg.model.x0,
        strategy.label(),
        est.p_hat,
        est.std_err,
        est.ci95_low,
        est.ci95_high,
        est.n_paths,
        cfg.sim.n_steps,
        cfg.sim.master_seed
    ));
    Ok(out)
}

/// Ruin probability sweep CSV: one row per (distribution, surplus) pair,
/// uninvested and invested columns side by side.
pub fn table(cfg: &RunConfig) -> CommandResult {
    let section = require("table", "table", &cfg.table)?;
    let grid = SimGrid::new(cfg.sim.n_steps)?;
    let strategies = [
        Strategy::no_investment(),
        Strategy::merton_clamped(&cfg.market, &cfg.utility),
    ];
    let cells = sweep_table(
        &cfg.model,
        &cfg.market,
        &cfg.utility,
        &grid,
        &section.distributions,
        &section.x_values,
        &strategies,
        cfg.sim.n_paths,
        cfg.sim.master_seed,
    )?;
    let mut out = String::from("x,dist,psi_no_invest,se_no_invest,psi_invest,se_invest\n");
    for pair in cells.chunks(2) {
        let none = &pair[0];
        let invest = &pair[1];
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            none.x0,
            none.claims.label(),
            none.estimate.p_hat,
            none.estimate.std_err,
            invest.estimate.p_hat,
            invest.estimate.std_err
        ));
    }
    Ok(out)
}

/// Expected accumulated utility CSV over (surplus, strategy) rows; all rows
/// share one stream pool, so rows differing only in x0 are coupled. The
/// optional closed-form column evaluates the reference solution at t = 0.
pub fn value(cfg: &RunConfig) -> CommandResult {
    let section = require("value", "value", &cfg.value)?;
    let grid = SimGrid::new(cfg.sim.n_steps)?;
    let solution = if section.closed_form {
        Some(HjbSolution::new(&cfg.model, &cfg.market, &cfg.utility)?)
    } else {
        None
    };
    let mut out = String::from("x0,strategy,v_hat,std_err");
    if solution.is_some() {
        out.push_str(",closed_form");
    }
    out.push('\n');
    for &x0 in &section.x_values {
        let model = cfg.model.with_x0(x0)?;
        for strategy in &section.strategies {
            let est = estimate_value(
                &model,
                &cfg.market,
                &cfg.utility,
                strategy,
                &grid,
                cfg.sim.n_paths,
                cfg.sim.master_seed,
            )?;
            out.push_str(&format!(
                "{},{},{},{}",
                x0,
                strategy.label(),
                est.v_hat,
                est.std_err
            ));
            if let Some(solution) = &solution {
                out.push_str(&format!(",{}", solution.value(0.0, x0)?));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Restart-consistency report: the gap between the direct value estimate
/// and the best restart composite, with a sign test at three standard
/// errors.
pub fn dpp(cfg: &RunConfig) -> CommandResult {
    let section = require("dpp", "dpp", &cfg.dpp)?;
    let grid = SimGrid::new(cfg.sim.n_steps)?;
    let gap = dpp_consistency(
        &cfg.model,
        &cfg.market,
        &cfg.utility,
        &grid,
        section.h,
        &section.candidates,
        section.n_outer,
        section.n_inner,
        cfg.sim.master_seed,
    )?;
    let verdict = if gap.gap >= -3.0 * gap.std_err {
        "PASS"
    } else {
        "FAIL"
    };
    Ok(format!(
        "G={}\nstd_err={}\nbest_fraction={}\nvalue_direct={}\ncomposite_best={}\n{verdict}\n",
        gap.gap, gap.std_err, gap.best_fraction, gap.value_direct, gap.composite_best
    ))
}

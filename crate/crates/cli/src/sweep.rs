//! Grid evaluation for every sweep quantity.

use rayon::prelude::*;

use qdrepeater::cavity::{full_coeffs, resonant_coeffs, CavityParams, ScatterCoeffs};
use qdrepeater::metrics::distribution_metrics;
use qdrepeater::protocols::{
    distribute_bell, pcd, purify_analytic, purify_round, run_chain, uniform_spins, NodeSpec,
    ParityClass, PurificationState, Scenario, SegmentSpec,
};
use qdrepeater::timebin::NoiseChannel;

use crate::config::{Quantity, SweepConfig};
use crate::output::{fmt_num, Table};
use crate::CliError;

pub const COEFFS_COLUMNS: [&str; 17] = [
    "g", "kappa_s", "gamma", "delta", "R_re", "R_im", "T_re", "T_im", "S_re", "S_im", "N_re",
    "N_im", "abs_R", "abs_T", "abs_S", "abs_N", "P",
];

pub const METRICS_COLUMNS: [&str; 14] = [
    "g", "kappa_s", "gamma", "delta", "t_re", "t_im", "t0_re", "t0_im", "eta_even", "eta_odd",
    "eta", "f_even", "f_odd", "eta_in_adjusted",
];

pub const PURIFY_COLUMNS: [&str; 5] = [
    "mu0",
    "round",
    "mu",
    "success_probability",
    "cumulative_probability",
];

pub const CHAIN_COLUMNS: [&str; 7] = [
    "g",
    "kappa_s",
    "gamma",
    "delta",
    "segments",
    "fidelity",
    "probability",
];

#[derive(Debug, Clone, Copy)]
struct Point {
    g: f64,
    kappa_s: f64,
    gamma: f64,
    delta: f64,
    segments: usize,
}

impl Point {
    fn params(&self) -> CavityParams {
        CavityParams::new(self.g, self.kappa_s)
            .with_gamma(self.gamma)
            .with_detuning(self.delta)
    }

    fn prefix(&self) -> Vec<String> {
        [self.g, self.kappa_s, self.gamma, self.delta]
            .iter()
            .map(|&v| fmt_num(v))
            .collect()
    }
}

/// Grid points in row order: `g` outermost, then `kappa_s`, `gamma`, `delta`
/// and `segments`.
fn points(cfg: &SweepConfig) -> Vec<Point> {
    let mut out = Vec::new();
    for &g in cfg.g.values() {
        for &kappa_s in cfg.kappa_s.values() {
            for &gamma in cfg.gamma.values() {
                for &delta in cfg.delta.values() {
                    for &segments in &cfg.segments {
                        out.push(Point {
                            g,
                            kappa_s,
                            gamma,
                            delta,
                            segments,
                        });
                    }
                }
            }
        }
    }
    out
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Evaluate every grid point (in parallel) and collect rows in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Table, CliError> {
    let (header, rows): (&[&str], Vec<Vec<String>>) = match cfg.quantity {
        Quantity::Coeffs => (&COEFFS_COLUMNS, eval(cfg, coeffs_row)?),
        Quantity::Distribution => (&METRICS_COLUMNS, eval(cfg, |p| metrics_row(cfg, p, 2))?),
        Quantity::Pcd => (&METRICS_COLUMNS, eval(cfg, |p| metrics_row(cfg, p, 1))?),
        Quantity::Chain => (&CHAIN_COLUMNS, eval(cfg, |p| chain_row(cfg, p))?),
        Quantity::Purify => (&PURIFY_COLUMNS, purify_rows(cfg)?),
    };
    let mut table = Table::new(header);
    table.rows = rows;
    Ok(table)
}

fn eval<F>(cfg: &SweepConfig, f: F) -> Result<Vec<Vec<String>>, CliError>
where
    F: Fn(&Point) -> Result<Vec<String>, CliError> + Sync + Send,
{
    points(cfg).par_iter().map(f).collect()
}

fn coeffs_row(p: &Point) -> Result<Vec<String>, CliError> {
    let c = full_coeffs(&p.params()).map_err(runtime)?;
    let mut row = p.prefix();
    for z in [c.reflection, c.transmission, c.leak, c.noise] {
        row.push(fmt_num(z.re));
        row.push(fmt_num(z.im));
    }
    for z in [c.reflection, c.transmission, c.leak, c.noise] {
        row.push(fmt_num(z.norm()));
    }
    row.push(fmt_num(c.total_probability()));
    Ok(row)
}

struct Metrics {
    even: f64,
    odd: f64,
    total: f64,
    f_even: Option<f64>,
    f_odd: Option<f64>,
}

/// Closed forms, or full state evolution when `simulate` is set.
fn metrics(c: &ScatterCoeffs, photons: i32, simulate: bool) -> Result<Metrics, CliError> {
    if !simulate {
        let m = distribution_metrics(c).map_err(runtime)?;
        return Ok(Metrics {
            even: m.eta_d_even,
            odd: m.eta_d_odd,
            total: m.eta_d,
            f_even: Some(m.f_even),
            f_odd: Some(m.f_odd),
        });
    }
    let run = if photons == 2 {
        distribute_bell(&NoiseChannel::IDENTITY, &NoiseChannel::IDENTITY, c, c)
    } else {
        uniform_spins(&["e1", "e2"]).and_then(|s| pcd(&s, "e1", "e2", c))
    }
    .map_err(runtime)?;
    Ok(Metrics {
        even: run.class_probability(ParityClass::Even),
        odd: run.class_probability(ParityClass::Odd),
        total: run.heralded_probability(),
        f_even: run.class_fidelity(ParityClass::Even),
        f_odd: run.class_fidelity(ParityClass::Odd),
    })
}

fn metrics_row(cfg: &SweepConfig, p: &Point, photons: i32) -> Result<Vec<String>, CliError> {
    let c = resonant_coeffs(&p.params(), p.delta).map_err(runtime)?;
    let m = metrics(&c, photons, cfg.simulate)?;
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    let mut row = p.prefix();
    row.extend([c.t.re, c.t.im, c.t0.re, c.t0.im, m.even, m.odd, m.total].map(fmt_num));
    row.push(opt(m.f_even));
    row.push(opt(m.f_odd));
    row.push(opt(cfg.eta_in.map(|e| m.total * e.powi(photons))));
    Ok(row)
}

/// A uniform chain of `p.segments` links between identical nodes.
fn uniform_chain(cfg: &SweepConfig, p: &Point) -> Scenario {
    let name = |i: usize| format!("N{i}");
    let nodes = (0..=p.segments)
        .map(|i| NodeSpec {
            gamma: p.gamma,
            detuning: p.delta,
            ..NodeSpec::practical(&name(i), p.g, p.kappa_s)
        })
        .collect();
    let segments = (0..p.segments)
        .map(|i| SegmentSpec {
            left: name(i),
            right: name(i + 1),
            noise_left: Default::default(),
            noise_right: Default::default(),
        })
        .collect();
    Scenario {
        nodes,
        segments,
        purification_rounds: cfg.rounds,
        input_coupling: cfg.eta_in,
    }
}

fn chain_row(cfg: &SweepConfig, p: &Point) -> Result<Vec<String>, CliError> {
    let report = run_chain(&uniform_chain(cfg, p)).map_err(runtime)?;
    let mut row = p.prefix();
    row.push(p.segments.to_string());
    row.push(fmt_num(report.fidelity));
    row.push(fmt_num(report.probability));
    Ok(row)
}

/// Purification table for each starting μ. With `simulate` every round is
/// run by state evolution with ideal parity checks.
pub fn purification_table(mu0: f64, rounds: usize, simulate: bool) -> Result<Vec<PurificationState>, CliError> {
    if !simulate {
        return purify_analytic(mu0, rounds).map_err(runtime);
    }
    let mut out = Vec::with_capacity(rounds);
    let (mut mu, mut cumulative) = (mu0, 1.0);
    for round in 1..=rounds {
        let (s, _) = purify_round(mu, &ScatterCoeffs::IDEAL).map_err(runtime)?;
        mu = s.mu.clamp(0.0, 1.0);
        cumulative *= s.success_probability;
        out.push(PurificationState {
            round,
            cumulative_probability: cumulative,
            ..s
        });
    }
    Ok(out)
}

fn purify_rows(cfg: &SweepConfig) -> Result<Vec<Vec<String>>, CliError> {
    let tables: Vec<Vec<PurificationState>> = cfg
        .mu
        .values()
        .par_iter()
        .map(|&mu0| purification_table(mu0, cfg.rounds, cfg.simulate))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (&mu0, table) in cfg.mu.values().iter().zip(tables) {
        for s in table {
            rows.push(vec![
                fmt_num(mu0),
                s.round.to_string(),
                fmt_num(s.mu),
                fmt_num(s.success_probability),
                fmt_num(s.cumulative_probability),
            ]);
        }
    }
    Ok(rows)
}

//! Command-line front end: scenario loading, curve generation,
//! classification reports, Monte Carlo checks and figure-style outputs.
//!
//! Exit codes: 2 for domain/validation errors (the message names the
//! violated domain), 3 for blow-up refusals, 1 for everything else.

mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use premia_core::curve::ModelKind;
use premia_core::geometric::{forward_price_geom, risk_premium_geom, sigma_fn};
use premia_core::montecarlo::{density_martingale_check, mc_forward, SimConfig};
use premia_core::riccati::{classify, solve_riccati, CaseTag, Classification};
use premia_core::{arithmetic, Error};

use output::CsvTable;
use scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "premia",
    about = "Two-factor spot model: forwards, risk premia and Monte Carlo checks",
    version
)]
struct Cli {
    /// Scenario JSON; the built-in reference scenario is used if omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Arith,
    Geom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckWhat {
    Density,
    Forward,
}

#[derive(Args)]
struct OutArgs {
    /// CSV output path (overrides the scenario's outputs.csv_path).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG line plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the cumulant function and its derivatives at a tilt.
    Cumulant {
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
    },
    /// Classify the spike-factor Riccati system for the scenario measure.
    Classify,
    /// Solve the Riccati system and emit (t, psi1, psi0) as CSV.
    Riccati {
        #[arg(long)]
        theta2: f64,
        #[arg(long)]
        beta2: f64,
        #[arg(long, default_value_t = 360.0)]
        horizon: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print a single forward price at a time to maturity.
    Forward {
        #[arg(long)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = Model::Arith)]
        model: Model,
    },
    /// Emit the premium curve over the scenario grid as CSV.
    PremiumCurve {
        #[arg(long, value_enum, default_value_t = Model::Arith)]
        model: Model,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the swap price and swap premium over a delivery period.
    Swap {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
    },
    /// Monte Carlo cross-checks; exits nonzero when |z| > 4.
    McCheck {
        #[arg(long, value_enum)]
        what: CheckWhat,
        #[arg(long, value_enum, default_value_t = Model::Arith)]
        model: Model,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        /// Seed; the PREMIA_SEED environment variable takes precedence.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 7.0)]
        maturity: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Regenerate a built-in figure scenario as CSV (list ids with "list").
    ReproduceFig {
        id: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let scenario = match &cli.scenario {
        None => scenario::default_scenario(),
        Some(path) => match load_scenario(path) {
            Ok(s) => s,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
    };
    match run(&cli.command, &scenario) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::UnsupportedModel(_) => ExitCode::from(2),
                Error::BlowUp { .. } | Error::WrongCase { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read scenario {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("scenario parse error: {e}"))
}

fn seed_override(seed: u64) -> u64 {
    match std::env::var("PREMIA_SEED") {
        Ok(v) => v.parse().unwrap_or(seed),
        Err(_) => seed,
    }
}

const RICCATI_TOL: f64 = 1e-11;

fn classification_line(cls: &Classification) -> String {
    format!(
        "{}, u*={:.6}, bound={:.6}",
        cls.case, cls.u_star, cls.beta_bound
    )
}

fn run(cmd: &Command, scenario: &Scenario) -> Result<ExitCode, Error> {
    let model = scenario.model();
    let fp = scenario.factor_params();
    let mc = scenario.measure_change();
    let state = scenario.market_state()?;

    match cmd {
        Command::Cumulant { theta } => {
            let d = model.domains();
            println!("theta_max = {}", d.theta_max);
            println!("D_L   = (-inf, {})", d.d_l_sup);
            println!("D_L^g = (-inf, {})", d.d_l_g_sup);
            for order in 0..=3u8 {
                println!(
                    "kappa^({order})({theta}) = {}",
                    output::fmt(model.cumulant(*theta, order)?)
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Classify => {
            let cls = classify(&model, &fp, &mc)?;
            println!("{}", classification_line(&cls));
            Ok(ExitCode::SUCCESS)
        }

        Command::Riccati { theta2, beta2, horizon, out } => {
            let mut mc = mc;
            mc.theta2 = *theta2;
            mc.beta2 = *beta2;
            let cls = classify(&model, &fp, &mc)?;
            let sol = solve_riccati(&model, &fp, &mc, *horizon, RICCATI_TOL)?;
            let taus = premia_core::curve::linspace(
                0.0,
                sol.horizon(),
                scenario.grid.n_points.max(2),
            );
            let mut rows = Vec::with_capacity(taus.len());
            for &t in &taus {
                let (p1, p0) = sol.eval(t)?;
                rows.push(vec![t, p1, p0]);
            }
            let mut comments = vec![format!("classification: {}", classification_line(&cls))];
            if let Some(ti) = sol.t_infinity {
                comments.push(format!(
                    "t_infinity: {} (psi0 divergence suspected: {})",
                    output::fmt(ti),
                    sol.psi0_divergence_suspected
                ));
            }
            let table = CsvTable {
                header_comments: comments,
                columns: vec!["t", "psi1", "psi0"],
                rows,
            };
            emit(&table, out, scenario, "riccati")?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Forward { tau, model: kind } => {
            let maturity = state.t + tau;
            let value = match kind {
                Model::Arith => arithmetic::forward_price(&model, &fp, &mc, &state, maturity)?,
                Model::Geom => {
                    let sol = solve_riccati(&model, &fp, &mc, tau.max(1e-6), RICCATI_TOL)?;
                    forward_price_geom(&model, &fp, &mc, &state, maturity, &sol)?
                }
            };
            println!("forward({tau}) = {}", output::fmt(value));
            Ok(ExitCode::SUCCESS)
        }

        Command::PremiumCurve { model: kind, out } => {
            let taus = scenario.taus();
            let table = match kind {
                Model::Arith => {
                    let mut rows = Vec::with_capacity(taus.len());
                    for &tau in &taus {
                        let t = state.t + tau;
                        rows.push(vec![
                            tau,
                            arithmetic::risk_premium(&model, &fp, &mc, &state, t)?,
                            arithmetic::forward_price(&model, &fp, &mc, &state, t)?,
                            arithmetic::expected_spot(&model, &fp, &state, t)?,
                        ]);
                    }
                    CsvTable {
                        header_comments: vec![premium_header(scenario, "arith")],
                        columns: vec!["tau_days", "risk_premium", "forward", "expected_spot"],
                        rows,
                    }
                }
                Model::Geom => {
                    let cls = classify(&model, &fp, &mc)?;
                    if cls.case == CaseTag::Case3 {
                        eprintln!("refused: {}", classification_line(&cls));
                        return Err(Error::BlowUp {
                            t_infinity: premia_core::riccati::blow_up_time(&model, &fp, &mc)?,
                            horizon: *taus.last().unwrap(),
                        });
                    }
                    let horizon = taus.last().copied().unwrap_or(1.0).max(1e-6);
                    let sol = solve_riccati(&model, &fp, &mc, horizon, RICCATI_TOL)?;
                    let sigma_applicable =
                        fp.mu_x == 0.0 && fp.mu_y == 0.0 && fp.alpha_x < fp.alpha_y;
                    let mut rows = Vec::with_capacity(taus.len());
                    for &tau in &taus {
                        let t = state.t + tau;
                        let sigma = if sigma_applicable {
                            sigma_fn(&model, &fp, &mc, &state, tau, &sol)?.sigma_total
                        } else {
                            f64::NAN
                        };
                        rows.push(vec![
                            tau,
                            risk_premium_geom(&model, &fp, &mc, &state, t, &sol)?,
                            sigma,
                            forward_price_geom(&model, &fp, &mc, &state, t, &sol)?,
                        ]);
                    }
                    CsvTable {
                        header_comments: vec![
                            premium_header(scenario, "geom"),
                            format!("classification: {}", classification_line(&cls)),
                        ],
                        columns: vec!["tau_days", "risk_premium", "sigma", "forward"],
                        rows,
                    }
                }
            };
            emit(&table, out, scenario, "premium-curve")?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Swap { t1, t2 } => {
            let price = arithmetic::swap_price(&model, &fp, &mc, &state, *t1, *t2)?;
            let premium = arithmetic::swap_risk_premium(&model, &fp, &mc, &state, *t1, *t2)?;
            println!("swap_price [{t1}, {t2}] = {}", output::fmt(price));
            println!("swap_risk_premium [{t1}, {t2}] = {}", output::fmt(premium));
            Ok(ExitCode::SUCCESS)
        }

        Command::McCheck { what, model: kind, paths, seed, maturity, dt } => {
            let seed = seed_override(*seed);
            let cfg = SimConfig::new(*paths, *dt, seed, *maturity)?;
            let mut worst_z = 0.0f64;
            match what {
                CheckWhat::Density => {
                    let check = density_martingale_check(&model, &fp, &mc, &cfg)?;
                    for (name, est) in [("G", check.mean_g), ("H", check.mean_h)] {
                        let z = est.z_score(1.0);
                        worst_z = worst_z.max(z.abs());
                        println!(
                            "density_{name}: mean={} se={} z={z:.3} target=1",
                            output::fmt(est.mean),
                            output::fmt(est.std_error)
                        );
                    }
                }
                CheckWhat::Forward => {
                    let maturity_abs = state.t + maturity;
                    let (target, est) = match kind {
                        Model::Arith => (
                            arithmetic::forward_price(&model, &fp, &mc, &state, maturity_abs)?,
                            mc_forward(ModelKind::Arithmetic, &model, &fp, &mc, &cfg, *maturity)?,
                        ),
                        Model::Geom => {
                            let sol = solve_riccati(&model, &fp, &mc, *maturity, RICCATI_TOL)?;
                            (
                                forward_price_geom(&model, &fp, &mc, &state, maturity_abs, &sol)?,
                                mc_forward(ModelKind::Geometric, &model, &fp, &mc, &cfg, *maturity)?,
                            )
                        }
                    };
                    let z = est.z_score(target);
                    worst_z = z.abs();
                    println!(
                        "forward: mean={} se={} z={z:.3} target={}",
                        output::fmt(est.mean),
                        output::fmt(est.std_error),
                        output::fmt(target)
                    );
                }
            }
            if worst_z > 4.0 {
                eprintln!("mc-check failed: |z| = {worst_z:.3} > 4");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::ReproduceFig { id, out } => {
            if id == "list" {
                for f in scenario::FIGURES {
                    println!(
                        "{:10} {} theta=({}, {}) beta=({}, {}) x={} y={}",
                        f.id,
                        if f.geometric { "geom " } else { "arith" },
                        f.theta[0], f.theta[1], f.beta[0], f.beta[1], f.x, f.y
                    );
                }
                return Ok(ExitCode::SUCCESS);
            }
            let fig = scenario::find_figure(id).ok_or_else(|| {
                Error::Domain(format!("unknown figure id '{id}' (try 'list')"))
            })?;
            let fig_scenario = scenario::figure_scenario(fig);
            let kind = if fig.geometric { Model::Geom } else { Model::Arith };
            let mut out = OutArgs { out: out.out.clone(), svg: out.svg.clone() };
            if out.out.is_none() {
                out.out = Some(PathBuf::from(format!("fig_{id}.csv")));
            }
            run(&Command::PremiumCurve { model: kind, out }, &fig_scenario)
        }
    }
}

fn premium_header(scenario: &Scenario, kind: &str) -> String {
    let m = &scenario.measure;
    format!(
        "premium-curve model={kind} theta=({}, {}) beta=({}, {}) state=(t={}, x={}, y={})",
        m.theta[0], m.theta[1], m.beta[0], m.beta[1],
        scenario.state.t, scenario.state.x, scenario.state.y
    )
}

/// Write the CSV (path from flags, falling back to the scenario), plus
/// the optional SVG of the second column against the first.
fn emit(table: &CsvTable, out: &OutArgs, scenario: &Scenario, command: &str) -> Result<(), Error> {
    let csv_path = out
        .out
        .clone()
        .or_else(|| scenario.outputs.csv_path.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("premia_{command}.csv")));
    table
        .write(&csv_path)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", csv_path.display())))?;
    println!("wrote {}", csv_path.display());
    let svg_path = out
        .svg
        .clone()
        .or_else(|| scenario.outputs.svg_path.clone().map(PathBuf::from));
    if let Some(svg_path) = svg_path {
        let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
        let svg = output::render_svg(command, &xs, &ys);
        std::fs::write(&svg_path, svg)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", svg_path.display())))?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

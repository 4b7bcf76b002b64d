//! Command-line front end.
//!
//! Verbs: `solve`, `lcl`, `sweep`, `opf`, `sensitivity`, `transport`,
//! `verify`. Reports print values to 9 significant digits; CSV output keeps
//! full double precision. Exit codes: 0 success, 1 violated invariant or
//! inconsistent input network, 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};

use crate::braess::{
    lcl, sweep_cross_link, transport_equilibrium, write_sweep_csv, BraessCircuitParams, RouteFlows,
    TransportNetwork,
};
use crate::circuit::{Circuit, ElementKind, LinkSpec};
use crate::dcopf::{sensitivity_matrix, unconstrained_opf, ThreeBusNetwork};
use crate::error::Error;
use crate::solver::{max_kcl_residual, reduce_steady_state, solve_dc};
use crate::verify::{run_link_loss_suite, run_opf_invariance_suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "linkloss",
    version,
    about = "DC circuit solves, link-addition loss ratios, and three-bus DC optimal power flow"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a circuit file and print voltages, currents and losses.
    Solve {
        /// Circuit JSON file.
        input: PathBuf,
    },
    /// Add a link to a circuit and report the loss ratio.
    #[command(group(ArgGroup::new("link").required(true).args(["resistor", "source"])))]
    Lcl {
        /// Circuit JSON file.
        input: PathBuf,
        /// Endpoints of the new link.
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        add: Vec<usize>,
        /// Add a resistor of this many ohms.
        #[arg(long)]
        resistor: Option<f64>,
        /// Add a voltage source of this many volts (oriented A to B).
        #[arg(long)]
        source: Option<f64>,
    },
    /// Sweep the cross-link resistance of the two-source diamond and emit CSV.
    Sweep {
        #[arg(long)]
        e1: f64,
        #[arg(long)]
        e2: f64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        /// Grid as lo:hi:npoints, log-spaced unless --linear.
        #[arg(long)]
        grid: String,
        /// Space the grid linearly instead of logarithmically.
        #[arg(long)]
        linear: bool,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the three-bus optimal power flow for a network file.
    Opf {
        /// Network JSON file.
        input: PathBuf,
    },
    /// Print the injection-to-flow sensitivity of a network file.
    Sensitivity {
        /// Network JSON file.
        input: PathBuf,
        /// Also tabulate P23 against these beta1 values (comma separated).
        #[arg(long, value_delimiter = ',')]
        beta1_grid: Option<Vec<f64>>,
    },
    /// Play the diamond road-network example with and without its shortcut.
    Transport {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        travelers: u32,
        #[arg(long, default_value_t = 0.0)]
        cross_cost: f64,
    },
    /// Run the randomized verification suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

/// Format to 9 significant digits, plain notation near unity.
fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&exp) {
        format!("{x:.8e}")
    } else {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Format(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Dispatch one command, streaming human-readable output to `out`.
/// Errors and failure summaries go to stderr; the return value is the
/// process exit code.
pub fn run(command: Command, out: &mut dyn Write) -> i32 {
    match run_inner(command, out) {
        Ok(code) => code,
        Err(RunError::Domain(e)) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(RunError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

enum RunError {
    Domain(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Domain(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn run_inner(command: Command, out: &mut dyn Write) -> Result<i32, RunError> {
    match command {
        Command::Solve { input } => {
            let text = read_file(&input).map_err(RunError::Usage)?;
            let circuit = Circuit::from_json_str(&text)?;
            let rc = reduce_steady_state(&circuit)?;
            let state = solve_dc(&rc)?;

            writeln!(out, "nodes: {}", circuit.node_count())?;
            writeln!(out, "node voltages (V):")?;
            for (i, v) in state.node_voltages.iter().enumerate() {
                writeln!(out, "  {i}: {}", sig9(*v))?;
            }
            writeln!(out, "branch currents (A):")?;
            for (i, e) in circuit.elements().iter().enumerate() {
                writeln!(
                    out,
                    "  [{i}] {}: {}",
                    e.describe(),
                    sig9(state.branch_currents[i])
                )?;
            }
            writeln!(out, "branch losses (W):")?;
            for (i, e) in circuit.elements().iter().enumerate() {
                if e.kind == ElementKind::Resistor {
                    writeln!(
                        out,
                        "  [{i}] {}: {}",
                        e.describe(),
                        sig9(state.branch_losses[i])
                    )?;
                }
            }
            writeln!(out, "total loss: {} W", sig9(state.total_loss))?;
            writeln!(
                out,
                "  fixed by sources: {} W, across components: {} W",
                sig9(state.intra_component_loss),
                sig9(state.inter_component_loss)
            )?;
            writeln!(
                out,
                "max relative KCL residual: {:.2e}",
                max_kcl_residual(&rc, &state)
            )?;
            Ok(EXIT_OK)
        }

        Command::Lcl {
            input,
            add,
            resistor,
            source,
        } => {
            let text = read_file(&input).map_err(RunError::Usage)?;
            let circuit = Circuit::from_json_str(&text)?;
            let (a, b) = (add[0], add[1]);
            let link = match (resistor, source) {
                (Some(ohms), None) => LinkSpec::resistor(a, b, ohms),
                (None, Some(volts)) => LinkSpec::voltage_source(a, b, volts),
                _ => unreachable!("clap group enforces exactly one"),
            };
            let report = lcl(&circuit, &link)?;

            writeln!(
                out,
                "link: {} between nodes {a} and {b}",
                link.element().describe()
            )?;
            writeln!(out, "loss before: {} W", sig9(report.loss_before))?;
            writeln!(
                out,
                "loss after:  {} W (new link dissipates {} W)",
                sig9(report.loss_after),
                sig9(report.new_link_loss)
            )?;
            writeln!(out, "LCL (total): {}", sig9(report.lcl))?;
            writeln!(
                out,
                "LCL (pre-existing resistors only): {}",
                sig9(report.lcl_original_only)
            )?;
            writeln!(
                out,
                "endpoints in one source component: {}",
                report.same_source_component
            )?;
            writeln!(out, "per-branch loss change (W):")?;
            for (i, delta) in report.per_branch_delta.iter().enumerate() {
                if circuit.elements()[i].kind == ElementKind::Resistor {
                    writeln!(
                        out,
                        "  [{i}] {}: {}",
                        circuit.elements()[i].describe(),
                        sig9(*delta)
                    )?;
                }
            }
            Ok(EXIT_OK)
        }

        Command::Sweep {
            e1,
            e2,
            r1,
            r2,
            grid,
            linear,
            out: out_path,
        } => {
            let grid = parse_grid(&grid, linear).map_err(RunError::Usage)?;
            let params = BraessCircuitParams::new(e1, e2, r1, r2, None)?;
            let rows = sweep_cross_link(&params, &grid)?;
            match out_path {
                Some(path) => {
                    let mut file = std::fs::File::create(&path)?;
                    write_sweep_csv(&rows, &mut file)?;
                    writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
                }
                None => write_sweep_csv(&rows, out)?,
            }
            Ok(EXIT_OK)
        }

        Command::Opf { input } => {
            let text = read_file(&input).map_err(RunError::Usage)?;
            let net = ThreeBusNetwork::from_json_str(&text)?;
            let sol = unconstrained_opf(&net)?;

            writeln!(out, "injections (pu):")?;
            writeln!(out, "  P1 = {}", sig9(sol.p1))?;
            writeln!(out, "  P2 = {}", sig9(sol.p2))?;
            writeln!(
                out,
                "load (pu): Pd = {} (inelastic {} + elastic {})",
                sig9(sol.pd),
                sig9(net.pc),
                sig9(sol.pe)
            )?;
            writeln!(
                out,
                "phase angles (rad): theta2 = {}, theta3 = {}",
                sig9(sol.theta2),
                sig9(sol.theta3)
            )?;
            writeln!(out, "line flows (pu):")?;
            for (name, flow, status) in [
                ("P12", sol.flows[0], sol.congestion.lines[0]),
                ("P13", sol.flows[1], sol.congestion.lines[1]),
                ("P23", sol.flows[2], sol.congestion.lines[2]),
            ] {
                writeln!(out, "  {name} = {} [{status}]", sig9(flow))?;
            }
            writeln!(
                out,
                "injection limits: P1 [{}], P2 [{}]",
                sol.congestion.injections[0], sol.congestion.injections[1]
            )?;
            writeln!(out, "objective: {}", sig9(sol.objective))?;
            if !sol.congestion.elastic_load_feasible {
                writeln!(
                    out,
                    "warning: elastic load is negative (Pe = {})",
                    sig9(sol.pe)
                )?;
            }
            if sol.congestion.any_violated() {
                writeln!(out, "unconstrained optimum violates at least one limit")?;
                return Ok(EXIT_FAILURE);
            }
            Ok(EXIT_OK)
        }

        Command::Sensitivity { input, beta1_grid } => {
            let text = read_file(&input).map_err(RunError::Usage)?;
            let net = ThreeBusNetwork::from_json_str(&text)?;
            let m = sensitivity_matrix(&net)?;

            writeln!(out, "flow sensitivity to injections (rows P12, P13, P23):")?;
            for r in 0..3 {
                writeln!(out, "  [{} {}]", sig9(m[(r, 0)]), sig9(m[(r, 1)]))?;
            }
            // Deviation from the weak-1-3-line limit pattern.
            let pattern = [[1.0, 0.0], [0.0, 0.0], [1.0, 1.0]];
            let mut max_dev = 0.0f64;
            for r in 0..3 {
                for c in 0..2 {
                    max_dev = max_dev.max((m[(r, c)] - pattern[r][c]).abs());
                }
            }
            writeln!(
                out,
                "max deviation from [[1,0],[0,0],[1,1]]: {}",
                sig9(max_dev)
            )?;
            if let Some(grid) = beta1_grid {
                let fit = crate::dcopf::p23_cost_sensitivity(&net, &grid)?;
                writeln!(out, "P23 against beta1:")?;
                for (beta1, p23) in &fit.rows {
                    writeln!(out, "  beta1 = {}: P23 = {}", sig9(*beta1), sig9(*p23))?;
                }
                writeln!(
                    out,
                    "fit P23 = C/beta1 + c0: C = {} (alpha/2 = {}), c0 = {}",
                    sig9(fit.fitted_c),
                    sig9(net.alpha / 2.0),
                    sig9(fit.fitted_intercept)
                )?;
            }
            Ok(EXIT_OK)
        }

        Command::Transport {
            alpha,
            beta,
            travelers,
            cross_cost,
        } => {
            let net = TransportNetwork {
                alpha,
                beta,
                cross_cost,
                travelers,
            };
            for with_link in [false, true] {
                let eq = transport_equilibrium(&net, with_link);
                writeln!(
                    out,
                    "{}",
                    if with_link {
                        "with cross link:"
                    } else {
                        "without cross link:"
                    }
                )?;
                if with_link {
                    writeln!(
                        out,
                        "  flows: left={} right={} cross={}",
                        eq.flows.left, eq.flows.right, eq.flows.cross
                    )?;
                    writeln!(
                        out,
                        "  route costs: left={} right={} cross={}",
                        sig9(eq.costs.left),
                        sig9(eq.costs.right),
                        sig9(eq.costs.cross)
                    )?;
                } else {
                    writeln!(
                        out,
                        "  flows: left={} right={}",
                        eq.flows.left, eq.flows.right
                    )?;
                    writeln!(
                        out,
                        "  route costs: left={} right={}",
                        sig9(eq.costs.left),
                        sig9(eq.costs.right)
                    )?;
                }
                writeln!(out, "  per-traveler cost: {}", sig9(eq.per_traveler_cost))?;
                writeln!(out, "  unilaterally stable: {}", eq.is_nash)?;
                writeln!(
                    out,
                    "  social optimum: left={} right={} cross={} (total {})",
                    eq.social_optimum.left,
                    eq.social_optimum.right,
                    eq.social_optimum.cross,
                    sig9(eq.social_optimum_total_cost)
                )?;
            }
            let forced = RouteFlows {
                left: 0,
                right: 0,
                cross: travelers.div_ceil(2),
            };
            let c = crate::braess::route_costs(&net, forced);
            writeln!(
                out,
                "cross route alone with {} travelers would cost {}",
                forced.cross,
                sig9(c.cross)
            )?;
            Ok(EXIT_OK)
        }

        Command::Verify { seed, cases } => {
            let link_report = run_link_loss_suite(seed, cases)?;
            writeln!(out, "link-loss suite: seed={seed} cases={cases}")?;
            writeln!(
                out,
                "  LCL>=1 in {}/{} cases (min {})",
                link_report.lcl_ok,
                link_report.cases,
                sig9(link_report.min_lcl)
            )?;
            writeln!(
                out,
                "  pre-existing loss nondecreasing in {}/{} cases (min ratio {})",
                link_report.original_nondecreasing_ok,
                link_report.cases,
                sig9(link_report.min_original_ratio)
            )?;
            writeln!(
                out,
                "  in-component additions left the network unchanged in {}/{} cases",
                link_report.same_component_ok, link_report.same_component_cases
            )?;

            let opf_trials = cases.clamp(10, 50);
            let opf_report = run_opf_invariance_suite(seed, opf_trials)?;
            writeln!(out, "opf invariance suite: seed={seed} trials={opf_trials}")?;
            writeln!(
                out,
                "  objective spread {:.2e} over {}/{} uncongested trials (tolerance 1e-9)",
                opf_report.max_objective_spread, opf_report.uncongested, opf_report.trials
            )?;
            writeln!(
                out,
                "  closed-form vs minimised injections: max |delta| = {:.2e} (tolerance 1e-6)",
                opf_report.max_injection_error
            )?;

            if link_report.passed() && opf_report.passed() {
                writeln!(out, "PASS")?;
                Ok(EXIT_OK)
            } else {
                for f in link_report.failures.iter().chain(&opf_report.failures) {
                    eprintln!("FAIL: {f}");
                }
                writeln!(out, "FAIL")?;
                Ok(EXIT_FAILURE)
            }
        }
    }
}

/// Parse `lo:hi:npoints` into a grid, log-spaced unless `linear`.
fn parse_grid(spec: &str, linear: bool) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be lo:hi:npoints, got {spec:?}"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid start {:?}", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid end {:?}", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid size {:?}", parts[2]))?;
    if n == 0 {
        return Err("grid needs at least one point".into());
    }
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(format!(
            "grid bounds must satisfy 0 < lo <= hi, got {lo}..{hi}"
        ));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let points = if linear {
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|k| lo + step * k as f64).collect()
    } else {
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        (0..n).map(|k| lo * (ratio * k as f64).exp()).collect()
    };
    Ok(points)
}

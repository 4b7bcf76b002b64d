//! DC power flow and unconstrained optimal power flow on a three-bus
//! network: generators at buses 1 and 2, load at bus 3.
//!
//! Line flow is phase-angle difference over reactance, `P_ij = (θi − θj)/x_ij`,
//! and line conductances are stored signed as `b_ij = −1/x_ij` so the matrix
//! relations below hold verbatim. With θ1 = 0 the injections obey
//! `(P1, P2) = Br · (θ2, θ3)` and the line flows `(P12, P13, P23) = H · (θ2, θ3)`.
//!
//! Generation costs are quadratic, `Cj(Pj) = βj·Pj²`, and the price-elastic
//! part of the load is valued linearly, `Cw(Pe) = α·Pe`. Minimising
//! `C1 + C2 − Cw` without active limits gives `Pj = α/(2βj)` — independent of
//! the line parameters — while the resulting line loading is very much not:
//! [`sensitivity_matrix`] exposes `H·Br⁻¹`, which for a weak 1–3 line pushes
//! essentially all of generator 1's output through bus 2.

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector2};
use serde::Deserialize;

use crate::error::{Error, Result};

/// Tolerance for deciding that a constraint is exactly binding.
const BINDING_TOL: f64 = 1e-9;

/// Three-bus network data. A missing reactance means the line is not built;
/// at least two of the three lines must exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBusNetwork {
    pub x12: Option<f64>,
    pub x13: Option<f64>,
    pub x23: Option<f64>,
    /// Marginal value of the elastic load.
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Inelastic load at bus 3.
    pub pc: f64,
    /// Injection limits for buses 1 and 2.
    pub pmax: [f64; 2],
    /// Flow limits for lines 1-2, 1-3, 2-3.
    pub fmax: [f64; 3],
}

impl ThreeBusNetwork {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x12: Option<f64>,
        x13: Option<f64>,
        x23: Option<f64>,
        alpha: f64,
        beta1: f64,
        beta2: f64,
        pc: f64,
        pmax: [f64; 2],
        fmax: [f64; 3],
    ) -> Result<Self> {
        for (name, x) in [("x12", x12), ("x13", x13), ("x23", x23)] {
            if let Some(x) = x {
                if !(x.is_finite() && x > 0.0) {
                    return Err(Error::InvalidParameter { name, value: x });
                }
            }
        }
        for (name, v) in [("alpha", alpha), ("beta1", beta1), ("beta2", beta2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { name, value: v });
            }
        }
        if !(pc.is_finite() && pc >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "Pc",
                value: pc,
            });
        }
        for v in pmax.iter().chain(fmax.iter()) {
            if v.is_nan() || *v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "limit",
                    value: *v,
                });
            }
        }
        Ok(ThreeBusNetwork {
            x12,
            x13,
            x23,
            alpha,
            beta1,
            beta2,
            pc,
            pmax,
            fmax,
        })
    }

    /// Same network with different reactances (costs and limits kept).
    pub fn with_reactances(
        &self,
        x12: Option<f64>,
        x13: Option<f64>,
        x23: Option<f64>,
    ) -> Result<Self> {
        ThreeBusNetwork::new(
            x12, x13, x23, self.alpha, self.beta1, self.beta2, self.pc, self.pmax, self.fmax,
        )
    }

    /// Parse the JSON network format. Limits accept a number or the string
    /// `"inf"`; a `null` reactance means the line is absent.
    pub fn from_json_str(s: &str) -> Result<ThreeBusNetwork> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Limit {
            Number(f64),
            Word(String),
        }
        impl Limit {
            fn value(&self) -> Result<f64> {
                match self {
                    Limit::Number(v) => Ok(*v),
                    Limit::Word(w) if w == "inf" => Ok(f64::INFINITY),
                    Limit::Word(w) => Err(Error::Format(format!("bad limit value {w:?}"))),
                }
            }
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct NetworkFile {
            x12: Option<f64>,
            x13: Option<f64>,
            x23: Option<f64>,
            alpha: f64,
            beta1: f64,
            beta2: f64,
            #[serde(rename = "Pc")]
            pc: f64,
            #[serde(rename = "Pmax")]
            pmax: [Limit; 2],
            #[serde(rename = "Fmax")]
            fmax: [Limit; 3],
        }
        let f: NetworkFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        ThreeBusNetwork::new(
            f.x12,
            f.x13,
            f.x23,
            f.alpha,
            f.beta1,
            f.beta2,
            f.pc,
            [f.pmax[0].value()?, f.pmax[1].value()?],
            [f.fmax[0].value()?, f.fmax[1].value()?, f.fmax[2].value()?],
        )
    }
}

/// Conductance view of the network: signed `b_ij`, the full nodal matrix `B`
/// (rows and columns sum to zero), the reduced matrix `Br` with θ1 = 0, the
/// phase-to-flow matrix `H`, and the pair-product scalar `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceData {
    pub b12: f64,
    pub b13: f64,
    pub b23: f64,
    pub b: Matrix3<f64>,
    pub br: Matrix2<f64>,
    pub h: Matrix3x2<f64>,
    pub d: f64,
}

/// Assemble the conductance matrices. Fails if fewer than two lines exist
/// (some bus would be disconnected).
pub fn conductance_matrices(net: &ThreeBusNetwork) -> Result<ConductanceData> {
    let present = [net.x12, net.x13, net.x23];
    if present.iter().filter(|x| x.is_some()).count() < 2 {
        // With at most one line, at least one bus has no connection.
        let incident = [
            [net.x12, net.x13], // bus 1
            [net.x12, net.x23], // bus 2
            [net.x13, net.x23], // bus 3
        ];
        let bus = incident
            .iter()
            .position(|lines| lines.iter().all(|x| x.is_none()))
            .map_or(1, |i| i + 1);
        return Err(Error::DisconnectedBus { bus });
    }
    let b_of = |x: Option<f64>| x.map_or(0.0, |x| -1.0 / x);
    let (b12, b13, b23) = (b_of(net.x12), b_of(net.x13), b_of(net.x23));

    #[rustfmt::skip]
    let b = Matrix3::new(
        -b12 - b13,  b12,         b13,
         b12,       -b12 - b23,   b23,
         b13,        b23,        -b13 - b23,
    );
    #[rustfmt::skip]
    let br = Matrix2::new(
         b12,        b13,
        -b12 - b23,  b23,
    );
    #[rustfmt::skip]
    let h = Matrix3x2::new(
         b12,  0.0,
         0.0,  b13,
        -b23,  b23,
    );
    let d = b12 * b13 + b23 * b13 + b12 * b23;

    Ok(ConductanceData {
        b12,
        b13,
        b23,
        b,
        br,
        h,
        d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintStatus {
    Slack,
    Binding,
    Violated,
}

impl std::fmt::Display for ConstraintStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConstraintStatus::Slack => "slack",
            ConstraintStatus::Binding => "binding",
            ConstraintStatus::Violated => "violated",
        };
        f.write_str(s)
    }
}

/// Per-constraint status of an OPF solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongestionReport {
    /// Injections P1, P2 against [0, Pmax].
    pub injections: [ConstraintStatus; 2],
    /// |P12|, |P13|, |P23| against the line limits.
    pub lines: [ConstraintStatus; 3],
    /// False when the elastic load came out negative (the marginal load
    /// value is out of balance with the generation costs).
    pub elastic_load_feasible: bool,
}

impl CongestionReport {
    /// True when every constraint is strictly interior.
    pub fn uncongested(&self) -> bool {
        self.injections
            .iter()
            .chain(self.lines.iter())
            .all(|s| *s == ConstraintStatus::Slack)
    }

    pub fn any_violated(&self) -> bool {
        self.injections
            .iter()
            .chain(self.lines.iter())
            .any(|s| *s == ConstraintStatus::Violated)
    }
}

/// Solution of the unconstrained OPF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpfSolution {
    pub p1: f64,
    pub p2: f64,
    /// Elastic load component.
    pub pe: f64,
    /// Total load Pc + Pe (= P1 + P2 by power balance).
    pub pd: f64,
    pub theta2: f64,
    pub theta3: f64,
    /// Flows on lines 1-2, 1-3, 2-3.
    pub flows: [f64; 3],
    /// C1(P1) + C2(P2) − Cw(Pe).
    pub objective: f64,
    pub congestion: CongestionReport,
}

/// Solve the unconstrained optimum: `Pj = α/(2βj)`, angles from `Br⁻¹`,
/// flows from `H`, and constraint statuses evaluated after the fact.
pub fn unconstrained_opf(net: &ThreeBusNetwork) -> Result<OpfSolution> {
    let cd = conductance_matrices(net)?;
    let p1 = net.alpha / (2.0 * net.beta1);
    let p2 = net.alpha / (2.0 * net.beta2);
    let pe = p1 + p2 - net.pc;
    let pd = net.pc + pe;

    let inv = cd
        .br
        .try_inverse()
        .ok_or(Error::SingularNetwork { d: cd.d })?;
    let theta = inv * Vector2::new(p1, p2);
    let flows_v = cd.h * theta;

    let objective = net.beta1 * p1 * p1 + net.beta2 * p2 * p2 - net.alpha * pe;

    let mut solution = OpfSolution {
        p1,
        p2,
        pe,
        pd,
        theta2: theta[0],
        theta3: theta[1],
        flows: [flows_v[0], flows_v[1], flows_v[2]],
        objective,
        congestion: CongestionReport {
            injections: [ConstraintStatus::Slack; 2],
            lines: [ConstraintStatus::Slack; 3],
            elastic_load_feasible: true,
        },
    };
    solution.congestion = check_congestion(&solution, net);
    Ok(solution)
}

/// Line flows straight from the closed form:
///
/// ```text
/// P12 = (α/2β1)·b12·b23/D − (α/2β2)·b12·b13/D
/// P13 = (α/2β1)·(b12+b23)·b13/D + (α/2β2)·b12·b13/D
/// P23 = (α/2β1)·b12·b23/D + (α/2β2)·(b12+b13)·b23/D
/// ```
///
/// Must match the `H·Br⁻¹` route of [`unconstrained_opf`] to rounding.
pub fn line_flows_closed_form(net: &ThreeBusNetwork) -> Result<[f64; 3]> {
    let cd = conductance_matrices(net)?;
    if cd.d == 0.0 {
        return Err(Error::SingularNetwork { d: cd.d });
    }
    let g1 = net.alpha / (2.0 * net.beta1);
    let g2 = net.alpha / (2.0 * net.beta2);
    let (b12, b13, b23, d) = (cd.b12, cd.b13, cd.b23, cd.d);
    Ok([
        g1 * b12 * b23 / d - g2 * b12 * b13 / d,
        g1 * (b12 + b23) * b13 / d + g2 * b12 * b13 / d,
        g1 * b12 * b23 / d + g2 * (b12 + b13) * b23 / d,
    ])
}

/// Classify every constraint of a solution: injections against [0, Pmax],
/// line magnitudes against Fmax.
///
/// Limits apply to |P_ij|: flow sign only encodes the arbitrary line
/// orientation, so a magnitude bound is the physically meaningful check.
pub fn check_congestion(sol: &OpfSolution, net: &ThreeBusNetwork) -> CongestionReport {
    let near = |x: f64, limit: f64| (x - limit).abs() <= BINDING_TOL * (1.0 + limit.abs());
    let classify_range = |p: f64, hi: f64| {
        if near(p, 0.0) || (hi.is_finite() && near(p, hi)) {
            ConstraintStatus::Binding
        } else if p < 0.0 || p > hi {
            ConstraintStatus::Violated
        } else {
            ConstraintStatus::Slack
        }
    };
    let classify_line = |flow: f64, hi: f64| {
        let mag = flow.abs();
        if hi.is_finite() && near(mag, hi) {
            ConstraintStatus::Binding
        } else if mag > hi {
            ConstraintStatus::Violated
        } else {
            ConstraintStatus::Slack
        }
    };
    CongestionReport {
        injections: [
            classify_range(sol.p1, net.pmax[0]),
            classify_range(sol.p2, net.pmax[1]),
        ],
        lines: [
            classify_line(sol.flows[0], net.fmax[0]),
            classify_line(sol.flows[1], net.fmax[1]),
            classify_line(sol.flows[2], net.fmax[2]),
        ],
        elastic_load_feasible: sol.pe >= 0.0,
    }
}

/// Result of probing the optimum objective across reactance perturbations.
#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub entries: Vec<IndependenceEntry>,
    /// Largest relative objective deviation among uncongested entries.
    pub max_relative_spread: f64,
    pub uncongested_count: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct IndependenceEntry {
    pub reactances: [f64; 3],
    pub objective: f64,
    /// True when some constraint is binding or violated at this perturbation,
    /// excluding the entry from the equality claim.
    pub congested: bool,
}

/// Recompute the unconstrained optimum for each reactance triple. As long as
/// no perturbation congests the network, the objective value cannot depend on
/// the line parameters; congested entries are reported and excluded.
pub fn objective_independence_check(
    net: &ThreeBusNetwork,
    perturbations: &[[f64; 3]],
) -> Result<IndependenceReport> {
    let mut entries = Vec::with_capacity(perturbations.len());
    let mut reference: Option<f64> = None;
    let mut max_spread = 0.0f64;
    let mut uncongested_count = 0;
    for &[x12, x13, x23] in perturbations {
        let variant = net.with_reactances(Some(x12), Some(x13), Some(x23))?;
        let sol = unconstrained_opf(&variant)?;
        let congested = !sol.congestion.uncongested() || !sol.congestion.elastic_load_feasible;
        if !congested {
            uncongested_count += 1;
            match reference {
                None => reference = Some(sol.objective),
                Some(base) => {
                    let spread = (sol.objective - base).abs() / base.abs().max(1e-12);
                    max_spread = max_spread.max(spread);
                }
            }
        }
        entries.push(IndependenceEntry {
            reactances: [x12, x13, x23],
            objective: sol.objective,
            congested,
        });
    }
    Ok(IndependenceReport {
        entries,
        max_relative_spread: max_spread,
        uncongested_count,
    })
}

/// The 3×2 map `H·Br⁻¹` from injections to line flows.
///
/// As |b13| → 0 it approaches `[[1, 0], [0, 0], [1, 1]]` with corrections of
/// order |b13|: generator 1's output reroutes through bus 2.
pub fn sensitivity_matrix(net: &ThreeBusNetwork) -> Result<Matrix3x2<f64>> {
    let cd = conductance_matrices(net)?;
    let inv = cd
        .br
        .try_inverse()
        .ok_or(Error::SingularNetwork { d: cd.d })?;
    Ok(cd.h * inv)
}

/// P23 tabulated against β1, with a least-squares fit of
/// `P23 = C/β1 + c0` over the grid. For a weak 1-3 line the fitted constant
/// approaches α/2.
#[derive(Debug, Clone)]
pub struct CostSensitivity {
    /// (β1, P23) pairs in grid order.
    pub rows: Vec<(f64, f64)>,
    pub fitted_c: f64,
    pub fitted_intercept: f64,
}

pub fn p23_cost_sensitivity(net: &ThreeBusNetwork, beta1_grid: &[f64]) -> Result<CostSensitivity> {
    let mut rows = Vec::with_capacity(beta1_grid.len());
    for &beta1 in beta1_grid {
        let variant = ThreeBusNetwork::new(
            net.x12, net.x13, net.x23, net.alpha, beta1, net.beta2, net.pc, net.pmax, net.fmax,
        )?;
        let flows = line_flows_closed_form(&variant)?;
        rows.push((beta1, flows[2]));
    }
    // Ordinary least squares of P23 on 1/β1.
    let n = rows.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(beta1, p23) in &rows {
        let x = 1.0 / beta1;
        sx += x;
        sy += p23;
        sxx += x * x;
        sxy += x * p23;
    }
    let denom = n * sxx - sx * sx;
    let (fitted_c, fitted_intercept) = if rows.len() < 2 || denom.abs() < 1e-300 {
        (f64::NAN, f64::NAN)
    } else {
        let c = (n * sxy - sx * sy) / denom;
        (c, (sy - c * sx) / n)
    };
    Ok(CostSensitivity {
        rows,
        fitted_c,
        fitted_intercept,
    })
}

/// Minimise the OPF objective over the phase angles by exact coordinate
/// descent (the objective is a convex quadratic in (θ2, θ3), so each
/// coordinate step solves a linear equation). Independent route to the
/// closed-form optimum; returns (θ2, θ3, P1, P2).
pub fn minimize_objective_over_angles(net: &ThreeBusNetwork) -> Result<(f64, f64, f64, f64)> {
    let cd = conductance_matrices(net)?;
    // P1 = a1·θ2 + c1·θ3, P2 = a2·θ2 + c2·θ3.
    let (a1, c1) = (cd.br[(0, 0)], cd.br[(0, 1)]);
    let (a2, c2) = (cd.br[(1, 0)], cd.br[(1, 1)]);
    let (b1, b2, alpha) = (net.beta1, net.beta2, net.alpha);

    let d_theta2 = 2.0 * (b1 * a1 * a1 + b2 * a2 * a2);
    let d_theta3 = 2.0 * (b1 * c1 * c1 + b2 * c2 * c2);
    let cross = 2.0 * (b1 * a1 * c1 + b2 * a2 * c2);
    if d_theta2 == 0.0 || d_theta3 == 0.0 {
        return Err(Error::SingularNetwork { d: cd.d });
    }

    let (mut t2, mut t3) = (0.0f64, 0.0f64);
    for _ in 0..200_000 {
        let new_t2 = (alpha * (a1 + a2) - cross * t3) / d_theta2;
        let new_t3 = (alpha * (c1 + c2) - cross * new_t2) / d_theta3;
        let step = (new_t2 - t2).abs().max((new_t3 - t3).abs());
        t2 = new_t2;
        t3 = new_t3;
        if step <= 1e-10 * (1.0 + t2.abs().max(t3.abs())) {
            break;
        }
    }
    let p1 = a1 * t2 + c1 * t3;
    let p2 = a2 * t2 + c2 * t3;
    Ok((t2, t3, p1, p2))
}

/// The worked example network: β1 = 1, β2 = 1.675, α = 3, unit reactances,
/// no inelastic load, no binding limits.
pub fn example_network() -> ThreeBusNetwork {
    ThreeBusNetwork::new(
        Some(1.0),
        Some(1.0),
        Some(1.0),
        3.0,
        1.0,
        1.675,
        0.0,
        [f64::INFINITY; 2],
        [f64::INFINITY; 3],
    )
    .expect("valid example")
}

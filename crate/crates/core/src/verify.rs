//! Seeded randomized verification suites.
//!
//! Two batteries, both replayable from a seed:
//! * [`run_link_loss_suite`] — random solvable circuits plus random resistor
//!   additions; the total-loss ratio must never drop below 1, the loss summed
//!   over the pre-existing resistors must never decrease, and an addition
//!   inside one voltage-source component must leave the pre-existing network
//!   untouched.
//! * [`run_opf_invariance_suite`] — random reactance perturbations of the
//!   three-bus example; uncongested optima must share one objective value,
//!   and the closed-form injections must match an independent numerical
//!   minimisation of the objective.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::braess::lcl;
use crate::circuit::{Circuit, Element, LinkSpec};
use crate::dcopf::{
    example_network, minimize_objective_over_angles, objective_independence_check,
    unconstrained_opf,
};
use crate::error::Result;
use crate::solver::solve_circuit;

/// Draw a random solvable circuit of 3..=12 nodes, resistors in 0.1..10 Ω
/// and sources in 0..5 V. Source edges are kept acyclic so the source mesh
/// is always consistent; circuits whose baseline loss is (numerically) zero
/// are redrawn. When `reactive` is set, a few capacitors and inductors are
/// sprinkled in without ever shorting a source.
pub fn random_circuit(rng: &mut ChaCha8Rng, reactive: bool) -> Circuit {
    loop {
        let n = rng.gen_range(3..=12usize);
        let m = rng.gen_range(n - 1..=2 * n);
        let mut elements = Vec::with_capacity(m);

        // Track node groups rigidly tied by zero-impedance branches
        // (sources, inductors) so no cycle of them is ever created.
        let mut tie = UnionFindLite::new(n);
        let mut has_source = false;
        for _ in 0..m {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            while b == a {
                b = rng.gen_range(0..n);
            }
            let roll: f64 = rng.gen();
            if roll < 0.30 && tie.find(a) != tie.find(b) {
                elements.push(Element::voltage_source(rng.gen_range(0.0..5.0), a, b));
                tie.union(a, b);
                has_source = true;
            } else if reactive && (0.30..0.40).contains(&roll) && tie.find(a) != tie.find(b) {
                elements.push(Element::inductor(rng.gen_range(0.01..1.0), a, b));
                tie.union(a, b);
            } else if reactive && (0.40..0.50).contains(&roll) {
                elements.push(Element::capacitor(rng.gen_range(1e-9..1e-3), a, b));
            } else {
                elements.push(Element::resistor(rng.gen_range(0.1..10.0), a, b));
            }
        }
        if !has_source {
            continue;
        }
        let circuit = Circuit::new(n, elements).expect("generated terminals are in range");
        match solve_circuit(&circuit) {
            Ok(state) if state.total_loss > 1e-9 => return circuit,
            _ => continue,
        }
    }
}

/// A random resistive link between two distinct nodes.
pub fn random_resistive_link(rng: &mut ChaCha8Rng, circuit: &Circuit) -> LinkSpec {
    let n = circuit.node_count();
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n);
    while b == a {
        b = rng.gen_range(0..n);
    }
    LinkSpec::resistor(a, b, rng.gen_range(0.1..10.0))
}

struct UnionFindLite {
    parent: Vec<usize>,
}

impl UnionFindLite {
    fn new(n: usize) -> Self {
        UnionFindLite {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra)] = rb.min(ra);
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinkSuiteReport {
    pub cases: usize,
    /// Cases with total-loss ratio >= 1 - 1e-9.
    pub lcl_ok: usize,
    /// Cases where the pre-existing resistors' loss did not decrease.
    pub original_nondecreasing_ok: usize,
    /// Additions whose endpoints shared a voltage-source component.
    pub same_component_cases: usize,
    /// ... of which left the pre-existing network's loss and voltages unchanged.
    pub same_component_ok: usize,
    pub min_lcl: f64,
    pub min_original_ratio: f64,
    pub failures: Vec<String>,
}

impl LinkSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.lcl_ok == self.cases
            && self.original_nondecreasing_ok == self.cases
            && self.same_component_ok == self.same_component_cases
    }
}

/// Run the randomized link-addition battery.
pub fn run_link_loss_suite(seed: u64, cases: usize) -> Result<LinkSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LinkSuiteReport {
        cases,
        lcl_ok: 0,
        original_nondecreasing_ok: 0,
        same_component_cases: 0,
        same_component_ok: 0,
        min_lcl: f64::INFINITY,
        min_original_ratio: f64::INFINITY,
        failures: Vec::new(),
    };
    for case in 0..cases {
        let circuit = random_circuit(&mut rng, false);
        let link = random_resistive_link(&mut rng, &circuit);
        let r = lcl(&circuit, &link)?;

        report.min_lcl = report.min_lcl.min(r.lcl);
        report.min_original_ratio = report.min_original_ratio.min(r.lcl_original_only);
        if r.lcl >= 1.0 - 1e-9 {
            report.lcl_ok += 1;
        } else {
            report
                .failures
                .push(format!("case {case}: total-loss ratio {} < 1", r.lcl));
        }
        if r.lcl_original_only >= 1.0 - 1e-9 {
            report.original_nondecreasing_ok += 1;
        } else {
            report.failures.push(format!(
                "case {case}: pre-existing loss decreased (ratio {})",
                r.lcl_original_only
            ));
        }
        if r.same_source_component {
            report.same_component_cases += 1;
            let before = solve_circuit(&circuit)?;
            let after = solve_circuit(&circuit.add_link(&link)?)?;
            let voltages_unchanged = before
                .node_voltages
                .iter()
                .zip(&after.node_voltages)
                .all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            if (r.lcl_original_only - 1.0).abs() <= 1e-9 && voltages_unchanged {
                report.same_component_ok += 1;
            } else {
                report.failures.push(format!(
                    "case {case}: in-component addition changed the network (ratio {}, voltages unchanged: {voltages_unchanged})",
                    r.lcl_original_only
                ));
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct OpfSuiteReport {
    pub trials: usize,
    pub uncongested: usize,
    /// Largest relative objective deviation among uncongested trials.
    pub max_objective_spread: f64,
    /// Largest |closed-form − minimiser| injection difference.
    pub max_injection_error: f64,
    pub failures: Vec<String>,
}

impl OpfSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run the randomized OPF battery against the worked-example costs.
pub fn run_opf_invariance_suite(seed: u64, trials: usize) -> Result<OpfSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = example_network();
    let perturbations: Vec<[f64; 3]> = (0..trials)
        .map(|_| {
            [
                rng.gen_range(0.3..3.0),
                rng.gen_range(0.3..3.0),
                rng.gen_range(0.3..3.0),
            ]
        })
        .collect();

    let independence = objective_independence_check(&net, &perturbations)?;
    let mut report = OpfSuiteReport {
        trials,
        uncongested: independence.uncongested_count,
        max_objective_spread: independence.max_relative_spread,
        max_injection_error: 0.0,
        failures: Vec::new(),
    };
    if independence.max_relative_spread > 1e-9 {
        report.failures.push(format!(
            "objective varies across uncongested reactances (spread {})",
            independence.max_relative_spread
        ));
    }

    for p in &perturbations {
        let variant = net.with_reactances(Some(p[0]), Some(p[1]), Some(p[2]))?;
        let sol = unconstrained_opf(&variant)?;
        let (_, _, p1, p2) = minimize_objective_over_angles(&variant)?;
        let err = (p1 - sol.p1).abs().max((p2 - sol.p2).abs());
        report.max_injection_error = report.max_injection_error.max(err);
        if err > 1e-6 {
            report.failures.push(format!(
                "minimiser disagrees with closed form at x={p:?} (|delta| = {err})"
            ));
        }
    }
    Ok(report)
}

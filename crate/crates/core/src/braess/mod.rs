//! Loss-cost analysis of link additions, and closed forms for the
//! two-source, three-resistor diamond network.
//!
//! The diamond ([`BraessCircuitParams`]) is a loop of two series branches —
//! source E2 then resistor R1 on one side, resistor R2 then source E1 on the
//! other — with an optional cross resistor R3 between the two mid nodes:
//!
//! ```text
//!        0 (top)
//!   E2 /      \ R2
//!     1 --R3-- 2
//!   R1 \      / E1
//!        3 (bottom)
//! ```
//!
//! With D = R1·R2 + R1·R3 + R2·R3, the branch currents in the directions
//! i1: 1→3, i2: 2→0, i3: 1→2 are
//!
//! ```text
//! i1 = (E1(R2+R3) + E2·R3) / D
//! i2 = (E1·R3 + E2(R1+R3)) / D          (and i1 + i3 = i2)
//! i3 = (E2·R1 − E1·R2) / D
//! ```
//!
//! Connecting a small R3 in an unbalanced network reroutes current and raises
//! the total dissipation; the loss cost of the link ([`lcl`]) quantifies the
//! effect as the after/before loss ratio.

pub mod transport;

use crate::circuit::{Circuit, Element, LinkSpec};
use crate::error::{Error, Result};
use crate::solver::{node_basis, reduce_steady_state, solve_circuit, solve_dc_with};

pub use transport::{
    route_costs, transport_equilibrium, RouteCosts, RouteFlows, TransportEquilibrium,
    TransportNetwork,
};

/// Parameters of the diamond network. `r3: None` means the cross link is
/// disconnected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraessCircuitParams {
    pub e1: f64,
    pub e2: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: Option<f64>,
}

/// Branch currents of the diamond, in the conventions of the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCurrents {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl BraessCircuitParams {
    pub const TOP: usize = 0;
    pub const LEFT_MID: usize = 1;
    pub const RIGHT_MID: usize = 2;
    pub const BOTTOM: usize = 3;

    /// Element indices in the built circuit.
    pub const R1_INDEX: usize = 0;
    pub const R2_INDEX: usize = 1;
    pub const E1_INDEX: usize = 2;
    pub const E2_INDEX: usize = 3;
    pub const R3_INDEX: usize = 4;

    pub fn new(e1: f64, e2: f64, r1: f64, r2: f64, r3: Option<f64>) -> Result<Self> {
        for (name, value) in [("r1", r1), ("r2", r2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if let Some(r3) = r3 {
            if !(r3.is_finite() && r3 > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "r3",
                    value: r3,
                });
            }
        }
        Ok(BraessCircuitParams { e1, e2, r1, r2, r3 })
    }

    /// Build the diamond as a [`Circuit`]. Element order is
    /// `[R1, R2, E1, E2]` plus `R3` last when present, so solved branch
    /// currents line up with the `*_INDEX` constants.
    pub fn circuit(&self) -> Circuit {
        let mut elements = vec![
            Element::resistor(self.r1, Self::LEFT_MID, Self::BOTTOM),
            Element::resistor(self.r2, Self::RIGHT_MID, Self::TOP),
            Element::voltage_source(self.e1, Self::BOTTOM, Self::RIGHT_MID),
            Element::voltage_source(self.e2, Self::TOP, Self::LEFT_MID),
        ];
        if let Some(r3) = self.r3 {
            elements.push(Element::resistor(r3, Self::LEFT_MID, Self::RIGHT_MID));
        }
        Circuit::new(4, elements).expect("validated parameters")
    }

    /// The cross link as an addition to the R3-less circuit.
    pub fn cross_link(&self, r3: f64) -> LinkSpec {
        LinkSpec::resistor(Self::LEFT_MID, Self::RIGHT_MID, r3)
    }

    /// Closed-form branch currents; `None` when the cross link is absent.
    pub fn closed_form_currents(&self) -> Option<BranchCurrents> {
        let r3 = self.r3?;
        Some(closed_form_currents(self.e1, self.e2, self.r1, self.r2, r3))
    }

    /// Loop current of the diamond without the cross link (flows through
    /// both resistors).
    pub fn baseline_current(&self) -> f64 {
        (self.e1 + self.e2) / (self.r1 + self.r2)
    }

    /// Total loss without the cross link: (E1+E2)² / (R1+R2).
    pub fn baseline_loss(&self) -> f64 {
        let i = self.baseline_current();
        i * i * (self.r1 + self.r2)
    }
}

/// Closed-form diamond currents for an explicit parameter set.
pub fn closed_form_currents(e1: f64, e2: f64, r1: f64, r2: f64, r3: f64) -> BranchCurrents {
    let d = r1 * r2 + r1 * r3 + r2 * r3;
    BranchCurrents {
        i1: (e1 * (r2 + r3) + e2 * r3) / d,
        i2: (e1 * r3 + e2 * (r1 + r3)) / d,
        i3: (e2 * r1 - e1 * r2) / d,
    }
}

/// Loss ratio of adding a link to an arbitrary circuit.
#[derive(Debug, Clone)]
pub struct LclReport {
    /// Total loss of the circuit before the addition.
    pub loss_before: f64,
    /// Total loss after, including the added element's own dissipation.
    pub loss_after: f64,
    /// `loss_after / loss_before`.
    pub lcl: f64,
    /// Always true for [`lcl`]: the ratio numerator counts the new link.
    pub includes_new_link_loss: bool,
    /// Loss change per original element (zero for non-resistors).
    pub per_branch_delta: Vec<f64>,
    /// Loss after, summed over the pre-existing resistors only.
    pub loss_after_original_only: f64,
    /// `loss_after_original_only / loss_before`; exactly 1 when the link
    /// joins two nodes of one voltage-source component.
    pub lcl_original_only: f64,
    /// Dissipation of the added element itself.
    pub new_link_loss: f64,
    /// Whether both link endpoints were already rigidly coupled by sources.
    pub same_source_component: bool,
}

/// Solve a circuit before and after adding `link` and report the loss ratio.
///
/// Fails with [`Error::UndefinedLossRatio`] when the pre-addition loss is
/// zero; the error carries both absolute losses.
pub fn lcl(circuit: &Circuit, link: &LinkSpec) -> Result<LclReport> {
    let rc_before = reduce_steady_state(circuit)?;
    let basis_before = node_basis(&rc_before)?;
    let before = solve_dc_with(&rc_before, &basis_before)?;

    let grown = circuit.add_link(link)?;
    let after = solve_circuit(&grown)?;

    let n_orig = circuit.elements().len();
    let per_branch_delta: Vec<f64> = (0..n_orig)
        .map(|i| after.branch_losses[i] - before.branch_losses[i])
        .collect();
    let loss_after_original_only: f64 = after.branch_losses[..n_orig].iter().sum();
    let new_link_loss = after.branch_losses[n_orig];
    let loss_before = before.total_loss;
    let loss_after = after.total_loss;

    if loss_before == 0.0 {
        return Err(Error::UndefinedLossRatio {
            loss_before,
            loss_after,
        });
    }

    Ok(LclReport {
        loss_before,
        loss_after,
        lcl: loss_after / loss_before,
        includes_new_link_loss: true,
        per_branch_delta,
        loss_after_original_only,
        lcl_original_only: loss_after_original_only / loss_before,
        new_link_loss,
        same_source_component: basis_before.same_component(link.a.0, link.b.0),
    })
}

/// Loss ratio of the diamond with equal sources, in closed form:
/// `(R1−R2)² / (4(R1R2 + R2R3 + R3R1)) + 1`. Always ≥ 1, with equality
/// exactly when R1 = R2.
pub fn lcl_formula_equal_sources(r1: f64, r2: f64, r3: f64) -> f64 {
    let h = r1 - r2;
    h * h / (4.0 * (r1 * r2 + r2 * r3 + r3 * r1)) + 1.0
}

/// Cross-link resistance at which the two branch losses i1²R1 and i2²R2 of
/// the equal-source diamond cross over. `None` when R1 = R2 (the losses then
/// agree for every R3).
///
/// Found by bracketing and bisection on the loss difference, so the routine
/// keeps working if the branch cost model changes; the algebraic closed form
/// √(R1·R2)/2 is used as an independent cross-check in tests.
pub fn critical_r3(r1: f64, r2: f64) -> Option<f64> {
    // Loss difference i1²R1 − i2²R2 at E1 = E2 (the magnitude scales out).
    let diff = |r3: f64| {
        let c = closed_form_currents(1.0, 1.0, r1, r2, r3);
        c.i1 * c.i1 * r1 - c.i2 * c.i2 * r2
    };
    let (mut lo, mut hi) = (1e-9, 1e9);
    let (f_lo, f_hi) = (diff(lo), diff(hi));
    if f_lo == 0.0 && f_hi == 0.0 {
        return None; // balanced resistors: losses identical everywhere
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    // ~100 halvings reach 1e-12 relative width.
    while (hi - lo) > 1e-12 * hi.abs().max(lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if diff(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// One row of a cross-link sweep. `r3: None` is the baseline row (link
/// absent, reported as `inf` in CSV).
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub r3: Option<f64>,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub loss1: f64,
    pub loss2: f64,
    pub loss3: f64,
    pub total_loss: f64,
    pub lcl: f64,
}

/// Solve the diamond for every R3 on the grid (assumed positive, ascending)
/// and append the baseline row. Rows come from the general solver, not the
/// closed forms, so sweeps stay honest against the closed-form tests.
pub fn sweep_cross_link(params: &BraessCircuitParams, r3_grid: &[f64]) -> Result<Vec<SweepRow>> {
    let base = BraessCircuitParams {
        r3: None,
        ..*params
    };
    let baseline = solve_circuit(&base.circuit())?;
    let baseline_loss = baseline.total_loss;

    let mut rows = Vec::with_capacity(r3_grid.len() + 1);
    for &r3 in r3_grid {
        let with = BraessCircuitParams {
            r3: Some(r3),
            ..*params
        };
        let state = solve_circuit(&with.circuit())?;
        rows.push(SweepRow {
            r3: Some(r3),
            i1: state.branch_currents[BraessCircuitParams::R1_INDEX],
            i2: state.branch_currents[BraessCircuitParams::R2_INDEX],
            i3: state.branch_currents[BraessCircuitParams::R3_INDEX],
            loss1: state.branch_losses[BraessCircuitParams::R1_INDEX],
            loss2: state.branch_losses[BraessCircuitParams::R2_INDEX],
            loss3: state.branch_losses[BraessCircuitParams::R3_INDEX],
            total_loss: state.total_loss,
            lcl: state.total_loss / baseline_loss,
        });
    }
    rows.push(SweepRow {
        r3: None,
        i1: baseline.branch_currents[BraessCircuitParams::R1_INDEX],
        i2: baseline.branch_currents[BraessCircuitParams::R2_INDEX],
        i3: 0.0,
        loss1: baseline.branch_losses[BraessCircuitParams::R1_INDEX],
        loss2: baseline.branch_losses[BraessCircuitParams::R2_INDEX],
        loss3: 0.0,
        total_loss: baseline_loss,
        lcl: 1.0,
    });
    Ok(rows)
}

/// Write sweep rows as CSV with the fixed header
/// `R3,i1,i2,i3,loss1,loss2,loss3,total_loss,lcl`. Numbers are written in
/// full double precision; the baseline row's R3 is `inf`.
pub fn write_sweep_csv<W: std::io::Write + ?Sized>(
    rows: &[SweepRow],
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "R3,i1,i2,i3,loss1,loss2,loss3,total_loss,lcl")?;
    for row in rows {
        match row.r3 {
            Some(r3) => write!(w, "{}", r3)?,
            None => write!(w, "inf")?,
        }
        writeln!(
            w,
            ",{},{},{},{},{},{},{},{}",
            row.i1, row.i2, row.i3, row.loss1, row.loss2, row.loss3, row.total_loss, row.lcl
        )?;
    }
    Ok(())
}

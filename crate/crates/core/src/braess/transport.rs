//! The classic congestion paradox on a diamond road network.
//!
//! Travelers go from an origin to a destination over two routes: left
//! (segment A then B) and right (segment C then D). Segments A and D cost
//! `f + beta` at flow `f`; segments B and C cost `alpha * f`. An optional
//! cross link joins the end of C to the start of B, opening a third route
//! C–cross–B whose own cost is the constant `cross_cost`.
//!
//! Route loads are atomic (whole travelers). `transport_equilibrium` plays
//! the arrival dynamic the paradox describes: travelers commit one at a time
//! to the route that looks cheapest at the loads they observe, with ties
//! resolved toward the new cross route when it exists (toward the less
//! loaded route otherwise). Without the cross link this lands on the
//! balanced split, which is a genuine equilibrium; with a cheap cross link
//! the whole population piles onto it, which can leave everyone worse off —
//! and, depending on the parameters, may not even be unilaterally stable.
//! The report carries an exhaustive stability check (`is_nash`) and the
//! social optimum for comparison.

/// Cost parameters of the diamond road network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportNetwork {
    /// Slope of the flow-proportional segments B and C.
    pub alpha: f64,
    /// Constant part of the A and D segment costs.
    pub beta: f64,
    /// Constant cost of the cross link itself (0 for a free shortcut).
    pub cross_cost: f64,
    /// Total number of travelers.
    pub travelers: u32,
}

/// Travelers per route. `cross` is 0 when the link is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteFlows {
    pub left: u32,
    pub right: u32,
    pub cross: u32,
}

impl RouteFlows {
    pub fn total(&self) -> u32 {
        self.left + self.right + self.cross
    }
}

/// Per-traveler cost of each route at given flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteCosts {
    pub left: f64,
    pub right: f64,
    pub cross: f64,
}

/// Evaluate the three route costs at an arbitrary assignment.
///
/// Segment loads: A carries `left`, D carries `right`, B carries
/// `left + cross`, C carries `right + cross`.
pub fn route_costs(net: &TransportNetwork, flows: RouteFlows) -> RouteCosts {
    let f_a = flows.left as f64;
    let f_d = flows.right as f64;
    let f_b = (flows.left + flows.cross) as f64;
    let f_c = (flows.right + flows.cross) as f64;
    RouteCosts {
        left: (f_a + net.beta) + net.alpha * f_b,
        right: net.alpha * f_c + (f_d + net.beta),
        cross: net.alpha * f_c + net.cross_cost + net.alpha * f_b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportEquilibrium {
    pub with_cross_link: bool,
    pub flows: RouteFlows,
    /// Route costs at the final flows.
    pub costs: RouteCosts,
    /// Cost paid per traveler, averaged over the population.
    pub per_traveler_cost: f64,
    pub total_cost: f64,
    /// No traveler can strictly lower their own cost by switching routes.
    pub is_nash: bool,
    /// Assignment minimising the population's total cost.
    pub social_optimum: RouteFlows,
    pub social_optimum_total_cost: f64,
}

/// Play the arrival dynamic and report the resulting assignment, its
/// stability, and the social optimum.
pub fn transport_equilibrium(
    net: &TransportNetwork,
    with_cross_link: bool,
) -> TransportEquilibrium {
    let mut flows = RouteFlows {
        left: 0,
        right: 0,
        cross: 0,
    };
    for _ in 0..net.travelers {
        let observed = route_costs(net, flows);
        let mut choice = 0usize; // 0 = left, 1 = right, 2 = cross
        let mut best = observed.left;
        if observed.right < best || (observed.right == best && flows.right < flows.left) {
            choice = 1;
            best = observed.right;
        }
        if with_cross_link && observed.cross <= best {
            choice = 2;
        }
        match choice {
            0 => flows.left += 1,
            1 => flows.right += 1,
            _ => flows.cross += 1,
        }
    }

    let costs = route_costs(net, flows);
    let total_cost = flows.left as f64 * costs.left
        + flows.right as f64 * costs.right
        + flows.cross as f64 * costs.cross;
    let per_traveler_cost = if net.travelers == 0 {
        0.0
    } else {
        total_cost / net.travelers as f64
    };

    let (social_optimum, social_optimum_total_cost) = social_optimum(net, with_cross_link);

    TransportEquilibrium {
        with_cross_link,
        flows,
        costs,
        per_traveler_cost,
        total_cost,
        is_nash: is_nash(net, flows, with_cross_link),
        social_optimum,
        social_optimum_total_cost,
    }
}

/// Exhaustive unilateral-deviation check: a deviator re-prices the target
/// route with themselves moved onto it.
pub fn is_nash(net: &TransportNetwork, flows: RouteFlows, with_cross_link: bool) -> bool {
    let cost_of = |f: RouteFlows, route: usize| {
        let c = route_costs(net, f);
        [c.left, c.right, c.cross][route]
    };
    let occupancy = [flows.left, flows.right, flows.cross];
    let n_routes = if with_cross_link { 3 } else { 2 };
    for from in 0..n_routes {
        if occupancy[from] == 0 {
            continue;
        }
        let current = cost_of(flows, from);
        for to in 0..n_routes {
            if to == from {
                continue;
            }
            let mut moved = [flows.left, flows.right, flows.cross];
            moved[from] -= 1;
            moved[to] += 1;
            let moved = RouteFlows {
                left: moved[0],
                right: moved[1],
                cross: moved[2],
            };
            if cost_of(moved, to) < current - 1e-12 {
                return false;
            }
        }
    }
    true
}

fn social_optimum(net: &TransportNetwork, with_cross_link: bool) -> (RouteFlows, f64) {
    let n = net.travelers;
    let mut best = (
        RouteFlows {
            left: n,
            right: 0,
            cross: 0,
        },
        f64::INFINITY,
    );
    for left in 0..=n {
        let cross_max = if with_cross_link { n - left } else { 0 };
        for cross in 0..=cross_max {
            let flows = RouteFlows {
                left,
                right: n - left - cross,
                cross,
            };
            let c = route_costs(net, flows);
            let total = flows.left as f64 * c.left
                + flows.right as f64 * c.right
                + flows.cross as f64 * c.cross;
            if total < best.1 {
                best = (flows, total);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classic() -> TransportNetwork {
        TransportNetwork {
            alpha: 10.0,
            beta: 50.0,
            cross_cost: 0.0,
            travelers: 6,
        }
    }

    #[test]
    fn without_the_link_travelers_split_evenly() {
        let eq = transport_equilibrium(&classic(), false);
        assert_eq!(
            eq.flows,
            RouteFlows {
                left: 3,
                right: 3,
                cross: 0
            }
        );
        assert_eq!(eq.costs.left, 83.0);
        assert_eq!(eq.costs.right, 83.0);
        assert_eq!(eq.per_traveler_cost, 83.0);
        assert!(eq.is_nash);
    }

    #[test]
    fn a_free_cross_link_draws_everyone_and_raises_the_cost() {
        let eq = transport_equilibrium(&classic(), true);
        assert_eq!(
            eq.flows,
            RouteFlows {
                left: 0,
                right: 0,
                cross: 6
            }
        );
        assert_eq!(eq.costs.cross, 120.0);
        assert_eq!(eq.per_traveler_cost, 120.0);
        // Everyone is worse off than the 83 they paid before the link; at
        // these parameters the pile-on is not even unilaterally stable.
        assert!(!eq.is_nash);
        // The population would have done better ignoring the link entirely.
        assert_eq!(
            eq.social_optimum,
            RouteFlows {
                left: 3,
                right: 3,
                cross: 0
            }
        );
        assert_eq!(eq.social_optimum_total_cost, 498.0);
    }

    #[test]
    fn three_travelers_alone_on_the_cross_route_pay_sixty() {
        let c = route_costs(
            &classic(),
            RouteFlows {
                left: 0,
                right: 0,
                cross: 3,
            },
        );
        assert_eq!(c.cross, 60.0);
    }

    #[test]
    fn the_pile_on_is_stable_when_the_constant_segments_are_slow() {
        // With beta >= alpha*n - 1 the detour via A or D never beats the
        // congested shortcut.
        let net = TransportNetwork {
            alpha: 10.0,
            beta: 60.0,
            cross_cost: 0.0,
            travelers: 6,
        };
        let eq = transport_equilibrium(&net, true);
        assert_eq!(eq.flows.cross, 6);
        assert_eq!(eq.per_traveler_cost, 120.0);
        assert!(eq.is_nash);
        // And the paradox still bites: the no-link split cost only 93.
        let before = transport_equilibrium(&net, false);
        assert_eq!(before.per_traveler_cost, 93.0);
    }

    #[test]
    fn balanced_split_is_stable_for_odd_populations_too() {
        let net = TransportNetwork {
            alpha: 3.0,
            beta: 7.0,
            cross_cost: 0.0,
            travelers: 7,
        };
        let eq = transport_equilibrium(&net, false);
        assert!(eq.flows.left.abs_diff(eq.flows.right) <= 1);
        assert!(eq.is_nash);
    }
}

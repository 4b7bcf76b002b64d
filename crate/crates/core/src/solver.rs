//! Steady-state DC solution of voltage-controlled circuits.
//!
//! Pipeline:
//! 1. [`reduce_steady_state`] — capacitor branches are deleted (they carry no
//!    DC current) and inductor branches are contracted (shorts), leaving only
//!    resistors and voltage sources.
//! 2. [`node_basis`] — nodes are grouped into the connected components of the
//!    voltage-source subgraph. Within a component every node's potential is a
//!    fixed offset (signed sum of source voltages along a path) from one
//!    representative node, so one unknown per component remains.
//! 3. [`solve_dc`] — the remaining unknowns minimise the total resistive loss
//!    expressed as a quadratic potential in the representative voltages; its
//!    stationarity condition is exactly Kirchhoff's current law aggregated
//!    over each component, solved here as a symmetric positive-definite
//!    system. Branch currents on zero-impedance elements (sources, shorted
//!    inductors) are then recovered from per-node current balance.
//!
//! [`evaluate_potential`] exposes the loss potential at arbitrary basis
//! voltages so the minimum property can be checked directly.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::circuit::{Circuit, ElementKind};
use crate::error::{Error, Result};

/// Absolute tolerance (volts) for source-loop consistency checks.
pub const SOURCE_CONSISTENCY_TOL: f64 = 1e-9;
/// Relative tolerance for current-balance residuals.
pub const KCL_TOL: f64 = 1e-9;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut v = v;
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Attach the larger root under the smaller so that group ids
            // stay deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// A surviving element of the reduced circuit (resistor or voltage source
/// whose endpoints were not merged into one node).
#[derive(Debug, Clone, Copy)]
pub struct SurvivingElement {
    /// Index of this element in the original circuit (provenance).
    pub orig_index: usize,
    pub is_source: bool,
    pub value: f64,
    /// Original node ids; use [`ReducedCircuit::merged_rep`] for the merged view.
    pub a: usize,
    pub b: usize,
}

/// A circuit reduced to DC steady state: resistors and voltage sources only,
/// plus the node partition induced by inductor shorts.
#[derive(Debug, Clone)]
pub struct ReducedCircuit {
    original: Circuit,
    /// Original node -> representative node of its merged group (the lowest
    /// original id in the group).
    node_rep: Vec<usize>,
    surviving: Vec<SurvivingElement>,
}

impl ReducedCircuit {
    pub fn original(&self) -> &Circuit {
        &self.original
    }

    pub fn merged_rep(&self, node: usize) -> usize {
        self.node_rep[node]
    }

    pub fn merged_nodes(&self) -> &[usize] {
        &self.node_rep
    }

    pub fn surviving(&self) -> &[SurvivingElement] {
        &self.surviving
    }
}

/// Delete capacitor branches and contract inductor branches.
///
/// Total steady-state loss is unchanged by either operation. Fails if an
/// inductor contraction would short a nonzero voltage source.
pub fn reduce_steady_state(c: &Circuit) -> Result<ReducedCircuit> {
    let n = c.node_count();
    let mut uf = UnionFind::new(n);
    for e in c.elements() {
        if e.kind == ElementKind::Inductor {
            uf.union(e.a.0, e.b.0);
        }
    }
    // Canonical representative: lowest node id in the merged group.
    let mut lowest = vec![usize::MAX; n];
    for v in 0..n {
        let root = uf.find(v);
        if lowest[root] == usize::MAX {
            lowest[root] = v;
        }
    }
    let node_rep: Vec<usize> = (0..n).map(|v| lowest[uf.find(v)]).collect();

    let mut surviving = Vec::new();
    for (index, e) in c.elements().iter().enumerate() {
        let (ra, rb) = (node_rep[e.a.0], node_rep[e.b.0]);
        match e.kind {
            ElementKind::Capacitor | ElementKind::Inductor => {}
            ElementKind::VoltageSource => {
                if ra == rb {
                    if e.value.abs() > SOURCE_CONSISTENCY_TOL {
                        return Err(Error::InconsistentShort {
                            index,
                            voltage: e.value,
                        });
                    }
                    // A zero-volt source inside a merged group constrains nothing.
                } else {
                    surviving.push(SurvivingElement {
                        orig_index: index,
                        is_source: true,
                        value: e.value,
                        a: e.a.0,
                        b: e.b.0,
                    });
                }
            }
            ElementKind::Resistor => {
                // A resistor whose endpoints were merged sees zero volts and
                // carries no current; drop it.
                if ra != rb {
                    surviving.push(SurvivingElement {
                        orig_index: index,
                        is_source: false,
                        value: e.value,
                        a: e.a.0,
                        b: e.b.0,
                    });
                }
            }
        }
    }

    Ok(ReducedCircuit {
        original: c.clone(),
        node_rep,
        surviving,
    })
}

/// Which node of a component becomes its representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepChoice {
    LowestId,
    HighestId,
}

/// One representative node per connected component of the voltage-source
/// subgraph, with per-node potential offsets relative to the representative.
#[derive(Debug, Clone)]
pub struct NodeBasis {
    /// Original node -> component index.
    comp_of: Vec<usize>,
    /// Component -> sorted original node ids.
    components: Vec<Vec<usize>>,
    /// Component -> representative original node id.
    representatives: Vec<usize>,
    /// Original node -> signed sum of source voltages from the representative.
    offsets: Vec<f64>,
    /// Component -> whether it is the voltage reference of its connected part.
    grounded: Vec<bool>,
    /// Component -> id of the connected component of the full reduced graph.
    full_of: Vec<usize>,
    /// Components with an unknown voltage, ascending.
    free: Vec<usize>,
    /// Component -> slot in the unknown vector.
    unknown_slot: Vec<Option<usize>>,
}

impl NodeBasis {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.comp_of[node]
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn is_grounded(&self, comp: usize) -> bool {
        self.grounded[comp]
    }

    /// Components whose representative voltage is a solver unknown, ascending.
    pub fn free_components(&self) -> &[usize] {
        &self.free
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.comp_of[a] == self.comp_of[b]
    }
}

/// Build the node basis with the default (lowest-id) representatives.
pub fn node_basis(rc: &ReducedCircuit) -> Result<NodeBasis> {
    node_basis_with(rc, RepChoice::LowestId)
}

/// Build the node basis with an explicit representative choice. The solved
/// node voltages do not depend on this choice.
pub fn node_basis_with(rc: &ReducedCircuit, choice: RepChoice) -> Result<NodeBasis> {
    let n = rc.original.node_count();

    // Components of the source-only subgraph over merged nodes.
    let mut uf = UnionFind::new(n);
    for s in &rc.surviving {
        if s.is_source {
            uf.union(rc.node_rep[s.a], rc.node_rep[s.b]);
        }
    }
    // Components are numbered by their lowest node; member lists are
    // ascending because v runs ascending. Union-by-lowest guarantees the
    // root is never visited after its members.
    let mut comp_of = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let root = uf.find(rc.node_rep[v]);
        let comp = if comp_of[root] == usize::MAX {
            components.push(Vec::new());
            let id = components.len() - 1;
            comp_of[root] = id;
            id
        } else {
            comp_of[root]
        };
        comp_of[v] = comp;
        components[comp].push(v);
    }

    let representatives: Vec<usize> = components
        .iter()
        .map(|members| match choice {
            RepChoice::LowestId => members[0],
            RepChoice::HighestId => *members.last().unwrap(),
        })
        .collect();

    // Offsets by traversal of source links over merged nodes. Every non-tree
    // source edge is checked, so an inconsistent source mesh is a hard error.
    let mut adjacency: Vec<Vec<(usize, f64, usize, usize)>> = vec![Vec::new(); n];
    for s in &rc.surviving {
        if s.is_source {
            let (ma, mb) = (rc.node_rep[s.a], rc.node_rep[s.b]);
            adjacency[ma].push((mb, s.value, s.a, s.b));
            adjacency[mb].push((ma, -s.value, s.a, s.b));
        }
    }
    let mut merged_offset = vec![f64::NAN; n];
    for rep in &representatives {
        let start = rc.node_rep[*rep];
        merged_offset[start] = 0.0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let base = merged_offset[u];
            for &(w, dv, oa, ob) in &adjacency[u] {
                let expected = base + dv;
                if merged_offset[w].is_nan() {
                    merged_offset[w] = expected;
                    queue.push_back(w);
                } else if (merged_offset[w] - expected).abs() > SOURCE_CONSISTENCY_TOL {
                    return Err(Error::InconsistentSourceLoop {
                        a: oa,
                        b: ob,
                        mismatch: merged_offset[w] - expected,
                    });
                }
            }
        }
    }
    let offsets: Vec<f64> = (0..n).map(|v| merged_offset[rc.node_rep[v]]).collect();

    // Connected components of the full reduced graph, for per-part grounding.
    let mut full_uf = UnionFind::new(n);
    for s in &rc.surviving {
        full_uf.union(rc.node_rep[s.a], rc.node_rep[s.b]);
    }
    let mut full_id_of_root = vec![usize::MAX; n];
    let mut full_count = 0;
    let mut full_of_node = vec![0usize; n];
    for (v, fid) in full_of_node.iter_mut().enumerate() {
        let root = full_uf.find(rc.node_rep[v]);
        if full_id_of_root[root] == usize::MAX {
            full_id_of_root[root] = full_count;
            full_count += 1;
        }
        *fid = full_id_of_root[root];
    }
    let full_of: Vec<usize> = representatives
        .iter()
        .map(|&rep| full_of_node[rep])
        .collect();

    // Ground the component containing the lowest node of each connected part;
    // the solved voltages then vanish at that node regardless of `choice`.
    let mut grounded = vec![false; components.len()];
    let mut seen_full = vec![false; full_count];
    for v in 0..n {
        let fid = full_of_node[v];
        if !seen_full[fid] {
            seen_full[fid] = true;
            grounded[comp_of[v]] = true;
        }
    }

    let mut free = Vec::new();
    let mut unknown_slot = vec![None; components.len()];
    for comp in 0..components.len() {
        if !grounded[comp] {
            unknown_slot[comp] = Some(free.len());
            free.push(comp);
        }
    }

    Ok(NodeBasis {
        comp_of,
        components,
        representatives,
        offsets,
        grounded,
        full_of,
        free,
        unknown_slot,
    })
}

/// Full steady-state solution, reported on the original circuit: one voltage
/// per node and one current per element, in element order.
#[derive(Debug, Clone)]
pub struct SolvedState {
    pub node_voltages: Vec<f64>,
    pub branch_currents: Vec<f64>,
    /// Per-element dissipation; zero for everything but resistors.
    pub branch_losses: Vec<f64>,
    pub total_loss: f64,
    /// Loss on resistors whose endpoints share a source component; fixed by
    /// the sources alone.
    pub intra_component_loss: f64,
    /// Loss on resistors bridging two source components.
    pub inter_component_loss: f64,
    /// Solved voltages of the free components (reference components at zero),
    /// in [`NodeBasis::free_components`] order.
    pub free_basis_voltages: Vec<f64>,
}

impl SolvedState {
    pub fn total_loss(&self) -> f64 {
        self.total_loss
    }
}

/// Total resistive dissipation of a solved circuit, in watts.
pub fn total_loss(state: &SolvedState) -> f64 {
    state.total_loss
}

/// Solve the reduced circuit with the default node basis.
pub fn solve_dc(rc: &ReducedCircuit) -> Result<SolvedState> {
    let basis = node_basis(rc)?;
    solve_dc_with(rc, &basis)
}

/// Reduce and solve in one step.
pub fn solve_circuit(c: &Circuit) -> Result<SolvedState> {
    solve_dc(&reduce_steady_state(c)?)
}

/// Solve with an explicit basis (the solution is basis-independent).
pub fn solve_dc_with(rc: &ReducedCircuit, basis: &NodeBasis) -> Result<SolvedState> {
    let n = rc.original.node_count();
    let nf = basis.free.len();

    // Stationarity of the loss potential: weighted-Laplacian system over the
    // free component voltages. Strictly positive definite whenever every free
    // component has a resistive path to its part's reference.
    let mut a = DMatrix::<f64>::zeros(nf, nf);
    let mut rhs = DVector::<f64>::zeros(nf);
    for s in &rc.surviving {
        if s.is_source {
            continue;
        }
        let (ca, cb) = (basis.comp_of[s.a], basis.comp_of[s.b]);
        if ca == cb {
            continue;
        }
        let g = 1.0 / s.value;
        let d = basis.offsets[s.a] - basis.offsets[s.b];
        if let Some(i) = basis.unknown_slot[ca] {
            a[(i, i)] += g;
            rhs[i] -= g * d;
            if let Some(j) = basis.unknown_slot[cb] {
                a[(i, j)] -= g;
            }
        }
        if let Some(j) = basis.unknown_slot[cb] {
            a[(j, j)] += g;
            rhs[j] += g * d;
            if let Some(i) = basis.unknown_slot[ca] {
                a[(j, i)] -= g;
            }
        }
    }

    let free_voltages: Vec<f64> = if nf == 0 {
        Vec::new()
    } else {
        let zero_diag = (0..nf).find(|&i| a[(i, i)] == 0.0);
        let chol = Cholesky::new(a).ok_or_else(|| Error::SingularSystem {
            node: basis.representatives[basis.free[zero_diag.unwrap_or(0)]],
        })?;
        chol.solve(&rhs).iter().copied().collect()
    };

    let comp_voltage: Vec<f64> = (0..basis.components.len())
        .map(|c| match basis.unknown_slot[c] {
            Some(slot) => free_voltages[slot],
            None => 0.0,
        })
        .collect();

    let mut node_voltages: Vec<f64> = (0..n)
        .map(|v| comp_voltage[basis.comp_of[v]] + basis.offsets[v])
        .collect();

    // Normalise each connected part so its lowest node sits at exactly 0 V.
    // With the default representatives this is already the case.
    let full_of_node = |v: usize| basis.full_of[basis.comp_of[v]];
    let full_count = basis.full_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut shift_of_full: Vec<Option<f64>> = vec![None; full_count];
    for (v, voltage) in node_voltages.iter().enumerate() {
        let fid = full_of_node(v);
        if shift_of_full[fid].is_none() {
            shift_of_full[fid] = Some(*voltage);
        }
    }
    for (v, voltage) in node_voltages.iter_mut().enumerate() {
        *voltage -= shift_of_full[full_of_node(v)].unwrap_or(0.0);
    }

    // Branch currents. Resistors and capacitors are direct; sources and
    // inductors (zero-impedance branches) are recovered from per-node current
    // balance over a spanning forest of the zero-impedance subgraph.
    let elements = rc.original.elements();
    let mut currents = vec![0.0; elements.len()];
    let mut residual = vec![0.0; n]; // net outflow through resistive branches
    for (idx, e) in elements.iter().enumerate() {
        if e.kind == ElementKind::Resistor {
            let i = (node_voltages[e.a.0] - node_voltages[e.b.0]) / e.value;
            currents[idx] = i;
            residual[e.a.0] += i;
            residual[e.b.0] -= i;
        }
    }

    let mut z_adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (edge idx, other node)
    let mut z_edges = Vec::new();
    for (idx, e) in elements.iter().enumerate() {
        if matches!(e.kind, ElementKind::VoltageSource | ElementKind::Inductor) {
            let z = z_edges.len();
            z_edges.push(idx);
            z_adjacency[e.a.0].push((z, e.b.0));
            z_adjacency[e.b.0].push((z, e.a.0));
        }
    }
    let mut z_assigned = vec![0.0; n]; // net outflow already assigned to z-branches
    let mut visited = vec![false; n];
    let mut tree_edge: Vec<Option<usize>> = vec![None; n]; // z-edge to parent
    let mut parent = vec![usize::MAX; n];
    for start in 0..n {
        if visited[start] || z_adjacency[start].is_empty() {
            continue;
        }
        visited[start] = true;
        let mut order = vec![start];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(z, w) in &z_adjacency[u] {
                if !visited[w] {
                    visited[w] = true;
                    tree_edge[w] = Some(z);
                    parent[w] = u;
                    order.push(w);
                }
            }
        }
        // Leaves first: each non-root node balances through its tree edge.
        for &v in order.iter().skip(1).rev() {
            let z = tree_edge[v].unwrap();
            let idx = z_edges[z];
            let e = &elements[idx];
            let need = -residual[v] - z_assigned[v];
            // Outflow at v through this edge is +i if v is terminal a.
            let i = if e.a.0 == v { need } else { -need };
            currents[idx] = i;
            z_assigned[v] += if e.a.0 == v { i } else { -i };
            let p = parent[v];
            z_assigned[p] += if e.a.0 == p { i } else { -i };
        }
    }

    let mut branch_losses = vec![0.0; elements.len()];
    let mut total = 0.0;
    let mut intra = 0.0;
    let mut inter = 0.0;
    for (idx, e) in elements.iter().enumerate() {
        if e.kind == ElementKind::Resistor {
            let loss = currents[idx] * currents[idx] * e.value;
            branch_losses[idx] = loss;
            total += loss;
            if basis.comp_of[e.a.0] == basis.comp_of[e.b.0] {
                intra += loss;
            } else {
                inter += loss;
            }
        }
    }

    // Free voltages are reported in the reference-at-zero frame used by
    // `evaluate_potential`, not the per-part normalised frame.
    let free_basis_voltages: Vec<f64> = basis.free.iter().map(|&c| comp_voltage[c]).collect();

    Ok(SolvedState {
        node_voltages,
        branch_currents: currents,
        branch_losses,
        total_loss: total,
        intra_component_loss: intra,
        inter_component_loss: inter,
        free_basis_voltages,
    })
}

/// Total resistive loss as a function of the free component voltages
/// (reference components held at zero).
///
/// The value is the sum of a constant part (resistors inside one source
/// component) and a quadratic part (resistors bridging components); it is
/// minimised exactly at the solved state.
pub fn evaluate_potential(rc: &ReducedCircuit, basis: &NodeBasis, free_voltages: &[f64]) -> f64 {
    assert_eq!(
        free_voltages.len(),
        basis.free.len(),
        "one voltage per free component"
    );
    let voltage_of = |comp: usize| match basis.unknown_slot[comp] {
        Some(slot) => free_voltages[slot],
        None => 0.0,
    };
    let mut p = 0.0;
    for s in &rc.surviving {
        if s.is_source {
            continue;
        }
        let (ca, cb) = (basis.comp_of[s.a], basis.comp_of[s.b]);
        let drop = voltage_of(ca) + basis.offsets[s.a] - voltage_of(cb) - basis.offsets[s.b];
        p += drop * drop / s.value;
    }
    p
}

/// Largest current-balance violation over all nodes of the original circuit,
/// relative to the circuit's largest nodal current throughput. At most
/// [`KCL_TOL`] for a valid solution.
pub fn max_kcl_residual(rc: &ReducedCircuit, state: &SolvedState) -> f64 {
    let n = rc.original.node_count();
    let mut net = vec![0.0; n];
    let mut scale = vec![0.0; n];
    for (idx, e) in rc.original.elements().iter().enumerate() {
        let i = state.branch_currents[idx];
        net[e.a.0] += i;
        net[e.b.0] -= i;
        scale[e.a.0] += i.abs();
        scale[e.b.0] += i.abs();
    }
    let global_scale = scale.iter().copied().fold(1e-12, f64::max);
    net.iter()
        .map(|v| v.abs() / global_scale)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Element;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-12)
    }

    #[test]
    fn capacitor_branch_is_removed_and_carries_no_current() {
        // Source/resistor loop plus a second branch through a capacitor.
        let c = Circuit::new(
            3,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(1.0, 0, 1),
                Element::capacitor(1e-6, 1, 2),
                Element::resistor(2.0, 2, 0),
            ],
        )
        .unwrap();
        let rc = reduce_steady_state(&c).unwrap();
        assert_eq!(rc.surviving().len(), 3); // capacitor gone
        let state = solve_dc(&rc).unwrap();
        assert_eq!(state.branch_currents[2], 0.0);
        assert!(state.branch_currents[3].abs() < 1e-12);
        assert!(rel(state.branch_currents[1].abs(), 1.0) < 1e-12);
    }

    #[test]
    fn inductor_in_series_with_resistor_is_contracted() {
        let c = Circuit::new(
            3,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::inductor(0.5, 1, 2),
                Element::resistor(2.0, 2, 0),
            ],
        )
        .unwrap();
        let rc = reduce_steady_state(&c).unwrap();
        assert_eq!(rc.merged_rep(1), rc.merged_rep(2));
        let state = solve_dc(&rc).unwrap();
        // Same 0.5 A flows through resistor and inductor.
        assert!(rel(state.branch_currents[2].abs(), 0.5) < 1e-12);
        assert!(rel(state.branch_currents[1].abs(), 0.5) < 1e-12);
        assert!(rel(state.total_loss, 0.5) < 1e-12);
        // Shorted nodes share a potential.
        assert_eq!(state.node_voltages[1], state.node_voltages[2]);
    }

    #[test]
    fn inductor_across_source_is_an_inconsistent_short() {
        let c = Circuit::new(
            2,
            vec![
                Element::voltage_source(5.0, 0, 1),
                Element::inductor(1.0, 0, 1),
            ],
        )
        .unwrap();
        let err = reduce_steady_state(&c).unwrap_err();
        assert!(matches!(err, Error::InconsistentShort { voltage, .. } if voltage == 5.0));
    }

    #[test]
    fn no_sources_gives_singleton_components() {
        let c = Circuit::new(
            4,
            vec![Element::resistor(1.0, 0, 1), Element::resistor(1.0, 2, 3)],
        )
        .unwrap();
        let rc = reduce_steady_state(&c).unwrap();
        let basis = node_basis(&rc).unwrap();
        assert_eq!(basis.component_count(), 4);
        assert!(basis.components().iter().all(|m| m.len() == 1));
    }

    #[test]
    fn source_loop_consistency() {
        // Two 1 V sources in parallel with matching polarity: consistent.
        let ok = Circuit::new(
            2,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::voltage_source(1.0, 0, 1),
            ],
        )
        .unwrap();
        let rc = reduce_steady_state(&ok).unwrap();
        assert!(node_basis(&rc).is_ok());

        // Same loop with one source flipped: net 2 V around the cycle.
        let bad = Circuit::new(
            2,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::voltage_source(1.0, 1, 0),
            ],
        )
        .unwrap();
        let rc = reduce_steady_state(&bad).unwrap();
        assert!(matches!(
            node_basis(&rc).unwrap_err(),
            Error::InconsistentSourceLoop { .. }
        ));
    }

    #[test]
    fn single_loop_ohms_law() {
        let c = Circuit::new(
            2,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(2.0, 0, 1),
            ],
        )
        .unwrap();
        let state = solve_circuit(&c).unwrap();
        assert!(rel(state.branch_currents[0], 0.5) < 1e-12); // source carries 0.5 A
        assert!(rel(state.branch_currents[1], -0.5) < 1e-12); // resistor current flows 1 -> 0
        assert!(rel(state.total_loss, 0.5) < 1e-12);
        let rc = reduce_steady_state(&c).unwrap();
        assert!(max_kcl_residual(&rc, &state) < KCL_TOL);
    }

    #[test]
    fn circuit_without_resistors_has_zero_loss() {
        let c = Circuit::new(2, vec![Element::voltage_source(3.0, 0, 1)]).unwrap();
        let state = solve_circuit(&c).unwrap();
        assert_eq!(state.total_loss, 0.0);
        assert_eq!(total_loss(&state), 0.0);
    }

    #[test]
    fn potential_at_solution_equals_total_loss() {
        let c = Circuit::new(
            4,
            vec![
                Element::voltage_source(2.0, 0, 1),
                Element::resistor(1.0, 1, 2),
                Element::resistor(3.0, 2, 3),
                Element::voltage_source(1.0, 3, 0),
                Element::resistor(2.0, 1, 3),
            ],
        )
        .unwrap();
        let rc = reduce_steady_state(&c).unwrap();
        let basis = node_basis(&rc).unwrap();
        let state = solve_dc_with(&rc, &basis).unwrap();
        let p = evaluate_potential(&rc, &basis, &state.free_basis_voltages);
        assert!(rel(p, state.total_loss) < 1e-12);
        assert!(
            (state.total_loss - state.intra_component_loss - state.inter_component_loss).abs()
                < 1e-12 * state.total_loss.max(1.0)
        );
    }

    #[test]
    fn potential_increases_away_from_solution() {
        let c = Circuit::new(
            3,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(1.0, 1, 2),
                Element::resistor(2.0, 2, 0),
            ],
        )
        .unwrap();
        let rc = reduce_steady_state(&c).unwrap();
        let basis = node_basis(&rc).unwrap();
        let state = solve_dc_with(&rc, &basis).unwrap();
        let p0 = evaluate_potential(&rc, &basis, &state.free_basis_voltages);
        for delta in [1e-6, -1e-3, 0.25, -1.0] {
            let perturbed: Vec<f64> = state
                .free_basis_voltages
                .iter()
                .map(|v| v + delta)
                .collect();
            let p = evaluate_potential(&rc, &basis, &perturbed);
            assert!(p > p0, "potential must grow: {p} vs {p0}");
        }
    }

    #[test]
    fn zero_sources_zero_voltages_zero_potential() {
        let c = Circuit::new(
            3,
            vec![Element::resistor(1.0, 0, 1), Element::resistor(2.0, 1, 2)],
        )
        .unwrap();
        let rc = reduce_steady_state(&c).unwrap();
        let basis = node_basis(&rc).unwrap();
        let zeros = vec![0.0; basis.free_components().len()];
        assert_eq!(evaluate_potential(&rc, &basis, &zeros), 0.0);
        let state = solve_dc_with(&rc, &basis).unwrap();
        assert_eq!(state.total_loss, 0.0);
        assert_eq!(state.intra_component_loss, 0.0);
    }

    #[test]
    fn disconnected_circuit_gets_per_part_references() {
        // Two independent loops; each part must have a zero-voltage node.
        let c = Circuit::new(
            4,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(1.0, 0, 1),
                Element::voltage_source(2.0, 2, 3),
                Element::resistor(4.0, 2, 3),
            ],
        )
        .unwrap();
        let state = solve_circuit(&c).unwrap();
        assert_eq!(state.node_voltages[0], 0.0);
        assert_eq!(state.node_voltages[2], 0.0);
        assert!(rel(state.node_voltages[1], 1.0) < 1e-12);
        assert!(rel(state.node_voltages[3], 2.0) < 1e-12);
        assert!(rel(state.total_loss, 1.0 + 1.0) < 1e-12);
    }

    #[test]
    fn isolated_node_is_held_at_zero() {
        let c = Circuit::new(
            3,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(1.0, 0, 1),
            ],
        )
        .unwrap();
        let state = solve_circuit(&c).unwrap();
        assert_eq!(state.node_voltages[2], 0.0);
    }
}

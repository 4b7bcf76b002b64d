//! Graph data model for DC voltage-controlled circuits.
//!
//! A [`Circuit`] is a multigraph: nodes are integer ids `0..N` and every
//! element is a two-terminal branch between two distinct nodes. Parallel
//! branches are allowed. Values are immutable after construction; edits such
//! as [`Circuit::add_link`] return a new value.
//!
//! Sign conventions, used everywhere downstream:
//! * a voltage source with terminals `(a, b)` and value `E` raises the
//!   potential from `a` to `b`, i.e. `e_b - e_a = E`;
//! * branch current is positive when it flows from terminal `a` to `b`.

use serde::Deserialize;

use crate::error::{Error, Result};

/// Index of a circuit node, `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum ElementKind {
    #[serde(rename = "R")]
    Resistor,
    #[serde(rename = "V")]
    VoltageSource,
    #[serde(rename = "C")]
    Capacitor,
    #[serde(rename = "L")]
    Inductor,
}

impl ElementKind {
    fn letter(&self) -> char {
        match self {
            ElementKind::Resistor => 'R',
            ElementKind::VoltageSource => 'V',
            ElementKind::Capacitor => 'C',
            ElementKind::Inductor => 'L',
        }
    }
}

/// A two-terminal circuit element.
///
/// `value` is ohms for a resistor (strictly positive), signed volts for a
/// voltage source (oriented `a` to `b`), and farads/henries for capacitors
/// and inductors (the magnitude is irrelevant in DC steady state).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub kind: ElementKind,
    pub value: f64,
    pub a: NodeId,
    pub b: NodeId,
}

impl Element {
    pub fn resistor(ohms: f64, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Self {
        Element {
            kind: ElementKind::Resistor,
            value: ohms,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn voltage_source(volts: f64, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Self {
        Element {
            kind: ElementKind::VoltageSource,
            value: volts,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn capacitor(farads: f64, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Self {
        Element {
            kind: ElementKind::Capacitor,
            value: farads,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn inductor(henries: f64, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Self {
        Element {
            kind: ElementKind::Inductor,
            value: henries,
            a: a.into(),
            b: b.into(),
        }
    }

    fn validate(&self, index: usize, nodes: usize) -> Result<()> {
        for t in [self.a, self.b] {
            if t.0 >= nodes {
                return Err(Error::DanglingTerminal {
                    index,
                    node: t.0,
                    nodes,
                });
            }
        }
        if self.a == self.b {
            return Err(Error::SelfLoop {
                index,
                node: self.a.0,
            });
        }
        if !self.value.is_finite() {
            return Err(Error::NonfiniteValue {
                index,
                value: self.value,
            });
        }
        if self.kind == ElementKind::Resistor && self.value <= 0.0 {
            return Err(Error::NonpositiveResistance {
                index,
                value: self.value,
            });
        }
        Ok(())
    }

    /// One-line description, e.g. `R 2.5 (1->3)`.
    pub fn describe(&self) -> String {
        format!(
            "{} {} ({}->{})",
            self.kind.letter(),
            self.value,
            self.a,
            self.b
        )
    }
}

/// A validated circuit: `node_count` nodes and an ordered element list.
///
/// Element order is preserved by construction and edits; solved branch
/// currents are reported in this order. Connectivity is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    node_count: usize,
    elements: Vec<Element>,
}

impl Circuit {
    /// Build a circuit, validating every element against the node count.
    pub fn new(node_count: usize, elements: Vec<Element>) -> Result<Self> {
        for (index, e) in elements.iter().enumerate() {
            e.validate(index, node_count)?;
        }
        Ok(Circuit {
            node_count,
            elements,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Return a new circuit with the link's element appended; `self` is unchanged.
    pub fn add_link(&self, link: &LinkSpec) -> Result<Circuit> {
        let element = link.element();
        element.validate(self.elements.len(), self.node_count)?;
        let mut elements = self.elements.clone();
        elements.push(element);
        Ok(Circuit {
            node_count: self.node_count,
            elements,
        })
    }

    /// Parse the JSON circuit format:
    /// `{"nodes": N, "elements": [{"kind": "R"|"V"|"C"|"L", "value": f, "a": i, "b": j}, ...]}`.
    ///
    /// Unknown keys are rejected; element validation errors are reported as such.
    pub fn from_json_str(s: &str) -> Result<Circuit> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct CircuitFile {
            nodes: usize,
            elements: Vec<Element>,
        }
        let file: CircuitFile =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        Circuit::new(file.nodes, file.elements)
    }
}

/// A two-terminal addition between two existing nodes of a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: LinkKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkKind {
    Resistor { ohms: f64 },
    VoltageSource { volts: f64 },
}

impl LinkSpec {
    pub fn resistor(a: impl Into<NodeId>, b: impl Into<NodeId>, ohms: f64) -> Self {
        LinkSpec {
            a: a.into(),
            b: b.into(),
            kind: LinkKind::Resistor { ohms },
        }
    }

    pub fn voltage_source(a: impl Into<NodeId>, b: impl Into<NodeId>, volts: f64) -> Self {
        LinkSpec {
            a: a.into(),
            b: b.into(),
            kind: LinkKind::VoltageSource { volts },
        }
    }

    pub fn element(&self) -> Element {
        match self.kind {
            LinkKind::Resistor { ohms } => Element::resistor(ohms, self.a, self.b),
            LinkKind::VoltageSource { volts } => Element::voltage_source(volts, self.a, self.b),
        }
    }

    pub fn is_resistor(&self) -> bool {
        matches!(self.kind, LinkKind::Resistor { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_solvable_circuit_is_valid() {
        let c = Circuit::new(
            2,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(1.0, 0, 1),
            ],
        )
        .unwrap();
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.elements().len(), 2);
    }

    #[test]
    fn dangling_terminal_rejected() {
        let err = Circuit::new(5, vec![Element::resistor(1.0, 0, 7)]).unwrap_err();
        assert_eq!(
            err,
            Error::DanglingTerminal {
                index: 0,
                node: 7,
                nodes: 5
            }
        );
    }

    #[test]
    fn nonpositive_resistance_rejected() {
        let err = Circuit::new(2, vec![Element::resistor(0.0, 0, 1)]).unwrap_err();
        assert!(matches!(err, Error::NonpositiveResistance { .. }));
        let err = Circuit::new(2, vec![Element::resistor(-2.0, 0, 1)]).unwrap_err();
        assert!(matches!(err, Error::NonpositiveResistance { .. }));
    }

    #[test]
    fn element_order_and_values_preserved() {
        let elements = vec![
            Element::resistor(2.0, 1, 3),
            Element::voltage_source(-1.5, 0, 2),
            Element::capacitor(1e-6, 0, 3),
        ];
        let c = Circuit::new(4, elements.clone()).unwrap();
        assert_eq!(c.elements(), elements.as_slice());
    }

    #[test]
    fn add_link_appends_one_element_and_preserves_original() {
        let base = Circuit::new(
            3,
            vec![
                Element::voltage_source(1.0, 0, 1),
                Element::resistor(1.0, 1, 2),
            ],
        )
        .unwrap();
        let grown = base.add_link(&LinkSpec::resistor(0, 2, 0.5)).unwrap();
        assert_eq!(base.elements().len(), 2);
        assert_eq!(grown.elements().len(), 3);
        assert_eq!(&grown.elements()[..2], base.elements());
        assert_eq!(grown.elements()[2], Element::resistor(0.5, 0, 2));
    }

    #[test]
    fn add_link_allows_parallel_branches() {
        let base = Circuit::new(2, vec![Element::resistor(1.0, 0, 1)]).unwrap();
        let grown = base.add_link(&LinkSpec::resistor(0, 1, 2.0)).unwrap();
        assert_eq!(grown.elements().len(), 2);
    }

    #[test]
    fn add_link_rejects_self_loop() {
        let base = Circuit::new(2, vec![Element::resistor(1.0, 0, 1)]).unwrap();
        let err = base.add_link(&LinkSpec::resistor(1, 1, 2.0)).unwrap_err();
        assert!(matches!(err, Error::SelfLoop { .. }));
    }

    #[test]
    fn add_link_rejects_unknown_node() {
        let base = Circuit::new(2, vec![Element::resistor(1.0, 0, 1)]).unwrap();
        let err = base.add_link(&LinkSpec::resistor(0, 5, 2.0)).unwrap_err();
        assert!(matches!(err, Error::DanglingTerminal { node: 5, .. }));
    }

    #[test]
    fn json_round_trip_of_the_documented_format() {
        let s = r#"{
            "nodes": 4,
            "elements": [
                {"kind": "R", "value": 1.0, "a": 1, "b": 3},
                {"kind": "V", "value": 2.0, "a": 0, "b": 1},
                {"kind": "C", "value": 1e-6, "a": 2, "b": 3},
                {"kind": "L", "value": 0.5, "a": 0, "b": 2}
            ]
        }"#;
        let c = Circuit::from_json_str(s).unwrap();
        assert_eq!(c.node_count(), 4);
        assert_eq!(c.elements()[1], Element::voltage_source(2.0, 0, 1));
        assert_eq!(c.elements()[3].kind, ElementKind::Inductor);
    }

    #[test]
    fn json_unknown_keys_rejected() {
        let s = r#"{"nodes": 2, "elements": [], "comment": "x"}"#;
        assert!(matches!(
            Circuit::from_json_str(s).unwrap_err(),
            Error::Format(_)
        ));
        let s =
            r#"{"nodes": 2, "elements": [{"kind": "R", "value": 1.0, "a": 0, "b": 1, "x": 0}]}"#;
        assert!(matches!(
            Circuit::from_json_str(s).unwrap_err(),
            Error::Format(_)
        ));
    }

    #[test]
    fn json_validation_errors_surface_as_domain_errors() {
        let s = r#"{"nodes": 2, "elements": [{"kind": "R", "value": -1.0, "a": 0, "b": 1}]}"#;
        assert!(matches!(
            Circuit::from_json_str(s).unwrap_err(),
            Error::NonpositiveResistance { .. }
        ));
    }
}

//! Text netlists: named pressure nodes, components over them, pressure
//! sources and probes.
//!
//! One statement per line, `#` starts a comment, keywords are
//! case-insensitive while node and component names are case-sensitive:
//!
//! ```text
//! node <name>
//! supply <node> <kPa>            | supply <node> pwl <t0> <p0> <t1> <p1> ...
//! fst <name> <src> <drn> <gate> [p_close_start p_close_end p_reopen g_on g_off c_gate]
//! res <name> <n1> <n2> <g>
//! cap <name> <node> <c>
//! vent <name> <node> <g>
//! tactile <name> <n1> <n2> <g_open> events <t_on> <t_off> ...
//! wta <name> <node> <c> <gain> <tau>
//! probe <node>
//! ```
//!
//! `ATM` is the reserved atmosphere node. Nodes must be declared before use.

mod parse;
mod serialize;
mod validate;

pub use parse::{parse_netlist, parse_netlist_with_lines, SourceMap};
pub use serialize::serialize;
pub use validate::{validate, Diagnostic, Severity};

use thiserror::Error;

use crate::pneumatic::{FstParams, ParamError, TactileTube, WtaParams};
use crate::scalar::Scalar;

/// Reserved name of the atmosphere node (0 kPa gauge).
pub const ATM: &str = "ATM";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<NetlistError>,
    },
    #[error("invalid name {0:?}: names must be non-empty and contain no whitespace, '#' or ','")]
    InvalidName(String),
    #[error("{0:?} is reserved for the atmosphere node")]
    ReservedName(String),
    #[error("duplicate {kind} {name:?}")]
    Duplicate { kind: &'static str, name: String },
    #[error("undeclared node {0:?}")]
    UndeclaredNode(String),
    #[error("supply on atmosphere node")]
    SupplyOnAtmosphere,
    #[error("component {name:?}: {source}")]
    Param {
        name: String,
        #[source]
        source: ParamError,
    },
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

impl NetlistError {
    /// Line number for errors raised while parsing.
    pub fn line(&self) -> Option<usize> {
        match self {
            NetlistError::Syntax { line, .. } | NetlistError::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Pressure imposed on a supply node over time.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule<T> {
    Constant(T),
    /// Piecewise-linear `(time, kPa)` breakpoints, strictly increasing in
    /// time; held constant outside the breakpoint range.
    Pwl(Vec<(T, T)>),
}

impl<T: Scalar> Schedule<T> {
    pub fn at(&self, t: T) -> T {
        match self {
            Schedule::Constant(p) => *p,
            Schedule::Pwl(points) => {
                let (first, last) = (points[0], points[points.len() - 1]);
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = points.partition_point(|&(ti, _)| ti <= t);
                let (t0, p0) = points[k - 1];
                let (t1, p1) = points[k];
                p0 + (p1 - p0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Schedule::Constant(_) => true,
            Schedule::Pwl(points) => points.windows(2).all(|w| w[0].1 == w[1].1),
        }
    }

    fn check(&self) -> Result<(), NetlistError> {
        let vacuum = T::lit(crate::pneumatic::VACUUM_KPA);
        let ok_p = |p: T| p.is_finite() && p >= vacuum;
        match self {
            Schedule::Constant(p) if ok_p(*p) => Ok(()),
            Schedule::Constant(p) => Err(NetlistError::Schedule(format!("pressure {p} out of range"))),
            Schedule::Pwl(points) => {
                if points.is_empty() {
                    return Err(NetlistError::Schedule("pwl needs at least one point".into()));
                }
                if let Some(&(t, p)) = points.iter().find(|&&(t, p)| !t.is_finite() || !ok_p(p)) {
                    return Err(NetlistError::Schedule(format!("bad point ({t}, {p})")));
                }
                if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(NetlistError::Schedule("pwl times must be strictly increasing".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Supply<T> {
    pub node: String,
    pub schedule: Schedule<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind<T> {
    /// Sheet valve; source and drain are interchangeable.
    Fst {
        source: String,
        drain: String,
        gate: String,
        params: FstParams<T>,
    },
    Restrictor { a: String, b: String, g: T },
    /// Capacitance from `node` to atmosphere.
    Chamber { node: String, c: T },
    /// Restrictor from `node` to atmosphere.
    Vent { node: String, g: T },
    Tactile { a: String, b: String, tube: TactileTube<T> },
    WtaLoad { node: String, params: WtaParams<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component<T> {
    pub name: String,
    pub kind: ComponentKind<T>,
}

impl<T: Scalar> Component<T> {
    pub fn fst(name: &str, source: &str, drain: &str, gate: &str, params: FstParams<T>) -> Self {
        Self {
            name: name.into(),
            kind: ComponentKind::Fst {
                source: source.into(),
                drain: drain.into(),
                gate: gate.into(),
                params,
            },
        }
    }

    pub fn restrictor(name: &str, a: &str, b: &str, g: T) -> Self {
        Self {
            name: name.into(),
            kind: ComponentKind::Restrictor { a: a.into(), b: b.into(), g },
        }
    }

    pub fn chamber(name: &str, node: &str, c: T) -> Self {
        Self {
            name: name.into(),
            kind: ComponentKind::Chamber { node: node.into(), c },
        }
    }

    pub fn vent(name: &str, node: &str, g: T) -> Self {
        Self {
            name: name.into(),
            kind: ComponentKind::Vent { node: node.into(), g },
        }
    }

    pub fn tactile(name: &str, a: &str, b: &str, tube: TactileTube<T>) -> Self {
        Self {
            name: name.into(),
            kind: ComponentKind::Tactile { a: a.into(), b: b.into(), tube },
        }
    }

    pub fn wta(name: &str, node: &str, params: WtaParams<T>) -> Self {
        Self {
            name: name.into(),
            kind: ComponentKind::WtaLoad { node: node.into(), params },
        }
    }

    /// Terminal node names; single-node elements return only their node, the
    /// atmosphere side being implicit.
    pub fn terminals(&self) -> Vec<&str> {
        match &self.kind {
            ComponentKind::Fst { source, drain, gate, .. } => vec![source, drain, gate],
            ComponentKind::Restrictor { a, b, .. } | ComponentKind::Tactile { a, b, .. } => vec![a, b],
            ComponentKind::Chamber { node, .. }
            | ComponentKind::Vent { node, .. }
            | ComponentKind::WtaLoad { node, .. } => vec![node],
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self.kind {
            ComponentKind::Fst { .. } => "fst",
            ComponentKind::Restrictor { .. } => "res",
            ComponentKind::Chamber { .. } => "cap",
            ComponentKind::Vent { .. } => "vent",
            ComponentKind::Tactile { .. } => "tactile",
            ComponentKind::WtaLoad { .. } => "wta",
        }
    }

    pub fn is_fst(&self) -> bool {
        matches!(self.kind, ComponentKind::Fst { .. })
    }

    fn check_params(&self) -> Result<(), ParamError> {
        let positive = |what: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(ParamError::OutOfRange {
                    what,
                    rule: "finite and > 0",
                    value: v.to_f64().unwrap_or(f64::NAN),
                })
            }
        };
        match &self.kind {
            ComponentKind::Fst { params, .. } => params.validate(),
            ComponentKind::Restrictor { g, .. } => positive("restrictor conductance", *g),
            ComponentKind::Vent { g, .. } => positive("vent conductance", *g),
            ComponentKind::Chamber { c, .. } => positive("chamber capacitance", *c),
            ComponentKind::Tactile { tube, .. } => tube.validate(),
            ComponentKind::WtaLoad { params, .. } => params.validate(),
        }
    }
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == '#' || c == ',')
}

/// A fluidic circuit description.
///
/// Construction goes through the `add_*` methods, which enforce the
/// structural invariants: valid unique names, declared terminals and valid
/// element parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Netlist<T> {
    nodes: Vec<String>,
    components: Vec<Component<T>>,
    supplies: Vec<Supply<T>>,
    probes: Vec<String>,
}

impl<T: Scalar> Netlist<T> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            components: Vec::new(),
            supplies: Vec::new(),
            probes: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn supplies(&self) -> &[Supply<T>] {
        &self.supplies
    }

    pub fn probes(&self) -> &[String] {
        &self.probes
    }

    /// True for declared nodes and for `ATM`.
    pub fn has_node(&self, name: &str) -> bool {
        name == ATM || self.nodes.iter().any(|n| n == name)
    }

    pub fn component(&self, name: &str) -> Option<&Component<T>> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn supply(&self, node: &str) -> Option<&Supply<T>> {
        self.supplies.iter().find(|s| s.node == node)
    }

    pub fn fst_count(&self) -> usize {
        self.components.iter().filter(|c| c.is_fst()).count()
    }

    pub fn add_node(&mut self, name: &str) -> Result<(), NetlistError> {
        if name == ATM {
            return Err(NetlistError::ReservedName(name.into()));
        }
        if !valid_name(name) {
            return Err(NetlistError::InvalidName(name.into()));
        }
        if self.has_node(name) {
            return Err(NetlistError::Duplicate { kind: "node", name: name.into() });
        }
        self.nodes.push(name.into());
        Ok(())
    }

    pub fn add_supply(&mut self, node: &str, schedule: Schedule<T>) -> Result<(), NetlistError> {
        if node == ATM {
            return Err(NetlistError::SupplyOnAtmosphere);
        }
        if !self.has_node(node) {
            return Err(NetlistError::UndeclaredNode(node.into()));
        }
        if self.supply(node).is_some() {
            return Err(NetlistError::Duplicate { kind: "supply", name: node.into() });
        }
        schedule.check()?;
        self.supplies.push(Supply { node: node.into(), schedule });
        Ok(())
    }

    /// Replaces the schedule of an existing supply.
    pub fn set_supply(&mut self, node: &str, schedule: Schedule<T>) -> Result<(), NetlistError> {
        schedule.check()?;
        let supply = self
            .supplies
            .iter_mut()
            .find(|s| s.node == node)
            .ok_or_else(|| NetlistError::UndeclaredNode(node.into()))?;
        supply.schedule = schedule;
        Ok(())
    }

    pub fn add_component(&mut self, component: Component<T>) -> Result<(), NetlistError> {
        if !valid_name(&component.name) {
            return Err(NetlistError::InvalidName(component.name.clone()));
        }
        if self.component(&component.name).is_some() {
            return Err(NetlistError::Duplicate {
                kind: "component",
                name: component.name.clone(),
            });
        }
        if let Some(t) = component.terminals().into_iter().find(|t| !self.has_node(t)) {
            return Err(NetlistError::UndeclaredNode(t.to_string()));
        }
        component.check_params().map_err(|source| NetlistError::Param {
            name: component.name.clone(),
            source,
        })?;
        self.components.push(component);
        Ok(())
    }

    pub fn remove_component(&mut self, name: &str) -> Option<Component<T>> {
        let idx = self.components.iter().position(|c| c.name == name)?;
        Some(self.components.remove(idx))
    }

    pub fn add_probe(&mut self, node: &str) -> Result<(), NetlistError> {
        if !self.has_node(node) {
            return Err(NetlistError::UndeclaredNode(node.into()));
        }
        if self.probes.iter().any(|p| p == node) {
            return Err(NetlistError::Duplicate { kind: "probe", name: node.into() });
        }
        self.probes.push(node.into());
        Ok(())
    }

    /// Mutable access to a component's parameters for what-if edits; the
    /// kind and terminals are left alone by convention.
    pub fn component_mut(&mut self, name: &str) -> Option<&mut Component<T>> {
        self.components.iter_mut().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pwl_interpolates_and_holds() {
        let s = Schedule::Pwl(vec![(0.0f64, 0.0), (1.0, 70.0), (2.0, 0.0)]);
        assert_eq!(s.at(-1.0), 0.0);
        assert_eq!(s.at(0.5), 35.0);
        assert_eq!(s.at(1.0), 70.0);
        assert_eq!(s.at(1.5), 35.0);
        assert_eq!(s.at(9.0), 0.0);
        assert!(!s.is_constant());
        assert!(Schedule::Pwl(vec![(0.0f64, 5.0), (1.0, 5.0)]).is_constant());
    }

    #[test]
    fn builder_rejects_bad_structure() {
        let mut n = Netlist::<f64>::new();
        assert!(matches!(n.add_node("ATM"), Err(NetlistError::ReservedName(_))));
        assert!(matches!(n.add_node("a b"), Err(NetlistError::InvalidName(_))));
        n.add_node("a").unwrap();
        assert!(matches!(n.add_node("a"), Err(NetlistError::Duplicate { .. })));
        assert!(matches!(n.add_supply(ATM, Schedule::Constant(1.0)), Err(NetlistError::SupplyOnAtmosphere)));
        assert!(matches!(
            n.add_component(Component::restrictor("r", "a", "zz", 1.0)),
            Err(NetlistError::UndeclaredNode(_))
        ));
        assert!(matches!(
            n.add_component(Component::restrictor("r", "a", ATM, 0.0)),
            Err(NetlistError::Param { .. })
        ));
        n.add_component(Component::restrictor("r", "a", ATM, 1.0)).unwrap();
        assert!(matches!(
            n.add_component(Component::vent("r", "a", 1.0)),
            Err(NetlistError::Duplicate { .. })
        ));
        assert!(n.add_supply("a", Schedule::Pwl(vec![(1.0, 0.0), (1.0, 2.0)])).is_err());
    }
}

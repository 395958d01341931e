use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use super::{ComponentKind, Netlist, SourceMap, ATM};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    /// Node or component the diagnostic is about.
    pub subject: Option<String>,
    pub line: Option<usize>,
}

impl Diagnostic {
    fn new(severity: Severity, code: &'static str, subject: &str, message: String) -> Self {
        Self {
            severity,
            code,
            message,
            subject: Some(subject.to_string()),
            line: None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Fills in the line number from a parse source map.
    pub fn locate(mut self, map: &SourceMap) -> Self {
        if self.line.is_none() {
            self.line = self.subject.as_deref().and_then(|s| map.line_of(s));
        }
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.line {
            Some(line) => write!(f, "{sev}[{}] line {line}: {}", self.code, self.message),
            None => write!(f, "{sev}[{}]: {}", self.code, self.message),
        }
    }
}

/// Undirected adjacency over flow-carrying paths. `include_fst` selects
/// whether valve main paths count as edges.
fn adjacency<'a, T: Scalar>(netlist: &'a Netlist<T>, include_fst: bool) -> HashMap<&'a str, Vec<&'a str>> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut link = |a: &'a str, b: &'a str| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for c in netlist.components() {
        match &c.kind {
            ComponentKind::Fst { source, drain, .. } if include_fst => link(source, drain),
            ComponentKind::Restrictor { a, b, .. } | ComponentKind::Tactile { a, b, .. } => link(a, b),
            ComponentKind::Vent { node, .. } => link(node, ATM),
            _ => {}
        }
    }
    adj
}

/// Nodes reachable from `seeds` without passing through any node in `stop`
/// (stop nodes themselves are reached but not expanded).
fn reach<'a>(adj: &HashMap<&'a str, Vec<&'a str>>, seeds: &[&'a str], stop: &HashSet<&str>) -> HashSet<&'a str> {
    let mut seen: HashSet<&str> = seeds.iter().copied().collect();
    let mut queue: VecDeque<&str> = seeds.iter().copied().collect();
    while let Some(n) = queue.pop_front() {
        for &m in adj.get(n).into_iter().flatten() {
            if seen.insert(m) && !stop.contains(m) {
                queue.push_back(m);
            }
        }
    }
    seen
}

/// Checks that a structurally valid netlist can be simulated and flags
/// pressure regions that have no way to exhaust.
///
/// Errors: `NO-SUPPLY`, `UNREACHABLE-SUPPLY` (a supply that feeds nothing),
/// `UNDECLARED-NODE`, `UNDECLARED-PROBE`, `FLOATING-NODE` (no flow path to a
/// boundary). Warnings: `VENT-TRAP` (a valve gate or probed output with no
/// path to atmosphere except through valve main paths, so trapped air can
/// hold it high), `UNUSED-NODE`.
pub fn validate<T: Scalar>(netlist: &Netlist<T>) -> Vec<Diagnostic> {
    use Severity::*;
    let mut out = Vec::new();

    if netlist.supplies().is_empty() {
        out.push(Diagnostic {
            severity: Error,
            code: "NO-SUPPLY",
            message: "netlist has no supply; nothing drives the circuit".into(),
            subject: None,
            line: None,
        });
    }

    let mut used: HashSet<&str> = HashSet::new();
    for c in netlist.components() {
        for t in c.terminals() {
            used.insert(t);
            if !netlist.has_node(t) {
                out.push(Diagnostic::new(
                    Error,
                    "UNDECLARED-NODE",
                    &c.name,
                    format!("component {} uses undeclared node {t}", c.name),
                ));
            }
        }
    }
    for probe in netlist.probes() {
        if !netlist.has_node(probe) {
            out.push(Diagnostic::new(
                Error,
                "UNDECLARED-PROBE",
                probe,
                format!("probe on undeclared node {probe}"),
            ));
        }
    }
    for s in netlist.supplies() {
        if !used.contains(s.node.as_str()) {
            out.push(Diagnostic::new(
                Error,
                "UNREACHABLE-SUPPLY",
                &s.node,
                format!("supply on {} is not connected to any component", s.node),
            ));
        }
    }

    let boundaries: Vec<&str> = std::iter::once(ATM)
        .chain(netlist.supplies().iter().map(|s| s.node.as_str()))
        .collect();
    let boundary_set: HashSet<&str> = boundaries.iter().copied().collect();

    let full = adjacency(netlist, true);
    let grounded = reach(&full, &boundaries, &HashSet::new());
    for node in netlist.nodes() {
        let node = node.as_str();
        if boundary_set.contains(node) {
            continue;
        }
        if !used.contains(node) {
            out.push(Diagnostic::new(Warning, "UNUSED-NODE", node, format!("node {node} is not used")));
        } else if !grounded.contains(node) {
            out.push(Diagnostic::new(
                Error,
                "FLOATING-NODE",
                node,
                format!("node {node} has no flow path to a supply or the atmosphere"),
            ));
        }
    }

    // Paths to atmosphere through passive elements only. Supplies pin
    // their node, so the search does not cross them.
    let passive = adjacency(netlist, false);
    let supply_set: HashSet<&str> = netlist.supplies().iter().map(|s| s.node.as_str()).collect();
    let vented = reach(&passive, &[ATM], &supply_set);
    let mut flagged: HashSet<&str> = HashSet::new();
    let gates = netlist.components().iter().filter_map(|c| match &c.kind {
        ComponentKind::Fst { gate, .. } => Some((gate.as_str(), "gate")),
        _ => None,
    });
    let probes = netlist.probes().iter().map(|p| (p.as_str(), "output"));
    for (node, role) in gates.chain(probes) {
        if boundary_set.contains(node) || vented.contains(node) || !grounded.contains(node) {
            continue;
        }
        if flagged.insert(node) {
            out.push(Diagnostic::new(
                Warning,
                "VENT-TRAP",
                node,
                format!(
                    "{role} node {node} can only exhaust through valve main paths; \
                     residual air may hold it pressurised (add a vent)"
                ),
            ));
        }
    }
    out
}

use std::fmt::Write;

use super::{ComponentKind, Netlist, Schedule};
use crate::scalar::Scalar;

/// Canonical text form: a comment header, node declarations, supplies, one
/// line per component in declaration order, then probes. Numbers use the
/// shortest representation that parses back to the same value.
pub fn serialize<T: Scalar>(netlist: &Netlist<T>) -> String {
    let mut out = String::from("# fluidic netlist\n");
    for node in netlist.nodes() {
        writeln!(out, "node {node}").unwrap();
    }
    for supply in netlist.supplies() {
        match &supply.schedule {
            Schedule::Constant(p) => writeln!(out, "supply {} {p}", supply.node).unwrap(),
            Schedule::Pwl(points) => {
                write!(out, "supply {} pwl", supply.node).unwrap();
                for (t, p) in points {
                    write!(out, " {t} {p}").unwrap();
                }
                out.push('\n');
            }
        }
    }
    for c in netlist.components() {
        let name = &c.name;
        match &c.kind {
            ComponentKind::Fst { source, drain, gate, params: p } => writeln!(
                out,
                "fst {name} {source} {drain} {gate} {} {} {} {} {} {}",
                p.p_close_start, p.p_close_end, p.p_reopen, p.g_on, p.g_off, p.c_gate
            ),
            ComponentKind::Restrictor { a, b, g } => writeln!(out, "res {name} {a} {b} {g}"),
            ComponentKind::Chamber { node, c } => writeln!(out, "cap {name} {node} {c}"),
            ComponentKind::Vent { node, g } => writeln!(out, "vent {name} {node} {g}"),
            ComponentKind::Tactile { a, b, tube } => {
                write!(out, "tactile {name} {a} {b} {}", tube.g_open).unwrap();
                if !tube.contacts.is_empty() {
                    out.push_str(" events");
                    for (on, off) in &tube.contacts {
                        write!(out, " {on} {off}").unwrap();
                    }
                }
                writeln!(out)
            }
            ComponentKind::WtaLoad { node, params: p } => {
                writeln!(out, "wta {name} {node} {} {} {}", p.c_load, p.gain, p.tau)
            }
        }
        .unwrap();
    }
    for probe in netlist.probes() {
        writeln!(out, "probe {probe}").unwrap();
    }
    out
}

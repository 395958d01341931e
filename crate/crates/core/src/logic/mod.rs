//! Logic gates assembled from sheet valves, pressure-to-level mapping and
//! truth-table evaluation.

mod latch;
mod truth;

pub use latch::{check_latch, latch_both_high, LatchPhase, LatchTiming, LatchVerdict};
pub use truth::{
    evaluate_sequence, read_truth_table_csv, truth_table, truth_table_sequential, write_truth_table_csv, TruthRow,
    TruthTable,
};

use std::fmt;
use std::str::FromStr;

use crate::netlist::{Component, Netlist, NetlistError, Schedule, ATM};
use crate::pneumatic::{FstParams, BASELINE_SUPPLY_KPA};
use crate::scalar::Scalar;

/// Vent conductance used by the gate builders. Low enough that two open
/// valves in series still lift the output to 50 kPa from a 70 kPa supply.
pub const DEFAULT_GATE_VENT: f64 = 0.2;

/// Fraction of the supply at or above which a node reads High.
pub const HIGH_FRACTION: f64 = 0.6;
/// Fraction of the supply at or below which a node reads Low.
pub const LOW_FRACTION: f64 = 0.2;

pub const SUPPLY_NODE: &str = "VDD";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicLevel {
    Low,
    High,
    Undefined,
}

impl LogicLevel {
    pub fn from_bool(high: bool) -> Self {
        if high {
            LogicLevel::High
        } else {
            LogicLevel::Low
        }
    }

    pub fn symbol(self) -> char {
        match self {
            LogicLevel::High => 'H',
            LogicLevel::Low => 'L',
            LogicLevel::Undefined => 'U',
        }
    }
}

impl fmt::Display for LogicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for LogicLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" => Ok(LogicLevel::High),
            "L" => Ok(LogicLevel::Low),
            "U" => Ok(LogicLevel::Undefined),
            other => Err(format!("not a logic level: {other:?}")),
        }
    }
}

pub fn logic_level<T: Scalar>(p: T, p_supply: T) -> LogicLevel {
    if p >= T::lit(HIGH_FRACTION) * p_supply {
        LogicLevel::High
    } else if p <= T::lit(LOW_FRACTION) * p_supply {
        LogicLevel::Low
    } else {
        LogicLevel::Undefined
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Positive,
    Nor,
    Nand,
    Latch,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::Not,
        GateKind::Positive,
        GateKind::Nor,
        GateKind::Nand,
        GateKind::Latch,
    ];

    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            GateKind::Not | GateKind::Positive => &["A"],
            GateKind::Nor | GateKind::Nand => &["A", "B"],
            GateKind::Latch => &["S", "R"],
        }
    }

    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            GateKind::Latch => &["Q", "Qbar"],
            _ => &["Q"],
        }
    }

    /// Boolean function of a combinational gate; `None` for the latch.
    pub fn eval(self, inputs: &[bool]) -> Option<bool> {
        match self {
            GateKind::Not => Some(!inputs[0]),
            GateKind::Positive => Some(inputs[0]),
            GateKind::Nor => Some(!(inputs[0] || inputs[1])),
            GateKind::Nand => Some(!(inputs[0] && inputs[1])),
            GateKind::Latch => None,
        }
    }

    /// Names of the vents the builder inserts.
    pub fn vents(self) -> &'static [&'static str] {
        match self {
            GateKind::Positive => &["vent_M", "vent_Q"],
            GateKind::Latch => &["vent_Q", "vent_Qbar"],
            _ => &["vent_Q"],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Not => "not",
            GateKind::Positive => "positive",
            GateKind::Nor => "nor",
            GateKind::Nand => "nand",
            GateKind::Latch => "latch",
        };
        f.write_str(s)
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown gate {s:?} (expected not, positive, nor, nand or latch)"))
    }
}

/// Builds a gate driven from a 70 kPa supply.
pub fn build_gate<T: Scalar>(kind: GateKind, params: &FstParams<T>, g_vent: T) -> Result<Netlist<T>, NetlistError> {
    build_gate_with_supply(kind, params, g_vent, T::lit(BASELINE_SUPPLY_KPA))
}

/// Builds a gate netlist. Inputs are supply nodes initialised to 0 kPa,
/// outputs are probed, and every output and internal gate node is vented
/// through `g_vent`.
///
/// - `Not`: VDD → valve(A) → Q, Q vented.
/// - `Positive`: two inverters in cascade; the intermediate node M drives
///   the second valve's gate and has its own vent.
/// - `Nor`: VDD → valve(A) → X → valve(B) → Q, a single series path.
/// - `Nand`: VDD → valve(A) → Q and VDD → valve(B) → Q in parallel.
/// - `Latch`: two NOR paths, Q = NOR(R, Qbar) and Qbar = NOR(S, Q).
pub fn build_gate_with_supply<T: Scalar>(
    kind: GateKind,
    params: &FstParams<T>,
    g_vent: T,
    p_supply: T,
) -> Result<Netlist<T>, NetlistError> {
    let p = *params;
    let mut n = Netlist::new();
    let internal: &[&str] = match kind {
        GateKind::Not | GateKind::Nand => &[],
        GateKind::Positive => &["M"],
        GateKind::Nor => &["X"],
        GateKind::Latch => &["X1", "X2"],
    };
    n.add_node(SUPPLY_NODE)?;
    for node in kind.inputs().iter().chain(internal).chain(kind.outputs()) {
        n.add_node(node)?;
    }
    n.add_supply(SUPPLY_NODE, Schedule::Constant(p_supply))?;
    for input in kind.inputs() {
        n.add_supply(input, Schedule::Constant(T::zero()))?;
    }
    let mut add = |c: Component<T>| n.add_component(c);
    match kind {
        GateKind::Not => {
            add(Component::fst("fst_A", SUPPLY_NODE, "Q", "A", p))?;
            add(Component::vent("vent_Q", "Q", g_vent))?;
        }
        GateKind::Positive => {
            add(Component::fst("fst_A", SUPPLY_NODE, "M", "A", p))?;
            add(Component::vent("vent_M", "M", g_vent))?;
            add(Component::fst("fst_M", SUPPLY_NODE, "Q", "M", p))?;
            add(Component::vent("vent_Q", "Q", g_vent))?;
        }
        GateKind::Nor => {
            add(Component::fst("fst_A", SUPPLY_NODE, "X", "A", p))?;
            add(Component::fst("fst_B", "X", "Q", "B", p))?;
            add(Component::vent("vent_Q", "Q", g_vent))?;
        }
        GateKind::Nand => {
            add(Component::fst("fst_A", SUPPLY_NODE, "Q", "A", p))?;
            add(Component::fst("fst_B", SUPPLY_NODE, "Q", "B", p))?;
            add(Component::vent("vent_Q", "Q", g_vent))?;
        }
        GateKind::Latch => {
            add(Component::fst("fst_R", SUPPLY_NODE, "X1", "R", p))?;
            add(Component::fst("fst_Qbar", "X1", "Q", "Qbar", p))?;
            add(Component::vent("vent_Q", "Q", g_vent))?;
            add(Component::fst("fst_S", SUPPLY_NODE, "X2", "S", p))?;
            add(Component::fst("fst_Q", "X2", "Qbar", "Q", p))?;
            add(Component::vent("vent_Qbar", "Qbar", g_vent))?;
        }
    }
    for output in kind.outputs() {
        n.add_probe(output)?;
    }
    debug_assert!(n.has_node(ATM));
    Ok(n)
}

/// Square wave starting low, `cycles` full periods long, with linear edges
/// of duration `edge`.
pub fn square_wave<T: Scalar>(low: T, high: T, half_period: T, cycles: usize, edge: T) -> Schedule<T> {
    let mut points = vec![(T::zero(), low)];
    let mut level = low;
    for k in 1..2 * cycles {
        let t = T::from_usize(k).expect("cycle count fits scalar") * half_period;
        let next = if level == low { high } else { low };
        points.push((t, level));
        points.push((t + edge, next));
        level = next;
    }
    let end = T::from_usize(2 * cycles).expect("cycle count fits scalar") * half_period;
    points.push((end, level));
    Schedule::Pwl(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{validate, ComponentKind};

    fn gate(kind: GateKind) -> Netlist<f64> {
        build_gate(kind, &FstParams::baseline(), DEFAULT_GATE_VENT).unwrap()
    }

    fn count(n: &Netlist<f64>, pred: fn(&ComponentKind<f64>) -> bool) -> usize {
        n.components().iter().filter(|c| pred(&c.kind)).count()
    }

    #[test]
    fn levels() {
        assert_eq!(logic_level(50.0, 70.0), LogicLevel::High);
        assert_eq!(logic_level(0.0, 70.0), LogicLevel::Low);
        assert_eq!(logic_level(30.0, 70.0), LogicLevel::Undefined);
        assert_eq!(logic_level(42.0, 70.0), LogicLevel::High);
        assert_eq!(logic_level(14.0, 70.0), LogicLevel::Low);
    }

    #[test]
    fn component_counts() {
        let nor = gate(GateKind::Nor);
        assert_eq!(nor.fst_count(), 2);
        assert_eq!(count(&nor, |k| matches!(k, ComponentKind::Vent { .. })), 1);
        // one power supply plus the two input drivers
        assert_eq!(nor.supplies().iter().filter(|s| s.node == SUPPLY_NODE).count(), 1);

        let nand = gate(GateKind::Nand);
        assert_eq!(nand.fst_count(), 2);
        let sources: Vec<&str> = nand
            .components()
            .iter()
            .filter_map(|c| match &c.kind {
                ComponentKind::Fst { source, drain, .. } => Some((source.as_str(), drain.as_str())),
                _ => None,
            })
            .map(|(s, _)| s)
            .collect();
        assert_eq!(sources, vec![SUPPLY_NODE, SUPPLY_NODE]);

        let latch = gate(GateKind::Latch);
        assert_eq!(latch.fst_count(), 4);
        assert_eq!(latch.probes(), ["Q".to_string(), "Qbar".to_string()]);
    }

    #[test]
    fn builders_are_vent_clean() {
        for kind in GateKind::ALL {
            assert!(validate(&gate(kind)).is_empty(), "{kind}");
        }
    }

    #[test]
    fn gate_kind_names() {
        for kind in GateKind::ALL {
            assert_eq!(kind.to_string().parse::<GateKind>().unwrap(), kind);
        }
        assert!("xor".parse::<GateKind>().is_err());
    }

    #[test]
    fn square_wave_shape() {
        let s = square_wave(0.0f64, 70.0, 1.0, 2, 1e-3);
        assert_eq!(s.at(0.5), 0.0);
        assert_eq!(s.at(1.5), 70.0);
        assert_eq!(s.at(2.5), 0.0);
        assert_eq!(s.at(3.5), 70.0);
        assert_eq!(s.at(4.5), 70.0);
    }
}

use std::io::{Read, Write};

use super::{logic_level, LogicLevel};
use crate::netlist::{Netlist, Schedule};
use crate::scalar::Scalar;
use crate::solver::{steady_state_from, CsvError, SimState, SolverConfig, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow<T> {
    pub inputs: Vec<LogicLevel>,
    pub outputs: Vec<LogicLevel>,
    /// Settled output pressures, kPa.
    pub pressures: Vec<T>,
}

/// Steady-state logic mapping; rows are in binary counting order with the
/// first input as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable<T> {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<TruthRow<T>>,
}

impl<T: Scalar> TruthTable<T> {
    pub fn output_for(&self, inputs: &[LogicLevel]) -> Option<&[LogicLevel]> {
        self.rows.iter().find(|r| r.inputs == inputs).map(|r| r.outputs.as_slice())
    }

    pub fn undefined_count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| &r.outputs)
            .filter(|&&l| l == LogicLevel::Undefined)
            .count()
    }
}

fn binary_rows(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n)
        .map(|k| (0..n).map(|bit| k >> (n - 1 - bit) & 1 == 1).collect())
        .collect()
}

/// Drive level of the logic inputs: the highest constant supply that is
/// not itself an input.
fn drive_level<T: Scalar>(netlist: &Netlist<T>, inputs: &[&str]) -> Result<T, SolverError> {
    netlist
        .supplies()
        .iter()
        .filter(|s| !inputs.contains(&s.node.as_str()))
        .filter_map(|s| match s.schedule {
            Schedule::Constant(p) => Some(p),
            _ => None,
        })
        .fold(None, |best: Option<T>, p| Some(best.map_or(p, |b| b.max(p))))
        .filter(|&p| p > T::zero())
        .ok_or(SolverError::NoPowerSupply)
}

/// Applies each input combination in turn and records the settled outputs.
/// With `carry_state` the circuit keeps its pressures and valve memories
/// between rows; otherwise every row starts from the unpowered state.
pub fn evaluate_sequence<T: Scalar>(
    netlist: &Netlist<T>,
    inputs: &[&str],
    outputs: &[&str],
    cfg: &SolverConfig<T>,
    sequence: &[Vec<bool>],
    carry_state: bool,
) -> Result<Vec<TruthRow<T>>, SolverError> {
    let p_supply = drive_level(netlist, inputs)?;
    for port in inputs {
        if netlist.supply(port).is_none() {
            return Err(SolverError::Port(port.to_string()));
        }
    }
    let mut state = SimState::default();
    let mut rows = Vec::with_capacity(sequence.len());
    for levels in sequence {
        let mut circuit = netlist.clone();
        for (port, &high) in inputs.iter().zip(levels) {
            let p = if high { p_supply } else { T::zero() };
            circuit
                .set_supply(port, Schedule::Constant(p))
                .map_err(|_| SolverError::Port(port.to_string()))?;
        }
        let start = if carry_state { state.clone() } else { SimState::default() };
        let settled = steady_state_from(&circuit, cfg, &start)?;
        let mut pressures = Vec::with_capacity(outputs.len());
        for port in outputs {
            let p = *settled
                .pressures
                .get(*port)
                .ok_or_else(|| SolverError::Port(port.to_string()))?;
            pressures.push(p);
        }
        rows.push(TruthRow {
            inputs: levels.iter().map(|&h| LogicLevel::from_bool(h)).collect(),
            outputs: pressures.iter().map(|&p| logic_level(p, p_supply)).collect(),
            pressures,
        });
        state = settled.state;
    }
    Ok(rows)
}

/// Evaluates every input combination from a fresh, unpowered circuit.
pub fn truth_table<T: Scalar>(
    netlist: &Netlist<T>,
    inputs: &[&str],
    outputs: &[&str],
    cfg: &SolverConfig<T>,
) -> Result<TruthTable<T>, SolverError> {
    let rows = evaluate_sequence(netlist, inputs, outputs, cfg, &binary_rows(inputs.len()), false)?;
    Ok(TruthTable {
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// Like [`truth_table`] but walks the rows in order on one circuit, so that
/// state left over from earlier rows (trapped air, latched valves) shows.
pub fn truth_table_sequential<T: Scalar>(
    netlist: &Netlist<T>,
    inputs: &[&str],
    outputs: &[&str],
    cfg: &SolverConfig<T>,
) -> Result<TruthTable<T>, SolverError> {
    let rows = evaluate_sequence(netlist, inputs, outputs, cfg, &binary_rows(inputs.len()), true)?;
    Ok(TruthTable {
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// One column per port (inputs then outputs), values `H`, `L` or `U`.
pub fn write_truth_table_csv<T: Scalar, W: Write>(table: &TruthTable<T>, out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.inputs.iter().chain(&table.outputs))?;
    for row in &table.rows {
        w.write_record(row.inputs.iter().chain(&row.outputs).map(|l| l.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a truth-table CSV; the first `n_inputs` columns are inputs.
/// Output pressures are not stored in the file and come back empty.
pub fn read_truth_table_csv<T: Scalar, R: Read>(input: R, n_inputs: usize) -> Result<TruthTable<T>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if n_inputs > header.len() {
        return Err(CsvError::Format {
            row: 0,
            message: format!("{n_inputs} inputs but only {} columns", header.len()),
        });
    }
    let names: Vec<String> = header.iter().map(String::from).collect();
    let mut table = TruthTable {
        inputs: names[..n_inputs].to_vec(),
        outputs: names[n_inputs..].to_vec(),
        rows: Vec::new(),
    };
    for (k, record) in r.records().enumerate() {
        let levels = record?
            .iter()
            .map(|s| s.parse::<LogicLevel>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|message| CsvError::Format { row: k + 1, message })?;
        table.rows.push(TruthRow {
            inputs: levels[..n_inputs].to_vec(),
            outputs: levels[n_inputs..].to_vec(),
            pressures: Vec::new(),
        });
    }
    Ok(table)
}

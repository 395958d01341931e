//! Index-based form of a netlist used by the nodal solver.

use std::collections::HashMap;

use super::linalg::Dense;
use super::SolverError;
use crate::netlist::{ComponentKind, Netlist, Schedule, ATM};
use crate::pneumatic::{fst_conductance, tactile_conductance, FstParams, FstState, TactileTube, WtaParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub(crate) enum Law<T> {
    Fixed(T),
    Valve(usize),
    Tube(TactileTube<T>),
}

#[derive(Debug, Clone)]
pub(crate) struct Branch<T> {
    pub a: usize,
    pub b: usize,
    pub law: Law<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct Valve<T> {
    pub name: String,
    pub gate: usize,
    pub params: FstParams<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct Wta<T> {
    pub name: String,
    pub node: usize,
    pub params: WtaParams<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Mode<T> {
    /// Purely resistive balance; capacitances ignored.
    Static,
    /// Capacitive nodes held at their previous pressures.
    Pinned,
    /// Backward-Euler step of the given length.
    Transient(T),
}

#[derive(Debug, Clone)]
pub(crate) struct Circuit<T> {
    pub names: Vec<String>,
    pub index: HashMap<String, usize>,
    pub boundary: Vec<Option<Schedule<T>>>,
    pub cap: Vec<T>,
    pub branches: Vec<Branch<T>>,
    pub valves: Vec<Valve<T>>,
    pub wtas: Vec<Wta<T>>,
    pub probes: Vec<usize>,
}

impl<T: Scalar> Circuit<T> {
    pub fn compile(netlist: &Netlist<T>) -> Result<Self, SolverError> {
        let names: Vec<String> = std::iter::once(ATM.to_string())
            .chain(netlist.nodes().iter().cloned())
            .collect();
        let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let at = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| SolverError::UnknownNode(name.to_string()))
        };
        let mut boundary = vec![None; names.len()];
        boundary[0] = Some(Schedule::Constant(T::zero()));
        for s in netlist.supplies() {
            boundary[at(&s.node)?] = Some(s.schedule.clone());
        }
        let mut cap = vec![T::zero(); names.len()];
        let mut branches = Vec::new();
        let mut valves = Vec::new();
        let mut wtas = Vec::new();
        for c in netlist.components() {
            match &c.kind {
                ComponentKind::Fst { source, drain, gate, params } => {
                    let gate = at(gate)?;
                    cap[gate] = cap[gate] + params.c_gate;
                    branches.push(Branch {
                        a: at(source)?,
                        b: at(drain)?,
                        law: Law::Valve(valves.len()),
                    });
                    valves.push(Valve {
                        name: c.name.clone(),
                        gate,
                        params: *params,
                    });
                }
                ComponentKind::Restrictor { a, b, g } => branches.push(Branch {
                    a: at(a)?,
                    b: at(b)?,
                    law: Law::Fixed(*g),
                }),
                ComponentKind::Vent { node, g } => branches.push(Branch {
                    a: at(node)?,
                    b: 0,
                    law: Law::Fixed(*g),
                }),
                ComponentKind::Tactile { a, b, tube } => branches.push(Branch {
                    a: at(a)?,
                    b: at(b)?,
                    law: Law::Tube(tube.clone()),
                }),
                ComponentKind::Chamber { node, c } => {
                    let i = at(node)?;
                    cap[i] = cap[i] + *c;
                }
                ComponentKind::WtaLoad { node, params } => {
                    let i = at(node)?;
                    cap[i] = cap[i] + params.c_load;
                    wtas.push(Wta {
                        name: c.name.clone(),
                        node: i,
                        params: *params,
                    });
                }
            }
        }
        let probes = netlist.probes().iter().map(|p| at(p)).collect::<Result<_, _>>()?;
        Ok(Self {
            names,
            index,
            boundary,
            cap,
            branches,
            valves,
            wtas,
            probes,
        })
    }

    pub fn conductance(&self, branch: &Branch<T>, t: T, states: &[FstState<T>]) -> T {
        match &branch.law {
            Law::Fixed(g) => *g,
            Law::Valve(k) => fst_conductance(&self.valves[*k].params, &states[*k]).value(),
            Law::Tube(tube) => tactile_conductance(tube, t).value(),
        }
    }

    fn is_fixed(&self, node: usize, mode: Mode<T>) -> bool {
        self.boundary[node].is_some() || (mode == Mode::Pinned && self.cap[node] > T::zero())
    }

    /// Solves the nodal balance at time `t`. `prev` holds the pressures at
    /// the previous instant (used by capacitive terms and pinned nodes).
    pub fn solve(&self, mode: Mode<T>, t: T, states: &[FstState<T>], prev: &[T]) -> Result<Vec<T>, SolverError> {
        let n = self.names.len();
        let mut p = prev.to_vec();
        let mut row = vec![usize::MAX; n];
        let mut unknowns = Vec::new();
        for i in 0..n {
            if let Some(s) = &self.boundary[i] {
                p[i] = s.at(t);
            } else if !self.is_fixed(i, mode) {
                row[i] = unknowns.len();
                unknowns.push(i);
            }
        }
        if unknowns.is_empty() {
            return Ok(p);
        }
        let mut a = Dense::zeros(unknowns.len());
        let mut rhs = vec![T::zero(); unknowns.len()];
        for br in &self.branches {
            let g = self.conductance(br, t, states);
            let (ra, rb) = (row[br.a], row[br.b]);
            match (ra != usize::MAX, rb != usize::MAX) {
                (true, true) => {
                    a.add(ra, ra, g);
                    a.add(rb, rb, g);
                    a.add(ra, rb, -g);
                    a.add(rb, ra, -g);
                }
                (true, false) => {
                    a.add(ra, ra, g);
                    rhs[ra] = rhs[ra] + g * p[br.b];
                }
                (false, true) => {
                    a.add(rb, rb, g);
                    rhs[rb] = rhs[rb] + g * p[br.a];
                }
                (false, false) => {}
            }
        }
        if let Mode::Transient(dt) = mode {
            for (r, &i) in unknowns.iter().enumerate() {
                let k = self.cap[i] / dt;
                a.add(r, r, k);
                rhs[r] = rhs[r] + k * prev[i];
            }
        }
        let x = a
            .solve(rhs)
            .map_err(|col| SolverError::Singular(self.names[unknowns[col]].clone()))?;
        for (r, &i) in unknowns.iter().enumerate() {
            p[i] = x[r];
        }
        Ok(p)
    }

    /// Net inflow at every free node (capacitive charging counted as
    /// outflow) and the sum of its incident conductances.
    pub fn imbalance(&self, mode: Mode<T>, t: T, states: &[FstState<T>], p: &[T], prev: &[T]) -> Vec<(usize, T, T)> {
        let n = self.names.len();
        let mut net = vec![T::zero(); n];
        let mut gsum = vec![T::zero(); n];
        for br in &self.branches {
            let g = self.conductance(br, t, states);
            let q = g * (p[br.a] - p[br.b]);
            net[br.a] = net[br.a] - q;
            net[br.b] = net[br.b] + q;
            gsum[br.a] = gsum[br.a] + g;
            gsum[br.b] = gsum[br.b] + g;
        }
        (0..n)
            .filter(|&i| !self.is_fixed(i, mode))
            .map(|i| {
                let charge = match mode {
                    Mode::Transient(dt) => self.cap[i] * (p[i] - prev[i]) / dt,
                    _ => T::zero(),
                };
                (i, net[i] - charge, gsum[i])
            })
            .collect()
    }
}

use std::collections::{BTreeMap, VecDeque};

use super::circuit::{Circuit, Mode};
use super::{SolverConfig, SolverError, Waveform};
use crate::netlist::{validate, Netlist};
use crate::pneumatic::{closure_step, FstState, Pressure, WtaActuator};
use crate::scalar::Scalar;

/// Length of the window over which steady state is judged, s.
const STEADY_WINDOW_S: f64 = 0.1;

/// Dynamic state of a circuit: free-node pressures, valve memories and
/// actuator elongations, keyed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimState<T> {
    pub pressures: BTreeMap<String, T>,
    pub valves: BTreeMap<String, FstState<T>>,
    pub elongations: BTreeMap<String, T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState<T> {
    /// Pressure of every node, boundaries included.
    pub pressures: BTreeMap<String, T>,
    pub valves: BTreeMap<String, FstState<T>>,
    /// Time at which the probes were judged settled.
    pub time: T,
    /// Full state, usable as the starting point of a later run.
    pub state: SimState<T>,
}

/// Time-stepping engine for one netlist. Owns all of its state.
#[derive(Debug, Clone)]
pub struct Simulator<T: Scalar> {
    circuit: Circuit<T>,
    cfg: SolverConfig<T>,
    steps: usize,
    pressures: Vec<T>,
    prev: Vec<T>,
    valves: Vec<FstState<T>>,
    solved_with: Vec<FstState<T>>,
    actuators: Vec<WtaActuator<T>>,
}

impl<T: Scalar> Simulator<T> {
    /// Starts from the unpowered condition: free nodes at 0 kPa, all valves
    /// open, actuators at rest.
    pub fn new(netlist: &Netlist<T>, cfg: SolverConfig<T>) -> Result<Self, SolverError> {
        Self::with_state(netlist, cfg, &SimState::default())
    }

    /// Starts from a saved state; anything missing from it takes the
    /// unpowered default.
    pub fn with_state(netlist: &Netlist<T>, cfg: SolverConfig<T>, state: &SimState<T>) -> Result<Self, SolverError> {
        cfg.check()?;
        let diags: Vec<_> = validate(netlist).into_iter().filter(|d| d.is_error()).collect();
        if !diags.is_empty() {
            return Err(SolverError::Invalid(diags));
        }
        let circuit = Circuit::compile(netlist)?;
        let pressures: Vec<T> = circuit
            .names
            .iter()
            .map(|n| state.pressures.get(n).copied().unwrap_or_else(T::zero))
            .collect();
        let valves: Vec<FstState<T>> = circuit
            .valves
            .iter()
            .map(|v| state.valves.get(&v.name).copied().unwrap_or_default())
            .collect();
        let actuators = circuit
            .wtas
            .iter()
            .map(|w| WtaActuator {
                params: w.params,
                elongation: state.elongations.get(&w.name).copied().unwrap_or_else(T::zero),
            })
            .collect();
        let mut sim = Self {
            circuit,
            cfg,
            steps: 0,
            prev: pressures.clone(),
            pressures,
            solved_with: valves.clone(),
            valves,
            actuators,
        };
        // consistent initial point: stored charges kept, algebraic nodes solved
        let (p, solved_with, next) = sim.converge(Mode::Pinned, T::zero())?;
        sim.prev = p.clone();
        sim.pressures = p;
        sim.solved_with = solved_with;
        sim.valves = next;
        Ok(sim)
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.cfg
    }

    pub fn time(&self) -> T {
        T::from_usize(self.steps).expect("step count fits scalar") * self.cfg.dt
    }

    pub fn pressure(&self, node: &str) -> Option<T> {
        self.circuit.index.get(node).map(|&i| self.pressures[i])
    }

    pub fn valve(&self, name: &str) -> Option<&FstState<T>> {
        let k = self.circuit.valves.iter().position(|v| v.name == name)?;
        Some(&self.valves[k])
    }

    pub fn elongation(&self, actuator: &str) -> Option<T> {
        let k = self.circuit.wtas.iter().position(|w| w.name == actuator)?;
        Some(self.actuators[k].elongation)
    }

    pub fn snapshot(&self) -> SimState<T> {
        let c = &self.circuit;
        SimState {
            pressures: c
                .names
                .iter()
                .zip(&self.pressures)
                .filter(|(n, _)| c.boundary[c.index[*n]].is_none())
                .map(|(n, &p)| (n.clone(), p))
                .collect(),
            valves: c.valves.iter().zip(&self.valves).map(|(v, s)| (v.name.clone(), *s)).collect(),
            elongations: c
                .wtas
                .iter()
                .zip(&self.actuators)
                .map(|(w, a)| (w.name.clone(), a.elongation))
                .collect(),
        }
    }

    /// Every node pressure, boundaries included.
    pub fn node_pressures(&self) -> BTreeMap<String, T> {
        self.circuit.names.iter().cloned().zip(self.pressures.iter().copied()).collect()
    }

    /// Residual flow balance of the last step at every free node:
    /// `(node, net inflow in mL/s, sum of incident conductances)`.
    pub fn flow_imbalance(&self) -> Vec<(String, T, T)> {
        let mode = if self.steps == 0 { Mode::Pinned } else { Mode::Transient(self.cfg.dt) };
        self.circuit
            .imbalance(mode, self.time(), &self.solved_with, &self.pressures, &self.prev)
            .into_iter()
            .map(|(i, q, g)| (self.circuit.names[i].clone(), q, g))
            .collect()
    }

    fn hysteresis(&self, base: &[FstState<T>], p: &[T]) -> Vec<FstState<T>> {
        self.circuit
            .valves
            .iter()
            .zip(base)
            .map(|(v, s)| closure_step(*s, &v.params, Pressure::new(p[v.gate]).unwrap_or_default()))
            .collect()
    }

    /// Picard loop: conductances from the candidate valve states, one
    /// linear solve, then the hysteresis update from the step-start states.
    /// Returns the pressures, the states they were solved with, and the
    /// updated states.
    #[allow(clippy::type_complexity)]
    fn converge(&self, mode: Mode<T>, t: T) -> Result<(Vec<T>, Vec<FstState<T>>, Vec<FstState<T>>), SolverError> {
        let base = &self.valves;
        let mut candidate = base.clone();
        let mut last: Option<Vec<T>> = None;
        for _ in 0..self.cfg.max_iters {
            let p = self.circuit.solve(mode, t, &candidate, &self.pressures)?;
            let next = self.hysteresis(base, &p);
            let settled = next == candidate
                || last.as_ref().is_some_and(|l| {
                    l.iter().zip(&p).all(|(a, b)| (*a - *b).abs() < self.cfg.tol)
                });
            if settled {
                return Ok((p, candidate, next));
            }
            last = Some(p);
            candidate = next;
        }
        Err(SolverError::NonConvergence {
            time: t.to_f64().unwrap_or(f64::NAN),
        })
    }

    /// Advances one backward-Euler step.
    pub fn step(&mut self) -> Result<(), SolverError> {
        let t = T::from_usize(self.steps + 1).expect("step count fits scalar") * self.cfg.dt;
        let (p, solved_with, next) = self.converge(Mode::Transient(self.cfg.dt), t)?;
        for (act, w) in self.actuators.iter_mut().zip(&self.circuit.wtas) {
            act.advance(Pressure::new(p[w.node]).unwrap_or_default(), self.cfg.dt);
        }
        self.prev = std::mem::replace(&mut self.pressures, p);
        self.solved_with = solved_with;
        self.valves = next;
        self.steps += 1;
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn step_count(&self) -> usize {
        let ratio = self.cfg.t_end / self.cfg.dt;
        let n = (ratio - T::lit(1.0e-9)).ceil();
        n.to_usize().unwrap_or(0)
    }

    fn empty_waveform(&self) -> Waveform<T> {
        let c = &self.circuit;
        Waveform {
            times: Vec::new(),
            probes: c.probes.iter().map(|&i| c.names[i].clone()).collect(),
            pressures: vec![Vec::new(); c.probes.len()],
            valves: c.valves.iter().map(|v| v.name.clone()).collect(),
            lambdas: vec![Vec::new(); c.valves.len()],
            actuators: c.wtas.iter().map(|w| w.name.clone()).collect(),
            elongations: vec![Vec::new(); c.wtas.len()],
        }
    }

    fn record(&self, wave: &mut Waveform<T>) {
        wave.times.push(self.time());
        for (series, &i) in wave.pressures.iter_mut().zip(&self.circuit.probes) {
            series.push(self.pressures[i]);
        }
        for (series, s) in wave.lambdas.iter_mut().zip(&self.valves) {
            series.push(s.lambda);
        }
        for (series, a) in wave.elongations.iter_mut().zip(&self.actuators) {
            series.push(a.elongation);
        }
    }

    /// Runs to the configured horizon, recording every step (including the
    /// initial point).
    pub fn run(&mut self) -> Result<Waveform<T>, SolverError> {
        let mut wave = self.empty_waveform();
        self.record(&mut wave);
        for _ in 0..self.step_count() {
            self.step()?;
            self.record(&mut wave);
        }
        Ok(wave)
    }

    fn watched(&self) -> Vec<T> {
        let c = &self.circuit;
        let nodes: Vec<usize> = if c.probes.is_empty() {
            (0..c.names.len()).collect()
        } else {
            c.probes.clone()
        };
        nodes
            .into_iter()
            .map(|i| self.pressures[i])
            .chain(self.valves.iter().map(|s| s.lambda))
            .collect()
    }
}

/// Transient simulation from the unpowered state over `cfg.t_end`.
pub fn simulate<T: Scalar>(netlist: &Netlist<T>, cfg: &SolverConfig<T>) -> Result<Waveform<T>, SolverError> {
    Simulator::new(netlist, *cfg)?.run()
}

/// Resistive solution for prescribed valve closures (missing valves are
/// open). Sources are evaluated at `t = 0`.
pub fn solve_static<T: Scalar>(
    netlist: &Netlist<T>,
    lambdas: &BTreeMap<String, T>,
) -> Result<BTreeMap<String, T>, SolverError> {
    let circuit = Circuit::compile(netlist)?;
    if let Some(name) = lambdas.keys().find(|k| !circuit.valves.iter().any(|v| &v.name == *k)) {
        return Err(SolverError::UnknownValve(name.clone()));
    }
    let states: Vec<FstState<T>> = circuit
        .valves
        .iter()
        .map(|v| {
            let lambda = lambdas.get(&v.name).copied().unwrap_or_else(T::zero).max(T::zero()).min(T::one());
            FstState {
                branch: crate::pneumatic::Branch::OpenBranch,
                lambda,
                lambda_max_seen: lambda,
            }
        })
        .collect();
    let zeros = vec![T::zero(); circuit.names.len()];
    let p = circuit.solve(Mode::Static, T::zero(), &states, &zeros)?;
    Ok(circuit.names.into_iter().zip(p).collect())
}

/// Runs from the unpowered state until every probe pressure and valve
/// closure changes by less than `cfg.tol` over a 0.1 s window.
pub fn steady_state<T: Scalar>(netlist: &Netlist<T>, cfg: &SolverConfig<T>) -> Result<SteadyState<T>, SolverError> {
    steady_state_from(netlist, cfg, &SimState::default())
}

pub fn steady_state_from<T: Scalar>(
    netlist: &Netlist<T>,
    cfg: &SolverConfig<T>,
    initial: &SimState<T>,
) -> Result<SteadyState<T>, SolverError> {
    if let Some(s) = netlist.supplies().iter().find(|s| !s.schedule.is_constant()) {
        return Err(SolverError::TimeVaryingSource(s.node.clone()));
    }
    let mut sim = Simulator::with_state(netlist, *cfg, initial)?;
    let window = (T::lit(STEADY_WINDOW_S) / cfg.dt).round().to_usize().unwrap_or(1).max(1);
    let mut history: VecDeque<Vec<T>> = VecDeque::with_capacity(window + 1);
    history.push_back(sim.watched());
    let total = sim.step_count();
    for _ in 0..total {
        sim.step()?;
        history.push_back(sim.watched());
        if history.len() > window + 1 {
            history.pop_front();
        }
        if history.len() == window + 1 {
            let (old, new) = (&history[0], &history[window]);
            if old.iter().zip(new).all(|(a, b)| (*a - *b).abs() < cfg.tol) {
                return Ok(SteadyState {
                    pressures: sim.node_pressures(),
                    valves: sim.snapshot().valves,
                    time: sim.time(),
                    state: sim.snapshot(),
                });
            }
        }
    }
    Err(SolverError::NoSteadyState {
        t_end: cfg.t_end.to_f64().unwrap_or(f64::NAN),
    })
}

//! Nodal analysis of fluidic networks.
//!
//! Supplies and the atmosphere are fixed-pressure boundaries. Every other
//! node satisfies flow conservation; nodes carrying capacitance (chambers,
//! valve gates, actuator loads) integrate their charge with backward Euler,
//! the rest are algebraic. Within each step the valve conductances are
//! Picard-iterated against the hysteresis rule until the pressures settle.

mod circuit;
mod export;
mod linalg;
mod sim;

pub use export::{format_sig, read_waveform_csv, write_waveform_csv, CsvError};
pub use sim::{simulate, solve_static, steady_state, steady_state_from, SimState, Simulator, SteadyState};

use thiserror::Error;

use crate::netlist::Diagnostic;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Time step, s.
    pub dt: T,
    /// Simulation horizon, s.
    pub t_end: T,
    /// Fixed-point tolerance on node pressures, kPa.
    pub tol: T,
    /// Picard iteration cap per step.
    pub max_iters: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(1.0e-3),
            t_end: T::lit(20.0),
            tol: T::default_tol(),
            max_iters: 100,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_horizon(t_end: T) -> Self {
        Self {
            t_end,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::Config(what.to_string()));
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return bad("dt must be positive");
        }
        if !(self.tol > T::zero()) {
            return bad("tol must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return bad("t_end must be finite and non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("netlist has errors: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("port {0:?} is not a supply-driven input or a node of the circuit")]
    Port(String),
    #[error("no constant power supply besides the logic inputs")]
    NoPowerSupply,
    #[error("unknown valve {0:?}")]
    UnknownValve(String),
    #[error("singular nodal system: node {0:?} is isolated from every boundary")]
    Singular(String),
    #[error("Picard iteration did not converge at t = {time} s")]
    NonConvergence { time: f64 },
    #[error("no steady state reached by t = {t_end} s")]
    NoSteadyState { t_end: f64 },
    #[error("steady-state analysis needs constant sources; supply {0:?} varies in time")]
    TimeVaryingSource(String),
}

/// Sampled probe pressures plus valve closure and actuator elongation.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<T> {
    pub times: Vec<T>,
    pub probes: Vec<String>,
    /// One series per probe, aligned with `times`.
    pub pressures: Vec<Vec<T>>,
    pub valves: Vec<String>,
    pub lambdas: Vec<Vec<T>>,
    pub actuators: Vec<String>,
    pub elongations: Vec<Vec<T>>,
}

impl<T: Scalar> Waveform<T> {
    pub fn series(&self, probe: &str) -> Option<&[T]> {
        let i = self.probes.iter().position(|p| p == probe)?;
        Some(&self.pressures[i])
    }

    pub fn lambda(&self, valve: &str) -> Option<&[T]> {
        let i = self.valves.iter().position(|v| v == valve)?;
        Some(&self.lambdas[i])
    }

    pub fn elongation(&self, actuator: &str) -> Option<&[T]> {
        let i = self.actuators.iter().position(|a| a == actuator)?;
        Some(&self.elongations[i])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Probe value at the last sample with time `<= t`.
    pub fn sample(&self, probe: &str, t: T) -> Option<T> {
        let series = self.series(probe)?;
        let k = self.times.partition_point(|&ti| ti <= t);
        series.get(k.checked_sub(1)?).copied()
    }
}

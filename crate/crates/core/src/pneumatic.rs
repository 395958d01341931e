//! Constitutive laws for the circuit elements.
//!
//! Pressures are gauge kPa (atmosphere is 0), conductances are
//! mL/(s·kPa), capacitances mL/kPa and times seconds. The sheet valve
//! ("FST") is a three-port element whose main path closes when its gate
//! chamber is pressurised; it closes along a linear ramp between two gate
//! thresholds, stays latched shut on the way down and snaps open once the
//! gate falls to the reopening pressure.

use std::fmt;

use thiserror::Error;

use crate::netlist::{Component, Netlist, NetlistError, Schedule, ATM};
use crate::scalar::Scalar;
use crate::solver::{simulate, SolverConfig, SolverError};

/// Absolute vacuum expressed as gauge pressure.
pub const VACUUM_KPA: f64 = -101.3;

/// Supply pressure used throughout the reference circuits.
pub const BASELINE_SUPPLY_KPA: f64 = 70.0;
/// Gate pressure at which the main path starts to close.
pub const BASELINE_CLOSE_START_KPA: f64 = 20.0;
/// Gate pressure at which the main path is fully closed.
pub const BASELINE_CLOSE_END_KPA: f64 = 30.0;
/// Gate pressure at or below which a closed path snaps open.
pub const BASELINE_REOPEN_KPA: f64 = 10.0;
/// Open main-path conductance.
pub const BASELINE_G_ON: f64 = 1.0;
/// Closed main-path leak, relative to `g_on`.
pub const CLOSED_LEAK_FRACTION: f64 = 1.0e-6;
/// Gate chamber capacitance.
pub const BASELINE_C_GATE: f64 = 0.01;
/// Load restrictor of the single-valve divider: `g_on / 2.5`, which puts
/// the open-state output at 50 kPa for a 70 kPa supply.
pub const BASELINE_G_LOAD: f64 = BASELINE_G_ON / 2.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("pressure {0} kPa is below absolute vacuum")]
    BelowVacuum(f64),
    #[error("{what} must be {rule}, got {value}")]
    OutOfRange {
        what: &'static str,
        rule: &'static str,
        value: f64,
    },
    #[error("valve thresholds must satisfy 0 < reopen < close_start < close_end (got {reopen}, {close_start}, {close_end})")]
    ThresholdOrder {
        reopen: f64,
        close_start: f64,
        close_end: f64,
    },
    #[error("closed leak g_off = {g_off} must be below g_on = {g_on}")]
    LeakNotBelowOpen { g_on: f64, g_off: f64 },
    #[error("contact interval [{0}, {1}] is empty or reversed")]
    BadInterval(f64, f64),
}

fn out_of_range<T: Scalar>(what: &'static str, rule: &'static str, value: T) -> ParamError {
    ParamError::OutOfRange {
        what,
        rule,
        value: value.to_f64().unwrap_or(f64::NAN),
    }
}

/// Gauge pressure in kPa.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Pressure<T>(T);

impl<T: Scalar> Pressure<T> {
    pub fn new(kpa: T) -> Result<Self, ParamError> {
        if !(kpa >= T::lit(VACUUM_KPA)) {
            return Err(ParamError::BelowVacuum(kpa.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self(kpa))
    }

    pub fn atmosphere() -> Self {
        Self(T::zero())
    }

    pub fn kpa(self) -> T {
        self.0
    }
}

impl<T: Scalar> fmt::Display for Pressure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} kPa", self.0)
    }
}

/// Flow per unit pressure difference, mL/(s·kPa).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Conductance<T>(T);

impl<T: Scalar> Conductance<T> {
    pub fn new(value: T) -> Result<Self, ParamError> {
        if !(value >= T::zero()) || !value.is_finite() {
            return Err(out_of_range("conductance", "finite and >= 0", value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Switching thresholds, conductances and gate capacitance of one valve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FstParams<T> {
    pub p_close_start: T,
    pub p_close_end: T,
    pub p_reopen: T,
    pub g_on: T,
    pub g_off: T,
    pub c_gate: T,
}

impl<T: Scalar> FstParams<T> {
    /// Thresholds 20/30/10 kPa read off the measured hysteresis loop.
    pub fn baseline() -> Self {
        Self {
            p_close_start: T::lit(BASELINE_CLOSE_START_KPA),
            p_close_end: T::lit(BASELINE_CLOSE_END_KPA),
            p_reopen: T::lit(BASELINE_REOPEN_KPA),
            g_on: T::lit(BASELINE_G_ON),
            g_off: T::lit(BASELINE_G_ON * CLOSED_LEAK_FRACTION),
            c_gate: T::lit(BASELINE_C_GATE),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let all = [
            self.p_close_start,
            self.p_close_end,
            self.p_reopen,
            self.g_on,
            self.g_off,
            self.c_gate,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(out_of_range("valve parameter", "finite", T::nan()));
        }
        if !(T::zero() < self.p_reopen
            && self.p_reopen < self.p_close_start
            && self.p_close_start < self.p_close_end)
        {
            let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
            return Err(ParamError::ThresholdOrder {
                reopen: f(self.p_reopen),
                close_start: f(self.p_close_start),
                close_end: f(self.p_close_end),
            });
        }
        if self.g_off < T::zero() {
            return Err(out_of_range("g_off", ">= 0", self.g_off));
        }
        if !(self.g_off < self.g_on) {
            return Err(ParamError::LeakNotBelowOpen {
                g_on: self.g_on.to_f64().unwrap_or(f64::NAN),
                g_off: self.g_off.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !(self.c_gate > T::zero()) {
            return Err(out_of_range("c_gate", "> 0", self.c_gate));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for FstParams<T> {
    fn default() -> Self {
        Self::baseline()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Ascending branch: closure follows the gate pressure up the ramp.
    OpenBranch,
    /// Fully closed and held until the gate drops to the reopening pressure.
    ClosedLatched,
}

/// Hysteresis memory of one valve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FstState<T> {
    pub branch: Branch,
    /// Closure degree: 0 is fully open, 1 fully closed.
    pub lambda: T,
    /// Largest closure reached since the last reopening.
    pub lambda_max_seen: T,
}

impl<T: Scalar> FstState<T> {
    pub fn open() -> Self {
        Self {
            branch: Branch::OpenBranch,
            lambda: T::zero(),
            lambda_max_seen: T::zero(),
        }
    }

    pub fn closed() -> Self {
        Self {
            branch: Branch::ClosedLatched,
            lambda: T::one(),
            lambda_max_seen: T::one(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.branch == Branch::ClosedLatched
    }
}

impl<T: Scalar> Default for FstState<T> {
    fn default() -> Self {
        Self::open()
    }
}

/// Advances the valve's hysteresis memory for a new gate pressure.
///
/// Closure rises linearly from `p_close_start` to `p_close_end` and never
/// falls back while the gate stays above `p_reopen`; reaching full closure
/// latches the valve. At or below `p_reopen` everything resets to open.
pub fn closure_step<T: Scalar>(state: FstState<T>, params: &FstParams<T>, p_gate: Pressure<T>) -> FstState<T> {
    let p = p_gate.kpa();
    if p <= params.p_reopen {
        return FstState::open();
    }
    if state.branch == Branch::ClosedLatched {
        return FstState::closed();
    }
    let span = params.p_close_end - params.p_close_start;
    let ramp = ((p - params.p_close_start) / span).max(T::zero()).min(T::one());
    let lambda = ramp.max(state.lambda_max_seen);
    if lambda >= T::one() {
        return FstState::closed();
    }
    FstState {
        branch: Branch::OpenBranch,
        lambda,
        lambda_max_seen: lambda,
    }
}

/// Main-path conductance, linear in the closure degree.
pub fn fst_conductance<T: Scalar>(params: &FstParams<T>, state: &FstState<T>) -> Conductance<T> {
    let lambda = state.lambda.max(T::zero()).min(T::one());
    Conductance(params.g_off + (params.g_on - params.g_off) * (T::one() - lambda))
}

/// Laminar flow from `p_a` to `p_b`, mL/s.
pub fn restrictor_flow<T: Scalar>(g: Conductance<T>, p_a: Pressure<T>, p_b: Pressure<T>) -> T {
    g.value() * (p_a.kpa() - p_b.kpa())
}

/// Touch sensor: a bent tube that passes flow until something presses on it.
#[derive(Debug, Clone, PartialEq)]
pub struct TactileTube<T> {
    pub g_open: T,
    /// Closed contact intervals `[t_on, t_off]`, in seconds.
    pub contacts: Vec<(T, T)>,
}

impl<T: Scalar> TactileTube<T> {
    pub fn new(g_open: T, contacts: Vec<(T, T)>) -> Result<Self, ParamError> {
        let tube = Self { g_open, contacts };
        tube.validate()?;
        Ok(tube)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.g_open > T::zero()) || !self.g_open.is_finite() {
            return Err(out_of_range("tactile g_open", "finite and > 0", self.g_open));
        }
        for &(on, off) in &self.contacts {
            if !(on <= off) || !on.is_finite() || !off.is_finite() {
                let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
                return Err(ParamError::BadInterval(f(on), f(off)));
            }
        }
        Ok(())
    }

    /// Conductance of the buckled tube.
    pub fn g_blocked(&self) -> T {
        self.g_open * T::lit(CLOSED_LEAK_FRACTION)
    }

    pub fn in_contact(&self, t: T) -> bool {
        self.contacts.iter().any(|&(on, off)| on <= t && t <= off)
    }
}

pub fn tactile_conductance<T: Scalar>(tube: &TactileTube<T>, t: T) -> Conductance<T> {
    if tube.in_contact(t) {
        Conductance(tube.g_blocked())
    } else {
        Conductance(tube.g_open)
    }
}

/// Load-node capacitance and mechanical response of a wound-tube actuator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WtaParams<T> {
    pub c_load: T,
    /// Steady elongation per unit pressure, mm/kPa.
    pub gain: T,
    /// First-order lag, s.
    pub tau: T,
}

impl<T: Scalar> WtaParams<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.c_load > T::zero()) || !self.c_load.is_finite() {
            return Err(out_of_range("wta capacitance", "finite and > 0", self.c_load));
        }
        if !(self.gain >= T::zero()) || !self.gain.is_finite() {
            return Err(out_of_range("wta gain", "finite and >= 0", self.gain));
        }
        if !(self.tau > T::zero()) || !self.tau.is_finite() {
            return Err(out_of_range("wta tau", "finite and > 0", self.tau));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WtaActuator<T> {
    pub params: WtaParams<T>,
    /// Current elongation, mm.
    pub elongation: T,
}

impl<T: Scalar> WtaActuator<T> {
    pub fn new(params: WtaParams<T>) -> Self {
        Self {
            params,
            elongation: T::zero(),
        }
    }

    /// Backward-Euler step of `tau·ė = gain·p − e`; suction does not shorten
    /// the actuator below its rest length.
    pub fn advance(&mut self, p: Pressure<T>, dt: T) {
        let target = self.params.gain * p.kpa().max(T::zero());
        let r = dt / self.params.tau;
        self.elongation = ((self.elongation + r * target) / (T::one() + r)).max(T::zero());
    }
}

/// Gate ramp for the single-valve divider: `0 → p_max → 0`.
#[derive(Debug, Clone, Copy)]
pub struct GateSweep<T> {
    pub p_max: T,
    /// Duration of each half of the triangle, s.
    pub half_period: T,
    pub dt: T,
}

impl<T: Scalar> GateSweep<T> {
    pub fn new(p_max: T) -> Self {
        Self {
            p_max,
            half_period: T::one(),
            dt: T::lit(1.0e-3),
        }
    }
}

/// Builds the reference divider: supply → valve main path → output → load
/// restrictor → atmosphere, with the gate driven by `gate`.
pub fn divider_netlist<T: Scalar>(
    params: &FstParams<T>,
    g_load: T,
    p_supply: T,
    gate: Schedule<T>,
) -> Result<Netlist<T>, NetlistError> {
    let mut n = Netlist::new();
    for node in ["VDD", "G", "OUT"] {
        n.add_node(node)?;
    }
    n.add_supply("VDD", Schedule::Constant(p_supply))?;
    n.add_supply("G", gate)?;
    n.add_component(Component::fst("q1", "VDD", "OUT", "G", *params))?;
    n.add_component(Component::restrictor("load", "OUT", ATM, g_load))?;
    n.add_probe("G")?;
    n.add_probe("OUT")?;
    Ok(n)
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep peak {p_max} kPa does not exceed the full-closure pressure {p_close_end} kPa")]
    PeakTooLow { p_max: f64, p_close_end: f64 },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Traces the output of the reference divider while the gate follows a slow
/// triangle ramp, returning `(gate, output)` pressure pairs in time order.
pub fn sweep_hysteresis<T: Scalar>(
    params: &FstParams<T>,
    g_load: Conductance<T>,
    p_supply: Pressure<T>,
    sweep: GateSweep<T>,
) -> Result<Vec<(T, T)>, SweepError> {
    if !(sweep.p_max > params.p_close_end) {
        return Err(SweepError::PeakTooLow {
            p_max: sweep.p_max.to_f64().unwrap_or(f64::NAN),
            p_close_end: params.p_close_end.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = sweep.half_period;
    let ramp = Schedule::Pwl(vec![
        (T::zero(), T::zero()),
        (half, sweep.p_max),
        (half + half, T::zero()),
    ]);
    let netlist = divider_netlist(params, g_load.value(), p_supply.kpa(), ramp)?;
    let cfg = SolverConfig {
        dt: sweep.dt,
        t_end: half + half,
        ..SolverConfig::default()
    };
    let wave = simulate(&netlist, &cfg)?;
    let gate = wave.series("G").expect("gate probe");
    let out = wave.series("OUT").expect("output probe");
    Ok(gate.iter().copied().zip(out.iter().copied()).collect())
}

use super::{logic_level, LogicLevel};
use crate::netlist::{Netlist, Schedule};
use crate::scalar::Scalar;
use crate::solver::{simulate, steady_state, SolverConfig, SolverError, Waveform};

/// Pulse timing for the set/reset sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatchTiming<T> {
    pub set_at: T,
    pub reset_at: T,
    /// Pulse width, s.
    pub width: T,
    /// Rise/fall time of each pulse edge, s.
    pub edge: T,
    /// Time allowed for outputs to settle after an edge, s.
    pub settle: T,
}

impl<T: Scalar> Default for LatchTiming<T> {
    fn default() -> Self {
        Self {
            set_at: T::zero(),
            reset_at: T::lit(10.0),
            width: T::lit(2.0),
            edge: T::lit(1.0e-3),
            settle: T::lit(0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatchPhase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct LatchVerdict<T> {
    pub phases: Vec<LatchPhase>,
    /// Probes: Q, Qbar, S, R.
    pub waveform: Waveform<T>,
}

impl<T> LatchVerdict<T> {
    pub fn passed(&self) -> bool {
        self.phases.iter().all(|p| p.passed)
    }
}

fn pulse<T: Scalar>(start: T, width: T, edge: T, high: T) -> Schedule<T> {
    let mut points = Vec::new();
    if start > T::zero() {
        points.push((T::zero(), T::zero()));
        points.push((start, T::zero()));
        points.push((start + edge, high));
    } else {
        points.push((start, high));
    }
    points.push((start + width, high));
    points.push((start + width + edge, T::zero()));
    Schedule::Pwl(points)
}

fn supply_level<T: Scalar>(netlist: &Netlist<T>) -> Result<T, SolverError> {
    netlist
        .supplies()
        .iter()
        .filter(|s| s.node != "S" && s.node != "R")
        .filter_map(|s| match s.schedule {
            Schedule::Constant(p) => Some(p),
            _ => None,
        })
        .fold(None, |best: Option<T>, p| Some(best.map_or(p, |b| b.max(p))))
        .ok_or(SolverError::NoPowerSupply)
}

/// Checks that `level(Q)` and `level(Qbar)` hold the expected values over
/// every sample in `[from, to]`.
fn hold<T: Scalar>(
    wave: &Waveform<T>,
    p_supply: T,
    name: &'static str,
    from: T,
    to: T,
    q: LogicLevel,
    qbar: LogicLevel,
) -> LatchPhase {
    let qs = wave.series("Q").expect("Q probe");
    let qbs = wave.series("Qbar").expect("Qbar probe");
    let mut samples = 0usize;
    let bad = wave
        .times
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= from && t <= to)
        .inspect(|_| samples += 1)
        .find(|&(k, _)| logic_level(qs[k], p_supply) != q || logic_level(qbs[k], p_supply) != qbar);
    match bad {
        Some((k, t)) => LatchPhase {
            name,
            passed: false,
            detail: format!(
                "at t = {t} s: Q = {} kPa ({}), Qbar = {} kPa ({}); expected Q {q}, Qbar {qbar}",
                qs[k],
                logic_level(qs[k], p_supply),
                qbs[k],
                logic_level(qbs[k], p_supply)
            ),
        },
        None if samples == 0 => LatchPhase {
            name,
            passed: false,
            detail: format!("no samples in [{from}, {to}] s"),
        },
        None => LatchPhase {
            name,
            passed: true,
            detail: format!("Q {q}, Qbar {qbar} over [{from}, {to}] s"),
        },
    }
}

/// Drives set then reset pulses into a latch built by
/// `build_gate(GateKind::Latch, ..)` and checks that each pulse flips the
/// outputs and that the new state persists after the input is released.
/// The horizon is `cfg.t_end`.
pub fn check_latch<T: Scalar>(
    netlist: &Netlist<T>,
    cfg: &SolverConfig<T>,
    timing: &LatchTiming<T>,
) -> Result<LatchVerdict<T>, SolverError> {
    let p_supply = supply_level(netlist)?;
    let mut circuit = netlist.clone();
    let port = |e| SolverError::Port(format!("{e}"));
    circuit
        .set_supply("S", pulse(timing.set_at, timing.width, timing.edge, p_supply))
        .map_err(port)?;
    circuit
        .set_supply("R", pulse(timing.reset_at, timing.width, timing.edge, p_supply))
        .map_err(port)?;
    for probe in ["S", "R"] {
        if !circuit.probes().iter().any(|p| p == probe) {
            circuit.add_probe(probe).map_err(port)?;
        }
    }
    let wave = simulate(&circuit, cfg)?;
    let set_off = timing.set_at + timing.width + timing.edge;
    let reset_off = timing.reset_at + timing.width + timing.edge;
    let (high, low) = (LogicLevel::High, LogicLevel::Low);
    let phases = vec![
        hold(&wave, p_supply, "set", set_off - timing.edge, set_off - timing.edge, high, low),
        hold(&wave, p_supply, "set-hold", set_off + timing.settle, timing.reset_at, high, low),
        hold(&wave, p_supply, "reset", reset_off - timing.edge, reset_off - timing.edge, low, high),
        hold(&wave, p_supply, "reset-hold", reset_off + timing.settle, cfg.t_end, low, high),
    ];
    Ok(LatchVerdict { phases, waveform: wave })
}

/// Settled output levels with set and reset both held high. Reported for
/// information; the classic latch leaves this case unspecified.
pub fn latch_both_high<T: Scalar>(
    netlist: &Netlist<T>,
    cfg: &SolverConfig<T>,
) -> Result<(LogicLevel, LogicLevel), SolverError> {
    let p_supply = supply_level(netlist)?;
    let mut circuit = netlist.clone();
    for port in ["S", "R"] {
        circuit
            .set_supply(port, Schedule::Constant(p_supply))
            .map_err(|e| SolverError::Port(format!("{e}")))?;
    }
    let settled = steady_state(&circuit, cfg)?;
    let level = |n: &str| {
        settled
            .pressures
            .get(n)
            .map(|&p| logic_level(p, p_supply))
            .ok_or_else(|| SolverError::Port(n.to_string()))
    };
    Ok((level("Q")?, level("Qbar")?))
}

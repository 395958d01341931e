//! Touch-reactive device: two tactile tubes set and reset a valve latch
//! whose outputs inflate a left and a right wound-tube actuator.
//!
//! Each sensing branch runs supply → restrictor → sense node → tactile tube
//! → atmosphere. While the tube is open the sense node rests near the
//! atmosphere; when contact buckles the tube the node charges toward the
//! supply. The left sensor drives set, the right one reset; Q inflates the
//! left actuator and Qbar the right one, so touching something on the left
//! turns the device to the right.

use std::io::{Read, Write};

use crate::netlist::{Component, Netlist, NetlistError, Schedule};
use crate::pneumatic::{FstParams, TactileTube, WtaParams, BASELINE_SUPPLY_KPA};
use crate::scalar::Scalar;
use crate::solver::{format_sig, CsvError, SolverConfig, SolverError, Simulator, Waveform};

pub use crate::pneumatic::{tactile_conductance, WtaActuator};

pub const SUPPLY: &str = "VDD";
pub const SENSE_LEFT: &str = "S1";
pub const SENSE_RIGHT: &str = "S2";
pub const WTA_LEFT: &str = "wta_left";
pub const WTA_RIGHT: &str = "wta_right";

/// Supply-side restrictor of each sensing branch, mL/(s·kPa).
pub const SENSE_RESTRICTOR: f64 = 0.1;
/// Open conductance of a tactile tube, mL/(s·kPa).
pub const TACTILE_G_OPEN: f64 = 1.0;
/// Vent on each latch output.
pub const OUTPUT_VENT: f64 = 0.2;
pub const WTA_C_LOAD: f64 = 0.01;
pub const WTA_GAIN_MM_PER_KPA: f64 = 0.5;
pub const WTA_TAU_S: f64 = 0.3;
/// Orientation per mm of elongation difference; a fully inflated side
/// (about 25 mm) turns the device by 30°.
pub const ORIENTATION_GAIN_DEG_PER_MM: f64 = 1.2;

/// Unobserved run before the scenario starts: a right-hand touch puts the
/// latch into reset so the device starts facing left.
pub const PRE_ROLL_S: f64 = 5.0;
const PRE_ROLL_CONTACT: (f64, f64) = (0.0, 0.5);

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "time",
    "theta_deg",
    "elong_left_mm",
    "elong_right_mm",
    "Q_kPa",
    "Qbar_kPa",
    "S1_kPa",
    "S2_kPa",
];

/// Orientation and actuator lengths. Positive `theta` faces right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceState<T> {
    pub theta: T,
    pub elong_left: T,
    pub elong_right: T,
}

impl<T: Scalar> DeviceState<T> {
    pub fn from_elongations(elong_left: T, elong_right: T) -> Self {
        Self {
            theta: T::lit(ORIENTATION_GAIN_DEG_PER_MM) * (elong_left - elong_right),
            elong_left,
            elong_right,
        }
    }
}

/// Scheduled touches on each side, closed intervals in seconds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContactScript<T> {
    pub left: Vec<(T, T)>,
    pub right: Vec<(T, T)>,
}

impl<T: Scalar> ContactScript<T> {
    /// Left obstacle at 1.0 s, right obstacle at 2.0 s, each touched for
    /// 0.3 s.
    pub fn fig16() -> Self {
        Self {
            left: vec![(T::lit(1.0), T::lit(1.3))],
            right: vec![(T::lit(2.0), T::lit(2.3))],
        }
    }

    fn shifted(intervals: &[(T, T)], by: T) -> Vec<(T, T)> {
        intervals.iter().map(|&(on, off)| (on + by, off + by)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T> {
    pub time: T,
    pub state: DeviceState<T>,
    pub q: T,
    pub qbar: T,
    pub s1: T,
    pub s2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<TrajectorySample<T>>,
}

impl<T: Scalar> Trajectory<T> {
    /// Orientation at the last sample with time `<= t`.
    pub fn theta_at(&self, t: T) -> Option<T> {
        let k = self.samples.partition_point(|s| s.time <= t);
        self.samples.get(k.checked_sub(1)?).map(|s| s.state.theta)
    }

    /// First time at or after `from` where the orientation sign differs
    /// from its sign at `from`.
    pub fn first_sign_change(&self, from: T) -> Option<T> {
        let start = self.samples.partition_point(|s| s.time < from);
        let sign = self.samples.get(start)?.state.theta >= T::zero();
        self.samples[start..]
            .iter()
            .find(|s| (s.state.theta >= T::zero()) != sign)
            .map(|s| s.time)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CsvError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRAJECTORY_HEADER)?;
        for s in &self.samples {
            w.write_record([
                s.time.to_string(),
                format_sig(s.state.theta, 6),
                format_sig(s.state.elong_left, 6),
                format_sig(s.state.elong_right, 6),
                format_sig(s.q, 6),
                format_sig(s.qbar, 6),
                format_sig(s.s1, 6),
                format_sig(s.s2, 6),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, CsvError> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(TRAJECTORY_HEADER) {
            return Err(CsvError::Format {
                row: 0,
                message: format!("expected header {}", TRAJECTORY_HEADER.join(",")),
            });
        }
        let mut samples = Vec::new();
        for (k, record) in r.records().enumerate() {
            let record = record?;
            let v = record
                .iter()
                .map(|f| f.parse::<T>().map_err(|_| f.to_string()))
                .collect::<Result<Vec<T>, _>>()
                .map_err(|bad| CsvError::Format {
                    row: k + 1,
                    message: format!("not a number: {bad:?}"),
                })?;
            if v.len() != TRAJECTORY_HEADER.len() {
                return Err(CsvError::Format {
                    row: k + 1,
                    message: format!("expected {} fields, found {}", TRAJECTORY_HEADER.len(), v.len()),
                });
            }
            samples.push(TrajectorySample {
                time: v[0],
                state: DeviceState {
                    theta: v[1],
                    elong_left: v[2],
                    elong_right: v[3],
                },
                q: v[4],
                qbar: v[5],
                s1: v[6],
                s2: v[7],
            });
        }
        Ok(Self { samples })
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioResult<T> {
    pub trajectory: Trajectory<T>,
    /// Probes Q, Qbar, S1, S2 over the scenario, times relative to its
    /// start.
    pub waveform: Waveform<T>,
}

fn wta_params<T: Scalar>() -> WtaParams<T> {
    WtaParams {
        c_load: T::lit(WTA_C_LOAD),
        gain: T::lit(WTA_GAIN_MM_PER_KPA),
        tau: T::lit(WTA_TAU_S),
    }
}

fn build<T: Scalar>(params: &FstParams<T>, left: Vec<(T, T)>, right: Vec<(T, T)>) -> Result<Netlist<T>, NetlistError> {
    let p = *params;
    let mut n = Netlist::new();
    for node in [SUPPLY, SENSE_LEFT, SENSE_RIGHT, "X1", "X2", "Q", "Qbar"] {
        n.add_node(node)?;
    }
    n.add_supply(SUPPLY, Schedule::Constant(T::lit(BASELINE_SUPPLY_KPA)))?;
    let tube = |contacts| TactileTube {
        g_open: T::lit(TACTILE_G_OPEN),
        contacts,
    };
    n.add_component(Component::restrictor("res_S1", SUPPLY, SENSE_LEFT, T::lit(SENSE_RESTRICTOR)))?;
    n.add_component(Component::tactile("tube_left", SENSE_LEFT, crate::netlist::ATM, tube(left)))?;
    n.add_component(Component::restrictor("res_S2", SUPPLY, SENSE_RIGHT, T::lit(SENSE_RESTRICTOR)))?;
    n.add_component(Component::tactile("tube_right", SENSE_RIGHT, crate::netlist::ATM, tube(right)))?;
    // Q = NOR(reset, Qbar), Qbar = NOR(set, Q)
    n.add_component(Component::fst("fst_R", SUPPLY, "X1", SENSE_RIGHT, p))?;
    n.add_component(Component::fst("fst_Qbar", "X1", "Q", "Qbar", p))?;
    n.add_component(Component::vent("vent_Q", "Q", T::lit(OUTPUT_VENT)))?;
    n.add_component(Component::fst("fst_S", SUPPLY, "X2", SENSE_LEFT, p))?;
    n.add_component(Component::fst("fst_Q", "X2", "Qbar", "Q", p))?;
    n.add_component(Component::vent("vent_Qbar", "Qbar", T::lit(OUTPUT_VENT)))?;
    n.add_component(Component::wta(WTA_LEFT, "Q", wta_params()))?;
    n.add_component(Component::wta(WTA_RIGHT, "Qbar", wta_params()))?;
    for probe in ["Q", "Qbar", SENSE_LEFT, SENSE_RIGHT] {
        n.add_probe(probe)?;
    }
    Ok(n)
}

/// The device circuit with no contacts scheduled.
pub fn build_robot_circuit<T: Scalar>(params: &FstParams<T>) -> Netlist<T> {
    build(params, Vec::new(), Vec::new()).expect("robot topology uses fixed, distinct names")
}

/// [`run_scenario_with`] using baseline valves.
pub fn run_scenario<T: Scalar>(script: &ContactScript<T>, cfg: &SolverConfig<T>) -> Result<ScenarioResult<T>, SolverError> {
    run_scenario_with(&FstParams::baseline(), script, cfg)
}

/// Runs the contact script over `[0, cfg.t_end]`, after a pre-roll that
/// leaves the device facing left.
pub fn run_scenario_with<T: Scalar>(
    params: &FstParams<T>,
    script: &ContactScript<T>,
    cfg: &SolverConfig<T>,
) -> Result<ScenarioResult<T>, SolverError> {
    cfg.check()?;
    let pre = T::lit(PRE_ROLL_S);
    let mut right = vec![(T::lit(PRE_ROLL_CONTACT.0), T::lit(PRE_ROLL_CONTACT.1))];
    right.extend(ContactScript::shifted(&script.right, pre));
    let left = ContactScript::shifted(&script.left, pre);
    let netlist = build(params, left, right).map_err(|e| SolverError::Config(e.to_string()))?;
    let full = SolverConfig {
        t_end: cfg.t_end + pre,
        ..*cfg
    };
    let mut wave = Simulator::new(&netlist, full)?.run()?;

    // drop the pre-roll and rebase time
    let first = wave.times.partition_point(|&t| t < pre - cfg.dt * T::lit(0.5));
    wave.times = wave.times.split_off(first).into_iter().map(|t| (t - pre).max(T::zero())).collect();
    for s in wave.pressures.iter_mut().chain(&mut wave.lambdas).chain(&mut wave.elongations) {
        *s = s.split_off(first);
    }

    let get = |name: &str| wave.series(name).expect("robot probe").to_vec();
    let (q, qbar, s1, s2) = (get("Q"), get("Qbar"), get(SENSE_LEFT), get(SENSE_RIGHT));
    let el = wave.elongation(WTA_LEFT).expect("left actuator");
    let er = wave.elongation(WTA_RIGHT).expect("right actuator");
    let samples = (0..wave.len())
        .map(|k| TrajectorySample {
            time: wave.times[k],
            state: DeviceState::from_elongations(el[k], er[k]),
            q: q[k],
            qbar: qbar[k],
            s1: s1[k],
            s2: s2[k],
        })
        .collect();
    Ok(ScenarioResult {
        trajectory: Trajectory { samples },
        waveform: wave,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{validate, ComponentKind};

    #[test]
    fn composition() {
        let n = build_robot_circuit(&FstParams::<f64>::baseline());
        let count = |f: fn(&ComponentKind<f64>) -> bool| n.components().iter().filter(|c| f(&c.kind)).count();
        assert_eq!(n.fst_count(), 4);
        assert_eq!(count(|k| matches!(k, ComponentKind::Tactile { .. })), 2);
        assert_eq!(count(|k| matches!(k, ComponentKind::WtaLoad { .. })), 2);
        assert_eq!(n.supplies().len(), 1);
        assert!(validate(&n).is_empty());
    }

    #[test]
    fn orientation_sign() {
        let s = DeviceState::from_elongations(25.0f64, 0.0);
        assert!((s.theta - 30.0).abs() < 1e-12);
        assert!(DeviceState::from_elongations(0.0f64, 25.0).theta < 0.0);
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let t = Trajectory {
            samples: vec![TrajectorySample {
                time: 0.25f64,
                state: DeviceState::from_elongations(1.5, 20.0),
                q: 3.0,
                qbar: 50.0,
                s1: 6.36364,
                s2: 6.36364,
            }],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time,theta_deg,elong_left_mm,elong_right_mm,Q_kPa,Qbar_kPa,S1_kPa,S2_kPa\n"));
        let back = Trajectory::<f64>::read_csv(&buf[..]).unwrap();
        assert_eq!(back.samples.len(), 1);
        assert!((back.samples[0].state.theta - t.samples[0].state.theta).abs() < 1e-4);
        assert!(Trajectory::<f64>::read_csv(&b"a,b\n1,2\n"[..]).is_err());
    }
}

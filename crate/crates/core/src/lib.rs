//! Simulation of pneumatic logic built from hysteretic sheet valves.
//!
//! Pressures are gauge kPa (atmosphere = 0), conductances mL/(s·kPa) and
//! capacitances mL/kPa. Everything numeric is generic over [`Scalar`]
//! (`f32` or `f64`); the aliases at the crate root fix it to `f64`, with
//! `…F32` variants for single precision.

pub mod design;
pub mod logic;
pub mod netlist;
pub mod pneumatic;
pub mod robot;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

pub type Pressure = pneumatic::Pressure<f64>;
pub type Conductance = pneumatic::Conductance<f64>;
pub type FstParams = pneumatic::FstParams<f64>;
pub type FstState = pneumatic::FstState<f64>;
pub type TactileTube = pneumatic::TactileTube<f64>;
pub type WtaParams = pneumatic::WtaParams<f64>;
pub type WtaActuator = pneumatic::WtaActuator<f64>;
pub type Netlist = netlist::Netlist<f64>;
pub type Component = netlist::Component<f64>;
pub type Schedule = netlist::Schedule<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type Simulator = solver::Simulator<f64>;
pub type Waveform = solver::Waveform<f64>;
pub type SteadyState = solver::SteadyState<f64>;
pub type TruthTable = logic::TruthTable<f64>;
pub type GeometryPoint = design::GeometryPoint<f64>;
pub type ClosureRatio = design::ClosureRatio<f64>;
pub type DeviceState = robot::DeviceState<f64>;
pub type ContactScript = robot::ContactScript<f64>;
pub type Trajectory = robot::Trajectory<f64>;

pub type PressureF32 = pneumatic::Pressure<f32>;
pub type ConductanceF32 = pneumatic::Conductance<f32>;
pub type FstParamsF32 = pneumatic::FstParams<f32>;
pub type FstStateF32 = pneumatic::FstState<f32>;
pub type NetlistF32 = netlist::Netlist<f32>;
pub type SolverConfigF32 = solver::SolverConfig<f32>;
pub type SimulatorF32 = solver::Simulator<f32>;
pub type WaveformF32 = solver::Waveform<f32>;
pub type TruthTableF32 = logic::TruthTable<f32>;
pub type GeometryPointF32 = design::GeometryPoint<f32>;
pub type TrajectoryF32 = robot::Trajectory<f32>;

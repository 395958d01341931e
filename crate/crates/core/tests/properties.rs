mod common;

use std::collections::BTreeMap;

use common::{driven_gates, random_netlist};
use fluidic_core::logic::{build_gate, logic_level, GateKind, DEFAULT_GATE_VENT};
use fluidic_core::netlist::{parse_netlist, serialize, validate, Component, ComponentKind, Netlist, Schedule, ATM};
use fluidic_core::pneumatic::{closure_step, restrictor_flow, Branch, Conductance, FstParams, FstState, Pressure};
use fluidic_core::robot::{build_robot_circuit, run_scenario, ContactScript};
use fluidic_core::solver::{simulate, solve_static, SolverConfig, Simulator, Waveform};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>()) {
        let n = random_netlist(seed);
        let text = serialize(&n);
        let back: Netlist<f64> = parse_netlist(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &n);
        prop_assert_eq!(serialize(&back), text);
    }

    #[test]
    fn parser_never_panics(text in any::<String>()) {
        let _ = parse_netlist::<f64>(&text);
    }

    #[test]
    fn parser_never_panics_on_near_miss_input(
        text in prop::collection::vec(
            "((node|supply|fst|res|cap|vent|tactile|wta|probe|pwl|events|ATM|a|b|g|-?[0-9]{0,3}(\\.[0-9]{0,2})?(e-?[0-9])?|inf|NaN|#) {0,2}){0,12}(\n|\r\n)?",
            1..8,
        ).prop_map(|lines| lines.concat())
    ) {
        let _ = parse_netlist::<f64>(&text);
    }

    #[test]
    fn restrictor_flow_is_antisymmetric(g in 0.0f64..10.0, a in -90.0f64..500.0, b in -90.0f64..500.0) {
        let (g, pa, pb) = (Conductance::new(g).unwrap(), Pressure::new(a).unwrap(), Pressure::new(b).unwrap());
        prop_assert_eq!(restrictor_flow(g, pa, pb), -restrictor_flow(g, pb, pa));
        if a > b { prop_assert!(restrictor_flow(g, pa, pb) >= 0.0); }
    }

    #[test]
    fn closure_ratchets_until_reopening(ps in prop::collection::vec(0.0f64..60.0, 1..200)) {
        let params = FstParams::baseline();
        let mut s = FstState::open();
        for p in ps {
            let next = closure_step(s, &params, Pressure::new(p).unwrap());
            prop_assert!((0.0..=1.0).contains(&next.lambda));
            if p <= params.p_reopen {
                prop_assert_eq!(next, FstState::open());
            } else {
                prop_assert!(next.lambda >= s.lambda, "closure fell from {} to {} at {p} kPa", s.lambda, next.lambda);
                if s.branch == Branch::ClosedLatched {
                    prop_assert_eq!(next.branch, Branch::ClosedLatched);
                }
            }
            if p >= params.p_close_end {
                prop_assert!(next.is_closed());
            }
            s = next;
        }
    }
}

#[test]
fn flow_is_conserved_at_every_step() {
    let mut circuits: Vec<Netlist<f64>> = driven_gates().into_iter().map(|(_, n)| n).collect();
    let mut latch = build_gate(GateKind::Latch, &FstParams::baseline(), DEFAULT_GATE_VENT).unwrap();
    latch.set_supply("S", Schedule::Pwl(vec![(0.5, 0.0), (0.6, 70.0), (1.5, 70.0), (1.6, 0.0)])).unwrap();
    latch.set_supply("R", Schedule::Pwl(vec![(2.5, 0.0), (2.6, 70.0), (3.5, 70.0), (3.6, 0.0)])).unwrap();
    circuits.push(latch);
    let mut robot = build_robot_circuit(&FstParams::baseline());
    if let Some(ComponentKind::Tactile { tube, .. }) = robot.component_mut("tube_left").map(|c| &mut c.kind) {
        tube.contacts.push((1.0, 1.3));
    }
    circuits.push(robot);
    let cfg = SolverConfig::with_horizon(4.0);
    for n in &circuits {
        let mut sim = Simulator::new(n, cfg).unwrap();
        for step in 0..=sim.step_count() {
            if step > 0 {
                sim.step().unwrap();
            }
            for (node, q, _) in sim.flow_imbalance() {
                assert!(q.abs() < cfg.tol, "step {step} node {node}: net inflow {q} mL/s");
            }
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let cfg = SolverConfig::with_horizon(4.0);
    for (kind, n) in driven_gates() {
        assert_eq!(simulate(&n, &cfg).unwrap(), simulate(&n, &cfg).unwrap(), "{kind}");
    }
    let a = run_scenario(&ContactScript::fig16(), &SolverConfig::with_horizon(3.0)).unwrap();
    let b = run_scenario(&ContactScript::fig16(), &SolverConfig::with_horizon(3.0)).unwrap();
    assert_eq!(a.trajectory, b.trajectory);
}

fn plateau_levels(w: &Waveform<f64>, probe: &str) -> Vec<(f64, f64)> {
    // just before each input edge, plus the end of the run
    [0.99, 1.99, 2.99, 3.99]
        .into_iter()
        .map(|t| (t, w.sample(probe, t).unwrap()))
        .collect()
}

#[test]
fn halving_the_step_keeps_gate_outputs() {
    for (kind, n) in driven_gates() {
        let coarse = simulate(&n, &SolverConfig { dt: 1e-3, t_end: 4.0, ..SolverConfig::default() }).unwrap();
        let fine = simulate(&n, &SolverConfig { dt: 5e-4, t_end: 4.0, ..SolverConfig::default() }).unwrap();
        for (&(t, a), &(_, b)) in plateau_levels(&coarse, "Q").iter().zip(&plateau_levels(&fine, "Q")) {
            assert_eq!(logic_level(a, 70.0), logic_level(b, 70.0), "{kind} at {t}");
            assert!((a - b).abs() < 0.5, "{kind} at {t}: {a} vs {b}");
        }
    }
}

#[test]
fn source_and_drain_are_interchangeable() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p_s = rng.gen_range(20.0..100.0);
        let g_load = rng.gen_range(0.05..2.0);
        let build = |swap: bool| {
            let mut n = Netlist::new();
            for node in ["VDD", "G", "OUT"] {
                n.add_node(node).unwrap();
            }
            n.add_supply("VDD", Schedule::Constant(p_s)).unwrap();
            n.add_supply("G", Schedule::Constant(0.0)).unwrap();
            let (s, d) = if swap { ("OUT", "VDD") } else { ("VDD", "OUT") };
            n.add_component(Component::fst("q", s, d, "G", FstParams::baseline())).unwrap();
            n.add_component(Component::restrictor("load", "OUT", ATM, g_load)).unwrap();
            n
        };
        let lambda = BTreeMap::from([("q".to_string(), rng.gen_range(0.0..1.0))]);
        let a = solve_static(&build(false), &lambda).unwrap();
        let b = solve_static(&build(true), &lambda).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn removing_a_gate_or_output_vent_is_flagged() {
    for kind in GateKind::ALL {
        let gate = build_gate(kind, &FstParams::baseline(), DEFAULT_GATE_VENT).unwrap();
        assert!(validate(&gate).is_empty(), "{kind}");
        for vent in kind.vents() {
            let mut stripped = gate.clone();
            stripped.remove_component(vent).unwrap();
            let diags = validate(&stripped);
            assert!(diags.iter().any(|d| d.code == "VENT-TRAP"), "{kind} without {vent}: {diags:?}");
            assert!(diags.iter().all(|d| !d.is_error()), "{kind} without {vent}: {diags:?}");
        }
    }
}

//! Independent checks of the nodal solver: a Gauss–Seidel relaxation and a
//! dissipated-power minimum for resistive networks, and brute-force
//! enumeration of open/closed valve configurations for switching circuits.

mod common;

use std::collections::BTreeMap;

use common::{consistent_configurations, random_switching, valve_gates, Resistive};
use fluidic_core::logic::{build_gate, GateKind, DEFAULT_GATE_VENT};
use fluidic_core::netlist::{Component, Netlist, Schedule, ATM};
use fluidic_core::pneumatic::{Branch, FstParams};
use fluidic_core::solver::{solve_static, steady_state, steady_state_from, SimState, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_resistive(rng: &mut ChaCha8Rng) -> Netlist<f64> {
    let mut n = Netlist::new();
    let nodes = ["s", "n1", "n2", "n3", "n4", "n5"];
    for node in nodes {
        n.add_node(node).unwrap();
    }
    n.add_supply("s", Schedule::Constant(rng.gen_range(10.0..100.0))).unwrap();
    // a spanning chain keeps every node connected, extra edges make it a mesh
    let mut k = 0;
    let mut res = |n: &mut Netlist<f64>, a: &str, b: &str, g: f64| {
        k += 1;
        n.add_component(Component::restrictor(&format!("r{k}"), a, b, g)).unwrap();
    };
    let all: Vec<&str> = nodes.iter().copied().chain([ATM]).collect();
    for w in all.windows(2) {
        res(&mut n, w[0], w[1], rng.gen_range(0.05..2.0));
    }
    for _ in 0..6 {
        let a = all[rng.gen_range(0..all.len())];
        let b = all[rng.gen_range(0..all.len())];
        if a != b && !(a == "s" && b == ATM || a == ATM && b == "s") {
            res(&mut n, a, b, rng.gen_range(0.05..2.0));
        }
    }
    n
}

#[test]
fn static_solution_matches_relaxation_and_minimises_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let n = random_resistive(&mut rng);
        let p = solve_static(&n, &BTreeMap::new()).unwrap();
        let oracle = Resistive::from_netlist(&n, &|_| 0.0);
        let q = oracle.gauss_seidel();
        for (name, v) in &q {
            assert!((p[name] - v).abs() < 1e-7, "case {case} node {name}: {} vs {v}", p[name]);
        }
        // Kirchhoff's solution is the unique minimum of dissipated power
        // over the free node pressures
        let base = oracle.power(&p);
        for name in ["n1", "n2", "n3", "n4", "n5"] {
            for eps in [1e-3, -1e-3, 0.5, -0.5] {
                let mut moved = p.clone();
                *moved.get_mut(name).unwrap() += eps;
                assert!(oracle.power(&moved) > base, "case {case}: moving {name} by {eps} lowers power");
            }
        }
    }
}

#[test]
fn static_solution_with_prescribed_closures() {
    let gate = build_gate(GateKind::Nor, &FstParams::baseline(), DEFAULT_GATE_VENT).unwrap();
    for (la, lb) in [(0.0, 0.0), (1.0, 0.0), (0.3, 0.7), (1.0, 1.0)] {
        let lambdas = BTreeMap::from([("fst_A".to_string(), la), ("fst_B".to_string(), lb)]);
        let p = solve_static(&gate, &lambdas).unwrap();
        let q = Resistive::from_netlist(&gate, &|name| lambdas[name]).gauss_seidel();
        for (name, v) in &q {
            assert!((p[name] - v).abs() < 1e-7, "{la},{lb} {name}");
        }
    }
}

#[test]
fn steady_state_matches_configuration_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = SolverConfig::with_horizon(20.0);
    for case in 0..50 {
        let n = random_switching(&mut rng);
        let valves = valve_gates(&n);
        assert!((1..=5).contains(&valves.len()));
        let configs = consistent_configurations(&n);
        assert_eq!(configs.len(), 1, "case {case}: feed-forward circuit must have one consistent state");
        let (closed, p) = &configs[0];
        let settled = steady_state(&n, &cfg).unwrap();
        for ((name, _, _), &c) in valves.iter().zip(closed) {
            let s = settled.valves[name];
            if c {
                assert_eq!(s.branch, Branch::ClosedLatched, "case {case} valve {name}");
            } else {
                assert_eq!(s.lambda, 0.0, "case {case} valve {name}");
            }
        }
        for (node, v) in p {
            assert!(
                (settled.pressures[node] - v).abs() < 1e-4,
                "case {case} node {node}: {} vs {v}",
                settled.pressures[node]
            );
        }
    }
}

#[test]
fn latch_has_exactly_two_stable_states() {
    let latch = build_gate(GateKind::Latch, &FstParams::baseline(), DEFAULT_GATE_VENT).unwrap();
    let configs = consistent_configurations(&latch);
    assert_eq!(configs.len(), 2);
    let levels: Vec<(bool, bool)> = configs.iter().map(|(_, p)| (p["Q"] > 42.0, p["Qbar"] > 42.0)).collect();
    assert!(levels.contains(&(true, false)) && levels.contains(&(false, true)), "{levels:?}");

    // the simulator reaches and keeps each of them
    let cfg = SolverConfig::with_horizon(20.0);
    for (port, q_high) in [("S", true), ("R", false)] {
        let mut driven = latch.clone();
        driven.set_supply(port, Schedule::Constant(70.0)).unwrap();
        let pulsed = steady_state(&driven, &cfg).unwrap();
        let held = steady_state_from(&latch, &cfg, &pulsed.state).unwrap();
        let want = configs.iter().find(|(_, p)| (p["Q"] > 42.0) == q_high).unwrap();
        for node in ["Q", "Qbar"] {
            assert!((held.pressures[node] - want.1[node]).abs() < 1e-4, "{port} {node}");
        }
    }
    assert_ne!(SimState::<f64>::default(), steady_state(&latch, &cfg).unwrap().state);
}

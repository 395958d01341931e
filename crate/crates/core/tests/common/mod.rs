//! Generators and oracles shared by the integration test targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use fluidic_core::logic::{build_gate, square_wave, GateKind, DEFAULT_GATE_VENT};
use fluidic_core::netlist::{Component, ComponentKind, Netlist, Schedule, ATM};
use fluidic_core::pneumatic::{FstParams, TactileTube, WtaParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAME_CHARS: &[char] = &['a', 'b', 'Q', 'x', 'Z', '_', '-', '.', '0', '7', 'λ', 'ä', '[', ']'];

fn random_name(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let len = rng.gen_range(0..6);
    let tail: String = (0..len).map(|_| NAME_CHARS[rng.gen_range(0..NAME_CHARS.len())]).collect();
    format!("{prefix}{tail}")
}

/// Values across many magnitudes, so that number formatting is exercised.
fn value(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(lo..hi),
        1 => ((rng.gen_range(lo..hi) * 100.0).round() / 100.0).max(lo),
        2 => lo + (hi - lo) * 10f64.powi(-rng.gen_range(1..9)),
        _ => lo + (hi - lo) / 3.0,
    }
}

pub fn random_netlist(seed: u64) -> Netlist<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = Netlist::new();
    let count = rng.gen_range(1..8);
    let mut nodes = vec![ATM.to_string()];
    for k in 0..count {
        let name = random_name(&mut rng, &format!("n{k}"));
        n.add_node(&name).unwrap();
        nodes.push(name);
    }
    let pick = |rng: &mut ChaCha8Rng| nodes[rng.gen_range(0..nodes.len())].clone();
    for node in nodes.iter().skip(1) {
        if rng.gen_bool(0.3) {
            let schedule = if rng.gen_bool(0.5) {
                Schedule::Constant(value(&mut rng, -50.0, 200.0))
            } else {
                let mut t = 0.0;
                let pts = (0..rng.gen_range(1..5))
                    .map(|_| {
                        t += value(&mut rng, 1e-3, 5.0);
                        (t, value(&mut rng, 0.0, 100.0))
                    })
                    .collect();
                Schedule::Pwl(pts)
            };
            n.add_supply(node, schedule).unwrap();
        }
    }
    for k in 0..rng.gen_range(0..10) {
        let name = random_name(&mut rng, &format!("c{k}"));
        let c = match rng.gen_range(0..6) {
            0 => {
                let p0 = value(&mut rng, 1.0, 50.0);
                let params = FstParams {
                    p_close_start: p0,
                    p_close_end: p0 + value(&mut rng, 0.1, 30.0),
                    p_reopen: p0 * rng.gen_range(0.0..1.0),
                    g_on: value(&mut rng, 0.01, 5.0),
                    g_off: 0.0,
                    c_gate: value(&mut rng, 1e-4, 1.0),
                };
                let params = FstParams {
                    g_off: params.g_on * rng.gen_range(0.0..1e-3),
                    ..params
                };
                Component::fst(&name, &pick(&mut rng), &pick(&mut rng), &pick(&mut rng), params)
            }
            1 => Component::restrictor(&name, &pick(&mut rng), &pick(&mut rng), value(&mut rng, 1e-6, 10.0)),
            2 => Component::chamber(&name, &pick(&mut rng), value(&mut rng, 1e-6, 10.0)),
            3 => Component::vent(&name, &pick(&mut rng), value(&mut rng, 1e-6, 10.0)),
            4 => {
                let mut t = 0.0;
                let contacts = (0..rng.gen_range(0..3))
                    .map(|_| {
                        let on = t + value(&mut rng, 0.0, 2.0);
                        t = on + value(&mut rng, 0.0, 2.0);
                        (on, t)
                    })
                    .collect();
                let tube = TactileTube::new(value(&mut rng, 0.01, 5.0), contacts).unwrap();
                Component::tactile(&name, &pick(&mut rng), &pick(&mut rng), tube)
            }
            _ => {
                let params = WtaParams {
                    c_load: value(&mut rng, 1e-4, 1.0),
                    gain: value(&mut rng, 0.0, 2.0),
                    tau: value(&mut rng, 0.01, 2.0),
                };
                Component::wta(&name, &pick(&mut rng), params)
            }
        };
        n.add_component(c).unwrap();
    }
    for node in nodes.iter().skip(1) {
        if rng.gen_bool(0.4) {
            n.add_probe(node).unwrap();
        }
    }
    n
}

/// Two-terminal conductance list with every valve replaced by its
/// conductance under a fixed closure.
pub struct Resistive {
    names: Vec<String>,
    fixed: HashMap<usize, f64>,
    edges: Vec<(usize, usize, f64)>,
}

impl Resistive {
    pub fn from_netlist(n: &Netlist<f64>, lambda: &dyn Fn(&str) -> f64) -> Self {
        let mut names = vec![ATM.to_string()];
        names.extend(n.nodes().iter().filter(|s| *s != ATM).cloned());
        let idx = |s: &str| names.iter().position(|x| x == s).unwrap();
        let mut fixed = HashMap::from([(0usize, 0.0)]);
        for s in n.supplies() {
            if let Schedule::Constant(p) = s.schedule {
                fixed.insert(idx(&s.node), p);
            }
        }
        let mut edges = Vec::new();
        for c in n.components() {
            match &c.kind {
                ComponentKind::Fst { source, drain, params, .. } => {
                    let l = lambda(&c.name);
                    let g = params.g_off + (params.g_on - params.g_off) * (1.0 - l);
                    edges.push((idx(source), idx(drain), g));
                }
                ComponentKind::Restrictor { a, b, g } => edges.push((idx(a), idx(b), *g)),
                ComponentKind::Vent { node, g } => edges.push((idx(node), 0, *g)),
                ComponentKind::Tactile { a, b, tube } => edges.push((idx(a), idx(b), tube.g_open)),
                _ => {}
            }
        }
        Self { names, fixed, edges }
    }

    pub fn gauss_seidel(&self) -> BTreeMap<String, f64> {
        let n = self.names.len();
        let mut p = vec![0.0; n];
        for (&i, &v) in &self.fixed {
            p[i] = v;
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, g) in &self.edges {
            adj[a].push((b, g));
            adj[b].push((a, g));
        }
        for _ in 0..200_000 {
            let mut delta: f64 = 0.0;
            for i in 0..n {
                if self.fixed.contains_key(&i) || adj[i].is_empty() {
                    continue;
                }
                let (num, den) = adj[i].iter().fold((0.0, 0.0), |(s, w), &(j, g)| (s + g * p[j], w + g));
                let next = num / den;
                delta = delta.max((next - p[i]).abs());
                p[i] = next;
            }
            if delta < 1e-12 {
                break;
            }
        }
        self.names.iter().cloned().zip(p).collect()
    }

    pub fn power(&self, p: &BTreeMap<String, f64>) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b, g)| g * (p[&self.names[a]] - p[&self.names[b]]).powi(2))
            .sum()
    }
}

/// Random feed-forward switching circuit: each valve either feeds a fresh
/// vented node from the supply, joins an existing node in parallel, or
/// sits in series behind an unvented junction; each gate is tied to a
/// constant input or to an earlier output.
pub fn random_switching(rng: &mut ChaCha8Rng) -> Netlist<f64> {
    let p_s = rng.gen_range(60.0..80.0);
    let g_vent = rng.gen_range(0.1..0.25);
    let params = FstParams::baseline();
    let mut n = Netlist::new();
    n.add_node("VDD").unwrap();
    n.add_supply("VDD", Schedule::Constant(p_s)).unwrap();
    let budget = rng.gen_range(1..=5);
    let mut outputs: Vec<String> = Vec::new();
    let mut k = 0;
    while n.fst_count() < budget {
        k += 1;
        // the series shape needs two valves
        let shape = if budget - n.fst_count() >= 2 { rng.gen_range(0..3) } else { rng.gen_range(0..3) & 2 };
        // a valve joining output j in parallel may only be gated by outputs
        // created before j, which keeps the circuit free of feedback
        let drain = (shape == 0 && !outputs.is_empty()).then(|| rng.gen_range(0..outputs.len()));
        let upstream = drain.unwrap_or(outputs.len());
        let gate = if upstream == 0 || rng.gen_bool(0.5) {
            let input = format!("IN{k}");
            n.add_node(&input).unwrap();
            let level = if rng.gen_bool(0.5) { p_s } else { 0.0 };
            n.add_supply(&input, Schedule::Constant(level)).unwrap();
            input
        } else {
            outputs[rng.gen_range(0..upstream)].clone()
        };
        let name = format!("q{k}");
        match (shape, drain) {
            (_, Some(j)) => {
                let drain = outputs[j].clone();
                n.add_component(Component::fst(&name, "VDD", &drain, &gate, params)).unwrap();
            }
            (1, None) => {
                let (x, y) = (format!("X{k}"), format!("Y{k}"));
                n.add_node(&x).unwrap();
                n.add_node(&y).unwrap();
                n.add_component(Component::fst(&format!("{name}a"), "VDD", &x, &gate, params)).unwrap();
                let gate_b = format!("INB{k}");
                n.add_node(&gate_b).unwrap();
                let level = if rng.gen_bool(0.5) { p_s } else { 0.0 };
                n.add_supply(&gate_b, Schedule::Constant(level)).unwrap();
                n.add_component(Component::fst(&name, &x, &y, &gate_b, params)).unwrap();
                n.add_component(Component::vent(&format!("vent_{y}"), &y, g_vent)).unwrap();
                n.add_probe(&y).unwrap();
                outputs.push(y);
            }
            _ => {
                let y = format!("Y{k}");
                n.add_node(&y).unwrap();
                n.add_component(Component::fst(&name, "VDD", &y, &gate, params)).unwrap();
                n.add_component(Component::vent(&format!("vent_{y}"), &y, g_vent)).unwrap();
                n.add_probe(&y).unwrap();
                outputs.push(y);
            }
        }
    }
    n
}

pub fn valve_gates(n: &Netlist<f64>) -> Vec<(String, String, FstParams<f64>)> {
    n.components()
        .iter()
        .filter_map(|c| match &c.kind {
            ComponentKind::Fst { gate, params, .. } => Some((c.name.clone(), gate.clone(), *params)),
            _ => None,
        })
        .collect()
}

/// All open/closed assignments that are self-consistent: an open valve's
/// gate sits at or below the closure-start pressure, a closed valve's
/// gate above its reopening pressure.
pub fn consistent_configurations(n: &Netlist<f64>) -> Vec<(Vec<bool>, BTreeMap<String, f64>)> {
    let valves = valve_gates(n);
    let mut found = Vec::new();
    for mask in 0..1u32 << valves.len() {
        let closed: Vec<bool> = (0..valves.len()).map(|i| mask >> i & 1 == 1).collect();
        let lambda: HashMap<&str, f64> = valves
            .iter()
            .zip(&closed)
            .map(|((name, _, _), &c)| (name.as_str(), if c { 1.0 } else { 0.0 }))
            .collect();
        let p = Resistive::from_netlist(n, &|name| lambda[name]).gauss_seidel();
        let ok = valves.iter().zip(&closed).all(|((_, gate, params), &c)| {
            if c {
                p[gate] > params.p_reopen
            } else {
                p[gate] <= params.p_close_start
            }
        });
        if ok {
            found.push((closed, p));
        }
    }
    found
}

pub fn drive_inputs(kind: GateKind, n: &mut Netlist<f64>) {
    // inputs count in binary, one level per second
    for (bit, port) in kind.inputs().iter().enumerate() {
        let half = (1usize << (kind.inputs().len() - 1 - bit)) as f64;
        let cycles = (2 >> (kind.inputs().len() - 1 - bit)).max(1);
        n.set_supply(port, square_wave(0.0, 70.0, half, cycles, 1e-3)).unwrap();
    }
}

pub fn driven_gates() -> Vec<(GateKind, Netlist<f64>)> {
    [GateKind::Not, GateKind::Positive, GateKind::Nor, GateKind::Nand]
        .into_iter()
        .map(|kind| {
            let mut n = build_gate(kind, &FstParams::baseline(), DEFAULT_GATE_VENT).unwrap();
            drive_inputs(kind, &mut n);
            (kind, n)
        })
        .collect()
}


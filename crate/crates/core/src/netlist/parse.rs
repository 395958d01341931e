use std::collections::HashMap;

use super::{Component, Netlist, NetlistError, Schedule};
use crate::pneumatic::{FstParams, TactileTube, WtaParams};
use crate::scalar::Scalar;

/// Line numbers (1-based) of each declaration in the parsed text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub nodes: HashMap<String, usize>,
    pub components: HashMap<String, usize>,
    pub supplies: HashMap<String, usize>,
    pub probes: HashMap<String, usize>,
}

impl SourceMap {
    /// Best line for a diagnostic subject: component first, then node.
    pub fn line_of(&self, subject: &str) -> Option<usize> {
        self.components
            .get(subject)
            .or_else(|| self.nodes.get(subject))
            .or_else(|| self.supplies.get(subject))
            .or_else(|| self.probes.get(subject))
            .copied()
    }
}

pub fn parse_netlist<T: Scalar>(text: &str) -> Result<Netlist<T>, NetlistError> {
    parse_netlist_with_lines(text).map(|(n, _)| n)
}

pub fn parse_netlist_with_lines<T: Scalar>(text: &str) -> Result<(Netlist<T>, SourceMap), NetlistError> {
    let mut netlist = Netlist::new();
    let mut map = SourceMap::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let at = |source: NetlistError| match source {
            e @ NetlistError::Syntax { .. } => e,
            source => NetlistError::AtLine {
                line,
                source: Box::new(source),
            },
        };
        statement(&mut netlist, &mut map, line, &tokens).map_err(at)?;
    }
    Ok((netlist, map))
}

fn syntax(line: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line,
        message: message.into(),
    }
}

fn number<T: Scalar>(line: usize, what: &str, tok: &str) -> Result<T, NetlistError> {
    match tok.parse::<T>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(line, format!("expected a finite number for {what}, found {tok:?}"))),
    }
}

fn arity(line: usize, keyword: &str, usage: &str, tokens: &[&str], min: usize, max: usize) -> Result<(), NetlistError> {
    let n = tokens.len() - 1;
    if n < min || n > max {
        return Err(syntax(line, format!("`{keyword}` expects: {keyword} {usage}")));
    }
    Ok(())
}

fn statement<T: Scalar>(
    netlist: &mut Netlist<T>,
    map: &mut SourceMap,
    line: usize,
    tokens: &[&str],
) -> Result<(), NetlistError> {
    let keyword = tokens[0].to_ascii_lowercase();
    let num = |what: &str, tok: &str| number::<T>(line, what, tok);
    match keyword.as_str() {
        "node" => {
            arity(line, "node", "<name>", tokens, 1, 1)?;
            netlist.add_node(tokens[1])?;
            map.nodes.insert(tokens[1].into(), line);
        }
        "supply" => {
            const USAGE: &str = "<node> <kPa> | supply <node> pwl <t0> <p0> ...";
            arity(line, "supply", USAGE, tokens, 2, usize::MAX)?;
            let schedule = if tokens[2].eq_ignore_ascii_case("pwl") {
                let values = &tokens[3..];
                if values.is_empty() || values.len() % 2 != 0 {
                    return Err(syntax(line, "pwl expects pairs of <time> <kPa>"));
                }
                let points = values
                    .chunks(2)
                    .map(|pair| Ok((num("pwl time", pair[0])?, num("pwl pressure", pair[1])?)))
                    .collect::<Result<Vec<_>, NetlistError>>()?;
                Schedule::Pwl(points)
            } else {
                arity(line, "supply", USAGE, tokens, 2, 2)?;
                Schedule::Constant(num("supply pressure", tokens[2])?)
            };
            netlist.add_supply(tokens[1], schedule)?;
            map.supplies.insert(tokens[1].into(), line);
        }
        "fst" => {
            arity(
                line,
                "fst",
                "<name> <src> <drn> <gate> [p_close_start p_close_end p_reopen g_on g_off c_gate]",
                tokens,
                4,
                10,
            )?;
            let mut params = FstParams::<T>::baseline();
            let slots: [&mut T; 6] = [
                &mut params.p_close_start,
                &mut params.p_close_end,
                &mut params.p_reopen,
                &mut params.g_on,
                &mut params.g_off,
                &mut params.c_gate,
            ];
            for (slot, tok) in slots.into_iter().zip(&tokens[5..]) {
                *slot = num("fst parameter", tok)?;
            }
            add(netlist, map, line, Component::fst(tokens[1], tokens[2], tokens[3], tokens[4], params))?;
        }
        "res" => {
            arity(line, "res", "<name> <n1> <n2> <g>", tokens, 4, 4)?;
            let g = num("conductance", tokens[4])?;
            add(netlist, map, line, Component::restrictor(tokens[1], tokens[2], tokens[3], g))?;
        }
        "cap" => {
            arity(line, "cap", "<name> <node> <c>", tokens, 3, 3)?;
            let c = num("capacitance", tokens[3])?;
            add(netlist, map, line, Component::chamber(tokens[1], tokens[2], c))?;
        }
        "vent" => {
            arity(line, "vent", "<name> <node> <g>", tokens, 3, 3)?;
            let g = num("conductance", tokens[3])?;
            add(netlist, map, line, Component::vent(tokens[1], tokens[2], g))?;
        }
        "tactile" => {
            const USAGE: &str = "<name> <n1> <n2> <g_open> [events <t_on> <t_off> ...]";
            arity(line, "tactile", USAGE, tokens, 4, usize::MAX)?;
            let g_open = num("conductance", tokens[4])?;
            let mut contacts = Vec::new();
            if tokens.len() > 5 {
                if !tokens[5].eq_ignore_ascii_case("events") {
                    return Err(syntax(line, format!("`tactile` expects: tactile {USAGE}")));
                }
                let times = &tokens[6..];
                if times.len() % 2 != 0 {
                    return Err(syntax(line, "events expects pairs of <t_on> <t_off>"));
                }
                for pair in times.chunks(2) {
                    contacts.push((num("contact start", pair[0])?, num("contact end", pair[1])?));
                }
            }
            let tube = TactileTube { g_open, contacts };
            add(netlist, map, line, Component::tactile(tokens[1], tokens[2], tokens[3], tube))?;
        }
        "wta" => {
            arity(line, "wta", "<name> <node> <c> <gain> <tau>", tokens, 5, 5)?;
            let params = WtaParams {
                c_load: num("capacitance", tokens[3])?,
                gain: num("gain", tokens[4])?,
                tau: num("tau", tokens[5])?,
            };
            add(netlist, map, line, Component::wta(tokens[1], tokens[2], params))?;
        }
        "probe" => {
            arity(line, "probe", "<node>", tokens, 1, 1)?;
            netlist.add_probe(tokens[1])?;
            map.probes.insert(tokens[1].into(), line);
        }
        other => return Err(syntax(line, format!("unknown keyword {other:?}"))),
    }
    Ok(())
}

fn add<T: Scalar>(
    netlist: &mut Netlist<T>,
    map: &mut SourceMap,
    line: usize,
    component: Component<T>,
) -> Result<(), NetlistError> {
    let name = component.name.clone();
    netlist.add_component(component)?;
    map.components.insert(name, line);
    Ok(())
}

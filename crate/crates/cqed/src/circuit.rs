//! Lumped-element circuit descriptions: netlist parsing, validation and
//! reduction to the three-capacitor transmon-resonator topology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Circuit element kinds supported by the netlist grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Capacitance in farads.
    Capacitor(f64),
    /// Inductance in henries.
    Inductor(f64),
    /// Josephson junction, specified by its linear inductance L_J in henries.
    Junction(f64),
    /// SQUID: total Josephson energy over h in hertz and asymmetry d.
    Squid { ej_over_h: f64, d: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub node_a: String,
    pub node_b: String,
}

/// Parsed netlist. Node "0" is ground.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub components: Vec<Component>,
}

/// Reduced transmon-resonator circuit: transmon shunt C_a, coupling C_c,
/// per-mode resonator capacitance C_r and fundamental-mode inductance L_0,
/// plus the junction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedCircuit {
    pub c_a: f64,
    pub c_c: f64,
    pub c_r: f64,
    pub l_0: f64,
    /// Maximum Josephson energy over h [Hz].
    pub e_j_max_over_h: f64,
    /// SQUID asymmetry, 0 for a single junction.
    pub d: f64,
    /// Environmental offset charge in Cooper pairs, folded to [-0.5, 0.5].
    pub n_env: f64,
}

impl ReducedCircuit {
    pub fn new(c_a: f64, c_c: f64, c_r: f64, l_0: f64, e_j_max_over_h: f64, d: f64) -> Result<Self> {
        for (name, v) in [("C_a", c_a), ("C_c", c_c), ("C_r", c_r), ("L_0", l_0), ("E_J/h", e_j_max_over_h)] {
            if !(v > 0.0) {
                return Err(Error::Value {
                    line: 0,
                    message: format!("{name} must be positive, got {v}"),
                });
            }
        }
        if !(0.0..1.0).contains(&d) {
            return Err(Error::Value {
                line: 0,
                message: format!("asymmetry d must satisfy 0 <= d < 1, got {d}"),
            });
        }
        Ok(ReducedCircuit {
            c_a,
            c_c,
            c_r,
            l_0,
            e_j_max_over_h,
            d,
            n_env: 0.0,
        })
    }

    /// Sets the offset charge, folded into the canonical window.
    pub fn with_offset_charge(mut self, n_env: f64) -> Self {
        self.n_env = fold_offset_charge(n_env);
        self
    }
}

/// Folds an offset charge into [-0.5, 0.5]; the spectrum is 1-periodic.
pub fn fold_offset_charge(n_env: f64) -> f64 {
    let folded = n_env - n_env.round();
    // round() maps 0.5 to 1, keep the +0.5 representative
    if folded == -0.5 {
        0.5
    } else {
        folded
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::Syntax {
        line,
        message: format!("expected a number, found '{token}'"),
    })
}

fn parse_keyed(token: &str, key: &str, line: usize) -> Result<f64> {
    match token.split_once('=') {
        Some((k, v)) if k.eq_ignore_ascii_case(key) => parse_number(v, line),
        _ => Err(Error::Syntax {
            line,
            message: format!("expected {key}=<value>, found '{token}'"),
        }),
    }
}

/// Parses the netlist text format: one component per line, `#` comments,
/// whitespace-separated fields.
///
/// ```text
/// C <node> <node> <farads>
/// L <node> <node> <henries>
/// J <node> <node> lj=<henries>
/// SQ <node> <node> ej=<hz> d=<dimensionless>
/// ```
pub fn parse_netlist(text: &str) -> Result<Netlist> {
    let mut components = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((content, _)) => content.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let kind_token = fields[0].to_ascii_uppercase();
        let expect = |n: usize| -> Result<()> {
            if fields.len() != n {
                Err(Error::Syntax {
                    line: line_no,
                    message: format!("expected {n} fields, found {}: '{line}'", fields.len()),
                })
            } else {
                Ok(())
            }
        };
        let component = match kind_token.as_str() {
            "C" => {
                expect(4)?;
                let v = parse_number(fields[3], line_no)?;
                Component {
                    kind: ComponentKind::Capacitor(v),
                    node_a: fields[1].to_string(),
                    node_b: fields[2].to_string(),
                }
            }
            "L" => {
                expect(4)?;
                let v = parse_number(fields[3], line_no)?;
                Component {
                    kind: ComponentKind::Inductor(v),
                    node_a: fields[1].to_string(),
                    node_b: fields[2].to_string(),
                }
            }
            "J" => {
                expect(4)?;
                let lj = parse_keyed(fields[3], "lj", line_no)?;
                Component {
                    kind: ComponentKind::Junction(lj),
                    node_a: fields[1].to_string(),
                    node_b: fields[2].to_string(),
                }
            }
            "SQ" => {
                expect(5)?;
                let ej = parse_keyed(fields[3], "ej", line_no)?;
                let d = parse_keyed(fields[4], "d", line_no)?;
                if !(0.0..1.0).contains(&d) {
                    return Err(Error::Value {
                        line: line_no,
                        message: format!("SQUID asymmetry must satisfy 0 <= d < 1, got {d}"),
                    });
                }
                Component {
                    kind: ComponentKind::Squid { ej_over_h: ej, d },
                    node_a: fields[1].to_string(),
                    node_b: fields[2].to_string(),
                }
            }
            other => {
                return Err(Error::Syntax {
                    line: line_no,
                    message: format!("unknown element '{other}'"),
                })
            }
        };
        let value_positive = match component.kind {
            ComponentKind::Capacitor(v) | ComponentKind::Inductor(v) | ComponentKind::Junction(v) => v > 0.0,
            ComponentKind::Squid { ej_over_h, .. } => ej_over_h > 0.0,
        };
        if !value_positive {
            return Err(Error::Value {
                line: line_no,
                message: "component value must be positive".into(),
            });
        }
        if component.node_a == component.node_b {
            return Err(Error::Value {
                line: line_no,
                message: format!("component shorts node '{}' to itself", component.node_a),
            });
        }
        components.push(component);
    }
    let netlist = Netlist { components };
    validate_topology(&netlist)?;
    Ok(netlist)
}

fn validate_topology(netlist: &Netlist) -> Result<()> {
    if netlist.components.is_empty() {
        return Err(Error::Topology("empty netlist".into()));
    }
    let mut nodes: BTreeSet<&str> = BTreeSet::new();
    for c in &netlist.components {
        nodes.insert(&c.node_a);
        nodes.insert(&c.node_b);
    }
    if !nodes.contains("0") {
        return Err(Error::Topology("no ground node \"0\"".into()));
    }
    // connectivity by BFS from ground
    let mut reached: BTreeSet<&str> = BTreeSet::new();
    let mut frontier = vec!["0"];
    reached.insert("0");
    while let Some(node) = frontier.pop() {
        for c in &netlist.components {
            let other = if c.node_a == node {
                Some(c.node_b.as_str())
            } else if c.node_b == node {
                Some(c.node_a.as_str())
            } else {
                None
            };
            if let Some(o) = other {
                if reached.insert(o) {
                    frontier.push(o);
                }
            }
        }
    }
    if reached.len() != nodes.len() {
        let missing: Vec<&str> = nodes.difference(&reached).copied().collect();
        return Err(Error::Topology(format!(
            "nodes not connected to ground: {missing:?}"
        )));
    }
    Ok(())
}

/// Serializes a netlist back to its text format. `parse(serialize(n)) == n`.
pub fn serialize_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    for c in &netlist.components {
        match &c.kind {
            ComponentKind::Capacitor(v) => {
                writeln!(out, "C {} {} {:e}", c.node_a, c.node_b, v).unwrap()
            }
            ComponentKind::Inductor(v) => {
                writeln!(out, "L {} {} {:e}", c.node_a, c.node_b, v).unwrap()
            }
            ComponentKind::Junction(v) => {
                writeln!(out, "J {} {} lj={:e}", c.node_a, c.node_b, v).unwrap()
            }
            ComponentKind::Squid { ej_over_h, d } => {
                writeln!(out, "SQ {} {} ej={:e} d={:e}", c.node_a, c.node_b, ej_over_h, d).unwrap()
            }
        }
    }
    out
}

/// Reduces a netlist to the fixed transmon-resonator topology:
/// a junction and C_a from the island to ground, C_c from the island to
/// the resonator node, and C_r plus L_0 from the resonator node to ground.
/// A single intermediate all-capacitor star node is eliminated by a
/// star-delta transformation; anything else is rejected.
pub fn reduce_to_transmon_resonator(netlist: &Netlist) -> Result<ReducedCircuit> {
    // Locate the junction: exactly one J or SQ, island = its non-ground node.
    let junctions: Vec<&Component> = netlist
        .components
        .iter()
        .filter(|c| matches!(c.kind, ComponentKind::Junction(_) | ComponentKind::Squid { .. }))
        .collect();
    if junctions.len() != 1 {
        return Err(Error::UnsupportedTopology(format!(
            "expected exactly one junction or SQUID, found {}",
            junctions.len()
        )));
    }
    let junction = junctions[0];
    let island = grounded_partner(junction).ok_or_else(|| {
        Error::UnsupportedTopology("junction must connect the island to ground".into())
    })?;

    let (e_j_max_over_h, d) = match &junction.kind {
        ComponentKind::Junction(lj) => {
            // L_J = Phi_0_reduced^2 / E_J
            let e_j = crate::constants::PHI_0_REDUCED.powi(2) / lj;
            (e_j / crate::constants::H, 0.0)
        }
        ComponentKind::Squid { ej_over_h, d } => (*ej_over_h, *d),
        _ => unreachable!(),
    };

    // Resonator branch: exactly one inductor, from the resonator node to ground.
    let inductors: Vec<&Component> = netlist
        .components
        .iter()
        .filter(|c| matches!(c.kind, ComponentKind::Inductor(_)))
        .collect();
    if inductors.len() != 1 {
        return Err(Error::UnsupportedTopology(format!(
            "expected exactly one resonator inductor, found {}",
            inductors.len()
        )));
    }
    let inductor = inductors[0];
    let res_node = grounded_partner(inductor).ok_or_else(|| {
        Error::UnsupportedTopology("resonator inductor must connect to ground".into())
    })?;
    if res_node == island {
        return Err(Error::UnsupportedTopology(
            "inductor shares the transmon island node".into(),
        ));
    }
    let l_0 = match inductor.kind {
        ComponentKind::Inductor(v) => v,
        _ => unreachable!(),
    };

    // Capacitor multiset keyed by unordered node pair.
    let mut caps: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut cap_nodes: BTreeSet<String> = BTreeSet::new();
    for c in &netlist.components {
        if let ComponentKind::Capacitor(v) = c.kind {
            let key = ordered_pair(&c.node_a, &c.node_b);
            *caps.entry(key).or_insert(0.0) += v;
            cap_nodes.insert(c.node_a.clone());
            cap_nodes.insert(c.node_b.clone());
        }
    }

    // Intermediate nodes: anything that is not ground, island or resonator.
    let known: BTreeSet<&str> = BTreeSet::from(["0", island, res_node]);
    let extra: Vec<String> = cap_nodes
        .iter()
        .filter(|n| !known.contains(n.as_str()))
        .cloned()
        .collect();
    if extra.len() > 1 {
        return Err(Error::UnsupportedTopology(format!(
            "more than one intermediate node: {extra:?}"
        )));
    }
    if let Some(x) = extra.first() {
        // Star-delta: the intermediate node must carry exactly three
        // capacitors, one to each of island, resonator and ground.
        let mut star = BTreeMap::new();
        for (key, v) in caps.clone() {
            let (a, b) = key.clone();
            if a == *x || b == *x {
                let other = if a == *x { b } else { a };
                if star.insert(other.clone(), v).is_some() {
                    return Err(Error::UnsupportedTopology(format!(
                        "parallel capacitors between star node '{x}' and '{other}'"
                    )));
                }
                caps.remove(&key);
            }
        }
        let terminals = ["0", island, res_node];
        if star.len() != 3 || !terminals.iter().all(|t| star.contains_key(*t)) {
            return Err(Error::UnsupportedTopology(format!(
                "star node '{x}' must connect capacitively to island, resonator and ground; found {:?}",
                star.keys().collect::<Vec<_>>()
            )));
        }
        let total: f64 = star.values().sum();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let cij = star[terminals[i]] * star[terminals[j]] / total;
                let key = ordered_pair(terminals[i], terminals[j]);
                *caps.entry(key).or_insert(0.0) += cij;
            }
        }
    }

    let take = |caps: &mut BTreeMap<(String, String), f64>, a: &str, b: &str| -> Option<f64> {
        caps.remove(&ordered_pair(a, b))
    };
    let c_a = take(&mut caps, island, "0");
    let c_c = take(&mut caps, island, res_node);
    let c_r = take(&mut caps, res_node, "0");
    if !caps.is_empty() {
        return Err(Error::UnsupportedTopology(format!(
            "capacitors outside the transmon-resonator template: {:?}",
            caps.keys().collect::<Vec<_>>()
        )));
    }
    let c_c = c_c.ok_or_else(|| {
        Error::UnsupportedTopology("no coupling capacitor between island and resonator".into())
    })?;
    let c_a = c_a.ok_or_else(|| {
        Error::UnsupportedTopology("no transmon shunt capacitor from island to ground".into())
    })?;
    let c_r = c_r.ok_or_else(|| {
        Error::UnsupportedTopology("no resonator capacitor from resonator node to ground".into())
    })?;

    ReducedCircuit::new(c_a, c_c, c_r, l_0, e_j_max_over_h, d)
}

fn grounded_partner(c: &Component) -> Option<&str> {
    if c.node_a == "0" {
        Some(&c.node_b)
    } else if c.node_b == "0" {
        Some(&c.node_a)
    } else {
        None
    }
}

fn ordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

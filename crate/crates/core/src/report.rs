//! Machine-readable output: JSON documents and Graphviz DOT.
//!
//! All output is a pure function of its input, so repeated runs produce
//! byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;

use crate::mc_exhaustive::Verdict;
use crate::mc_static::StaticVerdict;
use crate::model::Obligation;
use crate::semantics::Lts;

#[derive(Serialize)]
struct StateJson {
    id: usize,
    net: String,
}

#[derive(Serialize)]
struct TransitionJson {
    from: usize,
    to: usize,
    label: String,
}

#[derive(Serialize)]
struct LtsJson {
    states: Vec<StateJson>,
    transitions: Vec<TransitionJson>,
}

#[derive(Serialize)]
struct WitnessJson {
    path: Vec<String>,
    transition: usize,
    theta: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_bp: Option<String>,
}

#[derive(Serialize)]
struct VerdictJson {
    obligation: String,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson>,
    states_explored: usize,
    transitions_checked: usize,
}

#[derive(Serialize)]
struct ActionJson {
    source_loc: String,
    action_text: String,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta0: Option<String>,
    constraints: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct StaticJson {
    obligation: String,
    certified: bool,
    actions: Vec<ActionJson>,
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report values always serialize")
}

pub fn lts_value(lts: &Lts) -> serde_json::Value {
    serde_json::to_value(lts_doc(lts)).expect("report values always serialize")
}

fn lts_doc(lts: &Lts) -> LtsJson {
    LtsJson {
        states: lts.states.iter().enumerate().map(|(id, n)| StateJson { id, net: n.render_compact() }).collect(),
        transitions: lts
            .transitions
            .iter()
            .map(|t| TransitionJson { from: t.from, to: t.to, label: t.label.to_string() })
            .collect(),
    }
}

pub fn lts_json(lts: &Lts) -> String {
    pretty(&lts_doc(lts))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// States are numbered; the full network text goes into the tooltip.
pub fn lts_dot(lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n  rankdir=TB;\n  node [shape=circle];\n");
    for (i, n) in lts.states.iter().enumerate() {
        let shape = if i == 0 { ", shape=doublecircle" } else { "" };
        let _ = writeln!(out, "  s{i} [label=\"{i}\", tooltip=\"{}\"{shape}];", dot_escape(&n.render_compact()));
    }
    for t in &lts.transitions {
        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"];", t.from, t.to, dot_escape(&t.label.to_string()));
    }
    out.push_str("}\n");
    out
}

fn verdict_doc(obl: &Obligation, v: &Verdict) -> VerdictJson {
    VerdictJson {
        obligation: obl.to_string(),
        holds: v.holds,
        witness: v.witness.as_ref().map(|w| WitnessJson {
            path: w.path.iter().map(ToString::to_string).collect(),
            transition: w.transition,
            theta: w.theta.to_string(),
            failing_bp: w.failing_bp.clone(),
        }),
        states_explored: v.states_explored,
        transitions_checked: v.transitions_checked,
    }
}

pub fn verdict_value(obl: &Obligation, v: &Verdict) -> serde_json::Value {
    serde_json::to_value(verdict_doc(obl, v)).expect("report values always serialize")
}

pub fn verdict_json(obl: &Obligation, v: &Verdict) -> String {
    pretty(&verdict_doc(obl, v))
}

fn static_doc(obl: &Obligation, v: &StaticVerdict) -> StaticJson {
    StaticJson {
        obligation: obl.to_string(),
        certified: v.certified,
        actions: v
            .per_action
            .iter()
            .map(|r| ActionJson {
                source_loc: r.action.source.clone(),
                action_text: r.action.action.to_string(),
                outcome: r.outcome.as_str(),
                theta0: r.theta0.as_ref().map(ToString::to_string),
                constraints: r.constraints.iter().map(ToString::to_string).collect(),
                note: r.note.clone(),
            })
            .collect(),
    }
}

pub fn static_value(obl: &Obligation, v: &StaticVerdict) -> serde_json::Value {
    serde_json::to_value(static_doc(obl, v)).expect("report values always serialize")
}

pub fn static_json(obl: &Obligation, v: &StaticVerdict) -> String {
    pretty(&static_doc(obl, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc_exhaustive::sat_obl;
    use crate::mc_static::check_network;
    use crate::parser::{parse_net, parse_obligation};
    use crate::semantics::{build_lts, Limits};

    #[test]
    fn lts_json_shape() {
        let n = parse_net("A :: <k> || B :: in(k)@A . 0").unwrap();
        let lts = build_lts(&n, Limits::default()).unwrap();
        let v = lts_value(&lts);
        assert_eq!(v["states"].as_array().unwrap().len(), 2);
        assert_eq!(v["transitions"][0]["label"], "B:i(k)@A");
        assert_eq!(v["transitions"][0]["from"], 0);
        let dot = lts_dot(&lts);
        assert!(dot.contains("s0 -> s1 [label=\"B:i(k)@A\"];"));
        assert!(dot.starts_with("digraph lts {"));
    }

    #[test]
    fn dot_escapes_quotes() {
        assert_eq!(dot_escape("a\"b"), "a\\\"b");
    }

    #[test]
    fn verdict_and_static_json() {
        let n = parse_net("A :: <k> || B :: in(k)@A . 0").unwrap();
        let o = parse_obligation("AG [$u : i(k)@A] $u = C").unwrap();
        let v = sat_obl(&n, &o, Limits::default()).unwrap();
        let j = verdict_value(&o, &v);
        assert_eq!(j["holds"], false);
        assert_eq!(j["witness"]["path"][0], "B:i(k)@A");
        assert_eq!(j["witness"]["failing_bp"], "B = C");
        let s = check_network(&n, &o).unwrap();
        let j = static_value(&o, &s);
        assert_eq!(j["certified"], false);
        assert_eq!(j["actions"][0]["outcome"], "not_certified");
        assert_eq!(j["actions"][0]["theta0"], "[$u |-> B]");
        assert_eq!(static_json(&o, &s), static_json(&o, &s));
    }
}

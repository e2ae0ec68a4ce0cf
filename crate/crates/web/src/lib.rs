//! Browser bindings for the `www/` demo page.
//!
//! Each exported function takes source text and returns a JSON string. The
//! plain `*_json` functions do the work and are what the native tests call.

use std::collections::VecDeque;

use aspectkbl::belnap::{Connective, Four};
use aspectkbl::mc_exhaustive::check_lts;
use aspectkbl::mc_static::check_network;
use aspectkbl::model::{validate, Net, ValidationMode};
use aspectkbl::report;
use aspectkbl::semantics::{build_lts, Limits};
use aspectkbl::SourceFile;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Hard cap on states built from the page, so a large net cannot hang the tab.
pub const MAX_STATES: usize = 2_000;

fn load_net(src: &str) -> Result<Net, String> {
    let file = SourceFile::new("net", src);
    let net = file.parse_net().map_err(|d| file.render(&d))?;
    let diags = validate(&net, ValidationMode::Check);
    if diags.iter().any(|d| d.is_error()) {
        return Err(file.render(&diags));
    }
    Ok(net)
}

fn limits(max_states: usize) -> Limits {
    Limits { max_states: max_states.clamp(1, MAX_STATES), ..Limits::default() }
}

/// BFS depth of every state, for laying the graph out in rows.
fn depths(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut depth = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    if n > 0 {
        depth[0] = 0;
        queue.push_back(0);
    }
    while let Some(s) = queue.pop_front() {
        for &(_, to) in edges.iter().filter(|e| e.0 == s) {
            if depth[to] == usize::MAX {
                depth[to] = depth[s] + 1;
                queue.push_back(to);
            }
        }
    }
    depth
}

pub fn explore_json(net_src: &str, max_states: usize) -> Result<String, String> {
    let net = load_net(net_src)?;
    let lts = build_lts(&net, limits(max_states)).map_err(|e| e.to_string())?;
    let edges: Vec<_> = lts.transitions.iter().map(|t| (t.from, t.to)).collect();
    let mut doc = report::lts_value(&lts);
    doc["depth"] = json!(depths(lts.states.len(), &edges));
    doc["final"] = json!(lts.final_states());
    doc["dot"] = json!(report::lts_dot(&lts));
    Ok(doc.to_string())
}

pub fn check_json(net_src: &str, obl_src: &str, max_states: usize) -> Result<String, String> {
    let net = load_net(net_src)?;
    let file = SourceFile::new("obligation", obl_src);
    let obl = file.parse_obligation().map_err(|d| file.render(&d))?;
    let st = check_network(&net, &obl).map_err(|e| e.to_string())?;
    let lts = build_lts(&net, limits(max_states)).map_err(|e| e.to_string())?;
    let ex = check_lts(&lts, &obl).map_err(|e| e.to_string())?;
    Ok(json!({
        "static": report::static_value(&obl, &st),
        "exhaustive": report::verdict_value(&obl, &ex),
    })
    .to_string())
}

fn table(f: impl Fn(Four, Four) -> Four) -> Value {
    Four::ALL
        .iter()
        .map(|&a| Four::ALL.iter().map(|&b| f(a, b).symbol()).collect::<Vec<_>>())
        .collect()
}

pub fn belnap_table_json() -> String {
    let ops: Vec<Value> = Connective::ALL
        .iter()
        .map(|&c| json!({ "name": c.keyword(), "table": table(|a, b| c.apply(a, b)) }))
        .collect();
    json!({
        "values": Four::ALL.iter().map(|v| v.symbol()).collect::<Vec<_>>(),
        "neg": Four::ALL.iter().map(|v| v.neg().symbol()).collect::<Vec<_>>(),
        "grant": Four::ALL.iter().map(|v| v.grant()).collect::<Vec<_>>(),
        "connectives": ops,
    })
    .to_string()
}

#[wasm_bindgen]
pub fn explore(net_src: &str, max_states: usize) -> Result<String, JsError> {
    explore_json(net_src, max_states).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check(net_src: &str, obl_src: &str, max_states: usize) -> Result<String, JsError> {
    check_json(net_src, obl_src, max_states).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn belnap_table() -> String {
    belnap_table_json()
}

#![allow(dead_code)]

pub mod dot;

use std::collections::BTreeSet;
use std::path::PathBuf;

use tm_core::{Arc, EventDef, StaticModel};

/// Corpus files with the number of events each must declare.
pub const CORPUS: [(&str, usize); 4] = [
    ("stock_goods", 10),
    ("railway", 11),
    ("script", 9),
    ("propp", 7),
];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.tm"))
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

pub fn corpus_model(name: &str) -> StaticModel {
    let checked = tm_core::check(&corpus(name), &Default::default());
    checked.model.unwrap()
}

fn internal(arc: &Arc, event: &EventDef) -> bool {
    match arc.name {
        Some(_) => event.members.arcs.contains(&arc.id),
        None => event.members.stages.contains(&arc.src) && event.members.stages.contains(&arc.dst),
    }
}

/// Precedence by scanning every (arc, E, F) triple.
pub fn oracle_precedence(model: &StaticModel) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for arc in &model.arcs {
        for e in &model.events {
            for f in &model.events {
                if e.id != f.id
                    && e.members.stages.contains(&arc.src)
                    && f.members.stages.contains(&arc.dst)
                    && !internal(arc, e)
                    && !internal(arc, f)
                {
                    out.insert((e.id.clone(), f.id.clone()));
                }
            }
        }
    }
    out
}

/// Every topological order of `nodes` under `edges`, stopping after `cap`.
pub fn linearizations(
    nodes: &[String],
    edges: &BTreeSet<(String, String)>,
    cap: usize,
) -> Vec<Vec<String>> {
    fn go(
        nodes: &[String],
        edges: &BTreeSet<(String, String)>,
        prefix: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if prefix.len() == nodes.len() {
            out.push(prefix.clone());
            return;
        }
        for n in nodes {
            if prefix.contains(n) {
                continue;
            }
            let ready = edges
                .iter()
                .filter(|(_, b)| b == n)
                .all(|(a, _)| prefix.contains(a));
            if ready {
                prefix.push(n.clone());
                go(nodes, edges, prefix, out, cap);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(nodes, edges, &mut Vec::new(), &mut out, cap);
    out
}

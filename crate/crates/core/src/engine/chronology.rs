use std::collections::{BTreeMap, BTreeSet};

use super::precedence::{infer_dependencies, PrecedenceRelation};
use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::model::{BehaviorGraph, StaticModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChronologyError {
    #[error("model declares no behavior block")]
    NoBehavior,
    #[error("behavior has a cycle: {}", .cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
}

/// Checks the declared chronology against the inferred precedence relation.
///
/// * `B1` (error): a declared edge `E -> F` while `(F, E)` is inferred.
/// * `B2` (warning): an inferred `(E, F)` with no declared path from `E` to `F`.
/// * `B3` (error, only with `acyclic`): the declared graph has a cycle.
pub fn validate_behavior(
    model: &StaticModel,
    acyclic: bool,
) -> Result<Vec<Diagnostic>, ChronologyError> {
    let behavior = model.behavior.as_ref().ok_or(ChronologyError::NoBehavior)?;
    let relation = infer_dependencies(model);
    Ok(check_against(model, behavior, &relation, acyclic))
}

fn check_against(
    model: &StaticModel,
    behavior: &BehaviorGraph,
    relation: &PrecedenceRelation,
    acyclic: bool,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let event_span = |id: &str| {
        model
            .event_position(id)
            .and_then(|i| model.event_spans.get(i).copied())
            .unwrap_or_default()
    };
    for (i, (e, f)) in behavior.edges.iter().enumerate() {
        if let Some(arcs) = relation.justification(f, e) {
            let span = model
                .behavior_spans
                .get(i)
                .copied()
                .unwrap_or(model.behavior_span);
            let cited: Vec<String> = arcs.iter().map(|&a| model.arc_display(a)).collect();
            let mut d = Diagnostic::error(
                "B1",
                span,
                format!(
                    "declared {e} -> {f} contradicts inferred precedence of {f} before {e} (via {})",
                    cited.join(", ")
                ),
            );
            for &a in arcs {
                d = d.with_related(model.span_of(crate::model::ElementId::Arc(a)));
            }
            out.push(d);
        }
    }
    let reach = reachability(behavior);
    for (e, f, arcs) in relation.pairs() {
        let declared = reach.get(e).is_some_and(|r| r.contains(f));
        if !declared {
            out.push(Diagnostic::warning(
                "B2",
                event_span(e),
                format!(
                    "inferred {e} before {f} (via {}) has no declared path in behavior",
                    model.arc_display(arcs[0])
                ),
            ));
        }
    }
    if acyclic {
        if let Err(ChronologyError::Cycle { cycle }) = linearize(behavior) {
            out.push(Diagnostic::error(
                "B3",
                model.behavior_span,
                format!("behavior has a cycle: {}", cycle.join(" -> ")),
            ));
        }
    }
    sort_diagnostics(&mut out);
    out
}

/// Nodes reachable through one or more edges, per node.
fn reachability(graph: &BehaviorGraph) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut out = BTreeMap::new();
    for start in &graph.nodes {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = graph.successors(start).collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(graph.successors(n));
            }
        }
        out.insert(start.as_str(), seen);
    }
    out
}

/// Topological order of the behavior graph; ties go to the lexicographically
/// smallest event id.
pub fn linearize(graph: &BehaviorGraph) -> Result<Vec<String>, ChronologyError> {
    let mut indegree: BTreeMap<&str, usize> = graph.nodes.iter().map(|n| (n.as_str(), 0)).collect();
    for (f, t) in &graph.edges {
        indegree.entry(f).or_insert(0);
        *indegree.entry(t).or_insert(0) += 1;
    }
    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| n)
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(n) = ready.pop_first() {
        order.push(n.to_string());
        for (f, t) in &graph.edges {
            if f == n {
                let d = indegree.get_mut(t.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(t);
                }
            }
        }
    }
    if order.len() == indegree.len() {
        return Ok(order);
    }
    let remaining: BTreeSet<&str> = indegree
        .iter()
        .filter(|(n, _)| !order.iter().any(|o| o == *n))
        .map(|(&n, _)| n)
        .collect();
    Err(ChronologyError::Cycle {
        cycle: find_cycle(graph, &remaining),
    })
}

/// Depth-first search inside the nodes Kahn's algorithm could not order.
fn find_cycle(graph: &BehaviorGraph, remaining: &BTreeSet<&str>) -> Vec<String> {
    for &start in remaining {
        let mut path: Vec<&str> = vec![start];
        let mut on_path: BTreeSet<&str> = BTreeSet::from([start]);
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        if let Some(cycle) = dfs(graph, remaining, &mut path, &mut on_path, &mut visited) {
            return cycle;
        }
    }
    remaining.iter().map(|s| s.to_string()).collect()
}

fn dfs<'a>(
    graph: &'a BehaviorGraph,
    remaining: &BTreeSet<&'a str>,
    path: &mut Vec<&'a str>,
    on_path: &mut BTreeSet<&'a str>,
    visited: &mut BTreeSet<&'a str>,
) -> Option<Vec<String>> {
    let cur = *path.last().unwrap();
    let mut succ: Vec<&str> = graph
        .successors(cur)
        .filter(|s| remaining.contains(s))
        .collect();
    succ.sort_unstable();
    succ.dedup();
    for next in succ {
        if on_path.contains(next) {
            let start = path.iter().position(|&p| p == next).unwrap();
            let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
            cycle.push(next.to_string());
            return Some(cycle);
        }
        if visited.insert(next) {
            path.push(next);
            on_path.insert(next);
            if let Some(c) = dfs(graph, remaining, path, on_path, visited) {
                return Some(c);
            }
            on_path.remove(next);
            path.pop();
        }
    }
    None
}

/// Behavior graph whose edges are the inferred precedence pairs; used to
/// schedule models that declare no chronology.
pub fn behavior_from_precedence(model: &StaticModel) -> BehaviorGraph {
    let relation = infer_dependencies(model);
    BehaviorGraph {
        nodes: model.events.iter().map(|e| e.id.clone()).collect(),
        edges: relation
            .pairs()
            .map(|(e, f, _)| (e.to_string(), f.to_string()))
            .collect(),
    }
}

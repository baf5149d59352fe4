//! Random `.tm` sources for property tests, benchmarks and fuzzing.
//!
//! [`arbitrary_source`] yields models that parse and resolve but may break
//! any legality rule. [`valid_source`] yields models with no diagnostics
//! under strict validation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{resolve, validate, Strictness};
use crate::model::{ArcKind, StageKind, StaticModel};
use crate::syntax::lexer::quote;
use crate::syntax::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub max_machines: usize,
    /// Nesting depth below the roots.
    pub max_depth: usize,
    pub max_events: usize,
    pub max_arcs: usize,
    /// Valid models only: no stage belongs to two events.
    pub disjoint_regions: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_machines: 6,
            max_depth: 2,
            max_events: 6,
            max_arcs: 20,
            disjoint_regions: false,
        }
    }
}

const NAMES: [&str; 12] = [
    "Vendor", "Dock", "Shelf", "Train", "Home", "Dragon", "Goods", "Clerk", "Road", "Ball", "Box",
    "Lamp",
];

const LABELS: [&str; 8] = [
    "arrives",
    "the goods (4)",
    "say \"hi\"",
    "back\\slash",
    "two\nlines",
    "tab\there",
    "α and ζ",
    "",
];

#[derive(Debug, Clone)]
struct MachineSpec {
    name: String,
    label: Option<String>,
    parent: Option<usize>,
    stages: Vec<(StageKind, Option<String>)>,
    store: Option<String>,
    comment: Option<String>,
}

#[derive(Debug, Clone)]
struct ArcSpec {
    kind: ArcKind,
    src: (usize, StageKind),
    dst: (usize, StageKind),
    name: Option<String>,
    label: Option<String>,
}

#[derive(Debug, Clone)]
struct EventSpec {
    id: String,
    label: Option<String>,
    stages: Vec<(usize, StageKind)>,
    arcs: Vec<String>,
    time: Option<String>,
}

#[derive(Debug, Clone, Default)]
struct Blueprint {
    machines: Vec<MachineSpec>,
    arcs: Vec<ArcSpec>,
    events: Vec<EventSpec>,
    behavior: Option<Vec<(usize, usize)>>,
    trailing_comment: bool,
}

impl Blueprint {
    fn depth(&self, m: usize) -> usize {
        let mut d = 0;
        let mut cur = self.machines[m].parent;
        while let Some(p) = cur {
            d += 1;
            cur = self.machines[p].parent;
        }
        d
    }

    fn machine_path(&self, m: usize) -> String {
        let mut parts = vec![self.machines[m].name.as_str()];
        let mut cur = self.machines[m].parent;
        while let Some(p) = cur {
            parts.push(&self.machines[p].name);
            cur = self.machines[p].parent;
        }
        parts.reverse();
        parts.join(".")
    }

    fn stage_path(&self, (m, kind): (usize, StageKind)) -> String {
        format!("{}.{}", self.machine_path(m), kind.keyword())
    }

    fn all_stages(&self) -> Vec<(usize, StageKind)> {
        self.machines
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.stages.iter().map(move |&(k, _)| (i, k)))
            .collect()
    }

    fn add_machines<R: Rng>(&mut self, rng: &mut R, cfg: &GenConfig) {
        let n = rng.gen_range(1..=cfg.max_machines.max(1));
        for i in 0..n {
            let parent = if i > 0 && rng.gen_bool(0.35) {
                let candidates: Vec<usize> =
                    (0..i).filter(|&p| self.depth(p) < cfg.max_depth).collect();
                candidates.choose(rng).copied()
            } else {
                None
            };
            self.machines.push(MachineSpec {
                name: format!("{}{}", NAMES[rng.gen_range(0..NAMES.len())], i),
                label: maybe_label(rng, 0.3),
                parent,
                stages: Vec::new(),
                store: rng.gen_bool(0.15).then(|| "Log".to_string()),
                comment: rng.gen_bool(0.2).then(|| format!("machine {i}")),
            });
        }
    }

    /// A connected set of stages avoiding `taken`.
    fn grow_region<R: Rng>(
        &self,
        rng: &mut R,
        size: usize,
        taken: &[(usize, StageKind)],
    ) -> Vec<(usize, StageKind)> {
        let stages: Vec<_> = self
            .all_stages()
            .into_iter()
            .filter(|s| !taken.contains(s))
            .collect();
        let Some(&start) = stages.choose(rng) else {
            return Vec::new();
        };
        let mut region = vec![start];
        while region.len() < size {
            let frontier: Vec<(usize, StageKind)> = self
                .arcs
                .iter()
                .filter_map(
                    |a| match (region.contains(&a.src), region.contains(&a.dst)) {
                        (true, false) => Some(a.dst),
                        (false, true) => Some(a.src),
                        _ => None,
                    },
                )
                .filter(|s| !taken.contains(s))
                .collect();
            match frontier.choose(rng) {
                Some(&s) => region.push(s),
                None => break,
            }
        }
        region
    }

    fn to_source<R: Rng>(&self, rng: &mut R) -> String {
        let mut out = String::new();
        let roots: Vec<usize> = (0..self.machines.len())
            .filter(|&i| self.machines[i].parent.is_none())
            .collect();
        for m in roots {
            self.write_machine(rng, &mut out, m, 0);
            out.push('\n');
        }
        for a in &self.arcs {
            out.push_str(match a.kind {
                ArcKind::Flow => "flow ",
                ArcKind::Trigger => "trigger ",
            });
            out.push_str(&self.stage_path(a.src));
            out.push_str(match a.kind {
                ArcKind::Flow => " -> ",
                ArcKind::Trigger => " => ",
            });
            out.push_str(&self.stage_path(a.dst));
            if let Some(n) = &a.name {
                out.push_str(" as ");
                out.push_str(n);
            }
            if let Some(l) = &a.label {
                out.push(' ');
                out.push_str(&quote(l));
            }
            out.push('\n');
        }
        for e in &self.events {
            if rng.gen_bool(0.2) {
                out.push_str("// event\n");
            }
            out.push_str("event ");
            out.push_str(&e.id);
            if let Some(l) = &e.label {
                out.push(' ');
                out.push_str(&quote(l));
            }
            out.push_str(" { region: [");
            let members: Vec<String> = e
                .stages
                .iter()
                .map(|&s| self.stage_path(s))
                .chain(e.arcs.iter().cloned())
                .collect();
            out.push_str(&members.join(if rng.gen_bool(0.5) { ", " } else { ",\n  " }));
            out.push(']');
            if let Some(t) = &e.time {
                out.push_str(" time: ");
                out.push_str(&quote(t));
            }
            out.push_str(" }\n");
        }
        if let Some(edges) = &self.behavior {
            out.push_str("behavior {");
            for &(a, b) in edges {
                out.push_str(if rng.gen_bool(0.5) { "\n  " } else { " " });
                out.push_str(&self.events[a].id);
                out.push_str(" -> ");
                out.push_str(&self.events[b].id);
            }
            out.push_str("\n}\n");
        }
        if self.trailing_comment {
            out.push_str("// end\n");
        }
        out
    }

    fn write_machine<R: Rng>(&self, rng: &mut R, out: &mut String, m: usize, indent: usize) {
        let spec = &self.machines[m];
        let pad = "  ".repeat(indent);
        if let Some(c) = &spec.comment {
            out.push_str(&format!("{pad}// {c}\n"));
        }
        out.push_str(&format!("{pad}machine {}", spec.name));
        if let Some(l) = &spec.label {
            out.push(' ');
            out.push_str(&quote(l));
        }
        let children: Vec<usize> = (0..self.machines.len())
            .filter(|&i| self.machines[i].parent == Some(m))
            .collect();
        let inline = children.is_empty() && rng.gen_bool(0.4);
        out.push_str(" {");
        let sep = if inline {
            " ".to_string()
        } else {
            format!("\n{pad}  ")
        };
        for (kind, label) in &spec.stages {
            out.push_str(&sep);
            out.push_str(kind.keyword());
            if let Some(l) = label {
                out.push(' ');
                out.push_str(&quote(l));
            }
        }
        if let Some(s) = &spec.store {
            out.push_str(&sep);
            out.push_str("store ");
            out.push_str(s);
        }
        for c in children {
            out.push('\n');
            self.write_machine(rng, out, c, indent + 1);
        }
        if inline {
            out.push_str(" }\n");
        } else {
            out.push_str(&format!("\n{pad}}}\n"));
        }
    }
}

fn maybe_label<R: Rng>(rng: &mut R, p: f64) -> Option<String> {
    rng.gen_bool(p)
        .then(|| LABELS[rng.gen_range(0..LABELS.len())].to_string())
}

fn event_id<R: Rng>(rng: &mut R, k: usize) -> String {
    match rng.gen_range(0..6) {
        0 => format!("Ev_{k}"),
        _ => format!("E{}", k + 1),
    }
}

/// A random model that parses and resolves; legality rules are ignored.
pub fn arbitrary_source<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    let mut bp = Blueprint::default();
    bp.add_machines(rng, cfg);
    for m in &mut bp.machines {
        for kind in StageKind::ALL {
            if rng.gen_bool(0.5) {
                m.stages.push((kind, maybe_label(rng, 0.25)));
            }
        }
    }
    let stages = bp.all_stages();
    if stages.len() >= 2 {
        let n = rng.gen_range(0..=cfg.max_arcs);
        let mut named = 0;
        for _ in 0..n {
            let src = *stages.choose(rng).unwrap();
            let dst = *stages.choose(rng).unwrap();
            if src == dst {
                continue;
            }
            let name = rng.gen_bool(0.2).then(|| {
                named += 1;
                format!("arc{named}")
            });
            bp.arcs.push(ArcSpec {
                kind: if rng.gen_bool(0.7) {
                    ArcKind::Flow
                } else {
                    ArcKind::Trigger
                },
                src,
                dst,
                name,
                label: maybe_label(rng, 0.2),
            });
        }
    }
    let named: Vec<String> = bp.arcs.iter().filter_map(|a| a.name.clone()).collect();
    if !stages.is_empty() {
        let n = rng.gen_range(0..=cfg.max_events);
        for k in 0..n {
            let size = rng.gen_range(1..=stages.len().min(5));
            let mut members: Vec<(usize, StageKind)> =
                stages.choose_multiple(rng, size).copied().collect();
            members.sort();
            let arcs = named
                .iter()
                .filter(|_| rng.gen_bool(0.3))
                .cloned()
                .collect();
            bp.events.push(EventSpec {
                id: event_id(rng, k),
                label: maybe_label(rng, 0.5),
                stages: members,
                arcs,
                time: rng.gen_bool(0.2).then(|| "later".to_string()),
            });
        }
    }
    dedup_event_ids(&mut bp);
    if rng.gen_bool(0.6) {
        let n = bp.events.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.gen_bool(0.25) {
                    edges.push((a, b));
                }
            }
        }
        edges.shuffle(rng);
        bp.behavior = Some(edges);
    }
    bp.trailing_comment = rng.gen_bool(0.2);
    bp.to_source(rng)
}

fn dedup_event_ids(bp: &mut Blueprint) {
    let mut seen = std::collections::BTreeSet::new();
    for (k, e) in bp.events.iter_mut().enumerate() {
        if !seen.insert(e.id.clone()) {
            e.id = format!("X{k}");
            seen.insert(e.id.clone());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pattern {
    Source,
    Sink,
    Relay,
    Solo,
}

/// A random model with no diagnostics under strict validation.
pub fn valid_source<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    for _ in 0..64 {
        let src = valid_candidate(rng, cfg);
        let ast = parse(&src);
        let ok = resolve(&ast)
            .model
            .is_some_and(|m| validate(&m, Strictness::Strict).is_empty());
        if ok {
            return src;
        }
    }
    panic!("generator failed to produce a valid model");
}

fn valid_candidate<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    use StageKind::*;
    let mut bp = Blueprint::default();
    bp.add_machines(rng, cfg);
    let mut patterns = Vec::new();
    for i in 0..bp.machines.len() {
        let p = match rng.gen_range(0..10) {
            0..=3 => Pattern::Source,
            4..=6 => Pattern::Sink,
            7 => Pattern::Relay,
            _ => Pattern::Solo,
        };
        let flow = |bp: &mut Blueprint, a, b| {
            bp.arcs.push(ArcSpec {
                kind: ArcKind::Flow,
                src: (i, a),
                dst: (i, b),
                name: None,
                label: None,
            })
        };
        let kinds: Vec<StageKind> = match p {
            Pattern::Source => {
                if rng.gen_bool(0.5) {
                    flow(&mut bp, Create, Process);
                    flow(&mut bp, Process, Release);
                    vec![Create, Process, Release, Transfer]
                } else {
                    flow(&mut bp, Create, Release);
                    vec![Create, Release, Transfer]
                }
            }
            Pattern::Sink => {
                let mut k = vec![Transfer, Receive];
                flow(&mut bp, Transfer, Receive);
                if rng.gen_bool(0.5) {
                    flow(&mut bp, Receive, Process);
                    k.push(Process);
                }
                k
            }
            Pattern::Relay => vec![Transfer],
            Pattern::Solo => vec![if rng.gen_bool(0.5) { Create } else { Process }],
        };
        if p == Pattern::Source {
            flow(&mut bp, Release, Transfer);
        }
        bp.machines[i].stages = kinds
            .into_iter()
            .map(|k| (k, maybe_label(rng, 0.2)))
            .collect();
        patterns.push(p);
    }
    let of =
        |p: Pattern| -> Vec<usize> { (0..patterns.len()).filter(|&i| patterns[i] == p).collect() };
    let (sources, sinks, relays) = (of(Pattern::Source), of(Pattern::Sink), of(Pattern::Relay));
    for &r in &relays {
        if let Some(&s) = sources.choose(rng) {
            if rng.gen_bool(0.7) {
                push_flow(&mut bp, (s, Transfer), (r, Transfer));
            }
        }
    }
    for &k in &sinks {
        let feeders: Vec<usize> = sources.iter().chain(&relays).copied().collect();
        if let Some(&s) = feeders.choose(rng) {
            if rng.gen_bool(0.8) {
                push_flow(&mut bp, (s, Transfer), (k, Transfer));
            }
        }
    }
    let stages = bp.all_stages();
    let sources_of_trigger: Vec<(usize, StageKind)> =
        stages.iter().copied().filter(|s| s.1 != Transfer).collect();
    let targets: Vec<(usize, StageKind)> = stages
        .iter()
        .copied()
        .filter(|s| matches!(s.1, Create | Process))
        .collect();
    for _ in 0..rng.gen_range(0..=3) {
        if let (Some(&a), Some(&b)) = (sources_of_trigger.choose(rng), targets.choose(rng)) {
            if a != b {
                bp.arcs.push(ArcSpec {
                    kind: ArcKind::Trigger,
                    src: a,
                    dst: b,
                    name: None,
                    label: maybe_label(rng, 0.3),
                });
            }
        }
    }
    let n = rng.gen_range(1..=cfg.max_events.max(1));
    let mut taken = Vec::new();
    for k in 0..n {
        let size = rng.gen_range(1..=5);
        let mut members = bp.grow_region(rng, size, &taken);
        if members.is_empty() {
            break;
        }
        if cfg.disjoint_regions {
            taken.extend(members.iter().copied());
        }
        members.sort();
        members.dedup();
        bp.events.push(EventSpec {
            id: event_id(rng, k),
            label: maybe_label(rng, 0.5),
            stages: members,
            arcs: Vec::new(),
            time: None,
        });
    }
    dedup_event_ids(&mut bp);
    let n = bp.events.len();
    if rng.gen_bool(0.5) {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.3) {
                    edges.push((a, b));
                }
            }
        }
        bp.behavior = Some(edges);
    }
    bp.to_source(rng)
}

fn push_flow(bp: &mut Blueprint, src: (usize, StageKind), dst: (usize, StageKind)) {
    bp.arcs.push(ArcSpec {
        kind: ArcKind::Flow,
        src,
        dst,
        name: None,
        label: None,
    });
}

/// Resolves a generated source. Panics if the generator produced something
/// that does not resolve.
pub fn model_of(source: &str) -> StaticModel {
    let ast = parse(source);
    let resolved = resolve(&ast);
    match resolved.model {
        Some(m) => m,
        None => panic!(
            "generated source does not resolve: {:?}\n{source}",
            resolved.diagnostics
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arbitrary_sources_resolve() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let src = arbitrary_source(&mut rng, &GenConfig::default());
            let ast = parse(&src);
            assert!(!ast.has_errors(), "{:?}\n{src}", ast.diagnostics);
            model_of(&src);
        }
    }

    #[test]
    fn valid_sources_are_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = model_of(&valid_source(&mut rng, &GenConfig::default()));
            assert!(validate(&m, Strictness::Strict).is_empty());
            assert!(!m.events.is_empty());
        }
    }
}

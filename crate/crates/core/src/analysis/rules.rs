//! TM legality rules R1..R9.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagnostic::{sort_diagnostics, Diagnostic, Severity};
use crate::model::{ArcKind, ElementId, StageId, StageKind, StaticModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// Intra-machine flow follows the stage adjacency matrix.
    R1,
    /// Inter-machine flow is transfer to transfer.
    R2,
    /// Triggers end at create or process.
    R3,
    /// Every stage takes part in an arc unless it is its machine's only stage.
    R4,
    /// Every flow component has a create or an imported transfer.
    R5,
    /// Behavior edges reference declared events.
    R6,
    /// Region members resolve and regions are non-empty.
    R7,
    /// Event regions are connected.
    R8,
    /// Triggers fired from a transfer stage (style).
    R9,
}

impl RuleId {
    pub const ALL: [RuleId; 9] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R4 => "R4",
            RuleId::R5 => "R5",
            RuleId::R6 => "R6",
            RuleId::R7 => "R7",
            RuleId::R8 => "R8",
            RuleId::R9 => "R9",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strictness {
    #[default]
    Strict,
    Lax,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    pub strictness: Strictness,
    /// Promotes R8 to an error under strict mode.
    pub connected_regions: bool,
}

/// Classification of an ordered pair of stage kinds for flow arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowClass {
    LegalIntra,
    LegalInter,
    Illegal,
}

/// The stage succession matrix for flows inside one machine.
pub const INTRA_FLOWS: [(StageKind, StageKind); 7] = [
    (StageKind::Create, StageKind::Release),
    (StageKind::Create, StageKind::Process),
    (StageKind::Receive, StageKind::Process),
    (StageKind::Receive, StageKind::Release),
    (StageKind::Process, StageKind::Release),
    (StageKind::Release, StageKind::Transfer),
    (StageKind::Transfer, StageKind::Receive),
];

pub fn classify_flow(src: StageKind, dst: StageKind) -> FlowClass {
    if INTRA_FLOWS.contains(&(src, dst)) {
        FlowClass::LegalIntra
    } else if (src, dst) == (StageKind::Transfer, StageKind::Transfer) {
        FlowClass::LegalInter
    } else {
        FlowClass::Illegal
    }
}

pub fn validate(model: &StaticModel, strictness: Strictness) -> Vec<Diagnostic> {
    validate_with(
        model,
        &ValidateOptions {
            strictness,
            connected_regions: false,
        },
    )
}

pub fn validate_with(model: &StaticModel, opts: &ValidateOptions) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let lint = match opts.strictness {
        Strictness::Strict => Severity::Error,
        Strictness::Lax => Severity::Warning,
    };
    let r8 = if opts.strictness == Strictness::Strict && opts.connected_regions {
        Severity::Error
    } else {
        Severity::Warning
    };
    let mut emit = |rule: RuleId, severity: Severity, span, msg: String| {
        let mut d = Diagnostic::error(rule.code(), span, msg);
        d.severity = severity;
        out.push(d);
    };

    for arc in &model.arcs {
        let span = model.span_of(ElementId::Arc(arc.id));
        let src = model.stage(arc.src);
        let dst = model.stage(arc.dst);
        match arc.kind {
            ArcKind::Flow => {
                let class = classify_flow(src.kind, dst.kind);
                if src.owner == dst.owner {
                    if class != FlowClass::LegalIntra {
                        emit(
                            RuleId::R1,
                            Severity::Error,
                            span,
                            format!(
                                "flow {} -> {} inside machine `{}` is not a legal stage succession",
                                src.kind,
                                dst.kind,
                                model.machine_path(src.owner)
                            ),
                        );
                    }
                } else if class != FlowClass::LegalInter {
                    emit(
                        RuleId::R2,
                        Severity::Error,
                        span,
                        format!(
                            "flow between machines must be transfer -> transfer, found {} -> {} ({})",
                            src.kind,
                            dst.kind,
                            model.arc_display(arc.id)
                        ),
                    );
                }
            }
            ArcKind::Trigger => {
                if !matches!(dst.kind, StageKind::Create | StageKind::Process) {
                    emit(
                        RuleId::R3,
                        Severity::Error,
                        span,
                        format!(
                            "trigger must end at a create or process stage, found {}",
                            model.stage_path(dst.id)
                        ),
                    );
                }
                if src.kind == StageKind::Transfer {
                    emit(
                        RuleId::R9,
                        Severity::Warning,
                        span,
                        format!(
                            "trigger fired from transfer stage {}; consider triggering from the stage that acts",
                            model.stage_path(src.id)
                        ),
                    );
                }
            }
        }
    }

    // R4
    let mut touched = BTreeSet::new();
    for arc in &model.arcs {
        touched.insert(arc.src);
        touched.insert(arc.dst);
    }
    for stage in &model.stages {
        let sole = model.machine(stage.owner).stages.len() == 1;
        if !sole && !touched.contains(&stage.id) {
            emit(
                RuleId::R4,
                lint,
                model.span_of(ElementId::Stage(stage.id)),
                format!("stage {} takes part in no arc", model.stage_path(stage.id)),
            );
        }
    }

    // R5
    for component in flow_components(model) {
        let has_origin = component.iter().any(|&s| {
            let kind = model.stage(s).kind;
            kind == StageKind::Create
                || (kind == StageKind::Transfer && !model.flows().any(|a| a.dst == s))
        });
        if !has_origin {
            let first = component[0];
            emit(
                RuleId::R5,
                lint,
                model.span_of(ElementId::Stage(first)),
                format!(
                    "flow through {} has no origin: no create stage and no imported transfer",
                    model.stage_path(first)
                ),
            );
        }
    }

    // R6 / R7 hold by construction for built models; rechecked for safety of
    // hand-assembled ones.
    if let Some(b) = &model.behavior {
        for (i, (f, t)) in b.edges.iter().enumerate() {
            let span = model
                .behavior_spans
                .get(i)
                .copied()
                .unwrap_or(model.behavior_span);
            for endpoint in [f, t] {
                if model.event(endpoint).is_none() {
                    emit(
                        RuleId::R6,
                        Severity::Error,
                        span,
                        format!(
                            "behavior edge {f} -> {t} references undeclared event `{endpoint}`"
                        ),
                    );
                }
            }
        }
    }
    for (i, event) in model.events.iter().enumerate() {
        let span = model.event_spans.get(i).copied().unwrap_or_default();
        if event.members.is_empty() {
            emit(
                RuleId::R7,
                Severity::Error,
                span,
                format!("event {} has an empty region", event.id),
            );
        }
        let dangling = event
            .region
            .stages
            .iter()
            .any(|s| s.index() >= model.stages.len())
            || event
                .region
                .arcs
                .iter()
                .any(|a| a.index() >= model.arcs.len());
        if dangling {
            emit(
                RuleId::R7,
                Severity::Error,
                span,
                format!("event {} has an unresolved region member", event.id),
            );
        } else if !region_connected(model, event) {
            emit(
                RuleId::R8,
                r8,
                span,
                format!("region of event {} is not connected", event.id),
            );
        }
    }

    sort_diagnostics(&mut out);
    out
}

/// Weakly connected components over stages that take part in a flow arc,
/// each sorted by stage id; components ordered by their first stage.
fn flow_components(model: &StaticModel) -> Vec<Vec<StageId>> {
    let mut parent: BTreeMap<StageId, StageId> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<StageId, StageId>, s: StageId) -> StageId {
        let p = parent[&s];
        if p == s {
            return s;
        }
        let root = find(parent, p);
        parent.insert(s, root);
        root
    }
    for arc in model.flows() {
        parent.entry(arc.src).or_insert(arc.src);
        parent.entry(arc.dst).or_insert(arc.dst);
        let a = find(&mut parent, arc.src);
        let b = find(&mut parent, arc.dst);
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent.insert(hi, lo);
        }
    }
    let stages: Vec<StageId> = parent.keys().copied().collect();
    let mut groups: BTreeMap<StageId, Vec<StageId>> = BTreeMap::new();
    for s in stages {
        let root = find(&mut parent, s);
        groups.entry(root).or_default().push(s);
    }
    groups.into_values().collect()
}

/// Undirected connectivity of a region: stages are nodes, region arcs join
/// their endpoints that lie in the region. Named arcs whose endpoints are both
/// outside still count as isolated members.
pub fn region_connected(model: &StaticModel, event: &crate::model::EventDef) -> bool {
    let region = &event.region;
    let mut nodes: Vec<ElementId> = region.stages.iter().map(|&s| ElementId::Stage(s)).collect();
    nodes.extend(region.arcs.iter().map(|&a| ElementId::Arc(a)));
    if nodes.len() <= 1 {
        return true;
    }
    let mut adj: BTreeMap<ElementId, Vec<ElementId>> = BTreeMap::new();
    for &a in &region.arcs {
        let arc = model.arc(a);
        for end in [arc.src, arc.dst] {
            if region.stages.contains(&end) {
                adj.entry(ElementId::Arc(a))
                    .or_default()
                    .push(ElementId::Stage(end));
                adj.entry(ElementId::Stage(end))
                    .or_default()
                    .push(ElementId::Arc(a));
            }
        }
    }
    let mut seen = BTreeSet::from([nodes[0]]);
    let mut stack = vec![nodes[0]];
    while let Some(n) = stack.pop() {
        for &next in adj.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len() == nodes.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve;
    use crate::syntax::parse;

    fn model(src: &str) -> StaticModel {
        let ast = parse(src);
        assert!(ast.diagnostics.is_empty(), "{:?}", ast.diagnostics);
        let r = resolve(&ast);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        r.model.unwrap()
    }

    fn codes(diags: &[Diagnostic]) -> Vec<(String, Severity)> {
        diags.iter().map(|d| (d.code.clone(), d.severity)).collect()
    }

    #[test]
    fn matrix_counts() {
        let mut counts = [0; 3];
        for a in StageKind::ALL {
            for b in StageKind::ALL {
                counts[classify_flow(a, b) as usize] += 1;
            }
        }
        assert_eq!(counts, [7, 1, 17]);
    }

    #[test]
    fn clean_pipeline() {
        let m = model(
            "machine A { create release transfer }\nmachine B { transfer receive process }\n\
             flow A.create -> A.release\nflow A.release -> A.transfer\n\
             flow A.transfer -> B.transfer\nflow B.transfer -> B.receive\nflow B.receive -> B.process",
        );
        assert!(validate(&m, Strictness::Strict).is_empty());
    }

    #[test]
    fn cross_machine_non_transfer_is_r2() {
        let m = model("machine A { process }\nmachine B { receive }\nflow A.process -> B.receive");
        let d = validate(&m, Strictness::Lax);
        assert_eq!(
            codes(&d),
            vec![
                ("R5".into(), Severity::Warning),
                ("R2".into(), Severity::Error)
            ]
        );
    }

    #[test]
    fn trigger_to_release_is_r3() {
        let m = model("machine X { create process }\nmachine Y { create release }\n\
                       flow X.create -> X.process\nflow Y.create -> Y.release\ntrigger X.process => Y.release");
        let d = validate(&m, Strictness::Strict);
        assert_eq!(codes(&d), vec![("R3".into(), Severity::Error)]);
    }

    #[test]
    fn lax_downgrades_lints_only() {
        let m = model("machine A { create release process }\nmachine B { receive process }\nflow B.receive -> B.process");
        let strict = validate(&m, Strictness::Strict);
        let lax = validate(&m, Strictness::Lax);
        assert_eq!(strict.len(), lax.len());
        assert!(strict.iter().all(Diagnostic::is_error));
        assert!(lax.iter().all(|d| !d.is_error()));
        let c: Vec<_> = strict.iter().map(|d| d.code.as_str()).collect();
        assert_eq!(c, vec!["R4", "R4", "R4", "R5"]);
    }

    #[test]
    fn sole_stage_is_exempt_from_r4() {
        let m = model("machine Home { create }");
        assert!(validate(&m, Strictness::Strict).is_empty());
    }

    #[test]
    fn transfer_import_satisfies_r5() {
        let m = model("machine A { transfer receive }\nflow A.transfer -> A.receive");
        assert!(validate(&m, Strictness::Strict).is_empty());
    }

    #[test]
    fn disconnected_region_r8() {
        let src = "machine A { create release }\nmachine B { create release }\n\
                   flow A.create -> A.release\nflow B.create -> B.release\n\
                   event E1 { region: [A.create, B.create] }";
        let m = model(src);
        let d = validate(&m, Strictness::Strict);
        assert_eq!(codes(&d), vec![("R8".into(), Severity::Warning)]);
        let opts = ValidateOptions {
            strictness: Strictness::Strict,
            connected_regions: true,
        };
        assert_eq!(
            codes(&validate_with(&m, &opts)),
            vec![("R8".into(), Severity::Error)]
        );
        let opts = ValidateOptions {
            strictness: Strictness::Lax,
            connected_regions: true,
        };
        assert_eq!(
            codes(&validate_with(&m, &opts)),
            vec![("R8".into(), Severity::Warning)]
        );
    }

    #[test]
    fn trigger_from_transfer_warns() {
        let m = model(
            "machine A { create release transfer }\nflow A.create -> A.release\n\
                       flow A.release -> A.transfer\ntrigger A.transfer => A.create",
        );
        assert_eq!(
            codes(&validate(&m, Strictness::Strict)),
            vec![("R9".into(), Severity::Warning)]
        );
    }
}

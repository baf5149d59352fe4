//! In-memory Thinging Machine model: a forest of machines, their stages,
//! the flow/trigger arcs between stages, event regions and the declared
//! chronology of events.
//!
//! Models are assembled through [`ModelBuilder`] and are immutable afterwards.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::diagnostic::Span;

/// The five generic actions a machine performs. Arrive and accept are
/// folded into `Receive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl StageKind {
    pub const ALL: [StageKind; 5] = [
        StageKind::Create,
        StageKind::Process,
        StageKind::Release,
        StageKind::Transfer,
        StageKind::Receive,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            StageKind::Create => "create",
            StageKind::Process => "process",
            StageKind::Release => "release",
            StageKind::Transfer => "transfer",
            StageKind::Receive => "receive",
        }
    }

    pub fn from_keyword(word: &str) -> Option<StageKind> {
        StageKind::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Solid (`Flow`) or dashed (`Trigger`) arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcKind {
    Flow,
    Trigger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MachineId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StageId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

impl MachineId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl StageId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Model-wide element identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    Machine(MachineId),
    Stage(StageId),
    Arc(ArcId),
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Machine(m) => write!(f, "m{}", m.0),
            ElementId::Stage(s) => write!(f, "s{}", s.0),
            ElementId::Arc(a) => write!(f, "a{}", a.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineNode {
    pub id: MachineId,
    pub name: String,
    pub parent: Option<MachineId>,
    pub children: Vec<MachineId>,
    pub stages: BTreeMap<StageKind, StageId>,
    pub stores: Vec<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub id: StageId,
    pub owner: MachineId,
    pub kind: StageKind,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub kind: ArcKind,
    pub src: StageId,
    pub dst: StageId,
    pub name: Option<String>,
    pub label: Option<String>,
}

/// A set of stages and arcs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Region {
    pub stages: BTreeSet<StageId>,
    pub arcs: BTreeSet<ArcId>,
}

impl Region {
    pub fn is_empty(&self) -> bool {
        self.stages.is_empty() && self.arcs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.stages.len() + self.arcs.len()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.stages.is_subset(&other.stages) && self.arcs.is_subset(&other.arcs)
    }

    pub fn contains(&self, element: ElementId) -> bool {
        match element {
            ElementId::Stage(s) => self.stages.contains(&s),
            ElementId::Arc(a) => self.arcs.contains(&a),
            ElementId::Machine(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub id: String,
    pub label: Option<String>,
    /// Stages and named arcs listed in the declaration.
    pub members: Region,
    /// `members` closed under the both-endpoints rule for unnamed arcs.
    pub region: Region,
    pub time: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BehaviorGraph {
    /// Every declared event id, in declaration order.
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl BehaviorGraph {
    pub fn successors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |(f, _)| f == node)
            .map(|(_, t)| t.as_str())
    }
}

#[derive(Debug, Clone, Default)]
pub struct StaticModel {
    pub machines: Vec<MachineNode>,
    pub roots: Vec<MachineId>,
    pub stages: Vec<Stage>,
    pub arcs: Vec<Arc>,
    pub events: Vec<EventDef>,
    pub behavior: Option<BehaviorGraph>,
    pub spans: HashMap<ElementId, Span>,
    pub event_spans: Vec<Span>,
    /// Parallel to `behavior.edges`.
    pub behavior_spans: Vec<Span>,
    pub behavior_span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate machine name `{name}`")]
    DuplicateMachine {
        name: String,
        span: Span,
        first: Span,
    },
    #[error("machine `{machine}` already has a {kind} stage")]
    DuplicateStage {
        machine: String,
        kind: StageKind,
        span: Span,
        first: Span,
    },
    #[error("duplicate store `{name}` in machine `{machine}`")]
    DuplicateStore {
        machine: String,
        name: String,
        span: Span,
    },
    #[error("`{name}` does not resolve to any element")]
    Dangling { name: String, span: Span },
    #[error("arc `{name}` starts and ends at the same stage")]
    SelfArc { name: String, span: Span },
    #[error("duplicate arc name `{name}`")]
    DuplicateArcName {
        name: String,
        span: Span,
        first: Span,
    },
    #[error("duplicate event id `{id}`")]
    DuplicateEvent { id: String, span: Span, first: Span },
    #[error("event `{id}` has an empty region")]
    EmptyRegion { id: String, span: Span },
    #[error("behavior edge `{from} -> {to}` references undeclared event `{missing}`")]
    UndeclaredEvent {
        from: String,
        to: String,
        missing: String,
        span: Span,
    },
    #[error("behavior edge `{id} -> {id}` is a self-loop")]
    BehaviorSelfLoop { id: String, span: Span },
}

impl ModelError {
    pub fn span(&self) -> Span {
        match self {
            ModelError::DuplicateMachine { span, .. }
            | ModelError::DuplicateStage { span, .. }
            | ModelError::DuplicateStore { span, .. }
            | ModelError::Dangling { span, .. }
            | ModelError::SelfArc { span, .. }
            | ModelError::DuplicateArcName { span, .. }
            | ModelError::DuplicateEvent { span, .. }
            | ModelError::EmptyRegion { span, .. }
            | ModelError::UndeclaredEvent { span, .. }
            | ModelError::BehaviorSelfLoop { span, .. } => *span,
        }
    }

    /// Span of the earlier conflicting declaration, if any.
    pub fn first_span(&self) -> Option<Span> {
        match self {
            ModelError::DuplicateMachine { first, .. }
            | ModelError::DuplicateStage { first, .. }
            | ModelError::DuplicateArcName { first, .. }
            | ModelError::DuplicateEvent { first, .. } => Some(*first),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LookupError {
    #[error("path syntax error: {0}")]
    Syntax(String),
    #[error("unresolved segment `{segment}` in `{path}`")]
    Unresolved { path: String, segment: String },
}

/// Incremental, validating construction of a [`StaticModel`].
#[derive(Debug, Default)]
pub struct ModelBuilder {
    model: StaticModel,
    arc_names: HashMap<String, ArcId>,
    event_index: HashMap<String, usize>,
    pending_edges: Vec<(String, String, Span)>,
    behavior_declared: bool,
}

impl ModelBuilder {
    pub fn new() -> Self {
        ModelBuilder::default()
    }

    /// Read access to the model built so far, e.g. for path lookups.
    pub fn model(&self) -> &StaticModel {
        &self.model
    }

    pub fn add_machine(
        &mut self,
        parent: Option<MachineId>,
        name: &str,
        label: Option<String>,
        span: Span,
    ) -> Result<MachineId, ModelError> {
        let siblings = match parent {
            Some(p) => &self.model.machines[p.index()].children,
            None => &self.model.roots,
        };
        if let Some(&existing) = siblings
            .iter()
            .find(|&&m| self.model.machines[m.index()].name == name)
        {
            return Err(ModelError::DuplicateMachine {
                name: name.to_string(),
                span,
                first: self.model.span_of(ElementId::Machine(existing)),
            });
        }
        let id = MachineId(self.model.machines.len() as u32);
        self.model.machines.push(MachineNode {
            id,
            name: name.to_string(),
            parent,
            children: Vec::new(),
            stages: BTreeMap::new(),
            stores: Vec::new(),
            label,
        });
        match parent {
            Some(p) => self.model.machines[p.index()].children.push(id),
            None => self.model.roots.push(id),
        }
        self.model.spans.insert(ElementId::Machine(id), span);
        Ok(id)
    }

    pub fn add_stage(
        &mut self,
        owner: MachineId,
        kind: StageKind,
        label: Option<String>,
        span: Span,
    ) -> Result<StageId, ModelError> {
        let machine = &self.model.machines[owner.index()];
        if let Some(&existing) = machine.stages.get(&kind) {
            return Err(ModelError::DuplicateStage {
                machine: self.model.machine_path(owner),
                kind,
                span,
                first: self.model.span_of(ElementId::Stage(existing)),
            });
        }
        let id = StageId(self.model.stages.len() as u32);
        self.model.stages.push(Stage {
            id,
            owner,
            kind,
            label,
        });
        self.model.machines[owner.index()].stages.insert(kind, id);
        self.model.spans.insert(ElementId::Stage(id), span);
        Ok(id)
    }

    pub fn add_store(
        &mut self,
        owner: MachineId,
        name: &str,
        span: Span,
    ) -> Result<(), ModelError> {
        let machine = &mut self.model.machines[owner.index()];
        if machine.stores.iter().any(|s| s == name) {
            return Err(ModelError::DuplicateStore {
                machine: machine.name.clone(),
                name: name.to_string(),
                span,
            });
        }
        machine.stores.push(name.to_string());
        Ok(())
    }

    pub fn add_arc(
        &mut self,
        kind: ArcKind,
        src: StageId,
        dst: StageId,
        name: Option<String>,
        label: Option<String>,
        span: Span,
    ) -> Result<ArcId, ModelError> {
        let id = ArcId(self.model.arcs.len() as u32);
        if src == dst {
            return Err(ModelError::SelfArc {
                name: name.unwrap_or_else(|| self.model.stage_path(src)),
                span,
            });
        }
        if let Some(n) = &name {
            if let Some(&existing) = self.arc_names.get(n) {
                return Err(ModelError::DuplicateArcName {
                    name: n.clone(),
                    span,
                    first: self.model.span_of(ElementId::Arc(existing)),
                });
            }
            if let Some(&root) = self
                .model
                .roots
                .iter()
                .find(|&&r| &self.model.machines[r.index()].name == n)
            {
                // a bare identifier must stay unambiguous in lookups
                return Err(ModelError::DuplicateArcName {
                    name: n.clone(),
                    span,
                    first: self.model.span_of(ElementId::Machine(root)),
                });
            }
            self.arc_names.insert(n.clone(), id);
        }
        self.model.arcs.push(Arc {
            id,
            kind,
            src,
            dst,
            name,
            label,
        });
        self.model.spans.insert(ElementId::Arc(id), span);
        Ok(id)
    }

    /// Adds an event over `members` (stages and named arcs).
    pub fn add_event(
        &mut self,
        id: &str,
        label: Option<String>,
        members: &[ElementId],
        time: Option<String>,
        span: Span,
    ) -> Result<(), ModelError> {
        if let Some(&existing) = self.event_index.get(id) {
            return Err(ModelError::DuplicateEvent {
                id: id.to_string(),
                span,
                first: self.model.event_spans[existing],
            });
        }
        let mut region = Region::default();
        for &m in members {
            match m {
                ElementId::Stage(s) if s.index() < self.model.stages.len() => {
                    region.stages.insert(s);
                }
                ElementId::Arc(a) if a.index() < self.model.arcs.len() => {
                    region.arcs.insert(a);
                }
                other => {
                    return Err(ModelError::Dangling {
                        name: other.to_string(),
                        span,
                    })
                }
            }
        }
        if region.is_empty() {
            return Err(ModelError::EmptyRegion {
                id: id.to_string(),
                span,
            });
        }
        let induced = self.model.induced_region(&region);
        self.event_index
            .insert(id.to_string(), self.model.events.len());
        self.model.events.push(EventDef {
            id: id.to_string(),
            label,
            members: region,
            region: induced,
            time,
        });
        self.model.event_spans.push(span);
        Ok(())
    }

    /// Marks that a behavior block exists, even if it has no edges.
    pub fn declare_behavior(&mut self, span: Span) {
        self.behavior_declared = true;
        self.model.behavior_span = span;
    }

    /// Queues a chronology edge; endpoints are checked in [`finish`](Self::finish)
    /// since events may be declared after the behavior block.
    pub fn add_behavior_edge(&mut self, from: &str, to: &str, span: Span) {
        if !self.behavior_declared {
            self.declare_behavior(span);
        }
        self.pending_edges
            .push((from.to_string(), to.to_string(), span));
    }

    pub fn finish(mut self) -> Result<StaticModel, Vec<ModelError>> {
        let mut errors = Vec::new();
        if self.behavior_declared {
            let mut graph = BehaviorGraph {
                nodes: self.model.events.iter().map(|e| e.id.clone()).collect(),
                edges: Vec::new(),
            };
            for (from, to, span) in std::mem::take(&mut self.pending_edges) {
                if from == to {
                    errors.push(ModelError::BehaviorSelfLoop { id: from, span });
                    continue;
                }
                let missing = [&from, &to]
                    .into_iter()
                    .find(|id| !self.event_index.contains_key(id.as_str()))
                    .cloned();
                if let Some(missing) = missing {
                    errors.push(ModelError::UndeclaredEvent {
                        from,
                        to,
                        missing,
                        span,
                    });
                    continue;
                }
                graph.edges.push((from, to));
                self.model.behavior_spans.push(span);
            }
            self.model.behavior = Some(graph);
        }
        if errors.is_empty() {
            Ok(self.model)
        } else {
            Err(errors)
        }
    }
}

impl StaticModel {
    pub fn machine(&self, id: MachineId) -> &MachineNode {
        &self.machines[id.index()]
    }

    pub fn stage(&self, id: StageId) -> &Stage {
        &self.stages[id.index()]
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.index()]
    }

    pub fn event(&self, id: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn event_position(&self, id: &str) -> Option<usize> {
        self.events.iter().position(|e| e.id == id)
    }

    pub fn span_of(&self, id: ElementId) -> Span {
        self.spans.get(&id).copied().unwrap_or_default()
    }

    pub fn flows(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| a.kind == ArcKind::Flow)
    }

    pub fn triggers(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| a.kind == ArcKind::Trigger)
    }

    /// Dotted path of a machine from its root, e.g. `LoadingDock.Goods`.
    pub fn machine_path(&self, id: MachineId) -> String {
        let mut names = Vec::new();
        let mut cur = Some(id);
        while let Some(m) = cur {
            let node = self.machine(m);
            names.push(node.name.as_str());
            cur = node.parent;
        }
        names.reverse();
        names.join(".")
    }

    pub fn stage_path(&self, id: StageId) -> String {
        let stage = self.stage(id);
        format!("{}.{}", self.machine_path(stage.owner), stage.kind)
    }

    /// Canonical path of an element; unnamed arcs have none.
    pub fn format_path(&self, id: ElementId) -> Option<String> {
        match id {
            ElementId::Machine(m) => Some(self.machine_path(m)),
            ElementId::Stage(s) => Some(self.stage_path(s)),
            ElementId::Arc(a) => self.arc(a).name.clone(),
        }
    }

    /// Human-readable reference to an arc: its name or `src -> dst`.
    pub fn arc_display(&self, id: ArcId) -> String {
        let arc = self.arc(id);
        match &arc.name {
            Some(n) => n.clone(),
            None => {
                let arrow = match arc.kind {
                    ArcKind::Flow => "->",
                    ArcKind::Trigger => "=>",
                };
                format!(
                    "{} {arrow} {}",
                    self.stage_path(arc.src),
                    self.stage_path(arc.dst)
                )
            }
        }
    }

    /// Resolves machine names from the roots. On failure returns the index of
    /// the first segment that did not resolve.
    pub fn resolve_machine<S: AsRef<str>>(&self, segments: &[S]) -> Result<MachineId, usize> {
        let mut candidates = &self.roots;
        let mut found = None;
        for (i, seg) in segments.iter().enumerate() {
            let m = candidates
                .iter()
                .copied()
                .find(|&m| self.machine(m).name == seg.as_ref())
                .ok_or(i)?;
            found = Some(m);
            candidates = &self.machine(m).children;
        }
        found.ok_or(0)
    }

    pub fn arc_by_name(&self, name: &str) -> Option<ArcId> {
        self.arcs
            .iter()
            .find(|a| a.name.as_deref() == Some(name))
            .map(|a| a.id)
    }

    /// Resolves `M(.M)*.stagekind`, `M(.M)*` or a named-arc identifier.
    pub fn lookup(&self, path: &str) -> Result<ElementId, LookupError> {
        if path.is_empty() {
            return Err(LookupError::Syntax("empty path".into()));
        }
        let segments: Vec<&str> = path.split('.').collect();
        for seg in &segments {
            let mut chars = seg.chars();
            let valid = chars
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(LookupError::Syntax(format!(
                    "`{seg}` is not an identifier in `{path}`"
                )));
            }
        }
        let unresolved = |i: usize| LookupError::Unresolved {
            path: path.to_string(),
            segment: segments[i].to_string(),
        };
        let last = *segments.last().unwrap();
        if let Some(kind) = StageKind::from_keyword(last) {
            if segments.len() == 1 {
                return Err(LookupError::Syntax(format!(
                    "stage `{last}` needs a machine path"
                )));
            }
            let machine = self
                .resolve_machine(&segments[..segments.len() - 1])
                .map_err(unresolved)?;
            return self
                .machine(machine)
                .stages
                .get(&kind)
                .map(|&s| ElementId::Stage(s))
                .ok_or_else(|| unresolved(segments.len() - 1));
        }
        match self.resolve_machine(&segments) {
            Ok(m) => Ok(ElementId::Machine(m)),
            Err(i) if segments.len() == 1 => self
                .arc_by_name(last)
                .map(ElementId::Arc)
                .ok_or_else(|| unresolved(i)),
            Err(i) => Err(unresolved(i)),
        }
    }

    /// `members` plus every unnamed arc with both endpoints among its stages.
    /// Named arcs join only when listed.
    pub fn induced_region(&self, members: &Region) -> Region {
        let mut region = members.clone();
        for arc in &self.arcs {
            if arc.name.is_none()
                && members.stages.contains(&arc.src)
                && members.stages.contains(&arc.dst)
            {
                region.arcs.insert(arc.id);
            }
        }
        region
    }

    /// Every stage of every machine.
    pub fn all_stages_region(&self) -> Region {
        Region {
            stages: self.stages.iter().map(|s| s.id).collect(),
            arcs: BTreeSet::new(),
        }
    }

    /// Events whose region contains `stage`, in declaration order.
    pub fn events_containing_stage(&self, stage: StageId) -> Vec<usize> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.region.stages.contains(&stage))
            .map(|(i, _)| i)
            .collect()
    }

    /// Re-checks every structural invariant; returns one message per violation.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, m) in self.machines.iter().enumerate() {
            if m.id.index() != i {
                problems.push(format!("machine {} stored at index {i}", m.id.0));
            }
            let siblings = match m.parent {
                Some(p) => {
                    if p.index() >= self.machines.len() {
                        problems.push(format!("machine {} has missing parent", m.name));
                        continue;
                    }
                    if !self.machine(p).children.contains(&m.id) {
                        problems.push(format!("machine {} missing from parent", m.name));
                    }
                    &self.machine(p).children
                }
                None => {
                    if !self.roots.contains(&m.id) {
                        problems.push(format!("root machine {} not listed", m.name));
                    }
                    &self.roots
                }
            };
            let same_name = siblings
                .iter()
                .filter(|&&s| self.machine(s).name == m.name)
                .count();
            if same_name != 1 {
                problems.push(format!("sibling name `{}` not unique", m.name));
            }
            for (&kind, &s) in &m.stages {
                if s.index() >= self.stages.len()
                    || self.stage(s).kind != kind
                    || self.stage(s).owner != m.id
                {
                    problems.push(format!("machine {} has inconsistent {kind} stage", m.name));
                }
            }
        }
        // forest: walking parents from any node terminates
        for m in &self.machines {
            let mut seen = BTreeSet::new();
            let mut cur = Some(m.id);
            while let Some(c) = cur {
                if !seen.insert(c) {
                    problems.push(format!("machine {} is on a parent cycle", m.name));
                    break;
                }
                cur = self.machines.get(c.index()).and_then(|n| n.parent);
            }
        }
        for s in &self.stages {
            if s.owner.index() >= self.machines.len() {
                problems.push(format!("stage {} has missing owner", s.id.0));
            } else if self.machine(s.owner).stages.get(&s.kind) != Some(&s.id) {
                problems.push(format!("stage {} not registered on owner", s.id.0));
            }
        }
        for a in &self.arcs {
            if a.src == a.dst {
                problems.push(format!("arc {} is a self-arc", a.id.0));
            }
            if a.src.index() >= self.stages.len() || a.dst.index() >= self.stages.len() {
                problems.push(format!("arc {} has a dangling endpoint", a.id.0));
            }
        }
        let mut event_ids = BTreeSet::new();
        for e in &self.events {
            if !event_ids.insert(e.id.as_str()) {
                problems.push(format!("duplicate event id {}", e.id));
            }
            if e.members.is_empty() {
                problems.push(format!("event {} has an empty region", e.id));
            }
            if e.region
                .stages
                .iter()
                .any(|s| s.index() >= self.stages.len())
                || e.region.arcs.iter().any(|a| a.index() >= self.arcs.len())
            {
                problems.push(format!("event {} has a dangling member", e.id));
            }
        }
        if let Some(b) = &self.behavior {
            for (f, t) in &b.edges {
                if f == t {
                    problems.push(format!("behavior self-loop on {f}"));
                }
                if !event_ids.contains(f.as_str()) || !event_ids.contains(t.as_str()) {
                    problems.push(format!("behavior edge {f} -> {t} has undeclared endpoint"));
                }
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_machines() -> StaticModel {
        let mut b = ModelBuilder::new();
        let span = Span::default();
        let a = b.add_machine(None, "A", None, span).unwrap();
        let c = b.add_machine(None, "B", None, span).unwrap();
        b.add_stage(a, StageKind::Create, None, span).unwrap();
        let at = b.add_stage(a, StageKind::Transfer, None, span).unwrap();
        b.add_stage(c, StageKind::Create, None, span).unwrap();
        let bt = b.add_stage(c, StageKind::Transfer, None, span).unwrap();
        b.add_arc(ArcKind::Flow, at, bt, None, None, span).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn empty_builder() {
        let m = ModelBuilder::new().finish().unwrap();
        assert!(m.machines.is_empty() && m.arcs.is_empty() && m.events.is_empty());
        assert!(m.behavior.is_none());
    }

    #[test]
    fn direct_construction_counts() {
        let m = two_machines();
        assert_eq!((m.machines.len(), m.stages.len(), m.arcs.len()), (2, 4, 1));
        assert!(m.check_invariants().is_empty());
    }

    #[test]
    fn duplicate_sibling_and_stage() {
        let mut b = ModelBuilder::new();
        let span = Span::default();
        let a = b.add_machine(None, "A", None, span).unwrap();
        assert!(matches!(
            b.add_machine(None, "A", None, span),
            Err(ModelError::DuplicateMachine { .. })
        ));
        // same name under a different parent is fine
        b.add_machine(Some(a), "A", None, span).unwrap();
        b.add_stage(a, StageKind::Create, None, span).unwrap();
        let err = b.add_stage(a, StageKind::Create, None, span).unwrap_err();
        assert_eq!(err.to_string(), "machine `A` already has a create stage");
    }

    #[test]
    fn self_arc_and_arc_name_clash() {
        let mut b = ModelBuilder::new();
        let span = Span::default();
        let a = b.add_machine(None, "A", None, span).unwrap();
        let s = b.add_stage(a, StageKind::Create, None, span).unwrap();
        let r = b.add_stage(a, StageKind::Release, None, span).unwrap();
        assert!(matches!(
            b.add_arc(ArcKind::Flow, s, s, None, None, span),
            Err(ModelError::SelfArc { .. })
        ));
        assert!(matches!(
            b.add_arc(ArcKind::Flow, s, r, Some("A".into()), None, span),
            Err(ModelError::DuplicateArcName { .. })
        ));
    }

    #[test]
    fn lookup_paths() {
        let m = two_machines();
        assert_eq!(m.lookup("A.transfer"), Ok(ElementId::Stage(StageId(1))));
        assert_eq!(m.lookup("B"), Ok(ElementId::Machine(MachineId(1))));
        assert_eq!(
            m.lookup("Nonexistent.create"),
            Err(LookupError::Unresolved {
                path: "Nonexistent.create".into(),
                segment: "Nonexistent".into()
            })
        );
        assert!(matches!(m.lookup(""), Err(LookupError::Syntax(_))));
        assert!(matches!(m.lookup("A..create"), Err(LookupError::Syntax(_))));
        assert!(matches!(
            m.lookup("A.receive"),
            Err(LookupError::Unresolved { segment, .. }) if segment == "receive"
        ));
    }

    #[test]
    fn induced_region_rules() {
        let m = two_machines();
        let whole = m.induced_region(&m.all_stages_region());
        assert_eq!(whole.stages.len(), 4);
        assert_eq!(whole.arcs.len(), 1);
        let pair = Region {
            stages: [StageId(1), StageId(3)].into(),
            arcs: BTreeSet::new(),
        };
        assert_eq!(m.induced_region(&pair).len(), 3);
        let single = Region {
            stages: [StageId(1)].into(),
            arcs: BTreeSet::new(),
        };
        assert!(m.induced_region(&single).arcs.is_empty());
    }

    #[test]
    fn behavior_edges_checked_at_finish() {
        let mut b = ModelBuilder::new();
        let span = Span::default();
        let a = b.add_machine(None, "A", None, span).unwrap();
        let s = b.add_stage(a, StageKind::Create, None, span).unwrap();
        b.add_behavior_edge("E1", "E2", span);
        b.add_event("E1", None, &[ElementId::Stage(s)], None, span)
            .unwrap();
        assert!(matches!(
            b.add_event("E1", None, &[ElementId::Stage(s)], None, span),
            Err(ModelError::DuplicateEvent { .. })
        ));
        assert!(matches!(
            b.add_event("E3", None, &[], None, span),
            Err(ModelError::EmptyRegion { .. })
        ));
        let errs = b.finish().unwrap_err();
        assert!(matches!(&errs[0], ModelError::UndeclaredEvent { missing, .. } if missing == "E2"));
    }
}

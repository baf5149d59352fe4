//! Event-by-event token game over a static model.
//!
//! Stages pull tokens from the sources of their incoming flow arcs when they
//! fire: create mints, release marks ready, transfer moves ready tokens across
//! machine boundaries, receive admits arrived tokens and process bumps the
//! processed count. Triggers move nothing; they only record activations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use crate::diagnostic::{Diagnostic, Span};
use crate::model::{ArcKind, ElementId, MachineId, StageId, StageKind, StaticModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenId(pub u32);

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenStatus {
    /// Inside a machine, not yet released.
    Held,
    /// Released; may leave through a transfer.
    Ready,
    /// Came in through a transfer from the given stage of another machine.
    Arrived { from: StageId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    /// Always a create stage.
    pub birth: StageId,
    pub location: MachineId,
    pub at: StageId,
    pub status: TokenStatus,
    pub processed: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Fired,
    Minted,
    Moved,
    Received,
    Processed,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Fired => "fired",
            Action::Minted => "minted",
            Action::Moved => "moved",
            Action::Received => "received",
            Action::Processed => "processed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Firing {
    pub stage: StageId,
    pub action: Action,
    pub token: Option<TokenId>,
}

/// Trigger arc whose source fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    pub arc: crate::model::ArcId,
    pub target_events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub event: String,
    pub firings: Vec<Firing>,
    pub activations: Vec<Activation>,
    /// Token count per machine after this step; every machine is listed.
    pub ledger: BTreeMap<MachineId, usize>,
    /// Create firings so far, including this step.
    pub minted_so_far: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventTrace {
    pub steps: Vec<TraceStep>,
    pub tokens: Vec<Token>,
    /// `S1` under-supplied receive (error), `S2` trigger into an event that
    /// can no longer fire (warning).
    pub diagnostics: Vec<Diagnostic>,
}

impl EventTrace {
    pub fn total_tokens(&self) -> usize {
        self.tokens.len()
    }

    /// Token count per machine at the end of the trace; every machine is listed.
    pub fn final_ledger(&self, model: &StaticModel) -> BTreeMap<MachineId, usize> {
        match self.steps.last() {
            Some(step) => step.ledger.clone(),
            None => model.machines.iter().map(|m| (m.id, 0)).collect(),
        }
    }

    /// Tokens born at `create`, e.g. `model.lookup("Vendor.Goods.create")`.
    pub fn tokens_born_at(&self, create: StageId) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.birth == create)
    }

    /// One line per firing:
    /// `step=<n> event=<id> stage=<path> action=<action> token=<id|->`.
    pub fn to_text(&self, model: &StaticModel) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            for f in &step.firings {
                let token = f
                    .token
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "-".to_string());
                let _ = writeln!(
                    out,
                    "step={} event={} stage={} action={} token={}",
                    i + 1,
                    step.event,
                    model.stage_path(f.stage),
                    f.action.as_str(),
                    token
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimulateError {
    #[error("schedule references unknown event `{0}`")]
    UnknownEvent(String),
    #[error("event `{0}` appears more than once in the schedule")]
    Repeated(String),
}

/// Fires the events of `schedule` in order.
pub fn simulate(model: &StaticModel, schedule: &[String]) -> Result<EventTrace, SimulateError> {
    let mut positions = Vec::with_capacity(schedule.len());
    let mut seen = BTreeSet::new();
    for id in schedule {
        let pos = model
            .event_position(id)
            .ok_or_else(|| SimulateError::UnknownEvent(id.clone()))?;
        if !seen.insert(pos) {
            return Err(SimulateError::Repeated(id.clone()));
        }
        positions.push(pos);
    }

    let mut sim = Simulator {
        model,
        tokens: Vec::new(),
        fired_events: BTreeSet::new(),
        scheduled: positions.iter().copied().collect(),
        minted: 0,
        diagnostics: Vec::new(),
    };
    let mut steps = Vec::with_capacity(positions.len());
    for &pos in &positions {
        steps.push(sim.fire_event(pos));
    }
    Ok(EventTrace {
        steps,
        tokens: sim.tokens,
        diagnostics: sim.diagnostics,
    })
}

struct Simulator<'m> {
    model: &'m StaticModel,
    tokens: Vec<Token>,
    fired_events: BTreeSet<usize>,
    scheduled: BTreeSet<usize>,
    minted: usize,
    diagnostics: Vec<Diagnostic>,
}

impl Simulator<'_> {
    fn fire_event(&mut self, pos: usize) -> TraceStep {
        let model = self.model;
        let event = &model.events[pos];
        let mut firings = Vec::new();
        let mut activations = Vec::new();
        for stage in firing_order(model, &event.region.stages) {
            self.fire_stage(stage, pos, &mut firings);
            for arc in model.triggers().filter(|a| a.src == stage) {
                activations.push(self.activate(arc.id, pos));
            }
        }
        self.fired_events.insert(pos);
        let mut ledger: BTreeMap<MachineId, usize> =
            model.machines.iter().map(|m| (m.id, 0)).collect();
        for t in &self.tokens {
            *ledger.entry(t.location).or_default() += 1;
        }
        TraceStep {
            event: event.id.clone(),
            firings,
            activations,
            ledger,
            minted_so_far: self.minted,
        }
    }

    fn fire_stage(&mut self, stage: StageId, pos: usize, firings: &mut Vec<Firing>) {
        let model = self.model;
        let target = model.stage(stage);
        let before = firings.len();

        let mut incoming: Vec<_> = model.flows().filter(|a| a.dst == stage).collect();
        incoming.sort_by_key(|a| a.id);
        for arc in incoming {
            let source = model.stage(arc.src);
            let inter = source.owner != target.owner;
            for token in self.tokens.iter_mut().filter(|t| t.at == arc.src) {
                let eligible = if inter {
                    match token.status {
                        TokenStatus::Ready => true,
                        TokenStatus::Arrived { from } => from != stage,
                        TokenStatus::Held => false,
                    }
                } else {
                    match (source.kind, token.status) {
                        (StageKind::Transfer, TokenStatus::Arrived { .. }) => {
                            target.kind == StageKind::Receive
                        }
                        (StageKind::Release, TokenStatus::Ready) => true,
                        (_, TokenStatus::Held) => source.kind != StageKind::Release,
                        _ => false,
                    }
                };
                if !eligible {
                    continue;
                }
                token.at = stage;
                token.location = target.owner;
                let action = if inter {
                    token.status = TokenStatus::Arrived { from: arc.src };
                    Action::Moved
                } else {
                    token.status = match target.kind {
                        StageKind::Release | StageKind::Transfer => TokenStatus::Ready,
                        _ => TokenStatus::Held,
                    };
                    match target.kind {
                        StageKind::Receive => Action::Received,
                        _ => Action::Fired,
                    }
                };
                if target.kind != StageKind::Process {
                    firings.push(Firing {
                        stage,
                        action,
                        token: Some(token.id),
                    });
                }
            }
        }

        match target.kind {
            StageKind::Create => {
                let id = TokenId(self.tokens.len() as u32 + 1);
                self.tokens.push(Token {
                    id,
                    birth: stage,
                    location: target.owner,
                    at: stage,
                    status: TokenStatus::Held,
                    processed: 0,
                });
                self.minted += 1;
                firings.push(Firing {
                    stage,
                    action: Action::Minted,
                    token: Some(id),
                });
            }
            StageKind::Process => {
                for token in self.tokens.iter_mut().filter(|t| t.at == stage) {
                    token.processed += 1;
                    firings.push(Firing {
                        stage,
                        action: Action::Processed,
                        token: Some(token.id),
                    });
                }
            }
            StageKind::Receive => {
                if !self.tokens.iter().any(|t| t.at == stage) {
                    self.diagnostics.push(Diagnostic::error(
                        "S1",
                        model.span_of(ElementId::Stage(stage)),
                        format!(
                            "event {}: {} has no token to receive (under-supplied flow)",
                            model.events[pos].id,
                            model.stage_path(stage)
                        ),
                    ));
                }
            }
            StageKind::Release | StageKind::Transfer => {}
        }

        if firings.len() == before {
            firings.push(Firing {
                stage,
                action: Action::Fired,
                token: None,
            });
        }
    }

    fn activate(&mut self, arc: crate::model::ArcId, pos: usize) -> Activation {
        let model = self.model;
        let dst = model.arc(arc).dst;
        let owners = model.events_containing_stage(dst);
        let target_events = owners.iter().map(|&i| model.events[i].id.clone()).collect();
        let can_still_fire = owners
            .iter()
            .any(|&i| i == pos || (self.scheduled.contains(&i) && !self.fired_events.contains(&i)));
        if !can_still_fire {
            let span: Span = model.span_of(ElementId::Arc(arc));
            let msg = if owners.is_empty() {
                format!(
                    "event {}: trigger {} activates a stage outside every event",
                    model.events[pos].id,
                    model.arc_display(arc)
                )
            } else {
                format!(
                    "event {}: trigger {} activates an event that already fired or is not scheduled",
                    model.events[pos].id,
                    model.arc_display(arc)
                )
            };
            self.diagnostics.push(Diagnostic::warning("S2", span, msg));
        }
        Activation { arc, target_events }
    }
}

/// Region stages ordered by the flow and trigger arcs among them; ties and
/// cycles fall back to ascending stage id.
pub fn firing_order(model: &StaticModel, stages: &BTreeSet<StageId>) -> Vec<StageId> {
    let mut indegree: BTreeMap<StageId, usize> = stages.iter().map(|&s| (s, 0)).collect();
    let edges: Vec<(StageId, StageId)> = model
        .arcs
        .iter()
        .filter(|a| stages.contains(&a.src) && stages.contains(&a.dst))
        .filter(|a| matches!(a.kind, ArcKind::Flow | ArcKind::Trigger))
        .map(|a| (a.src, a.dst))
        .collect();
    for &(_, d) in &edges {
        *indegree.get_mut(&d).unwrap() += 1;
    }
    let mut order = Vec::with_capacity(stages.len());
    let mut done = BTreeSet::new();
    while order.len() < stages.len() {
        let next = indegree
            .iter()
            .find(|(s, &d)| d == 0 && !done.contains(*s))
            .map(|(&s, _)| s)
            // cycle: take the smallest stage not yet fired
            .unwrap_or_else(|| *stages.iter().find(|s| !done.contains(*s)).unwrap());
        done.insert(next);
        order.push(next);
        for &(s, d) in &edges {
            if s == next && !done.contains(&d) {
                let deg = indegree.get_mut(&d).unwrap();
                *deg = deg.saturating_sub(1);
            }
        }
    }
    order
}

use serde::Serialize;

use crate::diagnostic::Diagnostic;
use crate::model::{StageKind, StaticModel};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub create: usize,
    pub process: usize,
    pub release: usize,
    pub transfer: usize,
    pub receive: usize,
}

impl StageCounts {
    pub fn get(&self, kind: StageKind) -> usize {
        match kind {
            StageKind::Create => self.create,
            StageKind::Process => self.process,
            StageKind::Release => self.release,
            StageKind::Transfer => self.transfer,
            StageKind::Receive => self.receive,
        }
    }

    pub fn total(&self) -> usize {
        StageKind::ALL.iter().map(|&k| self.get(k)).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiagnosticSummary {
    pub errors: usize,
    pub warnings: usize,
}

/// Element counts of a model. Serializes with the stable field names
/// `machines`, `stages{create,process,release,transfer,receive}`, `flows`,
/// `triggers`, `events`, `behavior_edges`, `diagnostics{errors,warnings}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub machines: usize,
    pub stages: StageCounts,
    pub flows: usize,
    pub triggers: usize,
    pub events: usize,
    pub behavior_edges: usize,
    pub diagnostics: DiagnosticSummary,
}

impl Report {
    pub fn with_diagnostics(mut self, diags: &[Diagnostic]) -> Self {
        let errors = crate::diagnostic::count_errors(diags);
        self.diagnostics = DiagnosticSummary {
            errors,
            warnings: diags.len() - errors,
        };
        self
    }
}

pub fn summarize(model: &StaticModel) -> Report {
    let mut stages = StageCounts::default();
    for s in &model.stages {
        let slot = match s.kind {
            StageKind::Create => &mut stages.create,
            StageKind::Process => &mut stages.process,
            StageKind::Release => &mut stages.release,
            StageKind::Transfer => &mut stages.transfer,
            StageKind::Receive => &mut stages.receive,
        };
        *slot += 1;
    }
    Report {
        machines: model.machines.len(),
        stages,
        flows: model.flows().count(),
        triggers: model.triggers().count(),
        events: model.events.len(),
        behavior_edges: model.behavior.as_ref().map_or(0, |b| b.edges.len()),
        diagnostics: DiagnosticSummary::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_is_all_zero() {
        let r = summarize(&StaticModel::default());
        assert_eq!(r, Report::default());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "machines": 0,
                "stages": {"create": 0, "process": 0, "release": 0, "transfer": 0, "receive": 0},
                "flows": 0, "triggers": 0, "events": 0, "behavior_edges": 0,
                "diagnostics": {"errors": 0, "warnings": 0}
            })
        );
    }
}

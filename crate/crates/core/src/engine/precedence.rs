use std::collections::BTreeMap;

use crate::model::{ArcId, StaticModel};

/// Inferred ordering between events. `(e, f)` means event `e` must not fire
/// after `f`'s first firing; each pair is justified by the arcs that lead
/// from `e`'s region into `f`'s region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrecedenceRelation {
    events: Vec<String>,
    justification: BTreeMap<(usize, usize), Vec<ArcId>>,
}

impl PrecedenceRelation {
    pub fn is_empty(&self) -> bool {
        self.justification.is_empty()
    }

    pub fn len(&self) -> usize {
        self.justification.len()
    }

    pub fn contains(&self, before: &str, after: &str) -> bool {
        self.justification(before, after).is_some()
    }

    pub fn justification(&self, before: &str, after: &str) -> Option<&[ArcId]> {
        let e = self.events.iter().position(|x| x == before)?;
        let f = self.events.iter().position(|x| x == after)?;
        self.justification.get(&(e, f)).map(Vec::as_slice)
    }

    /// Pairs ordered by the declaration position of their events.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, &[ArcId])> {
        self.justification.iter().map(|(&(e, f), arcs)| {
            (
                self.events[e].as_str(),
                self.events[f].as_str(),
                arcs.as_slice(),
            )
        })
    }

    /// Events with a pair ending at `event`, in declaration order.
    pub fn predecessors(&self, event: &str) -> Vec<&str> {
        self.pairs()
            .filter(|(_, f, _)| *f == event)
            .map(|(e, _, _)| e)
            .collect()
    }
}

/// Derives precedence from arcs crossing event boundaries: `(E, F)` holds
/// when some arc starts at a stage of `E`, ends at a stage of `F`, and lies
/// inside neither region. An arc inside a region belongs to that event's own
/// firing, so shared stages never order events by themselves.
pub fn infer_dependencies(model: &StaticModel) -> PrecedenceRelation {
    let mut by_stage: Vec<Vec<usize>> = vec![Vec::new(); model.stages.len()];
    for (i, event) in model.events.iter().enumerate() {
        for s in &event.region.stages {
            by_stage[s.index()].push(i);
        }
    }
    let mut justification: BTreeMap<(usize, usize), Vec<ArcId>> = BTreeMap::new();
    for arc in &model.arcs {
        for &e in &by_stage[arc.src.index()] {
            for &f in &by_stage[arc.dst.index()] {
                if e == f {
                    continue;
                }
                let internal = model.events[e].region.arcs.contains(&arc.id)
                    || model.events[f].region.arcs.contains(&arc.id);
                if !internal {
                    justification.entry((e, f)).or_default().push(arc.id);
                }
            }
        }
    }
    PrecedenceRelation {
        events: model.events.iter().map(|e| e.id.clone()).collect(),
        justification,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve;
    use crate::syntax::parse;

    fn model(src: &str) -> StaticModel {
        resolve(&parse(src)).model.expect("resolves")
    }

    const CHAIN: &str = "machine A { create release transfer }\nmachine B { transfer receive }\n\
        flow A.create -> A.release\nflow A.release -> A.transfer\n\
        flow A.transfer -> B.transfer\nflow B.transfer -> B.receive\n";

    #[test]
    fn whole_model_event_has_no_pairs() {
        let m = model(&format!(
            "{CHAIN}event E1 {{ region: [A.create, A.release, A.transfer, B.transfer, B.receive] }}"
        ));
        assert!(infer_dependencies(&m).is_empty());
    }

    #[test]
    fn disjoint_unconnected_regions() {
        let m = model(&format!(
            "{CHAIN}event E1 {{ region: [A.create] }}\nevent E2 {{ region: [B.receive] }}"
        ));
        assert!(infer_dependencies(&m).is_empty());
    }

    #[test]
    fn crossing_arc_orders_events() {
        let m = model(&format!(
            "{CHAIN}event E1 {{ region: [A.create, A.release, A.transfer] }}\n\
             event E2 {{ region: [B.transfer, B.receive] }}"
        ));
        let rel = infer_dependencies(&m);
        assert_eq!(rel.len(), 1);
        assert!(rel.contains("E1", "E2"));
        let arcs = rel.justification("E1", "E2").unwrap();
        assert_eq!(m.arc_display(arcs[0]), "A.transfer -> B.transfer");
        assert_eq!(rel.predecessors("E2"), vec!["E1"]);
    }

    #[test]
    fn shared_internal_arc_is_not_a_boundary() {
        let m = model(&format!(
            "{CHAIN}event E1 {{ region: [A.create, A.release] }}\n\
             event E2 {{ region: [A.create, A.release] }}"
        ));
        assert!(infer_dependencies(&m).is_empty());
    }

    #[test]
    fn arcs_inside_either_region_do_not_order() {
        let m = model(&format!(
            "{CHAIN}event E1 {{ region: [A.create, A.release] }}\n\
             event E2 {{ region: [A.release, A.transfer] }}"
        ));
        assert!(infer_dependencies(&m).is_empty());
    }

    #[test]
    fn receive_and_resend_cycle_stays_forward() {
        // B receives in E2 and sends back out through the same transfer in E3
        let src = "machine A { create release transfer }\n\
                   machine B { transfer receive release }\nmachine C { transfer receive }\n\
                   flow A.create -> A.release\nflow A.release -> A.transfer\n\
                   flow A.transfer -> B.transfer\nflow B.transfer -> B.receive\n\
                   flow B.receive -> B.release\nflow B.release -> B.transfer\n\
                   flow B.transfer -> C.transfer\nflow C.transfer -> C.receive\n\
                   event E1 { region: [A.create, A.release, A.transfer] }\n\
                   event E2 { region: [B.transfer, B.receive] }\n\
                   event E3 { region: [B.release, B.transfer, C.transfer, C.receive] }\n";
        let rel = infer_dependencies(&model(src));
        let pairs: Vec<_> = rel.pairs().map(|(e, f, _)| (e, f)).collect();
        assert_eq!(pairs, vec![("E1", "E2"), ("E1", "E3"), ("E2", "E3")]);
    }
}

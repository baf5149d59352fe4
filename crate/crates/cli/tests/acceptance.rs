//! One PASS/FAIL line per acceptance criterion; fails if any criterion does.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{corpus, corpus_model, corpus_path, dot, oracle_precedence, CORPUS};
use tm_cli::{run_with, Env};
use tm_core::analysis::{classify_flow, validate, FlowClass, Strictness};
use tm_core::engine::simulate::Action;
use tm_core::engine::{infer_dependencies, linearize, simulate, validate_behavior};
use tm_core::generate::{arbitrary_source, model_of, valid_source, GenConfig};
use tm_core::render::{render, render_behavior, RenderMode, RenderOptions};
use tm_core::syntax::{format, parse};
use tm_core::{ArcKind, StageKind, StaticModel};

const CORPUS_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const ORACLE_MODELS: u64 = 200;
const FUZZ_ROUND_TRIPS: u64 = 500;
const RANDOM_SIMULATIONS: u64 = 100;

type Verdict = Result<(), String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Verdict {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tm(args: &[&str]) -> tm_cli::Outcome {
    run_with(
        std::iter::once("tm").chain(args.iter().copied()),
        &Env::plain(),
    )
}

fn corpus_validity() -> Verdict {
    let start = Instant::now();
    for (name, _) in CORPUS {
        let checked = tm_core::check(&corpus(name), &Default::default());
        ensure(checked.diagnostics.is_empty(), || {
            format!("{name}: {:?}", checked.diagnostics)
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < CORPUS_BUDGET, || format!("took {elapsed:?}"))
}

fn event_counts() -> Verdict {
    for (name, expected) in CORPUS {
        let out = tm(&["events", "--json", &corpus_path(name).display().to_string()]);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
        let n = v["events"].as_array().map_or(0, Vec::len);
        ensure(n == expected, || {
            format!("{name}: {n} events, expected {expected}")
        })?;
    }
    Ok(())
}

fn chronology() -> Verdict {
    for (name, n) in CORPUS {
        let model = corpus_model(name);
        let prefix = if name == "propp" { "F" } else { "E" };
        let expected: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        let out = tm(&["behavior", &corpus_path(name).display().to_string()]);
        let printed: Vec<&str> = out.stdout.lines().collect();
        ensure(out.code == 0 && printed == expected, || {
            format!("{name}: {printed:?}")
        })?;
        let diags = validate_behavior(&model, false).map_err(|e| e.to_string())?;
        let b1 = diags.iter().filter(|d| d.code == "B1").count();
        ensure(b1 == 0, || format!("{name}: {b1} B1 contradictions"))?;
    }
    Ok(())
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    for seed in 0..ORACLE_MODELS {
        let model = model_of(&arbitrary_source(
            &mut ChaCha8Rng::seed_from_u64(seed),
            &GenConfig::default(),
        ));
        ensure(model.events.len() <= 6 && model.arcs.len() <= 20, || {
            format!("seed {seed} too large")
        })?;
        let got: BTreeSet<(String, String)> = infer_dependencies(&model)
            .pairs()
            .map(|(e, f, _)| (e.to_string(), f.to_string()))
            .collect();
        ensure(got == oracle_precedence(&model), || {
            format!("seed {seed} differs")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ORACLE_BUDGET, || format!("took {elapsed:?}"))
}

fn legal(src: StageKind, dst: StageKind, same_machine: bool) -> bool {
    use StageKind::*;
    if !same_machine {
        return src == Transfer && dst == Transfer;
    }
    matches!(
        (src, dst),
        (Create, Release)
            | (Create, Process)
            | (Receive, Process)
            | (Receive, Release)
            | (Process, Release)
            | (Release, Transfer)
            | (Transfer, Receive)
    )
}

fn rule_hits(src: &str) -> Vec<String> {
    validate(&model_of(src), Strictness::Lax)
        .into_iter()
        .filter(|d| d.code == "R1" || d.code == "R2")
        .map(|d| d.code)
        .collect()
}

fn legality_matrix() -> Verdict {
    let mut classified = 0;
    for src in StageKind::ALL {
        for dst in StageKind::ALL {
            let (s, d) = (src.keyword(), dst.keyword());
            let expected = if legal(src, dst, true) {
                FlowClass::LegalIntra
            } else if legal(src, dst, false) {
                FlowClass::LegalInter
            } else {
                FlowClass::Illegal
            };
            ensure(classify_flow(src, dst) == expected, || {
                format!("{s} -> {d} misclassified")
            })?;
            classified += 1;
            let inter = rule_hits(&format!(
                "machine A {{ {s} }}\nmachine B {{ {d} }}\nflow A.{s} -> B.{d}\n"
            ));
            let want: Vec<String> = if legal(src, dst, false) {
                vec![]
            } else {
                vec!["R2".into()]
            };
            ensure(inter == want, || format!("inter {s} -> {d}: {inter:?}"))?;
            if src != dst {
                let intra = rule_hits(&format!("machine A {{ {s} {d} }}\nflow A.{s} -> A.{d}\n"));
                let want: Vec<String> = if legal(src, dst, true) {
                    vec![]
                } else {
                    vec!["R1".into()]
                };
                ensure(intra == want, || format!("intra {s} -> {d}: {intra:?}"))?;
            }
        }
    }
    ensure(classified == 25, || format!("{classified} pairs"))
}

fn round_trip_one(label: &str, src: &str) -> Verdict {
    let ast = parse(src);
    ensure(!ast.has_errors(), || format!("{label}: parse errors"))?;
    let text = format(&ast).map_err(|e| format!("{label}: {e}"))?;
    let again = parse(&text);
    ensure(
        again.diagnostics.is_empty() && ast.structurally_eq(&again),
        || format!("{label}: tree changed"),
    )?;
    let twice = format(&again).map_err(|e| format!("{label}: {e}"))?;
    ensure(twice == text, || format!("{label}: format not idempotent"))
}

fn round_trip() -> Verdict {
    for (name, _) in CORPUS {
        round_trip_one(name, &corpus(name))?;
    }
    for seed in 0..FUZZ_ROUND_TRIPS {
        let src = arbitrary_source(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
        round_trip_one(&format!("seed {seed}"), &src)?;
    }
    Ok(())
}

fn conserved(label: &str, model: &StaticModel, order: &[String]) -> Verdict {
    let trace = simulate(model, order).map_err(|e| format!("{label}: {e}"))?;
    let mut creates = 0;
    for step in &trace.steps {
        creates += step
            .firings
            .iter()
            .filter(|f| {
                model.stage(f.stage).kind == StageKind::Create && f.action == Action::Minted
            })
            .count();
        let held: usize = step.ledger.values().sum();
        ensure(held == creates, || {
            format!(
                "{label} at {}: {held} tokens, {creates} creates",
                step.event
            )
        })?;
    }
    ensure(trace.total_tokens() == creates, || {
        format!("{label}: final count")
    })
}

fn conservation() -> Verdict {
    for (name, _) in CORPUS {
        let model = corpus_model(name);
        let order = linearize(model.behavior.as_ref().unwrap()).map_err(|e| e.to_string())?;
        conserved(name, &model, &order)?;
    }
    for seed in 0..RANDOM_SIMULATIONS {
        let model = model_of(&valid_source(
            &mut ChaCha8Rng::seed_from_u64(seed),
            &GenConfig::default(),
        ));
        let order: Vec<String> = model.events.iter().map(|e| e.id.clone()).collect();
        conserved(&format!("seed {seed}"), &model, &order)?;
    }
    let model = corpus_model("stock_goods");
    let order = linearize(model.behavior.as_ref().unwrap()).map_err(|e| e.to_string())?;
    let trace = simulate(&model, &order).map_err(|e| e.to_string())?;
    let create = model
        .lookup("Vendor.Goods.create")
        .map_err(|e| e.to_string())?;
    let goods: Vec<_> = trace
        .tokens
        .iter()
        .filter(|t| tm_core::ElementId::Stage(t.birth) == create)
        .collect();
    ensure(goods.len() == 1, || format!("{} goods tokens", goods.len()))?;
    let shelf = model.machine_path(goods[0].location);
    ensure(shelf == "Shelf", || format!("goods end at {shelf}"))
}

fn faithful(label: &str, model: &StaticModel) -> Verdict {
    let err = |e: String| format!("{label}: {e}");
    let static_dot = render(model, &RenderOptions::default()).map_err(|e| err(e.to_string()))?;
    let g = dot::parse(&static_dot).map_err(err)?;
    ensure(g.nodes.len() == model.stages.len(), || {
        err("node count".into())
    })?;
    ensure(g.clusters.len() == model.machines.len(), || {
        err("cluster count".into())
    })?;
    ensure(g.edges.len() == model.arcs.len(), || {
        err("edge count".into())
    })?;
    let dashed = g
        .edges
        .iter()
        .filter(|(_, _, a)| a.get("style").map(String::as_str) == Some("dashed"))
        .count();
    let triggers = model
        .arcs
        .iter()
        .filter(|a| a.kind == ArcKind::Trigger)
        .count();
    ensure(dashed == triggers, || err("trigger styling".into()))?;
    if !model.events.is_empty() {
        let opts = RenderOptions {
            mode: RenderMode::Dynamic,
            ..RenderOptions::default()
        };
        let g = dot::parse(&render(model, &opts).map_err(|e| err(e.to_string()))?).map_err(err)?;
        ensure(
            g.nodes.len() == model.stages.len() + model.events.len(),
            || err("dynamic nodes".into()),
        )?;
        ensure(g.edges.len() == model.arcs.len(), || {
            err("dynamic edges".into())
        })?;
    }
    if let Some(b) = &model.behavior {
        let g = dot::parse(
            &render_behavior(model, &RenderOptions::default()).map_err(|e| err(e.to_string()))?,
        )
        .map_err(err)?;
        ensure(
            g.nodes.len() == model.events.len() && g.edges.len() == b.edges.len(),
            || err("behavior graph".into()),
        )?;
    }
    Ok(())
}

fn dot_faithfulness() -> Verdict {
    for (name, _) in CORPUS {
        faithful(name, &corpus_model(name))?;
    }
    for seed in 0..200 {
        let model = model_of(&arbitrary_source(
            &mut ChaCha8Rng::seed_from_u64(seed),
            &GenConfig::default(),
        ));
        faithful(&format!("seed {seed}"), &model)?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("corpus validity", corpus_validity),
        ("event counts", event_counts),
        ("chronology reproduction", chronology),
        ("precedence oracle equivalence", oracle_equivalence),
        ("legality matrix", legality_matrix),
        ("round trip", round_trip),
        ("simulation conservation", conservation),
        ("DOT well-formedness", dot_faithfulness),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}

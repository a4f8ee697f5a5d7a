//! Oracle equivalence for path enumeration, plus randomized construction
//! properties: find_paths must agree with an independent exhaustive
//! enumerator, and model construction must be idempotent and
//! order-insensitive.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bugscribe_core::model::{find_paths, ExecutionModel, InteractionId, ScreenSnapshot, Trace};
use bugscribe_core::testutil::{component, node, snapshot, TraceBuilder};

fn pool_screen(index: usize) -> ScreenSnapshot {
    snapshot(
        &format!("Screen{index}Activity"),
        false,
        vec![node("label", &format!("hdr_{index}"), &format!("Screen {index}"))],
    )
}

/// Random model over `nodes` screens with `edges` tap edges, built through
/// single-event traces. Every edge gets a unique component so none dedup
/// away.
fn random_model(rng: &mut StdRng, nodes: usize, edges: usize) -> ExecutionModel {
    let mut model = ExecutionModel::new("random.app");
    for edge in 0..edges {
        let from = rng.random_range(0..nodes);
        let to = rng.random_range(0..nodes);
        let trace = TraceBuilder::new("random.app")
            .tap(
                pool_screen(from),
                component("button", &format!("edge_{edge}"), &format!("Edge {edge}")),
                pool_screen(to),
            )
            .build();
        model = model.ingest_trace(&trace).expect("random edge ingests");
    }
    model
}

/// Independent exhaustive enumerator: extends edge sequences over the raw
/// interaction list, no adjacency indexing, no shared code with the
/// implementation's DFS.
fn enumerate_paths(
    model: &ExecutionModel,
    from: &bugscribe_core::model::ScreenId,
    to: &bugscribe_core::model::ScreenId,
    max_len: usize,
) -> BTreeSet<Vec<InteractionId>> {
    let mut found = BTreeSet::new();
    if from == to {
        found.insert(Vec::new());
    }
    let interactions = model.interactions();

    fn extend(
        interactions: &[bugscribe_core::model::Interaction],
        at: &bugscribe_core::model::ScreenId,
        to: &bugscribe_core::model::ScreenId,
        max_len: usize,
        used: &mut Vec<usize>,
        found: &mut BTreeSet<Vec<InteractionId>>,
    ) {
        if used.len() == max_len {
            return;
        }
        for (index, interaction) in interactions.iter().enumerate() {
            if used.contains(&index) || &interaction.source != at {
                continue;
            }
            used.push(index);
            if &interaction.target == to {
                found.insert(used.iter().map(|&i| interactions[i].id.clone()).collect());
            }
            extend(interactions, &interaction.target, to, max_len, used, found);
            used.pop();
        }
    }

    let mut used = Vec::new();
    extend(interactions, from, to, max_len, &mut used, &mut found);
    found
}

#[test]
fn find_paths_equals_the_exhaustive_enumerator_on_random_graphs() {
    let mut rng = StdRng::seed_from_u64(7);
    for round in 0..25 {
        let nodes = rng.random_range(2..=8);
        let edges = rng.random_range(1..=16);
        let model = random_model(&mut rng, nodes, edges);
        let ids: Vec<_> = model.screens().keys().cloned().collect();
        let from = ids[rng.random_range(0..ids.len())].clone();
        let to = ids[rng.random_range(0..ids.len())].clone();
        let max_len = rng.random_range(1..=5);

        let got = find_paths(&model, &from, &to, max_len).expect("endpoints exist");
        let got_set: BTreeSet<Vec<InteractionId>> = got.iter().cloned().collect();
        let expected = enumerate_paths(&model, &from, &to, max_len);
        assert_eq!(got_set, expected, "round {round}: path sets diverge");
        assert_eq!(got_set.len(), got.len(), "round {round}: duplicate paths returned");

        // deterministic order: shortest first, then lexicographic ids
        for window in got.windows(2) {
            let key = |p: &Vec<InteractionId>| (p.len(), p.clone());
            assert!(key(&window[0]) <= key(&window[1]), "round {round}: ordering violated");
        }
    }
}

fn random_walk_trace(rng: &mut StdRng, nodes: usize, steps: usize) -> Trace {
    let mut builder = TraceBuilder::new("random.app").open_app(pool_screen(0));
    let mut at = 0usize;
    for _ in 0..steps {
        let next = rng.random_range(0..nodes);
        let control = rng.random_range(0..6);
        builder = builder.tap(
            pool_screen(at),
            component("button", &format!("walk_{control}"), &format!("Walk {control}")),
            pool_screen(next),
        );
        at = next;
    }
    builder.build()
}

#[test]
fn ingestion_is_idempotent_and_merge_commutes_on_random_traces() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..40 {
        let nodes = rng.random_range(2..=6);
        let steps1 = rng.random_range(1..=8);
        let steps2 = rng.random_range(1..=8);
        let t1 = random_walk_trace(&mut rng, nodes, steps1);
        let t2 = random_walk_trace(&mut rng, nodes, steps2);

        let empty = ExecutionModel::new("random.app");
        let once = empty.ingest_trace(&t1).unwrap();
        let twice = once.ingest_trace(&t1).unwrap();
        assert_eq!(once, twice, "re-ingestion changed the model");

        let ab = empty.ingest_trace(&t1).unwrap().ingest_trace(&t2).unwrap();
        let ba = empty.ingest_trace(&t2).unwrap().ingest_trace(&t1).unwrap();
        assert_eq!(ab, ba, "ingestion order changed the model");

        let merged_ab = once.merge(&empty.ingest_trace(&t2).unwrap()).unwrap();
        let merged_ba = empty.ingest_trace(&t2).unwrap().merge(&once).unwrap();
        assert_eq!(merged_ab, merged_ba, "merge order changed the model");
        assert_eq!(merged_ab, ab, "merge result differs from sequential ingestion");
    }
}

#[test]
fn ingestion_never_shrinks_the_model() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut model = ExecutionModel::new("random.app");
    let mut screens = model.screens().len();
    let mut interactions = model.interactions().len();
    for _ in 0..30 {
        let steps = rng.random_range(1..=6);
        let trace = random_walk_trace(&mut rng, 5, steps);
        model = model.ingest_trace(&trace).unwrap();
        assert!(model.screens().len() >= screens);
        assert!(model.interactions().len() >= interactions);
        screens = model.screens().len();
        interactions = model.interactions().len();
    }
}

//! Path enumeration and validation over the execution model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExecutionModel, InteractionId, ModelError, ScreenId};

/// Result of checking a candidate interaction sequence against the model.
/// Violations are reported in the value, never thrown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathValidation {
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl PathValidation {
    fn ok() -> Self {
        PathValidation { valid: true, violation_index: None, reason: None }
    }

    fn violation(index: Option<usize>, reason: impl Into<String>) -> Self {
        PathValidation { valid: false, violation_index: index, reason: Some(reason.into()) }
    }
}

/// All edge-simple paths from `from` to `to` of length <= `max_len`,
/// shortest first, ties broken by lexicographic edge-id sequence.
///
/// Paths are simple in edges, not nodes: revisiting a screen through a
/// different edge is allowed, which real reproduction scenarios need.
/// When `from == to` the empty path is included (first).
pub fn find_paths(
    model: &ExecutionModel,
    from: &ScreenId,
    to: &ScreenId,
    max_len: usize,
) -> Result<Vec<Vec<InteractionId>>, ModelError> {
    if max_len == 0 {
        return Err(ModelError::InvalidMaxLen);
    }
    for id in [from, to] {
        if !model.screens().contains_key(id) {
            return Err(ModelError::UnknownScreen(id.clone()));
        }
    }

    // Adjacency sorted by interaction id keeps the DFS deterministic.
    let mut adjacency: BTreeMap<&ScreenId, Vec<usize>> = BTreeMap::new();
    for (index, interaction) in model.interactions().iter().enumerate() {
        adjacency.entry(&interaction.source).or_default().push(index);
    }
    for edges in adjacency.values_mut() {
        edges.sort_by(|a, b| model.interactions()[*a].id.cmp(&model.interactions()[*b].id));
    }

    // Static hop distance to the target prunes branches that cannot reach
    // it within the budget. It ignores which edges are already used, so it
    // only under-estimates: no valid path is ever cut.
    let distance_to_target = reverse_distances(model, to);

    let mut results: Vec<Vec<InteractionId>> = Vec::new();
    if from == to {
        results.push(Vec::new());
    }

    let mut used = vec![false; model.interactions().len()];
    let mut current: Vec<usize> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        model: &ExecutionModel,
        adjacency: &BTreeMap<&ScreenId, Vec<usize>>,
        distance_to_target: &BTreeMap<&ScreenId, usize>,
        at: &ScreenId,
        to: &ScreenId,
        max_len: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        results: &mut Vec<Vec<InteractionId>>,
    ) {
        if current.len() >= max_len {
            return;
        }
        if let Some(edges) = adjacency.get(at) {
            for &edge in edges {
                if used[edge] {
                    continue;
                }
                let interaction = &model.interactions()[edge];
                let remaining = distance_to_target.get(&interaction.target).copied().unwrap_or(usize::MAX);
                if remaining == usize::MAX || current.len() + 1 + remaining > max_len {
                    continue;
                }
                used[edge] = true;
                current.push(edge);
                if &interaction.target == to {
                    results.push(current.iter().map(|&e| model.interactions()[e].id.clone()).collect());
                }
                dfs(model, adjacency, distance_to_target, &interaction.target, to, max_len, used, current, results);
                current.pop();
                used[edge] = false;
            }
        }
    }

    dfs(
        model,
        &adjacency,
        &distance_to_target,
        from,
        to,
        max_len,
        &mut used,
        &mut current,
        &mut results,
    );
    results.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(results)
}

/// Minimum hop count from every screen to `to`, by reverse BFS.
fn reverse_distances<'m>(model: &'m ExecutionModel, to: &ScreenId) -> BTreeMap<&'m ScreenId, usize> {
    let mut incoming: BTreeMap<&ScreenId, Vec<&ScreenId>> = BTreeMap::new();
    for interaction in model.interactions() {
        incoming.entry(&interaction.target).or_default().push(&interaction.source);
    }
    let mut distances: BTreeMap<&ScreenId, usize> = BTreeMap::new();
    let mut frontier: Vec<&ScreenId> = Vec::new();
    if let Some((key, _)) = model.screens().get_key_value(to) {
        distances.insert(key, 0);
        frontier.push(key);
    }
    let mut hop = 0usize;
    while !frontier.is_empty() {
        hop += 1;
        let mut next = Vec::new();
        for node in frontier {
            if let Some(sources) = incoming.get(node) {
                for source in sources {
                    if !distances.contains_key(source) {
                        distances.insert(source, hop);
                        next.push(*source);
                    }
                }
            }
        }
        frontier = next;
    }
    distances
}

/// A sequence is a valid path iff every id exists, consecutive interactions
/// chain (target of k = source of k+1), and the first interaction starts at
/// the launcher pseudo-screen or the model's initial screen.
pub fn validate_path(model: &ExecutionModel, steps: &[InteractionId]) -> PathValidation {
    if steps.is_empty() {
        return PathValidation::violation(None, "empty path");
    }
    let mut previous_target: Option<&ScreenId> = None;
    for (index, id) in steps.iter().enumerate() {
        let Some(interaction) = model.interaction(id) else {
            return PathValidation::violation(Some(index), format!("unknown interaction id '{id}'"));
        };
        match previous_target {
            None => {
                let starts_ok = interaction.source.is_launcher()
                    || Some(&interaction.source) == model.initial_screen();
                if !starts_ok {
                    return PathValidation::violation(
                        Some(index),
                        format!(
                            "path must start at the launcher or initial screen, not '{}'",
                            interaction.source
                        ),
                    );
                }
            }
            Some(expected) => {
                if expected != &interaction.source {
                    return PathValidation::violation(
                        Some(index),
                        format!(
                            "interaction '{id}' starts at '{}' but the previous step ended at '{expected}'",
                            interaction.source
                        ),
                    );
                }
            }
        }
        previous_target = Some(&interaction.target);
    }
    PathValidation::ok()
}

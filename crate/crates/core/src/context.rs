//! App context for generation: screen descriptions, the flattened GUI
//! interaction catalog, and buggy-screen localization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::LabeledReport;
use crate::gateway::{CompletionRequest, Gateway, GatewayError};
use crate::model::{Action, ExecutionModel, InteractionId, Screen, ScreenId, UiComponent, UiNode};

pub const DESCRIPTIONS_SCHEMA: &str = "bugscribe-desc/1";
pub const RANKING_SCHEMA: &str = "bugscribe-ranking/1";
pub const DESCRIBE_TEMPLATE: &str = "screen-desc.v1";
pub const LOCALIZE_TEMPLATE: &str = "localize.v1";

/// Fixed description of the launcher pseudo-screen; it never goes through
/// the gateway.
pub const LAUNCHER_DESCRIPTION: &str = "Device launcher; the app is not yet open.";

/// A natural-language summary of one app screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenDescription {
    pub screen_id: ScreenId,
    pub text: String,
}

/// All screen descriptions of a model, keyed (and therefore ordered) by
/// screen id.
pub type ScreenDescriptions = BTreeMap<ScreenId, ScreenDescription>;

#[derive(Debug, Error)]
pub enum ContextError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("unknown screen id '{0}'")]
    UnknownScreen(ScreenId),
    #[error("descriptions do not cover screen '{0}'")]
    MissingDescription(ScreenId),
    #[error("gateway returned an empty description for screen '{0}'")]
    EmptyDescription(ScreenId),
    #[error("localization returned no valid screen: {0}")]
    NoValidRanking(String),
    #[error("descriptions document error: {0}")]
    Document(String),
}

/// Deterministic indented outline of a screen's component hierarchy, used
/// as prompt context.
pub fn hierarchy_outline(screen: &Screen) -> String {
    fn walk(node: &UiNode, depth: usize, out: &mut String) {
        let c = &node.component;
        out.push_str(&"  ".repeat(depth));
        out.push_str(&c.kind);
        if !c.label.is_empty() {
            out.push_str(&format!(" '{}'", c.label));
        }
        if !c.resource_id.is_empty() {
            out.push_str(&format!(" (id: {})", c.resource_id));
        }
        if !c.content_description.is_empty() {
            out.push_str(&format!(" [{}]", c.content_description));
        }
        out.push('\n');
        for child in &node.children {
            walk(child, depth + 1, out);
        }
    }
    let mut out = String::new();
    for node in &screen.hierarchy {
        walk(node, 0, &mut out);
    }
    if out.is_empty() {
        out.push_str("(no components)\n");
    }
    out
}

/// Builds the description request for one screen.
pub fn build_describe_request(screen: &Screen) -> CompletionRequest {
    let mut bindings = BTreeMap::new();
    bindings.insert("screen_id".to_string(), screen.id.to_string());
    bindings.insert("activity_name".to_string(), screen.activity_name.clone());
    bindings.insert("is_dialog".to_string(), screen.is_dialog.to_string());
    bindings.insert("components".to_string(), hierarchy_outline(screen));
    CompletionRequest::text(DESCRIBE_TEMPLATE, bindings)
}

/// Gateway-produced summary of one screen's purpose, layout, components,
/// and offered functions. The launcher bypasses the gateway.
pub fn describe_screen(
    model: &ExecutionModel,
    screen_id: &ScreenId,
    gateway: &Gateway,
) -> Result<ScreenDescription, ContextError> {
    let screen = model.screen(screen_id).ok_or_else(|| ContextError::UnknownScreen(screen_id.clone()))?;
    if screen.id.is_launcher() {
        return Ok(ScreenDescription {
            screen_id: screen.id.clone(),
            text: LAUNCHER_DESCRIPTION.to_string(),
        });
    }
    let result = gateway.complete(&build_describe_request(screen))?;
    let text = result.raw_text.trim().to_string();
    if text.is_empty() {
        return Err(ContextError::EmptyDescription(screen_id.clone()));
    }
    Ok(ScreenDescription { screen_id: screen.id.clone(), text })
}

/// Describes every screen of the model. Individual calls are independent
/// and may be fanned out by callers; the result is collected sorted by
/// screen id so ordering never leaks scheduling.
pub fn describe_screens(model: &ExecutionModel, gateway: &Gateway) -> Result<ScreenDescriptions, ContextError> {
    let mut descriptions = BTreeMap::new();
    for screen_id in model.screens().keys() {
        let description = describe_screen(model, screen_id, gateway)?;
        descriptions.insert(screen_id.clone(), description);
    }
    Ok(descriptions)
}

/// One catalog row: everything the generator needs to know about an edge.
/// `component_phrase` is the display form; the name/kind pieces and the
/// typed text are kept separate so step texts can be synthesized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub interaction_id: InteractionId,
    pub action: Action,
    pub component_phrase: String,
    pub source: ScreenId,
    pub target: ScreenId,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub component_name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub component_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_text: Option<String>,
}

/// The flattened, deterministic list of all model edges, sorted by source
/// screen id then interaction id. Exactly one entry per interaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl InteractionCatalog {
    pub fn entry(&self, id: &InteractionId) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| &e.interaction_id == id)
    }

    /// Deterministic prompt block: `id | action | component | source -> target`.
    pub fn to_prompt_block(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let component = if e.component_phrase.is_empty() { "-" } else { &e.component_phrase };
            out.push_str(&format!(
                "{} | {} | {} | {} -> {}\n",
                e.interaction_id, e.action, component, e.source, e.target
            ));
        }
        out
    }
}

/// Component phrase for prompts and ground truth: the first non-empty of
/// label, content description, resource id, followed by the kind with
/// dashes spelled out ("OK button", "Restore from backup menu item").
pub fn component_phrase(component: &UiComponent) -> String {
    let name = component.display_name();
    let kind = component.kind.replace('-', " ");
    if name.is_empty() {
        kind
    } else {
        format!("{name} {kind}")
    }
}

pub fn build_catalog(model: &ExecutionModel) -> InteractionCatalog {
    let mut entries: Vec<CatalogEntry> = model
        .interactions()
        .iter()
        .map(|i| CatalogEntry {
            interaction_id: i.id.clone(),
            action: i.action,
            component_phrase: i.component.as_ref().map(component_phrase).unwrap_or_default(),
            source: i.source.clone(),
            target: i.target.clone(),
            component_name: i.component.as_ref().map(|c| c.display_name().to_string()).unwrap_or_default(),
            component_kind: i.component.as_ref().map(|c| c.kind.clone()).unwrap_or_default(),
            input_text: i.input_text.clone(),
        })
        .collect();
    entries.sort_by(|a, b| a.source.cmp(&b.source).then_with(|| a.interaction_id.cmp(&b.interaction_id)));
    InteractionCatalog { entries }
}

/// A ranked buggy-screen candidate with the model's stated rationale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedScreen {
    pub screen_id: ScreenId,
    pub rationale: String,
}

/// Ranked list of potential buggy screens; `top` is the screen treated as
/// the buggy screen downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenRanking {
    pub ranked: Vec<RankedScreen>,
    pub top: ScreenId,
}

/// The ranking prompt lists at most this many candidates.
pub const MAX_RANKED_SCREENS: usize = 10;

/// Deterministic prompt block of all descriptions, sorted by screen id.
pub fn descriptions_prompt_block(descriptions: &ScreenDescriptions) -> String {
    let mut out = String::new();
    for (screen_id, description) in descriptions {
        out.push_str(&format!("{screen_id}: {}\n", description.text));
    }
    out
}

/// Builds the localization request for a labeled report.
pub fn build_localize_request(
    labeled: &LabeledReport,
    descriptions: &ScreenDescriptions,
    catalog: &InteractionCatalog,
) -> CompletionRequest {
    let mut bindings = BTreeMap::new();
    bindings.insert("report".to_string(), labeled.to_prompt_block());
    bindings.insert("screen_descriptions".to_string(), descriptions_prompt_block(descriptions));
    bindings.insert("interactions".to_string(), catalog.to_prompt_block());
    CompletionRequest::json(LOCALIZE_TEMPLATE, bindings)
}

/// Retrieves a ranked list of potential buggy screens for the report.
///
/// Entries naming unknown screens are resolved by exact description-prefix
/// match; entries that still do not resolve are dropped with a warning. An
/// empty post-filter ranking is an error. Returns the ranking and any
/// warnings produced while filtering.
pub fn localize_buggy_screen(
    labeled: &LabeledReport,
    descriptions: &ScreenDescriptions,
    catalog: &InteractionCatalog,
    gateway: &Gateway,
) -> Result<(ScreenRanking, Vec<String>), ContextError> {
    let request = build_localize_request(labeled, descriptions, catalog);
    let result = gateway.complete(&request)?;
    let parsed = result.parsed.as_ref().expect("json request parses or errors");

    let entries = parsed["ranking"].as_array().ok_or_else(|| {
        ContextError::NoValidRanking(format!("response has no 'ranking' array: {}", result.raw_text))
    })?;

    let mut warnings = Vec::new();
    let mut ranked = Vec::new();
    for entry in entries {
        let Some(raw_id) = entry["screen_id"].as_str() else {
            warnings.push(format!("ranking entry without screen_id dropped: {entry}"));
            continue;
        };
        let rationale = entry["rationale"].as_str().unwrap_or("").to_string();
        let candidate = ScreenId::new(raw_id);
        let resolved = if descriptions.contains_key(&candidate) {
            Some(candidate)
        } else {
            resolve_by_description_prefix(descriptions, raw_id)
        };
        match resolved {
            Some(screen_id) => {
                if ranked.iter().any(|r: &RankedScreen| r.screen_id == screen_id) {
                    warnings.push(format!("duplicate ranking entry for '{screen_id}' dropped"));
                } else {
                    ranked.push(RankedScreen { screen_id, rationale });
                }
            }
            None => warnings.push(format!("ranking entry '{raw_id}' matches no screen; dropped")),
        }
        if ranked.len() == MAX_RANKED_SCREENS {
            break;
        }
    }

    let Some(first) = ranked.first() else {
        return Err(ContextError::NoValidRanking("every ranked entry was dropped".into()));
    };
    let top = first.screen_id.clone();
    Ok((ScreenRanking { ranked, top }, warnings))
}

fn resolve_by_description_prefix(descriptions: &ScreenDescriptions, name: &str) -> Option<ScreenId> {
    let mut matches = descriptions.values().filter(|d| d.text.starts_with(name));
    let first = matches.next()?;
    matches.next().is_none().then(|| first.screen_id.clone())
}

#[derive(Serialize, Deserialize)]
struct DescriptionsDocument {
    schema: String,
    descriptions: BTreeMap<ScreenId, String>,
}

pub fn serialize_descriptions(descriptions: &ScreenDescriptions) -> String {
    let document = DescriptionsDocument {
        schema: DESCRIPTIONS_SCHEMA.to_string(),
        descriptions: descriptions.iter().map(|(k, v)| (k.clone(), v.text.clone())).collect(),
    };
    let mut text = serde_json::to_string_pretty(&document).expect("descriptions serialize");
    text.push('\n');
    text
}

pub fn parse_descriptions(text: &str) -> Result<ScreenDescriptions, ContextError> {
    let document: DescriptionsDocument =
        serde_json::from_str(text).map_err(|e| ContextError::Document(e.to_string()))?;
    if document.schema != DESCRIPTIONS_SCHEMA {
        return Err(ContextError::Document(format!("unsupported schema '{}'", document.schema)));
    }
    Ok(document
        .descriptions
        .into_iter()
        .map(|(screen_id, text)| (screen_id.clone(), ScreenDescription { screen_id, text }))
        .collect())
}

#[derive(Serialize, Deserialize)]
struct RankingDocument {
    schema: String,
    #[serde(flatten)]
    ranking: ScreenRanking,
}

pub fn serialize_ranking(ranking: &ScreenRanking) -> String {
    let document = RankingDocument { schema: RANKING_SCHEMA.to_string(), ranking: ranking.clone() };
    let mut text = serde_json::to_string_pretty(&document).expect("ranking serializes");
    text.push('\n');
    text
}

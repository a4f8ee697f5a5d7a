//! Report generation: grounded steps-to-reproduce, observed/expected
//! behavior, and assembly into the final structured report, under the
//! selectable context configurations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{classify_sentences, AnnotationError, LabeledReport};
use crate::context::{
    build_catalog, describe_screens, localize_buggy_screen, CatalogEntry, ContextError,
    InteractionCatalog, ScreenDescriptions, ScreenRanking,
};
use crate::gateway::{CompletionRequest, Gateway, GatewayError};
use crate::model::{validate_path, Action, ExecutionModel, InteractionId};
use crate::report::{AtomicStep, BugReport, EbDescription, GeneratedReport, ObDescription};

pub const TRACE_SCHEMA: &str = "bugscribe-trace/1";

/// App information bound into the S2R generation prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum S2rContext {
    #[serde(rename = "none")]
    NoInfo,
    #[serde(rename = "interactions")]
    Interactions,
    #[serde(rename = "interactions+screens")]
    InteractionsScreens,
    #[serde(rename = "interactions+screens+buggy_screen")]
    InteractionsScreensBuggyScreen,
}

/// App information bound into the OB/EB generation prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObEbContext {
    #[serde(rename = "none")]
    NoInfo,
    #[serde(rename = "buggy_screen")]
    BuggyScreen,
    #[serde(rename = "s2rs+buggy_screen")]
    S2rsBuggyScreen,
    #[serde(rename = "s2rs+buggy_screen+screens")]
    S2rsBuggyScreenScreens,
}

/// Which context each generation stage receives. The default is the pair
/// that performed best in development: full context for steps, steps plus
/// buggy screen plus screen descriptions for OB/EB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextConfig {
    pub s2r_context: S2rContext,
    pub obeb_context: ObEbContext,
}

impl Default for ContextConfig {
    fn default() -> Self {
        ContextConfig {
            s2r_context: S2rContext::InteractionsScreensBuggyScreen,
            obeb_context: ObEbContext::S2rsBuggyScreenScreens,
        }
    }
}

impl ContextConfig {
    pub fn no_info() -> Self {
        ContextConfig { s2r_context: S2rContext::NoInfo, obeb_context: ObEbContext::NoInfo }
    }

    fn needs_localization(&self) -> bool {
        self.s2r_context == S2rContext::InteractionsScreensBuggyScreen
            || self.obeb_context != ObEbContext::NoInfo
    }

    fn needs_descriptions(&self) -> bool {
        self.needs_localization()
            || self.s2r_context >= S2rContext::InteractionsScreens
            || self.obeb_context == ObEbContext::S2rsBuggyScreenScreens
    }
}

/// One gateway request made by the pipeline: stage name plus fixture key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRequest {
    pub stage: String,
    pub fixture_key: String,
}

/// A record of everything one pipeline run asked the gateway for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub config: ContextConfig,
    pub requests: Vec<StageRequest>,
    pub warnings: Vec<String>,
}

impl GenerationTrace {
    fn new(config: ContextConfig) -> Self {
        GenerationTrace { config, requests: Vec::new(), warnings: Vec::new() }
    }

    fn absorb(&mut self, stage: &str, gateway: &Gateway) {
        for call in gateway.drain_calls() {
            self.requests.push(StageRequest { stage: stage.to_string(), fixture_key: call.fixture_key });
        }
    }

    pub fn requests_for<'t>(&'t self, stage: &'t str) -> impl Iterator<Item = &'t StageRequest> + 't {
        self.requests.iter().filter(move |r| r.stage == stage)
    }
}

#[derive(Serialize, Deserialize)]
struct TraceDocument {
    schema: String,
    #[serde(flatten)]
    trace: GenerationTrace,
}

pub fn serialize_trace(trace: &GenerationTrace) -> String {
    let document = TraceDocument { schema: TRACE_SCHEMA.to_string(), trace: trace.clone() };
    let mut text = serde_json::to_string_pretty(&document).expect("trace serializes");
    text.push('\n');
    text
}

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("malformed generation response: {reason}; raw text: {raw_text:?}")]
    MalformedResponse { reason: String, raw_text: String },
    #[error("generated step sequence is invalid after one corrective re-prompt: {reason}; sequence: {steps:?}")]
    InvalidSequence { reason: String, steps: Vec<String> },
    #[error("generation output is missing element '{element}' after one corrective re-prompt")]
    MissingElement { element: String },
    #[error("cannot assemble a report without steps")]
    EmptySteps,
}

/// Step text synthesized locally from interaction metadata, in the
/// "[action] [GUI component]" shape. The model only picks interaction ids;
/// the wording is always ours, so the vocabulary never drifts.
pub fn step_text_for(entry: &CatalogEntry) -> String {
    let name = entry.component_name.trim();
    let kind = entry.component_kind.replace('-', " ");
    match entry.action {
        Action::OpenApp => "open the app".to_string(),
        Action::Back => "press the device back button".to_string(),
        Action::Rotate => "rotate the device screen".to_string(),
        Action::Tap => {
            if name.is_empty() {
                format!("tap the {kind}")
            } else {
                format!("tap '{name}' {kind}")
            }
        }
        Action::LongTap => {
            if name.is_empty() {
                format!("long-tap the {kind}")
            } else {
                format!("long-tap '{name}' {kind}")
            }
        }
        Action::Swipe => {
            if name.is_empty() {
                format!("swipe on the {kind}")
            } else {
                format!("swipe on '{name}' {kind}")
            }
        }
        Action::Type => {
            let input = entry.input_text.as_deref().unwrap_or("");
            if name.is_empty() {
                format!("type '{input}' in the {kind}")
            } else {
                format!("type '{input}' in '{name}' {kind}")
            }
        }
    }
}

/// Action verbs a rendered atomic step may start with.
const STEP_VERBS: &[&str] = &["open", "tap", "long-tap", "type", "swipe", "press", "rotate"];

/// Checks the "[action] [GUI component]" shape: an action verb from the
/// vocabulary followed by a non-empty component phrase.
pub fn is_atomic_step_text(text: &str) -> bool {
    let lower = text.trim().to_lowercase();
    STEP_VERBS.iter().any(|verb| {
        lower.strip_prefix(verb).is_some_and(|rest| rest.starts_with(' ') && rest.trim().len() > 1)
    })
}

/// Grounded steps for a sequence of interaction ids, with locally
/// synthesized texts and 1-based ordinals.
pub fn steps_from_ids(
    catalog: &InteractionCatalog,
    ids: &[InteractionId],
) -> Result<Vec<AtomicStep>, GenerationError> {
    ids.iter()
        .enumerate()
        .map(|(index, id)| {
            let entry = catalog.entry(id).ok_or_else(|| GenerationError::InvalidSequence {
                reason: format!("id '{id}' is not in the interaction catalog"),
                steps: ids.iter().map(|i| i.to_string()).collect(),
            })?;
            Ok(AtomicStep {
                ordinal: index + 1,
                text: step_text_for(entry),
                interaction_id: Some(entry.interaction_id.clone()),
                source_screen: Some(entry.source.clone()),
                target_screen: Some(entry.target.clone()),
            })
        })
        .collect()
}

fn s2r_template_id(context: S2rContext) -> &'static str {
    match context {
        S2rContext::NoInfo => "s2r-gen.no-info.v1",
        S2rContext::Interactions => "s2r-gen.interactions.v1",
        S2rContext::InteractionsScreens => "s2r-gen.interactions-screens.v1",
        S2rContext::InteractionsScreensBuggyScreen => "s2r-gen.full.v1",
    }
}

fn obeb_template_id(context: ObEbContext) -> &'static str {
    match context {
        ObEbContext::NoInfo => "obeb-gen.no-info.v1",
        ObEbContext::BuggyScreen => "obeb-gen.buggy-screen.v1",
        ObEbContext::S2rsBuggyScreen => "obeb-gen.s2rs-buggy-screen.v1",
        ObEbContext::S2rsBuggyScreenScreens => "obeb-gen.full.v1",
    }
}

fn buggy_screen_block(ranking: &ScreenRanking, descriptions: &ScreenDescriptions) -> String {
    let text = descriptions.get(&ranking.top).map(|d| d.text.as_str()).unwrap_or("");
    format!("{}: {}\n", ranking.top, text)
}

/// Builds the S2R generation request. `correction` is empty on the first
/// attempt and carries the violation on the single corrective re-prompt.
pub fn build_s2r_request(
    labeled: &LabeledReport,
    catalog: &InteractionCatalog,
    descriptions: &ScreenDescriptions,
    ranking: Option<&ScreenRanking>,
    context: S2rContext,
    correction: &str,
) -> CompletionRequest {
    let mut bindings = BTreeMap::new();
    bindings.insert("report".to_string(), labeled.to_prompt_block());
    bindings.insert("correction".to_string(), correction.to_string());
    if context >= S2rContext::Interactions {
        bindings.insert("interactions".to_string(), catalog.to_prompt_block());
    }
    if context >= S2rContext::InteractionsScreens {
        bindings.insert(
            "screen_descriptions".to_string(),
            crate::context::descriptions_prompt_block(descriptions),
        );
    }
    if context == S2rContext::InteractionsScreensBuggyScreen {
        let ranking = ranking.expect("buggy-screen context requires a ranking");
        bindings.insert("buggy_screen".to_string(), buggy_screen_block(ranking, descriptions));
    }
    CompletionRequest::json(s2r_template_id(context), bindings)
}

fn parse_step_strings(value: &serde_json::Value, raw: &str) -> Result<Vec<String>, GenerationError> {
    let array = value["steps"].as_array().ok_or_else(|| GenerationError::MalformedResponse {
        reason: "response has no 'steps' array".into(),
        raw_text: raw.to_string(),
    })?;
    let steps: Option<Vec<String>> = array.iter().map(|v| v.as_str().map(str::to_string)).collect();
    let steps = steps.ok_or_else(|| GenerationError::MalformedResponse {
        reason: "'steps' array must contain strings".into(),
        raw_text: raw.to_string(),
    })?;
    if steps.is_empty() {
        return Err(GenerationError::MalformedResponse {
            reason: "'steps' array is empty".into(),
            raw_text: raw.to_string(),
        });
    }
    Ok(steps)
}

/// Checks a grounded id sequence against the catalog: existence, chaining
/// from the launcher or initial screen, and (under the buggy-screen config)
/// termination on the ranked buggy screen.
fn sequence_violation(
    catalog: &InteractionCatalog,
    ids: &[InteractionId],
    must_end_at: Option<&crate::model::ScreenId>,
) -> Option<String> {
    let initial = catalog
        .entries
        .iter()
        .find(|e| e.action == Action::OpenApp)
        .map(|e| e.target.clone());
    let mut previous_target: Option<&crate::model::ScreenId> = None;
    for (index, id) in ids.iter().enumerate() {
        let Some(entry) = catalog.entry(id) else {
            return Some(format!("step {}: id '{id}' is not in the interaction catalog", index + 1));
        };
        match previous_target {
            None => {
                let ok = entry.source.is_launcher() || Some(&entry.source) == initial.as_ref();
                if !ok {
                    return Some(format!(
                        "step 1: the path must start at the launcher or initial screen, not '{}'",
                        entry.source
                    ));
                }
            }
            Some(expected) => {
                if expected != &entry.source {
                    return Some(format!(
                        "step {}: interaction '{id}' starts at '{}' but the previous step ended at '{expected}'",
                        index + 1,
                        entry.source
                    ));
                }
            }
        }
        previous_target = Some(&entry.target);
    }
    if let (Some(end), Some(last)) = (must_end_at, previous_target) {
        if end != last {
            return Some(format!(
                "the final step ends at '{last}' but the buggy screen is '{end}'"
            ));
        }
    }
    None
}

fn correction_text(previous_answer: &[String], violation: &str) -> String {
    format!(
        "\nCorrection required: your previous answer {previous_answer:?} was invalid: {violation}. Answer again, following every rule."
    )
}

/// Generates the ordered atomic steps for a report.
///
/// Under any configuration that includes interactions, the model answers
/// with interaction ids; the steps come back grounded and chain-checked,
/// ending at the ranked buggy screen when the configuration includes it.
/// Under the no-info configuration the steps are free text, shape-checked
/// only. One corrective re-prompt embeds the first violation; a second
/// failure is an error carrying the invalid sequence.
pub fn generate_s2rs(
    labeled: &LabeledReport,
    catalog: &InteractionCatalog,
    descriptions: &ScreenDescriptions,
    ranking: Option<&ScreenRanking>,
    config: &ContextConfig,
    gateway: &Gateway,
) -> Result<Vec<AtomicStep>, GenerationError> {
    let context = config.s2r_context;
    let must_end_at = (context == S2rContext::InteractionsScreensBuggyScreen)
        .then(|| ranking.expect("buggy-screen context requires a ranking").top.clone());

    let mut correction = String::new();
    for _attempt in 0..2 {
        let request = build_s2r_request(labeled, catalog, descriptions, ranking, context, &correction);
        let result = gateway.complete(&request)?;
        let parsed = result.parsed.as_ref().expect("json request parses or errors");
        let raw_steps = parse_step_strings(parsed, &result.raw_text)?;

        if context == S2rContext::NoInfo {
            match raw_steps.iter().find(|s| !is_atomic_step_text(s)) {
                None => {
                    return Ok(raw_steps
                        .into_iter()
                        .enumerate()
                        .map(|(index, text)| AtomicStep {
                            ordinal: index + 1,
                            text,
                            interaction_id: None,
                            source_screen: None,
                            target_screen: None,
                        })
                        .collect());
                }
                Some(bad) => {
                    let violation = format!("step '{bad}' is not in the '[action] [GUI component]' shape");
                    if correction.is_empty() {
                        correction = correction_text(&raw_steps, &violation);
                        continue;
                    }
                    return Err(GenerationError::InvalidSequence { reason: violation, steps: raw_steps });
                }
            }
        }

        let ids: Vec<InteractionId> = raw_steps.iter().map(InteractionId::new).collect();
        match sequence_violation(catalog, &ids, must_end_at.as_ref()) {
            None => return steps_from_ids(catalog, &ids),
            Some(violation) => {
                if correction.is_empty() {
                    correction = correction_text(&raw_steps, &violation);
                    continue;
                }
                return Err(GenerationError::InvalidSequence { reason: violation, steps: raw_steps });
            }
        }
    }
    unreachable!("two attempts always return or error");
}

/// Title, OB, EB, and optional environment info generated for a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObEbOutput {
    pub title: String,
    pub ob: ObDescription,
    pub eb: EbDescription,
    pub additional_info: Option<String>,
}

fn steps_prompt_block(steps: &[AtomicStep]) -> String {
    let mut out = String::new();
    for step in steps {
        out.push_str(&format!("{}. {}\n", step.ordinal, step.text));
    }
    out
}

fn step_screens_block(steps: &[AtomicStep], descriptions: &ScreenDescriptions) -> String {
    let mut ids = std::collections::BTreeSet::new();
    for step in steps {
        if let Some(s) = &step.source_screen {
            ids.insert(s.clone());
        }
        if let Some(t) = &step.target_screen {
            ids.insert(t.clone());
        }
    }
    let mut out = String::new();
    for id in ids {
        if let Some(d) = descriptions.get(&id) {
            out.push_str(&format!("{id}: {}\n", d.text));
        }
    }
    out
}

/// Builds the OB/EB generation request for a config.
pub fn build_obeb_request(
    labeled: &LabeledReport,
    steps: &[AtomicStep],
    ranking: Option<&ScreenRanking>,
    descriptions: &ScreenDescriptions,
    context: ObEbContext,
    correction: &str,
) -> CompletionRequest {
    let mut bindings = BTreeMap::new();
    bindings.insert("report".to_string(), labeled.to_prompt_block());
    bindings.insert("correction".to_string(), correction.to_string());
    if context >= ObEbContext::BuggyScreen {
        let ranking = ranking.expect("buggy-screen context requires a ranking");
        bindings.insert("buggy_screen".to_string(), buggy_screen_block(ranking, descriptions));
    }
    if context >= ObEbContext::S2rsBuggyScreen {
        bindings.insert("steps".to_string(), steps_prompt_block(steps));
    }
    if context == ObEbContext::S2rsBuggyScreenScreens {
        bindings.insert("step_screens".to_string(), step_screens_block(steps, descriptions));
    }
    CompletionRequest::json(obeb_template_id(context), bindings)
}

const MAX_TITLE_CHARS: usize = 100;

fn field<'v>(value: &'v serde_json::Value, name: &str) -> Option<&'v str> {
    value[name].as_str().map(str::trim).filter(|s| !s.is_empty())
}

/// Generates the title, OB, EB, and additional info. The OB sentence is
/// rendered locally from the three elements; the EB from its
/// subject/modal/behavior. Environment text from the original report is
/// copied verbatim when present.
pub fn generate_ob_eb(
    labeled: &LabeledReport,
    steps: &[AtomicStep],
    ranking: Option<&ScreenRanking>,
    descriptions: &ScreenDescriptions,
    config: &ContextConfig,
    gateway: &Gateway,
) -> Result<ObEbOutput, GenerationError> {
    let context = config.obeb_context;
    // the screen reference and trigger can only be required when the model
    // was actually given app context to take them from
    let require_all_elements = context != ObEbContext::NoInfo;

    let mut correction = String::new();
    for _attempt in 0..2 {
        let request = build_obeb_request(labeled, steps, ranking, descriptions, context, &correction);
        let result = gateway.complete(&request)?;
        let parsed = result.parsed.as_ref().expect("json request parses or errors");

        let mut missing = Vec::new();
        let title = field(parsed, "title");
        let behavior = field(parsed, "buggy_behavior");
        let eb_behavior = field(parsed, "eb_behavior");
        if title.is_none() {
            missing.push("title");
        }
        if behavior.is_none() {
            missing.push("buggy_behavior");
        }
        if eb_behavior.is_none() {
            missing.push("eb_behavior");
        }
        if require_all_elements {
            if field(parsed, "buggy_screen_reference").is_none() {
                missing.push("buggy_screen_reference");
            }
            if field(parsed, "triggering_interaction").is_none() {
                missing.push("triggering_interaction");
            }
        }
        if let Some(&first) = missing.first() {
            if correction.is_empty() {
                correction = format!(
                    "\nCorrection required: your previous answer was missing the non-empty field(s) {missing:?}. Answer again with every field populated."
                );
                continue;
            }
            return Err(GenerationError::MissingElement { element: first.to_string() });
        }

        let title = one_line_title(title.expect("checked above"));
        let ob = ObDescription::render(
            field(parsed, "buggy_screen_reference").unwrap_or(""),
            field(parsed, "triggering_interaction").unwrap_or(""),
            behavior.expect("checked above"),
        );
        let eb = EbDescription::render(
            field(parsed, "eb_subject").unwrap_or("The app"),
            parsed["eb_should"].as_bool().unwrap_or(true),
            eb_behavior.expect("checked above"),
        );
        let additional_info = match &labeled.report.environment {
            Some(env) => Some(env.clone()),
            None => field(parsed, "additional_info").map(str::to_string),
        };
        return Ok(ObEbOutput { title, ob, eb, additional_info });
    }
    unreachable!("two attempts always return or error");
}

fn one_line_title(raw: &str) -> String {
    let line = raw.lines().next().unwrap_or("").trim().to_string();
    if line.chars().count() <= MAX_TITLE_CHARS {
        line
    } else {
        line.chars().take(MAX_TITLE_CHARS).collect()
    }
}

/// Pure assembly of the final report. Section order is fixed by the
/// renderer; assembling twice yields identical output.
pub fn assemble_report(
    title: String,
    ob: ObDescription,
    eb: EbDescription,
    steps: Vec<AtomicStep>,
    additional_info: Option<String>,
) -> Result<GeneratedReport, GenerationError> {
    if steps.is_empty() {
        return Err(GenerationError::EmptySteps);
    }
    Ok(GeneratedReport { title, ob, eb, steps, additional_info })
}

/// Errors from any pipeline stage, tagged with the stage that failed.
#[derive(Debug, Error)]
#[error("pipeline stage '{stage}' failed: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: StageError,
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error("report is for app '{report}', model is for app '{model}'")]
    AppIdMismatch { report: String, model: String },
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error("generated steps fail path validation: {0}")]
    PathUnsound(String),
}

fn at_stage<T, E: Into<StageError>>(stage: &'static str, result: Result<T, E>) -> Result<T, PipelineError> {
    result.map_err(|e| PipelineError { stage, source: e.into() })
}

/// Runs the whole per-report pipeline: annotate, describe, catalog,
/// localize, generate steps, generate OB/EB, assemble. Stages a
/// configuration does not consume are skipped entirely. The trace records
/// every fixture key the run touched.
pub fn run_pipeline(
    report: &BugReport,
    model: &ExecutionModel,
    config: &ContextConfig,
    gateway: &Gateway,
) -> Result<(GeneratedReport, GenerationTrace), PipelineError> {
    let mut trace = GenerationTrace::new(*config);
    if report.app_id != model.app_id() {
        return Err(PipelineError {
            stage: "precheck",
            source: StageError::AppIdMismatch {
                report: report.app_id.clone(),
                model: model.app_id().to_string(),
            },
        });
    }

    let labeled = at_stage("annotate", classify_sentences(report, gateway))?;
    trace.absorb("annotate", gateway);

    let descriptions = if config.needs_descriptions() {
        let descriptions = at_stage("describe", describe_screens(model, gateway))?;
        trace.absorb("describe", gateway);
        descriptions
    } else {
        ScreenDescriptions::new()
    };

    let catalog = build_catalog(model);

    let ranking = if config.needs_localization() {
        let (ranking, warnings) =
            at_stage("localize", localize_buggy_screen(&labeled, &descriptions, &catalog, gateway))?;
        trace.absorb("localize", gateway);
        trace.warnings.extend(warnings);
        Some(ranking)
    } else {
        None
    };

    let steps = at_stage(
        "s2r",
        generate_s2rs(&labeled, &catalog, &descriptions, ranking.as_ref(), config, gateway),
    )?;
    trace.absorb("s2r", gateway);

    // grounded sequences must hold up against the model itself, not just
    // the catalog view of it
    if config.s2r_context != S2rContext::NoInfo {
        let ids: Vec<InteractionId> =
            steps.iter().filter_map(|s| s.interaction_id.clone()).collect();
        let verdict = validate_path(model, &ids);
        if !verdict.valid {
            return Err(PipelineError {
                stage: "s2r",
                source: StageError::PathUnsound(verdict.reason.unwrap_or_else(|| "invalid".into())),
            });
        }
    }

    let obeb = at_stage(
        "obeb",
        generate_ob_eb(&labeled, &steps, ranking.as_ref(), &descriptions, config, gateway),
    )?;
    trace.absorb("obeb", gateway);

    let generated = at_stage(
        "assemble",
        assemble_report(obeb.title, obeb.ob, obeb.eb, steps, obeb.additional_info),
    )?;
    Ok((generated, trace))
}

#[cfg(test)]
mod tests;

//! Bug report representation: raw reports, labeled sentences, generated
//! structured reports, and per-report ground truth.

mod markdown;
mod split;

pub use markdown::{parse_generated_markdown, render_markdown, ParsedGeneratedReport};
pub use split::{split_segments, split_sentences};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ExecutionModel, InteractionId, ModelError, ScreenId};

pub const GROUND_TRUTH_SCHEMA: &str = "bugscribe-gt/1";

/// A user-submitted bug report, as found in an issue tracker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub report_id: String,
    pub app_id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<String>,
}

/// Sentence-level label assigned during annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SentenceLabel {
    #[serde(rename = "OB")]
    Ob,
    #[serde(rename = "EB")]
    Eb,
    #[serde(rename = "S2R")]
    S2r,
    #[serde(rename = "OTHER")]
    Other,
}

/// One sentence of a report body with its label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub index: usize,
    pub text: String,
    pub label: SentenceLabel,
}

/// One reproduction step: a single GUI action on a single component. When
/// grounded, `interaction_id` names the model edge the step corresponds to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomicStep {
    /// 1-based position in the step list.
    pub ordinal: usize,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction_id: Option<InteractionId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_screen: Option<ScreenId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_screen: Option<ScreenId>,
}

/// Observed-behavior description broken into its three information elements
/// plus the rendered sentence containing all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObDescription {
    pub buggy_behavior: String,
    pub buggy_screen_reference: String,
    pub triggering_interaction: String,
    pub rendered: String,
}

impl ObDescription {
    /// Renders the canonical OB sentence:
    /// "On [screen reference], if the user [interaction], [behavior]."
    pub fn render(
        buggy_screen_reference: impl Into<String>,
        triggering_interaction: impl Into<String>,
        buggy_behavior: impl Into<String>,
    ) -> Self {
        let buggy_screen_reference = buggy_screen_reference.into();
        let triggering_interaction = triggering_interaction.into();
        let buggy_behavior = buggy_behavior.into();
        let mut rendered = format!(
            "On {buggy_screen_reference}, if the user {triggering_interaction}, {buggy_behavior}"
        );
        if !rendered.ends_with('.') {
            rendered.push('.');
        }
        ObDescription { buggy_behavior, buggy_screen_reference, triggering_interaction, rendered }
    }
}

/// Expected-behavior description: the intended behavior plus its rendered
/// "should/shouldn't" sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EbDescription {
    pub intended_behavior: String,
    pub rendered: String,
}

impl EbDescription {
    /// Renders the canonical EB sentence: "[subject] should/shouldn't
    /// [intended behavior]."
    pub fn render(subject: impl Into<String>, should: bool, intended_behavior: impl Into<String>) -> Self {
        let subject = subject.into();
        let intended_behavior = intended_behavior.into();
        let modal = if should { "should" } else { "should not" };
        let mut rendered = format!("{subject} {modal} {intended_behavior}");
        if !rendered.ends_with('.') {
            rendered.push('.');
        }
        EbDescription { intended_behavior, rendered }
    }
}

/// Recovers the three OB elements from a sentence in the canonical
/// "On [screen], if the user [interaction], [behavior]." form. The fixed
/// template is what makes the elements mechanically extractable. Falls back
/// to treating the whole sentence as the buggy behavior when the sentence
/// does not follow the form.
pub fn parse_ob_sentence(rendered: &str) -> ObDescription {
    let text = rendered.trim().trim_end_matches('.');
    if let Some(after_on) = text.strip_prefix("On ") {
        if let Some(split) = after_on.find(", if the user ") {
            let screen_ref = &after_on[..split];
            let rest = &after_on[split + ", if the user ".len()..];
            if let Some(comma) = rest.find(", ") {
                return ObDescription {
                    buggy_behavior: rest[comma + 2..].to_string(),
                    buggy_screen_reference: screen_ref.to_string(),
                    triggering_interaction: rest[..comma].to_string(),
                    rendered: rendered.to_string(),
                };
            }
        }
    }
    ObDescription {
        buggy_behavior: text.to_string(),
        buggy_screen_reference: String::new(),
        triggering_interaction: String::new(),
        rendered: rendered.to_string(),
    }
}

/// Recovers the intended behavior from a "[subject] should/shouldn't ..."
/// sentence; the whole sentence when no modal is present.
pub fn parse_eb_sentence(rendered: &str) -> EbDescription {
    let text = rendered.trim().trim_end_matches('.');
    for modal in [" should not ", " shouldn't ", " should "] {
        if let Some(split) = text.find(modal) {
            return EbDescription {
                intended_behavior: text[split + modal.len()..].to_string(),
                rendered: rendered.to_string(),
            };
        }
    }
    EbDescription { intended_behavior: text.to_string(), rendered: rendered.to_string() }
}

/// The structured report produced by the generation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedReport {
    pub title: String,
    pub ob: ObDescription,
    pub eb: EbDescription,
    pub steps: Vec<AtomicStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub additional_info: Option<String>,
}

/// Curated ground truth for one report: the minimal reproduction path, the
/// buggy screen, and the reference OB/EB elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub report_id: String,
    pub gt_steps: Vec<AtomicStep>,
    pub buggy_screen: ScreenId,
    pub ob_elements: ObDescription,
    pub eb_element: EbDescription,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report parse error at {path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("invalid report: {0}")]
    Invalid(String),
    #[error("unsupported schema '{0}'")]
    UnsupportedSchema(String),
    #[error("ground truth does not validate against the model: {0}")]
    GroundTruthInvalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parses `report.json`, checking the body is non-empty.
pub fn parse_report(text: &str) -> Result<BugReport, ReportError> {
    let mut deserializer = serde_json::Deserializer::from_str(text);
    let report: BugReport =
        serde_path_to_error::deserialize(&mut deserializer).map_err(|e| ReportError::Parse {
            path: format!("/{}", e.path().to_string().replace('.', "/")),
            reason: e.inner().to_string(),
        })?;
    if report.body.trim().is_empty() {
        return Err(ReportError::Invalid("body must be non-empty".into()));
    }
    Ok(report)
}

#[derive(Serialize, Deserialize)]
struct GroundTruthDocument {
    schema: String,
    #[serde(flatten)]
    ground_truth: GroundTruth,
}

pub fn serialize_ground_truth(gt: &GroundTruth) -> String {
    let document =
        GroundTruthDocument { schema: GROUND_TRUTH_SCHEMA.to_string(), ground_truth: gt.clone() };
    let mut text = serde_json::to_string_pretty(&document).expect("ground truth serializes");
    text.push('\n');
    text
}

/// Parses `ground_truth.json` and re-validates it against the model: the
/// steps must form a valid path and the last step must land on the buggy
/// screen.
pub fn parse_ground_truth(text: &str, model: &ExecutionModel) -> Result<GroundTruth, ReportError> {
    let mut deserializer = serde_json::Deserializer::from_str(text);
    let document: GroundTruthDocument =
        serde_path_to_error::deserialize(&mut deserializer).map_err(|e| ReportError::Parse {
            path: format!("/{}", e.path().to_string().replace('.', "/")),
            reason: e.inner().to_string(),
        })?;
    if document.schema != GROUND_TRUTH_SCHEMA {
        return Err(ReportError::UnsupportedSchema(document.schema));
    }
    let gt = document.ground_truth;

    let ids: Option<Vec<InteractionId>> =
        gt.gt_steps.iter().map(|s| s.interaction_id.clone()).collect();
    let Some(ids) = ids else {
        return Err(ReportError::GroundTruthInvalid("every ground-truth step must be grounded".into()));
    };
    let verdict = crate::model::validate_path(model, &ids);
    if !verdict.valid {
        return Err(ReportError::GroundTruthInvalid(
            verdict.reason.unwrap_or_else(|| "invalid path".into()),
        ));
    }
    let last = ids.last().and_then(|id| model.interaction(id)).expect("validated non-empty path");
    if last.target != gt.buggy_screen {
        return Err(ReportError::GroundTruthInvalid(format!(
            "last step ends on '{}', not the buggy screen '{}'",
            last.target, gt.buggy_screen
        )));
    }
    Ok(gt)
}

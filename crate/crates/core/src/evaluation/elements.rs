//! Quality labels for the OB/EB information elements of a generated report,
//! judged against ground truth either by bundled human labels or by an LLM
//! judge behind the gateway.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{CompletionRequest, Gateway, GatewayError};
use crate::report::{GeneratedReport, GroundTruth};

pub const ASSESSMENT_SCHEMA: &str = "bugscribe-assess/1";
pub const JUDGE_TEMPLATE: &str = "judge-elements.v1";

/// The four assessed information elements: three from the OB, one from the
/// EB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    BuggyBehavior,
    TriggeringInteraction,
    BuggyScreenReference,
    IntendedBehavior,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [
        ElementKind::BuggyBehavior,
        ElementKind::TriggeringInteraction,
        ElementKind::BuggyScreenReference,
        ElementKind::IntendedBehavior,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            ElementKind::BuggyBehavior => "buggy behavior",
            ElementKind::TriggeringInteraction => "triggering GUI interaction",
            ElementKind::BuggyScreenReference => "buggy screen reference",
            ElementKind::IntendedBehavior => "intended behavior",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualityLabel {
    Correct,
    Incomplete,
    Ambiguous,
    Incorrect,
    Missing,
}

impl QualityLabel {
    fn parse(text: &str) -> Option<QualityLabel> {
        match text.trim().to_lowercase().as_str() {
            "correct" => Some(QualityLabel::Correct),
            "incomplete" => Some(QualityLabel::Incomplete),
            "ambiguous" => Some(QualityLabel::Ambiguous),
            "incorrect" => Some(QualityLabel::Incorrect),
            "missing" => Some(QualityLabel::Missing),
            _ => None,
        }
    }
}

/// One element's quality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementAssessment {
    pub element: ElementKind,
    pub label: QualityLabel,
}

#[derive(Debug, Error)]
pub enum AssessmentError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("malformed assessment file: {0}")]
    MalformedFile(String),
    #[error("assessment file is for report '{file}', not '{requested}'")]
    WrongReport { file: String, requested: String },
    #[error("judge returned an unusable verdict: {reason}; raw text: {raw_text:?}")]
    MalformedVerdict { reason: String, raw_text: String },
}

/// Human labels for one report, loaded verbatim in manual-file mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManualAssessments {
    pub report_id: String,
    pub labels: BTreeMap<ElementKind, QualityLabel>,
}

#[derive(Serialize, Deserialize)]
struct AssessmentDocument {
    schema: String,
    #[serde(flatten)]
    assessments: ManualAssessments,
}

pub fn serialize_assessments(assessments: &ManualAssessments) -> String {
    let document =
        AssessmentDocument { schema: ASSESSMENT_SCHEMA.to_string(), assessments: assessments.clone() };
    let mut text = serde_json::to_string_pretty(&document).expect("assessments serialize");
    text.push('\n');
    text
}

pub fn parse_assessments(text: &str) -> Result<ManualAssessments, AssessmentError> {
    let document: AssessmentDocument =
        serde_json::from_str(text).map_err(|e| AssessmentError::MalformedFile(e.to_string()))?;
    if document.schema != ASSESSMENT_SCHEMA {
        return Err(AssessmentError::MalformedFile(format!(
            "unsupported schema '{}'",
            document.schema
        )));
    }
    for element in ElementKind::ALL {
        if !document.assessments.labels.contains_key(&element) {
            return Err(AssessmentError::MalformedFile(format!("missing label for element '{element}'")));
        }
    }
    Ok(document.assessments)
}

/// How element verdicts are produced.
pub enum Judge<'a> {
    /// Bundled human labels, taken verbatim.
    ManualFile(&'a ManualAssessments),
    /// LLM judge through the gateway; exact matches and empty elements are
    /// short-circuited before any judge call.
    Llm(&'a Gateway),
}

fn element_texts<'r>(
    generated: &'r GeneratedReport,
    gt: &'r GroundTruth,
    element: ElementKind,
) -> (&'r str, &'r str) {
    match element {
        ElementKind::BuggyBehavior => (&generated.ob.buggy_behavior, &gt.ob_elements.buggy_behavior),
        ElementKind::TriggeringInteraction => {
            (&generated.ob.triggering_interaction, &gt.ob_elements.triggering_interaction)
        }
        ElementKind::BuggyScreenReference => {
            (&generated.ob.buggy_screen_reference, &gt.ob_elements.buggy_screen_reference)
        }
        ElementKind::IntendedBehavior => (&generated.eb.intended_behavior, &gt.eb_element.intended_behavior),
    }
}

/// Builds the judge request for one element comparison.
pub fn build_judge_request(element: ElementKind, ground_truth_text: &str, generated_text: &str) -> CompletionRequest {
    let mut bindings = BTreeMap::new();
    bindings.insert("element_name".to_string(), element.display_name().to_string());
    bindings.insert("ground_truth_text".to_string(), ground_truth_text.to_string());
    bindings.insert("generated_text".to_string(), generated_text.to_string());
    CompletionRequest::json(JUDGE_TEMPLATE, bindings)
}

fn normalized(text: &str) -> String {
    text.trim().to_lowercase()
}

/// Assesses the four OB/EB elements of a generated report against ground
/// truth. Always returns exactly four assessments, in [`ElementKind::ALL`]
/// order.
pub fn assess_elements(
    generated: &GeneratedReport,
    gt: &GroundTruth,
    judge: Judge<'_>,
) -> Result<Vec<ElementAssessment>, AssessmentError> {
    match judge {
        Judge::ManualFile(manual) => {
            if manual.report_id != gt.report_id {
                return Err(AssessmentError::WrongReport {
                    file: manual.report_id.clone(),
                    requested: gt.report_id.clone(),
                });
            }
            Ok(ElementKind::ALL
                .iter()
                .map(|element| ElementAssessment {
                    element: *element,
                    label: manual.labels[element],
                })
                .collect())
        }
        Judge::Llm(gateway) => {
            let mut assessments = Vec::with_capacity(4);
            for element in ElementKind::ALL {
                let (generated_text, gt_text) = element_texts(generated, gt, element);
                let label = if normalized(generated_text) == normalized(gt_text) {
                    QualityLabel::Correct
                } else if generated_text.trim().is_empty() {
                    QualityLabel::Missing
                } else {
                    let request = build_judge_request(element, gt_text, generated_text);
                    let result = gateway.complete(&request)?;
                    let parsed = result.parsed.as_ref().expect("json request parses or errors");
                    parsed["label"]
                        .as_str()
                        .and_then(QualityLabel::parse)
                        .ok_or_else(|| AssessmentError::MalformedVerdict {
                            reason: "response has no recognizable 'label'".into(),
                            raw_text: result.raw_text.clone(),
                        })?
                };
                assessments.push(ElementAssessment { element, label });
            }
            Ok(assessments)
        }
    }
}

/// Per-element counts across a dataset, one column per quality label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementCounts {
    pub correct: usize,
    pub incomplete: usize,
    pub ambiguous: usize,
    pub missing: usize,
    pub incorrect: usize,
}

impl ElementCounts {
    pub fn total(&self) -> usize {
        self.correct + self.incomplete + self.ambiguous + self.missing + self.incorrect
    }

    fn bump(&mut self, label: QualityLabel) {
        match label {
            QualityLabel::Correct => self.correct += 1,
            QualityLabel::Incomplete => self.incomplete += 1,
            QualityLabel::Ambiguous => self.ambiguous += 1,
            QualityLabel::Incorrect => self.incorrect += 1,
            QualityLabel::Missing => self.missing += 1,
        }
    }
}

/// Counts quality labels per element over many reports' assessments. Every
/// row of the result sums to the report count.
pub fn aggregate(per_report: &[Vec<ElementAssessment>]) -> BTreeMap<ElementKind, ElementCounts> {
    let mut table: BTreeMap<ElementKind, ElementCounts> = BTreeMap::new();
    for assessments in per_report {
        for assessment in assessments {
            table.entry(assessment.element).or_default().bump(assessment.label);
        }
    }
    table
}

/// CSV with one row per element and one column per quality label.
pub fn elements_csv(table: &BTreeMap<ElementKind, ElementCounts>) -> String {
    let mut out = String::from("element,correct,incomplete,ambiguous,missing,incorrect\n");
    for element in ElementKind::ALL {
        let counts = table.get(&element).copied().unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            element.display_name().replace(' ', "_"),
            counts.correct,
            counts.incomplete,
            counts.ambiguous,
            counts.missing,
            counts.incorrect
        ));
    }
    out
}

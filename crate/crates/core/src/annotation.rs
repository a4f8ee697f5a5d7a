//! Sentence annotation: label every report sentence as OB, EB, S2R, or
//! OTHER. One gateway request per report, so labels benefit from discourse
//! context.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{CompletionRequest, Gateway, GatewayError};
use crate::report::{split_sentences, BugReport, LabeledSentence, SentenceLabel};

pub const LABELED_REPORT_SCHEMA: &str = "bugscribe-labeled/1";
pub const CLASSIFY_TEMPLATE: &str = "classify.v1";

/// A report with one label per sentence. The sentence list equals
/// `split_sentences(report.body)` in text and order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledReport {
    pub report: BugReport,
    pub sentences: Vec<LabeledSentence>,
}

impl LabeledReport {
    /// Sentences carrying a given label, in report order.
    pub fn with_label(&self, label: SentenceLabel) -> impl Iterator<Item = &LabeledSentence> {
        self.sentences.iter().filter(move |s| s.label == label)
    }

    pub fn has_label(&self, label: SentenceLabel) -> bool {
        self.with_label(label).next().is_some()
    }

    /// Deterministic text block "index [LABEL] sentence" used in prompts.
    pub fn to_prompt_block(&self) -> String {
        let mut out = String::new();
        if !self.report.title.is_empty() {
            out.push_str(&format!("title: {}\n", self.report.title));
        }
        for sentence in &self.sentences {
            let label = match sentence.label {
                SentenceLabel::Ob => "OB",
                SentenceLabel::Eb => "EB",
                SentenceLabel::S2r => "S2R",
                SentenceLabel::Other => "OTHER",
            };
            out.push_str(&format!("{} [{}] {}\n", sentence.index, label, sentence.text));
        }
        out
    }

    pub fn validate(&self) -> Result<(), AnnotationError> {
        let expected = split_sentences(&self.report.body);
        if expected.len() != self.sentences.len() {
            return Err(AnnotationError::Inconsistent(format!(
                "{} sentences labeled, body splits into {}",
                self.sentences.len(),
                expected.len()
            )));
        }
        for (index, (sentence, text)) in self.sentences.iter().zip(&expected).enumerate() {
            if sentence.index != index {
                return Err(AnnotationError::Inconsistent(format!(
                    "sentence {index} carries index {}",
                    sentence.index
                )));
            }
            if &sentence.text != text {
                return Err(AnnotationError::Inconsistent(format!(
                    "sentence {index} text differs from the split body"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("classifier returned malformed labels: {reason}; raw text: {raw_text:?}")]
    MalformedLabels { reason: String, raw_text: String },
    #[error("labeled report is inconsistent: {0}")]
    Inconsistent(String),
}

/// Builds the classification request for a report. Shared by the pipeline
/// and by fixture tooling so recorded keys always line up.
pub fn build_classify_request(report: &BugReport) -> CompletionRequest {
    let sentences = split_sentences(&report.body);
    let mut numbered = String::new();
    for (index, sentence) in sentences.iter().enumerate() {
        numbered.push_str(&format!("{index}: {sentence}\n"));
    }
    let mut bindings = BTreeMap::new();
    bindings.insert("report_title".to_string(), report.title.clone());
    bindings.insert("sentences".to_string(), numbered);
    CompletionRequest::json(CLASSIFY_TEMPLATE, bindings)
}

/// Classifies every sentence of the report through the gateway.
///
/// The completion must be a JSON array of {"index", "label"} objects.
/// Indices the model omits default to OTHER; out-of-range or duplicate
/// indices are rejected. If the model emits several labels for one
/// sentence, the priority OB > EB > S2R picks the single label.
pub fn classify_sentences(report: &BugReport, gateway: &Gateway) -> Result<LabeledReport, AnnotationError> {
    let sentences = split_sentences(&report.body);
    let request = build_classify_request(report);
    let result = gateway.complete(&request)?;
    let parsed = result.parsed.as_ref().expect("json request parses or errors");

    let labels = parse_label_array(parsed, sentences.len())
        .map_err(|reason| AnnotationError::MalformedLabels { reason, raw_text: result.raw_text.clone() })?;

    let labeled = LabeledReport {
        report: report.clone(),
        sentences: sentences
            .into_iter()
            .enumerate()
            .map(|(index, text)| LabeledSentence {
                index,
                text,
                label: labels.get(&index).copied().unwrap_or(SentenceLabel::Other),
            })
            .collect(),
    };
    labeled.validate()?;
    Ok(labeled)
}

fn parse_label_array(
    value: &serde_json::Value,
    sentence_count: usize,
) -> Result<BTreeMap<usize, SentenceLabel>, String> {
    let array = value.as_array().ok_or("expected a JSON array")?;
    let mut labels = BTreeMap::new();
    for entry in array {
        let index = entry["index"]
            .as_u64()
            .ok_or_else(|| format!("entry without numeric index: {entry}"))? as usize;
        if index >= sentence_count {
            return Err(format!("index {index} out of range for {sentence_count} sentences"));
        }
        if labels.contains_key(&index) {
            return Err(format!("duplicate index {index}"));
        }
        let label = parse_label_value(&entry["label"])
            .ok_or_else(|| format!("entry with unrecognized label: {entry}"))?;
        labels.insert(index, label);
    }
    Ok(labels)
}

/// Accepts a single label string, a separator-joined multi-label string, or
/// an array of labels; multiples fold by priority OB > EB > S2R > OTHER.
fn parse_label_value(value: &serde_json::Value) -> Option<SentenceLabel> {
    let tokens: Vec<String> = match value {
        serde_json::Value::String(s) => s
            .split([',', '|', '/', '+'])
            .map(|t| t.trim().to_uppercase())
            .filter(|t| !t.is_empty())
            .collect(),
        serde_json::Value::Array(items) => {
            items.iter().filter_map(|v| v.as_str()).map(|s| s.trim().to_uppercase()).collect()
        }
        _ => return None,
    };
    if tokens.is_empty() {
        return None;
    }
    let mut parsed = Vec::new();
    for token in &tokens {
        match token.as_str() {
            "OB" => parsed.push(SentenceLabel::Ob),
            "EB" => parsed.push(SentenceLabel::Eb),
            "S2R" => parsed.push(SentenceLabel::S2r),
            "OTHER" => parsed.push(SentenceLabel::Other),
            _ => return None,
        }
    }
    for priority in [SentenceLabel::Ob, SentenceLabel::Eb, SentenceLabel::S2r] {
        if parsed.contains(&priority) {
            return Some(priority);
        }
    }
    Some(SentenceLabel::Other)
}

/// Deterministic keyword classifier for offline smoke tests. Never used for
/// evaluation runs.
pub fn classify_sentences_heuristic(report: &BugReport) -> LabeledReport {
    let sentences = split_sentences(&report.body);
    let labeled = sentences
        .into_iter()
        .enumerate()
        .map(|(index, text)| {
            let label = heuristic_label(&text);
            LabeledSentence { index, text, label }
        })
        .collect();
    LabeledReport { report: report.clone(), sentences: labeled }
}

fn heuristic_label(sentence: &str) -> SentenceLabel {
    let lower = sentence.to_lowercase();
    let has_word = |w: &str| lower.split(|c: char| !c.is_alphanumeric()).any(|t| t == w);

    if has_word("should") || has_word("shouldn") || has_word("expected") || has_word("expect") {
        return SentenceLabel::Eb;
    }
    const FAULT_WORDS: &[&str] =
        &["crash", "crashes", "crashed", "error", "exception", "fails", "failed", "incorrect", "wrong", "freezes", "frozen", "blank", "disappears"];
    if FAULT_WORDS.iter().any(|w| has_word(w)) {
        return SentenceLabel::Ob;
    }
    let is_list_item = lower
        .trim_start()
        .chars()
        .next()
        .map(|c| c.is_ascii_digit() || c == '-' || c == '*')
        .unwrap_or(false);
    const ACTION_VERBS: &[&str] =
        &["open", "tap", "click", "press", "select", "type", "enter", "go", "navigate", "swipe", "scroll", "launch", "rotate", "long"];
    let first_word = lower.split(|c: char| !c.is_alphanumeric()).find(|t| !t.is_empty());
    if is_list_item || first_word.map(|w| ACTION_VERBS.contains(&w)).unwrap_or(false) {
        return SentenceLabel::S2r;
    }
    SentenceLabel::Other
}

#[derive(Serialize, Deserialize)]
struct LabeledReportDocument {
    schema: String,
    #[serde(flatten)]
    labeled: LabeledReport,
}

pub fn serialize_labeled_report(labeled: &LabeledReport) -> String {
    let document = LabeledReportDocument {
        schema: LABELED_REPORT_SCHEMA.to_string(),
        labeled: labeled.clone(),
    };
    let mut text = serde_json::to_string_pretty(&document).expect("labeled report serializes");
    text.push('\n');
    text
}

pub fn parse_labeled_report(text: &str) -> Result<LabeledReport, AnnotationError> {
    let document: LabeledReportDocument = serde_json::from_str(text)
        .map_err(|e| AnnotationError::Inconsistent(format!("parse error: {e}")))?;
    if document.schema != LABELED_REPORT_SCHEMA {
        return Err(AnnotationError::Inconsistent(format!(
            "unsupported schema '{}'",
            document.schema
        )));
    }
    document.labeled.validate()?;
    Ok(document.labeled)
}

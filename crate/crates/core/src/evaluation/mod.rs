//! The bug-report quality model: step matching (correct/extra/missing),
//! OB/EB element labeling, precision/recall/F1, and annotator-agreement
//! statistics, plus the per-report scorecard document.

mod agreement;
mod elements;
mod matching;
mod metrics;

pub use agreement::{
    agreement_report, cohen_kappa, krippendorff_alpha, observed_agreement, AgreementError,
    AgreementReport, AlphaResult, KappaResult,
};
pub use elements::{
    aggregate, assess_elements, build_judge_request, elements_csv, parse_assessments,
    serialize_assessments, AssessmentError, ElementAssessment, ElementCounts, ElementKind, Judge,
    ManualAssessments, QualityLabel, ASSESSMENT_SCHEMA, JUDGE_TEMPLATE,
};
pub use matching::{
    decompose_compound_step, match_steps, normalize_step_text, steps_equivalent, StepLabel,
    StepMatch,
};
pub use metrics::{compute_metrics, compute_metrics_from_counts, render_percentage, Metrics};

use serde::{Deserialize, Serialize};

pub const SCORECARD_SCHEMA: &str = "bugscribe-scorecard/1";

/// Per-report evaluation result: the step alignment, its derived metrics,
/// and the element quality labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scorecard {
    pub report_id: String,
    pub step_match: StepMatch,
    pub metrics: Metrics,
    pub elements: Vec<ElementAssessment>,
}

impl Scorecard {
    pub fn new(report_id: &str, step_match: StepMatch, elements: Vec<ElementAssessment>) -> Scorecard {
        let metrics = compute_metrics(
            step_match.correct_steps() as u64,
            step_match.extra_steps() as u64,
            step_match.missing_steps() as u64,
        );
        Scorecard { report_id: report_id.to_string(), step_match, metrics, elements }
    }

    /// Conservation check: CS+ES covers the generated list and CS+MS the
    /// ground truth.
    pub fn validate(&self) -> Result<(), String> {
        let cs = self.step_match.correct_steps() as u64;
        let es = self.step_match.extra_steps() as u64;
        let ms = self.step_match.missing_steps() as u64;
        if cs + es != self.step_match.generated_labels.len() as u64 {
            return Err("CS + ES does not cover the generated steps".into());
        }
        if self.metrics.tp != cs || self.metrics.fp != es || self.metrics.fn_count != ms {
            return Err("metrics counts do not match the step labels".into());
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ScorecardDocument {
    schema: String,
    #[serde(flatten)]
    scorecard: Scorecard,
}

pub fn serialize_scorecard(scorecard: &Scorecard) -> String {
    let document =
        ScorecardDocument { schema: SCORECARD_SCHEMA.to_string(), scorecard: scorecard.clone() };
    let mut text = serde_json::to_string_pretty(&document).expect("scorecard serializes");
    text.push('\n');
    text
}

pub fn parse_scorecard(text: &str) -> Result<Scorecard, String> {
    let document: ScorecardDocument = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if document.schema != SCORECARD_SCHEMA {
        return Err(format!("unsupported schema '{}'", document.schema));
    }
    document.scorecard.validate()?;
    Ok(document.scorecard)
}

/// CSV with the step-metrics column layout: one row per labeled run.
pub fn steps_csv(rows: &[(String, Metrics)]) -> String {
    let mut out = String::from("approach,cs,es,ms,precision,recall,f1\n");
    for (label, metrics) in rows {
        let fmt = |v: Option<f64>| v.map(render_percentage).unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            label,
            metrics.tp,
            metrics.fp,
            metrics.fn_count,
            fmt(metrics.precision),
            fmt(metrics.recall),
            fmt(metrics.f1),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::AtomicStep;

    fn step(ordinal: usize, text: &str) -> AtomicStep {
        AtomicStep { ordinal, text: text.into(), interaction_id: None, source_screen: None, target_screen: None }
    }

    #[test]
    fn scorecard_round_trips_and_validates() {
        let generated = vec![step(1, "open the app"), step(2, "tap 'X' button")];
        let gt = vec![step(1, "open the app"), step(2, "tap 'Y' button")];
        let card = Scorecard::new("r1", match_steps(&generated, &gt), vec![]);
        let text = serialize_scorecard(&card);
        let parsed = parse_scorecard(&text).unwrap();
        assert_eq!(parsed, card);
        assert_eq!(parsed.metrics.tp, 1);
        assert_eq!(parsed.metrics.fp, 1);
        assert_eq!(parsed.metrics.fn_count, 1);
    }

    #[test]
    fn steps_csv_renders_two_decimal_percentages() {
        // recall is 88.8147: the unrounded ratio renders as 88.81
        let csv = steps_csv(&[("generated".into(), compute_metrics(532, 57, 67))]);
        assert!(csv.contains("generated,532,57,67,90.32,88.81,89.56"), "{csv}");
    }
}

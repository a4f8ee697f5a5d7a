//! Precision/recall/F1 over step labels: correct steps are true positives,
//! extra steps false positives, missing steps false negatives.

use serde::{Deserialize, Serialize};

/// Counts plus derived percentages. A ratio with a zero denominator is
/// absent rather than zero, and F1 is absent when either side is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f1: Option<f64>,
}

/// Precision, recall, and F1 as percentages.
pub fn compute_metrics(tp: u64, fp: u64, fn_count: u64) -> Metrics {
    compute_metrics_fractional(tp as f64, fp as f64, fn_count as f64, tp, fp, fn_count)
}

/// Same formulas over fractional counts (e.g. averages across runs).
pub fn compute_metrics_from_counts(tp: f64, fp: f64, fn_count: f64) -> Metrics {
    compute_metrics_fractional(tp, fp, fn_count, tp.round() as u64, fp.round() as u64, fn_count.round() as u64)
}

fn compute_metrics_fractional(tp: f64, fp: f64, fn_: f64, tp_u: u64, fp_u: u64, fn_u: u64) -> Metrics {
    let precision = if tp + fp > 0.0 { Some(100.0 * tp / (tp + fp)) } else { None };
    let recall = if tp + fn_ > 0.0 { Some(100.0 * tp / (tp + fn_)) } else { None };
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    Metrics { tp: tp_u, fp: fp_u, fn_count: fn_u, precision, recall, f1 }
}

/// Two-decimal percentage rendering, round half up, matching the tabular
/// output format.
pub fn render_percentage(value: f64) -> String {
    let scaled = (value * 100.0).round() / 100.0;
    format!("{scaled:.2}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(actual: Option<f64>, expected: f64) -> bool {
        actual.map(|v| (v - expected).abs() <= 0.01).unwrap_or(false)
    }

    #[test]
    fn original_report_row_reproduces() {
        let metrics = compute_metrics(196, 3, 403);
        assert!(close(metrics.precision, 98.49), "{:?}", metrics.precision);
        assert!(close(metrics.recall, 32.72), "{:?}", metrics.recall);
        assert!(close(metrics.f1, 49.12), "{:?}", metrics.f1);
    }

    #[test]
    fn best_variant_row_reproduces() {
        let metrics = compute_metrics(532, 57, 67);
        assert!(close(metrics.precision, 90.32));
        assert!(close(metrics.recall, 88.82));
        assert!(close(metrics.f1, 89.56));
    }

    #[test]
    fn perfect_case_is_all_hundred() {
        let metrics = compute_metrics(5, 0, 0);
        assert_eq!(metrics.precision, Some(100.0));
        assert_eq!(metrics.recall, Some(100.0));
        assert_eq!(metrics.f1, Some(100.0));
    }

    #[test]
    fn zero_denominators_are_absent_not_zero() {
        let metrics = compute_metrics(0, 0, 3);
        assert_eq!(metrics.precision, None);
        assert_eq!(metrics.recall, Some(0.0));
        assert_eq!(metrics.f1, None);

        let empty = compute_metrics(0, 0, 0);
        assert_eq!(empty.precision, None);
        assert_eq!(empty.recall, None);
        assert_eq!(empty.f1, None);
    }

    #[test]
    fn rendering_rounds_half_up_to_two_decimals() {
        assert_eq!(render_percentage(98.4924), "98.49");
        assert_eq!(render_percentage(88.8147), "88.81");
        assert_eq!(render_percentage(0.125), "0.13");
        assert_eq!(render_percentage(100.0), "100.00");
    }
}

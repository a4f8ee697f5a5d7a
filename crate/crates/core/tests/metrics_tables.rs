//! Re-derives every precision/recall/F1 cell of the published step-quality
//! tables from their CS/ES/MS columns.

use bugscribe_core::evaluation::{compute_metrics, compute_metrics_from_counts, Metrics};

fn assert_cells(metrics: &Metrics, p: f64, r: f64, f1: f64, tolerance: f64, label: &str) {
    let checks = [
        ("precision", metrics.precision, p),
        ("recall", metrics.recall, r),
        ("f1", metrics.f1, f1),
    ];
    for (name, actual, expected) in checks {
        let actual = actual.unwrap_or(f64::NAN);
        assert!(
            (actual - expected).abs() <= tolerance,
            "{label} {name}: computed {actual:.4}, table prints {expected}"
        );
    }
}

#[test]
fn test_set_table_rederives_within_a_hundredth() {
    // (cs, es, ms) -> printed (precision, recall, f1), all six rows
    let rows: [(u64, u64, u64, f64, f64, f64, &str); 6] = [
        (196, 3, 403, 98.49, 32.72, 49.12, "original reports"),
        (243, 75, 356, 76.42, 40.57, 53.00, "structured-rewrite baseline"),
        (345, 183, 254, 65.34, 57.60, 61.22, "no-context baseline A"),
        (312, 135, 287, 69.80, 52.09, 59.66, "no-context baseline B"),
        (532, 57, 67, 90.32, 88.82, 89.56, "grounded variant A"),
        (538, 82, 61, 86.77, 89.82, 88.27, "grounded variant B"),
    ];
    for (cs, es, ms, p, r, f1, label) in rows {
        let metrics = compute_metrics(cs, es, ms);
        assert_cells(&metrics, p, r, f1, 0.01, label);
        assert_eq!(metrics.tp + metrics.fp, cs + es);
        assert_eq!(metrics.tp + metrics.fn_count, cs + ms);
    }
}

#[test]
fn development_table_rederives_from_run_averaged_counts() {
    // The development table averages three runs and prints counts rounded
    // to one decimal, and its percentages average per-run ratios, so the
    // re-derived cells can drift by a few hundredths. 0.05 covers the
    // worst observed drift.
    let rows: [(f64, f64, f64, f64, f64, f64, &str); 4] = [
        (80.7, 34.3, 28.3, 70.15, 74.01, 72.02, "no context"),
        (95.3, 14.0, 13.7, 87.20, 87.46, 87.33, "interactions"),
        (97.7, 15.0, 12.3, 86.69, 88.79, 87.73, "interactions+screens"),
        (97.3, 13.0, 12.3, 88.22, 88.75, 88.49, "full context"),
    ];
    for (cs, es, ms, p, r, f1, label) in rows {
        let metrics = compute_metrics_from_counts(cs, es, ms);
        assert_cells(&metrics, p, r, f1, 0.05, label);
    }
}

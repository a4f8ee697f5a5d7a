//! Inter-annotator agreement: observed agreement, Cohen's kappa, and
//! Krippendorff's alpha (nominal).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgreementError {
    #[error("label sequences have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("label sequences are empty")]
    Empty,
    #[error("no item has two or more annotations")]
    NoComparableItems,
}

/// Agreement summary for two annotators. The degenerate flags mark the
/// by-convention value 1 on constant data (chance-corrected denominators of
/// zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub observed_agreement: f64,
    pub cohen_kappa: f64,
    pub krippendorff_alpha: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub kappa_degenerate: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub alpha_degenerate: bool,
}

/// Fraction of items the two annotators label identically.
pub fn observed_agreement<T: Eq>(a: &[T], b: &[T]) -> Result<f64, AgreementError> {
    if a.len() != b.len() {
        return Err(AgreementError::LengthMismatch { a: a.len(), b: b.len() });
    }
    if a.is_empty() {
        return Err(AgreementError::Empty);
    }
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaResult {
    pub value: f64,
    /// Chance agreement was 1 (both annotators constant and identical); the
    /// value is 1 by convention.
    pub degenerate: bool,
}

/// Cohen's kappa: (p_o - p_e) / (1 - p_e), with p_e from the product of the
/// two annotators' marginal label distributions.
pub fn cohen_kappa<T: Eq + Ord>(a: &[T], b: &[T]) -> Result<KappaResult, AgreementError> {
    let p_o = observed_agreement(a, b)?;
    let n = a.len() as f64;

    let mut marginals_a: BTreeMap<&T, f64> = BTreeMap::new();
    let mut marginals_b: BTreeMap<&T, f64> = BTreeMap::new();
    for label in a {
        *marginals_a.entry(label).or_default() += 1.0;
    }
    for label in b {
        *marginals_b.entry(label).or_default() += 1.0;
    }
    let mut p_e = 0.0;
    for (label, count_a) in &marginals_a {
        if let Some(count_b) = marginals_b.get(label) {
            p_e += (count_a / n) * (count_b / n);
        }
    }

    if (1.0 - p_e).abs() < f64::EPSILON {
        return Ok(KappaResult { value: 1.0, degenerate: true });
    }
    Ok(KappaResult { value: (p_o - p_e) / (1.0 - p_e), degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaResult {
    pub value: f64,
    /// Expected disagreement was 0 (a single category in use); the value is
    /// 1 by convention.
    pub degenerate: bool,
}

/// Krippendorff's alpha with the nominal distance metric, over an items x
/// annotators matrix. Missing annotations are allowed; items with fewer
/// than two annotations are excluded.
pub fn krippendorff_alpha<T: Eq + Ord + Clone>(
    items: &[Vec<Option<T>>],
) -> Result<AlphaResult, AgreementError> {
    // coincidence matrix over ordered label pairs within each item
    let mut coincidence: BTreeMap<(T, T), f64> = BTreeMap::new();
    let mut any_item = false;
    for item in items {
        let values: Vec<&T> = item.iter().flatten().collect();
        let m = values.len();
        if m < 2 {
            continue;
        }
        any_item = true;
        let weight = 1.0 / (m as f64 - 1.0);
        for (i, x) in values.iter().enumerate() {
            for (j, y) in values.iter().enumerate() {
                if i != j {
                    *coincidence.entry(((*x).clone(), (*y).clone())).or_default() += weight;
                }
            }
        }
    }
    if !any_item {
        return Err(AgreementError::NoComparableItems);
    }

    let mut totals: BTreeMap<&T, f64> = BTreeMap::new();
    for ((c, _), count) in &coincidence {
        *totals.entry(c).or_default() += count;
    }
    let n: f64 = totals.values().sum();

    let observed_disagreement: f64 =
        coincidence.iter().filter(|((c, k), _)| c != k).map(|(_, count)| count).sum();
    let mut expected_disagreement = 0.0;
    for (c, n_c) in &totals {
        for (k, n_k) in &totals {
            if c != k {
                expected_disagreement += n_c * n_k;
            }
        }
    }
    expected_disagreement /= n - 1.0;

    if expected_disagreement.abs() < f64::EPSILON {
        return Ok(AlphaResult { value: 1.0, degenerate: true });
    }
    Ok(AlphaResult { value: 1.0 - observed_disagreement / expected_disagreement, degenerate: false })
}

/// Full two-annotator agreement report: observed agreement, kappa, and
/// alpha over the two-row annotation matrix.
pub fn agreement_report<T: Eq + Ord + Clone>(a: &[T], b: &[T]) -> Result<AgreementReport, AgreementError> {
    let observed = observed_agreement(a, b)?;
    let kappa = cohen_kappa(a, b)?;
    let matrix: Vec<Vec<Option<T>>> =
        a.iter().zip(b).map(|(x, y)| vec![Some(x.clone()), Some(y.clone())]).collect();
    let alpha = krippendorff_alpha(&matrix)?;
    Ok(AgreementReport {
        observed_agreement: observed,
        cohen_kappa: kappa.value,
        krippendorff_alpha: alpha.value,
        kappa_degenerate: kappa.degenerate,
        alpha_degenerate: alpha.degenerate,
    })
}

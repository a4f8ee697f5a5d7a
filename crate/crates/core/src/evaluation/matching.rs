//! Step matching: align generated steps against ground truth and label each
//! step Correct/Extra/Missing.

use serde::{Deserialize, Serialize};

use crate::report::AtomicStep;

/// Label for one generated step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepLabel {
    CorrectStep,
    ExtraStep,
}

/// Alignment of generated steps against ground truth. `pairs` holds
/// (generated ordinal, ground-truth ordinal), 1-based, injective both ways
/// and non-crossing. Unpaired generated steps are Extra; unpaired
/// ground-truth ordinals are listed in `missing`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMatch {
    pub pairs: Vec<(usize, usize)>,
    pub generated_labels: Vec<StepLabel>,
    pub missing: Vec<usize>,
}

impl StepMatch {
    pub fn correct_steps(&self) -> usize {
        self.pairs.len()
    }

    pub fn extra_steps(&self) -> usize {
        self.generated_labels.iter().filter(|l| **l == StepLabel::ExtraStep).count()
    }

    pub fn missing_steps(&self) -> usize {
        self.missing.len()
    }
}

/// Whether two steps count as the same interaction. When both carry
/// interaction ids the ids decide; otherwise normalized text equality with
/// the action-synonym table applied. There is no semantic model here:
/// "similar meaning" goes exactly as far as the synonym table.
pub fn steps_equivalent(a: &AtomicStep, b: &AtomicStep) -> bool {
    match (&a.interaction_id, &b.interaction_id) {
        (Some(x), Some(y)) => x == y,
        _ => normalize_step_text(&a.text) == normalize_step_text(&b.text),
    }
}

/// Maximum order-preserving alignment: the most pairs possible subject to
/// pairs being injective and non-crossing. Swapping the arguments swaps
/// Extra and Missing and preserves the Correct count.
pub fn match_steps(generated: &[AtomicStep], ground_truth: &[AtomicStep]) -> StepMatch {
    let m = generated.len();
    let n = ground_truth.len();
    let mut table = vec![vec![0usize; n + 1]; m + 1];
    for i in 1..=m {
        for j in 1..=n {
            table[i][j] = if steps_equivalent(&generated[i - 1], &ground_truth[j - 1]) {
                table[i - 1][j - 1] + 1
            } else {
                table[i - 1][j].max(table[i][j - 1])
            };
        }
    }

    let mut pairs = Vec::new();
    let (mut i, mut j) = (m, n);
    while i > 0 && j > 0 {
        if steps_equivalent(&generated[i - 1], &ground_truth[j - 1])
            && table[i][j] == table[i - 1][j - 1] + 1
        {
            pairs.push((i, j));
            i -= 1;
            j -= 1;
        } else if table[i - 1][j] >= table[i][j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();

    let paired_generated: Vec<usize> = pairs.iter().map(|(g, _)| *g).collect();
    let paired_gt: Vec<usize> = pairs.iter().map(|(_, t)| *t).collect();
    let generated_labels = (1..=m)
        .map(|ordinal| {
            if paired_generated.contains(&ordinal) {
                StepLabel::CorrectStep
            } else {
                StepLabel::ExtraStep
            }
        })
        .collect();
    let missing = (1..=n).filter(|ordinal| !paired_gt.contains(ordinal)).collect();

    StepMatch { pairs, generated_labels, missing }
}

/// Verb synonyms folded to the canonical action vocabulary before
/// comparison (click and tap count as the same action, and so on).
const SYNONYMS: &[(&str, &str)] = &[
    ("click", "tap"),
    ("clicks", "tap"),
    ("taps", "tap"),
    ("select", "tap"),
    ("selects", "tap"),
    ("choose", "tap"),
    ("chooses", "tap"),
    ("hit", "tap"),
    ("push", "tap"),
    ("presses", "press"),
    ("enter", "type"),
    ("enters", "type"),
    ("input", "type"),
    ("types", "type"),
    ("write", "type"),
    ("fill", "type"),
    ("opens", "open"),
    ("launch", "open"),
    ("launches", "open"),
    ("start", "open"),
    ("scroll", "swipe"),
    ("scrolls", "swipe"),
    ("swipes", "swipe"),
    ("rotates", "rotate"),
    ("longtap", "long-tap"),
    ("longpress", "long-tap"),
];

const STOPWORDS: &[&str] = &["the", "a", "an", "on", "in", "into", "at", "of", "to", "then"];

/// Lowercases, strips punctuation, folds verb synonyms, merges "long tap"
/// style bigrams, and drops articles, yielding a canonical comparison key.
pub fn normalize_step_text(text: &str) -> String {
    let lowered: String = text
        .to_lowercase()
        .chars()
        .map(|c| match c {
            '’' | '‘' => '\'',
            '-' => ' ',
            _ => c,
        })
        .filter(|c| !matches!(c, '"' | '\'' | ',' | '.' | ';' | ':' | '!' | '?' | '(' | ')' | '[' | ']'))
        .collect();

    let raw_tokens: Vec<&str> = lowered.split_whitespace().collect();
    let mut tokens: Vec<String> = Vec::with_capacity(raw_tokens.len());
    let mut index = 0;
    while index < raw_tokens.len() {
        // "long tap" / "long press" fold into the long-tap verb
        if raw_tokens[index] == "long" && index + 1 < raw_tokens.len() {
            let next = raw_tokens[index + 1];
            if matches!(next, "tap" | "taps" | "press" | "presses" | "click" | "clicks") {
                tokens.push("long-tap".to_string());
                index += 2;
                continue;
            }
        }
        let token = raw_tokens[index];
        let folded = SYNONYMS
            .iter()
            .find(|(from, _)| *from == token)
            .map(|(_, to)| to.to_string())
            .unwrap_or_else(|| token.to_string());
        if !STOPWORDS.contains(&folded.as_str()) {
            tokens.push(folded);
        }
        index += 1;
    }
    tokens.join(" ")
}

/// Splits a compound step sentence into individual steps on coordinating
/// conjunctions and "then", keeping only pieces that start with an action.
/// Used when ingesting free-text steps before matching; grounded steps are
/// atomic by construction.
pub fn decompose_compound_step(text: &str) -> Vec<String> {
    let mut pieces = vec![text.to_string()];
    for separator in [" and then ", ", then ", " then ", " and "] {
        pieces = pieces
            .into_iter()
            .flat_map(|piece| {
                piece.split(separator).map(str::to_string).collect::<Vec<_>>()
            })
            .collect();
    }
    let cleaned: Vec<String> =
        pieces.into_iter().map(|p| p.trim().trim_end_matches('.').to_string()).filter(|p| !p.is_empty()).collect();
    // only treat the split as a decomposition when every piece still looks
    // like an action; otherwise "select the date and time" style noun
    // phrases would be torn apart
    let verb_start = |piece: &str| {
        let normalized = normalize_step_text(piece);
        let first = normalized.split_whitespace().next().unwrap_or("");
        matches!(first, "open" | "tap" | "long-tap" | "type" | "swipe" | "press" | "rotate" | "go" | "navigate" | "wait")
    };
    if cleaned.len() > 1 && cleaned.iter().all(|p| verb_start(p)) {
        cleaned
    } else {
        vec![text.trim().trim_end_matches('.').to_string()]
    }
}

//! Markdown rendering of generated reports and the inverse parser used by
//! the evaluation commands.

use super::{GeneratedReport, ReportError};

pub const OBSERVED_HEADER: &str = "## Observed Behavior";
pub const EXPECTED_HEADER: &str = "## Expected Behavior";
pub const STEPS_HEADER: &str = "## Steps to Reproduce";
pub const ADDITIONAL_HEADER: &str = "## Additional Information";

/// Renders the report as UTF-8 markdown with LF line endings. Sections are
/// always emitted in the order title, OB, EB, S2Rs, additional information;
/// the additional-information section is omitted when absent.
pub fn render_markdown(report: &GeneratedReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", report.title));
    out.push_str(&format!("\n{OBSERVED_HEADER}\n\n{}\n", report.ob.rendered));
    out.push_str(&format!("\n{EXPECTED_HEADER}\n\n{}\n", report.eb.rendered));
    out.push_str(&format!("\n{STEPS_HEADER}\n\n"));
    for step in &report.steps {
        out.push_str(&format!("{}. {}\n", step.ordinal, step.text));
    }
    if let Some(info) = &report.additional_info {
        out.push_str(&format!("\n{ADDITIONAL_HEADER}\n\n{info}\n"));
    }
    out
}

/// The structured fields recovered from a rendered report. Grounding is not
/// part of the markdown surface, so steps come back as bare text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGeneratedReport {
    pub title: String,
    pub observed: String,
    pub expected: String,
    pub steps: Vec<String>,
    pub additional_info: Option<String>,
}

/// Parses markdown produced by [`render_markdown`]; the inverse of rendering
/// on the structured fields.
pub fn parse_generated_markdown(text: &str) -> Result<ParsedGeneratedReport, ReportError> {
    let mut title = None;
    let mut section: Option<&str> = None;
    let mut observed = String::new();
    let mut expected = String::new();
    let mut steps = Vec::new();
    let mut additional = String::new();

    for line in text.lines() {
        if let Some(t) = line.strip_prefix("# ") {
            if title.is_none() {
                title = Some(t.to_string());
                continue;
            }
        }
        match line.trim_end() {
            OBSERVED_HEADER => section = Some("ob"),
            EXPECTED_HEADER => section = Some("eb"),
            STEPS_HEADER => section = Some("steps"),
            ADDITIONAL_HEADER => section = Some("info"),
            content => match section {
                Some("ob") => append_line(&mut observed, content),
                Some("eb") => append_line(&mut expected, content),
                Some("steps") => {
                    if let Some(step) = parse_step_line(content) {
                        steps.push(step);
                    }
                }
                Some("info") => append_line(&mut additional, content),
                _ => {}
            },
        }
    }

    let title = title.ok_or_else(|| ReportError::Invalid("missing title line".into()))?;
    if observed.is_empty() || expected.is_empty() {
        return Err(ReportError::Invalid("missing observed/expected sections".into()));
    }
    if steps.is_empty() {
        return Err(ReportError::Invalid("missing steps section".into()));
    }
    Ok(ParsedGeneratedReport {
        title,
        observed,
        expected,
        steps,
        additional_info: if additional.is_empty() { None } else { Some(additional) },
    })
}

fn append_line(buffer: &mut String, line: &str) {
    let line = line.trim();
    if line.is_empty() {
        return;
    }
    if !buffer.is_empty() {
        buffer.push(' ');
    }
    buffer.push_str(line);
}

fn parse_step_line(line: &str) -> Option<String> {
    let trimmed = line.trim();
    let digits: String = trimmed.chars().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() {
        return None;
    }
    let rest = trimmed[digits.len()..].strip_prefix(". ")?;
    Some(rest.to_string())
}

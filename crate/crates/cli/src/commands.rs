//! Implementations of the CLI subcommands over the documented file formats.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};

use bugscribe_core::annotation::{
    classify_sentences, classify_sentences_heuristic, parse_labeled_report,
    serialize_labeled_report,
};
use bugscribe_core::context::{
    build_catalog, describe_screens, localize_buggy_screen, parse_descriptions,
    serialize_descriptions, serialize_ranking,
};
use bugscribe_core::evaluation::{
    agreement_report, assess_elements, decompose_compound_step, elements_csv, match_steps,
    parse_assessments, serialize_scorecard, steps_csv, AgreementReport, ElementAssessment,
    Judge, Metrics, Scorecard,
};
use bugscribe_core::gateway::{Gateway, HttpTransport};
use bugscribe_core::generation::{run_pipeline, serialize_trace, ContextConfig, GenerationTrace};
use bugscribe_core::model::{deserialize_model, serialize_model, ExecutionModel, Trace};
use bugscribe_core::report::{
    parse_eb_sentence, parse_generated_markdown, parse_ground_truth, parse_ob_sentence,
    parse_report, render_markdown, AtomicStep, BugReport, GeneratedReport, GroundTruth,
};

use crate::io::{read_file, sorted_json_files, write_atomic};
use crate::{EvaluateArgs, GenerateArgs, Mode, PipelineAllArgs};

/// Warnings accumulated by a command, surfaced in the run manifest.
pub type Warnings = Vec<String>;

pub fn build_model(traces_dir: &Path, out: &Path) -> Result<Warnings> {
    let files = sorted_json_files(traces_dir)?;
    if files.is_empty() {
        bail!("no .json trace files in {}", traces_dir.display());
    }
    let mut model: Option<ExecutionModel> = None;
    for file in &files {
        let trace: Trace = serde_json::from_str(&read_file(file)?)
            .with_context(|| format!("parsing trace {}", file.display()))?;
        let current = match model.take() {
            None => ExecutionModel::new(trace.app_id.clone()),
            Some(m) => m,
        };
        model = Some(
            current
                .ingest_trace(&trace)
                .with_context(|| format!("ingesting trace {}", file.display()))?,
        );
    }
    let model = model.expect("at least one trace");
    write_atomic(out, &serialize_model(&model))?;
    Ok(Vec::new())
}

pub fn load_model(path: &Path) -> Result<ExecutionModel> {
    deserialize_model(&read_file(path)?).with_context(|| format!("loading model {}", path.display()))
}

pub fn make_gateway(mode: Mode, fixtures: &Path, rpm: u32, force: bool) -> Result<Gateway> {
    let gateway = match mode {
        Mode::Replay => Gateway::replay(fixtures),
        Mode::Record => Gateway::record(fixtures, Box::new(HttpTransport::from_env()?))
            .with_rate_limit(rpm)
            .with_force_record(force),
        Mode::Live => {
            Gateway::live(fixtures, Box::new(HttpTransport::from_env()?)).with_rate_limit(rpm)
        }
    };
    Ok(gateway)
}

pub fn annotate(report_path: &Path, out: &Path, gateway: &Gateway, heuristic: bool) -> Result<Warnings> {
    let report = parse_report(&read_file(report_path)?)?;
    let labeled = if heuristic {
        classify_sentences_heuristic(&report)
    } else {
        classify_sentences(&report, gateway)?
    };
    write_atomic(out, &serialize_labeled_report(&labeled))?;
    Ok(Vec::new())
}

pub fn describe(model_path: &Path, out: &Path, gateway: &Gateway) -> Result<Warnings> {
    let model = load_model(model_path)?;
    let descriptions = describe_screens(&model, gateway)?;
    write_atomic(out, &serialize_descriptions(&descriptions))?;
    Ok(Vec::new())
}

pub fn localize(
    labeled_path: &Path,
    model_path: &Path,
    descriptions_path: &Path,
    out: &Path,
    gateway: &Gateway,
) -> Result<Warnings> {
    let labeled = parse_labeled_report(&read_file(labeled_path)?)?;
    let model = load_model(model_path)?;
    let descriptions = parse_descriptions(&read_file(descriptions_path)?)?;
    let catalog = build_catalog(&model);
    let (ranking, warnings) = localize_buggy_screen(&labeled, &descriptions, &catalog, gateway)?;
    write_atomic(out, &serialize_ranking(&ranking))?;
    Ok(warnings)
}

pub fn generate(args: &GenerateArgs, config: ContextConfig, gateway: &Gateway) -> Result<Warnings> {
    let report = parse_report(&read_file(&args.report)?)?;
    let model = load_model(&args.model)?;
    let (generated, trace) = run_pipeline(&report, &model, &config, gateway)?;
    write_atomic(&args.out, &render_markdown(&generated))?;
    if let Some(trace_path) = &args.trace {
        write_atomic(trace_path, &serialize_trace(&trace))?;
    }
    Ok(trace.warnings)
}

/// Steps parsed from a rendered report: enumerated items, decomposed on
/// conjunctions so compound phrasings are counted individually.
fn steps_from_markdown(step_texts: &[String]) -> Vec<AtomicStep> {
    let mut steps = Vec::new();
    for text in step_texts {
        for piece in decompose_compound_step(text) {
            steps.push(AtomicStep {
                ordinal: steps.len() + 1,
                text: piece,
                interaction_id: None,
                source_screen: None,
                target_screen: None,
            });
        }
    }
    steps
}

pub fn evaluate(args: &EvaluateArgs, gateway: Option<&Gateway>) -> Result<Warnings> {
    let model = load_model(&args.model)?;
    let gt = parse_ground_truth(&read_file(&args.ground_truth)?, &model)?;
    let parsed = parse_generated_markdown(&read_file(&args.generated)?)?;

    let generated = GeneratedReport {
        title: parsed.title.clone(),
        ob: parse_ob_sentence(&parsed.observed),
        eb: parse_eb_sentence(&parsed.expected),
        steps: steps_from_markdown(&parsed.steps),
        additional_info: parsed.additional_info.clone(),
    };

    let elements = assess(&generated, &gt, args.assessments.as_deref(), gateway)?;
    let scorecard =
        Scorecard::new(&gt.report_id, match_steps(&generated.steps, &gt.gt_steps), elements);
    write_atomic(&args.out, &serialize_scorecard(&scorecard))?;
    Ok(Vec::new())
}

fn assess(
    generated: &GeneratedReport,
    gt: &GroundTruth,
    assessments_path: Option<&Path>,
    gateway: Option<&Gateway>,
) -> Result<Vec<ElementAssessment>> {
    match (assessments_path, gateway) {
        (Some(path), _) => {
            let manual = parse_assessments(&read_file(path)?)?;
            Ok(assess_elements(generated, gt, Judge::ManualFile(&manual))?)
        }
        (None, Some(gateway)) => Ok(assess_elements(generated, gt, Judge::Llm(gateway))?),
        (None, None) => bail!("element assessment needs --assessments FILE or --judge llm"),
    }
}

pub fn agree(a_path: &Path, b_path: &Path) -> Result<(AgreementReport, Warnings)> {
    let a = parse_labels(a_path)?;
    let b = parse_labels(b_path)?;
    let report = agreement_report(&a, &b)?;
    Ok((report, Vec::new()))
}

fn parse_labels(path: &Path) -> Result<Vec<String>> {
    let value: serde_json::Value = serde_json::from_str(&read_file(path)?)
        .with_context(|| format!("parsing labels {}", path.display()))?;
    let array = value
        .as_array()
        .or_else(|| value.get("labels").and_then(|l| l.as_array()))
        .ok_or_else(|| anyhow!("{} must be a JSON array of labels or {{\"labels\": [...]}}", path.display()))?;
    array
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| anyhow!("labels must be strings")))
        .collect()
}

struct PipelineItem {
    report_id: String,
    generated: GeneratedReport,
    trace: GenerationTrace,
    scorecard: Scorecard,
}

/// Generates and evaluates every report of a directory against one model,
/// then writes per-report outputs plus the aggregate CSV tables.
pub fn pipeline_all(args: &PipelineAllArgs, config: ContextConfig, gateway: &Gateway) -> Result<Warnings> {
    let model = load_model(&args.model)?;
    let report_files = sorted_json_files(&args.reports)?;
    if report_files.is_empty() {
        bail!("no report files in {}", args.reports.display());
    }
    let reports: Vec<BugReport> = report_files
        .iter()
        .map(|f| Ok(parse_report(&read_file(f)?)?))
        .collect::<Result<Vec<_>>>()?;

    let jobs = args.jobs.max(1);
    let results: Mutex<BTreeMap<String, PipelineItem>> = Mutex::new(BTreeMap::new());
    let failures: Mutex<Vec<String>> = Mutex::new(Vec::new());

    std::thread::scope(|scope| {
        let (results, failures, model, config) = (&results, &failures, &model, &config);
        for chunk in reports.chunks(reports.len().div_ceil(jobs)) {
            scope.spawn(move || {
                for report in chunk {
                    match process_one(report, model, config, gateway, args) {
                        Ok(item) => {
                            results.lock().unwrap().insert(item.report_id.clone(), item);
                        }
                        Err(e) => {
                            failures.lock().unwrap().push(format!("{}: {e:#}", report.report_id));
                        }
                    }
                }
            });
        }
    });

    let failures = failures.into_inner().unwrap();
    if !failures.is_empty() {
        bail!("pipeline failed for {} report(s): {}", failures.len(), failures.join("; "));
    }

    let results = results.into_inner().unwrap();
    let mut warnings = Vec::new();
    let mut total = (0u64, 0u64, 0u64);
    let mut all_assessments = Vec::new();
    for item in results.values() {
        write_atomic(&args.out.join(format!("{}.md", item.report_id)), &render_markdown(&item.generated))?;
        write_atomic(
            &args.out.join(format!("{}.trace.json", item.report_id)),
            &serialize_trace(&item.trace),
        )?;
        write_atomic(
            &args.out.join(format!("{}.scorecard.json", item.report_id)),
            &serialize_scorecard(&item.scorecard),
        )?;
        for warning in &item.trace.warnings {
            warnings.push(format!("{}: {warning}", item.report_id));
        }
        total.0 += item.scorecard.metrics.tp;
        total.1 += item.scorecard.metrics.fp;
        total.2 += item.scorecard.metrics.fn_count;
        all_assessments.push(item.scorecard.elements.clone());
    }

    let totals: Metrics = bugscribe_core::evaluation::compute_metrics(total.0, total.1, total.2);
    write_atomic(
        &args.out.join("aggregate_steps.csv"),
        &steps_csv(&[("generated".to_string(), totals)]),
    )?;
    let table = bugscribe_core::evaluation::aggregate(&all_assessments);
    write_atomic(&args.out.join("aggregate_elements.csv"), &elements_csv(&table))?;
    Ok(warnings)
}

fn process_one(
    report: &BugReport,
    model: &ExecutionModel,
    config: &ContextConfig,
    gateway: &Gateway,
    args: &PipelineAllArgs,
) -> Result<PipelineItem> {
    let (generated, trace) = run_pipeline(report, model, config, gateway)?;

    let gt_path = args.ground_truth.join(format!("{}.json", report.report_id));
    let gt = parse_ground_truth(&read_file(&gt_path)?, model)?;

    let assessment_path = args
        .assessments
        .as_ref()
        .map(|dir| dir.join(format!("{}.json", report.report_id)));
    let elements = assess(&generated, &gt, assessment_path.as_deref(), Some(gateway))?;

    let scorecard =
        Scorecard::new(&report.report_id, match_steps(&generated.steps, &gt.gt_steps), elements);
    Ok(PipelineItem { report_id: report.report_id.clone(), generated, trace, scorecard })
}

pub fn config_from_name(name: &str) -> Result<ContextConfig> {
    use bugscribe_core::generation::{ObEbContext, S2rContext};
    let config = match name {
        "default" => ContextConfig::default(),
        "no-info" => ContextConfig::no_info(),
        "interactions" => ContextConfig {
            s2r_context: S2rContext::Interactions,
            obeb_context: ObEbContext::BuggyScreen,
        },
        "interactions+screens" => ContextConfig {
            s2r_context: S2rContext::InteractionsScreens,
            obeb_context: ObEbContext::S2rsBuggyScreen,
        },
        other => bail!("unknown config '{other}' (expected default, no-info, interactions, interactions+screens)"),
    };
    Ok(config)
}


//! Regenerates everything under `data/`: per-app traces, models, reports,
//! ground truth, manual assessments, the completion fixture set, golden
//! files, and the dataset manifest. Run from anywhere in the workspace:
//!
//!     cargo run -p bugscribe-fixgen
//!
//! The output is deterministic; a clean run produces byte-identical files.

mod apps;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};

use bugscribe_core::annotation::{build_classify_request, LabeledReport};
use bugscribe_core::context::{
    build_catalog, build_describe_request, build_localize_request, RankedScreen, ScreenDescription,
    ScreenDescriptions, ScreenRanking, LAUNCHER_DESCRIPTION,
};
use bugscribe_core::evaluation::{
    aggregate, assess_elements, build_judge_request, match_steps, serialize_assessments,
    ElementAssessment, ElementKind, Judge, ManualAssessments, QualityLabel,
};
use bugscribe_core::gateway::{FixtureStore, Gateway};
use bugscribe_core::generation::{
    build_obeb_request, build_s2r_request, run_pipeline, steps_from_ids, ContextConfig,
    ObEbContext, S2rContext,
};
use bugscribe_core::model::{screen_identity, serialize_model, validate_path};
use bugscribe_core::report::{
    parse_ground_truth, render_markdown, serialize_ground_truth, split_sentences, GroundTruth,
    LabeledSentence, SentenceLabel,
};
use bugscribe_core::testutil::node;

use apps::{AppSpec, ReportSpec};

const RECORDED_AT: &str = "1970-01-01T00:00:00Z";

fn main() -> Result<()> {
    let root = workspace_root();
    let data = root.join("data");
    if data.exists() {
        fs::remove_dir_all(&data).context("removing old data dir")?;
    }
    fs::create_dir_all(data.join("golden/reports"))?;

    let store = FixtureStore::new(data.join("fixtures"));
    let mut manifest_apps = serde_json::Map::new();
    let mut expected_hits = 0usize;
    let mut totals = (0usize, 0usize, 0usize);
    let mut all_assessments: Vec<Vec<ElementAssessment>> = Vec::new();
    let mut report_count = 0usize;

    for app in apps::all_apps() {
        let app_dir = data.join("apps").join(app.app_id);
        fs::create_dir_all(app_dir.join("traces"))?;
        fs::create_dir_all(app_dir.join("reports"))?;
        fs::create_dir_all(app_dir.join("ground_truth"))?;
        fs::create_dir_all(app_dir.join("assessments"))?;

        for (index, trace) in app.traces.iter().enumerate() {
            let mut text = serde_json::to_string_pretty(trace)?;
            text.push('\n');
            fs::write(app_dir.join(format!("traces/trace-{:02}.json", index + 1)), text)?;
        }
        fs::write(app_dir.join("model.json"), serialize_model(&app.model))?;

        let descriptions = authored_descriptions(&app);
        for (screen_id, description) in &descriptions {
            if screen_id.is_launcher() {
                continue;
            }
            let screen = app.model.screen(screen_id).expect("described screen exists");
            store.store(&build_describe_request(screen), &description.text, RECORDED_AT, false)?;
        }

        let mut report_ids = Vec::new();
        for spec in &app.reports {
            write_report_artifacts(&app, spec, &descriptions, &store, &app_dir)?;
            report_ids.push(spec.report.report_id.clone());

            let gt_buggy = app.screen_id(spec.gt_buggy_screen);
            if app.screen_id(spec.ranking[0].0) == gt_buggy {
                expected_hits += 1;
            }
            report_count += 1;
        }

        manifest_apps.insert(
            app.app_id.to_string(),
            serde_json::json!({
                "screens": app.model.screens().len(),
                "app_screens": app.model.app_screen_count(),
                "interactions": app.model.interactions().len(),
                "reports": report_ids,
            }),
        );
    }

    // second pass: run the real pipeline in replay mode against the
    // fixtures just written and check every authored expectation holds
    let gateway = Gateway::replay(data.join("fixtures"));
    for app in apps::all_apps() {
        let catalog = build_catalog(&app.model);
        for spec in &app.reports {
            let (generated, trace) =
                run_pipeline(&spec.report, &app.model, &ContextConfig::default(), &gateway)
                    .with_context(|| format!("pipeline replay for report {}", spec.report.report_id))?;

            let expected_ids = app.path_ids(&spec.generated_path);
            let got_ids: Vec<_> =
                generated.steps.iter().filter_map(|s| s.interaction_id.clone()).collect();
            ensure!(got_ids == expected_ids, "report {}: unexpected steps", spec.report.report_id);
            ensure!(validate_path(&app.model, &got_ids).valid);
            ensure!(trace.requests_for("s2r").count() == 1);
            ensure!(trace.requests_for("obeb").count() == 1);

            fs::write(
                data.join(format!("golden/reports/{}.md", spec.report.report_id)),
                render_markdown(&generated),
            )?;

            let gt_text =
                fs::read_to_string(app_dir_for(&data, app.app_id).join(format!("ground_truth/{}.json", spec.report.report_id)))?;
            let gt = parse_ground_truth(&gt_text, &app.model)?;
            let matched = match_steps(&generated.steps, &gt.gt_steps);
            totals.0 += matched.correct_steps();
            totals.1 += matched.extra_steps();
            totals.2 += matched.missing_steps();

            // the judge fixtures must reproduce the curated labels
            let assessments = assess_elements(&generated, &gt, Judge::Llm(&gateway))
                .with_context(|| format!("judging report {}", spec.report.report_id))?;
            let expected: Vec<ElementAssessment> = spec
                .element_labels
                .iter()
                .map(|(element, label)| ElementAssessment { element: *element, label: *label })
                .collect();
            ensure!(
                assessments == expected,
                "report {}: judge labels diverge from curated labels",
                spec.report.report_id
            );
            all_assessments.push(assessments);

            let _ = catalog;
        }
    }
    ensure!(gateway.counters().live_calls == 0, "replay made live calls");
    ensure!(expected_hits == 8, "expected exactly 8/10 localization hits, got {expected_hits}");

    write_goldens(&data, &store)?;

    let counts = aggregate(&all_assessments);
    let mut counts_text = serde_json::to_string_pretty(&counts)?;
    counts_text.push('\n');
    fs::write(data.join("golden/assessment_counts.json"), counts_text)?;

    let manifest = serde_json::json!({
        "schema": "bugscribe-data/1",
        "apps": manifest_apps,
        "report_count": report_count,
        "expected_localization_hits": expected_hits,
        "expected_step_totals": {
            "cs": totals.0,
            "es": totals.1,
            "ms": totals.2,
        },
    });
    let mut manifest_text = serde_json::to_string_pretty(&manifest)?;
    manifest_text.push('\n');
    fs::write(data.join("manifest.json"), manifest_text)?;

    println!(
        "regenerated data/: {report_count} reports, {} fixture templates, hits {expected_hits}/10, steps CS={} ES={} MS={}",
        fs::read_dir(data.join("fixtures"))?.count(),
        totals.0,
        totals.1,
        totals.2,
    );
    Ok(())
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().expect("workspace root")
}

fn app_dir_for(data: &Path, app_id: &str) -> PathBuf {
    data.join("apps").join(app_id)
}

fn authored_descriptions(app: &AppSpec) -> ScreenDescriptions {
    let mut descriptions = ScreenDescriptions::new();
    let launcher = bugscribe_core::model::ScreenId::launcher();
    descriptions.insert(
        launcher.clone(),
        ScreenDescription { screen_id: launcher, text: LAUNCHER_DESCRIPTION.to_string() },
    );
    for (key, text) in &app.descriptions {
        let screen_id = app.screen_id(key).clone();
        descriptions
            .insert(screen_id.clone(), ScreenDescription { screen_id, text: text.to_string() });
    }
    assert_eq!(
        descriptions.len(),
        app.model.screens().len(),
        "{}: descriptions must cover every screen",
        app.app_id
    );
    descriptions
}

fn labeled_report(spec: &ReportSpec) -> Result<LabeledReport> {
    let sentences = split_sentences(&spec.report.body);
    ensure!(
        sentences.len() == spec.sentence_labels.len(),
        "report {}: {} sentences split, {} labels authored: {sentences:?}",
        spec.report.report_id,
        sentences.len(),
        spec.sentence_labels.len()
    );
    let labeled = LabeledReport {
        report: spec.report.clone(),
        sentences: sentences
            .into_iter()
            .zip(&spec.sentence_labels)
            .enumerate()
            .map(|(index, (text, label))| LabeledSentence {
                index,
                text,
                label: match *label {
                    "OB" => SentenceLabel::Ob,
                    "EB" => SentenceLabel::Eb,
                    "S2R" => SentenceLabel::S2r,
                    _ => SentenceLabel::Other,
                },
            })
            .collect(),
    };
    labeled.validate()?;
    Ok(labeled)
}

fn ranking_for(app: &AppSpec, spec: &ReportSpec) -> ScreenRanking {
    let ranked: Vec<RankedScreen> = spec
        .ranking
        .iter()
        .map(|(key, rationale)| RankedScreen {
            screen_id: app.screen_id(key).clone(),
            rationale: rationale.to_string(),
        })
        .collect();
    let top = ranked[0].screen_id.clone();
    ScreenRanking { ranked, top }
}

fn write_report_artifacts(
    app: &AppSpec,
    spec: &ReportSpec,
    descriptions: &ScreenDescriptions,
    store: &FixtureStore,
    app_dir: &Path,
) -> Result<()> {
    let id = &spec.report.report_id;
    let mut report_text = serde_json::to_string_pretty(&spec.report)?;
    report_text.push('\n');
    fs::write(app_dir.join(format!("reports/{id}.json")), report_text)?;

    let labeled = labeled_report(spec)?;
    let classify_answer: Vec<serde_json::Value> = labeled
        .sentences
        .iter()
        .map(|s| {
            let label = match s.label {
                SentenceLabel::Ob => "OB",
                SentenceLabel::Eb => "EB",
                SentenceLabel::S2r => "S2R",
                SentenceLabel::Other => "OTHER",
            };
            serde_json::json!({"index": s.index, "label": label})
        })
        .collect();
    store.store(
        &build_classify_request(&spec.report),
        &serde_json::to_string_pretty(&classify_answer)?,
        RECORDED_AT,
        false,
    )?;

    let catalog = build_catalog(&app.model);
    let ranking = ranking_for(app, spec);
    let localize_answer = serde_json::json!({
        "ranking": ranking
            .ranked
            .iter()
            .map(|r| serde_json::json!({"screen_id": r.screen_id, "rationale": r.rationale}))
            .collect::<Vec<_>>(),
    });
    store.store(
        &build_localize_request(&labeled, descriptions, &catalog),
        &serde_json::to_string_pretty(&localize_answer)?,
        RECORDED_AT,
        false,
    )?;

    let generated_ids = app.path_ids(&spec.generated_path);
    let s2r_answer = serde_json::json!({ "steps": generated_ids });
    store.store(
        &build_s2r_request(
            &labeled,
            &catalog,
            descriptions,
            Some(&ranking),
            S2rContext::InteractionsScreensBuggyScreen,
            "",
        ),
        &serde_json::to_string_pretty(&s2r_answer)?,
        RECORDED_AT,
        false,
    )?;

    let steps = steps_from_ids(&catalog, &generated_ids)?;
    let obeb_answer = serde_json::json!({
        "title": spec.generated.title,
        "buggy_behavior": spec.generated.behavior,
        "buggy_screen_reference": spec.generated.screen_ref,
        "triggering_interaction": spec.generated.trigger,
        "eb_subject": spec.generated.eb_subject,
        "eb_should": spec.generated.eb_should,
        "eb_behavior": spec.generated.eb_behavior,
        "additional_info": spec.generated.additional_info,
    });
    store.store(
        &build_obeb_request(
            &labeled,
            &steps,
            Some(&ranking),
            descriptions,
            ObEbContext::S2rsBuggyScreenScreens,
            "",
        ),
        &serde_json::to_string_pretty(&obeb_answer)?,
        RECORDED_AT,
        false,
    )?;

    // ground truth, validated against the model before it ships
    let gt_ids = app.path_ids(&spec.gt_path);
    let gt = GroundTruth {
        report_id: id.clone(),
        gt_steps: steps_from_ids(&catalog, &gt_ids)?,
        buggy_screen: app.screen_id(spec.gt_buggy_screen).clone(),
        ob_elements: bugscribe_core::report::ObDescription::render(
            spec.gt_ob.screen_ref,
            spec.gt_ob.trigger,
            spec.gt_ob.behavior,
        ),
        eb_element: bugscribe_core::report::EbDescription::render(
            spec.gt_eb.subject,
            spec.gt_eb.should,
            spec.gt_eb.behavior,
        ),
    };
    let gt_text = serialize_ground_truth(&gt);
    parse_ground_truth(&gt_text, &app.model)
        .with_context(|| format!("ground truth for report {id} does not validate"))?;
    fs::write(app_dir.join(format!("ground_truth/{id}.json")), gt_text)?;

    let manual = ManualAssessments {
        report_id: id.clone(),
        labels: spec.element_labels.iter().copied().collect(),
    };
    fs::write(app_dir.join(format!("assessments/{id}.json")), serialize_assessments(&manual))?;

    write_judge_fixtures(spec, &gt, store)?;
    Ok(())
}

/// Fixtures for every element whose generated text differs from ground
/// truth (the equal and empty cases are short-circuited in the judge).
fn write_judge_fixtures(spec: &ReportSpec, gt: &GroundTruth, store: &FixtureStore) -> Result<()> {
    let pairs: [(ElementKind, &str, &str); 4] = [
        (ElementKind::BuggyBehavior, spec.generated.behavior, &gt.ob_elements.buggy_behavior),
        (
            ElementKind::TriggeringInteraction,
            spec.generated.trigger,
            &gt.ob_elements.triggering_interaction,
        ),
        (
            ElementKind::BuggyScreenReference,
            spec.generated.screen_ref,
            &gt.ob_elements.buggy_screen_reference,
        ),
        (ElementKind::IntendedBehavior, spec.generated.eb_behavior, &gt.eb_element.intended_behavior),
    ];
    let curated: BTreeMap<ElementKind, QualityLabel> = spec.element_labels.iter().copied().collect();
    for (element, generated_text, gt_text) in pairs {
        let label = curated[&element];
        if generated_text.trim().to_lowercase() == gt_text.trim().to_lowercase() {
            ensure!(
                label == QualityLabel::Correct,
                "report {}: '{element}' text equals ground truth but is labeled {label:?}",
                spec.report.report_id
            );
            continue;
        }
        if generated_text.trim().is_empty() {
            ensure!(label == QualityLabel::Missing, "empty element must be labeled Missing");
            continue;
        }
        let verdict = serde_json::json!({ "label": format!("{label:?}") });
        store.store(
            &build_judge_request(element, gt_text, generated_text),
            &verdict.to_string(),
            RECORDED_AT,
            false,
        )?;
    }
    Ok(())
}

fn write_goldens(data: &Path, store: &FixtureStore) -> Result<()> {
    // canonical digest of a fixed three-component screen
    let example_hierarchy = vec![
        node("button", "ok", "OK"),
        node("label", "msg", "Saved"),
        node("text-field", "name", "typed text is ignored"),
    ];
    let identity = screen_identity(&example_hierarchy, "ExampleActivity", false);
    fs::write(data.join("golden/screen_identity.txt"), format!("{identity}\n"))?;

    // the rendered full-context S2R prompt for report 35, frozen
    let apps = apps::all_apps();
    let atimetracker = apps.iter().find(|a| a.app_id == "atimetracker").expect("atimetracker");
    let spec = &atimetracker.reports[0];
    let labeled = labeled_report(spec)?;
    let catalog = build_catalog(&atimetracker.model);
    let descriptions = authored_descriptions(atimetracker);
    let ranking = ranking_for(atimetracker, spec);
    let request = build_s2r_request(
        &labeled,
        &catalog,
        &descriptions,
        Some(&ranking),
        S2rContext::InteractionsScreensBuggyScreen,
        "",
    );
    let gateway = Gateway::replay(store.root());
    let mut rendered = gateway.render(&request)?;
    rendered.push('\n');
    fs::write(data.join("golden/s2r_prompt_render.txt"), rendered)?;

    // frozen interaction catalog for the first app
    let mut catalog_text = serde_json::to_string_pretty(&catalog)?;
    catalog_text.push('\n');
    fs::write(data.join("golden/catalog_atimetracker.json"), catalog_text)?;

    // report 35's body, split by hand once; the splitter must agree
    let hand_split = vec![
        "The app crashes with a message about an unexpected error when trying to restore a backup.",
        "After selecting the menu item nothing else is shown.",
        "Steps that I did:",
        "1. Opened the time tracker",
        "2. Tap restore from backup",
        "Using version 0.6 on a Moto G.",
    ];
    ensure!(
        split_sentences(&spec.report.body) == hand_split,
        "splitter disagrees with the hand-split units for report 35"
    );
    let mut split_text = serde_json::to_string_pretty(&hand_split)?;
    split_text.push('\n');
    fs::write(data.join("golden/split_35.json"), split_text)?;

    // quality-model example fixtures: a degraded observed-behavior sentence
    // judged against report 35's ground truth
    let gt_ob = bugscribe_core::report::ObDescription::render(
        spec.gt_ob.screen_ref,
        spec.gt_ob.trigger,
        spec.gt_ob.behavior,
    );
    store.store(
        &build_judge_request(ElementKind::BuggyBehavior, &gt_ob.buggy_behavior, "the app does not work"),
        r#"{"label": "Ambiguous"}"#,
        RECORDED_AT,
        false,
    )?;
    store.store(
        &build_judge_request(
            ElementKind::TriggeringInteraction,
            &gt_ob.triggering_interaction,
            "I 'Restore from backup'",
        ),
        r#"{"label": "Incomplete"}"#,
        RECORDED_AT,
        false,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_app_builds_and_resolves_its_paths() {
        for app in apps::all_apps() {
            app.model.validate().unwrap();
            for spec in &app.reports {
                let gt_ids = app.path_ids(&spec.gt_path);
                assert!(validate_path(&app.model, &gt_ids).valid, "{} gt path", spec.report.report_id);
                let gen_ids = app.path_ids(&spec.generated_path);
                assert!(validate_path(&app.model, &gen_ids).valid, "{} gen path", spec.report.report_id);
                labeled_report(spec).unwrap();
            }
        }
    }
}

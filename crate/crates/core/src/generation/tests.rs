use super::*;
use crate::context::CatalogEntry;
use crate::gateway::fixture_key;
use crate::model::ScreenId;
use crate::testutil::{chain_model, component, node, snapshot, ScriptedTransport, TraceBuilder};

fn entry(action: Action, name: &str, kind: &str, input: Option<&str>) -> CatalogEntry {
    CatalogEntry {
        interaction_id: InteractionId::new("i0"),
        action,
        component_phrase: format!("{name} {kind}"),
        source: ScreenId::new("a"),
        target: ScreenId::new("b"),
        component_name: name.to_string(),
        component_kind: kind.to_string(),
        input_text: input.map(str::to_string),
    }
}

#[test]
fn step_text_covers_every_action() {
    assert_eq!(step_text_for(&entry(Action::OpenApp, "", "", None)), "open the app");
    assert_eq!(step_text_for(&entry(Action::Back, "", "", None)), "press the device back button");
    assert_eq!(step_text_for(&entry(Action::Rotate, "", "", None)), "rotate the device screen");
    assert_eq!(
        step_text_for(&entry(Action::Tap, "Restore from backup", "menu-item", None)),
        "tap 'Restore from backup' menu item"
    );
    assert_eq!(step_text_for(&entry(Action::LongTap, "Task", "list-item", None)), "long-tap 'Task' list item");
    assert_eq!(
        step_text_for(&entry(Action::Type, "Server URL", "text-field", Some("demo.example"))),
        "type 'demo.example' in 'Server URL' text field"
    );
    assert_eq!(step_text_for(&entry(Action::Swipe, "Task list", "list", None)), "swipe on 'Task list' list");
    assert_eq!(step_text_for(&entry(Action::Tap, "", "button", None)), "tap the button");
}

#[test]
fn atomic_shape_check_accepts_synthesized_texts_and_rejects_prose() {
    for text in [
        "open the app",
        "tap 'OK' button",
        "long-tap 'Task' list item",
        "type 'x' in 'Name' text field",
        "swipe on 'Gallery' pager",
        "press the device back button",
        "rotate the device screen",
    ] {
        assert!(is_atomic_step_text(text), "{text} should pass");
    }
    for text in ["", "tap", "the app crashes", "then tap OK", "navigate to settings"] {
        assert!(!is_atomic_step_text(text), "{text} should fail");
    }
}

#[test]
fn steps_from_ids_rejects_unknown_ids() {
    let catalog = crate::context::build_catalog(&chain_model());
    let err = steps_from_ids(&catalog, &[InteractionId::new("nope")]).unwrap_err();
    assert!(matches!(err, GenerationError::InvalidSequence { .. }));
}

struct PipelineFixture {
    model: ExecutionModel,
    report: BugReport,
    detail: ScreenId,
}

fn pipeline_fixture() -> PipelineFixture {
    let model = chain_model();
    let detail = model
        .screens()
        .values()
        .find(|s| s.activity_name == "DetailActivity")
        .map(|s| s.id.clone())
        .unwrap();
    let report = BugReport {
        report_id: "r1".into(),
        app_id: "demo.app".into(),
        title: "Detail screen crashes".into(),
        body: "Open the app. Tap the first item. The detail screen crashes.".into(),
        environment: Some("Android 12, Pixel 4".into()),
    };
    PipelineFixture { model, report, detail }
}

fn chain_path_ids(model: &ExecutionModel, to: &ScreenId) -> Vec<InteractionId> {
    let open = model.interactions().iter().find(|i| i.action == Action::OpenApp).unwrap();
    let mut ids = vec![open.id.clone()];
    ids.extend(crate::model::find_paths(model, &open.target, to, 5).unwrap().remove(0));
    ids
}

fn classify_response() -> &'static str {
    r#"[{"index": 0, "label": "S2R"}, {"index": 1, "label": "S2R"}, {"index": 2, "label": "OB"}]"#
}

fn localize_response(top: &ScreenId) -> String {
    format!(r#"{{"ranking": [{{"screen_id": "{top}", "rationale": "crash reported on the detail screen"}}]}}"#)
}

fn s2r_response(ids: &[InteractionId]) -> String {
    let quoted: Vec<String> = ids.iter().map(|id| format!("\"{id}\"")).collect();
    format!(r#"{{"steps": [{}]}}"#, quoted.join(", "))
}

fn obeb_response() -> &'static str {
    r#"{
        "title": "Crash when opening the first list item",
        "buggy_behavior": "the app crashes",
        "buggy_screen_reference": "the item detail screen",
        "triggering_interaction": "taps 'First item'",
        "eb_subject": "The app",
        "eb_should": true,
        "eb_behavior": "show the item detail instead of crashing",
        "additional_info": null
    }"#
}

fn scripted(fixture: &PipelineFixture, s2r_answers: &[&str]) -> ScriptedTransport {
    ScriptedTransport::new()
        .on("Classify every sentence", &[classify_response()])
        .on("summarizes Android app screens", &["A screen of the demo app."])
        .on("localizes buggy screens", &[localize_response(&fixture.detail).as_str()])
        .on("reconstructs the steps to reproduce", s2r_answers)
        .on("rewrites Android bug reports", &[obeb_response()])
}

#[test]
fn pipeline_generates_a_grounded_report_under_the_default_config() {
    let fixture = pipeline_fixture();
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let dir = tempfile::tempdir().unwrap();
    let s2r = s2r_response(&ids);
    let gateway = Gateway::record(dir.path(), Box::new(scripted(&fixture, &[s2r.as_str()])));

    let (generated, trace) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &gateway).unwrap();

    assert_eq!(generated.steps.len(), ids.len());
    assert_eq!(generated.steps[0].text, "open the app");
    assert_eq!(generated.steps.last().unwrap().target_screen.as_ref(), Some(&fixture.detail));
    for step in &generated.steps {
        assert!(is_atomic_step_text(&step.text), "step '{}' has the atomic shape", step.text);
    }
    // environment is copied verbatim
    assert_eq!(generated.additional_info.as_deref(), Some("Android 12, Pixel 4"));
    // grounded sequence revalidates against the model
    let step_ids: Vec<_> = generated.steps.iter().filter_map(|s| s.interaction_id.clone()).collect();
    assert!(validate_path(&fixture.model, &step_ids).valid);

    let stages: Vec<&str> = trace.requests.iter().map(|r| r.stage.as_str()).collect();
    assert!(stages.contains(&"annotate"));
    assert!(stages.contains(&"describe"));
    assert!(stages.contains(&"localize"));
    assert_eq!(trace.requests_for("s2r").count(), 1);
    assert_eq!(trace.requests_for("obeb").count(), 1);
}

#[test]
fn pipeline_replay_is_deterministic() {
    let fixture = pipeline_fixture();
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let dir = tempfile::tempdir().unwrap();
    let s2r = s2r_response(&ids);
    let recorder = Gateway::record(dir.path(), Box::new(scripted(&fixture, &[s2r.as_str()])));
    let (recorded, _) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &recorder).unwrap();

    let replay = Gateway::replay(dir.path());
    let (first, first_trace) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &replay).unwrap();
    let (second, second_trace) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &replay).unwrap();

    assert_eq!(first, second);
    assert_eq!(first, recorded);
    assert_eq!(first_trace, second_trace);
    assert_eq!(replay.counters().live_calls, 0);
}

#[test]
fn no_info_config_skips_context_stages_and_leaves_steps_ungrounded() {
    let fixture = pipeline_fixture();
    let dir = tempfile::tempdir().unwrap();
    let transport = ScriptedTransport::new()
        .on("Classify every sentence", &[classify_response()])
        .on(
            "reconstructs the steps to reproduce",
            &[r#"{"steps": ["open the app", "tap 'First item' list item"]}"#],
        )
        .on("rewrites Android bug reports", &[obeb_response()]);
    let gateway = Gateway::record(dir.path(), Box::new(transport));

    let (generated, trace) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::no_info(), &gateway).unwrap();

    assert_eq!(trace.requests_for("describe").count(), 0);
    assert_eq!(trace.requests_for("localize").count(), 0);
    assert!(generated.steps.iter().all(|s| s.interaction_id.is_none()));
}

#[test]
fn different_configs_produce_distinct_fixture_keys() {
    let fixture = pipeline_fixture();
    let labeled = crate::annotation::classify_sentences_heuristic(&fixture.report);
    let catalog = crate::context::build_catalog(&fixture.model);
    let descriptions = ScreenDescriptions::new();

    let interactions_only =
        build_s2r_request(&labeled, &catalog, &descriptions, None, S2rContext::Interactions, "");
    let no_info = build_s2r_request(&labeled, &catalog, &descriptions, None, S2rContext::NoInfo, "");
    assert_ne!(fixture_key(&interactions_only), fixture_key(&no_info));
    assert_ne!(interactions_only.template_id, no_info.template_id);
}

#[test]
fn forced_single_path_generates_exactly_the_forced_steps() {
    let a = || snapshot("OnlyActivity", false, vec![node("button", "boom", "Boom")]);
    let b = || snapshot("CrashActivity", false, vec![node("label", "msg", "Crashed")]);
    let trace = TraceBuilder::new("tiny.app")
        .open_app(a())
        .tap(a(), component("button", "boom", "Boom"), b())
        .build();
    let model = ExecutionModel::new("tiny.app").ingest_trace(&trace).unwrap();
    let buggy = model
        .screens()
        .values()
        .find(|s| s.activity_name == "CrashActivity")
        .map(|s| s.id.clone())
        .unwrap();
    let ids = chain_path_ids(&model, &buggy);
    assert_eq!(ids.len(), 2);

    let report = BugReport {
        report_id: "t1".into(),
        app_id: "tiny.app".into(),
        title: "Boom".into(),
        body: "Tap Boom. It crashes.".into(),
        environment: None,
    };
    let dir = tempfile::tempdir().unwrap();
    let s2r = s2r_response(&ids);
    let transport = ScriptedTransport::new()
        .on("Classify every sentence", &[r#"[{"index": 0, "label": "S2R"}, {"index": 1, "label": "OB"}]"#])
        .on("summarizes Android app screens", &["A screen of the tiny app."])
        .on("localizes buggy screens", &[localize_response(&buggy).as_str()])
        .on("reconstructs the steps to reproduce", &[s2r.as_str()])
        .on("rewrites Android bug reports", &[obeb_response()]);
    let gateway = Gateway::record(dir.path(), Box::new(transport));
    let (generated, _) = run_pipeline(&report, &model, &ContextConfig::default(), &gateway).unwrap();

    let step_ids: Vec<_> = generated.steps.iter().filter_map(|s| s.interaction_id.clone()).collect();
    assert_eq!(step_ids, ids);
    assert_eq!(generated.steps.last().unwrap().target_screen.as_ref(), Some(&buggy));
}

#[test]
fn invalid_sequence_is_corrected_by_one_reprompt() {
    let fixture = pipeline_fixture();
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let mut swapped = ids.clone();
    swapped.swap(1, 2);
    let bad = s2r_response(&swapped);
    let good = s2r_response(&ids);

    let dir = tempfile::tempdir().unwrap();
    let gateway =
        Gateway::record(dir.path(), Box::new(scripted(&fixture, &[bad.as_str(), good.as_str()])));
    let (generated, trace) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &gateway).unwrap();

    let step_ids: Vec<_> = generated.steps.iter().filter_map(|s| s.interaction_id.clone()).collect();
    assert_eq!(step_ids, ids);
    // the corrective attempt is a second, distinct s2r request
    let s2r_keys: Vec<_> = trace.requests_for("s2r").map(|r| r.fixture_key.clone()).collect();
    assert_eq!(s2r_keys.len(), 2);
    assert_ne!(s2r_keys[0], s2r_keys[1]);
}

#[test]
fn persistently_invalid_sequences_error_with_the_sequence_attached() {
    let fixture = pipeline_fixture();
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let mut swapped = ids.clone();
    swapped.swap(1, 2);
    let bad = s2r_response(&swapped);

    let dir = tempfile::tempdir().unwrap();
    let gateway = Gateway::record(dir.path(), Box::new(scripted(&fixture, &[bad.as_str()])));
    let err =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &gateway).unwrap_err();
    assert_eq!(err.stage, "s2r");
    match err.source {
        StageError::Generation(GenerationError::InvalidSequence { steps, .. }) => {
            assert_eq!(steps.len(), swapped.len());
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn wrong_terminal_screen_is_a_violation_under_the_default_config() {
    let fixture = pipeline_fixture();
    // a valid path that ends on the list screen instead of the ranked detail screen
    let list = fixture
        .model
        .screens()
        .values()
        .find(|s| s.activity_name == "ListActivity")
        .map(|s| s.id.clone())
        .unwrap();
    let short = chain_path_ids(&fixture.model, &list);
    let bad = s2r_response(&short);

    let dir = tempfile::tempdir().unwrap();
    let gateway = Gateway::record(dir.path(), Box::new(scripted(&fixture, &[bad.as_str()])));
    let err =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &gateway).unwrap_err();
    match err.source {
        StageError::Generation(GenerationError::InvalidSequence { reason, .. }) => {
            assert!(reason.contains("buggy screen"), "reason: {reason}");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn missing_obeb_element_is_reprompted_then_errors() {
    let fixture = pipeline_fixture();
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let s2r = s2r_response(&ids);
    let incomplete = r#"{"title": "t", "buggy_behavior": "crash", "eb_behavior": "not crash"}"#;

    let dir = tempfile::tempdir().unwrap();
    let transport = ScriptedTransport::new()
        .on("Classify every sentence", &[classify_response()])
        .on("summarizes Android app screens", &["A screen of the demo app."])
        .on("localizes buggy screens", &[localize_response(&fixture.detail).as_str()])
        .on("reconstructs the steps to reproduce", &[s2r.as_str()])
        .on("rewrites Android bug reports", &[incomplete]);
    let gateway = Gateway::record(dir.path(), Box::new(transport));
    let err =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &gateway).unwrap_err();
    assert_eq!(err.stage, "obeb");
    match err.source {
        StageError::Generation(GenerationError::MissingElement { element }) => {
            assert_eq!(element, "buggy_screen_reference");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn additional_info_falls_back_to_the_generated_value() {
    let fixture = pipeline_fixture();
    let mut report = fixture.report.clone();
    report.environment = None;
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let s2r = s2r_response(&ids);
    let with_info = obeb_response().replace("null", "\"Android 13 beta\"");

    let dir = tempfile::tempdir().unwrap();
    let transport = ScriptedTransport::new()
        .on("Classify every sentence", &[classify_response()])
        .on("summarizes Android app screens", &["A screen of the demo app."])
        .on("localizes buggy screens", &[localize_response(&fixture.detail).as_str()])
        .on("reconstructs the steps to reproduce", &[s2r.as_str()])
        .on("rewrites Android bug reports", &[with_info.as_str()]);
    let gateway = Gateway::record(dir.path(), Box::new(transport));
    let (generated, _) = run_pipeline(&report, &fixture.model, &ContextConfig::default(), &gateway).unwrap();
    assert_eq!(generated.additional_info.as_deref(), Some("Android 13 beta"));
}

#[test]
fn eb_for_a_crash_contains_should_and_negates_the_crash() {
    let fixture = pipeline_fixture();
    let ids = chain_path_ids(&fixture.model, &fixture.detail);
    let dir = tempfile::tempdir().unwrap();
    let s2r = s2r_response(&ids);
    let gateway = Gateway::record(dir.path(), Box::new(scripted(&fixture, &[s2r.as_str()])));
    let (generated, _) =
        run_pipeline(&fixture.report, &fixture.model, &ContextConfig::default(), &gateway).unwrap();
    assert!(generated.eb.rendered.contains("should"));
    assert!(generated.eb.rendered.contains("instead of crashing"));
    assert!(generated.ob.rendered.contains("the app crashes"));
}

#[test]
fn titles_are_clamped_to_one_line_of_100_chars() {
    assert_eq!(one_line_title("short title"), "short title");
    assert_eq!(one_line_title("first line\nsecond line"), "first line");
    let long = "x".repeat(150);
    assert_eq!(one_line_title(&long).chars().count(), 100);
}

#[test]
fn assemble_requires_steps_and_is_idempotent() {
    let ob = ObDescription::render("the screen", "taps 'X'", "the app crashes");
    let eb = EbDescription::render("The app", true, "not crash");
    let err = assemble_report("t".into(), ob.clone(), eb.clone(), vec![], None).unwrap_err();
    assert!(matches!(err, GenerationError::EmptySteps));

    let step = AtomicStep {
        ordinal: 1,
        text: "open the app".into(),
        interaction_id: None,
        source_screen: None,
        target_screen: None,
    };
    let once = assemble_report("t".into(), ob.clone(), eb.clone(), vec![step.clone()], None).unwrap();
    let twice = assemble_report("t".into(), ob, eb, vec![step], None).unwrap();
    assert_eq!(once, twice);
    assert_eq!(crate::report::render_markdown(&once), crate::report::render_markdown(&twice));
}

#[test]
fn trace_serialization_carries_schema_and_config() {
    let trace = GenerationTrace::new(ContextConfig::default());
    let text = serialize_trace(&trace);
    assert!(text.contains("bugscribe-trace/1"));
    assert!(text.contains("interactions+screens+buggy_screen"));
    assert!(text.contains("s2rs+buggy_screen+screens"));
}

//! The authored sample dataset: four small Android apps with execution
//! traces, screen descriptions, bug reports, scripted completions, and
//! ground truth. Everything downstream (fixtures, goldens, manifests) is
//! derived from these definitions.

use std::collections::BTreeMap;

use bugscribe_core::evaluation::{ElementKind, QualityLabel};
use bugscribe_core::model::{Action, ExecutionModel, InteractionId, ScreenId, ScreenSnapshot, Trace};
use bugscribe_core::report::BugReport;
use bugscribe_core::testutil::{component, node, snapshot, TraceBuilder};

pub struct AppSpec {
    pub app_id: &'static str,
    pub traces: Vec<Trace>,
    pub model: ExecutionModel,
    /// Screen key -> canonical id, for readable scenario definitions.
    pub screen_ids: BTreeMap<&'static str, ScreenId>,
    /// Screen key -> authored description text.
    pub descriptions: Vec<(&'static str, &'static str)>,
    pub reports: Vec<ReportSpec>,
}

pub struct ReportSpec {
    pub report: BugReport,
    /// One label per sentence of the body, in order.
    pub sentence_labels: Vec<&'static str>,
    /// Ranked buggy-screen candidates (screen key, rationale), top first.
    pub ranking: Vec<(&'static str, &'static str)>,
    /// The scripted S2R answer: interaction ids via (source key, action, component name).
    pub generated_path: Vec<EdgeRef>,
    /// The minimal reproduction path (ground truth).
    pub gt_path: Vec<EdgeRef>,
    pub gt_buggy_screen: &'static str,
    pub gt_ob: ObSpec,
    pub gt_eb: EbSpec,
    pub generated: GeneratedSpec,
    /// Curated quality labels for the four OB/EB elements of the generated
    /// report; also used as the manual assessment files.
    pub element_labels: [(ElementKind, QualityLabel); 4],
}

#[derive(Clone, Copy)]
pub struct EdgeRef {
    pub source: &'static str,
    pub action: Action,
    /// Component display name; empty for back/rotate/open-app.
    pub name: &'static str,
}

pub struct ObSpec {
    pub screen_ref: &'static str,
    pub trigger: &'static str,
    pub behavior: &'static str,
}

pub struct EbSpec {
    pub subject: &'static str,
    pub should: bool,
    pub behavior: &'static str,
}

pub struct GeneratedSpec {
    pub title: &'static str,
    pub behavior: &'static str,
    pub screen_ref: &'static str,
    pub trigger: &'static str,
    pub eb_subject: &'static str,
    pub eb_should: bool,
    pub eb_behavior: &'static str,
    pub additional_info: Option<&'static str>,
}

fn edge(source: &'static str, action: Action, name: &'static str) -> EdgeRef {
    EdgeRef { source, action, name }
}

impl AppSpec {
    pub fn screen_id(&self, key: &str) -> &ScreenId {
        self.screen_ids
            .get(key)
            .unwrap_or_else(|| panic!("unknown screen key '{key}'"))
    }

    /// Resolves an edge reference to the model's interaction id.
    pub fn edge_id(&self, edge: &EdgeRef) -> InteractionId {
        let source = self.screen_id(edge.source);
        let matches: Vec<_> = self
            .model
            .interactions()
            .iter()
            .filter(|i| {
                &i.source == source
                    && i.action == edge.action
                    && i.component.as_ref().map(|c| c.display_name()).unwrap_or("") == edge.name
            })
            .collect();
        match matches.as_slice() {
            [only] => only.id.clone(),
            [] => panic!("no interaction from '{}' {} '{}'", edge.source, edge.action, edge.name),
            _ => panic!("ambiguous interaction from '{}' {} '{}'", edge.source, edge.action, edge.name),
        }
    }

    pub fn path_ids(&self, path: &[EdgeRef]) -> Vec<InteractionId> {
        path.iter().map(|e| self.edge_id(e)).collect()
    }
}

fn build_app(
    app_id: &'static str,
    screens: &[(&'static str, ScreenSnapshot)],
    traces: Vec<Trace>,
    descriptions: Vec<(&'static str, &'static str)>,
    reports: Vec<ReportSpec>,
) -> AppSpec {
    let mut model = ExecutionModel::new(app_id);
    for trace in &traces {
        model = model.ingest_trace(trace).expect("sample trace ingests");
    }
    let mut screen_ids = BTreeMap::new();
    screen_ids.insert("launcher", ScreenId::launcher());
    for (key, snap) in screens {
        let id = bugscribe_core::model::screen_identity(&snap.hierarchy, &snap.activity, snap.is_dialog);
        assert!(
            model.screens().contains_key(&id),
            "{app_id}: screen '{key}' is not in the model; traces never visited it"
        );
        screen_ids.insert(key, id);
    }
    assert_eq!(
        screen_ids.len(),
        model.screens().len(),
        "{app_id}: every model screen needs a key"
    );
    AppSpec { app_id, traces, model, screen_ids, descriptions, reports }
}

fn report(
    report_id: &str,
    app_id: &str,
    title: &str,
    body: &str,
    environment: Option<&str>,
) -> BugReport {
    BugReport {
        report_id: report_id.to_string(),
        app_id: app_id.to_string(),
        title: title.to_string(),
        body: body.to_string(),
        environment: environment.map(str::to_string),
    }
}

fn labels(
    behavior: QualityLabel,
    trigger: QualityLabel,
    screen_ref: QualityLabel,
    eb: QualityLabel,
) -> [(ElementKind, QualityLabel); 4] {
    [
        (ElementKind::BuggyBehavior, behavior),
        (ElementKind::TriggeringInteraction, trigger),
        (ElementKind::BuggyScreenReference, screen_ref),
        (ElementKind::IntendedBehavior, eb),
    ]
}

pub fn all_apps() -> Vec<AppSpec> {
    vec![atimetracker(), ultrasonic(), phimpme(), focusbrowser()]
}

// ---------------------------------------------------------------------------
// atimetracker: a time-tracking app. Crash on backup restore, a wrong weekly
// total, and a dead font-size setting.
// ---------------------------------------------------------------------------

fn atimetracker() -> AppSpec {
    let app = "atimetracker";
    let task_list = || {
        snapshot(
            "TaskListActivity",
            false,
            vec![
                node("label", "header", "Time Tracker"),
                node("list-item", "task_0", "Work"),
                node("list-item", "task_1", "Reading"),
                node("button", "add_task", "Add task"),
                node("button", "more_options", "More options"),
            ],
        )
    };
    let options_popup = || {
        snapshot(
            "TaskListActivity",
            true,
            vec![
                node("menu-item", "menu_range", "Change date range"),
                node("menu-item", "menu_export", "Export to CSV"),
                node("menu-item", "menu_restore", "Restore from backup"),
                node("menu-item", "menu_settings", "Settings"),
            ],
        )
    };
    let add_dialog = || {
        snapshot(
            "TaskListActivity",
            true,
            vec![
                node("text-field", "task_name", ""),
                node("button", "ok", "OK"),
                node("button", "cancel", "Cancel"),
            ],
        )
    };
    let edit_dialog = || {
        snapshot(
            "TaskListActivity",
            true,
            vec![
                node("text-field", "task_name_edit", ""),
                node("button", "delete", "Delete"),
                node("button", "ok", "OK"),
            ],
        )
    };
    let date_range = || {
        snapshot(
            "TaskListActivity",
            true,
            vec![
                node("label", "range_title", "Select range"),
                node("button", "range_day", "Day"),
                node("button", "range_week", "Week"),
                node("button", "ok", "OK"),
            ],
        )
    };
    let settings = || {
        snapshot(
            "SettingsActivity",
            false,
            vec![
                node("checkbox", "clock_24h", "24-hour clock"),
                node("checkbox", "show_seconds", "Show seconds"),
                node("button", "font_size", "Font size"),
            ],
        )
    };

    let traces = vec![
        TraceBuilder::new(app)
            .open_app(task_list())
            .tap(task_list(), component("button", "add_task", "Add task"), add_dialog())
            .type_text(add_dialog(), component("text-field", "task_name", ""), "Gym", add_dialog())
            .tap(add_dialog(), component("button", "ok", "OK"), task_list())
            .long_tap(task_list(), component("list-item", "task_0", "Work"), edit_dialog())
            .tap(edit_dialog(), component("button", "delete", "Delete"), task_list())
            .build(),
        TraceBuilder::new(app)
            .open_app(task_list())
            .tap(task_list(), component("button", "more_options", "More options"), options_popup())
            .tap(options_popup(), component("menu-item", "menu_range", "Change date range"), date_range())
            .tap(date_range(), component("button", "range_week", "Week"), date_range())
            .tap(date_range(), component("button", "ok", "OK"), task_list())
            .tap(task_list(), component("button", "add_task", "Add task"), add_dialog())
            .tap(add_dialog(), component("button", "cancel", "Cancel"), task_list())
            .build(),
        // the crash path: restoring a backup kills the app while the popup
        // is still the last captured screen
        TraceBuilder::new(app)
            .manual()
            .open_app(task_list())
            .tap(task_list(), component("button", "more_options", "More options"), options_popup())
            .tap(options_popup(), component("menu-item", "menu_restore", "Restore from backup"), options_popup())
            .build(),
        TraceBuilder::new(app)
            .open_app(task_list())
            .tap(task_list(), component("button", "more_options", "More options"), options_popup())
            .tap(options_popup(), component("menu-item", "menu_export", "Export to CSV"), task_list())
            .tap(task_list(), component("button", "more_options", "More options"), options_popup())
            .tap(options_popup(), component("menu-item", "menu_settings", "Settings"), settings())
            .tap(settings(), component("button", "font_size", "Font size"), settings())
            .back(settings(), task_list())
            .build(),
        TraceBuilder::new(app)
            .manual()
            .open_app(task_list())
            .long_tap(task_list(), component("list-item", "task_0", "Work"), edit_dialog())
            .tap(edit_dialog(), component("button", "ok", "OK"), task_list())
            .build(),
    ];

    let open = edge("launcher", Action::OpenApp, "");
    let to_options = edge("task_list", Action::Tap, "More options");

    let reports = vec![
        ReportSpec {
            report: report(
                "35",
                app,
                "app crash",
                "The app crashes with a message about an unexpected error when trying to restore a backup.\nAfter selecting the menu item nothing else is shown.\nSteps that I did:\n1. Opened the time tracker\n2. Tap restore from backup\nUsing version 0.6 on a Moto G.",
                None,
            ),
            sentence_labels: vec!["OB", "S2R", "OTHER", "S2R", "S2R", "OTHER"],
            ranking: vec![
                ("options_popup", "the report names a menu item for restoring backups, which only the extended options popup offers"),
                ("task_list", "the popup is opened from the main task list"),
            ],
            generated_path: vec![open, to_options, edge("options_popup", Action::Tap, "Restore from backup")],
            gt_path: vec![open, to_options, edge("options_popup", Action::Tap, "Restore from backup")],
            gt_buggy_screen: "options_popup",
            gt_ob: ObSpec {
                screen_ref: "the extended options popup menu",
                trigger: "taps 'Restore from backup'",
                behavior: "the app crashes with an unexpected error message",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "restore the tasks from the backup file instead of crashing",
            },
            generated: GeneratedSpec {
                title: "App crashes when restoring a backup from the options menu",
                behavior: "the app crashes with an unexpected error message",
                screen_ref: "the extended options popup menu",
                trigger: "taps 'Restore from backup'",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "restore the tasks from the backup file instead of crashing",
                additional_info: Some("Version 0.6 on a Moto G"),
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
        ReportSpec {
            report: report(
                "41",
                app,
                "wrong weekly total",
                "The weekly total shows the wrong number of hours.\nI set the range to Week in the date range dialog.\nThe total should match the hours I tracked this week.",
                Some("Android 12, Pixel 4"),
            ),
            sentence_labels: vec!["OB", "S2R", "EB"],
            ranking: vec![
                ("task_list", "totals are displayed on the main task list after the range is applied"),
                ("date_range_dialog", "the range is chosen here but the wrong number shows elsewhere"),
            ],
            generated_path: vec![
                open,
                to_options,
                edge("options_popup", Action::Tap, "Change date range"),
                edge("date_range_dialog", Action::Tap, "Week"),
                edge("date_range_dialog", Action::Tap, "OK"),
            ],
            gt_path: vec![
                open,
                to_options,
                edge("options_popup", Action::Tap, "Change date range"),
                edge("date_range_dialog", Action::Tap, "Week"),
                edge("date_range_dialog", Action::Tap, "OK"),
            ],
            gt_buggy_screen: "task_list",
            gt_ob: ObSpec {
                screen_ref: "the main task list",
                trigger: "taps 'OK' in the date range dialog",
                behavior: "the weekly total shows the wrong number of hours",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "show a weekly total that matches the hours tracked in the selected week",
            },
            generated: GeneratedSpec {
                title: "Weekly total shows wrong hours for the selected range",
                behavior: "the weekly total shows an incorrect number of hours",
                screen_ref: "the main task list",
                trigger: "taps 'OK' in the date range dialog",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "show a weekly total that matches the tracked hours for the week",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
        // localization miss: the ranker blames the task list, and the
        // generated path stops there
        ReportSpec {
            report: report(
                "47",
                app,
                "font size",
                "The font size setting does nothing.\nAfter changing it in the settings every label looks the same as before.\nThe app should apply the chosen font size.",
                None,
            ),
            sentence_labels: vec!["OB", "OB", "EB"],
            ranking: vec![
                ("task_list", "the unchanged labels are most visible on the main task list"),
                ("settings", "the setting itself lives on the settings screen"),
            ],
            generated_path: vec![open],
            gt_path: vec![
                open,
                to_options,
                edge("options_popup", Action::Tap, "Settings"),
                edge("settings", Action::Tap, "Font size"),
            ],
            gt_buggy_screen: "settings",
            gt_ob: ObSpec {
                screen_ref: "the settings screen",
                trigger: "taps 'Font size'",
                behavior: "the chosen font size is not applied to any label",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "apply the chosen font size to the interface",
            },
            generated: GeneratedSpec {
                title: "Font size setting has no effect",
                behavior: "the font size setting has no effect",
                screen_ref: "the main task list",
                trigger: "changes the font size setting",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "apply the chosen font size to the interface",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Incomplete,
                QualityLabel::Incorrect,
                QualityLabel::Correct,
            ),
        },
    ];

    build_app(
        app,
        &[
            ("task_list", task_list()),
            ("options_popup", options_popup()),
            ("add_task_dialog", add_dialog()),
            ("edit_task_dialog", edit_dialog()),
            ("date_range_dialog", date_range()),
            ("settings", settings()),
        ],
        traces,
        vec![
            (
                "task_list",
                "The main task list of the time tracker, showing tracked activities such as Work and Reading with buttons to add a task and open more options.",
            ),
            (
                "options_popup",
                "A popup menu over the main task list offering data actions: change the date range, export the tracked time to CSV, restore tasks from a backup file, and open the settings. Shown as a dialog.",
            ),
            (
                "add_task_dialog",
                "A dialog for creating a new task with a name field, OK, and Cancel.",
            ),
            (
                "edit_task_dialog",
                "A dialog for editing an existing task with a name field, a Delete button, and OK.",
            ),
            (
                "date_range_dialog",
                "A dialog for selecting the reporting date range with Day and Week choices and an OK button.",
            ),
            (
                "settings",
                "The settings screen with display options such as the 24-hour clock, show seconds, and a font size control.",
            ),
        ],
        reports,
    )
}

// ---------------------------------------------------------------------------
// ultrasonic: a music streaming client. Failing connection test, gray album
// art, and a queue that never ends.
// ---------------------------------------------------------------------------

fn ultrasonic() -> AppSpec {
    let app = "ultrasonic";
    let home = || {
        snapshot(
            "MainActivity",
            false,
            vec![
                node("label", "title", "Ultrasonic"),
                node("button", "server_settings", "Server settings"),
                node("button", "media_library", "Media library"),
            ],
        )
    };
    let server_settings = || {
        snapshot(
            "SettingsActivity",
            false,
            vec![
                node("text-field", "server_url", "Server URL"),
                node("text-field", "username", "Username"),
                node("button", "ok", "OK"),
            ],
        )
    };
    let connection_panel = || {
        snapshot(
            "SettingsActivity",
            false,
            vec![
                node("label", "server_name", "Server 1"),
                node("list", "settings_list", "Server options"),
                node("button", "test_connection", "Test Connection"),
            ],
        )
    };
    let connection_result = || {
        snapshot(
            "SettingsActivity",
            true,
            vec![
                node("label", "result", "Connecting to server failed"),
                node("button", "ok", "OK"),
            ],
        )
    };
    let media_library = || {
        snapshot(
            "LibraryActivity",
            false,
            vec![
                node("list-item", "album_0", "Greatest Hits"),
                node("list-item", "album_1", "Podcasts"),
            ],
        )
    };
    let album_view = || {
        snapshot(
            "AlbumActivity",
            false,
            vec![
                node("label", "album_title", "Greatest Hits"),
                node("image", "cover", "Cover art"),
                node("button", "play_all", "Play all"),
            ],
        )
    };
    let player = || {
        snapshot(
            "PlayerActivity",
            false,
            vec![
                node("label", "now_playing", "Now playing"),
                node("button", "play", "Play"),
                node("button", "next", "Next"),
            ],
        )
    };

    let traces = vec![
        TraceBuilder::new(app)
            .open_app(home())
            .tap(home(), component("button", "server_settings", "Server settings"), server_settings())
            .type_text(
                server_settings(),
                component("text-field", "server_url", "Server URL"),
                "http://demo.example",
                server_settings(),
            )
            .type_text(
                server_settings(),
                component("text-field", "username", "Username"),
                "guest",
                server_settings(),
            )
            .tap(server_settings(), component("button", "ok", "OK"), connection_panel())
            .swipe(connection_panel(), component("list", "settings_list", "Server options"), connection_panel())
            .tap(connection_panel(), component("button", "test_connection", "Test Connection"), connection_result())
            .tap(connection_result(), component("button", "ok", "OK"), connection_panel())
            .build(),
        TraceBuilder::new(app)
            .manual()
            .open_app(home())
            .tap(home(), component("button", "media_library", "Media library"), media_library())
            .tap(media_library(), component("list-item", "album_0", "Greatest Hits"), album_view())
            .tap(album_view(), component("button", "play_all", "Play all"), player())
            .back(player(), album_view())
            .back(album_view(), media_library())
            .build(),
    ];

    let open = edge("launcher", Action::OpenApp, "");

    let reports = vec![
        ReportSpec {
            report: report(
                "84",
                app,
                "cannot connect",
                "Cannot connect to my media server from the app.\nI enter the server URL and click OK.\nThen I swipe up and click Test Connection.\nTest connection always says it failed.\nThe app should connect to the server and let me browse my music.",
                None,
            ),
            sentence_labels: vec!["OB", "S2R", "S2R", "OB", "EB"],
            ranking: vec![
                ("connection_result", "the failure message is shown on the connection result dialog"),
                ("connection_panel", "the test is started from the saved server panel"),
                ("server_settings", "the server URL is entered here"),
            ],
            generated_path: vec![
                open,
                edge("home", Action::Tap, "Server settings"),
                edge("server_settings", Action::Type, "Server URL"),
                edge("server_settings", Action::Tap, "OK"),
                edge("connection_panel", Action::Swipe, "Server options"),
                edge("connection_panel", Action::Tap, "Test Connection"),
            ],
            gt_path: vec![
                open,
                edge("home", Action::Tap, "Server settings"),
                edge("server_settings", Action::Type, "Server URL"),
                edge("server_settings", Action::Tap, "OK"),
                edge("connection_panel", Action::Swipe, "Server options"),
                edge("connection_panel", Action::Tap, "Test Connection"),
            ],
            gt_buggy_screen: "connection_result",
            gt_ob: ObSpec {
                screen_ref: "the connection result dialog",
                trigger: "taps 'Test Connection'",
                behavior: "the connection test always fails",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "connect to the configured server and let the user browse the library",
            },
            generated: GeneratedSpec {
                title: "Test Connection always fails for a saved server",
                behavior: "the connection test always fails",
                screen_ref: "the connection result dialog",
                trigger: "taps 'Test Connection'",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "connect to the server",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Incomplete,
            ),
        },
        // localization miss: the ranker stops at the media library
        ReportSpec {
            report: report(
                "92",
                app,
                "gray covers",
                "Album covers only show a gray box in the album view.\nThe artwork should be displayed for every album.\nOpen the media library and tap any album to see it.",
                None,
            ),
            sentence_labels: vec!["OB", "EB", "S2R"],
            ranking: vec![
                ("media_library", "albums are listed here, so the gray boxes were assumed to appear here"),
                ("album_view", "the report mentions the album view"),
            ],
            generated_path: vec![open, edge("home", Action::Tap, "Media library")],
            gt_path: vec![
                open,
                edge("home", Action::Tap, "Media library"),
                edge("media_library", Action::Tap, "Greatest Hits"),
            ],
            gt_buggy_screen: "album_view",
            gt_ob: ObSpec {
                screen_ref: "the album view screen",
                trigger: "taps 'Greatest Hits' list item",
                behavior: "album covers render as a gray box",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "display the cover artwork for every album",
            },
            generated: GeneratedSpec {
                title: "Album covers show as gray boxes",
                behavior: "album covers render as a gray box",
                screen_ref: "the media library screen",
                trigger: "taps 'Media library'",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "display the cover artwork for every album",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Incorrect,
                QualityLabel::Incorrect,
                QualityLabel::Correct,
            ),
        },
        // no S2R sentences at all: the steps must be inferred
        ReportSpec {
            report: report(
                "99",
                app,
                "player never stops",
                "Playback never stops at the end of the play queue.\nThe player just keeps going with songs I removed long ago.\nIt should stop when the queue is finished.",
                None,
            ),
            sentence_labels: vec!["OB", "OB", "EB"],
            ranking: vec![
                ("player", "the report is about playback, which happens on the now-playing screen"),
                ("album_view", "playback is started from the album view"),
            ],
            generated_path: vec![
                open,
                edge("home", Action::Tap, "Media library"),
                edge("media_library", Action::Tap, "Greatest Hits"),
                edge("album_view", Action::Tap, "Play all"),
            ],
            gt_path: vec![
                open,
                edge("home", Action::Tap, "Media library"),
                edge("media_library", Action::Tap, "Greatest Hits"),
                edge("album_view", Action::Tap, "Play all"),
            ],
            gt_buggy_screen: "player",
            gt_ob: ObSpec {
                screen_ref: "the now-playing screen",
                trigger: "taps 'Play all'",
                behavior: "playback continues past the end of the play queue",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "stop playback when the queue is finished",
            },
            generated: GeneratedSpec {
                title: "Playback does not stop at the end of the queue",
                behavior: "the app keeps playing",
                screen_ref: "the now-playing screen",
                trigger: "taps 'Play all'",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "stop playback when the queue is finished",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Ambiguous,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
    ];

    build_app(
        app,
        &[
            ("home", home()),
            ("server_settings", server_settings()),
            ("connection_panel", connection_panel()),
            ("connection_result", connection_result()),
            ("media_library", media_library()),
            ("album_view", album_view()),
            ("player", player()),
        ],
        traces,
        vec![
            ("home", "The home screen of the music streaming client with buttons for the server settings and the media library."),
            ("server_settings", "The server configuration form with fields for the server URL and username and an OK button to save."),
            ("connection_panel", "The saved server panel listing Server 1 with its options and a Test Connection button further down the list."),
            ("connection_result", "A dialog reporting the result of testing the server connection, shown over the settings."),
            ("media_library", "The media library listing albums such as Greatest Hits and Podcasts."),
            ("album_view", "The album view for Greatest Hits with the cover art and a Play all button."),
            ("player", "The now-playing screen with playback controls."),
        ],
        reports,
    )
}

// ---------------------------------------------------------------------------
// phimpme: a gallery app. Crash while sharing and a lost scroll position.
// ---------------------------------------------------------------------------

fn phimpme() -> AppSpec {
    let app = "phimpme";
    let gallery = || {
        snapshot(
            "GalleryActivity",
            false,
            vec![
                node("label", "title", "Phimp.me"),
                node("list-item", "photo_0", "Photo 1"),
                node("list-item", "photo_1", "Photo 2"),
                node("button", "camera", "Camera"),
            ],
        )
    };
    let photo_view = || {
        snapshot(
            "ViewerActivity",
            false,
            vec![
                node("image", "photo", "Current photo"),
                node("button", "share", "Share"),
                node("button", "edit", "Edit"),
            ],
        )
    };
    let share_activity = || {
        snapshot(
            "SharingActivity",
            false,
            vec![
                node("label", "share_title", "Share image"),
                node("checkbox", "acc_twitter", "Twitter"),
                node("button", "share_now", "Share now"),
            ],
        )
    };
    let edit_screen = || {
        snapshot(
            "EditActivity",
            false,
            vec![
                node("label", "edit_title", "Edit"),
                node("button", "crop", "Crop"),
                node("button", "save", "Save"),
            ],
        )
    };
    let selection_mode = || {
        snapshot(
            "GalleryActivity",
            false,
            vec![
                node("label", "selected_count", "1 selected"),
                node("button", "delete", "Delete"),
                node("button", "share_selected", "Share"),
            ],
        )
    };

    let traces = vec![
        TraceBuilder::new(app)
            .open_app(gallery())
            .tap(gallery(), component("list-item", "photo_0", "Photo 1"), photo_view())
            .tap(photo_view(), component("button", "share", "Share"), share_activity())
            .tap(share_activity(), component("button", "share_now", "Share now"), share_activity())
            .build(),
        TraceBuilder::new(app)
            .open_app(gallery())
            .tap(gallery(), component("list-item", "photo_0", "Photo 1"), photo_view())
            .tap(photo_view(), component("button", "edit", "Edit"), edit_screen())
            .back(edit_screen(), photo_view())
            .back(photo_view(), gallery())
            .build(),
        TraceBuilder::new(app)
            .manual()
            .open_app(gallery())
            .long_tap(gallery(), component("list-item", "photo_0", "Photo 1"), selection_mode())
            .back(selection_mode(), gallery())
            .build(),
    ];

    let open = edge("launcher", Action::OpenApp, "");

    let reports = vec![
        // a vague report; the generated path wanders through the editor,
        // collecting two extra steps
        ReportSpec {
            report: report(
                "1402",
                app,
                "share crash",
                "Try with different images in share activity.\nThe app closed itself without sharing anything.\nIt should upload the selected image to the connected account.",
                None,
            ),
            sentence_labels: vec!["S2R", "OB", "EB"],
            ranking: vec![
                ("share_activity", "the report names the share activity as the place where the app closes"),
                ("photo_view", "sharing starts from the photo viewer"),
            ],
            generated_path: vec![
                open,
                edge("gallery", Action::Tap, "Photo 1"),
                edge("photo_view", Action::Tap, "Edit"),
                edge("edit_screen", Action::Back, ""),
                edge("photo_view", Action::Tap, "Share"),
                edge("share_activity", Action::Tap, "Share now"),
            ],
            gt_path: vec![
                open,
                edge("gallery", Action::Tap, "Photo 1"),
                edge("photo_view", Action::Tap, "Share"),
                edge("share_activity", Action::Tap, "Share now"),
            ],
            gt_buggy_screen: "share_activity",
            gt_ob: ObSpec {
                screen_ref: "the share screen",
                trigger: "taps 'Share now'",
                behavior: "the app closes without sharing the image",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "upload the selected image to the connected account",
            },
            generated: GeneratedSpec {
                title: "App closes when sharing an image",
                behavior: "the app closes without sharing the image",
                screen_ref: "the share screen",
                trigger: "taps 'Share now'",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "upload the selected image to the connected account",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
        ReportSpec {
            report: report(
                "1410",
                app,
                "scroll jumps",
                "1. Open the app\n2. Long tap a photo\n3. Press back\nThe gallery scrolls back to the top instead of staying at my position.\nThe app should keep the scroll position.",
                None,
            ),
            sentence_labels: vec!["S2R", "S2R", "S2R", "OB", "EB"],
            ranking: vec![
                ("gallery", "the scroll position is lost on the main gallery grid"),
                ("selection_mode", "selection mode is where the user comes back from"),
            ],
            generated_path: vec![
                open,
                edge("gallery", Action::LongTap, "Photo 1"),
                edge("selection_mode", Action::Back, ""),
            ],
            gt_path: vec![
                open,
                edge("gallery", Action::LongTap, "Photo 1"),
                edge("selection_mode", Action::Back, ""),
            ],
            gt_buggy_screen: "gallery",
            gt_ob: ObSpec {
                screen_ref: "the main gallery grid",
                trigger: "presses the device back button",
                behavior: "the gallery loses the scroll position and jumps back to the top",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "keep the scroll position when leaving selection mode",
            },
            generated: GeneratedSpec {
                title: "Gallery loses scroll position after leaving selection mode",
                behavior: "the gallery scrolls",
                screen_ref: "the main gallery grid",
                trigger: "presses the device back button",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "keep the scroll position when leaving selection mode",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Incomplete,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
    ];

    build_app(
        app,
        &[
            ("gallery", gallery()),
            ("photo_view", photo_view()),
            ("share_activity", share_activity()),
            ("edit_screen", edit_screen()),
            ("selection_mode", selection_mode()),
        ],
        traces,
        vec![
            ("gallery", "The main gallery grid showing photos with a camera button."),
            ("photo_view", "The single-photo viewer with Share and Edit actions."),
            ("share_activity", "The share screen for sending the current image to a connected account, with a Share now button."),
            ("edit_screen", "The photo editor with crop and save controls."),
            ("selection_mode", "The gallery in selection mode, showing the count of selected photos with delete and share actions."),
        ],
        reports,
    )
}

// ---------------------------------------------------------------------------
// focusbrowser: a privacy browser. A vanishing cursor and a find-in-page
// feature that never matches.
// ---------------------------------------------------------------------------

fn focusbrowser() -> AppSpec {
    let app = "focusbrowser";
    let browser_home = || {
        snapshot(
            "MainActivity",
            false,
            vec![
                node("text-field", "url_bar", "Search or enter address"),
                node("button", "go", "Go"),
                node("button", "menu", "Menu"),
            ],
        )
    };
    let page_view = || {
        snapshot(
            "BrowserActivity",
            false,
            vec![
                node("label", "page_title", "example.com"),
                node("button", "erase", "Erase"),
                node("button", "menu", "Menu"),
            ],
        )
    };
    let browser_menu = || {
        snapshot(
            "BrowserActivity",
            true,
            vec![
                node("menu-item", "find_in_page", "Find in page"),
                node("menu-item", "settings", "Settings"),
                node("menu-item", "share_page", "Share page"),
            ],
        )
    };
    let find_bar = || {
        snapshot(
            "BrowserActivity",
            false,
            vec![
                node("text-field", "find_query", "Find in page"),
                node("label", "match_count", "0 of 0"),
                node("button", "close_find", "Close find"),
            ],
        )
    };
    let settings_screen = || {
        snapshot(
            "SettingsActivity",
            false,
            vec![
                node("checkbox", "block_trackers", "Block trackers"),
                node("button", "default_browser", "Default browser"),
            ],
        )
    };

    let traces = vec![
        TraceBuilder::new(app)
            .open_app(browser_home())
            .type_text(
                browser_home(),
                component("text-field", "url_bar", "Search or enter address"),
                "example.com",
                browser_home(),
            )
            .tap(browser_home(), component("button", "go", "Go"), page_view())
            .tap(page_view(), component("button", "menu", "Menu"), browser_menu())
            .tap(browser_menu(), component("menu-item", "find_in_page", "Find in page"), find_bar())
            .type_text(
                find_bar(),
                component("text-field", "find_query", "Find in page"),
                "privacy",
                find_bar(),
            )
            .tap(find_bar(), component("button", "close_find", "Close find"), page_view())
            .tap(page_view(), component("button", "erase", "Erase"), browser_home())
            .build(),
        TraceBuilder::new(app)
            .open_app(browser_home())
            .tap(browser_home(), component("button", "menu", "Menu"), browser_menu())
            .tap(browser_menu(), component("menu-item", "settings", "Settings"), settings_screen())
            .back(settings_screen(), browser_home())
            .build(),
    ];

    let open = edge("launcher", Action::OpenApp, "");

    let reports = vec![
        ReportSpec {
            report: report(
                "1066",
                app,
                "cursor gone",
                "The cursor in the URL bar disappears while typing.\nRepeat moving the cursor and clicking the system status bar to see it.\nThe cursor should stay visible in the URL bar.",
                Some("Android 11, Pixel 3"),
            ),
            sentence_labels: vec!["OB", "S2R", "EB"],
            ranking: vec![
                ("browser_home", "the URL bar lives on the browser start screen"),
                ("page_view", "typing can also happen after a page is loaded"),
            ],
            generated_path: vec![open, edge("browser_home", Action::Type, "Search or enter address")],
            gt_path: vec![open, edge("browser_home", Action::Type, "Search or enter address")],
            gt_buggy_screen: "browser_home",
            gt_ob: ObSpec {
                screen_ref: "the browser start screen",
                trigger: "types in the address field",
                behavior: "the cursor in the URL bar disappears while typing",
            },
            gt_eb: EbSpec {
                subject: "The cursor",
                should: true,
                behavior: "stay visible in the URL bar while typing",
            },
            generated: GeneratedSpec {
                title: "URL bar cursor disappears while typing",
                behavior: "the cursor in the URL bar disappears while typing",
                screen_ref: "the browser start screen",
                // misled by the reporter's workaround line
                trigger: "moves the cursor and taps the system status bar",
                eb_subject: "The cursor",
                eb_should: true,
                eb_behavior: "stay visible in the URL bar while typing",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Incorrect,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
        ReportSpec {
            report: report(
                "1071",
                app,
                "find in page broken",
                "Find in page finds nothing even when the word is clearly visible.\n1. Open a page\n2. Open the menu\n3. Tap Find in page\n4. Type a word that is on the page\nExpected: matches are highlighted on the page.",
                None,
            ),
            sentence_labels: vec!["OB", "S2R", "S2R", "S2R", "S2R", "EB"],
            ranking: vec![
                ("find_bar", "the match counter on the find bar stays at zero"),
                ("page_view", "the page content being searched is shown here"),
            ],
            generated_path: vec![
                open,
                edge("browser_home", Action::Type, "Search or enter address"),
                edge("browser_home", Action::Tap, "Go"),
                edge("page_view", Action::Tap, "Menu"),
                edge("browser_menu", Action::Tap, "Find in page"),
                edge("find_bar", Action::Type, "Find in page"),
            ],
            gt_path: vec![
                open,
                edge("browser_home", Action::Type, "Search or enter address"),
                edge("browser_home", Action::Tap, "Go"),
                edge("page_view", Action::Tap, "Menu"),
                edge("browser_menu", Action::Tap, "Find in page"),
                edge("find_bar", Action::Type, "Find in page"),
            ],
            gt_buggy_screen: "find_bar",
            gt_ob: ObSpec {
                screen_ref: "the find-in-page bar",
                trigger: "types a word from the page in the find field",
                behavior: "no matches are found for a word that is visible on the page",
            },
            gt_eb: EbSpec {
                subject: "The app",
                should: true,
                behavior: "highlight every match on the page",
            },
            generated: GeneratedSpec {
                title: "Find in page never finds visible words",
                behavior: "no matches are found for a word that is visible on the page",
                screen_ref: "the find-in-page bar",
                trigger: "types a word from the page in the find field",
                eb_subject: "The app",
                eb_should: true,
                eb_behavior: "highlight every match on the page",
                additional_info: None,
            },
            element_labels: labels(
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
                QualityLabel::Correct,
            ),
        },
    ];

    build_app(
        app,
        &[
            ("browser_home", browser_home()),
            ("page_view", page_view()),
            ("browser_menu", browser_menu()),
            ("find_bar", find_bar()),
            ("settings_screen", settings_screen()),
        ],
        traces,
        vec![
            ("browser_home", "The browser start screen with the address field, a Go button, and the menu."),
            ("page_view", "A loaded web page with the erase button and the browser menu."),
            ("browser_menu", "The browser menu popup with entries to find in page, open the settings, and share the page. Shown as a dialog."),
            ("find_bar", "The page with the find-in-page bar open: a query field, a match counter, and a close button."),
            ("settings_screen", "The browser settings with privacy options such as tracker blocking."),
        ],
        reports,
    )
}

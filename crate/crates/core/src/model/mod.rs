//! Graph-based app execution model: screens are nodes, GUI interactions are
//! edges. Models are built by ingesting interaction traces (from automated
//! exploration or manual recording), merged across traces, queried for
//! reproduction paths, and serialized to a canonical JSON document.

mod identity;
mod io;
mod paths;

pub use identity::{canonical_components, screen_identity};
pub use io::{deserialize_model, serialize_model, MODEL_SCHEMA};
pub use paths::{find_paths, validate_path, PathValidation};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reserved id for the launcher pseudo-screen that anchors `open-app` edges.
pub const LAUNCHER_SCREEN_ID: &str = "launcher";

/// Canonical digest identifying one unique app screen.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScreenId(String);

impl ScreenId {
    pub fn new(id: impl Into<String>) -> Self {
        ScreenId(id.into())
    }

    pub fn launcher() -> Self {
        ScreenId(LAUNCHER_SCREEN_ID.to_string())
    }

    pub fn is_launcher(&self) -> bool {
        self.0 == LAUNCHER_SCREEN_ID
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ScreenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unique id of one interaction edge, derived from its deduplication key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InteractionId(String);

impl InteractionId {
    pub fn new(id: impl Into<String>) -> Self {
        InteractionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InteractionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// GUI action performed on a screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    OpenApp,
    Tap,
    LongTap,
    Type,
    Swipe,
    Back,
    Rotate,
}

impl Action {
    /// Actions that operate on a concrete GUI component.
    pub fn requires_component(self) -> bool {
        matches!(self, Action::Tap | Action::LongTap | Action::Type | Action::Swipe)
    }

    pub fn token(self) -> &'static str {
        match self {
            Action::OpenApp => "open-app",
            Action::Tap => "tap",
            Action::LongTap => "long-tap",
            Action::Type => "type",
            Action::Swipe => "swipe",
            Action::Back => "back",
            Action::Rotate => "rotate",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Pixel rectangle of a component on screen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub left: i32,
    pub top: i32,
    pub right: i32,
    pub bottom: i32,
}

impl Bounds {
    pub fn new(left: i32, top: i32, right: i32, bottom: i32) -> Self {
        Bounds { left, top, right, bottom }
    }

    fn is_well_formed(&self) -> bool {
        self.left <= self.right && self.top <= self.bottom
    }
}

/// One GUI component in a screen hierarchy.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UiComponent {
    /// Component-type token, e.g. `button`, `text-field`, `menu-item`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub resource_id: String,
    /// Visible text of the component.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub content_description: String,
    #[serde(default)]
    pub bounds: Bounds,
}

impl UiComponent {
    /// Identity tuple used for edge deduplication. Bounds are excluded
    /// because they jitter across devices and orientations.
    fn canonical_identity(&self) -> (String, String, String, String) {
        (
            self.kind.clone(),
            self.resource_id.clone(),
            self.label.trim().to_lowercase(),
            self.content_description.trim().to_lowercase(),
        )
    }

    /// Best display name: first non-empty of label, content description,
    /// resource id.
    pub fn display_name(&self) -> &str {
        if !self.label.is_empty() {
            &self.label
        } else if !self.content_description.is_empty() {
            &self.content_description
        } else {
            &self.resource_id
        }
    }
}

/// Node of a screen's component hierarchy.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiNode {
    #[serde(flatten)]
    pub component: UiComponent,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<UiNode>,
}

/// One unique GUI screen of the app.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Screen {
    pub id: ScreenId,
    pub activity_name: String,
    pub is_dialog: bool,
    #[serde(default)]
    pub hierarchy: Vec<UiNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl Screen {
    /// Builds a screen from its parts, computing the canonical id.
    pub fn from_parts(activity_name: impl Into<String>, is_dialog: bool, hierarchy: Vec<UiNode>) -> Self {
        let activity_name = activity_name.into();
        let id = screen_identity(&hierarchy, &activity_name, is_dialog);
        Screen { id, activity_name, is_dialog, hierarchy, description: None }
    }

    /// The launcher pseudo-screen: empty hierarchy, reserved id.
    pub fn launcher() -> Self {
        Screen {
            id: ScreenId::launcher(),
            activity_name: LAUNCHER_SCREEN_ID.to_string(),
            is_dialog: false,
            hierarchy: Vec::new(),
            description: None,
        }
    }
}

/// One interaction edge of the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub id: InteractionId,
    pub source: ScreenId,
    pub target: ScreenId,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<UiComponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_text: Option<String>,
}

impl Interaction {
    /// Deduplication key: (source, action, component identity, input text,
    /// target). Duplicate edges under this key add no information.
    fn dedup_key(&self) -> String {
        let comp = self.component.as_ref().map(|c| c.canonical_identity());
        let key = serde_json::json!([
            self.source.as_str(),
            self.action.token(),
            comp.map(|(k, r, l, d)| serde_json::json!([k, r, l, d])),
            self.input_text,
            self.target.as_str(),
        ]);
        key.to_string()
    }

    fn derive_id(&self) -> InteractionId {
        InteractionId(format!("i{}", identity::short_digest(self.dedup_key().as_bytes())))
    }
}

/// Where a trace came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceOrigin {
    Automated,
    Manual,
}

/// Raw screen snapshot inside a trace event, before identity assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenSnapshot {
    pub activity: String,
    #[serde(default)]
    pub is_dialog: bool,
    #[serde(default)]
    pub hierarchy: Vec<UiNode>,
}

impl ScreenSnapshot {
    fn identity(&self) -> ScreenId {
        screen_identity(&self.hierarchy, &self.activity, self.is_dialog)
    }

    fn to_screen(&self) -> Screen {
        Screen::from_parts(self.activity.clone(), self.is_dialog, self.hierarchy.clone())
    }
}

/// One recorded interaction: the screen it happened on, the action, and the
/// resulting screen. `screen` is absent only for the `open-app` event, whose
/// source is the launcher pseudo-screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenSnapshot>,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<UiComponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_text: Option<String>,
    pub result_screen: ScreenSnapshot,
}

/// An ordered GUI interaction trace over one app.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub app_id: String,
    pub origin: TraceOrigin,
    pub events: Vec<TraceEvent>,
}

/// Errors from model construction, validation, and queries.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("app id mismatch: model is '{model}', input is '{input}'")]
    AppIdMismatch { model: String, input: String },
    #[error("trace has no events")]
    EmptyTrace,
    #[error("trace event {index}: {reason}")]
    InvalidEvent { index: usize, reason: String },
    #[error("trace events {index} and {next} do not chain: resulting screen differs from next snapshot")]
    NonChainingEvents { index: usize, next: usize },
    #[error("conflicting initial screens: '{existing}' vs '{incoming}'")]
    ConflictingInitialScreens { existing: ScreenId, incoming: ScreenId },
    #[error("unknown screen id '{0}'")]
    UnknownScreen(ScreenId),
    #[error("max_len must be >= 1")]
    InvalidMaxLen,
    #[error("invalid model at {path}: {reason}")]
    Invalid { path: String, reason: String },
    #[error("model document parse error at {path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("unsupported model schema '{0}'")]
    UnsupportedSchema(String),
}

/// Directed graph of app screens and the GUI interactions between them.
///
/// Immutable after construction: `ingest_trace` and `merge` return new
/// models, so a built model can be shared read-only across workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionModel {
    app_id: String,
    screens: BTreeMap<ScreenId, Screen>,
    interactions: Vec<Interaction>,
    initial_screen: Option<ScreenId>,
}

impl ExecutionModel {
    /// Empty model for an app: just the launcher pseudo-screen, no edges.
    pub fn new(app_id: impl Into<String>) -> Self {
        let mut screens = BTreeMap::new();
        let launcher = Screen::launcher();
        screens.insert(launcher.id.clone(), launcher);
        ExecutionModel { app_id: app_id.into(), screens, interactions: Vec::new(), initial_screen: None }
    }

    pub fn app_id(&self) -> &str {
        &self.app_id
    }

    pub fn screens(&self) -> &BTreeMap<ScreenId, Screen> {
        &self.screens
    }

    pub fn screen(&self, id: &ScreenId) -> Option<&Screen> {
        self.screens.get(id)
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn interaction(&self, id: &InteractionId) -> Option<&Interaction> {
        self.interactions.iter().find(|i| &i.id == id)
    }

    /// The screen reached by the unique `open-app` edge, if any edge exists.
    pub fn initial_screen(&self) -> Option<&ScreenId> {
        self.initial_screen.as_ref()
    }

    /// Number of screens excluding the launcher pseudo-screen.
    pub fn app_screen_count(&self) -> usize {
        self.screens.keys().filter(|id| !id.is_launcher()).count()
    }

    /// Extends this model with every screen and interaction induced by the
    /// trace. Ingesting the same trace twice yields an identical model.
    pub fn ingest_trace(&self, trace: &Trace) -> Result<ExecutionModel, ModelError> {
        if trace.app_id != self.app_id {
            return Err(ModelError::AppIdMismatch {
                model: self.app_id.clone(),
                input: trace.app_id.clone(),
            });
        }
        if trace.events.is_empty() {
            return Err(ModelError::EmptyTrace);
        }

        let mut next = self.clone();
        let mut prev_result: Option<ScreenId> = None;
        for (index, event) in trace.events.iter().enumerate() {
            check_event_shape(index, event)?;
            let source_id = match (&event.action, &event.screen) {
                (Action::OpenApp, _) => {
                    if index != 0 {
                        return Err(ModelError::InvalidEvent {
                            index,
                            reason: "open-app is only valid as the first event".into(),
                        });
                    }
                    ScreenId::launcher()
                }
                (_, Some(snapshot)) => {
                    let id = snapshot.identity();
                    next.screens.entry(id.clone()).or_insert_with(|| snapshot.to_screen());
                    id
                }
                (_, None) => {
                    return Err(ModelError::InvalidEvent {
                        index,
                        reason: format!("action '{}' requires a source screen snapshot", event.action),
                    });
                }
            };

            if let Some(prev) = &prev_result {
                if prev != &source_id {
                    return Err(ModelError::NonChainingEvents { index: index - 1, next: index });
                }
            }

            let target_id = event.result_screen.identity();
            next.screens
                .entry(target_id.clone())
                .or_insert_with(|| event.result_screen.to_screen());

            if event.action == Action::OpenApp {
                match &next.initial_screen {
                    Some(existing) if existing != &target_id => {
                        return Err(ModelError::ConflictingInitialScreens {
                            existing: existing.clone(),
                            incoming: target_id,
                        });
                    }
                    _ => next.initial_screen = Some(target_id.clone()),
                }
            }

            let mut interaction = Interaction {
                id: InteractionId::new(""),
                source: source_id,
                target: target_id,
                action: event.action,
                component: event.component.clone(),
                input_text: event.input_text.clone(),
            };
            interaction.id = interaction.derive_id();
            if !next.interactions.iter().any(|i| i.id == interaction.id) {
                next.interactions.push(interaction);
            }

            prev_result = Some(event.result_screen.identity());
        }

        next.interactions.sort_by(|a, b| a.id.cmp(&b.id));
        next.validate().map(|()| next)
    }

    /// Union of two models over the same app. Screens and interactions are
    /// merged by id; the initial screen is taken from `self` and must match
    /// the other model's when both are defined.
    pub fn merge(&self, other: &ExecutionModel) -> Result<ExecutionModel, ModelError> {
        if self.app_id != other.app_id {
            return Err(ModelError::AppIdMismatch {
                model: self.app_id.clone(),
                input: other.app_id.clone(),
            });
        }
        let initial_screen = match (&self.initial_screen, &other.initial_screen) {
            (Some(a), Some(b)) if a != b => {
                return Err(ModelError::ConflictingInitialScreens {
                    existing: a.clone(),
                    incoming: b.clone(),
                });
            }
            (Some(a), _) => Some(a.clone()),
            (None, b) => b.clone(),
        };

        let mut screens = self.screens.clone();
        for (id, screen) in &other.screens {
            screens
                .entry(id.clone())
                .and_modify(|existing| {
                    if existing.description.is_none() {
                        existing.description = screen.description.clone();
                    }
                })
                .or_insert_with(|| screen.clone());
        }

        let mut interactions = self.interactions.clone();
        let known: BTreeSet<InteractionId> = interactions.iter().map(|i| i.id.clone()).collect();
        for interaction in &other.interactions {
            if !known.contains(&interaction.id) {
                interactions.push(interaction.clone());
            }
        }
        interactions.sort_by(|a, b| a.id.cmp(&b.id));

        let merged = ExecutionModel { app_id: self.app_id.clone(), screens, interactions, initial_screen };
        merged.validate().map(|()| merged)
    }

    /// Checks every type invariant. Called after construction and on load.
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.screens.contains_key(&ScreenId::launcher()) {
            return Err(ModelError::Invalid {
                path: "/screens".into(),
                reason: "launcher pseudo-screen missing".into(),
            });
        }
        for (id, screen) in &self.screens {
            if id != &screen.id {
                return Err(ModelError::Invalid {
                    path: format!("/screens/{id}"),
                    reason: format!("map key does not match screen id '{}'", screen.id),
                });
            }
            if !id.is_launcher() {
                let recomputed = screen_identity(&screen.hierarchy, &screen.activity_name, screen.is_dialog);
                if &recomputed != id {
                    return Err(ModelError::Invalid {
                        path: format!("/screens/{id}"),
                        reason: "screen id does not match recomputed identity".into(),
                    });
                }
            }
            validate_hierarchy(id, &screen.hierarchy)?;
        }

        let mut dedup = BTreeSet::new();
        let mut open_app_edges = Vec::new();
        for (index, interaction) in self.interactions.iter().enumerate() {
            let at = |field: &str| format!("/interactions/{index}/{field}");
            if !self.screens.contains_key(&interaction.source) {
                return Err(ModelError::Invalid {
                    path: at("source"),
                    reason: format!("unknown screen '{}'", interaction.source),
                });
            }
            if !self.screens.contains_key(&interaction.target) {
                return Err(ModelError::Invalid {
                    path: at("target"),
                    reason: format!("unknown screen '{}'", interaction.target),
                });
            }
            if interaction.action.requires_component() && interaction.component.is_none() {
                return Err(ModelError::Invalid {
                    path: at("component"),
                    reason: format!("action '{}' requires a component", interaction.action),
                });
            }
            if !interaction.action.requires_component() && interaction.component.is_some() {
                return Err(ModelError::Invalid {
                    path: at("component"),
                    reason: format!("action '{}' must not carry a component", interaction.action),
                });
            }
            if (interaction.action == Action::Type) != interaction.input_text.is_some() {
                return Err(ModelError::Invalid {
                    path: at("input_text"),
                    reason: "input_text is present iff action is 'type'".into(),
                });
            }
            if let Some(component) = &interaction.component {
                if !component.bounds.is_well_formed() {
                    return Err(ModelError::Invalid {
                        path: at("component/bounds"),
                        reason: "left must be <= right and top <= bottom".into(),
                    });
                }
            }
            if interaction.id != interaction.derive_id() {
                return Err(ModelError::Invalid {
                    path: at("id"),
                    reason: "interaction id does not match its deduplication key digest".into(),
                });
            }
            if !dedup.insert(interaction.dedup_key()) {
                return Err(ModelError::Invalid {
                    path: format!("/interactions/{index}"),
                    reason: "duplicate interaction (same source, action, component, input, target)".into(),
                });
            }
            if interaction.action == Action::OpenApp {
                open_app_edges.push(interaction);
            }
        }

        match (&self.initial_screen, open_app_edges.as_slice()) {
            (None, []) => {}
            (Some(initial), [edge]) => {
                if !self.screens.contains_key(initial) {
                    return Err(ModelError::Invalid {
                        path: "/initial_screen".into(),
                        reason: format!("unknown screen '{initial}'"),
                    });
                }
                if !edge.source.is_launcher() {
                    return Err(ModelError::Invalid {
                        path: "/interactions".into(),
                        reason: "open-app edge must start at the launcher pseudo-screen".into(),
                    });
                }
                if &edge.target != initial {
                    return Err(ModelError::Invalid {
                        path: "/initial_screen".into(),
                        reason: "initial screen is not the open-app target".into(),
                    });
                }
            }
            (None, [_, ..]) => {
                return Err(ModelError::Invalid {
                    path: "/initial_screen".into(),
                    reason: "model has open-app edges but no initial screen".into(),
                });
            }
            (Some(_), []) => {
                return Err(ModelError::Invalid {
                    path: "/initial_screen".into(),
                    reason: "initial screen is set but no open-app edge exists".into(),
                });
            }
            (Some(_), [_, _, ..]) => {
                return Err(ModelError::Invalid {
                    path: "/interactions".into(),
                    reason: "more than one open-app edge".into(),
                });
            }
        }
        Ok(())
    }

    /// Raw constructor for deserialization; validates before returning.
    pub(crate) fn from_raw(
        app_id: String,
        screens: BTreeMap<ScreenId, Screen>,
        mut interactions: Vec<Interaction>,
        initial_screen: Option<ScreenId>,
    ) -> Result<ExecutionModel, ModelError> {
        interactions.sort_by(|a, b| a.id.cmp(&b.id));
        let model = ExecutionModel { app_id, screens, interactions, initial_screen };
        model.validate().map(|()| model)
    }
}

fn check_event_shape(index: usize, event: &TraceEvent) -> Result<(), ModelError> {
    if event.action.requires_component() && event.component.is_none() {
        return Err(ModelError::InvalidEvent {
            index,
            reason: format!("action '{}' requires a component", event.action),
        });
    }
    if !event.action.requires_component() && event.component.is_some() {
        return Err(ModelError::InvalidEvent {
            index,
            reason: format!("action '{}' must not carry a component", event.action),
        });
    }
    if (event.action == Action::Type) != event.input_text.is_some() {
        return Err(ModelError::InvalidEvent {
            index,
            reason: "input_text must be present iff the action is 'type'".into(),
        });
    }
    Ok(())
}

fn validate_hierarchy(screen: &ScreenId, nodes: &[UiNode]) -> Result<(), ModelError> {
    fn walk(screen: &ScreenId, node: &UiNode) -> Result<(), ModelError> {
        if !node.component.bounds.is_well_formed() {
            return Err(ModelError::Invalid {
                path: format!("/screens/{screen}/hierarchy"),
                reason: format!(
                    "component '{}' has malformed bounds",
                    node.component.display_name()
                ),
            });
        }
        for child in &node.children {
            walk(screen, child)?;
        }
        Ok(())
    }
    for node in nodes {
        walk(screen, node)?;
    }
    Ok(())
}

//! Shared construction helpers for tests, benches, and the bundled-data
//! generator. Not part of the public API.

use std::collections::VecDeque;
use std::sync::Mutex;

use crate::gateway::{Transport, TransportError};
use crate::model::{
    Action, Bounds, ExecutionModel, ScreenSnapshot, Trace, TraceEvent, TraceOrigin, UiComponent,
    UiNode,
};

/// Test transport that routes a prompt to a canned response queue by
/// substring marker. Routes are checked in insertion order; a queue's last
/// response is sticky, so a single response answers repeated calls.
pub struct ScriptedTransport {
    routes: Mutex<Vec<(String, VecDeque<String>)>>,
}

impl ScriptedTransport {
    pub fn new() -> Self {
        ScriptedTransport { routes: Mutex::new(Vec::new()) }
    }

    pub fn on(self, marker: &str, responses: &[&str]) -> Self {
        assert!(!responses.is_empty(), "a route needs at least one response");
        self.routes
            .lock()
            .unwrap()
            .push((marker.to_string(), responses.iter().map(|s| s.to_string()).collect()));
        self
    }
}

impl Default for ScriptedTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for ScriptedTransport {
    fn complete(&self, prompt: &str, _model_hint: &str) -> Result<String, TransportError> {
        let mut routes = self.routes.lock().unwrap();
        for (marker, queue) in routes.iter_mut() {
            if prompt.contains(marker.as_str()) {
                let response = if queue.len() > 1 {
                    queue.pop_front().expect("non-empty queue")
                } else {
                    queue.front().expect("non-empty queue").clone()
                };
                return Ok(response);
            }
        }
        Err(TransportError::Exhausted {
            attempts: 1,
            reason: format!("no scripted route matches prompt: {}", &prompt[..prompt.len().min(120)]),
        })
    }
}

pub fn component(kind: &str, resource_id: &str, label: &str) -> UiComponent {
    UiComponent {
        kind: kind.to_string(),
        resource_id: resource_id.to_string(),
        label: label.to_string(),
        content_description: String::new(),
        bounds: Bounds::new(0, 0, 100, 40),
    }
}

pub fn node(kind: &str, resource_id: &str, label: &str) -> UiNode {
    UiNode { component: component(kind, resource_id, label), children: Vec::new() }
}

pub fn node_with_children(kind: &str, resource_id: &str, label: &str, children: Vec<UiNode>) -> UiNode {
    UiNode { component: component(kind, resource_id, label), children }
}

pub fn snapshot(activity: &str, is_dialog: bool, hierarchy: Vec<UiNode>) -> ScreenSnapshot {
    ScreenSnapshot { activity: activity.to_string(), is_dialog, hierarchy }
}

/// Builds chained trace events from (pre, action, component, input, post)
/// tuples. Pass `None` as the pre-snapshot for the opening event.
pub struct TraceBuilder {
    app_id: String,
    origin: TraceOrigin,
    events: Vec<TraceEvent>,
}

impl TraceBuilder {
    pub fn new(app_id: &str) -> Self {
        TraceBuilder { app_id: app_id.to_string(), origin: TraceOrigin::Automated, events: Vec::new() }
    }

    pub fn manual(mut self) -> Self {
        self.origin = TraceOrigin::Manual;
        self
    }

    pub fn open_app(mut self, result: ScreenSnapshot) -> Self {
        self.events.push(TraceEvent {
            screen: None,
            action: Action::OpenApp,
            component: None,
            input_text: None,
            result_screen: result,
        });
        self
    }

    pub fn tap(mut self, from: ScreenSnapshot, target: UiComponent, result: ScreenSnapshot) -> Self {
        self.events.push(TraceEvent {
            screen: Some(from),
            action: Action::Tap,
            component: Some(target),
            input_text: None,
            result_screen: result,
        });
        self
    }

    pub fn long_tap(mut self, from: ScreenSnapshot, target: UiComponent, result: ScreenSnapshot) -> Self {
        self.events.push(TraceEvent {
            screen: Some(from),
            action: Action::LongTap,
            component: Some(target),
            input_text: None,
            result_screen: result,
        });
        self
    }

    pub fn type_text(
        mut self,
        from: ScreenSnapshot,
        target: UiComponent,
        text: &str,
        result: ScreenSnapshot,
    ) -> Self {
        self.events.push(TraceEvent {
            screen: Some(from),
            action: Action::Type,
            component: Some(target),
            input_text: Some(text.to_string()),
            result_screen: result,
        });
        self
    }

    pub fn swipe(mut self, from: ScreenSnapshot, target: UiComponent, result: ScreenSnapshot) -> Self {
        self.events.push(TraceEvent {
            screen: Some(from),
            action: Action::Swipe,
            component: Some(target),
            input_text: None,
            result_screen: result,
        });
        self
    }

    pub fn back(mut self, from: ScreenSnapshot, result: ScreenSnapshot) -> Self {
        self.events.push(TraceEvent {
            screen: Some(from),
            action: Action::Back,
            component: None,
            input_text: None,
            result_screen: result,
        });
        self
    }

    pub fn rotate(mut self, from: ScreenSnapshot, result: ScreenSnapshot) -> Self {
        self.events.push(TraceEvent {
            screen: Some(from),
            action: Action::Rotate,
            component: None,
            input_text: None,
            result_screen: result,
        });
        self
    }

    pub fn build(self) -> Trace {
        Trace { app_id: self.app_id, origin: self.origin, events: self.events }
    }
}

/// A small three-screen model: launcher -> home -> list -> detail, with a
/// back edge from detail to list.
pub fn chain_model() -> ExecutionModel {
    let home = || snapshot("HomeActivity", false, vec![node("button", "go_list", "Lists")]);
    let list = || {
        snapshot(
            "ListActivity",
            false,
            vec![node("list-item", "row_0", "First item"), node("button", "add", "Add")],
        )
    };
    let detail = || snapshot("DetailActivity", false, vec![node("label", "title", "Item detail")]);

    let trace = TraceBuilder::new("demo.app")
        .open_app(home())
        .tap(home(), component("button", "go_list", "Lists"), list())
        .tap(list(), component("list-item", "row_0", "First item"), detail())
        .back(detail(), list())
        .build();
    ExecutionModel::new("demo.app").ingest_trace(&trace).expect("chain model builds")
}

/// Deterministic dataset-scale model shaped like a real app: a home screen
/// fanning out into `spokes` feature chains of `depth` screens, with back
/// edges along each chain and occasional rotate self-loops. With 8 spokes of
/// depth 13 this gives 105 app screens and ~240 interactions, the upper end
/// of real app model sizes, while keeping path counts enumerable.
pub fn hub_chain_model(spokes: usize, depth: usize) -> ExecutionModel {
    let home = || {
        snapshot(
            "HomeActivity",
            false,
            (0..spokes).map(|s| node("menu-item", &format!("menu_{s}"), &format!("Feature {s}"))).collect(),
        )
    };
    let chain = |spoke: usize, step: usize| {
        snapshot(
            &format!("Feature{spoke}Activity"),
            false,
            vec![
                node("label", &format!("hdr_{spoke}_{step}"), &format!("Feature {spoke} step {step}")),
                node("button", &format!("next_{spoke}_{step}"), "Continue"),
            ],
        )
    };

    let mut model = ExecutionModel::new("synthetic.app");
    let opening = TraceBuilder::new("synthetic.app").open_app(home()).build();
    model = model.ingest_trace(&opening).expect("opening trace");

    for spoke in 0..spokes {
        let menu = component("menu-item", &format!("menu_{spoke}"), &format!("Feature {spoke}"));
        let trace = TraceBuilder::new("synthetic.app").tap(home(), menu, chain(spoke, 1)).build();
        model = model.ingest_trace(&trace).expect("spoke entry");
        let trace = TraceBuilder::new("synthetic.app").back(chain(spoke, 1), home()).build();
        model = model.ingest_trace(&trace).expect("spoke back");

        for step in 1..depth {
            let next = component("button", &format!("next_{spoke}_{step}"), "Continue");
            let trace = TraceBuilder::new("synthetic.app")
                .tap(chain(spoke, step), next, chain(spoke, step + 1))
                .build();
            model = model.ingest_trace(&trace).expect("chain forward");
            let trace = TraceBuilder::new("synthetic.app")
                .back(chain(spoke, step + 1), chain(spoke, step))
                .build();
            model = model.ingest_trace(&trace).expect("chain back");
            if step % 3 == 0 {
                let trace = TraceBuilder::new("synthetic.app")
                    .rotate(chain(spoke, step), chain(spoke, step))
                    .build();
                model = model.ingest_trace(&trace).expect("rotate loop");
            }
        }
    }
    model
}

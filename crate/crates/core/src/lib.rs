//! Core library for bugscribe: builds graph-based app execution models from
//! GUI interaction traces, rewrites low-quality bug reports into structured
//! reports grounded in those models, and scores the results against ground
//! truth with a step/element quality model and agreement statistics.
//!
//! All LLM access goes through [`gateway::Gateway`], which supports
//! record/replay fixtures so every pipeline stage runs deterministically
//! offline.

pub mod annotation;
pub mod context;
pub mod evaluation;
pub mod gateway;
pub mod generation;
pub mod model;
pub mod report;

#[doc(hidden)]
pub mod testutil;

pub use annotation::LabeledReport;
pub use context::{InteractionCatalog, ScreenDescription, ScreenRanking};
pub use evaluation::{AgreementReport, ElementAssessment, Metrics, Scorecard, StepMatch};
pub use gateway::{CompletionRequest, CompletionResult, Gateway, GatewayMode, PromptTemplate};
pub use generation::{ContextConfig, GenerationTrace};
pub use model::{
    Action, ExecutionModel, Interaction, InteractionId, PathValidation, Screen, ScreenId, Trace,
    UiComponent,
};
pub use report::{
    AtomicStep, BugReport, EbDescription, GeneratedReport, GroundTruth, LabeledSentence,
    ObDescription, SentenceLabel,
};

//! bugscribe: build app execution models from GUI traces, rewrite bug
//! reports into structured, grounded ones, and score them against ground
//! truth. All LLM-dependent commands default to offline replay over the
//! fixture set.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bugscribe_core::gateway::Gateway;
use bugscribe_core::generation::{ObEbContext, S2rContext};

use io::{unix_millis, RunManifest};

#[derive(Parser)]
#[command(name = "bugscribe", version, about = "Execution-model-grounded bug report generation and evaluation")]
struct Cli {
    /// Where to write the run manifest.
    #[arg(long, global = true, default_value = "bugscribe-manifest.json")]
    manifest: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Replay,
    Record,
    Live,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Replay => "replay",
            Mode::Record => "record",
            Mode::Live => "live",
        }
    }
}

#[derive(Args)]
struct GatewayArgs {
    /// Completion mode: replay serves fixtures offline; record fills
    /// missing fixtures via live calls; live never persists.
    #[arg(long, value_enum, default_value = "replay")]
    mode: Mode,
    /// Fixture directory root.
    #[arg(long, default_value = "fixtures")]
    fixtures: PathBuf,
    /// Rate limit for live/record calls, requests per minute.
    #[arg(long, default_value_t = 30)]
    rpm: u32,
    /// Overwrite existing fixtures when recording.
    #[arg(long)]
    force: bool,
}

impl GatewayArgs {
    fn gateway(&self) -> anyhow::Result<Gateway> {
        commands::make_gateway(self.mode, &self.fixtures, self.rpm, self.force)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Context preset: default, no-info, interactions, interactions+screens.
    #[arg(long, default_value = "default")]
    config: String,
    /// Override the S2R-stage context of the preset.
    #[arg(long)]
    s2r_context: Option<String>,
    /// Override the OB/EB-stage context of the preset.
    #[arg(long)]
    obeb_context: Option<String>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the generation trace (stages and fixture keys).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    gateway: GatewayArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Rendered report markdown to score.
    #[arg(long)]
    generated: PathBuf,
    #[arg(long)]
    ground_truth: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Manual element labels (bugscribe-assess/1). Without this, pass
    /// --judge llm to use the gateway.
    #[arg(long)]
    assessments: Option<PathBuf>,
    /// Element judge: llm (requires fixtures or a live provider).
    #[arg(long)]
    judge: Option<String>,
    #[command(flatten)]
    gateway: GatewayArgs,
}

#[derive(Args)]
struct PipelineAllArgs {
    /// Directory of report.json files.
    #[arg(long)]
    reports: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Directory of ground_truth json files named <report_id>.json.
    #[arg(long)]
    ground_truth: PathBuf,
    /// Directory of manual assessment files named <report_id>.json; the
    /// LLM judge is used when absent.
    #[arg(long)]
    assessments: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "default")]
    config: String,
    /// Concurrent reports.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    gateway: GatewayArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Build an execution model from a directory of trace files.
    BuildModel {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label each report sentence as OB, EB, S2R, or OTHER.
    Annotate {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Keyword-rule classifier for offline smoke tests; never for
        /// evaluation runs.
        #[arg(long)]
        heuristic: bool,
        #[command(flatten)]
        gateway: GatewayArgs,
    },
    /// Generate a natural-language description for every model screen.
    DescribeScreens {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        gateway: GatewayArgs,
    },
    /// Rank the model screens by how likely each is the buggy screen.
    Localize {
        #[arg(long)]
        labeled: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        descriptions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        gateway: GatewayArgs,
    },
    /// Run the full generation pipeline for one report.
    Generate(GenerateArgs),
    /// Score a rendered report against its ground truth.
    Evaluate(EvaluateArgs),
    /// Agreement statistics (observed, kappa, alpha) for two label files.
    Agree {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Generate and evaluate every report in a directory.
    PipelineAll(PipelineAllArgs),
}

fn parse_s2r_context(name: &str) -> anyhow::Result<S2rContext> {
    Ok(match name {
        "none" => S2rContext::NoInfo,
        "interactions" => S2rContext::Interactions,
        "interactions+screens" => S2rContext::InteractionsScreens,
        "interactions+screens+buggy_screen" => S2rContext::InteractionsScreensBuggyScreen,
        other => anyhow::bail!("unknown s2r context '{other}'"),
    })
}

fn parse_obeb_context(name: &str) -> anyhow::Result<ObEbContext> {
    Ok(match name {
        "none" => ObEbContext::NoInfo,
        "buggy_screen" => ObEbContext::BuggyScreen,
        "s2rs+buggy_screen" => ObEbContext::S2rsBuggyScreen,
        "s2rs+buggy_screen+screens" => ObEbContext::S2rsBuggyScreenScreens,
        other => anyhow::bail!("unknown obeb context '{other}'"),
    })
}

struct Outcome {
    warnings: Vec<String>,
    gateway: Option<bugscribe_core::gateway::CounterSnapshot>,
    stdout: Option<String>,
}

impl Outcome {
    fn plain(warnings: Vec<String>) -> Self {
        Outcome { warnings, gateway: None, stdout: None }
    }
}

fn run(command: &Command) -> anyhow::Result<Outcome> {
    match command {
        Command::BuildModel { traces, out } => {
            Ok(Outcome::plain(commands::build_model(traces, out)?))
        }
        Command::Annotate { report, out, heuristic, gateway } => {
            let gw = gateway.gateway()?;
            let warnings = commands::annotate(report, out, &gw, *heuristic)?;
            Ok(Outcome { warnings, gateway: Some(gw.counters()), stdout: None })
        }
        Command::DescribeScreens { model, out, gateway } => {
            let gw = gateway.gateway()?;
            let warnings = commands::describe(model, out, &gw)?;
            Ok(Outcome { warnings, gateway: Some(gw.counters()), stdout: None })
        }
        Command::Localize { labeled, model, descriptions, out, gateway } => {
            let gw = gateway.gateway()?;
            let warnings = commands::localize(labeled, model, descriptions, out, &gw)?;
            Ok(Outcome { warnings, gateway: Some(gw.counters()), stdout: None })
        }
        Command::Generate(args) => {
            let mut config = commands::config_from_name(&args.config)?;
            if let Some(name) = &args.s2r_context {
                config.s2r_context = parse_s2r_context(name)?;
            }
            if let Some(name) = &args.obeb_context {
                config.obeb_context = parse_obeb_context(name)?;
            }
            let gw = args.gateway.gateway()?;
            let warnings = commands::generate(args, config, &gw)?;
            Ok(Outcome { warnings, gateway: Some(gw.counters()), stdout: None })
        }
        Command::Evaluate(args) => {
            let needs_judge = args.assessments.is_none();
            match &args.judge {
                Some(judge) if judge != "llm" => anyhow::bail!("unknown judge '{judge}'"),
                _ => {}
            }
            let gw = if needs_judge || args.judge.is_some() {
                Some(args.gateway.gateway()?)
            } else {
                None
            };
            let warnings = commands::evaluate(args, gw.as_ref())?;
            Ok(Outcome { warnings, gateway: gw.map(|g| g.counters()), stdout: None })
        }
        Command::Agree { a, b } => {
            let (report, warnings) = commands::agree(a, b)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            Ok(Outcome { warnings, gateway: None, stdout: Some(text) })
        }
        Command::PipelineAll(args) => {
            let config = commands::config_from_name(&args.config)?;
            let gw = args.gateway.gateway()?;
            let warnings = commands::pipeline_all(args, config, &gw)?;
            Ok(Outcome { warnings, gateway: Some(gw.counters()), stdout: None })
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::BuildModel { .. } => "build-model",
        Command::Annotate { .. } => "annotate",
        Command::DescribeScreens { .. } => "describe-screens",
        Command::Localize { .. } => "localize",
        Command::Generate(_) => "generate",
        Command::Evaluate(_) => "evaluate",
        Command::Agree { .. } => "agree",
        Command::PipelineAll(_) => "pipeline-all",
    }
}

fn command_inputs(command: &Command) -> Vec<String> {
    let paths: Vec<&PathBuf> = match command {
        Command::BuildModel { traces, .. } => vec![traces],
        Command::Annotate { report, .. } => vec![report],
        Command::DescribeScreens { model, .. } => vec![model],
        Command::Localize { labeled, model, descriptions, .. } => vec![labeled, model, descriptions],
        Command::Generate(args) => vec![&args.report, &args.model],
        Command::Evaluate(args) => vec![&args.generated, &args.ground_truth, &args.model],
        Command::Agree { a, b } => vec![a, b],
        Command::PipelineAll(args) => vec![&args.reports, &args.model, &args.ground_truth],
    };
    paths.into_iter().map(|p| p.display().to_string()).collect()
}

fn command_mode(command: &Command) -> Option<&'static str> {
    match command {
        Command::Annotate { gateway, .. }
        | Command::DescribeScreens { gateway, .. }
        | Command::Localize { gateway, .. } => Some(gateway.mode.name()),
        Command::Generate(args) => Some(args.gateway.mode.name()),
        Command::Evaluate(args) => Some(args.gateway.mode.name()),
        Command::PipelineAll(args) => Some(args.gateway.mode.name()),
        _ => None,
    }
}

fn command_config(command: &Command) -> Option<String> {
    match command {
        Command::Generate(args) => Some(args.config.clone()),
        Command::PipelineAll(args) => Some(args.config.clone()),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = unix_millis();

    let result = run(&cli.command);
    let (exit, warnings, gateway, stdout) = match result {
        Ok(outcome) => (0, outcome.warnings, outcome.gateway, outcome.stdout),
        Err(e) => {
            eprintln!("error: {e:#}");
            (1, Vec::new(), None, None)
        }
    };

    let manifest = RunManifest {
        command: command_name(&cli.command).to_string(),
        inputs: command_inputs(&cli.command),
        config: command_config(&cli.command),
        mode: command_mode(&cli.command).map(str::to_string),
        started_unix_ms: started,
        finished_unix_ms: unix_millis(),
        exit_status: exit,
        warnings: warnings.clone(),
        gateway,
    };
    if let Err(e) = manifest.write(&cli.manifest) {
        eprintln!("error: failed to write run manifest: {e:#}");
    }
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(text) = stdout {
        print!("{text}");
    }
    if exit == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Command-line front end: every subcommand reads JSON, writes a versioned
//! JSON document echoing its parameters, and optionally an SVG figure.

mod commands;
mod io;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypcircle::carpet::CarpetStyle;
use hypcircle::flows::RfkParams;
use hypcircle::kleinian::LimitMethod;
use hypcircle::slicer::StopRule;
use hypcircle::Tolerances;
use serde::Serialize;

use crate::commands::{CloudSource, Output};
use crate::io::{to_value, write_text, CliError, CliResult, Envelope, SCHEMA};

#[derive(Parser, Serialize)]
#[command(name = "hypcircle", version, about = "Circle dynamics on the boundary of hyperbolic 3-space")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Serialize)]
struct Global {
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance table: `default` or `strict`.
    #[arg(long, global = true, default_value = "default")]
    tol_profile: String,
    /// Output path for the JSON document (stdout when absent).
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Also write an SVG figure of the result here.
    #[arg(long, global = true)]
    #[serde(skip)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Synthetic carpets and their family modulus.
    #[command(subcommand)]
    Carpet(CarpetCmd),
    /// Greedy bridge extraction on circular slices.
    #[command(subcommand)]
    Slice(SliceCmd),
    /// Moduli of round rings and two-arc complements.
    #[command(subcommand)]
    Modulus(ModulusCmd),
    /// Thickness certification.
    #[command(subcommand)]
    Thick(ThickCmd),
    /// Kleinian group computations.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Horocycle return times and RF_k certificates.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Numerical experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// SVG figure of a JSON artifact.
    Render(RenderArgs),
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CarpetCmd {
    Synth(SynthArgs),
    Modulus(CarpetModulusArgs),
}

#[derive(Args, Serialize)]
struct SynthArgs {
    #[arg(long, default_value = "grid")]
    style: CarpetStyle,
    #[arg(long, default_value_t = 2)]
    depth: u32,
    #[arg(long, default_value_t = 0.3)]
    gap: f64,
}

#[derive(Args, Serialize)]
struct CarpetModulusArgs {
    #[arg(long)]
    carpet: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pair_budget: usize,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SliceCmd {
    Extract(ExtractArgs),
    Verify(VerifyArgs),
}

#[derive(Args, Serialize)]
struct ExtractArgs {
    #[arg(long)]
    carpet: Option<PathBuf>,
    #[arg(long)]
    circle: Option<PathBuf>,
    /// A labeled gap system, instead of `--carpet` and `--circle`.
    #[arg(long)]
    gaps: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    max_bridges: usize,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pair_budget: usize,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModulusCmd {
    Ring {
        #[arg(long)]
        disks: PathBuf,
    },
    Arcs {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ThickCmd {
    Check {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        global: bool,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GroupCmd {
    LimitSet {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value = "fixed-points")]
        method: LimitMethod,
    },
    OrbitCircle {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        circle: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long)]
        unoriented: bool,
    },
    Stabilizer {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        circle: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Circle distance below which a word stabilizes; defaults to the profile's circle-merge tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args, Serialize)]
struct CloudArgs {
    #[arg(long)]
    group: Option<PathBuf>,
    /// A stored limit-set cloud, instead of `--group`.
    #[arg(long)]
    cloud: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long, default_value = "fixed-points")]
    method: LimitMethod,
    #[arg(long)]
    frame: PathBuf,
    #[arg(long, default_value_t = 100.0)]
    window: f64,
    #[arg(long, default_value_t = 1e-3)]
    eta: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
}

impl CloudArgs {
    fn source(&self) -> CloudSource<'_> {
        CloudSource {
            group: self.group.as_deref(),
            cloud: self.cloud.as_deref(),
            max_len: self.max_len,
            method: self.method,
        }
    }
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FlowCmd {
    ReturnTimes(CloudArgs),
    Rfk {
        #[command(flatten)]
        #[serde(flatten)]
        cloud: CloudArgs,
        #[arg(long)]
        k: f64,
        /// Carpet whose slice along the horocycle circle supplies a Cantor candidate.
        #[arg(long)]
        carpet: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        stop_eps: f64,
        #[arg(long, default_value_t = 120)]
        max_bridges: usize,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExperimentCmd {
    OrbitDensity {
        #[arg(long)]
        group: PathBuf,
        /// Number of seed circles.
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        /// Number of fixed test circles.
        #[arg(long, default_value_t = 200)]
        tests: usize,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
}

#[derive(Args, Serialize)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Carpet(CarpetCmd::Synth(_)) => "carpet synth",
        Cmd::Carpet(CarpetCmd::Modulus(_)) => "carpet modulus",
        Cmd::Slice(SliceCmd::Extract(_)) => "slice extract",
        Cmd::Slice(SliceCmd::Verify(_)) => "slice verify",
        Cmd::Modulus(ModulusCmd::Ring { .. }) => "modulus ring",
        Cmd::Modulus(ModulusCmd::Arcs { .. }) => "modulus arcs",
        Cmd::Thick(_) => "thick check",
        Cmd::Group(GroupCmd::LimitSet { .. }) => "group limit-set",
        Cmd::Group(GroupCmd::OrbitCircle { .. }) => "group orbit-circle",
        Cmd::Group(GroupCmd::Stabilizer { .. }) => "group stabilizer",
        Cmd::Flow(FlowCmd::ReturnTimes(_)) => "flow return-times",
        Cmd::Flow(FlowCmd::Rfk { .. }) => "flow rfk",
        Cmd::Experiment(_) => "experiment orbit-density",
        Cmd::Render(_) => "render",
    }
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> CliResult<Output> {
    let seed = cli.global.seed;
    match &cli.cmd {
        Cmd::Carpet(CarpetCmd::Synth(a)) => commands::carpet_synth(a.style, a.depth, a.gap),
        Cmd::Carpet(CarpetCmd::Modulus(a)) => commands::carpet_modulus(&a.carpet, a.pair_budget),
        Cmd::Slice(SliceCmd::Extract(a)) => commands::slice_extract(
            a.carpet.as_deref(),
            a.circle.as_deref(),
            a.gaps.as_deref(),
            StopRule { eps: a.eps, max_bridges: a.max_bridges },
        ),
        Cmd::Slice(SliceCmd::Verify(a)) => commands::slice_verify(&a.input, a.pair_budget),
        Cmd::Modulus(ModulusCmd::Ring { disks }) => commands::modulus_ring(disks),
        Cmd::Modulus(ModulusCmd::Arcs { config }) => commands::modulus_arcs(config),
        Cmd::Thick(ThickCmd::Check { set, k, global }) => commands::thick_check(set, *k, *global),
        Cmd::Group(GroupCmd::LimitSet { group, max_len, method }) => {
            commands::group_limit_set(group, *max_len, *method, tol)
        }
        Cmd::Group(GroupCmd::OrbitCircle { group, circle, max_len, unoriented }) => {
            commands::group_orbit_circle(group, circle, *max_len, *unoriented, tol)
        }
        Cmd::Group(GroupCmd::Stabilizer { group, circle, max_len, tol: t }) => {
            commands::group_stabilizer(group, circle, *max_len, t.unwrap_or(tol.circle_merge))
        }
        Cmd::Flow(FlowCmd::ReturnTimes(a)) => {
            commands::flow_return_times(&a.source(), &a.frame, a.window, a.eta, a.eps, tol)
        }
        Cmd::Flow(FlowCmd::Rfk { cloud, k, carpet, stop_eps, max_bridges }) => {
            let params = RfkParams {
                window: cloud.window,
                eta: cloud.eta,
                eps: cloud.eps,
                stop: StopRule { eps: *stop_eps, max_bridges: *max_bridges },
            };
            commands::flow_rfk(&cloud.source(), &cloud.frame, *k, params, carpet.as_ref(), tol)
        }
        Cmd::Experiment(ExperimentCmd::OrbitDensity { group, seeds, tests, max_len }) => {
            commands::orbit_density(group, *seeds, *tests, *max_len, seed, tol)
        }
        Cmd::Render(_) => unreachable!("render writes SVG directly"),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let tol = Tolerances::by_name(&cli.global.tol_profile).ok_or_else(|| {
        CliError::validation("InvalidParams", format!("unknown tolerance profile {:?}", cli.global.tol_profile))
    })?;
    if let Cmd::Render(a) = &cli.cmd {
        let svg = commands::render_input(&a.input)?;
        let target = cli.global.svg.as_deref().or(cli.global.out.as_deref());
        return write_text(target, svg.trim_end());
    }
    let out = dispatch(cli, &tol)?;
    let command = command_name(&cli.cmd);
    let params = to_value(cli)?;
    let doc = Envelope { schema: SCHEMA, command, params: &params, result: out.result };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError { code: "Serialize".into(), message: e.to_string(), exit: io::EXIT_NUMERIC })?;
    write_text(cli.global.out.as_deref(), &text)?;
    if let Some(path) = &cli.global.svg {
        let art = out
            .figure
            .ok_or_else(|| CliError::validation("UnknownArtifactKind", format!("{command} has no figure")))?;
        write_text(Some(path), render::render(&art).trim_end())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let err = CliError::validation("Usage", e.to_string().trim_end());
                eprintln!("{}", err.to_json());
                return ExitCode::from(io::EXIT_VALIDATION as u8);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit as u8)
        }
    }
}

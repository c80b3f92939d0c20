mod artifacts;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gmt_core::bigrecon::ReconMode;
use gmt_core::geometry::{builtin, load_geometry, GeometryInput};
use gmt_core::ifunction::LambdaMode;
use gmt_core::pipeline::{parse_stages, run, Artifacts, RunConfig, Stage};
use gmt_core::{Error, Rational, Result};

/// Exact generalized mirror transformations for toric complete intersections.
#[derive(Parser)]
#[command(name = "gmt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The twisted I-function.
    Ifunction(Common),
    /// The small connection `A_a` extracted from the I-function frame.
    Connection {
        #[command(flatten)]
        common: Common,
        /// Also emit the Picard–Fuchs oracle column (projective spaces only).
        #[arg(long)]
        oracle: bool,
    },
    /// Birkhoff factorization, the ħ-free connection and the canonical J.
    Canonical(Common),
    /// The big connection over the t-directions.
    Reconstruct(Common),
    /// Mirror map and quantum products in flat coordinates.
    Products {
        #[command(flatten)]
        common: Common,
        /// Also report the mirror-map locus.
        #[arg(long)]
        locus: bool,
    },
    /// Three-point functions of the hypersurface (Picard rank one).
    Gw(Common),
    /// Several stages at once.
    Run {
        #[command(flatten)]
        common: Common,
        /// `all` or a comma-separated list of stages.
        #[arg(long, default_value = "all")]
        stages: String,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        locus: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Geometry file, or `builtin:P<n>[/O(k1),O(k2),…]`.
    geometry: String,
    /// Novikov truncation order D.
    #[arg(long, default_value_t = 6)]
    q_order: u32,
    /// Total t-degree N_t of the big connection.
    #[arg(long, default_value_t = 5)]
    t_order: u32,
    /// Comma-separated Novikov weights, one per variable.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value = "zero")]
    lambda: String,
    #[arg(long, default_value = "reduced")]
    mode: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write one file per stage into this directory, reusing matching
    /// artifacts already there.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Common {
    fn config(&self, stages: Vec<Stage>, oracle: bool, locus: bool) -> Result<RunConfig> {
        let weights = self
            .weights
            .as_deref()
            .map(|w| {
                w.split(',')
                    .map(|x| x.trim().parse::<u32>().map_err(|_| config_error(format!("bad weight {x:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(RunConfig {
            q_order: self.q_order,
            t_order: self.t_order,
            weights,
            lambda: self.lambda.parse::<LambdaMode>()?,
            mode: self.mode.parse::<ReconMode>()?,
            stages,
            oracle,
            locus,
        })
    }
}

fn load(spec: &str) -> Result<GeometryInput<Rational>> {
    if spec.starts_with("builtin:") {
        return builtin(spec);
    }
    let text = fs::read_to_string(spec).map_err(|e| config_error(format!("cannot read {spec}: {e}")))?;
    load_geometry(&text)
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Text => "txt",
        Format::Csv => "csv",
    }
}

fn render(stage: Stage, f: Format, geom: &GeometryInput<Rational>, config: &RunConfig, art: &Artifacts<Rational>) -> Result<Option<String>> {
    Ok(match f {
        Format::Json => artifacts::encode(stage, geom, config, art)?
            .map(|v| serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n"),
        Format::Text => Some(report::text_table(&report::rows(stage, art))),
        Format::Csv => Some(report::csv_table(&report::rows(stage, art)).map_err(|e| Error::Invariant(e.to_string()))?),
    })
}

/// Earlier artifacts in `dir` that match the configuration.
fn resume(dir: &Path, geom: &GeometryInput<Rational>, config: &RunConfig) -> Result<Artifacts<Rational>> {
    let mut art = Artifacts::default();
    for stage in Stage::ALL {
        if config.stages.contains(&stage) {
            continue;
        }
        let Ok(text) = fs::read_to_string(dir.join(format!("{}.json", stage.name()))) else { continue };
        let Ok(doc) = serde_json::from_str::<Value>(&text) else { continue };
        artifacts::absorb(&doc, geom, config, &mut art)?;
    }
    Ok(art)
}

fn execute(common: &Common, config: RunConfig) -> Result<()> {
    let geom = load(&common.geometry)?;
    let seed = match &common.out {
        Some(dir) => resume(dir, &geom, &config)?,
        None => Artifacts::default(),
    };
    let art = run(&geom, &config, seed)?;
    let mut stdout = String::new();
    for &stage in &config.stages {
        let Some(text) = render(stage, common.format, &geom, &config, &art)? else { continue };
        match &common.out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| config_error(format!("cannot create {}: {e}", dir.display())))?;
                let path = dir.join(format!("{}.{}", stage.name(), extension(common.format)));
                fs::write(&path, text).map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))?;
            }
            None => {
                if config.stages.len() > 1 && !matches!(common.format, Format::Json) {
                    stdout.push_str(&format!("# {stage}\n"));
                }
                stdout.push_str(&text);
            }
        }
    }
    print!("{stdout}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let single = |common: &Common, stage: Stage, oracle: bool, locus: bool| -> Result<()> {
        execute(common, common.config(vec![stage], oracle, locus)?)
    };
    match &cli.command {
        Command::Ifunction(c) => single(c, Stage::IFunction, false, false),
        Command::Connection { common, oracle } => single(common, Stage::Connection, *oracle, false),
        Command::Canonical(c) => single(c, Stage::Canonical, false, false),
        Command::Reconstruct(c) => single(c, Stage::Reconstruct, false, false),
        Command::Products { common, locus } => single(common, Stage::Products, false, *locus),
        Command::Gw(c) => single(c, Stage::Gw, false, false),
        Command::Run { common, stages, oracle, locus } => {
            execute(common, common.config(parse_stages(stages)?, *oracle, *locus)?)
        }
    }
}

fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let diag = json!({"error": error_kind(&e), "message": e.to_string(), "exit_code": code});
            eprintln!("{diag}");
            ExitCode::from(code as u8)
        }
    }
}

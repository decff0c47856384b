//! Batch front end: JSON in, machine-readable [`RunReport`] out.
//!
//! Every subcommand prints one report on stdout. Exit codes are 0 for
//! `pass`, 1 for `fail`, 2 for malformed input (message on stderr, no
//! report) and 3 for `refused`. Arguments that take JSON accept it inline
//! when the text starts with `{` or `[`, and otherwise read it from a file.

mod commands;
mod report;
mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scale::Scale;

pub use report::{canonical, digest, Body, Outcome, RunReport, Timer};
pub use svg::render_cover;

#[derive(Parser, Debug)]
#[command(name = "coarsekit", version, about = "Finite-window coarse geometry checks")]
pub struct Cli {
    /// Worker threads for parallel scans (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Search budget of the colouring oracle.
    #[arg(long, global = true)]
    pub max_search: Option<u64>,
    /// JSON file with defaults for threads, max_search, sweep_density, max_doublings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add wall-clock timings to the report.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify a colouring, or search for one, bounding monochrome r-components by d.
    AsdimWitness(AsdimArgs),
    /// Build the perturbed-star cover of a planar or linear window for a set.
    CoverBuild(CoverArgs),
    /// Decide smallness of a set at the given scales.
    SmallCheck(SmallArgs),
    /// Check the star-nearness claims and the Lipschitz sweep on dense grids.
    ClaimsVerify(ClaimsArgs),
    /// Word-metric balls of preset groups.
    Cayley {
        #[command(subcommand)]
        action: CayleyCommand,
    },
    /// Draw a cover-build artifact.
    RenderSvg(RenderArgs),
}

#[derive(Args, Debug)]
pub struct AsdimArgs {
    /// Window spec JSON.
    #[arg(long)]
    pub window: String,
    /// Restrict the colouring to these core points.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long)]
    pub r: Scale,
    /// Colours are 0..=n.
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: Scale,
    /// Colouring JSON to verify instead of searching.
    #[arg(long)]
    pub coloring: Option<String>,
    /// Where to write the witness colouring.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    #[arg(long)]
    pub window: String,
    /// Point set JSON (integer numerator tuples).
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub delta: Scale,
    /// φ table JSON: `[[δ, φ], ...]`.
    #[arg(long)]
    pub phi: Option<String>,
    /// Fill a missing φ(Lδ) by a witness search up to this bound.
    #[arg(long)]
    pub phi_max: Option<Scale>,
    /// Cover artifact JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG drawing; the artifact goes next to it unless --out is given.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SmallArgs {
    #[arg(long)]
    pub window: String,
    #[arg(long)]
    pub set: String,
    /// Comma-separated scales.
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta: Vec<Scale>,
    /// Defaults to the margin minus the largest δ.
    #[arg(long)]
    pub phi_max: Option<Scale>,
    #[arg(long)]
    pub expect: Option<Expectation>,
    /// Where to write the verdict with its φ table or certificate.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Small,
    NotSmall,
}

impl Expectation {
    fn label(self) -> &'static str {
        match self {
            Expectation::Small => "small-at-tested-scales",
            Expectation::NotSmall => "not-small",
        }
    }
}

#[derive(Args, Debug)]
pub struct ClaimsArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1")]
    pub eps: Vec<Scale>,
    /// Denominator of the probe grid over the simplex.
    #[arg(long, default_value_t = 100)]
    pub density: u32,
    #[arg(long)]
    pub sweep_density: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum CayleyCommand {
    /// Ball sizes by radius, against closed forms where known.
    Ball {
        /// `Z^n`, `F_k` or `lamplighter(m)`.
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallness of a subgroup inside a ball.
    Small(CayleySmallArgs),
    /// Carry a colouring to a translate of a connected set.
    Transfer(CayleyTransferArgs),
}

#[derive(Args, Debug)]
pub struct CayleySmallArgs {
    #[arg(long)]
    pub group: String,
    /// JSON list of subgroup generators.
    #[arg(long)]
    pub sub: String,
    #[arg(long)]
    pub radius: u64,
    #[arg(long)]
    pub margin: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta: Vec<Scale>,
    #[arg(long)]
    pub phi_max: Option<Scale>,
    /// Also compare the oracle on the subgroup and the whole core at (r, n, d).
    #[arg(long, requires_all = ["n", "d"])]
    pub r: Option<Scale>,
    #[arg(long, requires = "r")]
    pub n: Option<u32>,
    #[arg(long, requires = "r")]
    pub d: Option<Scale>,
    #[arg(long)]
    pub expect: Option<Expectation>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CayleyTransferArgs {
    #[arg(long)]
    pub group: String,
    /// Radius of the target ball.
    #[arg(long)]
    pub radius: u64,
    /// Radius of the ball the colouring lives on; defaults to --radius.
    #[arg(long)]
    pub source_radius: Option<u64>,
    #[arg(long)]
    pub coloring: String,
    /// JSON list of elements of the target set.
    #[arg(long)]
    pub set: String,
    /// Base point, as an element in JSON (a bare word is read as a string).
    #[arg(long)]
    pub x0: String,
    #[arg(long)]
    pub r: Scale,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Artifact written by cover-build.
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub svg: PathBuf,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    threads: Option<usize>,
    max_search: Option<u64>,
    sweep_density: Option<u32>,
    max_doublings: Option<u32>,
}

/// Resolved configuration; flags override the config file.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub max_search: u64,
    pub sweep_density: u32,
    pub max_doublings: u32,
    pub timings: bool,
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<(Settings, Option<usize>)> {
        let file = match &cli.config {
            Some(p) => serde_json::from_value::<ConfigFile>(commands::read_json_file(p)?)
                .map_err(|e| Error::Input(format!("bad config {}: {e}", p.display())))?,
            None => ConfigFile::default(),
        };
        let oracle = crate::coloring::OracleConfig::default();
        let cover = crate::triangulation::CoverConfig::default();
        let s = Settings {
            max_search: cli.max_search.or(file.max_search).unwrap_or(oracle.max_search),
            sweep_density: file.sweep_density.unwrap_or(cover.sweep_density),
            max_doublings: file.max_doublings.unwrap_or(cover.max_doublings),
            timings: cli.timings,
        };
        Ok((s, cli.threads.or(file.threads)))
    }
}

/// Run a parsed command line.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let (settings, threads) = Settings::resolve(cli)?;
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Input("--threads must be positive".into()));
        }
        // a second call in one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    commands::dispatch(&cli.command, &settings)
}

/// Parse `args`, run, print the report and return the exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(report) => {
            use std::io::Write;
            // a closed pipe downstream is not an error of the run
            let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json_string());
            report.outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

//! The `shotflow` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 infeasible model.

mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::allocator::{grid_oracle, AllocError, Lineup5, SolveReport, LINEUP_SIZE};
use crate::behavior::{fit_profile, BehaviorError, ShootingProfile};
use crate::ingest::{self, filter_group, GroupCriterion, GroupKind, PlayerGameMetrics};
use crate::lineups::{evaluate_group, LineupError};
use crate::numfmt::{self, fixed};
use crate::strategies::{compare, BraessOutcome, Comparison, StrategyError, TwoLinkNetwork};

pub use config::{RunConfig, DEFAULT_GRID_STEP, DEFAULT_ROSTER_THRESHOLD, DEFAULT_STARTERS_THRESHOLD};

/// Environment variable consulted when `--config` is absent.
pub const CONFIG_ENV: &str = "SHOTFLOW_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Alloc(AllocError::InfeasibleLineup { .. }) => CliError::Infeasible(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<LineupError> for CliError {
    fn from(e: LineupError) -> Self {
        match e {
            LineupError::Strategy(s) => s.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "shotflow", version, about = "Fit usage curves and optimize lineup shot shares")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Per-player ceiling on the share of team shots
    #[arg(long, global = true)]
    pub shot_cap: Option<f64>,
    /// Weight of a free-throw attempt in true shooting
    #[arg(long, global = true)]
    pub ft_weight: Option<f64>,
    /// Length of a regulation game in minutes
    #[arg(long, global = true)]
    pub regulation_minutes: Option<f64>,
    /// Usable games required to fit a profile
    #[arg(long, global = true)]
    pub min_games_fit: Option<usize>,
    /// Starts required for the starters group
    #[arg(long, global = true)]
    pub starters_threshold: Option<u32>,
    /// Games played required for the roster group
    #[arg(long, global = true)]
    pub roster_threshold: Option<u32>,
    /// Lattice step of the grid oracle used by --verify
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(shot_cap, ft_weight, regulation_minutes, min_games_fit, starters_threshold, roster_threshold, grid_step);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupFlag {
    Starters,
    Roster,
}

impl From<GroupFlag> for GroupKind {
    fn from(g: GroupFlag) -> Self {
        match g {
            GroupFlag::Starters => GroupKind::Starters,
            GroupFlag::Roster => GroupKind::Roster,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse game logs and write per-game TS% and FTS.
    Ingest { logs: PathBuf },
    /// Fit one shooting profile per player from a metrics file.
    Fit { metrics: PathBuf },
    /// Compare every strategy on one five-player lineup.
    Compare {
        profiles: PathBuf,
        /// Five player ids, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        players: Vec<String>,
        /// Also run the grid oracle and report its payoff.
        #[arg(long)]
        verify: bool,
    },
    /// Evaluate every five-player lineup of a group.
    Enumerate {
        profiles: PathBuf,
        #[arg(long, value_enum, default_value = "roster")]
        group: GroupFlag,
        /// Game logs used to select the group; without them every profiled
        /// player is in the group.
        #[arg(long)]
        logs: Option<PathBuf>,
        /// Per-lineup CSV (`lineup,strategy,payoff,feasible`).
        #[arg(long)]
        lineups_csv: Option<PathBuf>,
    },
    /// Two-link routing demonstration.
    Braess {
        #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
        agents: i64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        highway: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        coeff: f64,
    },
    /// Print the effective configuration as TOML.
    Config,
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    cfg.validate().map_err(CliError::Input)?;
    Ok(cfg)
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    let output = match &cli.command {
        Command::Ingest { logs } => cmd_ingest(logs, &cfg, stderr)?,
        Command::Fit { metrics } => cmd_fit(metrics, &cfg, stderr)?,
        Command::Compare { profiles, players, verify } => {
            cmd_compare(profiles, players, *verify, cli.format, &cfg, stderr)?
        }
        Command::Enumerate { profiles, group, logs, lineups_csv } => {
            cmd_enumerate(profiles, *group, logs.as_deref(), lineups_csv.as_deref(), cli.format, &cfg)?
        }
        Command::Braess { agents, highway, coeff } => cmd_braess(*agents, *highway, *coeff, cli.format)?,
        Command::Config => cfg.to_toml(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, output).map_err(|e| CliError::io(path, e)),
        None => stdout.write_all(output.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn json<T: Serialize>(value: &T) -> String {
    numfmt::to_json(value).expect("report serializes")
}

fn note(stderr: &mut dyn Write, msg: impl std::fmt::Display) {
    let _ = writeln!(stderr, "{msg}");
}

pub fn cmd_ingest(logs: &Path, cfg: &RunConfig, stderr: &mut dyn Write) -> Result<String, CliError> {
    let bytes = read(logs)?;
    let rows =
        ingest::parse_game_logs(bytes.as_slice()).map_err(|e| CliError::Input(format!("{}: {e}", logs.display())))?;
    let out = cfg.metrics().compute_metrics(&rows).map_err(|e| CliError::Input(e.to_string()))?;

    let mut by_reason: BTreeMap<ingest::SkipReason, usize> = BTreeMap::new();
    for s in &out.skipped {
        *by_reason.entry(s.reason).or_default() += 1;
    }
    let detail: Vec<String> =
        by_reason.iter().map(|(r, n)| format!("{}: {n}", serde_json::to_value(r).unwrap().as_str().unwrap())).collect();
    note(
        stderr,
        format_args!(
            "ingested {} rows, {} metrics, skipped {} ({})",
            rows.len(),
            out.metrics.len(),
            out.skipped.len(),
            detail.join(", ")
        ),
    );
    Ok(json(&out.metrics))
}

pub fn cmd_fit(metrics: &Path, cfg: &RunConfig, stderr: &mut dyn Write) -> Result<String, CliError> {
    let bytes = read(metrics)?;
    let rows: Vec<PlayerGameMetrics> =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", metrics.display())))?;
    let mut samples: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for m in &rows {
        if !(m.ts_pct >= 0.0 && m.fts >= 0.0) {
            return Err(CliError::Input(format!("negative metric for {} in {}", m.player_id, m.game_id)));
        }
        samples.entry(m.player_id.as_str()).or_default().push((m.fts, m.ts_pct));
    }

    let mut profiles = Vec::new();
    for (player, s) in &samples {
        match fit_profile(player, s, cfg.min_games_fit) {
            Ok(p) => {
                if p.is_non_decreasing() {
                    note(stderr, format_args!("note: {player} has non-negative slope {}", fixed(p.slope)));
                }
                profiles.push(p);
            }
            Err(e @ (BehaviorError::InsufficientSamples { .. } | BehaviorError::DegenerateFit { .. })) => {
                note(stderr, format_args!("skipped: {e}"));
            }
            Err(e) => return Err(CliError::Input(e.to_string())),
        }
    }
    if profiles.is_empty() {
        return Err(CliError::Input(format!(
            "no player has at least {} usable games with varying usage",
            cfg.min_games_fit
        )));
    }
    note(stderr, format_args!("fitted {} of {} players", profiles.len(), samples.len()));
    Ok(json(&profiles))
}

pub fn load_profiles(path: &Path) -> Result<BTreeMap<String, ShootingProfile>, CliError> {
    let bytes = read(path)?;
    let list: Vec<ShootingProfile> =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for p in list {
        p.validate().map_err(|e| CliError::Input(e.to_string()))?;
        if map.contains_key(&p.player_id) {
            return Err(CliError::Input(format!("duplicate profile for `{}`", p.player_id)));
        }
        map.insert(p.player_id.clone(), p);
    }
    Ok(map)
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    players: &'a [String],
    #[serde(flatten)]
    comparison: &'a Comparison,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
}

#[derive(Serialize)]
struct OracleCheck {
    #[serde(serialize_with = "numfmt::ser_f64")]
    step: f64,
    report: SolveReport,
    #[serde(serialize_with = "numfmt::ser_f64")]
    gap: f64,
}

pub fn cmd_compare(
    profiles: &Path,
    players: &[String],
    verify: bool,
    format: Format,
    cfg: &RunConfig,
    stderr: &mut dyn Write,
) -> Result<String, CliError> {
    let table = load_profiles(profiles)?;
    if players.len() != LINEUP_SIZE {
        return Err(CliError::Input(format!("need exactly {LINEUP_SIZE} players, got {}", players.len())));
    }
    if players.iter().collect::<BTreeSet<_>>().len() != LINEUP_SIZE {
        return Err(CliError::Input("players must be distinct".into()));
    }
    let mut lineup = Vec::with_capacity(LINEUP_SIZE);
    for id in players {
        let p = table.get(id).ok_or_else(|| CliError::Input(format!("unknown player `{id}`")))?;
        lineup.push(p.clone());
    }
    let lineup: Lineup5 = lineup.try_into().expect("five profiles");
    let limits = cfg.limits();
    let comparison = compare(&lineup, &limits)?;

    let oracle = if verify {
        let report = grid_oracle(&lineup, cfg.grid_step, &limits).map_err(|e| CliError::Input(e.to_string()))?;
        let gap = comparison.optimal.payoff - report.payoff;
        Some(OracleCheck { step: cfg.grid_step, report, gap })
    } else {
        None
    };

    match format {
        Format::Json => Ok(json(&CompareOutput { players, comparison: &comparison, oracle })),
        Format::Csv => {
            if let Some(poa) = &comparison.poa {
                note(
                    stderr,
                    format_args!(
                        "price of anarchy: ratio {}, difference {}",
                        poa.ratio.map_or("undefined".to_string(), fixed),
                        fixed(poa.difference)
                    ),
                );
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["strategy", "payoff", "feasible", "x1", "x2", "x3", "x4", "x5"]).unwrap();
            for r in &comparison.reports {
                let mut rec = vec![r.strategy.name().to_string(), fixed(r.payoff), r.feasible.to_string()];
                rec.extend(r.allocation.0.iter().map(|x| fixed(*x)));
                w.write_record(&rec).unwrap();
            }
            Ok(String::from_utf8(w.into_inner().unwrap()).unwrap())
        }
    }
}

pub fn cmd_enumerate(
    profiles: &Path,
    group: GroupFlag,
    logs: Option<&Path>,
    lineups_csv: Option<&Path>,
    format: Format,
    cfg: &RunConfig,
) -> Result<String, CliError> {
    let table = load_profiles(profiles)?;
    let kind = GroupKind::from(group);
    let members: BTreeSet<String> = match logs {
        Some(path) => {
            let rows = ingest::parse_game_logs(read(path)?.as_slice())
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let threshold = match kind {
                GroupKind::Starters => cfg.starters_threshold,
                GroupKind::Roster => cfg.roster_threshold,
            };
            let criterion = GroupCriterion::new(kind, threshold).expect("validated threshold");
            filter_group(&rows, criterion)
        }
        None => table.keys().cloned().collect(),
    };
    let eval = evaluate_group(&kind.to_string(), &table, &members, &cfg.limits())?;

    let lineup_table = || {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lineup", "strategy", "payoff", "feasible"]).unwrap();
        for r in &eval.records {
            w.write_record([r.lineup.label(), r.strategy.name().to_string(), fixed(r.payoff), r.feasible.to_string()])
                .unwrap();
        }
        w.into_inner().unwrap()
    };
    if let Some(path) = lineups_csv {
        std::fs::write(path, lineup_table()).map_err(|e| CliError::io(path, e))?;
    }
    match format {
        Format::Json => Ok(json(&eval.summary)),
        Format::Csv => Ok(String::from_utf8(lineup_table()).unwrap()),
    }
}

pub fn cmd_braess(agents: i64, highway: f64, coeff: f64, format: Format) -> Result<String, CliError> {
    let n = u32::try_from(agents).map_err(|_| CliError::Input(format!("agents must be positive, got {agents}")))?;
    let net = TwoLinkNetwork::new(n, highway, coeff).map_err(|e| CliError::Input(e.to_string()))?;
    let outcome = BraessOutcome::run(&net);
    match format {
        Format::Json => Ok(json(&outcome)),
        Format::Csv => Ok(format!(
            "n_agents,equilibrium_lane_agents,equilibrium_total_cost,optimal_lane_agents,optimal_total_cost,ratio\n{},{},{},{},{},{}\n",
            outcome.n_agents,
            outcome.equilibrium.lane_agents,
            fixed(outcome.equilibrium.total_cost),
            outcome.optimal_lane_agents,
            fixed(outcome.optimal_total_cost),
            outcome.poa.ratio.map_or(String::new(), fixed),
        )),
    }
}

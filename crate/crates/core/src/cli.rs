//! `herald` command-line front end.
//!
//! Exit codes: 0 on success, 1 when an input file or output sink fails, 2 for
//! usage and domain errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::model::{
    loss_budget, source_comparison, switched_array_emission, LossModel, MultiplexConfig,
};
use crate::sim::{
    run_delay_multiplexed, run_switched_array, SimulationEstimate, SimulationSpec, DEFAULT_TRIALS,
};
use crate::stats::StatisticsKind;
use crate::sweep::{
    emit_plot, emit_table, format_sig, run_sweep, PlotGrouping, Quantity, SweepRow, SweepSpec,
    SweepTarget, TableFormat,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "herald",
    version,
    about = "Single-photon certifications and Monte Carlo checks for delay-multiplexed heralded photon sources"
)]
pub struct Cli {
    /// Print JSON (fields nbar, eta, nd, delay, quantity, analytic, mc_estimate, mc_stderr).
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-delay certifications, occurrence probabilities and aggregates.
    Certify(CertifyArgs),
    /// Regenerate figure data or sweep a custom grid.
    Sweep(SweepArgs),
    /// Monte Carlo run of the delay-multiplexed trigger or the switched array.
    Simulate(SimulateArgs),
    /// Single-photon fractions of faint laser, conventional and multiplexed sources.
    Compare(CompareArgs),
    /// Net transmittance and loss of a chain of optical surfaces.
    Loss(LossArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "bose-einstein", alias = "be")]
    BoseEinstein,
    Poisson,
}

impl From<KindArg> for StatisticsKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::BoseEinstein => StatisticsKind::BoseEinstein,
            KindArg::Poisson => StatisticsKind::Poisson,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Mean photon pairs per pump pulse over the whole system.
    #[arg(long, default_value_t = 1.0, value_parser = parse_mean)]
    pub nbar: f64,
    /// Trigger detector quantum efficiency.
    #[arg(long, default_value_t = 1.0, value_parser = parse_efficiency)]
    pub eta: f64,
    /// Number of delay paths (modes).
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub nd: u32,
    /// Photon-number statistics of each mode.
    #[arg(long, value_enum, default_value_t = KindArg::BoseEinstein)]
    pub kind: KindArg,
}

impl ConfigArgs {
    fn config(&self) -> Result<MultiplexConfig> {
        MultiplexConfig::new(self.nbar, self.eta, self.nd, self.kind.into())
    }
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Report a single delay (1..=nd) instead of all of them.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub delay: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Custom,
}

impl From<TargetArg> for SweepTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Fig3a => SweepTarget::Fig3a,
            TargetArg::Fig3b => SweepTarget::Fig3b,
            TargetArg::Fig4 => SweepTarget::Fig4,
            TargetArg::Fig5 => SweepTarget::Fig5,
            TargetArg::Custom => SweepTarget::Custom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Pretty,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub target: TargetArg,
    /// Comma-separated system mean photon numbers (default: the target's grid).
    #[arg(long, value_delimiter = ',', value_parser = parse_mean)]
    pub nbar: Vec<f64>,
    /// Comma-separated detector efficiencies (default: the target's grid).
    #[arg(long, value_delimiter = ',', value_parser = parse_efficiency)]
    pub eta: Vec<f64>,
    /// Comma-separated numbers of delays (default: 1..=8).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    pub nd: Vec<u32>,
    #[arg(long, value_enum, default_value_t = KindArg::BoseEinstein)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Attach Monte Carlo estimates to every row.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Delay,
    Array,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Delay)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Transmittance of the switch network (array mode).
    #[arg(long, default_value_t = 1.0, value_parser = parse_transmittance)]
    pub switch_transmittance: f64,
    /// Transmittance of the remaining output optics (array mode).
    #[arg(long, default_value_t = 1.0, value_parser = parse_transmittance)]
    pub output_transmittance: f64,
    /// Extra output surface, `T` or `T:COUNT`; repeatable, multiplies into the output transmittance.
    #[arg(long = "surface", value_parser = parse_surface)]
    pub surfaces: Vec<Surfaces>,
    #[arg(long, value_enum, default_value_t = FormatArg::Pretty)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 1.0, value_parser = parse_mean)]
    pub nbar: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_efficiency)]
    pub eta: f64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub nd: u32,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Surface transmittance, `T` or `T:COUNT` for COUNT identical surfaces; repeatable.
    #[arg(long = "surface", value_parser = parse_surface)]
    pub surfaces: Vec<Surfaces>,
    /// File with one `T` or `T:COUNT` per line; `#` starts a comment.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

/// `count` surfaces of one transmittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surfaces {
    pub transmittance: f64,
    pub count: usize,
}

fn parse_mean(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err("must be a finite number >= 0".into())
    }
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err("must be in [0, 1]".into())
    }
}

fn parse_efficiency(s: &str) -> std::result::Result<f64, String> {
    parse_unit(s)
}

fn parse_transmittance(s: &str) -> std::result::Result<f64, String> {
    parse_unit(s)
}

fn parse_surface(s: &str) -> std::result::Result<Surfaces, String> {
    let (t, count) = match s.split_once(':') {
        Some((t, n)) => (
            t,
            n.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{n}` is not a surface count"))?,
        ),
        None => (s, 1),
    };
    Ok(Surfaces {
        transmittance: parse_unit(t.trim())?,
        count,
    })
}

fn expand(surfaces: &[Surfaces]) -> Vec<f64> {
    surfaces
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.transmittance, s.count))
        .collect()
}

fn read_surface_file(path: &PathBuf) -> Result<Vec<Surfaces>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter_map(|(k, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then(|| {
                parse_surface(line).map_err(|e| {
                    Error::Parse(format!("{}:{}: {e}", path.display(), k + 1))
                })
            })
        })
        .collect()
}

/// Parse `args` (including the program name) and execute. Output goes to
/// `stdout` unless a subcommand writes a file; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) if e.is_broken_pipe() => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_USAGE
            }
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Certify(a) => certify(a, cli.json, stdout),
        Command::Sweep(a) => sweep(a, cli.json, stdout),
        Command::Simulate(a) => simulate(a, cli.json, stdout),
        Command::Compare(a) => compare(a, cli.json, stdout),
        Command::Loss(a) => loss(a, cli.json, stdout),
    }
}

/// Rows describing one configuration, optionally restricted to one delay.
pub fn certification_rows(cfg: &MultiplexConfig, delay: Option<u32>) -> Result<Vec<SweepRow>> {
    let delays: Vec<u32> = match delay {
        Some(i) => {
            // validate the index even when the certification itself is undefined
            cfg.delay_fire_prob(i)?;
            vec![i]
        }
        None => (1..=cfg.num_delays()).collect(),
    };
    let mut rows = Vec::new();
    for &i in &delays {
        if let Ok(c) = cfg.certification(i) {
            rows.push(SweepRow::new(cfg, i, Quantity::Certification, c));
        }
        rows.push(SweepRow::new(cfg, i, Quantity::DelayFireProb, cfg.delay_fire_prob(i)?));
    }
    rows.push(SweepRow::new(cfg, 0, Quantity::NoTriggerProb, cfg.no_trigger_prob()));
    rows.push(SweepRow::new(cfg, 0, Quantity::SinglePhotonProb, cfg.single_photon_prob()));
    if let Ok(v) = cfg.single_photon_prob_given_trigger() {
        rows.push(SweepRow::new(cfg, 0, Quantity::SinglePhotonProbGivenTrigger, v));
    }
    let poisson = cfg.with_kind(StatisticsKind::Poisson);
    rows.push(SweepRow::new(
        cfg,
        0,
        Quantity::PoissonSinglePhotonProb,
        poisson.single_photon_prob(),
    ));
    if let Ok(v) = poisson.single_photon_prob_given_trigger() {
        rows.push(SweepRow::new(cfg, 0, Quantity::PoissonSinglePhotonProbGivenTrigger, v));
    }
    Ok(rows)
}

fn describe(cfg: &MultiplexConfig) -> String {
    format!(
        "nbar = {}, eta = {}, N_D = {}, kind = {}",
        cfg.nbar(),
        cfg.eta(),
        cfg.num_delays(),
        cfg.kind()
    )
}

fn certify(a: &CertifyArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let cfg = a.config.config()?;
    let rows = certification_rows(&cfg, a.delay)?;
    if json {
        return emit_table(&rows, TableFormat::Json, out);
    }
    writeln!(out, "{}", describe(&cfg))?;
    writeln!(out, "{:>5}  {:>13}  {:>13}", "delay", "certification", "occurrence")?;
    let per_delay: Vec<u32> = match a.delay {
        Some(i) => vec![i],
        None => (1..=cfg.num_delays()).collect(),
    };
    for i in per_delay {
        let find = |q| rows.iter().find(|r| r.delay == i && r.quantity == q);
        let cert = find(Quantity::Certification)
            .map(|r| format_sig(r.analytic, 6))
            .unwrap_or_else(|| "undefined".into());
        let occ = find(Quantity::DelayFireProb).expect("occurrence row").analytic;
        writeln!(out, "{i:>5}  {cert:>13}  {:>13}", format_sig(occ, 6))?;
    }
    for r in rows.iter().filter(|r| r.delay == 0) {
        writeln!(out, "{:<42} {}", r.quantity.as_str(), format_sig(r.analytic, 6))?;
    }
    if cfg.single_photon_prob_given_trigger().is_err() {
        writeln!(out, "{:<42} undefined", Quantity::SinglePhotonProbGivenTrigger.as_str())?;
    }
    Ok(())
}

fn sweep(a: &SweepArgs, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let target: SweepTarget = a.target.into();
    let mut spec = SweepSpec::defaults(target);
    if !a.nbar.is_empty() {
        spec.nbar = a.nbar.clone();
    }
    if !a.eta.is_empty() {
        spec.eta = a.eta.clone();
    }
    if !a.nd.is_empty() {
        spec.nd = a.nd.clone();
    }
    spec.kind = a.kind.into();
    spec.include_monte_carlo = a.mc;
    spec.trials = a.trials;
    spec.seed = a.seed;
    let rows = run_sweep(&spec)?;

    let format = if json { FormatArg::Json } else { a.format };
    let write = |sink: &mut dyn Write| -> Result<()> {
        match format {
            FormatArg::Csv => emit_table(&rows, TableFormat::Csv, sink),
            FormatArg::Pretty => emit_table(&rows, TableFormat::Pretty, sink),
            FormatArg::Json => emit_table(&rows, TableFormat::Json, sink),
            FormatArg::Svg => emit_plot(
                &rows,
                PlotGrouping::for_target(target),
                &format!("{:?}", a.target).to_lowercase(),
                sink,
            ),
        }
    };
    match &a.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => write(stdout),
    }
}

fn estimate_row(cfg: &MultiplexConfig, e: &SimulationEstimate, analytic: Option<f64>) -> Result<Option<SweepRow>> {
    let quantity: Quantity = e.name.parse()?;
    Ok(analytic.map(|v| SweepRow::new(cfg, e.delay, quantity, v).with_estimate(e)))
}

/// Rows pairing each simulated estimate with its closed-form value.
pub fn simulation_rows(spec: &SimulationSpec) -> Result<(Vec<SweepRow>, String)> {
    let cfg = spec.config;
    let mut rows = Vec::new();
    let summary = match spec.mode {
        crate::sim::SimulationMode::DelayMultiplexed => {
            let run = run_delay_multiplexed(spec)?;
            for e in &run.estimates {
                let analytic = match e.name.as_str() {
                    "certification" => cfg.certification(e.delay).ok(),
                    "delay_fire_prob" => cfg.delay_fire_prob(e.delay).ok(),
                    "no_trigger_prob" => Some(cfg.no_trigger_prob()),
                    "single_photon_prob" => Some(cfg.single_photon_prob()),
                    "single_photon_prob_given_trigger" => {
                        cfg.single_photon_prob_given_trigger().ok()
                    }
                    _ => None,
                };
                rows.extend(estimate_row(&cfg, e, analytic)?);
            }
            format!(
                "delay-multiplexed: {}, trials = {}, seed = {}, events = {:?}",
                describe(&cfg),
                spec.trials,
                spec.seed,
                run.counts.events
            )
        }
        crate::sim::SimulationMode::SwitchedArray => {
            let run = run_switched_array(spec)?;
            let exact = switched_array_emission(&cfg, spec.path_transmittance())?;
            for e in &run.estimates {
                let analytic = match e.name.as_str() {
                    "herald_prob" => Some(exact.herald_prob),
                    "emitted_one" => Some(exact.emitted_one),
                    "emitted_multi" => Some(exact.emitted_multi),
                    "emitted_at_least_one_given_herald" => exact.emitted_at_least_one_given_herald,
                    "heralded_photon_emitted" => Some(exact.heralded_photon_emitted),
                    _ => None,
                };
                rows.extend(estimate_row(&cfg, e, analytic)?);
            }
            format!(
                "switched array: {}, trials = {}, seed = {}, path transmittance = {}, emitted histogram = {:?}",
                describe(&cfg),
                spec.trials,
                spec.seed,
                format_sig(spec.path_transmittance(), 6),
                run.counts.histogram
            )
        }
    };
    Ok((rows, summary))
}

fn simulate(a: &SimulateArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let cfg = a.config.config()?;
    let extra = LossModel::new(expand(&a.surfaces))?.net_transmittance();
    let spec = match a.mode {
        ModeArg::Delay => SimulationSpec::delay_multiplexed(cfg, a.trials, a.seed)?,
        ModeArg::Array => SimulationSpec::switched_array(
            cfg,
            a.trials,
            a.seed,
            a.switch_transmittance,
            a.output_transmittance * extra,
        )?,
    };
    let (rows, summary) = simulation_rows(&spec)?;
    match if json { FormatArg::Json } else { a.format } {
        FormatArg::Pretty => {
            writeln!(out, "{summary}")?;
            emit_table(&rows, TableFormat::Pretty, out)
        }
        FormatArg::Csv => emit_table(&rows, TableFormat::Csv, out),
        FormatArg::Json => emit_table(&rows, TableFormat::Json, out),
        FormatArg::Svg => Err(Error::Parse("simulate has no plot output".into())),
    }
}

fn compare(a: &CompareArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let c = source_comparison(a.nbar, a.eta, a.nd)?;
    let cfg = MultiplexConfig::bose_einstein(a.nbar, a.eta, a.nd)?;
    let rows = [
        (Quantity::FaintLaser, c.faint_laser),
        (Quantity::ConventionalUnheralded, c.conventional_unheralded),
        (Quantity::ConventionalHeralded, c.conventional_heralded),
        (Quantity::MultiplexedHeralded, c.multiplexed_heralded),
    ]
    .map(|(q, v)| SweepRow::new(&cfg, 0, q, v));
    if json {
        return emit_table(&rows, TableFormat::Json, out);
    }
    writeln!(out, "nbar = {}, eta = {}, N_D = {}", a.nbar, a.eta, a.nd)?;
    for r in &rows {
        writeln!(out, "{:<24} {}", r.quantity.as_str(), format_sig(r.analytic, 6))?;
    }
    Ok(())
}

fn loss(a: &LossArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let mut surfaces = a.surfaces.clone();
    if let Some(path) = &a.file {
        surfaces.extend(read_surface_file(path)?);
    }
    let model = LossModel::new(expand(&surfaces))?;
    let budget = loss_budget(&model);
    if json {
        serde_json::to_writer_pretty(&mut *out, &serde_json::json!({
            "surfaces": model.surfaces().len(),
            "net_transmittance": budget.net_transmittance,
            "net_loss": budget.net_loss,
        }))?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "surfaces           {}", model.surfaces().len())?;
    writeln!(out, "net_transmittance  {}", format_sig(budget.net_transmittance, 6))?;
    writeln!(out, "net_loss           {}", format_sig(budget.net_loss, 6))?;
    Ok(())
}

/// Entry point for the binary.
pub fn main_with_stdio() -> i32 {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let code = run(std::env::args_os(), &mut out, &mut err);
    match out.flush() {
        Ok(()) => code,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
    }
}

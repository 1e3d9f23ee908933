//! Parameter sweeps behind the figure data, plus table and plot output.
//!
//! Every analytic value in a [`SweepRow`] comes straight from a
//! [`MultiplexConfig`] method; this module only enumerates grids, attaches
//! Monte Carlo estimates and formats the result.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MultiplexConfig;
use crate::sim::{run_delay_multiplexed, SimulationEstimate, SimulationSpec, DEFAULT_TRIALS};
use crate::stats::StatisticsKind;

pub const CSV_HEADER: [&str; 8] = [
    "nbar",
    "eta",
    "nd",
    "delay",
    "quantity",
    "analytic",
    "mc_estimate",
    "mc_stderr",
];

macro_rules! quantities {
    ($($variant:ident => $label:literal),+ $(,)?) => {
        /// What a row's value measures.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Quantity {
            $(#[serde(rename = $label)] $variant,)+
        }

        impl Quantity {
            pub const ALL: &'static [Quantity] = &[$(Quantity::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Quantity::$variant => $label,)+
                }
            }
        }
    };
}

quantities! {
    Certification => "certification",
    DelayFireProb => "delay_fire_prob",
    NoTriggerProb => "no_trigger_prob",
    SinglePhotonProb => "single_photon_prob",
    SinglePhotonProbGivenTrigger => "single_photon_prob_given_trigger",
    PoissonSinglePhotonProb => "poisson_single_photon_prob",
    PoissonSinglePhotonProbGivenTrigger => "poisson_single_photon_prob_given_trigger",
    FaintLaser => "faint_laser",
    ConventionalUnheralded => "conventional_unheralded",
    ConventionalHeralded => "conventional_heralded",
    MultiplexedHeralded => "multiplexed_heralded",
    HeraldProb => "herald_prob",
    EmittedOne => "emitted_one",
    EmittedMulti => "emitted_multi",
    EmittedAtLeastOneGivenHerald => "emitted_at_least_one_given_herald",
    HeraldedPhotonEmitted => "heralded_photon_emitted",
}

impl Quantity {
    /// Statistics kind and simulator estimate name that reproduce this
    /// quantity for a row computed with `kind`.
    fn simulated_as(self, kind: StatisticsKind) -> Option<(StatisticsKind, &'static str)> {
        use Quantity::*;
        match self {
            Certification | DelayFireProb | NoTriggerProb | SinglePhotonProb
            | SinglePhotonProbGivenTrigger => Some((kind, self.as_str())),
            PoissonSinglePhotonProb => Some((StatisticsKind::Poisson, "single_photon_prob")),
            PoissonSinglePhotonProbGivenTrigger => {
                Some((StatisticsKind::Poisson, "single_photon_prob_given_trigger"))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown quantity `{s}`")))
    }
}

/// One line of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nbar: f64,
    pub eta: f64,
    pub nd: u32,
    /// 0 when the quantity is not per-delay.
    pub delay: u32,
    pub quantity: Quantity,
    pub analytic: f64,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
}

impl SweepRow {
    pub fn new(cfg: &MultiplexConfig, delay: u32, quantity: Quantity, analytic: f64) -> Self {
        Self {
            nbar: cfg.nbar(),
            eta: cfg.eta(),
            nd: cfg.num_delays(),
            delay,
            quantity,
            analytic,
            mc_estimate: None,
            mc_stderr: None,
        }
    }

    pub fn with_estimate(mut self, estimate: &SimulationEstimate) -> Self {
        self.mc_estimate = estimate.estimate;
        self.mc_stderr = estimate.standard_error;
        self
    }

    /// Distance between the MC estimate and the analytic value in standard
    /// errors, when an estimate is attached.
    pub fn z_score(&self) -> Option<f64> {
        let (p, se) = (self.mc_estimate?, self.mc_stderr?);
        let diff = (p - self.analytic).abs();
        Some(if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        })
    }

    fn sort_key_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.nbar
            .total_cmp(&other.nbar)
            .then(self.eta.total_cmp(&other.eta))
            .then(self.nd.cmp(&other.nd))
            .then(self.delay.cmp(&other.delay))
            .then(self.quantity.cmp(&other.quantity))
    }
}

/// Sort rows by `(nbar, eta, nd, delay, quantity)`.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(SweepRow::sort_key_cmp);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepTarget {
    /// Certification fan plus aggregate overlays.
    Fig3a,
    /// Per-delay firing probabilities including the no-trigger point.
    Fig3b,
    /// Fig3a data on the 3 x 4 grid of efficiencies and rates.
    Fig4,
    /// Single-photon probability against the system rate.
    Fig5,
    /// Every quantity on user grids.
    Custom,
}

impl FromStr for SweepTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig3a" => Ok(SweepTarget::Fig3a),
            "fig3b" => Ok(SweepTarget::Fig3b),
            "fig4" => Ok(SweepTarget::Fig4),
            "fig5" => Ok(SweepTarget::Fig5),
            "custom" => Ok(SweepTarget::Custom),
            _ => Err(Error::Parse(format!("unknown sweep target `{s}`"))),
        }
    }
}

pub const FIG4_ETAS: [f64; 3] = [0.5, 0.75, 1.0];
pub const FIG4_NBARS: [f64; 4] = [2.0, 1.0, 0.5, 0.25];

/// `nbar = k / 20` for `k = 1..=80`, covering `(0, 4]` in steps of 0.05.
pub fn fig5_nbar_grid() -> Vec<f64> {
    (1..=80).map(|k| k as f64 / 20.0).collect()
}

pub fn default_num_delays() -> Vec<u32> {
    (1..=8).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub nbar: Vec<f64>,
    pub eta: Vec<f64>,
    pub nd: Vec<u32>,
    pub kind: StatisticsKind,
    pub include_monte_carlo: bool,
    pub trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// Default grids for each target.
    pub fn defaults(target: SweepTarget) -> Self {
        let (nbar, eta) = match target {
            SweepTarget::Fig4 => (FIG4_NBARS.to_vec(), FIG4_ETAS.to_vec()),
            SweepTarget::Fig5 => (fig5_nbar_grid(), vec![1.0]),
            _ => (vec![1.0], vec![1.0]),
        };
        Self {
            target,
            nbar,
            eta,
            nd: default_num_delays(),
            kind: StatisticsKind::BoseEinstein,
            include_monte_carlo: false,
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    fn configs(&self) -> Result<Vec<MultiplexConfig>> {
        if self.nbar.is_empty() || self.eta.is_empty() || self.nd.is_empty() {
            return Err(Error::Parse("sweep grids must be non-empty".into()));
        }
        let mut out = Vec::with_capacity(self.nbar.len() * self.eta.len() * self.nd.len());
        for &nbar in &self.nbar {
            for &eta in &self.eta {
                for &nd in &self.nd {
                    out.push(MultiplexConfig::new(nbar, eta, nd, self.kind)?);
                }
            }
        }
        Ok(out)
    }
}

fn certification_rows(cfg: &MultiplexConfig) -> Vec<SweepRow> {
    (1..=cfg.num_delays())
        .filter_map(|i| {
            cfg.certification(i)
                .ok()
                .map(|v| SweepRow::new(cfg, i, Quantity::Certification, v))
        })
        .collect()
}

fn occurrence_rows(cfg: &MultiplexConfig) -> Vec<SweepRow> {
    let mut rows = vec![SweepRow::new(cfg, 0, Quantity::NoTriggerProb, cfg.no_trigger_prob())];
    rows.extend((1..=cfg.num_delays()).map(|i| {
        SweepRow::new(
            cfg,
            i,
            Quantity::DelayFireProb,
            cfg.delay_fire_prob(i).expect("index in range"),
        )
    }));
    rows
}

fn aggregate_rows(cfg: &MultiplexConfig) -> Vec<SweepRow> {
    let poisson = cfg.with_kind(StatisticsKind::Poisson);
    let mut rows = vec![
        SweepRow::new(cfg, 0, Quantity::SinglePhotonProb, cfg.single_photon_prob()),
        SweepRow::new(
            cfg,
            0,
            Quantity::PoissonSinglePhotonProb,
            poisson.single_photon_prob(),
        ),
    ];
    if let Ok(v) = cfg.single_photon_prob_given_trigger() {
        rows.push(SweepRow::new(cfg, 0, Quantity::SinglePhotonProbGivenTrigger, v));
    }
    rows
}

/// Certification fan and the three overlay curves for each configuration.
pub fn sweep_fig3a(configs: &[MultiplexConfig]) -> Vec<SweepRow> {
    configs
        .iter()
        .flat_map(|cfg| {
            let mut rows = certification_rows(cfg);
            rows.extend(aggregate_rows(cfg));
            rows
        })
        .collect()
}

/// Firing probability of every delay, with the no-trigger probability at
/// delay 0.
pub fn sweep_fig3b(configs: &[MultiplexConfig]) -> Vec<SweepRow> {
    configs.iter().flat_map(occurrence_rows).collect()
}

/// Fig3a data on the fixed efficiency x rate grid.
pub fn sweep_fig4(kind: StatisticsKind, num_delays: &[u32]) -> Result<Vec<SweepRow>> {
    let mut configs = Vec::new();
    for &eta in &FIG4_ETAS {
        for &nbar in &FIG4_NBARS {
            for &nd in num_delays {
                configs.push(MultiplexConfig::new(nbar, eta, nd, kind)?);
            }
        }
    }
    Ok(sweep_fig3a(&configs))
}

/// Overall single-photon probability for every configuration.
pub fn sweep_fig5(configs: &[MultiplexConfig]) -> Vec<SweepRow> {
    configs
        .iter()
        .map(|cfg| SweepRow::new(cfg, 0, Quantity::SinglePhotonProb, cfg.single_photon_prob()))
        .collect()
}

fn sweep_custom(configs: &[MultiplexConfig]) -> Vec<SweepRow> {
    configs
        .iter()
        .flat_map(|cfg| {
            let mut rows = certification_rows(cfg);
            rows.extend(occurrence_rows(cfg));
            rows.extend(aggregate_rows(cfg));
            rows
        })
        .collect()
}

/// Analytic rows for `spec`, sorted, with Monte Carlo estimates attached
/// when requested.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut rows = match spec.target {
        SweepTarget::Fig3a => sweep_fig3a(&spec.configs()?),
        SweepTarget::Fig3b => sweep_fig3b(&spec.configs()?),
        SweepTarget::Fig4 => {
            if spec.nd.is_empty() {
                return Err(Error::Parse("sweep grids must be non-empty".into()));
            }
            sweep_fig4(spec.kind, &spec.nd)?
        }
        SweepTarget::Fig5 => sweep_fig5(&spec.configs()?),
        SweepTarget::Custom => sweep_custom(&spec.configs()?),
    };
    if spec.include_monte_carlo {
        attach_monte_carlo(&mut rows, spec.kind, spec.trials, spec.seed)?;
    }
    sort_rows(&mut rows);
    Ok(rows)
}

type SimKey = (u64, u64, u32, StatisticsKind);

/// Run one delay-multiplexed simulation per distinct configuration in
/// `rows` and copy the matching estimates in.
pub fn attach_monte_carlo(
    rows: &mut [SweepRow],
    kind: StatisticsKind,
    trials: u64,
    seed: u64,
) -> Result<()> {
    let mut keys: Vec<SimKey> = rows
        .iter()
        .filter_map(|r| {
            r.quantity
                .simulated_as(kind)
                .map(|(k, _)| (r.nbar.to_bits(), r.eta.to_bits(), r.nd, k))
        })
        .collect();
    keys.sort();
    keys.dedup();

    let runs = keys
        .par_iter()
        .map(|&(nbar, eta, nd, k)| {
            let cfg = MultiplexConfig::new(f64::from_bits(nbar), f64::from_bits(eta), nd, k)?;
            let spec = SimulationSpec::delay_multiplexed(cfg, trials, seed)?;
            Ok(((nbar, eta, nd, k), run_delay_multiplexed(&spec)?.estimates))
        })
        .collect::<Result<HashMap<SimKey, Vec<SimulationEstimate>>>>()?;

    for row in rows.iter_mut() {
        let Some((k, name)) = row.quantity.simulated_as(kind) else {
            continue;
        };
        let estimates = &runs[&(row.nbar.to_bits(), row.eta.to_bits(), row.nd, k)];
        if let Some(e) = estimates
            .iter()
            .find(|e| e.name == name && e.delay == row.delay)
        {
            *row = row.clone().with_estimate(e);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Pretty,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "pretty" | "table" => Ok(TableFormat::Pretty),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::Parse(format!("unknown table format `{s}`"))),
        }
    }
}

/// Full-precision float text: 17 significant digits, parses back to the
/// same bits.
pub fn format_exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// `v` rounded to `digits` significant digits in plain notation.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(format_exact).unwrap_or_default();
        w.write_record([
            format_exact(r.nbar),
            format_exact(r.eta),
            r.nd.to_string(),
            r.delay.to_string(),
            r.quantity.to_string(),
            format_exact(r.analytic),
            opt(r.mc_estimate),
            opt(r.mc_stderr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(source: R) -> Result<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let float = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Parse(format!("invalid number `{s}`")))
    };
    let int = |s: &str| -> Result<u32> {
        s.parse()
            .map_err(|_| Error::Parse(format!("invalid integer `{s}`")))
    };
    let opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            float(s).map(Some)
        }
    };
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok(SweepRow {
                nbar: float(&rec[0])?,
                eta: float(&rec[1])?,
                nd: int(&rec[2])?,
                delay: int(&rec[3])?,
                quantity: rec[4].parse()?,
                analytic: float(&rec[5])?,
                mc_estimate: opt(&rec[6])?,
                mc_stderr: opt(&rec[7])?,
            })
        })
        .collect()
}

/// Aligned text table, 6 significant digits.
pub fn write_pretty<W: Write>(rows: &[SweepRow], mut sink: W) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, 6)).unwrap_or_else(|| "-".into());
    let body: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                format_sig(r.nbar, 6),
                format_sig(r.eta, 6),
                r.nd.to_string(),
                r.delay.to_string(),
                r.quantity.to_string(),
                format_sig(r.analytic, 6),
                opt(r.mc_estimate),
                opt(r.mc_stderr),
            ]
        })
        .collect();
    let mut widths = CSV_HEADER.map(str::len);
    for line in &body {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.len());
        }
    }
    let mut emit = |cells: &[&str]| -> std::io::Result<()> {
        let line: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(k, (c, w))| if k == 4 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        writeln!(sink, "{}", line.join("  ").trim_end())
    };
    emit(&CSV_HEADER)?;
    for line in &body {
        emit(&line.each_ref().map(String::as_str))?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut sink: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut sink, rows)?;
    writeln!(sink)?;
    Ok(())
}

pub fn emit_table<W: Write>(rows: &[SweepRow], format: TableFormat, sink: W) -> Result<()> {
    match format {
        TableFormat::Csv => write_csv(rows, sink),
        TableFormat::Pretty => write_pretty(rows, sink),
        TableFormat::Json => write_json(rows, sink),
    }
}

/// How rows are grouped into plot lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotGrouping {
    /// Per-delay quantities against delay index, one line per configuration
    /// (the no-trigger point joins its configuration at delay 0); aggregate
    /// quantities against `N_D`, one line per quantity and rate.
    Delays,
    /// Every quantity against `nbar`, one line per quantity, efficiency and
    /// `N_D`.
    Nbar,
}

impl PlotGrouping {
    pub fn for_target(target: SweepTarget) -> Self {
        match target {
            SweepTarget::Fig5 => PlotGrouping::Nbar,
            _ => PlotGrouping::Delays,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub fn plot_series(rows: &[SweepRow], grouping: PlotGrouping) -> Vec<PlotSeries> {
    let mut series: Vec<PlotSeries> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for r in rows {
        let (label, x) = match grouping {
            PlotGrouping::Nbar => (
                format!("{} eta={} N_D={}", r.quantity, r.eta, r.nd),
                r.nbar,
            ),
            PlotGrouping::Delays => match r.quantity {
                Quantity::Certification | Quantity::DelayFireProb => (
                    format!("{} nbar={} eta={} N_D={}", r.quantity, r.nbar, r.eta, r.nd),
                    r.delay as f64,
                ),
                Quantity::NoTriggerProb => (
                    format!(
                        "{} nbar={} eta={} N_D={}",
                        Quantity::DelayFireProb,
                        r.nbar,
                        r.eta,
                        r.nd
                    ),
                    0.0,
                ),
                _ => (
                    format!("{} nbar={} eta={}", r.quantity, r.nbar, r.eta),
                    r.nd as f64,
                ),
            },
        };
        let k = *index.entry(label.clone()).or_insert_with(|| {
            series.push(PlotSeries {
                label,
                points: Vec::new(),
            });
            series.len() - 1
        });
        series[k].points.push((x, r.analytic));
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    series
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Minimal SVG line chart, one polyline per series, linear axes.
pub fn emit_plot<W: Write>(
    rows: &[SweepRow],
    grouping: PlotGrouping,
    title: &str,
    mut sink: W,
) -> Result<()> {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 260.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;

    let series = plot_series(rows, grouping);
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (xmin, xmax) = bounds(xs);
    let (ymin, ymax) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (ymin, ymax) = (ymin.min(0.0), ymax.max(ymin + f64::EPSILON));
    let px = |x: f64| LEFT + (x - xmin) / (xmax - xmin).max(f64::EPSILON) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - ymin) / (ymax - ymin).max(f64::EPSILON) * (H - TOP - BOTTOM);
    let xlabel = match grouping {
        PlotGrouping::Nbar => "mean photon number per pulse",
        PlotGrouping::Delays => "delay index (aggregates: number of delays)",
    };

    writeln!(
        sink,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(sink, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    writeln!(
        sink,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (W - RIGHT + LEFT) / 2.0,
        escape(title)
    )?;
    writeln!(
        sink,
        r#"<path d="M{l} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        l = LEFT,
        t = TOP,
        b = H - BOTTOM,
        r = W - RIGHT
    )?;
    for k in 0..=4 {
        let fx = xmin + (xmax - xmin) * k as f64 / 4.0;
        let fy = ymin + (ymax - ymin) * k as f64 / 4.0;
        writeln!(
            sink,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(fx),
            H - BOTTOM + 16.0,
            format_sig(fx, 3)
        )?;
        writeln!(
            sink,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(fy) + 4.0,
            format_sig(fy, 3)
        )?;
    }
    writeln!(
        sink,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (W - RIGHT + LEFT) / 2.0,
        H - 18.0,
        xlabel
    )?;
    writeln!(
        sink,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">probability</text>"#,
        H / 2.0,
        H / 2.0
    )?;
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        writeln!(
            sink,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            points.join(" "),
            escape(&s.label)
        )?;
        if k < 30 {
            let y = TOP + 14.0 * k as f64;
            writeln!(
                sink,
                r#"<text x="{:.1}" y="{y:.1}" fill="{color}">{}</text>"#,
                W - RIGHT + 10.0,
                escape(&s.label)
            )?;
        }
    }
    writeln!(sink, "</svg>")?;
    Ok(())
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Seeded Monte Carlo oracle for the delay-multiplexed trigger and for the
//! switched-array source.
//!
//! Trials are split into fixed chunks of [`CHUNK_TRIALS`] pulses. Chunk `c`
//! draws from a ChaCha8 generator seeded with the run seed and set to stream
//! `c`, so results depend only on `(seed, trials)` and never on thread
//! scheduling. Chunk counts are merged by addition.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MultiplexConfig, TriggerEvent};
use crate::stats::StatisticsKind;

/// Pulses per independent random substream.
pub const CHUNK_TRIALS: u64 = 1 << 16;

pub const DEFAULT_TRIALS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationMode {
    /// All modes feed one trigger detector through increasing delays.
    DelayMultiplexed,
    /// One detector per downconverter and a switch routing the lowest-index
    /// heralded channel to the output.
    SwitchedArray,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub config: MultiplexConfig,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimulationMode,
    pub switch_transmittance: f64,
    pub output_transmittance: f64,
}

impl SimulationSpec {
    pub fn delay_multiplexed(config: MultiplexConfig, trials: u64, seed: u64) -> Result<Self> {
        Self::new(config, trials, seed, SimulationMode::DelayMultiplexed, 1.0, 1.0)
    }

    pub fn switched_array(
        config: MultiplexConfig,
        trials: u64,
        seed: u64,
        switch_transmittance: f64,
        output_transmittance: f64,
    ) -> Result<Self> {
        Self::new(
            config,
            trials,
            seed,
            SimulationMode::SwitchedArray,
            switch_transmittance,
            output_transmittance,
        )
    }

    pub fn new(
        config: MultiplexConfig,
        trials: u64,
        seed: u64,
        mode: SimulationMode,
        switch_transmittance: f64,
        output_transmittance: f64,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::domain("trials", 0.0, ">= 1"));
        }
        for (name, t) in [
            ("switch transmittance", switch_transmittance),
            ("output transmittance", output_transmittance),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::domain(name, t, "in [0, 1]"));
            }
        }
        Ok(Self {
            config,
            trials,
            seed,
            mode,
            switch_transmittance,
            output_transmittance,
        })
    }

    /// Net transmittance from the selected crystal channel to the output.
    pub fn path_transmittance(&self) -> f64 {
        self.switch_transmittance * self.output_transmittance
    }

    fn num_chunks(&self) -> u64 {
        self.trials.div_ceil(CHUNK_TRIALS)
    }

    fn chunk_len(&self, chunk: u64) -> u64 {
        (self.trials - chunk * CHUNK_TRIALS).min(CHUNK_TRIALS)
    }
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Photon-number sampler for one mode.
#[derive(Debug, Clone, Copy)]
pub enum ModeSampler {
    Vacuum,
    BoseEinstein(Geometric),
    Poisson(Poisson<f64>),
}

impl ModeSampler {
    pub fn new(kind: StatisticsKind, mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean >= 0.0) {
            return Err(Error::domain("mean photon number", mean, "finite and >= 0"));
        }
        if mean == 0.0 {
            return Ok(ModeSampler::Vacuum);
        }
        Ok(match kind {
            // failures before the first success with p = 1/(1+m)
            StatisticsKind::BoseEinstein => ModeSampler::BoseEinstein(
                Geometric::new(1.0 / (1.0 + mean)).expect("p in (0, 1]"),
            ),
            StatisticsKind::Poisson => {
                ModeSampler::Poisson(Poisson::new(mean).expect("positive finite rate"))
            }
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            ModeSampler::Vacuum => 0,
            ModeSampler::BoseEinstein(g) => g.sample(rng),
            ModeSampler::Poisson(p) => p.sample(rng) as u64,
        }
    }
}

/// Draw one mode's photon count.
pub fn sample_mode_count<R: Rng + ?Sized>(
    kind: StatisticsKind,
    mean: f64,
    rng: &mut R,
) -> Result<u64> {
    Ok(ModeSampler::new(kind, mean)?.sample(rng))
}

/// Number of photons out of `n` that survive independent thinning with
/// probability `p`.
fn thin<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return n;
    }
    if p <= 0.0 {
        return 0;
    }
    (0..n).filter(|_| rng.random::<f64>() < p).count() as u64
}

/// Whether at least one of `n` photons is detected at efficiency `eta`.
fn any_detected<R: Rng + ?Sized>(n: u64, eta: f64, rng: &mut R) -> bool {
    if n == 0 || eta <= 0.0 {
        return false;
    }
    if eta >= 1.0 {
        return true;
    }
    (0..n).any(|_| rng.random::<f64>() < eta)
}

/// Result of one pump pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub event: TriggerEvent,
    /// Photons summed over all modes.
    pub total_photons: u64,
    /// Photons leaving the output port (switched array only).
    pub emitted_photons: u64,
}

/// One pulse through the delay-multiplexed trigger. Modes are visited in
/// delay order; the first with a detected photon sets the event, and the
/// detector ignores everything after it.
pub fn delay_trial<R: Rng + ?Sized>(
    sampler: &ModeSampler,
    num_delays: u32,
    eta: f64,
    rng: &mut R,
) -> TrialOutcome {
    delay_trial_observed(sampler, num_delays, eta, rng, |_, _, _| {})
}

/// [`delay_trial`] that also reports `(delay, photons, detected)` for every
/// mode. A mode counts as detected if any of its photons would have clicked
/// a live detector.
pub fn delay_trial_observed<R, F>(
    sampler: &ModeSampler,
    num_delays: u32,
    eta: f64,
    rng: &mut R,
    mut observe: F,
) -> TrialOutcome
where
    R: Rng + ?Sized,
    F: FnMut(u32, u64, bool),
{
    let mut event = TriggerEvent::NONE;
    let mut total = 0;
    for i in 1..=num_delays {
        let n = sampler.sample(rng);
        total += n;
        let detected = any_detected(n, eta, rng);
        observe(i, n, detected);
        if detected && !event.fired() {
            event = TriggerEvent::new(i, num_delays).expect("index within num_delays");
        }
    }
    TrialOutcome {
        event,
        total_photons: total,
        emitted_photons: 0,
    }
}

/// Count-based estimate of one probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationEstimate {
    pub name: String,
    /// Delay index the estimate refers to, 0 when not applicable.
    pub delay: u32,
    pub numerator: u64,
    pub denominator: u64,
    /// `None` when the conditioning event never occurred.
    pub estimate: Option<f64>,
    pub standard_error: Option<f64>,
}

impl SimulationEstimate {
    pub fn from_counts(name: impl Into<String>, delay: u32, numerator: u64, denominator: u64) -> Self {
        let (estimate, standard_error) = if denominator > 0 {
            let p = numerator as f64 / denominator as f64;
            (Some(p), Some((p * (1.0 - p) / denominator as f64).sqrt()))
        } else {
            (None, None)
        };
        Self {
            name: name.into(),
            delay,
            numerator,
            denominator,
            estimate,
            standard_error,
        }
    }

    /// `|estimate - expected|` in units of the standard error. A zero
    /// standard error counts as agreement only on an exact match.
    pub fn z_score(&self, expected: f64) -> Option<f64> {
        let (p, se) = (self.estimate?, self.standard_error?);
        let diff = (p - expected).abs();
        Some(if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        })
    }
}

/// Raw tallies from delay-multiplexed pulses, indexed by event (0 = none).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayCounts {
    pub trials: u64,
    /// Pulses per event index.
    pub events: Vec<u64>,
    /// Pulses per event index with exactly one photon in the whole system.
    pub singles: Vec<u64>,
}

impl DelayCounts {
    pub fn new(num_delays: u32) -> Self {
        let len = num_delays as usize + 1;
        Self {
            trials: 0,
            events: vec![0; len],
            singles: vec![0; len],
        }
    }

    pub fn record(&mut self, outcome: &TrialOutcome) {
        let i = outcome.event.delay_index() as usize;
        self.trials += 1;
        self.events[i] += 1;
        if outcome.total_photons == 1 {
            self.singles[i] += 1;
        }
    }

    /// Add another tally of the same shape.
    pub fn merge(mut self, other: &DelayCounts) -> Self {
        assert_eq!(self.events.len(), other.events.len(), "mismatched delay counts");
        self.trials += other.trials;
        for (a, b) in self.events.iter_mut().zip(&other.events) {
            *a += b;
        }
        for (a, b) in self.singles.iter_mut().zip(&other.singles) {
            *a += b;
        }
        self
    }

    pub fn num_delays(&self) -> u32 {
        self.events.len() as u32 - 1
    }

    pub fn estimates(&self) -> Vec<SimulationEstimate> {
        let nd = self.num_delays();
        let mut out = Vec::with_capacity(2 * nd as usize + 3);
        for i in 1..=nd {
            let k = i as usize;
            out.push(SimulationEstimate::from_counts(
                "certification",
                i,
                self.singles[k],
                self.events[k],
            ));
        }
        for i in 1..=nd {
            out.push(SimulationEstimate::from_counts(
                "delay_fire_prob",
                i,
                self.events[i as usize],
                self.trials,
            ));
        }
        out.push(SimulationEstimate::from_counts(
            "no_trigger_prob",
            0,
            self.events[0],
            self.trials,
        ));
        let all_singles: u64 = self.singles.iter().sum();
        out.push(SimulationEstimate::from_counts(
            "single_photon_prob",
            0,
            all_singles,
            self.trials,
        ));
        out.push(SimulationEstimate::from_counts(
            "single_photon_prob_given_trigger",
            0,
            all_singles - self.singles[0],
            self.trials - self.events[0],
        ));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayRun {
    pub spec: SimulationSpec,
    pub counts: DelayCounts,
    pub estimates: Vec<SimulationEstimate>,
}

/// Simulate `trials` pulses of chunk `chunk` of a delay-multiplexed run.
pub fn simulate_delay_chunk(spec: &SimulationSpec, chunk: u64, trials: u64) -> Result<DelayCounts> {
    let cfg = &spec.config;
    let sampler = ModeSampler::new(cfg.kind(), cfg.per_mode_mean())?;
    let mut rng = substream(spec.seed, chunk);
    let mut counts = DelayCounts::new(cfg.num_delays());
    for _ in 0..trials {
        let outcome = delay_trial(&sampler, cfg.num_delays(), cfg.eta(), &mut rng);
        counts.record(&outcome);
    }
    Ok(counts)
}

pub fn run_delay_multiplexed(spec: &SimulationSpec) -> Result<DelayRun> {
    if spec.mode != SimulationMode::DelayMultiplexed {
        return Err(Error::Parse("run_delay_multiplexed needs a delay-multiplexed spec".into()));
    }
    let chunks = (0..spec.num_chunks())
        .into_par_iter()
        .map(|c| simulate_delay_chunk(spec, c, spec.chunk_len(c)))
        .collect::<Result<Vec<_>>>()?;
    let counts = chunks
        .iter()
        .fold(DelayCounts::new(spec.config.num_delays()), |acc, c| acc.merge(c));
    let estimates = counts.estimates();
    Ok(DelayRun {
        spec: *spec,
        counts,
        estimates,
    })
}

/// Raw tallies from switched-array pulses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayCounts {
    pub trials: u64,
    pub heralded: u64,
    /// Twin of the first detected herald photon reached the output.
    pub heralded_photon_emitted: u64,
    /// `histogram[k]` = pulses emitting exactly `k` photons.
    pub histogram: Vec<u64>,
}

impl ArrayCounts {
    pub fn new() -> Self {
        Self {
            trials: 0,
            heralded: 0,
            heralded_photon_emitted: 0,
            histogram: vec![0],
        }
    }

    fn record(&mut self, outcome: &TrialOutcome, twin_emitted: bool) {
        self.trials += 1;
        if outcome.event.fired() {
            self.heralded += 1;
            if twin_emitted {
                self.heralded_photon_emitted += 1;
            }
        }
        let k = outcome.emitted_photons as usize;
        if self.histogram.len() <= k {
            self.histogram.resize(k + 1, 0);
        }
        self.histogram[k] += 1;
    }

    pub fn merge(mut self, other: &ArrayCounts) -> Self {
        self.trials += other.trials;
        self.heralded += other.heralded;
        self.heralded_photon_emitted += other.heralded_photon_emitted;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self
    }

    pub fn estimates(&self) -> Vec<SimulationEstimate> {
        let one = self.histogram.get(1).copied().unwrap_or(0);
        let some = self.trials - self.histogram[0];
        vec![
            SimulationEstimate::from_counts("herald_prob", 0, self.heralded, self.trials),
            SimulationEstimate::from_counts("emitted_one", 0, one, self.trials),
            SimulationEstimate::from_counts("emitted_multi", 0, some - one, self.trials),
            // emission needs a herald, so `some` counts heralded pulses only
            SimulationEstimate::from_counts(
                "emitted_at_least_one_given_herald",
                0,
                some,
                self.heralded,
            ),
            SimulationEstimate::from_counts(
                "heralded_photon_emitted",
                0,
                self.heralded_photon_emitted,
                self.heralded,
            ),
        ]
    }
}

impl Default for ArrayCounts {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayRun {
    pub spec: SimulationSpec,
    pub counts: ArrayCounts,
    pub estimates: Vec<SimulationEstimate>,
}

/// One pulse through the switched array. Returns the outcome and whether
/// the twin of the first detected herald photon reached the output.
pub fn array_trial<R: Rng + ?Sized>(
    sampler: &ModeSampler,
    num_delays: u32,
    eta: f64,
    transmittance: f64,
    rng: &mut R,
) -> (TrialOutcome, bool) {
    let mut event = TriggerEvent::NONE;
    let mut total = 0;
    let mut selected = 0;
    for j in 1..=num_delays {
        let n = sampler.sample(rng);
        total += n;
        // every channel has its own detector; the lowest heralded one wins
        if any_detected(n, eta, rng) && !event.fired() {
            event = TriggerEvent::new(j, num_delays).expect("index within num_delays");
            selected = n;
        }
    }
    let (emitted, twin) = if event.fired() {
        // The detected herald's twin is one of the `selected` photons; thinning
        // is exchangeable, so test it first and thin the rest.
        let twin = thin(1, transmittance, rng) == 1;
        let rest = thin(selected - 1, transmittance, rng);
        (rest + twin as u64, twin)
    } else {
        (0, false)
    };
    (
        TrialOutcome {
            event,
            total_photons: total,
            emitted_photons: emitted,
        },
        twin,
    )
}

pub fn simulate_array_chunk(spec: &SimulationSpec, chunk: u64, trials: u64) -> Result<ArrayCounts> {
    let cfg = &spec.config;
    let sampler = ModeSampler::new(cfg.kind(), cfg.per_mode_mean())?;
    let mut rng = substream(spec.seed, chunk);
    let t = spec.path_transmittance();
    let mut counts = ArrayCounts::new();
    for _ in 0..trials {
        let (outcome, twin) = array_trial(&sampler, cfg.num_delays(), cfg.eta(), t, &mut rng);
        counts.record(&outcome, twin);
    }
    Ok(counts)
}

pub fn run_switched_array(spec: &SimulationSpec) -> Result<ArrayRun> {
    if spec.mode != SimulationMode::SwitchedArray {
        return Err(Error::Parse("run_switched_array needs a switched-array spec".into()));
    }
    let chunks = (0..spec.num_chunks())
        .into_par_iter()
        .map(|c| simulate_array_chunk(spec, c, spec.chunk_len(c)))
        .collect::<Result<Vec<_>>>()?;
    let counts = chunks.iter().fold(ArrayCounts::new(), |acc, c| acc.merge(c));
    let estimates = counts.estimates();
    Ok(ArrayRun {
        spec: *spec,
        counts,
        estimates,
    })
}

//! Closed-form model of a trigger detector fed by `N_D` delay paths.
//!
//! The system mean `nbar` is split evenly over `N_D` independent modes of
//! mean `m = nbar / N_D`. Mode `i` (1-based) reaches the detector `i`-th; the
//! detector's dead time means only the first mode holding a detected photon
//! is recorded. Index 0 stands for "the trigger did not fire".
//!
//! # Certification closed form
//!
//! For Bose-Einstein modes the certification of delay `i` composes to
//!
//! ```text
//! (1 - P_silent_some)^(i-1) * P_fire(1) * P(0)^(N_D-i)
//!   = ((N_D + eta*nbar)/(N_D + nbar))^(i-1)
//!     * N_D (N_D + eta*nbar)/(N_D + nbar)^2
//!     * (N_D/(N_D + nbar))^(N_D-i)
//!   = (N_D + eta*nbar)^i * N_D^(N_D+1-i) / (N_D + nbar)^(N_D+1)
//! ```
//!
//! which rises with `i`. [`MultiplexConfig::certification_composed`] keeps
//! the factor-by-factor route for cross-checking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{
    MeanPhotonNumber, PhotonNumberDistribution, QuantumEfficiency, StatisticsKind,
};

/// Parameters of an `N_D`-delay multiplexed heralded source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplexConfig {
    nbar: MeanPhotonNumber,
    eta: QuantumEfficiency,
    num_delays: u32,
    kind: StatisticsKind,
}

impl MultiplexConfig {
    pub fn new(nbar: f64, eta: f64, num_delays: u32, kind: StatisticsKind) -> Result<Self> {
        if num_delays == 0 {
            return Err(Error::domain("number of delays", 0.0, ">= 1"));
        }
        Ok(Self {
            nbar: MeanPhotonNumber::new(nbar)?,
            eta: QuantumEfficiency::new(eta)?,
            num_delays,
            kind,
        })
    }

    pub fn bose_einstein(nbar: f64, eta: f64, num_delays: u32) -> Result<Self> {
        Self::new(nbar, eta, num_delays, StatisticsKind::BoseEinstein)
    }

    pub fn poisson(nbar: f64, eta: f64, num_delays: u32) -> Result<Self> {
        Self::new(nbar, eta, num_delays, StatisticsKind::Poisson)
    }

    pub fn nbar(&self) -> f64 {
        self.nbar.get()
    }

    pub fn eta(&self) -> f64 {
        self.eta.get()
    }

    pub fn efficiency(&self) -> QuantumEfficiency {
        self.eta
    }

    pub fn num_delays(&self) -> u32 {
        self.num_delays
    }

    pub fn kind(&self) -> StatisticsKind {
        self.kind
    }

    pub fn with_kind(self, kind: StatisticsKind) -> Self {
        Self { kind, ..self }
    }

    pub fn with_num_delays(self, num_delays: u32) -> Result<Self> {
        Self::new(self.nbar(), self.eta(), num_delays, self.kind)
    }

    pub fn per_mode_mean(&self) -> f64 {
        self.nbar() / self.num_delays as f64
    }

    /// Photon-number law of one of the `N_D` identical modes.
    pub fn per_mode(&self) -> PhotonNumberDistribution {
        // nbar / N_D of a valid mean is itself a valid mean.
        PhotonNumberDistribution::new(
            self.kind,
            MeanPhotonNumber::new(self.per_mode_mean()).expect("per-mode mean in domain"),
        )
    }

    fn check_delay(&self, i: u32) -> Result<()> {
        if (1..=self.num_delays).contains(&i) {
            Ok(())
        } else {
            Err(Error::DelayOutOfRange {
                index: i,
                num_delays: self.num_delays,
            })
        }
    }

    fn check_posterior(&self) -> Result<()> {
        if self.eta() > 0.0 && self.nbar() > 0.0 {
            Ok(())
        } else {
            Err(Error::UndefinedPosterior {
                eta: self.eta(),
                mean: self.per_mode_mean(),
            })
        }
    }

    /// Probability that exactly one photon pair existed in the whole system
    /// given that delay `i` fired the trigger.
    ///
    /// Bose-Einstein uses the closed form from the module docs; Poisson modes
    /// go through the factor-by-factor composition.
    pub fn certification(&self, i: u32) -> Result<f64> {
        self.check_delay(i)?;
        self.check_posterior()?;
        match self.kind {
            StatisticsKind::BoseEinstein => {
                let nd = self.num_delays as f64;
                let denom = nd + self.nbar();
                let seen = (nd + self.eta() * self.nbar()) / denom;
                let vacuum = nd / denom;
                Ok(seen.powi(i as i32) * vacuum.powi((self.num_delays + 1 - i) as i32))
            }
            StatisticsKind::Poisson => self.certification_composed(i),
        }
    }

    /// Certification as the product of the per-mode posteriors: every earlier
    /// silent mode empty, the firing mode holding exactly one photon, and
    /// every later mode empty.
    pub fn certification_composed(&self, i: u32) -> Result<f64> {
        self.check_delay(i)?;
        self.check_posterior()?;
        let mode = self.per_mode();
        let earlier_empty = 1.0 - mode.p_some_photon_given_no_fire(self.eta);
        let firing_single = mode.posterior_given_fire(self.eta, 1)?;
        let later_empty = mode.pmf(0);
        Ok(earlier_empty.powi(i as i32 - 1)
            * firing_single
            * later_empty.powi((self.num_delays - i) as i32))
    }

    /// Probability that delay `i` is the one that fires the trigger.
    pub fn delay_fire_prob(&self, i: u32) -> Result<f64> {
        self.check_delay(i)?;
        let mode = self.per_mode();
        Ok(mode.p_no_fire(self.eta).powi(i as i32 - 1) * mode.p_fire(self.eta))
    }

    /// Probability that no delay fires the trigger.
    pub fn no_trigger_prob(&self) -> f64 {
        self.per_mode()
            .p_no_fire(self.eta)
            .powi(self.num_delays as i32)
    }

    /// Probability that the trigger fires at all, `1 - no_trigger_prob`,
    /// evaluated without cancellation.
    pub fn trigger_prob(&self) -> f64 {
        let nd = self.num_delays as f64;
        let x = self.eta() * self.nbar();
        match self.kind {
            StatisticsKind::BoseEinstein => -(-nd * (x / nd).ln_1p()).exp_m1(),
            StatisticsKind::Poisson => -(-x).exp_m1(),
        }
    }

    /// Probability of the event `event`: no trigger for index 0, otherwise
    /// [`Self::delay_fire_prob`].
    pub fn event_prob(&self, event: TriggerEvent) -> Result<f64> {
        match event.delay_index() {
            0 => Ok(self.no_trigger_prob()),
            i => self.delay_fire_prob(i),
        }
    }

    /// Probability that exactly one photon is emitted per pump pulse,
    /// heralded or not. Independent of `eta`; for Poisson modes also of `N_D`.
    pub fn single_photon_prob(&self) -> f64 {
        let nbar = self.nbar();
        match self.kind {
            StatisticsKind::BoseEinstein => {
                let nd = self.num_delays as f64;
                nbar * (nd / (nbar + nd)).powi(self.num_delays as i32 + 1)
            }
            StatisticsKind::Poisson => nbar * (-nbar).exp(),
        }
    }

    /// Sum over delays of certification times occurrence, plus the
    /// unheralded term with exactly one undetected photon and all other modes
    /// empty.
    pub fn single_photon_prob_composed(&self) -> f64 {
        let mode = self.per_mode();
        let nd = self.num_delays;
        let unheralded = nd as f64
            * mode.pmf(0).powi(nd as i32 - 1)
            * (1.0 - self.eta())
            * mode.pmf(1);
        if self.check_posterior().is_err() {
            return unheralded;
        }
        self.heralded_single_sum() + unheralded
    }

    fn heralded_single_sum(&self) -> f64 {
        (1..=self.num_delays)
            .map(|i| {
                self.certification_composed(i).expect("posterior defined")
                    * self.delay_fire_prob(i).expect("index in range")
            })
            .sum()
    }

    /// Probability of exactly one photon given that the trigger fired.
    pub fn single_photon_prob_given_trigger(&self) -> Result<f64> {
        self.check_conditioning()?;
        let nbar = self.nbar();
        let numerator = match self.kind {
            StatisticsKind::BoseEinstein => {
                let nd = self.num_delays as f64;
                nbar * self.eta() * (nd / (nbar + nd)).powi(self.num_delays as i32 + 1)
            }
            StatisticsKind::Poisson => nbar * self.eta() * (-nbar).exp(),
        };
        Ok(numerator / self.trigger_prob())
    }

    /// Heralded sum of certification times occurrence, renormalised by the
    /// trigger probability.
    pub fn single_photon_prob_given_trigger_composed(&self) -> Result<f64> {
        self.check_conditioning()?;
        Ok(self.heralded_single_sum() / (1.0 - self.no_trigger_prob()))
    }

    fn check_conditioning(&self) -> Result<()> {
        if self.eta() > 0.0 && self.nbar() > 0.0 {
            Ok(())
        } else {
            Err(Error::UndefinedConditioning {
                eta: self.eta(),
                nbar: self.nbar(),
            })
        }
    }

    /// Everything about one configuration at a glance.
    pub fn report(&self) -> CertificationReport {
        let per_delay = (1..=self.num_delays)
            .map(|i| DelayCertification {
                delay: i,
                certification: self.certification(i).ok(),
                occurrence: self.delay_fire_prob(i).expect("index in range"),
            })
            .collect();
        let poisson = self.with_kind(StatisticsKind::Poisson);
        CertificationReport {
            config: *self,
            per_delay,
            p_no_trigger: self.no_trigger_prob(),
            p_single: self.single_photon_prob(),
            p_single_given_trigger: self.single_photon_prob_given_trigger().ok(),
            poisson_limit_p_single: poisson.single_photon_prob(),
            poisson_limit_given_trigger: poisson.single_photon_prob_given_trigger().ok(),
        }
    }
}

/// Which delay fired the trigger; 0 means none did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriggerEvent(u32);

impl TriggerEvent {
    pub const NONE: TriggerEvent = TriggerEvent(0);

    pub fn new(delay_index: u32, num_delays: u32) -> Result<Self> {
        if delay_index <= num_delays {
            Ok(Self(delay_index))
        } else {
            Err(Error::DelayOutOfRange {
                index: delay_index,
                num_delays,
            })
        }
    }

    pub fn delay_index(self) -> u32 {
        self.0
    }

    pub fn fired(self) -> bool {
        self.0 != 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayCertification {
    pub delay: u32,
    /// `None` when the trigger can never fire.
    pub certification: Option<f64>,
    pub occurrence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub config: MultiplexConfig,
    pub per_delay: Vec<DelayCertification>,
    pub p_no_trigger: f64,
    pub p_single: f64,
    pub p_single_given_trigger: Option<f64>,
    pub poisson_limit_p_single: f64,
    pub poisson_limit_given_trigger: Option<f64>,
}

/// Grid spacing used to bracket the optimum before refinement.
const OPTIMUM_COARSE_STEP: f64 = 0.05;
const OPTIMUM_LOWER: f64 = 1e-6;
const OPTIMUM_UPPER: f64 = 16.0;
const OPTIMUM_TOL: f64 = 1e-8;

/// System mean photon number in `(0, 16]` that maximises
/// [`MultiplexConfig::single_photon_prob`].
///
/// A coarse grid locates and brackets the peak and confirms the objective
/// rises then falls; golden-section search then refines the bracket to
/// `1e-8` in `nbar`.
pub fn optimal_mean(
    eta: QuantumEfficiency,
    num_delays: u32,
    kind: StatisticsKind,
) -> Result<MeanPhotonNumber> {
    let objective = |nbar: f64| -> Result<f64> {
        Ok(MultiplexConfig::new(nbar, eta.get(), num_delays, kind)?.single_photon_prob())
    };

    let steps = ((OPTIMUM_UPPER - OPTIMUM_LOWER) / OPTIMUM_COARSE_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| (OPTIMUM_LOWER + k as f64 * OPTIMUM_COARSE_STEP).min(OPTIMUM_UPPER))
        .collect();
    let values = grid.iter().map(|&x| objective(x)).collect::<Result<Vec<_>>>()?;

    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty grid");
    let rising = values[..=peak].windows(2).all(|w| w[1] >= w[0]);
    let falling = values[peak..].windows(2).all(|w| w[1] <= w[0]);
    if !(rising && falling) {
        return Err(Error::NotUnimodal);
    }

    let mut lo = grid[peak.saturating_sub(1)];
    let mut hi = grid[(peak + 1).min(grid.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while hi - lo > OPTIMUM_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1)?;
        }
    }
    MeanPhotonNumber::new(0.5 * (lo + hi))
}

/// Single-photon fractions of four pulsed sources at the same `nbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceComparison {
    /// Attenuated laser: Poisson light, no herald.
    pub faint_laser: f64,
    /// One Bose-Einstein mode, no use of the herald.
    pub conventional_unheralded: f64,
    /// One Bose-Einstein mode, conditioned on the herald.
    pub conventional_heralded: f64,
    /// `N_D` delay-multiplexed modes, conditioned on the herald.
    pub multiplexed_heralded: f64,
}

pub fn source_comparison(nbar: f64, eta: f64, num_delays: u32) -> Result<SourceComparison> {
    let conventional = MultiplexConfig::bose_einstein(nbar, eta, 1)?;
    let multiplexed = MultiplexConfig::bose_einstein(nbar, eta, num_delays)?;
    Ok(SourceComparison {
        faint_laser: conventional.with_kind(StatisticsKind::Poisson).single_photon_prob(),
        conventional_unheralded: conventional.single_photon_prob(),
        conventional_heralded: conventional.single_photon_prob_given_trigger()?,
        multiplexed_heralded: multiplexed.single_photon_prob_given_trigger()?,
    })
}

/// Ordered optical surfaces between the crystal and the output port.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    surfaces: Vec<f64>,
}

impl LossModel {
    pub fn new(surfaces: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = surfaces.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::domain("surface transmittance", bad, "in [0, 1]"));
        }
        Ok(Self { surfaces })
    }

    /// `count` identical surfaces.
    pub fn uniform(count: usize, transmittance: f64) -> Result<Self> {
        Self::new(vec![transmittance; count])
    }

    pub fn surfaces(&self) -> &[f64] {
        &self.surfaces
    }

    pub fn net_transmittance(&self) -> f64 {
        self.surfaces.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub net_transmittance: f64,
    pub net_loss: f64,
}

pub fn loss_budget(model: &LossModel) -> LossBudget {
    let net_transmittance = model.net_transmittance();
    LossBudget {
        net_transmittance,
        net_loss: 1.0 - net_transmittance,
    }
}

/// Output statistics of the switched-array source: the lowest-index heralded
/// channel is routed to the output through a path of net transmittance
/// `transmittance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayEmission {
    pub herald_prob: f64,
    pub emitted_one: f64,
    pub emitted_multi: f64,
    pub emitted_at_least_one_given_herald: Option<f64>,
    /// Probability that the twin of the detected herald photon survives.
    pub heralded_photon_emitted: f64,
}

/// Exact output statistics of the switched array, summed over channel photon
/// numbers up to the truncation bound.
pub fn switched_array_emission(cfg: &MultiplexConfig, transmittance: f64) -> Result<ArrayEmission> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(Error::domain("output transmittance", transmittance, "in [0, 1]"));
    }
    let mode = cfg.per_mode();
    let silent = mode.p_no_fire(cfg.efficiency());
    // sum over channels j of silent^(j-1): weight of "channel j selected".
    let selection: f64 = (0..cfg.num_delays()).map(|j| silent.powi(j as i32)).sum();
    let loss = 1.0 - transmittance;

    let mut herald = 0.0;
    let mut one = 0.0;
    let mut none_given_count = 0.0;
    for n in 1..=mode.truncation_bound().max(1) {
        let w = selection * crate::stats::detector_fire_prob(cfg.efficiency(), n) * mode.pmf(n);
        herald += w;
        none_given_count += w * crate::stats::powu(loss, n);
        one += w * n as f64 * transmittance * crate::stats::powu(loss, n - 1);
    }
    let at_least_one = herald - none_given_count;
    Ok(ArrayEmission {
        herald_prob: herald,
        emitted_one: one,
        emitted_multi: at_least_one - one,
        emitted_at_least_one_given_herald: (herald > 0.0).then(|| at_least_one / herald),
        heralded_photon_emitted: transmittance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXACT: f64 = 1e-12;

    fn be(nbar: f64, eta: f64, nd: u32) -> MultiplexConfig {
        MultiplexConfig::bose_einstein(nbar, eta, nd).unwrap()
    }

    #[test]
    fn certification_examples() {
        assert!((be(1.0, 1.0, 1).certification(1).unwrap() - 0.5).abs() < EXACT);
        assert!((be(1.0, 1.0, 8).certification(8).unwrap() - 8.0 / 9.0).abs() < EXACT);
        let first = be(1.0, 1.0, 8).certification(1).unwrap();
        assert!((first - (8.0f64 / 9.0).powi(8)).abs() < EXACT);
    }

    #[test]
    fn certification_rejects_bad_index() {
        let cfg = be(1.0, 1.0, 4);
        assert!(matches!(
            cfg.certification(0),
            Err(Error::DelayOutOfRange { index: 0, num_delays: 4 })
        ));
        assert!(cfg.certification(5).is_err());
        assert!(cfg.delay_fire_prob(5).is_err());
        assert!(cfg.delay_fire_prob(0).is_err());
    }

    #[test]
    fn certification_undefined_for_blind_detector() {
        assert!(matches!(
            be(1.0, 0.0, 4).certification(1),
            Err(Error::UndefinedPosterior { .. })
        ));
    }

    #[test]
    fn delay_fire_examples() {
        let cfg = be(1.0, 1.0, 8);
        assert!((cfg.delay_fire_prob(1).unwrap() - 1.0 / 9.0).abs() < EXACT);
        let ratio = cfg.delay_fire_prob(1).unwrap() / cfg.delay_fire_prob(8).unwrap();
        assert!((ratio - (9.0f64 / 8.0).powi(7)).abs() < EXACT);
        for i in 1..=8 {
            assert_eq!(be(1.0, 0.0, 8).delay_fire_prob(i).unwrap(), 0.0);
        }
    }

    #[test]
    fn delay_fire_matches_geometric_form() {
        // eta*nbar/N_D * (N_D/(eta*nbar + N_D))^i
        for (nbar, eta, nd) in [(1.0, 1.0, 8u32), (0.5, 0.75, 4), (2.0, 0.5, 2)] {
            let cfg = be(nbar, eta, nd);
            let ndf = nd as f64;
            for i in 1..=nd {
                let geometric = eta * nbar / ndf * (ndf / (eta * nbar + ndf)).powi(i as i32);
                assert!((cfg.delay_fire_prob(i).unwrap() - geometric).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn no_trigger_examples() {
        assert_eq!(be(1.0, 0.0, 8).no_trigger_prob(), 1.0);
        assert!((be(1.0, 1.0, 8).no_trigger_prob() - (8.0f64 / 9.0).powi(8)).abs() < EXACT);
        assert!((be(1.0, 1.0, 1).no_trigger_prob() - 0.5).abs() < EXACT);
        let p = MultiplexConfig::poisson(1.5, 0.5, 3).unwrap();
        assert!((p.no_trigger_prob() - (-0.75f64).exp()).abs() < EXACT);
    }

    #[test]
    fn single_photon_examples() {
        assert!((be(1.0, 1.0, 1).single_photon_prob() - 0.25).abs() < EXACT);
        assert!((be(1.0, 1.0, 8).single_photon_prob() - (8.0f64 / 9.0).powi(9)).abs() < EXACT);
        let laser = MultiplexConfig::poisson(1.0, 1.0, 1).unwrap();
        assert!((laser.single_photon_prob() - (-1.0f64).exp()).abs() < EXACT);
    }

    #[test]
    fn single_photon_independent_of_eta_and_poisson_of_nd() {
        let base = be(1.3, 1.0, 5).single_photon_prob();
        for eta in [0.1, 0.5, 1.0] {
            assert_eq!(be(1.3, eta, 5).single_photon_prob(), base);
        }
        let p = MultiplexConfig::poisson(1.3, 1.0, 1).unwrap().single_photon_prob();
        for nd in [1, 2, 7, 64] {
            for eta in [0.1, 1.0] {
                assert_eq!(MultiplexConfig::poisson(1.3, eta, nd).unwrap().single_photon_prob(), p);
            }
        }
    }

    #[test]
    fn given_trigger_examples() {
        assert!((be(1.0, 1.0, 1).single_photon_prob_given_trigger().unwrap() - 0.5).abs() < EXACT);
        let mux = be(1.0, 1.0, 8).single_photon_prob_given_trigger().unwrap();
        assert!((mux - 0.5678).abs() < 5e-4, "{mux}");
        let laser = MultiplexConfig::poisson(1.0, 1.0, 8).unwrap();
        let e = (-1.0f64).exp();
        assert!((laser.single_photon_prob_given_trigger().unwrap() - e / (1.0 - e)).abs() < EXACT);
        assert!(matches!(
            be(1.0, 0.0, 8).single_photon_prob_given_trigger(),
            Err(Error::UndefinedConditioning { .. })
        ));
        assert!(be(0.0, 1.0, 8).single_photon_prob_given_trigger().is_err());
    }

    #[test]
    fn optimal_mean_is_one() {
        for kind in [StatisticsKind::BoseEinstein, StatisticsKind::Poisson] {
            for nd in [1, 2, 4, 8] {
                let eta = QuantumEfficiency::new(0.7).unwrap();
                let m = optimal_mean(eta, nd, kind).unwrap().get();
                assert!((m - 1.0).abs() < 1e-6, "{kind} nd={nd}: {m}");
            }
        }
    }

    #[test]
    fn comparison_examples() {
        let c = source_comparison(1.0, 1.0, 8).unwrap();
        assert!((c.faint_laser - (-1.0f64).exp()).abs() < EXACT);
        assert!((c.conventional_unheralded - 0.25).abs() < EXACT);
        assert!((c.conventional_heralded - 0.5).abs() < EXACT);
        assert!((c.multiplexed_heralded - 0.5678).abs() < 5e-4);

        let lossy = source_comparison(1.0, 0.5, 8).unwrap();
        // frozen from an independent evaluation of 0.5 (8/9)^9 / (1 - (8/8.5)^8)
        assert!((lossy.multiplexed_heralded - 0.4507397453927234).abs() < 1e-12);

        let rare = source_comparison(1e-9, 1.0, 8).unwrap();
        assert!(rare.faint_laser < 1e-8);
        assert!(rare.conventional_unheralded < 1e-8);
        assert!(rare.conventional_heralded > 1.0 - 1e-8);
        assert!(rare.multiplexed_heralded > 1.0 - 1e-8);
    }

    #[test]
    fn loss_examples() {
        let b = loss_budget(&LossModel::uniform(15, 0.995).unwrap());
        assert!((b.net_loss - 0.0724).abs() < 5e-4);
        assert_eq!(loss_budget(&LossModel::default()).net_loss, 0.0);
        let one = loss_budget(&LossModel::new(vec![0.9]).unwrap());
        assert!((one.net_loss - 0.1).abs() < 1e-15);
        assert!(LossModel::new(vec![0.9, 1.1]).is_err());
    }

    #[test]
    fn trigger_event_bounds() {
        assert!(TriggerEvent::new(8, 8).is_ok());
        assert!(TriggerEvent::new(9, 8).is_err());
        assert!(!TriggerEvent::NONE.fired());
    }

    #[test]
    fn array_emission_unit_transmittance() {
        let cfg = be(1.0, 1.0, 8);
        let a = switched_array_emission(&cfg, 1.0).unwrap();
        assert!((a.herald_prob - (1.0 - cfg.no_trigger_prob())).abs() < 1e-12);
        assert!((a.emitted_at_least_one_given_herald.unwrap() - 1.0).abs() < 1e-12);
        // pmf(1) (1 - pmf(0)^8) / (1 - pmf(0)) with m = 1/8
        let expected = (8.0 / 81.0) * (1.0 - (8.0f64 / 9.0).powi(8)) / (1.0 / 9.0);
        assert!((a.emitted_one - expected).abs() < 1e-12);
        assert!(a.emitted_one > be(1.0, 1.0, 1).single_photon_prob());
    }

    #[test]
    fn array_emission_lossy_output() {
        let t = 0.995f64.powi(15);
        let cfg = be(1.0, 1.0, 8);
        let a = switched_array_emission(&cfg, t).unwrap();
        // selected channel holds 1 + BE(m) photons at eta = 1
        let m = 1.0 / 8.0;
        let expected = 1.0 - (1.0 - t) / (1.0 + t * m);
        assert!((a.emitted_at_least_one_given_herald.unwrap() - expected).abs() < 1e-12);
        assert_eq!(a.heralded_photon_emitted, t);
    }
}

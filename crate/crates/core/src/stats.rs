//! Single-mode photon-number laws and the response of one trigger detector.
//!
//! Everything here is a pure function of its arguments. Closed forms are used
//! for evaluation; [`series`] holds the truncated sums they are checked
//! against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean photon number per pulse, either for a single mode or for a whole
/// system of modes.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MeanPhotonNumber(f64);

impl MeanPhotonNumber {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::domain("mean photon number", value, "finite and >= 0"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for MeanPhotonNumber {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<MeanPhotonNumber> for f64 {
    fn from(m: MeanPhotonNumber) -> f64 {
        m.0
    }
}

/// Probability that the detector fires when exactly one photon is incident.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QuantumEfficiency(f64);

impl QuantumEfficiency {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::domain("quantum efficiency", value, "in [0, 1]"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for QuantumEfficiency {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<QuantumEfficiency> for f64 {
    fn from(e: QuantumEfficiency) -> f64 {
        e.0
    }
}

/// Photon-number statistics of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticsKind {
    /// Thermal single-mode light, `P(n) = m^n / (1+m)^(n+1)`.
    BoseEinstein,
    /// Coherent light, `P(n) = m^n e^-m / n!`.
    Poisson,
}

impl StatisticsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StatisticsKind::BoseEinstein => "bose-einstein",
            StatisticsKind::Poisson => "poisson",
        }
    }
}

impl fmt::Display for StatisticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatisticsKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "be" | "bose-einstein" | "bose_einstein" | "thermal" => Ok(StatisticsKind::BoseEinstein),
            "poisson" | "coherent" => Ok(StatisticsKind::Poisson),
            _ => Err(Error::Parse(format!(
                "unknown statistics kind `{s}` (expected `bose-einstein` or `poisson`)"
            ))),
        }
    }
}

/// Photon-number law of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonNumberDistribution {
    kind: StatisticsKind,
    mean: MeanPhotonNumber,
}

/// Tail mass below which truncated sums are considered complete.
pub const SERIES_TAIL_BOUND: f64 = 1e-14;

/// Hard cap on the number of terms of any truncated sum.
pub const SERIES_MAX_TERMS: u64 = 10_000;

impl PhotonNumberDistribution {
    pub fn new(kind: StatisticsKind, mean: MeanPhotonNumber) -> Self {
        Self { kind, mean }
    }

    pub fn bose_einstein(mean: f64) -> Result<Self> {
        Ok(Self::new(StatisticsKind::BoseEinstein, MeanPhotonNumber::new(mean)?))
    }

    pub fn poisson(mean: f64) -> Result<Self> {
        Ok(Self::new(StatisticsKind::Poisson, MeanPhotonNumber::new(mean)?))
    }

    pub fn kind(&self) -> StatisticsKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean.get()
    }

    /// Probability of exactly `n` photons in the mode.
    pub fn pmf(&self, n: u64) -> f64 {
        let m = self.mean();
        match self.kind {
            StatisticsKind::BoseEinstein => {
                let ratio = m / (1.0 + m);
                powu(ratio, n) / (1.0 + m)
            }
            StatisticsKind::Poisson => {
                // m^n / n! as a running product keeps large n from overflowing.
                let mut term = (-m).exp();
                for k in 1..=n {
                    term *= m / k as f64;
                    if term == 0.0 {
                        break;
                    }
                }
                term
            }
        }
    }

    /// Total probability that a detector of efficiency `eta` stays silent,
    /// `sum_k (1-eta)^k P(k)`.
    pub fn p_no_fire(&self, eta: QuantumEfficiency) -> f64 {
        let x = eta.get() * self.mean();
        match self.kind {
            StatisticsKind::BoseEinstein => 1.0 / (1.0 + x),
            StatisticsKind::Poisson => (-x).exp(),
        }
    }

    /// `1 - p_no_fire`, evaluated without cancellation for small `eta * mean`.
    pub fn p_fire(&self, eta: QuantumEfficiency) -> f64 {
        let x = eta.get() * self.mean();
        match self.kind {
            StatisticsKind::BoseEinstein => x / (1.0 + x),
            StatisticsKind::Poisson => -(-x).exp_m1(),
        }
    }

    /// Probability that one or more photons were present given that the
    /// detector did not fire.
    pub fn p_some_photon_given_no_fire(&self, eta: QuantumEfficiency) -> f64 {
        let m = self.mean();
        let miss = 1.0 - eta.get();
        match self.kind {
            StatisticsKind::BoseEinstein => m * miss / (1.0 + m),
            StatisticsKind::Poisson => -(-miss * m).exp_m1(),
        }
    }

    /// Probability that exactly `n` photons were incident given that the
    /// detector fired. Returns 0 for `n = 0`.
    pub fn posterior_given_fire(&self, eta: QuantumEfficiency, n: u64) -> Result<f64> {
        let fire = self.p_fire(eta);
        if fire <= 0.0 {
            return Err(Error::UndefinedPosterior {
                eta: eta.get(),
                mean: self.mean(),
            });
        }
        if n == 1 {
            // Dedicated single-photon form: eta * P(1) / p_fire, simplified.
            let m = self.mean();
            let e = eta.get();
            return Ok(match self.kind {
                StatisticsKind::BoseEinstein => (1.0 + e * m) / ((1.0 + m) * (1.0 + m)),
                StatisticsKind::Poisson => e * m * (-m).exp() / fire,
            });
        }
        Ok(detector_fire_prob(eta, n) * self.pmf(n) / fire)
    }

    /// Smallest `N` for which the mass beyond `N` is below
    /// [`SERIES_TAIL_BOUND`], capped at [`SERIES_MAX_TERMS`].
    ///
    /// Bose-Einstein: the tail past `N` is exactly `r^(N+1)` with
    /// `r = m/(1+m)`. Poisson: the tail is bounded by
    /// `P(N+1) / (1 - m/(N+2))` once `N + 2 > m`.
    pub fn truncation_bound(&self) -> u64 {
        let m = self.mean();
        if m == 0.0 {
            return 0;
        }
        match self.kind {
            StatisticsKind::BoseEinstein => {
                let r = m / (1.0 + m);
                // r^(N+1) < bound  <=>  N + 1 > ln(bound)/ln(r); the two loops
                // only correct rounding in the logarithms.
                let guess = (SERIES_TAIL_BOUND.ln() / r.ln()).floor();
                let mut n = (guess as u64).min(SERIES_MAX_TERMS);
                while n < SERIES_MAX_TERMS && powu(r, n + 1) >= SERIES_TAIL_BOUND {
                    n += 1;
                }
                while n > 0 && powu(r, n) < SERIES_TAIL_BOUND {
                    n -= 1;
                }
                n
            }
            StatisticsKind::Poisson => {
                let mut n = m.ceil() as u64;
                loop {
                    let next = self.pmf(n + 1);
                    let ratio = m / (n + 2) as f64;
                    if ratio < 1.0 && next / (1.0 - ratio) < SERIES_TAIL_BOUND {
                        return n;
                    }
                    if n >= SERIES_MAX_TERMS {
                        return SERIES_MAX_TERMS;
                    }
                    n += 1;
                }
            }
        }
    }
}

/// Probability that a detector of efficiency `eta` fires when `n` photons
/// are incident, `1 - (1-eta)^n`.
pub fn detector_fire_prob(eta: QuantumEfficiency, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.0 - powu(1.0 - eta.get(), n)
}

pub(crate) fn powu(base: f64, exp: u64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// Direct summation of the infinite sums that the closed forms replace,
/// truncated at [`PhotonNumberDistribution::truncation_bound`].
pub mod series {
    use super::{detector_fire_prob, powu, PhotonNumberDistribution, QuantumEfficiency};

    pub fn normalization(dist: &PhotonNumberDistribution) -> f64 {
        (0..=dist.truncation_bound()).map(|n| dist.pmf(n)).sum()
    }

    pub fn mean(dist: &PhotonNumberDistribution) -> f64 {
        (0..=dist.truncation_bound())
            .map(|n| n as f64 * dist.pmf(n))
            .sum()
    }

    pub fn p_no_fire(dist: &PhotonNumberDistribution, eta: QuantumEfficiency) -> f64 {
        let miss = 1.0 - eta.get();
        (0..=dist.truncation_bound())
            .map(|k| powu(miss, k) * dist.pmf(k))
            .sum()
    }

    pub fn p_some_photon_given_no_fire(
        dist: &PhotonNumberDistribution,
        eta: QuantumEfficiency,
    ) -> f64 {
        let miss = 1.0 - eta.get();
        let some: f64 = (1..=dist.truncation_bound())
            .map(|k| powu(miss, k) * dist.pmf(k))
            .sum();
        some / p_no_fire(dist, eta)
    }

    /// `None` when the detector can never fire.
    pub fn posterior_given_fire(
        dist: &PhotonNumberDistribution,
        eta: QuantumEfficiency,
        n: u64,
    ) -> Option<f64> {
        let norm: f64 = (0..=dist.truncation_bound())
            .map(|i| detector_fire_prob(eta, i) * dist.pmf(i))
            .sum();
        (norm > 0.0).then(|| detector_fire_prob(eta, n) * dist.pmf(n) / norm)
    }
}

//! Global depolarization on output distributions, seeded sampling, and the
//! uniform-sampler error certificates.
//!
//! The depolarized distribution is `p'_z = F p_z + (1 - F) / 2^n`. Both
//! certificates measure how well the uniform distribution `2^-n` approximates
//! `p'`: per outcome relative to `p'_z` (multiplicative), or in total L1
//! distance (additive).

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::seeded_rng;
use crate::statevector::Distribution;

/// Weight of the ideal component in the depolarized mixture.
///
/// Admits the closed interval `[0, 1]`: `F = 0` is the fully mixed output and
/// `F = 1` the ideal one. Operations that need a narrower range check it
/// themselves.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Fidelity(f64);

impl Fidelity {
    pub const ZERO: Fidelity = Fidelity(0.0);
    pub const ONE: Fidelity = Fidelity(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Fidelity(value))
        } else {
            Err(Error::InvalidFidelity(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Fidelity {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Fidelity::new(value)
    }
}

/// `F p + (1 - F) / 2^n`, entrywise.
pub fn depolarize(dist: &Distribution, f: Fidelity) -> Distribution {
    let f = f.value();
    let noise = (1.0 - f) / dist.len() as f64;
    let probs = dist.probs().iter().map(|p| f * p + noise).collect();
    Distribution::from_probs_unchecked(dist.width(), probs)
}

/// Outcome counts from a sampling run. Zero counts are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tally {
    width: usize,
    total: u64,
    counts: BTreeMap<usize, u64>,
}

impl Tally {
    pub fn new(width: usize) -> Self {
        Tally {
            width,
            total: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, z: usize) {
        *self.counts.entry(z).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, z: usize) -> u64 {
        self.counts.get(&z).copied().unwrap_or(0)
    }

    /// Nonzero entries in increasing outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&z, &c)| (z, c))
    }
}

/// Inverse-CDF sampler over outcomes in increasing index order.
#[derive(Debug, Clone)]
pub struct CdfSampler {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl CdfSampler {
    pub fn new(dist: &Distribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = dist.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0);
        CdfSampler { cdf, last_positive }
    }

    /// Maps `u` in `[0, 1)` to an outcome.
    pub fn outcome(&self, u: f64) -> usize {
        let total = *self.cdf.last().expect("nonempty distribution");
        let target = u * total;
        let z = self.cdf.partition_point(|&c| c <= target);
        z.min(self.last_positive)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.outcome(rng.gen::<f64>())
    }
}

/// `count` i.i.d. draws from `dist`. The result depends only on
/// `(dist, seed, count)`.
pub fn sample(dist: &Distribution, seed: u64, count: u64) -> Tally {
    let sampler = CdfSampler::new(dist);
    let mut rng = seeded_rng(seed);
    let mut tally = Tally::new(dist.width());
    for _ in 0..count {
        tally.record(sampler.draw(&mut rng));
    }
    tally
}

/// Total-variation distance between the empirical frequencies and `dist`.
pub fn empirical_tv(counts: &Tally, dist: &Distribution) -> Result<f64> {
    if counts.width() != dist.width() {
        return Err(Error::WidthMismatch {
            left: counts.width(),
            right: dist.width(),
        });
    }
    if counts.total() == 0 {
        return Err(Error::Precondition("empirical_tv needs at least one sample".into()));
    }
    let n = counts.total() as f64;
    let sum: f64 = dist
        .probs()
        .iter()
        .enumerate()
        .map(|(z, p)| (counts.get(z) as f64 / n - p).abs())
        .sum();
    Ok(0.5 * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    /// Per outcome: `|p'_z - 2^-n| <= eps p'_z` with `eps = F 2^(n+2)`, `F <= 1/2`.
    UniformMultiplicative,
    /// Total: `sum_z |p'_z - 2^-n| <= 2F`.
    UniformAdditive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub theorem: CertificateKind,
    pub bound: f64,
    pub achieved: f64,
    pub witness: usize,
    pub passed: bool,
    /// Additive only: `F sum_z |p_z - 2^-n|`, which must equal `achieved`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
}

/// Index of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (z, v)| if v > best.1 { (z, v) } else { best })
}

/// Additive certificate for the uniform sampler against the depolarized
/// version of the ideal distribution `dist`.
pub fn additive_certificate(dist: &Distribution, f: Fidelity) -> CertificateReport {
    let u = 1.0 / dist.len() as f64;
    let noisy = depolarize(dist, f);
    let deviations = noisy.probs().iter().map(|p| (p - u).abs());
    let achieved: f64 = deviations.clone().sum();
    let (witness, _) = argmax(deviations);
    let ideal_l1: f64 = dist.probs().iter().map(|p| (p - u).abs()).sum();
    let bound = 2.0 * f.value();
    CertificateReport {
        theorem: CertificateKind::UniformAdditive,
        bound,
        achieved,
        witness,
        passed: achieved <= bound,
        identity: Some(f.value() * ideal_l1),
    }
}

/// Multiplicative certificate for the uniform sampler against the
/// depolarized version of `dist`. Requires `F <= 1/2`; passing is strict.
pub fn multiplicative_certificate(dist: &Distribution, f: Fidelity) -> Result<CertificateReport> {
    if f.value() > 0.5 {
        return Err(Error::Precondition(format!(
            "multiplicative uniform-sampler certificate requires F <= 1/2, got {}",
            f.value()
        )));
    }
    let n = dist.width() as i32;
    let bound = f.value() * 2f64.powi(n + 2);
    if f.value() == 0.0 {
        // p' is exactly uniform
        return Ok(CertificateReport {
            theorem: CertificateKind::UniformMultiplicative,
            bound,
            achieved: 0.0,
            witness: 0,
            passed: true,
            identity: None,
        });
    }
    let u = 1.0 / dist.len() as f64;
    let noisy = depolarize(dist, f);
    let (witness, achieved) = argmax(noisy.probs().iter().map(|p| (p - u).abs() / p));
    Ok(CertificateReport {
        theorem: CertificateKind::UniformMultiplicative,
        bound,
        achieved,
        witness,
        passed: achieved < bound,
        identity: None,
    })
}

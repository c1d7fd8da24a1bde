//! Count-based estimators with first-order Poisson error propagation, the
//! `|Phi+>` witness, weighted averages over situations, threshold
//! significance and fidelity histograms.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{BellKind, StateLabel};

/// Upper bound on the average single-qubit fidelity without prior
/// entanglement, as used for the threshold comparison.
pub const SINGLE_QUBIT_THRESHOLD: f64 = 0.9503;

/// The same bound as quoted elsewhere to four digits; kept for reporting.
pub const SINGLE_QUBIT_THRESHOLD_ALT: f64 = 0.9504;

/// Upper bound on the average entanglement fidelity without prior
/// entanglement.
pub const ENTANGLEMENT_THRESHOLD: f64 = 0.9256;

/// Default histogram bin width.
pub const DEFAULT_BIN_WIDTH: f64 = 0.005;

/// Coincidence counts for the `+1` and `-1` analyzer outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n_plus: u64,
    pub n_minus: u64,
}

impl CountRecord {
    pub fn new(n_plus: u64, n_minus: u64) -> Self {
        Self { n_plus, n_minus }
    }

    pub fn total(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    /// `sqrt(n+ n- / N^3)`, the propagated error of `n+/N`.
    fn ratio_sigma(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::ZeroCounts);
        }
        let (p, m, n) = (self.n_plus as f64, self.n_minus as f64, total as f64);
        Ok((p * m / (n * n * n)).sqrt())
    }
}

/// A value with its one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    pub fn new(value: f64, sigma: f64) -> Self {
        Self { value, sigma }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, sigma: 0.0 }
    }

    pub fn is_deterministic(&self) -> bool {
        self.sigma == 0.0
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.value, self.sigma)
    }
}

/// `F = N+/(N+ + N-)`.
pub fn fidelity_from_counts(c: &CountRecord) -> Result<Estimate> {
    let sigma = c.ratio_sigma()?;
    Ok(Estimate::new(c.n_plus as f64 / c.total() as f64, sigma))
}

/// `<O> = (N+ - N-)/(N+ + N-)`.
pub fn expectation_from_counts(c: &CountRecord) -> Result<Estimate> {
    let sigma = 2.0 * c.ratio_sigma()?;
    let value = (c.n_plus as f64 - c.n_minus as f64) / c.total() as f64;
    Ok(Estimate::new(value, sigma))
}

/// Entanglement fidelity from `|Phi+><Phi+| = (II + XX - YY + ZZ)/4` and the
/// witness `<W> = 1/2 - F`.
pub fn witness_fidelity(exx: Estimate, eyy: Estimate, ezz: Estimate) -> Result<(Estimate, Estimate)> {
    for (name, e) in [("<XX>", exx), ("<YY>", eyy), ("<ZZ>", ezz)] {
        if !(-1.0..=1.0).contains(&e.value) {
            return Err(Error::InvalidParameter {
                name,
                value: e.value,
                reason: "expectation of a +/-1 observable must lie in [-1, 1]",
            });
        }
    }
    let value = (1.0 + exx.value - eyy.value + ezz.value) / 4.0;
    let sigma = (exx.sigma.powi(2) + eyy.sigma.powi(2) + ezz.sigma.powi(2)).sqrt() / 4.0;
    Ok((Estimate::new(value, sigma), Estimate::new(0.5 - value, sigma)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultMode {
    State,
    Entanglement,
    Baseline,
}

impl ResultMode {
    pub fn name(self) -> &'static str {
        match self {
            ResultMode::State => "state",
            ResultMode::Entanglement => "entanglement",
            ResultMode::Baseline => "baseline",
        }
    }
}

impl fmt::Display for ResultMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ResultMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "state" => Ok(ResultMode::State),
            "entanglement" => Ok(ResultMode::Entanglement),
            "baseline" => Ok(ResultMode::Baseline),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

/// One measured fidelity: a single stream of one (inputs, outcomes) situation.
#[derive(Debug, Clone, PartialEq)]
pub struct SituationResult {
    pub mode: ResultMode,
    pub phi1: Option<StateLabel>,
    pub phi2: Option<StateLabel>,
    /// Outcomes of the BSMs at S1 and S2 (absent for the baseline).
    pub outcomes: Option<(BellKind, BellKind)>,
    /// 1 for the stream injected at S1, 2 for the stream injected at S2.
    pub stream: u8,
    pub probability_weight: f64,
    pub fidelity: Estimate,
}

fn check_weights(results: &[SituationResult]) -> Result<()> {
    let total: f64 = results.iter().map(|r| r.probability_weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(total));
    }
    Ok(())
}

/// `F = sum_i p_i F_i` with `sigma = sqrt(sum_i p_i^2 sigma_i^2)`.
pub fn weighted_average(results: &[SituationResult]) -> Result<Estimate> {
    check_weights(results)?;
    let value = results
        .iter()
        .map(|r| r.probability_weight * r.fidelity.value)
        .sum();
    let variance: f64 = results
        .iter()
        .map(|r| (r.probability_weight * r.fidelity.sigma).powi(2))
        .sum();
    Ok(Estimate::new(value, variance.sqrt()))
}

/// Number of standard deviations by which `fbar` exceeds `threshold`.
pub fn significance(fbar: Estimate, threshold: f64) -> Result<f64> {
    if fbar.sigma <= 0.0 {
        return Err(Error::ZeroSigma);
    }
    Ok((fbar.value - threshold) / fbar.sigma)
}

/// Draws `N ~ Poisson(total_expected)` coincidences and splits them
/// binomially into `+1` outcomes with probability `true_prob`.
pub fn simulate_counts<R: Rng + ?Sized>(
    true_prob: f64,
    total_expected: f64,
    rng: &mut R,
) -> Result<CountRecord> {
    if !(0.0..=1.0).contains(&true_prob) {
        return Err(Error::InvalidParameter {
            name: "true_prob",
            value: true_prob,
            reason: "must lie in [0, 1]",
        });
    }
    let poisson = Poisson::new(total_expected).map_err(|_| Error::InvalidParameter {
        name: "total_expected",
        value: total_expected,
        reason: "must be positive and finite",
    })?;
    let total = poisson.sample(rng) as u64;
    let n_plus = Binomial::new(total, true_prob)
        .expect("probability checked above")
        .sample(rng);
    Ok(CountRecord::new(n_plus, total - n_plus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Left edge; the bin covers `[lower, lower + width)`.
    pub lower: f64,
    pub width: f64,
    pub mass: f64,
}

/// Probability-weighted histogram of fidelities with left-closed bins
/// aligned to multiples of `bin_width`. Empty bins are omitted.
pub fn histogram(results: &[SituationResult], bin_width: f64) -> Result<Vec<HistogramBin>> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "bin_width",
            value: bin_width,
            reason: "must be positive",
        });
    }
    let total: f64 = results.iter().map(|r| r.probability_weight).sum();
    if total <= 0.0 {
        return Ok(Vec::new());
    }
    let mut bins = std::collections::BTreeMap::<i64, f64>::new();
    for r in results {
        // the small offset keeps exact multiples of the width in their own bin
        let index = (r.fidelity.value / bin_width + 1e-9).floor() as i64;
        *bins.entry(index).or_default() += r.probability_weight / total;
    }
    Ok(bins
        .into_iter()
        .map(|(i, mass)| HistogramBin {
            lower: i as f64 * bin_width,
            width: bin_width,
            mass,
        })
        .collect())
}

/// Flat CSV row: `mode,phi1,phi2,m1n1,m2n2,weight,fidelity,sigma,stream`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub mode: String,
    pub phi1: String,
    pub phi2: String,
    pub m1n1: String,
    pub m2n2: String,
    pub weight: f64,
    pub fidelity: f64,
    pub sigma: f64,
    pub stream: u8,
}

const NONE: &str = "-";

impl From<&SituationResult> for CsvRow {
    fn from(r: &SituationResult) -> Self {
        let label = |l: Option<StateLabel>| l.map_or(NONE.to_owned(), |l| l.symbol().to_owned());
        let frame = |k: Option<BellKind>| k.map_or(NONE.to_owned(), |k| k.frame().to_string());
        Self {
            mode: r.mode.name().to_owned(),
            phi1: label(r.phi1),
            phi2: label(r.phi2),
            m1n1: frame(r.outcomes.map(|o| o.0)),
            m2n2: frame(r.outcomes.map(|o| o.1)),
            weight: r.probability_weight,
            fidelity: r.fidelity.value,
            sigma: r.fidelity.sigma,
            stream: r.stream,
        }
    }
}

impl TryFrom<CsvRow> for SituationResult {
    type Error = Error;

    fn try_from(row: CsvRow) -> Result<Self> {
        let label = |s: &str| -> Result<Option<StateLabel>> {
            if s == NONE {
                Ok(None)
            } else {
                s.parse().map(Some)
            }
        };
        let outcomes = match (row.m1n1.as_str(), row.m2n2.as_str()) {
            (NONE, NONE) => None,
            (a, b) => Some((
                BellKind::from_frame(a.parse()?),
                BellKind::from_frame(b.parse()?),
            )),
        };
        if !(row.stream == 1 || row.stream == 2) {
            return Err(Error::InvalidParameter {
                name: "stream",
                value: row.stream as f64,
                reason: "must be 1 or 2",
            });
        }
        Ok(Self {
            mode: row.mode.parse()?,
            phi1: label(&row.phi1)?,
            phi2: label(&row.phi2)?,
            outcomes,
            stream: row.stream,
            probability_weight: row.weight,
            fidelity: Estimate::new(row.fidelity, row.sigma),
        })
    }
}

/// Aggregate written next to the per-situation results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode: ResultMode,
    pub situations: usize,
    pub fbar: f64,
    pub sigma: f64,
    pub threshold: f64,
    /// `None` when the aggregate has zero sigma.
    pub significance: Option<f64>,
    pub deterministic: bool,
    pub exceeds_threshold: bool,
}

impl Summary {
    pub fn from_results(mode: ResultMode, results: &[SituationResult], threshold: f64) -> Result<Self> {
        let fbar = weighted_average(results)?;
        let significance = significance(fbar, threshold).ok();
        Ok(Self {
            mode,
            situations: results.len(),
            fbar: fbar.value,
            sigma: fbar.sigma,
            threshold,
            significance,
            deterministic: fbar.is_deterministic(),
            exceeds_threshold: fbar.value > threshold,
        })
    }
}

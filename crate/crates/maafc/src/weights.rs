//! Weight sets for analog fountain codes: exact coded-symbol distributions,
//! Gaussian-fit scoring, and stochastic weight-set design.
//!
//! A coded symbol built from a weight set with degree `d` is a sum of `d`
//! summands `±w`, each sign uniform and each weight drawn from the set.
//! Capacity arguments want that sum to look Gaussian, so candidate sets are
//! scored by binning the exact symbol distribution and comparing every bin
//! mass against the matching Gaussian tail integral.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Hard cap on the number of raw outcomes `coded_symbol_pmf` will enumerate.
pub const ENUMERATION_CAP: u128 = 1 << 24;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("weight set must contain at least one weight")]
    Empty,
    #[error("weight {0} is not strictly positive and finite")]
    NonPositive(f64),
    #[error("weights must be strictly descending (found {0} before {1})")]
    NotDescending(f64, f64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("degree {degree} exceeds weight count {f} when drawing without replacement")]
    DegreeExceedsWeights { degree: usize, f: usize },
    #[error("{outcomes} outcomes exceed the enumeration cap of {cap}; too large, use a Monte Carlo estimate")]
    EnumerationTooLarge { outcomes: u128, cap: u128 },
    #[error("bin width delta must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("tolerance epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("i_max must be at least 10, got {0}")]
    BadBinCount(usize),
    #[error("pmf has zero variance; cannot match a Gaussian of its own variance")]
    ZeroVariance,
    #[error("pmf atoms are invalid: {0}")]
    BadPmf(String),
    #[error("cannot parse weight {0:?}")]
    ParseWeight(String),
    #[error("search budget exhausted; best residual {residual} from {best}")]
    SearchBudgetExhausted { best: WeightSet, residual: f64 },
}

// ---------------------------------------------------------------------------
// Weight set
// ---------------------------------------------------------------------------

/// A finite set of positive real weights in strictly descending order.
///
/// Serializes as a JSON array of decimal strings; exact rationals such as
/// `"1/3"` are accepted on input and parsed to binary floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    weights: Vec<f64>,
}

impl WeightSet {
    /// Builds a weight set, enforcing positivity and strict descending order.
    pub fn new(weights: Vec<f64>) -> Result<Self, WeightError> {
        if weights.is_empty() {
            return Err(WeightError::Empty);
        }
        for &w in &weights {
            if !(w > 0.0) || !w.is_finite() {
                return Err(WeightError::NonPositive(w));
            }
        }
        for pair in weights.windows(2) {
            if pair[0] <= pair[1] {
                return Err(WeightError::NotDescending(pair[0], pair[1]));
            }
        }
        Ok(Self { weights })
    }

    /// The set `{1/2, 1/3, 1/5, ...}` of reciprocals of the first `f` primes.
    ///
    /// The eight-weight instance is the reference set used throughout the
    /// experiments.
    pub fn reciprocal_primes(f: usize) -> Result<Self, WeightError> {
        let mut primes = Vec::with_capacity(f);
        let mut n: u64 = 2;
        while primes.len() < f {
            if primes.iter().all(|&p| n % p != 0) {
                primes.push(n);
            }
            n += 1;
        }
        Self::new(primes.iter().map(|&p| 1.0 / p as f64).collect())
    }

    /// Number of weights, `f`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Average weight-set energy: the mean of the squared weights.
    pub fn avg_energy(&self) -> f64 {
        let sum: f64 = self.weights.iter().map(|w| w * w).sum();
        sum / self.weights.len() as f64
    }

    /// Returns the set with every weight multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Result<Self, WeightError> {
        Self::new(self.weights.iter().map(|w| w * scale).collect())
    }
}

impl std::fmt::Display for WeightSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for WeightSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.weights.iter().map(|w| w.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightRepr {
    Text(String),
    Number(f64),
}

fn parse_weight(text: &str) -> Result<f64, WeightError> {
    let bad = || WeightError::ParseWeight(text.to_string());
    if let Some((num, den)) = text.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| bad())?;
        let den: f64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0.0 {
            return Err(bad());
        }
        Ok(num / den)
    } else {
        text.trim().parse().map_err(|_| bad())
    }
}

impl<'de> Deserialize<'de> for WeightSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<WeightRepr>::deserialize(deserializer)?;
        let mut weights = Vec::with_capacity(entries.len());
        for entry in entries {
            weights.push(match entry {
                WeightRepr::Text(s) => parse_weight(&s).map_err(D::Error::custom)?,
                WeightRepr::Number(x) => x,
            });
        }
        WeightSet::new(weights).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Exact coded-symbol distribution
// ---------------------------------------------------------------------------

/// Exact probability mass function of a coded symbol, as a finite list of
/// `(value, probability)` atoms sorted by value.
#[derive(Debug, Clone)]
pub struct SymbolPmf {
    atoms: Vec<(f64, f64)>,
}

impl SymbolPmf {
    /// Builds a pmf from raw atoms, merging duplicate support values and
    /// checking nonnegativity, normalization, and symmetry.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self, WeightError> {
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(WeightError::BadPmf(format!("non-finite support value {v}")));
            }
            if !(p >= 0.0) {
                return Err(WeightError::BadPmf(format!("negative probability {p} at {v}")));
            }
        }
        let pmf = Self::merge(atoms);
        let total: f64 = pmf.atoms.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(WeightError::BadPmf(format!("probabilities sum to {total}")));
        }
        for &(v, p) in &pmf.atoms {
            if (p - pmf.prob_at(-v)).abs() > 1e-12 {
                return Err(WeightError::BadPmf(format!("asymmetric mass at ±{v}")));
            }
        }
        Ok(pmf)
    }

    fn merge(mut atoms: Vec<(f64, f64)>) -> Self {
        for atom in &mut atoms {
            // normalize -0.0 so it merges with +0.0
            if atom.0 == 0.0 {
                atom.0 = 0.0;
            }
        }
        // the probability tiebreak fixes the summation order within a merged
        // run, so mirrored values accumulate to bit-identical masses
        atoms.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        merged.retain(|&(_, p)| p > 0.0);
        Self { atoms: merged }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Probability mass at exactly `v` (exact f64 match).
    pub fn prob_at(&self, v: f64) -> f64 {
        let v = if v == 0.0 { 0.0 } else { v };
        self.atoms
            .binary_search_by(|a| a.0.total_cmp(&v))
            .map(|i| self.atoms[i].1)
            .unwrap_or(0.0)
    }

    /// Total mass of atoms within `tol` of `v`.
    pub fn prob_near(&self, v: f64, tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|&&(x, _)| (x - v).abs() <= tol)
            .map(|&(_, p)| p)
            .sum()
    }

    /// Mass in the half-open interval `[lo, hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let start = self.atoms.partition_point(|&(v, _)| v < lo);
        let end = self.atoms.partition_point(|&(v, _)| v < hi);
        self.atoms[start..end].iter().map(|&(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.atoms
            .iter()
            .map(|&(v, p)| p * (v - mean) * (v - mean))
            .sum()
    }
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Exact distribution of a degree-`degree` coded symbol over `weights`.
///
/// Each summand is `±w` with uniform independent sign. With `replacement`
/// the weights of the summands are independent uniform draws from the set;
/// without it they form a uniformly random `degree`-subset. Refuses with
/// [`WeightError::EnumerationTooLarge`] when the raw outcome count exceeds
/// [`ENUMERATION_CAP`].
pub fn coded_symbol_pmf(
    weights: &WeightSet,
    degree: usize,
    replacement: bool,
) -> Result<SymbolPmf, WeightError> {
    if degree == 0 {
        return Err(WeightError::ZeroDegree);
    }
    let f = weights.len();
    if !replacement && degree > f {
        return Err(WeightError::DegreeExceedsWeights { degree, f });
    }
    let outcomes = if replacement {
        (2 * f as u128).checked_pow(degree as u32)
    } else {
        binomial(f, degree).and_then(|c| c.checked_mul(1u128.checked_shl(degree as u32)?))
    }
    .unwrap_or(u128::MAX);
    if outcomes > ENUMERATION_CAP {
        return Err(WeightError::EnumerationTooLarge {
            outcomes,
            cap: ENUMERATION_CAP,
        });
    }

    let ws = weights.weights();
    let atoms = if replacement {
        // d-fold convolution of the single-summand distribution
        let per = 1.0 / (2 * f) as f64;
        let mut cur: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        for _ in 0..degree {
            let mut next = Vec::with_capacity(cur.len() * 2 * f);
            for &(v, p) in &cur {
                for &w in ws {
                    next.push((v + w, p * per));
                    next.push((v - w, p * per));
                }
            }
            cur = SymbolPmf::merge(next).atoms;
        }
        cur
    } else {
        // every degree-subset of weights, every sign pattern
        let subsets = binomial(f, degree).unwrap();
        let per = 1.0 / (subsets as f64 * (1u64 << degree) as f64);
        let mut raw = Vec::new();
        let mut idx: Vec<usize> = (0..degree).collect();
        loop {
            for signs in 0u64..(1u64 << degree) {
                let mut sum = 0.0;
                for (bit, &i) in idx.iter().enumerate() {
                    let w = ws[i];
                    sum += if signs >> bit & 1 == 1 { w } else { -w };
                }
                raw.push((sum, per));
            }
            // next lexicographic combination
            let mut pos = degree;
            while pos > 0 && idx[pos - 1] == f - degree + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for j in pos..degree {
                idx[j] = idx[j - 1] + 1;
            }
        }
        SymbolPmf::merge(raw).atoms
    };

    Ok(SymbolPmf { atoms })
}

// ---------------------------------------------------------------------------
// Gaussian tail and inverse
// ---------------------------------------------------------------------------

/// Standard Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on (0, 1), solved by bisection plus Newton.
///
/// # Panics
///
/// Panics if `p` is not strictly inside (0, 1).
pub fn q_inv(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "q_inv requires p in (0,1), got {p}");
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton polish: Q'(x) = -phi(x)
    for _ in 0..8 {
        let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if phi == 0.0 {
            break;
        }
        let step = (q_function(x) - p) / phi;
        x += step;
        if step.abs() < 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Gaussianity scoring
// ---------------------------------------------------------------------------

/// Which Gaussian the binned pmf is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    /// Bins in absolute units, reference is the standard normal.
    StandardNormal,
    /// Bins in units of the pmf's own standard deviation, so the reference
    /// is a Gaussian of matched variance.
    MatchedVariance,
}

impl std::str::FromStr for VarianceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" | "standard_normal" => Ok(Self::StandardNormal),
            "matched" | "matched_variance" => Ok(Self::MatchedVariance),
            other => Err(format!(
                "unknown variance mode {other:?}; use matched or standard"
            )),
        }
    }
}

/// Binning spec for the Gaussian-fit residual.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussFitSpec {
    pub delta: f64,
    pub epsilon: f64,
    pub i_max: usize,
    pub variance_mode: VarianceMode,
}

impl GaussFitSpec {
    pub fn new(
        delta: f64,
        epsilon: f64,
        i_max: usize,
        variance_mode: VarianceMode,
    ) -> Result<Self, WeightError> {
        let spec = Self {
            delta,
            epsilon,
            i_max,
            variance_mode,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(WeightError::BadDelta(self.delta));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(WeightError::BadEpsilon(self.epsilon));
        }
        if self.i_max < 10 {
            return Err(WeightError::BadBinCount(self.i_max));
        }
        Ok(())
    }
}

/// Worst squared deviation between binned pmf mass and the Gaussian bin mass.
///
/// Bin `i` covers `[(i-1)δσ, iδσ)` and is compared against
/// `Q((i-1)δ) - Q(iδ)`, where `σ` is 1 in standard-normal mode and the pmf's
/// own standard deviation in matched-variance mode.
pub fn gaussianity_residual(pmf: &SymbolPmf, spec: &GaussFitSpec) -> Result<f64, WeightError> {
    spec.validate()?;
    let sigma = match spec.variance_mode {
        VarianceMode::StandardNormal => 1.0,
        VarianceMode::MatchedVariance => {
            let var = pmf.variance();
            if var <= 0.0 {
                return Err(WeightError::ZeroVariance);
            }
            var.sqrt()
        }
    };
    let mut worst = 0.0_f64;
    for i in 1..=spec.i_max {
        let lo = (i - 1) as f64 * spec.delta * sigma;
        let hi = i as f64 * spec.delta * sigma;
        let p = pmf.mass_in(lo, hi);
        let q = q_function((i - 1) as f64 * spec.delta) - q_function(i as f64 * spec.delta);
        worst = worst.max((p - q) * (p - q));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Weight-set design
// ---------------------------------------------------------------------------

/// Configuration for the seeded stochastic weight-set search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignConfig {
    /// Number of weights to design.
    pub f: usize,
    /// Coded-symbol degree the fit is evaluated at.
    pub degree: usize,
    /// Weight drawing mode during evaluation (see [`coded_symbol_pmf`]).
    pub replacement: bool,
    pub fit: GaussFitSpec,
    pub seed: u64,
    pub restarts: usize,
    pub steps_per_restart: usize,
}

impl DesignConfig {
    pub fn new(f: usize, degree: usize, fit: GaussFitSpec, seed: u64) -> Result<Self, WeightError> {
        let cfg = Self {
            f,
            degree,
            replacement: false,
            fit,
            seed,
            restarts: 48,
            steps_per_restart: 600,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        if self.f == 0 {
            return Err(WeightError::Empty);
        }
        if self.degree == 0 {
            return Err(WeightError::ZeroDegree);
        }
        if !self.replacement && self.degree > self.f {
            return Err(WeightError::DegreeExceedsWeights {
                degree: self.degree,
                f: self.f,
            });
        }
        self.fit.validate()
    }
}

fn candidate_set(weights: &mut [f64]) -> Option<WeightSet> {
    weights.sort_unstable_by(|a, b| b.total_cmp(a));
    if weights.windows(2).any(|w| w[0] <= w[1]) {
        return None;
    }
    WeightSet::new(weights.to_vec()).ok()
}

fn residual_of(
    weights: &WeightSet,
    cfg: &DesignConfig,
) -> Result<f64, WeightError> {
    let pmf = coded_symbol_pmf(weights, cfg.degree, cfg.replacement)?;
    gaussianity_residual(&pmf, &cfg.fit)
}

/// Searches for a weight set whose [`gaussianity_residual`] is at most
/// `cfg.fit.epsilon`, by seeded random restarts plus greedy coordinate
/// perturbation over weights in (0, 1]. Deterministic given the seed.
///
/// On budget exhaustion the error carries the best set found.
pub fn design_weights(cfg: &DesignConfig) -> Result<WeightSet, WeightError> {
    cfg.validate()?;
    let mut best: Option<(WeightSet, f64)> = None;

    for restart in 0..cfg.restarts.max(1) {
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart as u64);

        let mut raw: Vec<f64> = match restart % 3 {
            // geometric-ish ladder with jitter, often a good basin
            0 => (0..cfg.f)
                .map(|j| {
                    let base = 0.5 * 0.72_f64.powi(j as i32);
                    (base * (0.6 + 0.8 * rng.random::<f64>())).min(1.0)
                })
                .collect(),
            // reciprocal ladder with jitter
            1 => (0..cfg.f)
                .map(|j| (0.6 + 0.8 * rng.random::<f64>()) / (j + 2) as f64)
                .collect(),
            // fully random
            _ => (0..cfg.f).map(|_| 1.0 - rng.random::<f64>()).collect(),
        };
        let Some(mut current) = candidate_set(&mut raw) else {
            continue;
        };
        let mut cur_res = residual_of(&current, cfg)?;

        let mut step = 0usize;
        while step < cfg.steps_per_restart {
            if cur_res <= cfg.fit.epsilon {
                return Ok(current);
            }
            let j = step % cfg.f;
            let scale = 0.35 / (1.0 + step as f64 / 80.0);
            let z: f64 = rng.sample(StandardNormal);
            let mut raw = current.weights().to_vec();
            raw[j] = (raw[j] * (scale * z).exp()).clamp(1e-9, 1.0);
            if let Some(cand) = candidate_set(&mut raw) {
                let res = residual_of(&cand, cfg)?;
                if res < cur_res {
                    current = cand;
                    cur_res = res;
                }
            }
            step += 1;
        }
        if cur_res <= cfg.fit.epsilon {
            return Ok(current);
        }
        if best.as_ref().is_none_or(|(_, r)| cur_res < *r) {
            best = Some((current, cur_res));
        }
    }

    let (best, residual) = best.expect("at least one restart ran");
    Err(WeightError::SearchBudgetExhausted { best, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_style_set() -> WeightSet {
        WeightSet::reciprocal_primes(8).unwrap()
    }

    #[test]
    fn avg_energy_single_unit_weight() {
        let ws = WeightSet::new(vec![1.0]).unwrap();
        assert_eq!(ws.avg_energy(), 1.0);
    }

    #[test]
    fn avg_energy_reference_set() {
        // hand sum of the eight squared reciprocals
        let ws = paper_style_set();
        assert!((ws.avg_energy() - 0.0552414).abs() < 1e-6);
    }

    #[test]
    fn avg_energy_scaling_law() {
        let ws = paper_style_set();
        // power-of-two scale is exact in floating point
        let half = ws.scaled(0.5).unwrap();
        assert_eq!(half.avg_energy(), 0.25 * ws.avg_energy());
        let tripled = ws.scaled(3.0).unwrap();
        assert!((tripled.avg_energy() - 9.0 * ws.avg_energy()).abs() < 1e-12);
    }

    #[test]
    fn weight_set_rejects_bad_input() {
        assert!(WeightSet::new(vec![]).is_err());
        assert!(WeightSet::new(vec![0.5, 0.5]).is_err());
        assert!(WeightSet::new(vec![0.3, 0.5]).is_err());
        assert!(WeightSet::new(vec![0.5, 0.0]).is_err());
        assert!(WeightSet::new(vec![0.5, -0.1]).is_err());
    }

    #[test]
    fn reciprocal_primes_matches_reference() {
        let ws = paper_style_set();
        let expected = [
            1.0 / 2.0,
            1.0 / 3.0,
            1.0 / 5.0,
            1.0 / 7.0,
            1.0 / 11.0,
            1.0 / 13.0,
            1.0 / 17.0,
            1.0 / 19.0,
        ];
        assert_eq!(ws.weights(), &expected);
    }

    #[test]
    fn pmf_single_unit_weight_degree_one() {
        let ws = WeightSet::new(vec![1.0]).unwrap();
        let pmf = coded_symbol_pmf(&ws, 1, true).unwrap();
        assert_eq!(pmf.atoms(), &[(-1.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn pmf_two_weights_degree_two_enumeration() {
        // all 16 sign/weight outcomes of {1/2, 1/3} at degree 2
        let ws = WeightSet::new(vec![0.5, 1.0 / 3.0]).unwrap();
        let pmf = coded_symbol_pmf(&ws, 2, true).unwrap();
        let cases = [
            (0.0, 4.0 / 16.0),
            (1.0, 1.0 / 16.0),
            (-1.0, 1.0 / 16.0),
            (2.0 / 3.0, 1.0 / 16.0),
            (-2.0 / 3.0, 1.0 / 16.0),
            (0.5 + 1.0 / 3.0, 2.0 / 16.0),
            (-(0.5 + 1.0 / 3.0), 2.0 / 16.0),
            (0.5 - 1.0 / 3.0, 2.0 / 16.0),
            (1.0 / 3.0 - 0.5, 2.0 / 16.0),
        ];
        for (v, p) in cases {
            assert!(
                (pmf.prob_at(v) - p).abs() < 1e-15,
                "mass at {v}: {} vs {p}",
                pmf.prob_at(v)
            );
        }
        let total: f64 = pmf.atoms().iter().map(|&(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_degree_one_mass_is_uniform_over_signed_weights() {
        let ws = paper_style_set();
        let pmf = coded_symbol_pmf(&ws, 1, true).unwrap();
        assert_eq!(pmf.atoms().len(), 16);
        for &w in ws.weights() {
            assert!((pmf.prob_at(w) - 1.0 / 16.0).abs() < 1e-15);
            assert!((pmf.prob_at(-w) - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pmf_moments_match_degree_times_energy() {
        let ws = paper_style_set();
        for degree in [1, 2, 4, 6] {
            let pmf = coded_symbol_pmf(&ws, degree, true).unwrap();
            assert!(pmf.mean().abs() < 1e-12);
            let expected = degree as f64 * ws.avg_energy();
            assert!(
                (pmf.variance() - expected).abs() < 1e-9,
                "degree {degree}: {} vs {expected}",
                pmf.variance()
            );
        }
    }

    #[test]
    fn pmf_is_exactly_symmetric() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut raw: Vec<f64> = (0..5).map(|_| 1.0 - rng.random::<f64>()).collect();
            raw.sort_unstable_by(|a, b| b.total_cmp(a));
            let Ok(ws) = WeightSet::new(raw) else { continue };
            for replacement in [true, false] {
                let pmf = coded_symbol_pmf(&ws, 4, replacement).unwrap();
                for &(v, p) in pmf.atoms() {
                    assert_eq!(p, pmf.prob_at(-v), "asymmetry at {v}");
                }
            }
        }
    }

    #[test]
    fn pmf_without_replacement_full_degree() {
        // degree == f uses the single subset with all weights
        let ws = paper_style_set();
        let pmf = coded_symbol_pmf(&ws, 8, false).unwrap();
        assert_eq!(pmf.atoms().len(), 256);
        let sum_w: f64 = ws.weights().iter().sum();
        assert!((pmf.prob_at(sum_w) - 1.0 / 256.0).abs() < 1e-15);
        let var_expected: f64 = ws.weights().iter().map(|w| w * w).sum();
        assert!((pmf.variance() - var_expected).abs() < 1e-12);
    }

    #[test]
    fn pmf_enumeration_cap_refuses() {
        let ws = paper_style_set();
        // (2*8)^8 = 2^32 raw outcomes with replacement
        match coded_symbol_pmf(&ws, 8, true) {
            Err(WeightError::EnumerationTooLarge { .. }) => {}
            other => panic!("expected enumeration cap error, got {other:?}"),
        }
    }

    #[test]
    fn q_function_basics() {
        assert_eq!(q_function(0.0), 0.5);
        // frozen from the adaptive-quadrature oracle in the acceptance suite
        assert!((q_function(1.0) - 0.15865525393145707).abs() < 1e-12);
        for x in [-3.0, -0.7, 0.0, 0.4, 2.5] {
            assert!((q_function(x) - (1.0 - q_function(-x))).abs() < 1e-15);
        }
    }

    #[test]
    fn q_inv_round_trips() {
        for p in [1e-9, 1e-4, 0.02, 0.158655, 0.5, 0.8, 1.0 - 1e-6] {
            let x = q_inv(p);
            assert!(
                (q_function(x) - p).abs() < 1e-12,
                "p={p}: Q(Q^-1(p))={}",
                q_function(x)
            );
        }
    }

    #[test]
    fn residual_zero_for_exactly_binned_gaussian() {
        let spec = GaussFitSpec::new(0.2, 1e-4, 15, VarianceMode::StandardNormal).unwrap();
        // atoms placed at bin centers carrying exactly the Gaussian bin mass
        let mut atoms = Vec::new();
        let mut half = 0.0;
        for i in 1..=spec.i_max {
            let q = q_function((i - 1) as f64 * spec.delta) - q_function(i as f64 * spec.delta);
            let center = (i as f64 - 0.5) * spec.delta;
            atoms.push((center, q));
            atoms.push((-center, q));
            half += q;
        }
        // park the leftover tail mass beyond the last bin
        let tail = 0.5 - half;
        let far = (spec.i_max + 1) as f64 * spec.delta;
        atoms.push((far, tail));
        atoms.push((-far, tail));
        let pmf = SymbolPmf::from_atoms(atoms).unwrap();
        assert_eq!(gaussianity_residual(&pmf, &spec).unwrap(), 0.0);
    }

    #[test]
    fn residual_point_mass_dominated_by_first_bin() {
        let spec = GaussFitSpec::new(0.2, 1e-4, 15, VarianceMode::StandardNormal).unwrap();
        let pmf = SymbolPmf::from_atoms(vec![(0.0, 1.0)]).unwrap();
        let got = gaussianity_residual(&pmf, &spec).unwrap();
        let first_bin = 1.0 - (0.5 - q_function(spec.delta));
        assert!((got - first_bin * first_bin).abs() < 1e-15);
    }

    #[test]
    fn residual_zero_variance_matched_mode_errors() {
        let spec = GaussFitSpec::new(0.2, 1e-4, 15, VarianceMode::MatchedVariance).unwrap();
        let pmf = SymbolPmf::from_atoms(vec![(0.0, 1.0)]).unwrap();
        assert!(matches!(
            gaussianity_residual(&pmf, &spec),
            Err(WeightError::ZeroVariance)
        ));
    }

    #[test]
    fn residual_scale_invariant_in_matched_mode() {
        let spec = GaussFitSpec::new(0.2, 1e-4, 15, VarianceMode::MatchedVariance).unwrap();
        let ws = paper_style_set();
        let base = gaussianity_residual(&coded_symbol_pmf(&ws, 4, true).unwrap(), &spec).unwrap();
        for scale in [2.0, 0.25] {
            let scaled = ws.scaled(scale).unwrap();
            let res =
                gaussianity_residual(&coded_symbol_pmf(&scaled, 4, true).unwrap(), &spec).unwrap();
            assert_eq!(res, base, "scale {scale}");
        }
    }

    #[test]
    fn fit_spec_validation() {
        assert!(GaussFitSpec::new(0.0, 1e-4, 15, VarianceMode::MatchedVariance).is_err());
        assert!(GaussFitSpec::new(0.2, 0.0, 15, VarianceMode::MatchedVariance).is_err());
        assert!(GaussFitSpec::new(0.2, 1e-4, 9, VarianceMode::MatchedVariance).is_err());
    }

    #[test]
    fn design_vacuous_tolerance_accepts_first_candidate() {
        let fit = GaussFitSpec::new(0.2, 1.0, 15, VarianceMode::MatchedVariance).unwrap();
        let cfg = DesignConfig::new(4, 4, fit, 11).unwrap();
        let ws = design_weights(&cfg).unwrap();
        let res = residual_of(&ws, &cfg).unwrap();
        assert!(res <= 1.0);
    }

    #[test]
    fn design_is_deterministic() {
        let fit = GaussFitSpec::new(0.2, 5e-3, 12, VarianceMode::MatchedVariance).unwrap();
        let cfg = DesignConfig::new(5, 5, fit, 42).unwrap();
        let a = design_weights(&cfg).unwrap();
        let b = design_weights(&cfg).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn design_output_passes_own_residual_check() {
        let fit = GaussFitSpec::new(0.2, 5e-3, 12, VarianceMode::MatchedVariance).unwrap();
        let cfg = DesignConfig::new(5, 5, fit, 42).unwrap();
        let ws = design_weights(&cfg).unwrap();
        let res = residual_of(&ws, &cfg).unwrap();
        assert!(res <= cfg.fit.epsilon, "residual {res}");
    }

    #[test]
    fn weight_set_serde_round_trip_and_rationals() {
        let ws = paper_style_set();
        let json = serde_json::to_string(&ws).unwrap();
        let back: WeightSet = serde_json::from_str(&json).unwrap();
        assert_eq!(ws.weights(), back.weights());

        let parsed: WeightSet = serde_json::from_str(r#"["1/2", "1/3", 0.25, "0.2"]"#).unwrap();
        assert_eq!(parsed.weights(), &[0.5, 1.0 / 3.0, 0.25, 0.2]);

        assert!(serde_json::from_str::<WeightSet>(r#"["1/3", "1/2"]"#).is_err());
        assert!(serde_json::from_str::<WeightSet>(r#"["x"]"#).is_err());
    }
}

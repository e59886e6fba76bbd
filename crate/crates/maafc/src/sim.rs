//! Experiment harness: seeded Monte Carlo BER measurement, the rateless
//! minimum-symbol search, and the SNR/rate sweeps behind the sum-rate and
//! BER experiments.
//!
//! Every experiment is a pure function of its config and master seed. Trials
//! run in fixed-size batches whose frames execute in parallel; results are
//! reduced in trial order, so thread count never changes the output bytes.

use std::io::Write as _;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{sum_capacity, ChannelError, Scenario, UserLink};
use crate::codec::{CodeSpec, CodecError};
use crate::de::{de_run, DeError, DeScenario};
use crate::decoder::{decode, DecodeError, DecoderConfig};
use crate::weights::WeightSet;

/// Frames dispatched per parallel batch; fixed so that adaptive stopping is
/// independent of thread count.
const BATCH_FRAMES: usize = 32;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("target BER {0} outside (0, 0.5]")]
    BadTargetBer(f64),
    #[error("min_errors must be at least 1")]
    BadMinErrors,
    #[error("{which} grid is empty")]
    EmptyGrid { which: &'static str },
    #[error("{which} grid must be sorted ascending")]
    UnsortedGrid { which: &'static str },
    #[error("config needs a {which} grid for this experiment")]
    MissingGrid { which: &'static str },
    #[error("coded symbols per point must be at least 1")]
    ZeroSymbols,
    #[error(
        "target BER {target} unreachable within m <= {m_cap}: best worst-user BER {best_ber} at m = {best_m}"
    )]
    TargetUnreachable {
        target: f64,
        m_cap: usize,
        best_m: usize,
        best_ber: f64,
    },
    #[error("fixed bits for user {user} have length {got}, expected k = {k}")]
    BadFixedBits { user: usize, got: usize, k: usize },
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    De(#[from] DeError),
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Where a user's message bits come from, per trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitsSource {
    /// Fresh uniform bits every trial, derived from the master seed.
    Random,
    /// The all-zero message.
    Zeros,
    /// A fixed message reused in every trial.
    Fixed(Vec<u8>),
}

impl Default for BitsSource {
    fn default() -> Self {
        Self::Random
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UserConfig {
    pub gain: f64,
    pub degree: usize,
    pub seed: u64,
    #[serde(default)]
    pub bits: BitsSource,
    /// Draw row weights with replacement (see [`CodeSpec`]).
    #[serde(default)]
    pub replacement: bool,
}

/// How transmit amplitudes are set: a direct scale or a target received SNR.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerSpec {
    Alpha(f64),
    TargetSnrDb(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub k: usize,
    pub weight_set: WeightSet,
    pub users: Vec<UserConfig>,
    pub power: PowerSpec,
    #[serde(default)]
    pub noise_seed: u64,
}

impl ScenarioConfig {
    /// Builds the channel scenario with all-zero placeholder bits; the
    /// harness fills per-trial messages itself. `snr_db` overrides the
    /// configured power when given.
    pub fn build(&self, snr_db: Option<f64>) -> Result<Scenario, SimError> {
        let users: Vec<UserLink> = self
            .users
            .iter()
            .enumerate()
            .map(|(idx, u)| -> Result<UserLink, SimError> {
                let mut spec = CodeSpec::new(self.k, u.degree, self.weight_set.clone(), u.seed)?;
                spec.replacement = u.replacement;
                spec.validate()?;
                if let BitsSource::Fixed(bits) = &u.bits {
                    if bits.len() != self.k {
                        return Err(SimError::BadFixedBits {
                            user: idx,
                            got: bits.len(),
                            k: self.k,
                        });
                    }
                }
                Ok(UserLink {
                    user_id: idx,
                    gain: u.gain,
                    spec,
                    bits: vec![0; self.k],
                })
            })
            .collect::<Result<_, _>>()?;
        let power = match snr_db {
            Some(db) => PowerSpec::TargetSnrDb(db),
            None => self.power,
        };
        Ok(match power {
            PowerSpec::Alpha(alpha) => Scenario::new(users, alpha, self.noise_seed)?,
            PowerSpec::TargetSnrDb(db) => Scenario::with_target_snr_db(users, db, self.noise_seed)?,
        })
    }
}

fn default_trials() -> usize {
    1000
}
fn default_target_ber() -> f64 {
    1e-3
}
fn default_min_errors() -> u64 {
    50
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub decoder: DecoderConfig,
    /// Frame cap per measured point.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_target_ber")]
    pub target_ber: f64,
    /// A point stops early once every user has this many bit errors.
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    /// Inverse sum-rates `m / (|S| k)` for BER-curve mode.
    #[serde(default)]
    pub rate_grid: Option<Vec<f64>>,
    /// Received SNRs in dB for sum-rate sweep mode.
    #[serde(default)]
    pub snr_grid: Option<Vec<f64>>,
    /// Cap for the minimum-symbol search; defaults to `32 |S| k`.
    #[serde(default)]
    pub m_cap: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if !(self.target_ber > 0.0 && self.target_ber <= 0.5) {
            return Err(SimError::BadTargetBer(self.target_ber));
        }
        if self.min_errors == 0 {
            return Err(SimError::BadMinErrors);
        }
        self.decoder.validate()?;
        for (grid, which) in [(&self.rate_grid, "rate"), (&self.snr_grid, "snr")] {
            if let Some(g) = grid {
                if g.is_empty() {
                    return Err(SimError::EmptyGrid { which });
                }
                if g.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(SimError::UnsortedGrid { which });
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Folds seed components into one sub-seed.
fn mix(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, &p| splitmix64(acc ^ p))
}

const TAG_BITS: u64 = 1;
const TAG_NOISE: u64 = 2;

// ---------------------------------------------------------------------------
// Single measured point
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserBer {
    pub user_id: usize,
    pub gain: f64,
    pub degree: usize,
    pub errors: u64,
    pub bits_tested: u64,
    /// Simulated BER, `errors / bits_tested`.
    pub ber_sim: f64,
    /// Whether the error count reached the resolution threshold.
    pub resolved: bool,
    /// Density-evolution prediction at the same scenario and symbol ratio.
    pub ber_de: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub m: usize,
    pub inverse_sum_rate: f64,
    pub frames: u64,
    pub users: Vec<UserBer>,
}

impl BerPoint {
    pub fn worst_user_ber(&self) -> f64 {
        self.users.iter().map(|u| u.ber_sim).fold(0.0, f64::max)
    }

    pub fn all_resolved(&self) -> bool {
        self.users.iter().all(|u| u.resolved)
    }
}

fn trial_bits(cfg: &ExperimentConfig, m: usize, trial: u64, user_idx: usize) -> Vec<u8> {
    let k = cfg.scenario.k;
    match &cfg.scenario.users[user_idx].bits {
        BitsSource::Zeros => vec![0; k],
        BitsSource::Fixed(bits) => bits.clone(),
        BitsSource::Random => {
            let seed = mix(&[cfg.master_seed, TAG_BITS, m as u64, trial, user_idx as u64]);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..k).map(|_| rng.random_range(0..2u8)).collect()
        }
    }
}

/// One frame's ground truth and noisy observation.
fn frame_observation(
    cfg: &ExperimentConfig,
    code: &crate::channel::EquivalentCode,
    noise_base: u64,
    m: usize,
    trial: u64,
) -> (Vec<Vec<u8>>, Vec<f64>) {
    let n_users = cfg.scenario.users.len();
    let k = cfg.scenario.k;
    let truth: Vec<Vec<u8>> = (0..n_users).map(|u| trial_bits(cfg, m, trial, u)).collect();
    let mut stacked = Vec::with_capacity(n_users * k);
    for bits in &truth {
        stacked.extend(bits.iter().map(|&b| if b == 1 { 1.0 } else { -1.0 }));
    }
    let mut y = code.encode(&stacked);
    let noise_seed = mix(&[noise_base, TAG_NOISE, m as u64, trial]);
    let mut rng = ChaCha12Rng::seed_from_u64(noise_seed);
    for v in &mut y {
        let n: f64 = StandardNormal.sample(&mut rng);
        *v += n;
    }
    (truth, y)
}

/// Decodes one frame of a point with per-iteration tracing.
pub fn trace_point(
    cfg: &ExperimentConfig,
    m: usize,
    trial: u64,
) -> Result<Vec<crate::decoder::TraceRow>, SimError> {
    cfg.validate()?;
    if m == 0 {
        return Err(SimError::ZeroSymbols);
    }
    let scenario = cfg.scenario.build(None)?;
    let code = scenario.equivalent_generator(m)?;
    let (truth, y) = frame_observation(cfg, &code, scenario.noise_seed(), m, trial);
    let (_, trace) = crate::decoder::decode_with_trace(&code, &y, &cfg.decoder, Some(&truth))?;
    Ok(trace)
}

/// Measures per-user BER at `m` coded symbols.
///
/// Frames use independent message bits and noise with seeds derived from the
/// master seed and trial index; the point stops once every user has
/// `min_errors` bit errors or the frame cap is reached. Users that never
/// reach the error threshold are flagged unresolved rather than silently
/// reported as zero.
pub fn run_ber_point(cfg: &ExperimentConfig, m: usize) -> Result<BerPoint, SimError> {
    cfg.validate()?;
    let scenario = cfg.scenario.build(None)?;
    run_ber_point_on(cfg, &scenario, m)
}

/// [`run_ber_point`] against an already-built scenario (used by sweeps that
/// override the transmit power per grid point).
pub fn run_ber_point_on(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    m: usize,
) -> Result<BerPoint, SimError> {
    if m == 0 {
        return Err(SimError::ZeroSymbols);
    }
    let n_users = scenario.users().len();
    let k = scenario.k();
    let code = scenario.equivalent_generator(m)?;

    // asymptotic prediction at the same scenario and symbol ratio, run with
    // the decoder's own iteration budget
    let de_sc = DeScenario::from_scenario(scenario, m)?;
    let de = de_run(&de_sc, cfg.decoder.max_iters, 1e-10);
    let ber_de = de.final_bers();

    let noise_base = scenario.noise_seed();
    let mut errors = vec![0u64; n_users];
    let mut frames = 0u64;

    while frames < cfg.trials as u64 {
        let batch = BATCH_FRAMES.min(cfg.trials - frames as usize);
        let batch_errors: Vec<Vec<u64>> = (0..batch as u64)
            .into_par_iter()
            .map(|b| {
                let trial = frames + b;
                let (truth, y) = frame_observation(cfg, &code, noise_base, m, trial);
                let out = decode(&code, &y, &cfg.decoder).expect("dimensions match");
                (0..n_users)
                    .map(|u| {
                        out.bits[u]
                            .iter()
                            .zip(&truth[u])
                            .filter(|(a, b)| a != b)
                            .count() as u64
                    })
                    .collect()
            })
            .collect();
        for per_frame in batch_errors {
            for (acc, e) in errors.iter_mut().zip(per_frame) {
                *acc += e;
            }
        }
        frames += batch as u64;
        if errors.iter().all(|&e| e >= cfg.min_errors) {
            break;
        }
    }

    let bits_tested = frames * k as u64;
    let users = scenario
        .users()
        .iter()
        .enumerate()
        .map(|(idx, u)| UserBer {
            user_id: u.user_id,
            gain: u.gain,
            degree: u.spec.degree,
            errors: errors[idx],
            bits_tested,
            ber_sim: errors[idx] as f64 / bits_tested as f64,
            resolved: errors[idx] >= cfg.min_errors,
            ber_de: ber_de[idx],
        })
        .collect();

    Ok(BerPoint {
        snr_db: scenario.received_snr_db(),
        m,
        inverse_sum_rate: m as f64 / (n_users * k) as f64,
        frames,
        users,
    })
}

// ---------------------------------------------------------------------------
// Minimum-symbol search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MinSymbols {
    pub m_star: usize,
    /// `|S| k / m_star`, all users stopping together.
    pub sum_rate: f64,
    pub sum_capacity: f64,
    /// The measured point at `m_star`.
    pub point: BerPoint,
}

/// Finds the smallest `m` whose worst-user BER meets the target: a coarse
/// geometric scan from `m = 1` followed by bisection between the last
/// failing and first passing sizes.
pub fn find_min_symbols(cfg: &ExperimentConfig) -> Result<MinSymbols, SimError> {
    cfg.validate()?;
    let scenario = cfg.scenario.build(None)?;
    find_min_symbols_on(cfg, &scenario)
}

pub fn find_min_symbols_on(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
) -> Result<MinSymbols, SimError> {
    let total_bits = scenario.users().len() * scenario.k();
    let capacity = sum_capacity(&scenario.per_user_power())?;
    let m_cap = cfg.m_cap.unwrap_or(32 * total_bits);

    let passes = |point: &BerPoint| point.worst_user_ber() <= cfg.target_ber;

    let mut best: Option<(usize, f64)> = None;
    let mut lo = 0usize; // largest failing m seen
    let mut m = 1usize;
    let mut hi_point = loop {
        if m > m_cap {
            let (best_m, best_ber) = best.unwrap_or((m_cap, 0.5));
            return Err(SimError::TargetUnreachable {
                target: cfg.target_ber,
                m_cap,
                best_m,
                best_ber,
            });
        }
        let point = run_ber_point_on(cfg, scenario, m)?;
        let worst = point.worst_user_ber();
        if best.as_ref().is_none_or(|&(_, b)| worst < b) {
            best = Some((m, worst));
        }
        if passes(&point) {
            break point;
        }
        lo = m;
        m = (m + 1).max((m as f64 * 1.25).ceil() as usize);
    };
    let mut hi = hi_point.m;

    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let point = run_ber_point_on(cfg, scenario, mid)?;
        if passes(&point) {
            hi = mid;
            hi_point = point;
        } else {
            lo = mid;
        }
    }

    Ok(MinSymbols {
        m_star: hi,
        sum_rate: total_bits as f64 / hi as f64,
        sum_capacity: capacity,
        point: hi_point,
    })
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Sum-rate sweep (Fig. 5 mode): runs the minimum-symbol search at every SNR
/// in the grid. Returns the CSV text.
pub fn sweep_snr(cfg: &ExperimentConfig) -> Result<String, SimError> {
    cfg.validate()?;
    let grid = cfg
        .snr_grid
        .as_ref()
        .ok_or(SimError::MissingGrid { which: "snr" })?;
    if grid.is_empty() {
        return Err(SimError::EmptyGrid { which: "snr" });
    }
    let mut csv = String::from(
        "snr_db,sum_capacity,m_star,achieved_sum_rate,capacity_fraction,worst_user_ber,all_resolved,frames\n",
    );
    for &snr_db in grid {
        let scenario = cfg.scenario.build(Some(snr_db))?;
        let found = find_min_symbols_on(cfg, &scenario)?;
        csv.push_str(&format!(
            "{snr_db},{},{},{},{},{},{},{}\n",
            found.sum_capacity,
            found.m_star,
            found.sum_rate,
            found.sum_rate / found.sum_capacity,
            found.point.worst_user_ber(),
            found.point.all_resolved(),
            found.point.frames,
        ));
    }
    Ok(csv)
}

/// BER-curve sweep (Fig. 6 mode): measures one point per inverse sum-rate in
/// the grid, one CSV row per (point, user). Simulated and DE-predicted BERs
/// are always emitted together.
pub fn sweep_rate(cfg: &ExperimentConfig) -> Result<String, SimError> {
    cfg.validate()?;
    let grid = cfg
        .rate_grid
        .as_ref()
        .ok_or(SimError::MissingGrid { which: "rate" })?;
    if grid.is_empty() {
        return Err(SimError::EmptyGrid { which: "rate" });
    }
    let scenario = cfg.scenario.build(None)?;
    let total_bits = scenario.users().len() * scenario.k();
    let mut csv = String::from(
        "snr_db,inverse_sum_rate,m,frames,user_id,gain,degree,errors,bits_tested,ber_sim,resolved,ber_de\n",
    );
    for &rate in grid {
        let m = ((rate * total_bits as f64).round() as usize).max(1);
        let point = run_ber_point_on(cfg, &scenario, m)?;
        for u in &point.users {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                point.snr_db,
                point.inverse_sum_rate,
                point.m,
                point.frames,
                u.user_id,
                u.gain,
                u.degree,
                u.errors,
                u.bits_tested,
                u.ber_sim,
                u.resolved,
                u.ber_de,
            ));
        }
    }
    Ok(csv)
}

/// Writes text to a file, attaching the path to any I/O error.
pub fn write_output(path: &Path, text: &str) -> Result<(), SimError> {
    let mut file = std::fs::File::create(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(text.as_bytes()).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::CheckMode;

    fn small_config(n_users: usize, k: usize, target_snr_db: f64) -> ExperimentConfig {
        ExperimentConfig {
            scenario: ScenarioConfig {
                k,
                weight_set: WeightSet::reciprocal_primes(8).unwrap(),
                users: (0..n_users)
                    .map(|j| UserConfig {
                        gain: (j + 1) as f64,
                        degree: 4,
                        seed: 100 + j as u64,
                        bits: BitsSource::Random,
                        replacement: false,
                    })
                    .collect(),
                power: PowerSpec::TargetSnrDb(target_snr_db),
                noise_seed: 7,
            },
            decoder: DecoderConfig::default(),
            trials: 64,
            target_ber: 1e-3,
            min_errors: 20,
            rate_grid: None,
            snr_grid: None,
            m_cap: None,
            master_seed: 99,
        }
    }

    #[test]
    fn high_snr_single_user_point_is_error_free() {
        let mut cfg = small_config(1, 40, 45.0);
        cfg.trials = 5;
        let point = run_ber_point(&cfg, 4 * 40).unwrap();
        assert_eq!(point.users[0].errors, 0);
        assert_eq!(point.users[0].ber_sim, 0.0);
        assert!(!point.users[0].resolved, "zero errors cannot be resolved");
        assert_eq!(point.frames, 5);
    }

    #[test]
    fn ber_point_is_deterministic() {
        let cfg = small_config(2, 24, 8.0);
        let a = run_ber_point(&cfg, 60).unwrap();
        let b = run_ber_point(&cfg, 60).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fifty_error_rule_stops_early_at_low_snr() {
        let mut cfg = small_config(2, 24, -5.0);
        cfg.trials = 1000;
        let point = run_ber_point(&cfg, 48).unwrap();
        assert!(point.all_resolved());
        assert!(point.frames < 1000, "noisy point should resolve quickly");
        for u in &point.users {
            assert!(u.errors >= cfg.min_errors);
            assert!(u.ber_sim > 0.0 && u.ber_sim <= 0.6);
        }
    }

    #[test]
    fn vacuous_target_returns_one_symbol() {
        let mut cfg = small_config(1, 16, 10.0);
        cfg.target_ber = 0.5;
        cfg.trials = 16;
        let found = find_min_symbols(&cfg).unwrap();
        assert_eq!(found.m_star, 1);
        assert_eq!(found.sum_rate, 16.0);
    }

    #[test]
    fn min_symbols_sum_rate_arithmetic() {
        let mut cfg = small_config(1, 24, 20.0);
        cfg.target_ber = 0.05;
        cfg.trials = 48;
        cfg.min_errors = 10;
        let found = find_min_symbols(&cfg).unwrap();
        assert!((found.sum_rate - 24.0 / found.m_star as f64).abs() < 1e-12);
        assert!(found.point.worst_user_ber() <= 0.05);
        // the point just below must fail, by bisection construction
        if found.m_star > 1 {
            let scenario = cfg.scenario.build(None).unwrap();
            let below = run_ber_point_on(&cfg, &scenario, found.m_star - 1).unwrap();
            assert!(below.worst_user_ber() > 0.05);
        }
    }

    #[test]
    fn unreachable_target_carries_best_point() {
        let mut cfg = small_config(1, 16, -20.0);
        cfg.target_ber = 1e-4;
        cfg.trials = 8;
        cfg.m_cap = Some(40);
        match find_min_symbols(&cfg) {
            Err(SimError::TargetUnreachable { best_m, best_ber, .. }) => {
                assert!(best_m <= 40);
                assert!(best_ber > 1e-4);
            }
            other => panic!("expected unreachable error, got {other:?}"),
        }
    }

    #[test]
    fn sweep_rate_shape_and_determinism() {
        let mut cfg = small_config(2, 24, 12.0);
        cfg.rate_grid = Some(vec![0.5, 1.0]);
        cfg.trials = 32;
        cfg.min_errors = 10;
        let a = sweep_rate(&cfg).unwrap();
        let b = sweep_rate(&cfg).unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        // header + one row per (grid point, user)
        assert_eq!(lines.len(), 1 + 2 * 2);
        assert!(lines[0].starts_with("snr_db,inverse_sum_rate,m,"));
        assert!(lines[0].contains("ber_sim"));
        assert!(lines[0].contains("ber_de"));
    }

    #[test]
    fn sweep_snr_includes_capacity_column() {
        let mut cfg = small_config(1, 16, 10.0);
        cfg.snr_grid = Some(vec![18.0]);
        cfg.target_ber = 0.2;
        cfg.trials = 24;
        cfg.min_errors = 5;
        let csv = sweep_snr(&cfg).unwrap();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.contains("sum_capacity"));
        assert!(header.contains("achieved_sum_rate"));
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn grid_validation() {
        let mut cfg = small_config(1, 16, 10.0);
        cfg.rate_grid = Some(vec![]);
        assert!(matches!(
            sweep_rate(&cfg),
            Err(SimError::EmptyGrid { which: "rate" })
        ));
        cfg.rate_grid = Some(vec![0.5, 0.4]);
        assert!(matches!(cfg.validate(), Err(SimError::UnsortedGrid { .. })));
        cfg.rate_grid = None;
        assert!(matches!(
            sweep_rate(&cfg),
            Err(SimError::MissingGrid { which: "rate" })
        ));
        cfg.snr_grid = None;
        assert!(matches!(
            sweep_snr(&cfg),
            Err(SimError::MissingGrid { which: "snr" })
        ));
    }

    #[test]
    fn config_json_round_trip() {
        let mut cfg = small_config(2, 24, 12.0);
        cfg.rate_grid = Some(vec![0.25, 0.5]);
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.scenario.k, 24);
        assert_eq!(back.scenario.users.len(), 2);
        assert_eq!(back.trials, cfg.trials);
        assert_eq!(back.rate_grid, cfg.rate_grid);
    }

    #[test]
    fn minimal_config_json_uses_defaults() {
        let json = r#"{
            "scenario": {
                "k": 16,
                "weight_set": ["1/2", "1/3", "1/5", "1/7", "1/11", "1/13", "1/17", "1/19"],
                "users": [{"gain": 1.0, "degree": 4, "seed": 1}],
                "power": {"target_snr_db": 10.0}
            }
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.trials, 1000);
        assert_eq!(cfg.min_errors, 50);
        assert!((cfg.target_ber - 1e-3).abs() < 1e-15);
        assert!(matches!(cfg.decoder.check_mode, CheckMode::Exact));
        assert_eq!(cfg.scenario.users[0].bits, BitsSource::Random);
        assert!(cfg.validate().is_ok());
    }
}

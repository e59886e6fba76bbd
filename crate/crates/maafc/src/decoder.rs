//! Joint belief-propagation decoding on the equivalent code graph.
//!
//! Check nodes are received symbols, variable nodes are all users'
//! information symbols. Messages are LLRs under the convention
//! `L = log P(b=+1|..) / P(b=-1|..)`, noise variance fixed at 1. The check
//! update marginalizes the Gaussian likelihood exactly over the other
//! neighbors' signs, which costs `2^(deg-1)` per message; rows whose degree
//! exceeds the configured cap fall back to a soft interference-cancellation
//! update that treats the other neighbors' contribution as Gaussian.
//!
//! The schedule is flooding: all check updates, then all variable updates,
//! per iteration. Final decisions take the sign of the full LLR sum, ties
//! deciding bit 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::EquivalentCode;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("received vector has {got} entries but the code has {expected} rows")]
    LengthMismatch { expected: usize, got: usize },
    #[error("check node has no incident edges")]
    EmptyIncident,
    #[error("target index {target} out of range for {edges} incident edges")]
    BadTarget { target: usize, edges: usize },
    #[error("degree {degree} exceeds exact cap {cap}; use the gaussian_approx check mode")]
    DegreeOverCap { degree: usize, cap: usize },
    #[error("invalid decoder config: {0}")]
    BadConfig(String),
}

/// Check-node update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Exact marginalization for rows within the degree cap, Gaussian
    /// approximation beyond it.
    Exact,
    /// Soft interference cancellation for every row.
    #[serde(alias = "gauss")]
    GaussianApprox,
}

impl std::str::FromStr for CheckMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "gauss" | "gaussian_approx" => Ok(Self::GaussianApprox),
            other => Err(format!("unknown check mode {other:?}; use exact or gauss")),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct DecoderConfig {
    pub max_iters: usize,
    pub check_mode: CheckMode,
    /// Largest "other neighbor" count marginalized exactly; a row of degree
    /// `d` runs exact only if `d - 1 <= exact_degree_cap`.
    pub exact_degree_cap: usize,
    /// Stop once hard decisions are unchanged for two iterations.
    pub early_stop: bool,
    /// Magnitude cap applied to every message.
    pub clamp: f64,
    /// Fraction of the previous check-to-variable message blended into the
    /// new one. Flooding BP on the loopy equivalent graph falls into
    /// period-2 limit cycles at high SNR without it; 0 disables.
    pub damping: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            check_mode: CheckMode::Exact,
            exact_degree_cap: 12,
            early_stop: true,
            clamp: 50.0,
            damping: 0.8,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.max_iters == 0 {
            return Err(DecodeError::BadConfig("max_iters must be at least 1".into()));
        }
        if self.exact_degree_cap == 0 || self.exact_degree_cap > 24 {
            return Err(DecodeError::BadConfig(format!(
                "exact_degree_cap {} outside 1..=24",
                self.exact_degree_cap
            )));
        }
        if !(self.clamp > 0.0) || !self.clamp.is_finite() {
            return Err(DecodeError::BadConfig(format!("clamp {} must be positive", self.clamp)));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(DecodeError::BadConfig(format!(
                "damping {} outside [0, 1)",
                self.damping
            )));
        }
        Ok(())
    }
}

/// `ln(1 + e^x)`, stable for large |x|.
fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else if x < -35.0 {
        0.0
    } else {
        x.exp().ln_1p()
    }
}

// ---------------------------------------------------------------------------
// Check-node updates
// ---------------------------------------------------------------------------

/// Exact check-to-variable LLR: marginalizes over all sign assignments of
/// the other incident variables, with priors `P(b=+1) = sigmoid(L_in)`.
///
/// `incident` lists `(weight, incoming LLR)` for every edge of the check
/// node, the target edge included (its LLR is not used). Errors when the
/// number of other neighbors exceeds `degree_cap`.
pub fn check_to_var_exact(
    y: f64,
    incident: &[(f64, f64)],
    target: usize,
    degree_cap: usize,
    clamp: f64,
) -> Result<f64, DecodeError> {
    let n = incident.len();
    if n == 0 {
        return Err(DecodeError::EmptyIncident);
    }
    if target >= n {
        return Err(DecodeError::BadTarget { target, edges: n });
    }
    if n - 1 > degree_cap {
        return Err(DecodeError::DegreeOverCap {
            degree: n,
            cap: degree_cap,
        });
    }
    let g_t = incident[target].0;
    let others: Vec<(f64, f64, f64)> = incident
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target)
        .map(|(_, &(g, l))| (g, -softplus(-l), -softplus(l)))
        .collect();

    let count = 1usize << others.len();
    let mut plus = Vec::with_capacity(count);
    let mut minus = Vec::with_capacity(count);
    for mask in 0..count {
        let mut a = 0.0;
        let mut lp = 0.0;
        for (j, &(g, lp_plus, lp_minus)) in others.iter().enumerate() {
            if mask >> j & 1 == 1 {
                a += g;
                lp += lp_plus;
            } else {
                a -= g;
                lp += lp_minus;
            }
        }
        plus.push(-0.5 * (y - g_t - a) * (y - g_t - a) + lp);
        minus.push(-0.5 * (y + g_t - a) * (y + g_t - a) + lp);
    }
    Ok((log_sum_exp(&plus) - log_sum_exp(&minus)).clamp(-clamp, clamp))
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Gaussian-approximate check-to-variable LLR: the other neighbors'
/// contribution is treated as Gaussian with mean `sum g tanh(L/2)` and
/// variance `sum g^2 (1 - tanh^2(L/2))`, on top of the unit noise.
pub fn check_to_var_gauss(y: f64, incident: &[(f64, f64)], target: usize) -> f64 {
    let g_t = incident[target].0;
    let mut mean = 0.0;
    let mut var = 0.0;
    for (i, &(g, l)) in incident.iter().enumerate() {
        if i == target {
            continue;
        }
        let t = (l / 2.0).tanh();
        mean += g * t;
        var += g * g * (1.0 - t * t);
    }
    2.0 * g_t * (y - mean) / (1.0 + var)
}

/// Variable-to-check LLR: the sum of all incoming check messages except the
/// excluded edge, clamped.
pub fn var_to_check(incoming: &[f64], excluded: usize, clamp: f64) -> f64 {
    incoming
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != excluded)
        .map(|(_, &l)| l)
        .sum::<f64>()
        .clamp(-clamp, clamp)
}

// ---------------------------------------------------------------------------
// Full decoder
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    /// Hard decisions partitioned into per-user blocks.
    pub bits: Vec<Vec<u8>>,
    /// Final LLR per variable (full sum over incident checks).
    pub llrs: Vec<f64>,
    /// Iterations actually run.
    pub iterations: usize,
}

/// One per-iteration trace record from [`decode_with_trace`].
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iteration: usize,
    /// Mean |LLR| over each user block.
    pub mean_abs_llr: Vec<f64>,
    /// Tentative BER per user block against the supplied truth, if any.
    pub ber_vs_truth: Option<Vec<f64>>,
}

/// Flooding-schedule BP decoding of all users on the equivalent graph.
pub fn decode(
    code: &EquivalentCode,
    y: &[f64],
    cfg: &DecoderConfig,
) -> Result<DecodeOutput, DecodeError> {
    run_bp(code, y, cfg, None).map(|(out, _)| out)
}

/// Like [`decode`], also recording per-iteration statistics. `truth` holds
/// each user's transmitted bits for tentative-BER tracking.
pub fn decode_with_trace(
    code: &EquivalentCode,
    y: &[f64],
    cfg: &DecoderConfig,
    truth: Option<&[Vec<u8>]>,
) -> Result<(DecodeOutput, Vec<TraceRow>), DecodeError> {
    run_bp(code, y, cfg, Some(truth)).map(|(out, trace)| (out, trace.unwrap_or_default()))
}

#[allow(clippy::type_complexity)]
fn run_bp(
    code: &EquivalentCode,
    y: &[f64],
    cfg: &DecoderConfig,
    trace_truth: Option<Option<&[Vec<u8>]>>,
) -> Result<(DecodeOutput, Option<Vec<TraceRow>>), DecodeError> {
    cfg.validate()?;
    if y.len() != code.num_rows() {
        return Err(DecodeError::LengthMismatch {
            expected: code.num_rows(),
            got: y.len(),
        });
    }

    // flatten edges row-major
    let rows = code.rows();
    let n_vars = code.num_cols();
    let mut row_start = Vec::with_capacity(rows.len() + 1);
    let mut edge_col = Vec::new();
    let mut edge_w = Vec::new();
    row_start.push(0);
    for row in rows {
        for &(c, w) in row {
            edge_col.push(c);
            edge_w.push(w);
        }
        row_start.push(edge_col.len());
    }
    let n_edges = edge_col.len();

    let mut v2c = vec![0.0_f64; n_edges];
    let mut c2v = vec![0.0_f64; n_edges];
    let mut totals = vec![0.0_f64; n_vars];

    let max_deg = (0..rows.len())
        .map(|l| row_start[l + 1] - row_start[l])
        .max()
        .unwrap_or(0);
    let exact_rows = matches!(cfg.check_mode, CheckMode::Exact);
    let mut exponents: Vec<f64> = Vec::new();
    let mut acc = vec![0.0_f64; 2 * max_deg.max(1)];
    let mut tanh_buf = vec![0.0_f64; max_deg.max(1)];
    let mut prev_row = vec![0.0_f64; max_deg.max(1)];

    let mut decisions = vec![0u8; n_vars];
    let mut prev_decisions = vec![0u8; n_vars];
    let mut stable = 0usize;
    let mut iterations = 0usize;
    let mut trace: Option<Vec<TraceRow>> = trace_truth.map(|_| Vec::new());

    for t in 1..=cfg.max_iters {
        // check-node updates
        for l in 0..rows.len() {
            let (s, e) = (row_start[l], row_start[l + 1]);
            let n = e - s;
            if n == 0 {
                continue;
            }
            prev_row[..n].copy_from_slice(&c2v[s..e]);
            if exact_rows && n - 1 <= cfg.exact_degree_cap {
                exact_row_update(
                    y[l],
                    &edge_w[s..e],
                    &v2c[s..e],
                    &mut c2v[s..e],
                    cfg.clamp,
                    &mut exponents,
                    &mut acc,
                );
            } else {
                gauss_row_update(
                    y[l],
                    &edge_w[s..e],
                    &v2c[s..e],
                    &mut c2v[s..e],
                    cfg.clamp,
                    &mut tanh_buf,
                );
            }
            if cfg.damping > 0.0 {
                for (msg, &prev) in c2v[s..e].iter_mut().zip(&prev_row[..n]) {
                    *msg = cfg.damping * prev + (1.0 - cfg.damping) * *msg;
                }
            }
        }

        // variable-node updates
        totals.fill(0.0);
        for e in 0..n_edges {
            totals[edge_col[e]] += c2v[e];
        }
        for e in 0..n_edges {
            v2c[e] = (totals[edge_col[e]] - c2v[e]).clamp(-cfg.clamp, cfg.clamp);
        }

        iterations = t;
        for (d, &l) in decisions.iter_mut().zip(&totals) {
            *d = u8::from(l > 0.0);
        }

        if let Some(tr) = trace.as_mut() {
            tr.push(trace_row(t, code, &totals, &decisions, trace_truth.flatten()));
        }

        if cfg.early_stop {
            if decisions == prev_decisions {
                stable += 1;
                if stable >= 2 {
                    break;
                }
            } else {
                stable = 0;
            }
        }
        prev_decisions.copy_from_slice(&decisions);
    }

    let bits = (0..code.n_users())
        .map(|j| code.user_block(j).map(|r| decisions[r]).collect())
        .collect();
    Ok((
        DecodeOutput {
            bits,
            llrs: totals,
            iterations,
        },
        trace,
    ))
}

fn trace_row(
    iteration: usize,
    code: &EquivalentCode,
    totals: &[f64],
    decisions: &[u8],
    truth: Option<&[Vec<u8>]>,
) -> TraceRow {
    let mut mean_abs_llr = Vec::with_capacity(code.n_users());
    let mut bers = truth.map(|_| Vec::with_capacity(code.n_users()));
    for j in 0..code.n_users() {
        let block = code.user_block(j);
        let k = block.len() as f64;
        mean_abs_llr.push(block.clone().map(|r| totals[r].abs()).sum::<f64>() / k);
        if let (Some(bers), Some(truth)) = (bers.as_mut(), truth) {
            let errs = block
                .clone()
                .zip(&truth[j])
                .filter(|&(r, &b)| decisions[r] != b)
                .count();
            bers.push(errs as f64 / k);
        }
    }
    TraceRow {
        iteration,
        mean_abs_llr,
        ber_vs_truth: bers,
    }
}

/// Computes every outgoing message of one check node exactly, sharing one
/// enumeration of all `2^n` sign assignments across the `n` targets.
fn exact_row_update(
    y: f64,
    weights: &[f64],
    llrs_in: &[f64],
    out: &mut [f64],
    clamp: f64,
    exponents: &mut Vec<f64>,
    acc: &mut [f64],
) {
    let n = weights.len();
    let count = 1usize << n;
    let lp: Vec<(f64, f64)> = llrs_in
        .iter()
        .map(|&l| (-softplus(-l), -softplus(l)))
        .collect();

    // Gray-code sweep: exponent of each assignment, tracking the max.
    exponents.clear();
    exponents.reserve(count);
    let mut a: f64 = -weights.iter().sum::<f64>();
    let mut lp_sum: f64 = lp.iter().map(|&(_, m)| m).sum();
    let mut max_e = f64::NEG_INFINITY;
    let mut gray_prev = 0usize;
    for i in 0..count {
        let gray = i ^ (i >> 1);
        let flipped = gray ^ gray_prev;
        if flipped != 0 {
            let j = flipped.trailing_zeros() as usize;
            if gray >> j & 1 == 1 {
                a += 2.0 * weights[j];
                lp_sum += lp[j].0 - lp[j].1;
            } else {
                a -= 2.0 * weights[j];
                lp_sum += lp[j].1 - lp[j].0;
            }
        }
        gray_prev = gray;
        let e = -0.5 * (y - a) * (y - a) + lp_sum;
        exponents.push(e);
        if e > max_e {
            max_e = e;
        }
    }

    // accumulate shifted masses per (edge, sign)
    let acc = &mut acc[..2 * n];
    acc.fill(0.0);
    for (i, &e) in exponents.iter().enumerate() {
        let gray = i ^ (i >> 1);
        let w = (e - max_e).exp();
        for j in 0..n {
            acc[2 * j + (gray >> j & 1)] += w;
        }
    }

    // acc[2j+1] holds the b_j = +1 mass; subtracting the prior LLR turns the
    // posterior ratio into the extrinsic message
    for j in 0..n {
        let l = acc[2 * j + 1].ln() - acc[2 * j].ln() - llrs_in[j];
        out[j] = l.clamp(-clamp, clamp);
    }
}

/// Gaussian-approximate update for every outgoing message of one check node.
fn gauss_row_update(
    y: f64,
    weights: &[f64],
    llrs_in: &[f64],
    out: &mut [f64],
    clamp: f64,
    tanh_buf: &mut [f64],
) {
    let n = weights.len();
    for (t, &l) in tanh_buf[..n].iter_mut().zip(llrs_in) {
        *t = (l / 2.0).tanh();
    }
    for t in 0..n {
        let mut mean = 0.0;
        let mut var = 0.0;
        for j in 0..n {
            if j == t {
                continue;
            }
            mean += weights[j] * tanh_buf[j];
            var += weights[j] * weights[j] * (1.0 - tanh_buf[j] * tanh_buf[j]);
        }
        out[t] = (2.0 * weights[t] * (y - mean) / (1.0 + var)).clamp(-clamp, clamp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::EquivalentCode;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    // Probability-domain marginalization, kept deliberately naive.
    fn oracle_check_llr(y: f64, incident: &[(f64, f64)], target: usize) -> f64 {
        let others: Vec<(f64, f64)> = incident
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target)
            .map(|(_, &e)| e)
            .collect();
        let g_t = incident[target].0;
        let mut num = 0.0;
        let mut den = 0.0;
        for mask in 0..(1usize << others.len()) {
            let mut a = 0.0;
            let mut prior = 1.0;
            for (j, &(g, l)) in others.iter().enumerate() {
                let p_plus = 1.0 / (1.0 + (-l).exp());
                if mask >> j & 1 == 1 {
                    a += g;
                    prior *= p_plus;
                } else {
                    a -= g;
                    prior *= 1.0 - p_plus;
                }
            }
            num += prior * (-0.5 * (y - g_t - a) * (y - g_t - a)).exp();
            den += prior * (-0.5 * (y + g_t - a) * (y + g_t - a)).exp();
        }
        (num / den).ln()
    }

    #[test]
    fn exact_single_neighbor_is_matched_filter() {
        for (y, g) in [(0.7, 0.5), (-1.3, 0.2), (2.0, 1.0)] {
            let l = check_to_var_exact(y, &[(g, 0.0)], 0, 12, 100.0).unwrap();
            assert!((l - 2.0 * g * y).abs() < 1e-12, "y={y} g={g}: {l}");
        }
    }

    #[test]
    fn exact_zero_observation_zero_priors_is_zero() {
        let incident = [(0.5, 0.0), (0.33, 0.0), (0.2, 0.0)];
        for t in 0..3 {
            let l = check_to_var_exact(0.0, &incident, t, 12, 100.0).unwrap();
            assert!(l.abs() < 1e-12);
        }
    }

    #[test]
    fn exact_matches_oracle_on_three_neighbors() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..200 {
            let incident: Vec<(f64, f64)> = (0..3)
                .map(|_| {
                    (
                        rng.random_range(0.05..1.5),
                        rng.random_range(-6.0..6.0),
                    )
                })
                .collect();
            let y = rng.random_range(-4.0..4.0);
            let target = rng.random_range(0..3);
            let got = check_to_var_exact(y, &incident, target, 12, 1e6).unwrap();
            let want = oracle_check_llr(y, &incident, target);
            assert!((got - want).abs() < 1e-12, "got {got}, oracle {want}");
        }
    }

    #[test]
    fn exact_rejects_over_cap() {
        let incident: Vec<(f64, f64)> = (0..6).map(|i| (0.1 * (i + 1) as f64, 0.0)).collect();
        assert!(matches!(
            check_to_var_exact(0.5, &incident, 0, 4, 50.0),
            Err(DecodeError::DegreeOverCap { degree: 6, cap: 4 })
        ));
    }

    #[test]
    fn batched_exact_matches_single_target() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut exponents = Vec::new();
        for _ in 0..50 {
            let n = rng.random_range(1..9usize);
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
            let llrs: Vec<f64> = (0..n).map(|_| rng.random_range(-8.0..8.0)).collect();
            let y = rng.random_range(-5.0..5.0);
            let mut out = vec![0.0; n];
            let mut acc = vec![0.0; 2 * n];
            exact_row_update(y, &weights, &llrs, &mut out, 1e6, &mut exponents, &mut acc);
            let incident: Vec<(f64, f64)> = weights.iter().copied().zip(llrs.iter().copied()).collect();
            for t in 0..n {
                let single = check_to_var_exact(y, &incident, t, 12, 1e6).unwrap();
                assert!(
                    (out[t] - single).abs() < 1e-9,
                    "n={n} t={t}: batched {} vs single {single}",
                    out[t]
                );
            }
        }
    }

    #[test]
    fn gauss_single_neighbor_is_matched_filter() {
        assert!((check_to_var_gauss(0.9, &[(0.4, 0.0)], 0) - 2.0 * 0.4 * 0.9).abs() < 1e-15);
    }

    #[test]
    fn gauss_saturated_neighbor_cancels_its_mean() {
        let y = 1.7;
        let (g_t, g_o) = (0.5, 0.8);
        let l = check_to_var_gauss(y, &[(g_t, 0.0), (g_o, 50.0)], 0);
        assert!((l - 2.0 * g_t * (y - g_o)).abs() < 1e-9);
    }

    #[test]
    fn gauss_zero_priors_hand_formula() {
        let y = -0.6;
        let incident = [(0.5, 0.0), (0.3, 0.0), (0.2, 0.0)];
        let l = check_to_var_gauss(y, &incident, 0);
        let denom = 1.0 + 0.3 * 0.3 + 0.2 * 0.2;
        assert!((l - 2.0 * 0.5 * y / denom).abs() < 1e-15);
    }

    #[test]
    fn var_to_check_cases() {
        assert_eq!(var_to_check(&[3.4], 0, 50.0), 0.0);
        assert!((var_to_check(&[1.0, -0.5, 2.0], 0, 50.0) - 1.5).abs() < 1e-15);
        let perm = var_to_check(&[2.0, 1.0, -0.5], 1, 50.0);
        assert!((perm - 1.5).abs() < 1e-12);
        assert_eq!(var_to_check(&[1e9, 1e9, 0.0], 2, 50.0), 50.0);
    }

    #[test]
    fn messages_stay_finite_under_extreme_inputs() {
        let incident = [(2.0, 49.9), (1.5, -49.9), (0.7, 0.0)];
        for t in 0..3 {
            let e = check_to_var_exact(100.0, &incident, t, 12, 50.0).unwrap();
            assert!(e.is_finite() && e.abs() <= 50.0);
            let g = check_to_var_gauss(-100.0, &incident, t).clamp(-50.0, 50.0);
            assert!(g.is_finite());
        }
    }

    fn single_row_code(g: f64) -> EquivalentCode {
        EquivalentCode::from_parts(vec![vec![(0usize, g)]], 1, 1, 1).unwrap()
    }

    #[test]
    fn scalar_detection_matches_map_rule() {
        let cfg = DecoderConfig::default();
        let g = 0.8;
        let code = single_row_code(g);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..200 {
            let y: f64 = rng.random_range(-3.0..3.0);
            let out = decode(&code, &[y], &cfg).unwrap();
            assert_eq!(out.bits[0][0], u8::from(2.0 * g * y > 0.0));
        }
    }

    #[test]
    fn all_zero_observation_decodes_to_zero_bits() {
        let rows = vec![
            vec![(0usize, 0.5), (1usize, 0.3)],
            vec![(1usize, 0.4), (2usize, 0.2)],
            vec![(0usize, 0.3), (2usize, 0.5)],
        ];
        let code = EquivalentCode::from_parts(rows, 1, 3, 2).unwrap();
        for mode in [CheckMode::Exact, CheckMode::GaussianApprox] {
            let cfg = DecoderConfig {
                check_mode: mode,
                ..DecoderConfig::default()
            };
            let out = decode(&code, &[0.0, 0.0, 0.0], &cfg).unwrap();
            assert_eq!(out.bits[0], vec![0, 0, 0]);
            for l in &out.llrs {
                assert_eq!(*l, 0.0);
            }
        }
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let code = single_row_code(1.0);
        assert!(matches!(
            decode(&code, &[0.1, 0.2], &DecoderConfig::default()),
            Err(DecodeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn trace_reports_per_user_stats() {
        let rows = vec![
            vec![(0usize, 0.9), (1usize, 0.4)],
            vec![(0usize, 0.5), (1usize, 0.7)],
        ];
        let code = EquivalentCode::from_parts(rows, 2, 1, 2).unwrap();
        let truth = vec![vec![1u8], vec![0u8]];
        let cfg = DecoderConfig {
            max_iters: 4,
            early_stop: false,
            ..DecoderConfig::default()
        };
        let (_, trace) = decode_with_trace(&code, &[1.3, -0.2], &cfg, Some(&truth)).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[0].mean_abs_llr.len(), 2);
        assert!(trace[0].ber_vs_truth.as_ref().unwrap().len() == 2);
    }

    #[test]
    fn early_stop_reports_fewer_iterations() {
        let code = single_row_code(1.2);
        let cfg = DecoderConfig {
            max_iters: 50,
            ..DecoderConfig::default()
        };
        let out = decode(&code, &[2.0], &cfg).unwrap();
        assert!(out.iterations < 50);
    }
}

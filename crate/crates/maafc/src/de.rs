//! Density-evolution analysis of the joint BP decoder.
//!
//! In the asymptotic regime the variable-to-check message of user `i` is
//! approximately normal with mean `m_i` and variance `2 m_i`, and the mean
//! evolves as
//!
//! ```text
//! m_i <- h_i^2 sigma_w^2 (d_i m / k) * 2 / (1 + sigma_Y^2)
//! sigma_Y^2 = sum_j h_j^2 d_j sigma_w^2 S(m_j)
//! ```
//!
//! where `S` is a Gaussian-smoothed `1 - tanh` integral capturing how much
//! interference a partially decoded user still contributes. The per-user BER
//! after any iteration is `Q(sqrt(m_i))`, which also yields the closed-form
//! ratio and transfer laws between users.

use std::io::Write;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussHermite;
use thiserror::Error;

use crate::channel::Scenario;
use crate::weights::{q_function, q_inv};

/// Nodes in the cached Gauss-Hermite rule behind [`s_function`].
pub const S_FUNCTION_NODES: usize = 301;

#[derive(Debug, Error)]
pub enum DeError {
    #[error("s_function requires a nonnegative finite argument, got {0}")]
    NegativeArgument(f64),
    #[error("scenario needs at least one user")]
    EmptyUsers,
    #[error("symbol ratio m/k must be positive, got {0}")]
    BadSymbolRatio(f64),
    #[error("sigma_w^2 must be positive, got {0}")]
    BadSigma(f64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("probability {0} outside (0, 1)")]
    BadProbability(f64),
    #[error("gain ratio must be positive, got {0}")]
    BadGainRatio(f64),
    #[error("users carry different weight-set energies ({0} vs {1}); density evolution assumes one")]
    MixedWeightSets(f64, f64),
}

fn hermite_rule() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(NonZeroUsize::new(S_FUNCTION_NODES).unwrap()))
}

/// The interference attenuation integral
/// `S(x) = (1/sqrt(2 pi)) \int (1 - tanh(x - y sqrt(x))) e^{-y^2/2} dy`,
/// evaluated by Gauss-Hermite quadrature after `y = sqrt(2) t`.
pub fn s_function(x: f64) -> Result<f64, DeError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(DeError::NegativeArgument(x));
    }
    let sqrt_x = x.sqrt();
    let scale = std::f64::consts::SQRT_2 * sqrt_x;
    let integral = hermite_rule().integrate(|t| 1.0 - (x - scale * t).tanh());
    Ok(integral / std::f64::consts::PI.sqrt())
}

// ---------------------------------------------------------------------------
// Scenario and state
// ---------------------------------------------------------------------------

/// One user as density evolution sees it: effective gain (power scale folded
/// in) and code degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeUser {
    pub gain: f64,
    pub degree: usize,
}

/// Asymptotic description of a multiple-access run at a fixed symbol ratio.
#[derive(Debug, Clone)]
pub struct DeScenario {
    users: Vec<DeUser>,
    sigma_w_sq: f64,
    symbol_ratio: f64,
}

impl DeScenario {
    pub fn new(users: Vec<DeUser>, sigma_w_sq: f64, symbol_ratio: f64) -> Result<Self, DeError> {
        if users.is_empty() {
            return Err(DeError::EmptyUsers);
        }
        for u in &users {
            if u.degree == 0 {
                return Err(DeError::ZeroDegree);
            }
        }
        if !(sigma_w_sq > 0.0) || !sigma_w_sq.is_finite() {
            return Err(DeError::BadSigma(sigma_w_sq));
        }
        if !(symbol_ratio > 0.0) || !symbol_ratio.is_finite() {
            return Err(DeError::BadSymbolRatio(symbol_ratio));
        }
        Ok(Self {
            users,
            sigma_w_sq,
            symbol_ratio,
        })
    }

    /// Mirrors a simulator scenario at `m` coded symbols: effective gains
    /// are `power_scale * h_j` and the symbol ratio is `m / k`.
    pub fn from_scenario(sc: &Scenario, m: usize) -> Result<Self, DeError> {
        let sigma = sc.users()[0].spec.weight_set.avg_energy();
        for u in sc.users() {
            let other = u.spec.weight_set.avg_energy();
            if (other - sigma).abs() > 1e-12 * sigma.max(other) {
                return Err(DeError::MixedWeightSets(sigma, other));
            }
        }
        let users = sc
            .users()
            .iter()
            .map(|u| DeUser {
                gain: sc.power_scale() * u.gain,
                degree: u.spec.degree,
            })
            .collect();
        Self::new(users, sigma, m as f64 / sc.k() as f64)
    }

    pub fn users(&self) -> &[DeUser] {
        &self.users
    }

    pub fn sigma_w_sq(&self) -> f64 {
        self.sigma_w_sq
    }

    pub fn symbol_ratio(&self) -> f64 {
        self.symbol_ratio
    }

    /// `h_i^2 d_i / h_j^2 d_j`, the ratio entering the BER transfer law.
    pub fn gain_ratio(&self, i: usize, j: usize) -> f64 {
        let a = &self.users[i];
        let b = &self.users[j];
        (a.gain * a.gain * a.degree as f64) / (b.gain * b.gain * b.degree as f64)
    }
}

/// Per-user mean LLRs at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DeState {
    means: Vec<f64>,
    t: usize,
}

impl DeState {
    /// The all-zero initial state (uninformative priors).
    pub fn initial(n_users: usize) -> Self {
        Self {
            means: vec![0.0; n_users],
            t: 0,
        }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn iteration(&self) -> usize {
        self.t
    }
}

/// One density-evolution update of every user's mean LLR.
pub fn de_step(state: &DeState, sc: &DeScenario) -> DeState {
    assert_eq!(state.means.len(), sc.users.len(), "state/scenario user count");
    let sigma_y_sq: f64 = sc
        .users
        .iter()
        .zip(&state.means)
        .map(|(u, &m)| {
            u.gain * u.gain * u.degree as f64 * sc.sigma_w_sq
                * s_function(m).expect("state means are nonnegative")
        })
        .sum();
    let gain = 2.0 / (1.0 + sigma_y_sq);
    let means = sc
        .users
        .iter()
        .map(|u| u.gain * u.gain * sc.sigma_w_sq * u.degree as f64 * sc.symbol_ratio * gain)
        .collect();
    DeState {
        means,
        t: state.t + 1,
    }
}

/// A full trajectory from the all-zero state.
#[derive(Debug, Clone)]
pub struct DeRun {
    /// States from t = 0 up to the final iterate.
    pub states: Vec<DeState>,
    /// Whether the max change fell below the tolerance before `max_t`.
    pub converged: bool,
}

impl DeRun {
    pub fn final_state(&self) -> &DeState {
        self.states.last().expect("trajectory includes t=0")
    }

    /// Predicted BER per user at the final state.
    pub fn final_bers(&self) -> Vec<f64> {
        self.final_state().means().iter().map(|&m| predict_ber(m)).collect()
    }
}

/// Iterates [`de_step`] until the largest mean change drops below `tol` or
/// `max_t` iterations have run.
pub fn de_run(sc: &DeScenario, max_t: usize, tol: f64) -> DeRun {
    let mut states = vec![DeState::initial(sc.users.len())];
    let mut converged = false;
    for _ in 0..max_t {
        let next = de_step(states.last().unwrap(), sc);
        let delta = next
            .means
            .iter()
            .zip(&states.last().unwrap().means)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        states.push(next);
        if delta < tol {
            converged = true;
            break;
        }
    }
    DeRun { states, converged }
}

/// BER of a user whose mean LLR is `m`: `Q(sqrt(m))`.
pub fn predict_ber(m: f64) -> f64 {
    assert!(m >= 0.0, "mean LLR must be nonnegative, got {m}");
    q_function(m.sqrt())
}

/// Maps user `j`'s BER to user `i`'s through the gain/degree ratio:
/// `Q(Q^{-1}(p) * sqrt(h_i^2 d_i / (h_j^2 d_j)))`.
pub fn ber_transfer(p_j: f64, gain_ratio: f64) -> Result<f64, DeError> {
    if !(p_j > 0.0 && p_j < 1.0) {
        return Err(DeError::BadProbability(p_j));
    }
    if !(gain_ratio > 0.0) || !gain_ratio.is_finite() {
        return Err(DeError::BadGainRatio(gain_ratio));
    }
    Ok(q_function(q_inv(p_j) * gain_ratio.sqrt()))
}

/// Writes a trajectory as CSV: `t, m_1.., ber_1..`.
pub fn write_trajectory_csv<W: Write>(run: &DeRun, mut out: W) -> std::io::Result<()> {
    let n = run.states[0].means().len();
    write!(out, "t")?;
    for i in 1..=n {
        write!(out, ",m_{i}")?;
    }
    for i in 1..=n {
        write!(out, ",ber_{i}")?;
    }
    writeln!(out)?;
    for state in &run.states {
        write!(out, "{}", state.iteration())?;
        for &m in state.means() {
            write!(out, ",{m}")?;
        }
        for &m in state.means() {
            write!(out, ",{}", predict_ber(m))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

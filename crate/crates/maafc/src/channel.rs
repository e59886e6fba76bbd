//! Gaussian multiple-access channel composition.
//!
//! Active users transmit one analog fountain coded symbol per slot; the
//! destination observes their gain-weighted superposition in unit-variance
//! noise. Because each coded symbol is a linear combination of BPSK symbols,
//! the superposition is itself a coded symbol of an equivalent code whose
//! generator concatenates the per-user generators scaled by the channel
//! gains. The destination rebuilds that code from the shared seeds and
//! decodes everyone jointly.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::codec::{bpsk_map, extend_generator, CodecError, CodeSpec, GeneratorMatrix};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("scenario must have at least one active user")]
    NoUsers,
    #[error("channel gain for user {0} must be nonzero")]
    ZeroGain(usize),
    #[error("power scale must be positive, got {0}")]
    BadPowerScale(f64),
    #[error("all active users must share the same k (found {0} and {1})")]
    MismatchedK(usize, usize),
    #[error("user {user}: bits length {got} does not match k={k}")]
    BadBitsLength { user: usize, got: usize, k: usize },
    #[error("negative power {0}")]
    NegativePower(f64),
    #[error("equivalent code column {col} out of range for {cols} columns")]
    ColumnOutOfRange { col: usize, cols: usize },
    #[error(transparent)]
    Codec(#[from] CodecError),
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// One active user: channel gain, code spec, and the message to send.
#[derive(Debug, Clone)]
pub struct UserLink {
    pub user_id: usize,
    /// Channel coefficient `h` between this user and the destination.
    pub gain: f64,
    pub spec: CodeSpec,
    pub bits: Vec<u8>,
}

/// The set of active users plus channel-level knobs.
///
/// Noise is always unit variance; the received SNR is swept by scaling every
/// transmitted symbol by a common `power_scale` instead.
#[derive(Debug, Clone)]
pub struct Scenario {
    users: Vec<UserLink>,
    power_scale: f64,
    noise_seed: u64,
}

impl Scenario {
    pub fn new(users: Vec<UserLink>, power_scale: f64, noise_seed: u64) -> Result<Self, ChannelError> {
        if users.is_empty() {
            return Err(ChannelError::NoUsers);
        }
        if !(power_scale > 0.0) || !power_scale.is_finite() {
            return Err(ChannelError::BadPowerScale(power_scale));
        }
        let k = users[0].spec.k;
        for u in &users {
            u.spec.validate()?;
            if u.gain == 0.0 || !u.gain.is_finite() {
                return Err(ChannelError::ZeroGain(u.user_id));
            }
            if u.spec.k != k {
                return Err(ChannelError::MismatchedK(k, u.spec.k));
            }
            if u.bits.len() != k {
                return Err(ChannelError::BadBitsLength {
                    user: u.user_id,
                    got: u.bits.len(),
                    k,
                });
            }
        }
        Ok(Self {
            users,
            power_scale,
            noise_seed,
        })
    }

    /// Builds the scenario with `power_scale` solved so the total received
    /// SNR equals `snr_db`.
    pub fn with_target_snr_db(
        users: Vec<UserLink>,
        snr_db: f64,
        noise_seed: u64,
    ) -> Result<Self, ChannelError> {
        let unit = Self::new(users, 1.0, noise_seed)?;
        let base: f64 = unit.per_user_power().iter().sum();
        let target = 10f64.powf(snr_db / 10.0);
        let alpha = (target / base).sqrt();
        Self::new(unit.users, alpha, noise_seed)
    }

    pub fn users(&self) -> &[UserLink] {
        &self.users
    }

    pub fn power_scale(&self) -> f64 {
        self.power_scale
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise_seed
    }

    pub fn k(&self) -> usize {
        self.users[0].spec.k
    }

    /// Replaces one user's message bits.
    pub fn set_bits(&mut self, user_index: usize, bits: Vec<u8>) -> Result<(), ChannelError> {
        let k = self.k();
        if bits.len() != k {
            return Err(ChannelError::BadBitsLength {
                user: self.users[user_index].user_id,
                got: bits.len(),
                k,
            });
        }
        self.users[user_index].bits = bits;
        Ok(())
    }

    pub fn with_noise_seed(mut self, noise_seed: u64) -> Self {
        self.noise_seed = noise_seed;
        self
    }

    /// Average received power per user: `alpha^2 h_j^2 d_j sigma_w^2`.
    pub fn per_user_power(&self) -> Vec<f64> {
        self.users
            .iter()
            .map(|u| {
                let a = self.power_scale * u.gain;
                a * a * u.spec.degree as f64 * u.spec.weight_set.avg_energy()
            })
            .collect()
    }

    /// Total received signal power over the (unit) noise power, in dB.
    pub fn received_snr_db(&self) -> f64 {
        10.0 * self.per_user_power().iter().sum::<f64>().log10()
    }

    /// The destination-side equivalent code with `m` rows.
    ///
    /// Row `i` concatenates row `i` of every user's generator, each block
    /// scaled by `alpha * h_j`.
    pub fn equivalent_generator(&self, m: usize) -> Result<EquivalentCode, ChannelError> {
        let k = self.k();
        let mut per_user: Vec<GeneratorMatrix> = Vec::with_capacity(self.users.len());
        for u in &self.users {
            per_user.push(extend_generator(&u.spec, &GeneratorMatrix::empty(k), m)?);
        }
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::new();
            for (j, (u, g)) in self.users.iter().zip(&per_user).enumerate() {
                let scale = self.power_scale * u.gain;
                row.extend(g.row(i).iter().map(|&(c, w)| (j * k + c, scale * w)));
            }
            rows.push(row);
        }
        let degree_sum = self.users.iter().map(|u| u.spec.degree).sum();
        EquivalentCode::from_parts(rows, self.users.len(), k, degree_sum)
    }

    /// Stacked BPSK modulation of every user's bits.
    pub fn stacked_symbols(&self) -> Result<Vec<f64>, ChannelError> {
        let mut out = Vec::with_capacity(self.users.len() * self.k());
        for u in &self.users {
            out.extend_from_slice(bpsk_map(&u.bits)?.symbols());
        }
        Ok(out)
    }

    /// Received vector for `m` slots: equivalent encoding plus unit-variance
    /// Gaussian noise drawn from `noise_seed`.
    pub fn transmit(&self, m: usize) -> Result<Vec<f64>, ChannelError> {
        let mut y = self.transmit_noiseless(m)?;
        let mut rng = ChaCha12Rng::seed_from_u64(self.noise_seed);
        for v in &mut y {
            let n: f64 = StandardNormal.sample(&mut rng);
            *v += n;
        }
        Ok(y)
    }

    /// Noise-free received vector, for tests and debugging.
    pub fn transmit_noiseless(&self, m: usize) -> Result<Vec<f64>, ChannelError> {
        let code = self.equivalent_generator(m)?;
        Ok(code.encode(&self.stacked_symbols()?))
    }
}

// ---------------------------------------------------------------------------
// Equivalent code
// ---------------------------------------------------------------------------

/// The destination's view: a single sparse weighted code over the
/// concatenation of all users' messages, laid out in user blocks of `k`
/// columns each.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentCode {
    rows: Vec<Vec<(usize, f64)>>,
    n_users: usize,
    k: usize,
    degree_sum: usize,
}

impl EquivalentCode {
    /// Builds an equivalent code directly from sparse rows. `degree_sum` is
    /// the nominal equivalent degree; composition sets it to the sum of the
    /// users' code degrees.
    pub fn from_parts(
        rows: Vec<Vec<(usize, f64)>>,
        n_users: usize,
        k: usize,
        degree_sum: usize,
    ) -> Result<Self, ChannelError> {
        let cols = n_users * k;
        for row in &rows {
            for &(c, _) in row {
                if c >= cols {
                    return Err(ChannelError::ColumnOutOfRange { col: c, cols });
                }
            }
        }
        Ok(Self {
            rows,
            n_users,
            k,
            degree_sum,
        })
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_cols(&self) -> usize {
        self.n_users * self.k
    }

    /// Equivalent code degree: the sum of the active users' degrees.
    pub fn equivalent_degree(&self) -> usize {
        self.degree_sum
    }

    /// Column range of user block `j`.
    pub fn user_block(&self, j: usize) -> std::ops::Range<usize> {
        j * self.k..(j + 1) * self.k
    }

    /// Applies the code to a stacked symbol vector.
    pub fn encode(&self, stacked: &[f64]) -> Vec<f64> {
        assert_eq!(stacked.len(), self.num_cols(), "stacked vector length");
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, w)| w * stacked[c]).sum())
            .collect()
    }
}

/// Gaussian MAC sum-rate capacity bound `0.5 log2(1 + sum of powers)`.
pub fn sum_capacity(powers: &[f64]) -> Result<f64, ChannelError> {
    let mut total = 0.0;
    for &p in powers {
        if p < 0.0 {
            return Err(ChannelError::NegativePower(p));
        }
        total += p;
    }
    Ok(0.5 * (1.0 + total).log2())
}

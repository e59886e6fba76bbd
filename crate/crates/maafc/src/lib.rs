//! Multiple-access analog fountain codes.
//!
//! Each active user encodes its message with a rateless analog fountain
//! code: every coded symbol is a weighted sum of a few BPSK-modulated
//! information symbols, with weights from a small designed set. When several
//! users transmit at once over a Gaussian multiple-access channel, the
//! superimposed signal is itself an analog fountain code over the union of
//! the users' messages, so a single belief-propagation decoder recovers all
//! users jointly.
//!
//! The crate covers the full pipeline at desk scale:
//!
//! * [`weights`] — weight sets, exact coded-symbol distributions, a
//!   Gaussian-fit score, and a seeded weight-set designer;
//! * [`codec`] — per-user generator matrices with balanced variable degrees,
//!   rateless extension, and encoding;
//! * [`channel`] — the Gaussian MAC: superposition with channel gains, the
//!   destination's equivalent code, received SNR, and the sum-rate capacity
//!   bound;
//! * [`decoder`] — joint BP decoding with exact or Gaussian-approximate
//!   check updates;
//! * [`de`] — density-evolution prediction of per-user mean LLRs and BERs;
//! * [`sim`] — seeded Monte Carlo BER measurement, minimum-symbol search,
//!   and the SNR/rate sweep experiments with CSV output.
//!
//! The `maafc` binary exposes the experiment pipeline as a small CLI; the
//! `examples/` directory has one runnable example per capability.

pub mod channel;
pub mod codec;
pub mod de;
pub mod decoder;
pub mod sim;
pub mod weights;

pub use channel::{sum_capacity, EquivalentCode, Scenario, UserLink};
pub use codec::{bpsk_map, encode, extend_generator, CodeSpec, GeneratorMatrix, ModulatedVector};
pub use de::{ber_transfer, de_run, de_step, predict_ber, s_function, DeScenario, DeState};
pub use decoder::{decode, CheckMode, DecodeOutput, DecoderConfig};
pub use sim::{find_min_symbols, run_ber_point, sweep_rate, sweep_snr, BerPoint, ExperimentConfig};
pub use weights::{
    coded_symbol_pmf, design_weights, gaussianity_residual, q_function, q_inv, DesignConfig,
    GaussFitSpec, SymbolPmf, VarianceMode, WeightSet,
};

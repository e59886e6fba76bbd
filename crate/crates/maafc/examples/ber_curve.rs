//! A reduced BER-versus-inverse-sum-rate curve for the 4-user scenario at
//! 30 dB: joint BP decoding with the Gaussian-approximate check update,
//! simulated BER next to the density-evolution prediction per user.
//!
//! Run with: cargo run --release --example ber_curve

use maafc::decoder::{CheckMode, DecoderConfig};
use maafc::sim::{sweep_rate, BitsSource, ExperimentConfig, PowerSpec, ScenarioConfig, UserConfig};
use maafc::weights::WeightSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        scenario: ScenarioConfig {
            k: 100,
            weight_set: WeightSet::reciprocal_primes(8)?,
            users: (0..4)
                .map(|j| UserConfig {
                    gain: (j + 1) as f64,
                    degree: 4,
                    seed: 1000 + j as u64,
                    bits: BitsSource::Random,
                    replacement: false,
                })
                .collect(),
            power: PowerSpec::TargetSnrDb(30.0),
            noise_seed: 42,
        },
        decoder: DecoderConfig {
            check_mode: CheckMode::GaussianApprox,
            ..DecoderConfig::default()
        },
        trials: 120,
        target_ber: 1e-3,
        min_errors: 30,
        rate_grid: Some(vec![0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]),
        snr_grid: None,
        m_cap: None,
        master_seed: 1,
    };
    print!("{}", sweep_rate(&cfg)?);
    Ok(())
}

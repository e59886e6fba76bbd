//! A reduced sum-rate sweep for two equal-gain users: at each received SNR,
//! search for the fewest coded symbols meeting the target BER and compare
//! the achieved sum-rate against the Gaussian MAC capacity bound.
//!
//! Run with: cargo run --release --example snr_sweep

use maafc::sim::{sweep_snr, BitsSource, ExperimentConfig, PowerSpec, ScenarioConfig, UserConfig};
use maafc::weights::WeightSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        scenario: ScenarioConfig {
            k: 64,
            weight_set: WeightSet::reciprocal_primes(8)?,
            users: (0..2)
                .map(|j| UserConfig {
                    gain: 1.0,
                    degree: 4,
                    seed: 500 + j as u64,
                    bits: BitsSource::Random,
                    replacement: false,
                })
                .collect(),
            power: PowerSpec::TargetSnrDb(10.0),
            noise_seed: 8,
        },
        decoder: Default::default(),
        trials: 150,
        // relaxed target keeps this example fast; the acceptance suite runs
        // the full 1e-3 experiment
        target_ber: 1e-2,
        min_errors: 30,
        rate_grid: None,
        snr_grid: Some(vec![5.0, 10.0, 15.0, 20.0]),
        m_cap: None,
        master_seed: 1,
    };
    print!("{}", sweep_snr(&cfg)?);
    Ok(())
}

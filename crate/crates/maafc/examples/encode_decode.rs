//! Single-user pipeline end to end: build a code, transmit rateless coded
//! symbols over the unit-noise channel, decode with BP, count errors.
//!
//! Run with: cargo run --release --example encode_decode

use maafc::channel::{Scenario, UserLink};
use maafc::codec::CodeSpec;
use maafc::decoder::{decode, DecoderConfig};
use maafc::weights::WeightSet;
use rand::{RngExt, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 200;
    let weight_set = WeightSet::reciprocal_primes(8)?;
    let spec = CodeSpec::new(k, 4, weight_set, 7)?;

    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
    let bits: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();

    let user = UserLink {
        user_id: 0,
        gain: 1.0,
        spec,
        bits: bits.clone(),
    };
    let scenario = Scenario::with_target_snr_db(vec![user], 20.0, 99)?;
    println!("received SNR: {:.2} dB", scenario.received_snr_db());

    let cfg = DecoderConfig::default();
    println!("{:>6} {:>8} {:>10}", "m", "rate", "bit errors");
    for m in [150, 200, 300, 400, 500] {
        let y = scenario.transmit(m)?;
        let code = scenario.equivalent_generator(m)?;
        let out = decode(&code, &y, &cfg)?;
        let errors = out.bits[0]
            .iter()
            .zip(&bits)
            .filter(|(a, b)| a != b)
            .count();
        println!(
            "{m:>6} {:>8.3} {errors:>10}  ({} BP iterations)",
            k as f64 / m as f64,
            out.iterations
        );
    }
    Ok(())
}

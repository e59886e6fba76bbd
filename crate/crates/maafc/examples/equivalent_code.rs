//! Multiple-access composition: two users' coded symbols superimpose into
//! one equivalent code at the destination, with per-user blocks scaled by
//! the channel gains and the equivalent degree summing the users' degrees.
//!
//! Run with: cargo run --release --example equivalent_code

use maafc::channel::{Scenario, UserLink};
use maafc::codec::CodeSpec;
use maafc::weights::WeightSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 8;
    let weight_set = WeightSet::reciprocal_primes(8)?;
    let users = vec![
        UserLink {
            user_id: 0,
            gain: 1.0,
            spec: CodeSpec::new(k, 4, weight_set.clone(), 10)?,
            bits: vec![1, 0, 1, 1, 0, 0, 1, 0],
        },
        UserLink {
            user_id: 1,
            gain: 2.0,
            spec: CodeSpec::new(k, 4, weight_set, 20)?,
            bits: vec![0, 0, 1, 0, 1, 1, 0, 1],
        },
    ];
    let scenario = Scenario::new(users, 1.0, 0)?;

    let m = 4;
    let code = scenario.equivalent_generator(m)?;
    println!(
        "equivalent code: {} columns ({} users x k={k}), degree d_e = {}",
        code.num_cols(),
        code.n_users(),
        code.equivalent_degree()
    );
    for (i, row) in code.rows().iter().enumerate() {
        let entries: Vec<String> = row.iter().map(|(c, w)| format!("{c}:{w:.4}")).collect();
        println!("row {i}: {}", entries.join(" "));
    }

    // the superposed observation equals the equivalent encoding exactly
    let clean = scenario.transmit_noiseless(m)?;
    let direct = code.encode(&scenario.stacked_symbols()?);
    println!("\nnoiseless y     : {clean:?}");
    assert_eq!(clean, direct);

    println!("per-user powers : {:?}", scenario.per_user_power());
    println!("received SNR    : {:.2} dB", scenario.received_snr_db());
    println!(
        "sum capacity    : {:.3} bits/use",
        maafc::channel::sum_capacity(&scenario.per_user_power())?
    );
    Ok(())
}

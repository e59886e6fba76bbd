//! Density evolution for the 4-user scenario with gains 1..4: the mean-LLR
//! trajectory, the gain-squared-times-degree ratio law it obeys at every
//! iteration, and the closed-form BER transfer between users.
//!
//! Run with: cargo run --release --example density_evolution

use maafc::de::{ber_transfer, de_run, predict_ber, s_function, DeScenario, DeUser};
use maafc::weights::WeightSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma_w_sq = WeightSet::reciprocal_primes(8)?.avg_energy();

    // effective gains for 30 dB total received SNR
    let base: f64 = (1..=4).map(|h| (h * h) as f64).sum::<f64>() * 4.0 * sigma_w_sq;
    let alpha = (1000.0f64 / base).sqrt();
    let users: Vec<DeUser> = (1..=4)
        .map(|h| DeUser {
            gain: alpha * h as f64,
            degree: 4,
        })
        .collect();

    println!("S(x) samples: S(0) = {:.6}, S(1) = {:.6}, S(10) = {:.3e}",
        s_function(0.0)?, s_function(1.0)?, s_function(10.0)?);

    let sc = DeScenario::new(users, sigma_w_sq, 0.6)?;
    let run = de_run(&sc, 50, 1e-10);
    println!("\nm/k = {}, converged = {}", sc.symbol_ratio(), run.converged);
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "t", "m_1", "m_2", "m_3", "m_4");
    for state in &run.states {
        let m = state.means();
        println!(
            "{:>3} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            state.iteration(),
            m[0], m[1], m[2], m[3]
        );
    }

    let final_m = run.final_state().means();
    println!("\nratio law m_i/m_1 vs h_i^2 d_i / h_1^2 d_1:");
    for i in 0..4 {
        println!(
            "  user {}: {:.6} vs {:.6}",
            i + 1,
            final_m[i] / final_m[0],
            sc.gain_ratio(i, 0)
        );
    }

    let p1 = predict_ber(final_m[0]);
    println!("\nBER transfer from user 1 (p = {p1:.3e}):");
    for i in 1..4 {
        println!(
            "  user {}: direct {:.3e}, transferred {:.3e}",
            i + 1,
            predict_ber(final_m[i]),
            ber_transfer(p1, sc.gain_ratio(i, 0))?
        );
    }
    Ok(())
}

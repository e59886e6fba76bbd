//! Weight-set design: search for an f = 8 set whose degree-8 coded symbol
//! passes the binned Gaussian-fit criterion, then score the classic
//! reciprocal-prime set under both variance conventions for comparison.
//!
//! Run with: cargo run --release --example design_weights

use maafc::weights::{
    coded_symbol_pmf, design_weights, gaussianity_residual, DesignConfig, GaussFitSpec,
    VarianceMode, WeightSet,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fit = GaussFitSpec::new(0.2, 1e-4, 15, VarianceMode::MatchedVariance)?;
    let cfg = DesignConfig::new(8, 8, fit, 2024)?;

    let designed = design_weights(&cfg)?;
    let pmf = coded_symbol_pmf(&designed, 8, false)?;
    println!("designed set: {designed}");
    println!("  avg energy      : {:.6}", designed.avg_energy());
    println!(
        "  residual matched: {:.3e} (epsilon = {:.0e})",
        gaussianity_residual(&pmf, &fit)?,
        fit.epsilon
    );

    let reference = WeightSet::reciprocal_primes(8)?;
    let ref_pmf = coded_symbol_pmf(&reference, 8, false)?;
    let standard = GaussFitSpec::new(0.2, 1e-4, 15, VarianceMode::StandardNormal)?;
    println!("\nreciprocal-prime set: {reference}");
    println!("  avg energy        : {:.7}", reference.avg_energy());
    println!(
        "  residual matched  : {:.3e}",
        gaussianity_residual(&ref_pmf, &fit)?
    );
    println!(
        "  residual standard : {:.3e}",
        gaussianity_residual(&ref_pmf, &standard)?
    );
    println!(
        "  symbol variance   : {:.4} (degree 8 without replacement)",
        ref_pmf.variance()
    );
    Ok(())
}

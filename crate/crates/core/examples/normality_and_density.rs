//! Shapiro-Wilk test, kernel density estimate, ECDF and QQ points of a
//! normal and a skewed sample.

use simout::stats::{ecdf, kde, qq_points, shapiro_wilk, skewness};
use simout::synth::RunRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RunRng::new(2024, 0);
    let normal: Vec<f64> = (0..200).map(|_| 10.0 + 2.0 * rng.normal()).collect();
    let skewed: Vec<f64> = (0..200).map(|_| -rng.uniform().ln()).collect();

    for (name, s) in [("normal", &normal), ("exponential", &skewed)] {
        let sw = shapiro_wilk(s)?;
        let d = kde(s)?;
        let (mode, peak) = d.mode();
        let e = ecdf(s)?;
        let qq = qq_points(s)?;
        println!("{name}:");
        println!("  Shapiro-Wilk W = {:.4}, p = {:.4}", sw.w, sw.p);
        println!("  skewness = {:.3}", skewness(s)?);
        println!(
            "  KDE bandwidth {:.4}, mode {mode:.3} (density {peak:.3}), integral {:.4}",
            d.bandwidth,
            d.integral()
        );
        println!("  ECDF at the mode: {:.3}", e.eval(mode));
        println!("  QQ extremes: {:?} .. {:?}", qq[0], qq[qq.len() - 1]);
    }
    Ok(())
}

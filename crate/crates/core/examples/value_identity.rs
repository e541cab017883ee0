//! Oracle rollouts: the discounted return equals `d₀ + ln γ·J`, and policies
//! with higher return have lower deviation.

use hrrl::oracle::{identity_report, standard_samples, OracleSettings, Quadrature};
use hrrl::RunConfig;

fn main() -> hrrl::Result<()> {
    let cfg = RunConfig::default();
    let samples = standard_samples(4, 3, &cfg);
    for quadrature in [Quadrature::ExactKernel, Quadrature::LeftRiemann] {
        let settings = OracleSettings {
            quadrature,
            ..OracleSettings::from_config(&cfg).with_gamma(0.5)
        };
        let report = identity_report(&samples, &settings, &cfg)?;
        println!("{quadrature:?}: worst gap {:.3e}", report.max_gap);
        if quadrature == Quadrature::ExactKernel {
            println!("  {:>3} {:<14} {:>9} {:>9} {:>7}", "id", "policy", "V", "J", "d0");
            for r in &report.rows {
                println!("  {:>3} {:<14} {:>9.4} {:>9.4} {:>7.3}", r.sample_id, r.policy_id, r.v, r.j, r.d0);
            }
            let (qualifying, reversed) = report.ordering(1e-2);
            println!("  {reversed}/{qualifying} separated pairs order J opposite to V");
        }
    }
    Ok(())
}

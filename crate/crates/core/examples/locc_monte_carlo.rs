//! Seeded Monte-Carlo search for a violation of monotonicity on the
//! hexagon, plus the exact gap of a projective measurement on a Bell pair.

use multinv::invariants::StateTensor;
use multinv::locc::{monotonicity_gap, monte_carlo_test, KrausFamily, MonteCarloConfig};
use multinv::psigraph::named;

fn main() -> multinv::Result<()> {
    let hexagon = named::cycle(3);
    let report = monte_carlo_test(&hexagon, &MonteCarloConfig::new(vec![2, 2], 500, 42))?;
    println!("{} trials: min gap {:.3e}, mean gap {:.3e}", report.trials, report.min_gap, report.mean_gap);
    if let Some(w) = &report.witness {
        println!("smallest gap at trial {} ({} Kraus operators on party {})", w.trial, w.family.operators.len(), w.family.party);
    }
    let gap = monotonicity_gap(&named::square(), &StateTensor::bell(2), &KrausFamily::projective(2, 0))?;
    println!("measuring one half of a Bell pair: gap {gap:.8} (1 - 1/sqrt 2 = {:.8})", 1.0 - std::f64::consts::FRAC_1_SQRT_2);
    Ok(())
}

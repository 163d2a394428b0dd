//! Certify edge convexity of B3 by construction and check each color with
//! the verifier.

use multinv::convexity::{certify_coxeter, CertificationMethod};
use multinv::coxeter::CDDiagram;
use multinv::feasibility::SolverOptions;

fn main() -> multinv::Result<()> {
    let d = CDDiagram::parse("B3")?;
    let result = certify_coxeter(&d, CertificationMethod::Construct, &SolverOptions::default())?;
    println!("{}: order {}, {} reflecting cuts", result.diagram, result.order, result.cut_count);
    for color in &result.colors {
        println!(
            "  {}: {:?}, passed {}, sum residual {:.1e}, min eigenvalue {:.1e}",
            color.color,
            color.route,
            color.report.passed,
            color.report.max_sum_residual,
            color.report.min_eigenvalue
        );
    }
    Ok(())
}

//! Build the Cayley psi-graph of B2 (the octagon) and run the
//! transitivity battery on it.

use multinv::coxeter::{enumerate_group, CDDiagram};
use multinv::psigraph::{from_cayley, transitivity_battery};

fn main() -> multinv::Result<()> {
    let g = enumerate_group(&CDDiagram::parse("B2")?)?;
    let z = from_cayley(&g);
    println!("{}", serde_json::to_string_pretty(&z)?);
    let report = transitivity_battery(&z)?;
    println!("transitivity: {report:?}");
    println!("all five agree: {}", report.all_agree());
    Ok(())
}

//! Census of connected psi-graphs with three colors and up to four white
//! vertices, classified by mirror property and Coxeter type.

use multinv::cuts::{is_mirror, recognize_coxeter};
use multinv::psigraph::{enumerate_psigraphs, transitivity_battery, EnumerationCaps};

fn main() -> multinv::Result<()> {
    for n in 1..=4 {
        let graphs = enumerate_psigraphs(n, 3, true, EnumerationCaps::default())?;
        let mut mirrors = Vec::new();
        let mut transitive = 0;
        for z in &graphs {
            if transitivity_battery(z)?.all_true() {
                transitive += 1;
            }
            if is_mirror(z)? {
                if let Some(d) = recognize_coxeter(z)?.diagram() {
                    mirrors.push(d.to_string());
                }
            }
        }
        println!(
            "n = {n}: {:>2} graphs, {transitive} edge-transitive, mirror graphs: {}",
            graphs.len(),
            if mirrors.is_empty() { "none".into() } else { mirrors.join(", ") }
        );
    }
    Ok(())
}

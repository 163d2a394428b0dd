//! List the reflecting cuts of the 3-cube and recognize it as the Cayley
//! graph of A1 x A1 x A1. K_{3,3} is shown for contrast.

use multinv::cuts::{enumerate_cuts, is_mirror, recognize_coxeter};
use multinv::psigraph::{named, PsiGraph};

fn describe(name: &str, z: &PsiGraph) -> multinv::Result<()> {
    let cuts = enumerate_cuts(z)?;
    println!("{name}: {} reflecting cuts, mirror graph: {}", cuts.len(), is_mirror(z)?);
    for (i, cut) in cuts.iter().enumerate() {
        let fixed: Vec<String> = cut
            .fixed_edges()
            .iter()
            .map(|e| format!("{}@{}", z.colors()[e.color], e.white))
            .collect();
        println!("  cut {i}: fixes {}", fixed.join(" "));
    }
    println!("  recognition: {}", serde_json::to_string(&recognize_coxeter(z)?)?);
    Ok(())
}

fn main() -> multinv::Result<()> {
    describe("cube", &named::hypercube(3))?;
    let k33 = PsiGraph::from_sigma(3, vec!["a".into(), "b".into(), "c".into()], vec![
        vec![0, 1, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
    ])?;
    describe("K33", &k33)
}

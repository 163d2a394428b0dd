//! Coset graphs of B3: the cube B3/A2 and the octahedron B3/B2. Each polytope
//! recipe is audited pair by pair, with the solver as fallback.

use multinv::coset::{build_coset_graph, project_cuts_to_planes, recipe_with_fallback, Recipe};
use multinv::coxeter::{enumerate_group, CDDiagram};
use multinv::cuts::enumerate_cayley_cuts;
use multinv::feasibility::SolverOptions;
use multinv::psigraph::CayleyPsiGraph;

fn main() -> multinv::Result<()> {
    let g = enumerate_group(&CDDiagram::parse("B3")?)?;
    let cay = CayleyPsiGraph::new(g.clone());
    let cuts = enumerate_cayley_cuts(&cay);
    for (sub, recipe) in [(vec![0, 1], Recipe::Hypercube), (vec![1, 2], Recipe::Orthoplex)] {
        let cg = build_coset_graph(&g, &sub)?;
        let planes = project_cuts_to_planes(&cay, &cuts, &cg);
        let audit = recipe_with_fallback(&cg, &planes, recipe, &SolverOptions::default())?;
        let tag = cg.tag.map_or("untagged".to_string(), |t| t.to_string());
        println!("subgroup {sub:?}: {tag}, {} vertices, {} planes", cg.vertex_count(), planes.len());
        for p in audit.failing_pairs() {
            println!("  recipe misses pair ({}, {}) at distance {}: sum {:.3}", p.u, p.v, p.distance, p.candidate_sum);
        }
        println!(
            "  {recipe:?} recipe {}; certified: {}",
            if audit.fallback_used { "fell back to the solver" } else { "verified as is" },
            audit.certificate.is_some()
        );
    }
    Ok(())
}

//! Constructive vertex certificates for the named polytopes. Each recipe
//! produces a candidate that is always checked by the verifier; failing
//! candidates fall back to the solver.

use nalgebra::DMatrix;
use serde::Serialize;

use super::certificate::{
    solve_vertex_convexity, vertex_pair_system, VertexConvexityCertificate, VertexSolveOutcome,
};
use super::{CosetGraph, PolytopeKind, ReflectingPlane};
use crate::error::{Error, Result};
use crate::feasibility::{Provenance, SolverOptions, Tolerances, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipe {
    Simplex,
    Hypercube,
    Orthoplex,
    Demihypercube,
}

impl Recipe {
    pub fn kind(self) -> PolytopeKind {
        match self {
            Recipe::Simplex => PolytopeKind::Simplex,
            Recipe::Hypercube => PolytopeKind::Hypercube,
            Recipe::Orthoplex => PolytopeKind::Orthoplex,
            Recipe::Demihypercube => PolytopeKind::Demihypercube,
        }
    }

    pub fn for_kind(kind: PolytopeKind) -> Self {
        match kind {
            PolytopeKind::Simplex => Recipe::Simplex,
            PolytopeKind::Hypercube => Recipe::Hypercube,
            PolytopeKind::Orthoplex => Recipe::Orthoplex,
            PolytopeKind::Demihypercube => Recipe::Demihypercube,
        }
    }

    pub fn candidate(self, cg: &CosetGraph, planes: &[ReflectingPlane]) -> Result<VertexConvexityCertificate> {
        match self {
            Recipe::Simplex => simplex_certificate(cg, planes),
            Recipe::Hypercube => hypercube_certificate(cg, planes),
            Recipe::Orthoplex => orthoplex_certificate(cg, planes),
            Recipe::Demihypercube => demihypercube_certificate(cg, planes),
        }
    }
}

fn require(cg: &CosetGraph, kind: PolytopeKind) -> Result<()> {
    match cg.tag {
        Some(tag) if tag.is_a(kind) => Ok(()),
        other => Err(Error::WrongTag {
            expected: kind.to_string(),
            found: other.map_or_else(|| "untagged".to_string(), |t| t.to_string()),
        }),
    }
}

/// Weight one on the plane exchanging exactly one pair of vertices and
/// fixing all others, one such plane per pair.
pub fn simplex_certificate(cg: &CosetGraph, planes: &[ReflectingPlane]) -> Result<VertexConvexityCertificate> {
    require(cg, PolytopeKind::Simplex)?;
    let system = vertex_pair_system(cg.vertex_count(), planes);
    let mut covered = std::collections::HashSet::new();
    let mats = system
        .blocks()
        .iter()
        .map(|b| {
            let plane = &planes[b.source];
            let moved = (0..plane.involution.len()).filter(|&v| plane.involution[v] != v).count();
            let pair = (b.r_items[0].min(b.mirror[0]), b.r_items[0].max(b.mirror[0]));
            if moved == 2 && covered.insert(pair) {
                DMatrix::identity(1, 1)
            } else {
                DMatrix::zeros(b.r_items.len(), b.r_items.len())
            }
        })
        .collect::<Vec<_>>();
    Ok(VertexConvexityCertificate::from_matrices(&system, &mats, Provenance::Constructed))
}

/// Identity on every plane's `R` side: weight one exactly on the pairs of
/// mirror images.
fn identity_candidate(cg: &CosetGraph, planes: &[ReflectingPlane]) -> VertexConvexityCertificate {
    let system = vertex_pair_system(cg.vertex_count(), planes);
    let mats: Vec<DMatrix<f64>> = system
        .blocks()
        .iter()
        .map(|b| DMatrix::identity(b.r_items.len(), b.r_items.len()))
        .collect();
    VertexConvexityCertificate::from_matrices(&system, &mats, Provenance::Constructed)
}

pub fn hypercube_certificate(cg: &CosetGraph, planes: &[ReflectingPlane]) -> Result<VertexConvexityCertificate> {
    require(cg, PolytopeKind::Hypercube)?;
    Ok(identity_candidate(cg, planes))
}

pub fn orthoplex_certificate(cg: &CosetGraph, planes: &[ReflectingPlane]) -> Result<VertexConvexityCertificate> {
    require(cg, PolytopeKind::Orthoplex)?;
    Ok(identity_candidate(cg, planes))
}

pub fn demihypercube_certificate(cg: &CosetGraph, planes: &[ReflectingPlane]) -> Result<VertexConvexityCertificate> {
    require(cg, PolytopeKind::Demihypercube)?;
    Ok(identity_candidate(cg, planes))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairAudit {
    pub u: usize,
    pub v: usize,
    pub distance: usize,
    pub separating_planes: usize,
    pub candidate_sum: f64,
    pub passed: bool,
}

/// Outcome of checking a recipe candidate pair by pair, and of the solver
/// fallback when the candidate fails.
#[derive(Clone, Debug, Serialize)]
pub struct RecipeAudit {
    pub recipe: Recipe,
    pub candidate: VertexConvexityCertificate,
    pub candidate_report: VerificationReport,
    pub pairs: Vec<PairAudit>,
    pub fallback_used: bool,
    pub fallback_sweeps: Option<usize>,
    /// A verified certificate: the candidate when it passes, otherwise the
    /// solver's result if it converged.
    pub certificate: Option<VertexConvexityCertificate>,
}

impl RecipeAudit {
    pub fn failing_pairs(&self) -> impl Iterator<Item = &PairAudit> {
        self.pairs.iter().filter(|p| !p.passed)
    }
}

pub fn recipe_with_fallback(
    cg: &CosetGraph,
    planes: &[ReflectingPlane],
    recipe: Recipe,
    options: &SolverOptions,
) -> Result<RecipeAudit> {
    let candidate = recipe.candidate(cg, planes)?;
    let n = cg.vertex_count();
    let system = vertex_pair_system(n, planes);
    let mats = candidate.matrices(&system)?;
    let tol: Tolerances = candidate.tolerances;
    let candidate_report = system.verify(&mats, tol);
    let sums = system.pair_sums(&mats);
    let counts = system.separation_counts();
    let dist: Vec<Vec<usize>> = (0..n).map(|u| cg.distances_from(u)).collect();
    let pairs = system
        .pairs()
        .iter()
        .zip(sums.iter().zip(&counts))
        .map(|(&(u, v), (&s, &c))| PairAudit {
            u,
            v,
            distance: dist[u][v],
            separating_planes: c,
            candidate_sum: s,
            passed: c > 0 && (s - 1.0).abs() <= tol.sum,
        })
        .collect();
    let (certificate, fallback_used, fallback_sweeps) = if candidate_report.passed {
        (Some(candidate.clone()), false, None)
    } else {
        log::info!(
            "{recipe:?} candidate fails (residual {:.3e}); solving",
            candidate_report.max_sum_residual
        );
        match solve_vertex_convexity(n, planes, options) {
            VertexSolveOutcome::Certified { certificate, sweeps } => (Some(certificate), true, Some(sweeps)),
            VertexSolveOutcome::NotConverged { sweeps, .. } => (None, true, Some(sweeps)),
            VertexSolveOutcome::Infeasible { .. } => (None, true, None),
        }
    };
    Ok(RecipeAudit {
        recipe,
        candidate,
        candidate_report,
        pairs,
        fallback_used,
        fallback_sweeps,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_coset_graph, project_cuts_to_planes, verify_vertex_convexity};
    use super::*;
    use crate::coxeter::{enumerate_group, CDDiagram};
    use crate::cuts::enumerate_cayley_cuts;
    use crate::psigraph::CayleyPsiGraph;

    fn setup(s: &str, k: &[usize]) -> (CosetGraph, Vec<ReflectingPlane>) {
        let cay = CayleyPsiGraph::new(enumerate_group(&CDDiagram::parse(s).unwrap()).unwrap());
        let cuts = enumerate_cayley_cuts(&cay);
        let cg = build_coset_graph(&cay.group, k).unwrap();
        let planes = project_cuts_to_planes(&cay, &cuts, &cg);
        (cg, planes)
    }

    fn passes(cg: &CosetGraph, planes: &[ReflectingPlane], cert: &VertexConvexityCertificate) -> bool {
        verify_vertex_convexity(cg.vertex_count(), planes, cert).unwrap().passed
    }

    #[test]
    fn simplex_recipe_verifies() {
        for (s, k) in [("A2", vec![0]), ("A3", vec![0, 1]), ("A4", vec![0, 1, 2]), ("A1+A1", vec![0])] {
            let (cg, planes) = setup(s, &k);
            let cert = simplex_certificate(&cg, &planes).unwrap();
            assert!(passes(&cg, &planes, &cert), "{s}");
            let units = cert.planes.iter().filter(|p| p.p.iter().flatten().any(|&x| x == 1.0)).count();
            let n = cg.vertex_count();
            assert_eq!(units, n * (n - 1) / 2);
        }
    }

    #[test]
    fn tetrahedral_demicube_matches_simplex() {
        // the D3 layout (two leaves on a branch node) is A3 with the middle
        // node first; removing a leaf leaves the tetrahedron
        let d = CDDiagram::from_matrix(
            vec!["c".into(), "l1".into(), "l2".into()],
            vec![vec![1, 3, 3], vec![3, 1, 2], vec![3, 2, 1]],
        )
        .unwrap();
        let cay = CayleyPsiGraph::new(enumerate_group(&d).unwrap());
        let cuts = enumerate_cayley_cuts(&cay);
        let cg = build_coset_graph(&cay.group, &[0, 1]).unwrap();
        let planes = project_cuts_to_planes(&cay, &cuts, &cg);
        assert_eq!(cg.tag, Some(crate::coset::PolytopeTag::Simplex(3)));
        assert!(cg.tag.unwrap().is_a(PolytopeKind::Simplex));
        assert!(passes(&cg, &planes, &simplex_certificate(&cg, &planes).unwrap()));
        let audit = recipe_with_fallback(&cg, &planes, Recipe::Demihypercube, &SolverOptions::default()).unwrap();
        assert!(audit.certificate.is_some());
    }

    #[test]
    fn wrong_tag_is_rejected() {
        let (cg, planes) = setup("B3", &[0, 1]);
        assert!(matches!(simplex_certificate(&cg, &planes), Err(Error::WrongTag { .. })));
        assert!(matches!(orthoplex_certificate(&cg, &planes), Err(Error::WrongTag { .. })));
    }

    #[test]
    fn orthoplex_identity_recipe_verifies() {
        for n in 2..=4 {
            let k: Vec<usize> = (1..n).collect();
            let (cg, planes) = setup(&format!("B{n}"), &k);
            let cert = orthoplex_certificate(&cg, &planes).unwrap();
            assert!(passes(&cg, &planes, &cert), "B{n}");
        }
    }

    #[test]
    fn hypercube_audit_locates_failures_at_distance_three() {
        let (cg, planes) = setup("B2", &[0]);
        let audit = recipe_with_fallback(&cg, &planes, Recipe::Hypercube, &SolverOptions::default()).unwrap();
        assert!(audit.candidate_report.passed);

        let (cg, planes) = setup("B3", &[0, 1]);
        let audit = recipe_with_fallback(&cg, &planes, Recipe::Hypercube, &SolverOptions::default()).unwrap();
        for p in &audit.pairs {
            assert_eq!(p.passed, p.distance <= 2, "{p:?}");
        }
        assert!(audit.fallback_used);
        let cert = audit.certificate.expect("solver certifies the cube");
        assert!(passes(&cg, &planes, &cert));
    }

    #[test]
    fn demicube_d4_falls_back_to_the_solver() {
        let (cg, planes) = setup("D4", &[0, 1, 2]);
        let audit = recipe_with_fallback(&cg, &planes, Recipe::Demihypercube, &SolverOptions::default()).unwrap();
        let failing: Vec<_> = audit.failing_pairs().collect();
        assert!(!failing.is_empty());
        assert!(failing.iter().all(|p| p.distance == 2 && cg.distances_from(p.u).iter().max() == Some(&2)));
        let cert = audit.certificate.expect("solver certifies the demicube");
        assert!(passes(&cg, &planes, &cert));
    }
}

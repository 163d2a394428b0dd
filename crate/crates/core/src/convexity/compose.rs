//! Edge certificates assembled from a subgroup's edge certificates and a
//! vertex certificate on the coset graph.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{edge_pair_system, verify_edge_convexity, EdgeConvexityCertificate};
use crate::coset::{
    build_coset_graph, edgevertex_certificate, planes_from_cuts, project_cuts_to_planes,
    transport_vertex_certificate, verify_vertex_convexity, CosetGraph, PlaneSide, ReflectingPlane,
    VertexConvexityCertificate,
};
use crate::coxeter::CoxeterGroup;
use crate::cuts::{cut_reflection, enumerate_cayley_cuts, ReflectingCut, Side};
use crate::error::{Error, Result};
use crate::feasibility::Provenance;
use crate::psigraph::{CayleyPsiGraph, EdgeId};

/// Everything [`compose_coset`] reads. `coset` must be built for a subgroup
/// `H` containing `color`, `planes` projected from `cuts`, and `sub_cuts`
/// enumerated on `sub_cay`, the Cayley graph of `coset.embedding.subgroup`.
pub struct ComposeInputs<'a> {
    pub cay: &'a CayleyPsiGraph,
    pub cuts: &'a [ReflectingCut],
    pub coset: &'a CosetGraph,
    pub planes: &'a [ReflectingPlane],
    pub vertex_cert: &'a VertexConvexityCertificate,
    pub sub_cay: &'a CayleyPsiGraph,
    pub sub_cuts: &'a [ReflectingCut],
    pub sub_cert: &'a EdgeConvexityCertificate,
    pub color: usize,
}

/// Edge certificate of `color` on `Cay(G)`.
///
/// For a cut `t`, edges in cosets strictly on its `R` side take the vertex
/// certificate's entry between their cosets, but only on the first cut
/// inducing each plane. Edges in a coset `Hg` the cut passes through take
/// the subgroup certificate's entries on the cut `g t g^{-1}` of `Cay(H)`,
/// read through `x -> x g^{-1}`. All other entries are zero. The result is
/// verified before it is returned.
pub fn compose_coset(inp: &ComposeInputs<'_>) -> Result<EdgeConvexityCertificate> {
    let g = &inp.cay.group;
    let z = &inp.cay.graph;
    let emb = &inp.coset.embedding;
    let h_color = emb
        .nodes
        .iter()
        .position(|&a| a == inp.color)
        .ok_or_else(|| Error::InvalidSubgroup(format!("color {} is not in the subgroup", inp.color)))?;
    let n_cosets = inp.coset.vertex_count();
    let vertex_report = verify_vertex_convexity(n_cosets, inp.planes, inp.vertex_cert)?;
    if !vertex_report.passed {
        return Err(Error::CertificateRejected(format!(
            "vertex certificate does not verify (residual {:.3e}, min eigenvalue {:.3e})",
            vertex_report.max_sum_residual, vertex_report.min_eigenvalue
        )));
    }
    let sub_report = verify_edge_convexity(&inp.sub_cay.graph, inp.sub_cuts, inp.sub_cert)?;
    if !sub_report.passed {
        return Err(Error::CertificateRejected(format!(
            "subgroup certificate does not verify (residual {:.3e}, min eigenvalue {:.3e})",
            sub_report.max_sum_residual, sub_report.min_eigenvalue
        )));
    }

    let restrict = emb.restrict();
    let sub_cut_of: HashMap<usize, usize> = inp
        .sub_cuts
        .iter()
        .enumerate()
        .map(|(i, c)| (cut_reflection(inp.sub_cay, c), i))
        .collect();
    let vertex_mats: HashMap<usize, (Vec<usize>, DMatrix<f64>)> = inp
        .vertex_cert
        .planes
        .iter()
        .map(|p| {
            let k = p.r_vertices.len();
            let m = DMatrix::from_fn(k, k, |i, j| p.p[i][j]);
            (p.plane_id, (p.r_vertices.clone(), m))
        })
        .collect();
    let primary_plane: HashMap<usize, usize> = inp
        .planes
        .iter()
        .enumerate()
        .map(|(pid, p)| (p.source_cuts[0], pid))
        .collect();
    let plane_of_cut: HashMap<usize, usize> = inp
        .planes
        .iter()
        .enumerate()
        .flat_map(|(pid, p)| p.source_cuts.iter().map(move |&c| (c, pid)))
        .collect();

    let coset_of_edge = |e: EdgeId| inp.coset.lift(inp.cay.element_of(e.white));
    let system = edge_pair_system(z, inp.cuts, inp.color);
    let mut mats = system.zero_matrices();
    for (block, p) in system.blocks().iter().zip(mats.iter_mut()) {
        let t_id = block.source;
        let t = cut_reflection(inp.cay, &inp.cuts[t_id]);
        let plane_id = plane_of_cut[&t_id];
        let plane = &inp.planes[plane_id];
        let edges: Vec<EdgeId> = block
            .r_items
            .iter()
            .map(|&w| EdgeId { color: inp.color, white: w })
            .collect();
        let cosets: Vec<usize> = edges.iter().map(|&e| coset_of_edge(e)).collect();

        if primary_plane.get(&t_id) == Some(&plane_id) {
            if let Some((rows, vm)) = vertex_mats.get(&plane_id) {
                let pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &c)| (c, i)).collect();
                for (i, ci) in cosets.iter().enumerate() {
                    for (j, cj) in cosets.iter().enumerate() {
                        if let (Some(&a), Some(&b)) = (pos.get(ci), pos.get(cj)) {
                            if plane.sides[*ci] == PlaneSide::R && plane.sides[*cj] == PlaneSide::R {
                                p[(i, j)] = vm[(a, b)];
                            }
                        }
                    }
                }
            }
        }

        // cosets the cut passes through, each read through its subgroup cut
        let mut sliced: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &c) in cosets.iter().enumerate() {
            if plane.sides[c] == PlaneSide::On {
                sliced.entry(c).or_default().push(i);
            }
        }
        for (c, members) in sliced {
            let rep = emb.representatives[c];
            let rep_inv = g.inverse(rep);
            let tau = restrict[g.mul(g.mul(rep, t), rep_inv)].ok_or_else(|| {
                Error::CertificateRejected("conjugated reflection leaves the subgroup".into())
            })?;
            let sub_id = *sub_cut_of
                .get(&tau)
                .ok_or_else(|| Error::CertificateRejected("no subgroup cut for a conjugated reflection".into()))?;
            let sub_cut = &inp.sub_cuts[sub_id];
            let Some((rows, hm)) = inp.sub_cert.matrix_for_cut(sub_id) else {
                continue;
            };
            let pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, r)| (r.1, i)).collect();
            let image = |i: usize| -> Result<usize> {
                let x = inp.cay.element_of(edges[i].white);
                let h = restrict[g.mul(x, rep_inv)]
                    .ok_or_else(|| Error::CertificateRejected("coset map leaves the subgroup".into()))?;
                let he = inp.sub_cay.edge_at_element(h_color, h);
                let he = match sub_cut.edge_side(&inp.sub_cay.graph, he) {
                    Some(Side::R) => he,
                    Some(Side::L) => sub_cut.mirror_edge(&inp.sub_cay.graph, he),
                    None => {
                        return Err(Error::CertificateRejected(
                            "an edge off the cut maps onto the subgroup cut".into(),
                        ))
                    }
                };
                pos.get(&he.white)
                    .copied()
                    .ok_or_else(|| Error::CertificateRejected("subgroup certificate misses an edge".into()))
            };
            let images: Vec<usize> = members.iter().map(|&i| image(i)).collect::<Result<_>>()?;
            for (a, &i) in members.iter().enumerate() {
                for (b, &j) in members.iter().enumerate() {
                    p[(i, j)] = hm[(images[a], images[b])];
                }
            }
        }
    }
    let cert = EdgeConvexityCertificate::from_matrices(z, &system, inp.color, &mats, Provenance::Composed);
    let report = verify_edge_convexity(z, inp.cuts, &cert)?;
    if !report.passed {
        return Err(Error::CertificateRejected(format!(
            "composed certificate for color {:?} fails verification (residual {:.3e} at {:?}, min eigenvalue {:.3e})",
            cert.color, report.max_sum_residual, report.worst_pair, report.min_eigenvalue
        )));
    }
    Ok(cert)
}

/// Vertex certificate on `Coset(G/H, S \ K)` when `G = H x H'` and the
/// cosets are the elements of `H'`: the edge-to-vertex construction on
/// `Cay(H')` carried to the cosets.
pub(crate) fn product_vertex_certificate(
    cay: &CayleyPsiGraph,
    cg: &CosetGraph,
    planes: &[ReflectingPlane],
    other_nodes: &[usize],
    other_certs: &[EdgeConvexityCertificate],
) -> Result<VertexConvexityCertificate> {
    let other = crate::coxeter::subgroup_embedding(&cay.group, other_nodes)?;
    let other_cay = CayleyPsiGraph::new(other.subgroup.clone());
    let other_cuts = enumerate_cayley_cuts(&other_cay);
    let local = edgevertex_certificate(&other_cay.graph, &other_cuts, other_certs)?;
    let local_planes = planes_from_cuts(&other_cay.graph, &other_cuts);
    let map: Vec<usize> = (0..other_cay.graph.vertex_count())
        .map(|v| cg.lift(other.embed[other_cay.element_of(v)]))
        .collect();
    if map.len() != cg.vertex_count() {
        return Err(Error::InvalidSubgroup("the group is not the product of the two factors".into()));
    }
    transport_vertex_certificate(&local, &local_planes, &map, planes)
}

/// Edge certificates for every color of `G1 x G2` from certificates for
/// every color of each factor (in color order). Colors are labeled as in
/// the diagram's disjoint union, so clashing labels become positional.
pub fn compose_product(
    g1: &CoxeterGroup,
    certs1: &[EdgeConvexityCertificate],
    g2: &CoxeterGroup,
    certs2: &[EdgeConvexityCertificate],
) -> Result<(CoxeterGroup, Vec<EdgeConvexityCertificate>)> {
    if certs1.len() != g1.rank() || certs2.len() != g2.rank() {
        return Err(Error::DimensionMismatch(
            "one certificate per generator of each factor is required".into(),
        ));
    }
    let diagram = g1.diagram().disjoint_union(g2.diagram())?;
    let g = crate::coxeter::enumerate_group(&diagram)?;
    let labels = diagram.nodes().to_vec();
    let q1 = g1.rank();
    let relabel = |certs: &[EdgeConvexityCertificate], offset: usize| -> Vec<EdgeConvexityCertificate> {
        certs
            .iter()
            .enumerate()
            .map(|(i, c)| c.relabeled(&labels[offset + i]))
            .collect()
    };
    let c1 = relabel(certs1, 0);
    let c2 = relabel(certs2, q1);
    let cay = CayleyPsiGraph::new(g.clone());
    let cuts = enumerate_cayley_cuts(&cay);
    let nodes1: Vec<usize> = (0..q1).collect();
    let nodes2: Vec<usize> = (q1..g.rank()).collect();
    let mut out = Vec::with_capacity(g.rank());
    for (nodes, others, own, other) in [(&nodes1, &nodes2, &c1, &c2), (&nodes2, &nodes1, &c2, &c1)] {
        let cg = build_coset_graph(&g, nodes)?;
        let planes = project_cuts_to_planes(&cay, &cuts, &cg);
        let vertex_cert = product_vertex_certificate(&cay, &cg, &planes, others, other)?;
        let sub_cay = CayleyPsiGraph::new(cg.embedding.subgroup.clone());
        let sub_cuts = enumerate_cayley_cuts(&sub_cay);
        for (i, &color) in nodes.iter().enumerate() {
            out.push(compose_coset(&ComposeInputs {
                cay: &cay,
                cuts: &cuts,
                coset: &cg,
                planes: &planes,
                vertex_cert: &vertex_cert,
                sub_cay: &sub_cay,
                sub_cuts: &sub_cuts,
                sub_cert: &own[i],
                color,
            })?);
        }
    }
    Ok((g, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::solve_edge_convexity;
    use crate::coset::{simplex_certificate, solve_vertex_convexity};
    use crate::coxeter::{enumerate_group, CDDiagram};
    use crate::feasibility::SolverOptions;

    fn group(s: &str) -> CoxeterGroup {
        enumerate_group(&CDDiagram::parse(s).unwrap()).unwrap()
    }

    fn solved_certs(g: &CoxeterGroup) -> Vec<EdgeConvexityCertificate> {
        let cay = CayleyPsiGraph::new(g.clone());
        let cuts = enumerate_cayley_cuts(&cay);
        (0..g.rank())
            .map(|c| {
                solve_edge_convexity(&cay.graph, &cuts, c, &SolverOptions::default())
                    .certificate()
                    .cloned()
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn product_of_two_a1_gives_the_square() {
        let a1 = group("A1");
        let c = solved_certs(&a1);
        let (g, certs) = compose_product(&a1, &c, &a1, &c).unwrap();
        assert_eq!(g.order(), 4);
        let cay = CayleyPsiGraph::new(g);
        let cuts = enumerate_cayley_cuts(&cay);
        for cert in &certs {
            assert_eq!(cert.provenance, Provenance::Composed);
            assert!(verify_edge_convexity(&cay.graph, &cuts, cert).unwrap().passed);
        }
        assert_eq!(certs[0].color, "g0");
        assert_eq!(certs[1].color, "g1");
    }

    #[test]
    fn larger_products_verify() {
        for (a, b) in [("A2", "A1"), ("A1", "B2"), ("A2", "A2")] {
            let (g1, g2) = (group(a), group(b));
            let (g, certs) = compose_product(&g1, &solved_certs(&g1), &g2, &solved_certs(&g2)).unwrap();
            let cay = CayleyPsiGraph::new(g);
            let cuts = enumerate_cayley_cuts(&cay);
            for cert in &certs {
                assert!(verify_edge_convexity(&cay.graph, &cuts, cert).unwrap().passed, "{a}x{b}");
            }
        }
    }

    #[test]
    fn simplex_coset_composition_for_a3() {
        let g = group("A3");
        let cay = CayleyPsiGraph::new(g.clone());
        let cuts = enumerate_cayley_cuts(&cay);
        let cg = build_coset_graph(&g, &[0, 1]).unwrap();
        let planes = project_cuts_to_planes(&cay, &cuts, &cg);
        let vertex_cert = simplex_certificate(&cg, &planes).unwrap();
        let sub_cay = CayleyPsiGraph::new(cg.embedding.subgroup.clone());
        let sub_cuts = enumerate_cayley_cuts(&sub_cay);
        let sub_certs = solved_certs(&cg.embedding.subgroup);
        for color in 0..2 {
            let cert = compose_coset(&ComposeInputs {
                cay: &cay,
                cuts: &cuts,
                coset: &cg,
                planes: &planes,
                vertex_cert: &vertex_cert,
                sub_cay: &sub_cay,
                sub_cuts: &sub_cuts,
                sub_cert: &sub_certs[color],
                color,
            })
            .unwrap();
            assert!(verify_edge_convexity(&cay.graph, &cuts, &cert).unwrap().passed);
        }
    }

    #[test]
    fn failing_vertex_certificate_is_rejected() {
        let g = group("A3");
        let cay = CayleyPsiGraph::new(g.clone());
        let cuts = enumerate_cayley_cuts(&cay);
        let cg = build_coset_graph(&g, &[0, 1]).unwrap();
        let planes = project_cuts_to_planes(&cay, &cuts, &cg);
        let mut vertex_cert = solve_vertex_convexity(4, &planes, &SolverOptions::default())
            .certificate()
            .cloned()
            .unwrap();
        vertex_cert.planes.clear();
        let sub_cay = CayleyPsiGraph::new(cg.embedding.subgroup.clone());
        let sub_cuts = enumerate_cayley_cuts(&sub_cay);
        let sub_certs = solved_certs(&cg.embedding.subgroup);
        let out = compose_coset(&ComposeInputs {
            cay: &cay,
            cuts: &cuts,
            coset: &cg,
            planes: &planes,
            vertex_cert: &vertex_cert,
            sub_cay: &sub_cay,
            sub_cuts: &sub_cuts,
            sub_cert: &sub_certs[0],
            color: 0,
        });
        assert!(matches!(out, Err(Error::CertificateRejected(_))));
    }
}

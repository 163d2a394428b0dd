use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{PlaneSide, ReflectingPlane};
use crate::convexity::{verify_edge_convexity, EdgeConvexityCertificate};
use crate::cuts::{ReflectingCut, Side};
use crate::error::{Error, Result};
use crate::feasibility::{
    from_rows, to_rows, Block, PairSystem, Provenance, SolveOutcome, SolverOptions, Tolerances,
    VerificationReport,
};
use crate::psigraph::PsiGraph;

/// One plane's matrix `P^(k)`, indexed by the plane's `R` vertices in
/// increasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneMatrix {
    pub plane_id: usize,
    pub r_vertices: Vec<usize>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexConvexityCertificate {
    pub tolerances: Tolerances,
    pub planes: Vec<PlaneMatrix>,
    pub provenance: Provenance,
}

/// Items are vertices; one block per extendible plane with a nonempty
/// `R` side.
pub fn vertex_pair_system(vertex_count: usize, planes: &[ReflectingPlane]) -> PairSystem {
    let blocks = planes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.extendible)
        .filter_map(|(id, p)| {
            let r = p.side_vertices(PlaneSide::R);
            (!r.is_empty()).then(|| Block {
                source: id,
                mirror: r.iter().map(|&v| p.involution[v]).collect(),
                r_items: r,
            })
        })
        .collect();
    PairSystem::new(vertex_count, blocks)
}

impl VertexConvexityCertificate {
    pub fn from_matrices(system: &PairSystem, mats: &[DMatrix<f64>], provenance: Provenance) -> Self {
        Self {
            tolerances: provenance.tolerances(),
            planes: system
                .blocks()
                .iter()
                .zip(mats)
                .map(|(b, p)| PlaneMatrix {
                    plane_id: b.source,
                    r_vertices: b.r_items.clone(),
                    p: to_rows(p),
                })
                .collect(),
            provenance,
        }
    }

    /// Matrices aligned with the blocks of `system`; unlisted planes
    /// contribute zero.
    pub fn matrices(&self, system: &PairSystem) -> Result<Vec<DMatrix<f64>>> {
        let by_plane: HashMap<usize, usize> = system
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| (b.source, i))
            .collect();
        let mut mats = system.zero_matrices();
        let mut seen = vec![false; mats.len()];
        for entry in &self.planes {
            let Some(&bi) = by_plane.get(&entry.plane_id) else {
                if entry.r_vertices.is_empty() {
                    continue;
                }
                return Err(Error::UnknownPlane(entry.plane_id));
            };
            if std::mem::replace(&mut seen[bi], true) {
                return Err(Error::CertificateRejected(format!(
                    "plane {} listed twice",
                    entry.plane_id
                )));
            }
            let block = &system.blocks()[bi];
            if entry.r_vertices != block.r_items {
                return Err(Error::DimensionMismatch(format!(
                    "plane {} lists R-side vertices {:?}, expected {:?}",
                    entry.plane_id, entry.r_vertices, block.r_items
                )));
            }
            let n = block.r_items.len();
            mats[bi] = from_rows(&entry.p, n).ok_or_else(|| {
                Error::DimensionMismatch(format!("plane {} needs a {n}x{n} matrix", entry.plane_id))
            })?;
        }
        Ok(mats)
    }
}

pub fn verify_vertex_convexity(
    vertex_count: usize,
    planes: &[ReflectingPlane],
    cert: &VertexConvexityCertificate,
) -> Result<VerificationReport> {
    if let Some(bad) = cert.planes.iter().find(|p| p.plane_id >= planes.len()) {
        return Err(Error::UnknownPlane(bad.plane_id));
    }
    if let Some(p) = planes.iter().find(|p| p.sides.len() != vertex_count) {
        return Err(Error::DimensionMismatch(format!(
            "plane on {} vertices, graph has {vertex_count}",
            p.sides.len()
        )));
    }
    let system = vertex_pair_system(vertex_count, planes);
    let mats = cert.matrices(&system)?;
    let tol = cert.tolerances.stricter(cert.provenance.tolerances());
    Ok(system.verify(&mats, tol))
}

#[derive(Clone, Debug)]
pub enum VertexSolveOutcome {
    Certified {
        certificate: VertexConvexityCertificate,
        sweeps: usize,
    },
    Infeasible { pair: (usize, usize) },
    NotConverged {
        best: VertexConvexityCertificate,
        sum_residual: f64,
        sweeps: usize,
    },
}

impl VertexSolveOutcome {
    pub fn certificate(&self) -> Option<&VertexConvexityCertificate> {
        match self {
            VertexSolveOutcome::Certified { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

pub fn solve_vertex_convexity(
    vertex_count: usize,
    planes: &[ReflectingPlane],
    options: &SolverOptions,
) -> VertexSolveOutcome {
    let system = vertex_pair_system(vertex_count, planes);
    match system.solve(options) {
        SolveOutcome::Certified { matrices, sweeps } => VertexSolveOutcome::Certified {
            certificate: VertexConvexityCertificate::from_matrices(&system, &matrices, Provenance::Solved),
            sweeps,
        },
        SolveOutcome::Infeasible { pair } => VertexSolveOutcome::Infeasible { pair },
        SolveOutcome::NotConverged {
            matrices,
            sum_residual,
            sweeps,
        } => VertexSolveOutcome::NotConverged {
            best: VertexConvexityCertificate::from_matrices(&system, &matrices, Provenance::Solved),
            sum_residual,
            sweeps,
        },
    }
}

/// The cuts of `z` seen as planes on its vertex set (vertex ids as in
/// [`PsiGraph`]). Cuts fix no vertex, so every plane has two full sides.
pub fn planes_from_cuts(z: &PsiGraph, cuts: &[ReflectingCut]) -> Vec<ReflectingPlane> {
    cuts.iter()
        .enumerate()
        .map(|(id, cut)| ReflectingPlane {
            source_cuts: vec![id],
            involution: (0..z.vertex_count()).map(|v| cut.automorphism().apply(v)).collect(),
            sides: (0..z.vertex_count())
                .map(|v| match cut.vertex_side(v) {
                    Side::R => PlaneSide::R,
                    Side::L => PlaneSide::L,
                })
                .collect(),
            extendible: true,
        })
        .collect()
}

/// Vertex certificate on the vertices of `z` built from edge certificates.
///
/// With `A` the color of the first certificate, the block of cut `k` is
/// `P_E^(k)(e_u, e_v)` on `R` vertices whose `A`-edge `k` does not fix, and
/// a diagonal on those whose `A`-edge it fixes, weighted by how many cuts
/// fix that edge. Planes are [`planes_from_cuts`] in cut order.
pub fn edgevertex_certificate(
    z: &PsiGraph,
    cuts: &[ReflectingCut],
    certs: &[EdgeConvexityCertificate],
) -> Result<VertexConvexityCertificate> {
    let planes = planes_from_cuts(z, cuts);
    let system = vertex_pair_system(z.vertex_count(), &planes);
    if z.n() == 1 {
        // two vertices joined by every color: the swap is the only cut
        let mats: Vec<DMatrix<f64>> = system
            .blocks()
            .iter()
            .map(|b| DMatrix::identity(b.r_items.len(), b.r_items.len()))
            .collect();
        return Ok(VertexConvexityCertificate::from_matrices(&system, &mats, Provenance::Constructed));
    }
    if certs.len() < 2 {
        return Err(Error::CertificateRejected(format!(
            "edge certificates for at least two colors are needed, got {}",
            certs.len()
        )));
    }
    let mut composed = false;
    for cert in certs {
        let report = verify_edge_convexity(z, cuts, cert)?;
        if !report.passed {
            return Err(Error::CertificateRejected(format!(
                "edge certificate for color {:?} does not verify (residual {:.3e}, min eigenvalue {:.3e})",
                cert.color, report.max_sum_residual, report.min_eigenvalue
            )));
        }
        composed |= cert.provenance == Provenance::Composed;
    }
    let lead = &certs[0];
    let a = z.color_index(&lead.color)?;
    let mut fixing = vec![0usize; z.n()];
    for cut in cuts {
        for e in cut.fixed_edges().iter().filter(|e| e.color == a) {
            fixing[e.white] += 1;
        }
    }
    let edge_of = |v: usize| z.edge_at(v, a).white;
    let mut mats = Vec::with_capacity(system.blocks().len());
    for block in system.blocks() {
        let cut = &cuts[block.source];
        let n = block.r_items.len();
        let mut p = DMatrix::zeros(n, n);
        let (rows, edge_p) = match lead.matrix_for_cut(block.source) {
            Some((rows, m)) => (rows.iter().map(|r| r.1).collect::<Vec<_>>(), m),
            None => (Vec::new(), DMatrix::zeros(0, 0)),
        };
        let pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        for (i, &u) in block.r_items.iter().enumerate() {
            let eu = z.edge_at(u, a);
            if cut.is_fixed(eu) {
                p[(i, i)] = 1.0 / fixing[eu.white] as f64;
                continue;
            }
            for (j, &w) in block.r_items.iter().enumerate() {
                let ew = z.edge_at(w, a);
                if cut.is_fixed(ew) {
                    continue;
                }
                if let (Some(&x), Some(&y)) = (pos.get(&edge_of(u)), pos.get(&edge_of(w))) {
                    p[(i, j)] = edge_p[(x, y)];
                }
            }
        }
        mats.push(p);
    }
    let provenance = if composed {
        Provenance::Composed
    } else {
        Provenance::Constructed
    };
    Ok(VertexConvexityCertificate::from_matrices(&system, &mats, provenance))
}

/// Carries a certificate along a vertex bijection `map` (source vertex ->
/// target vertex). Every source plane with a nonzero block must have a
/// target plane with the conjugate involution and the same or the exchanged
/// sides.
pub fn transport_vertex_certificate(
    cert: &VertexConvexityCertificate,
    source_planes: &[ReflectingPlane],
    map: &[usize],
    target_planes: &[ReflectingPlane],
) -> Result<VertexConvexityCertificate> {
    let vertex_count = map.len();
    let mut inverse = vec![usize::MAX; vertex_count];
    for (v, &u) in map.iter().enumerate() {
        if u >= vertex_count || inverse[u] != usize::MAX {
            return Err(Error::DimensionMismatch("vertex map is not a bijection".into()));
        }
        inverse[u] = v;
    }
    let source_system = vertex_pair_system(vertex_count, source_planes);
    let target_system = vertex_pair_system(vertex_count, target_planes);
    let source_mats = cert.matrices(&source_system)?;
    let mut target_mats = target_system.zero_matrices();
    let target_block: HashMap<usize, usize> = target_system
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.source, i))
        .collect();
    for (block, p) in source_system.blocks().iter().zip(&source_mats) {
        if p.iter().all(|&x| x == 0.0) {
            continue;
        }
        let plane = &source_planes[block.source];
        let involution: Vec<usize> = (0..vertex_count)
            .map(|u| map[plane.involution[inverse[u]]])
            .collect();
        let moved = |side: PlaneSide| -> Vec<PlaneSide> {
            (0..vertex_count)
                .map(|u| match (plane.sides[inverse[u]], side) {
                    (PlaneSide::On, _) => PlaneSide::On,
                    (s, PlaneSide::R) => s,
                    (PlaneSide::R, _) => PlaneSide::L,
                    (PlaneSide::L, _) => PlaneSide::R,
                })
                .collect()
        };
        let same = moved(PlaneSide::R);
        let flipped = moved(PlaneSide::L);
        let found = target_planes.iter().enumerate().find_map(|(id, t)| {
            if t.involution != involution {
                None
            } else if t.sides == same {
                Some((id, false))
            } else if t.sides == flipped {
                Some((id, true))
            } else {
                None
            }
        });
        let Some((tid, flip)) = found else {
            return Err(Error::CertificateRejected(format!(
                "plane {} has no counterpart under the vertex map",
                block.source
            )));
        };
        let tb = target_block[&tid];
        let rows = &target_system.blocks()[tb].r_items;
        let index: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let image = |v: usize| {
            let v = if flip { plane.involution[v] } else { v };
            index[&map[v]]
        };
        for (i, &u) in block.r_items.iter().enumerate() {
            for (j, &w) in block.r_items.iter().enumerate() {
                target_mats[tb][(image(u), image(w))] = p[(i, j)];
            }
        }
    }
    Ok(VertexConvexityCertificate::from_matrices(
        &target_system,
        &target_mats,
        cert.provenance,
    ))
}

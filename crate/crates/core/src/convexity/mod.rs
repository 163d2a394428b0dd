//! Edge-convexity certificates: per-cut PSD matrices whose induced entries
//! sum to one over the cuts separating each pair of same-colored edges.

mod compose;
mod pipeline;

pub use compose::{compose_coset, compose_product, ComposeInputs};
pub use pipeline::{certify_coxeter, certify_group, CertificationMethod, CoxeterCertification};

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cuts::{ReflectingCut, Side};
use crate::error::{Error, Result};
use crate::feasibility::{
    from_rows, to_rows, Block, PairSystem, Provenance, SolveOutcome, SolverOptions, Tolerances,
    VerificationReport,
};
use crate::psigraph::{EdgeId, PsiGraph};

/// An edge named by its color label and white endpoint.
pub type EdgeLabel = (String, usize);

/// One cut's matrix `P^(k)`, indexed by the color's edges on the cut's `R`
/// side in sorted order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutMatrix {
    pub cut_id: usize,
    pub r_edges: Vec<EdgeLabel>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeConvexityCertificate {
    pub color: String,
    pub tolerances: Tolerances,
    pub cuts: Vec<CutMatrix>,
    pub provenance: Provenance,
}

/// The pair system of one color: items are the color's edges indexed by
/// white endpoint, one block per cut with at least one such edge on its
/// `R` side.
pub fn edge_pair_system(z: &PsiGraph, cuts: &[ReflectingCut], color: usize) -> PairSystem {
    let blocks = cuts
        .iter()
        .enumerate()
        .filter_map(|(id, cut)| {
            let r: Vec<EdgeId> = cut.side_edges(z, color, Side::R);
            (!r.is_empty()).then(|| Block {
                source: id,
                r_items: r.iter().map(|e| e.white).collect(),
                mirror: r.iter().map(|&e| cut.mirror_edge(z, e).white).collect(),
            })
        })
        .collect();
    PairSystem::new(z.n(), blocks)
}

impl EdgeConvexityCertificate {
    pub fn from_matrices(
        z: &PsiGraph,
        system: &PairSystem,
        color: usize,
        mats: &[DMatrix<f64>],
        provenance: Provenance,
    ) -> Self {
        let label = &z.colors()[color];
        Self {
            color: label.clone(),
            tolerances: provenance.tolerances(),
            cuts: system
                .blocks()
                .iter()
                .zip(mats)
                .map(|(b, p)| CutMatrix {
                    cut_id: b.source,
                    r_edges: b.r_items.iter().map(|&w| (label.clone(), w)).collect(),
                    p: to_rows(p),
                })
                .collect(),
            provenance,
        }
    }

    /// Matrices aligned with the blocks of `system`; cuts absent from the
    /// certificate contribute zero.
    pub fn matrices(&self, z: &PsiGraph, system: &PairSystem) -> Result<Vec<DMatrix<f64>>> {
        let color = z.color_index(&self.color)?;
        let by_cut: HashMap<usize, usize> = system
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| (b.source, i))
            .collect();
        let mut mats = system.zero_matrices();
        let mut seen = vec![false; mats.len()];
        for entry in &self.cuts {
            let Some(&bi) = by_cut.get(&entry.cut_id) else {
                if entry.r_edges.is_empty() {
                    continue;
                }
                return Err(Error::UnknownCut(entry.cut_id));
            };
            if std::mem::replace(&mut seen[bi], true) {
                return Err(Error::CertificateRejected(format!(
                    "cut {} listed twice",
                    entry.cut_id
                )));
            }
            let block = &system.blocks()[bi];
            let listed: Vec<usize> = entry
                .r_edges
                .iter()
                .map(|(c, w)| {
                    if z.color_index(c)? != color {
                        return Err(Error::CertificateRejected(format!(
                            "edge of color {c:?} in a certificate for {:?}",
                            self.color
                        )));
                    }
                    Ok(*w)
                })
                .collect::<Result<_>>()?;
            if listed != block.r_items {
                return Err(Error::DimensionMismatch(format!(
                    "cut {} lists R-side edges {:?}, expected {:?}",
                    entry.cut_id, listed, block.r_items
                )));
            }
            mats[bi] = from_rows(&entry.p, block.r_items.len()).ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "cut {} needs a {}x{} matrix",
                    entry.cut_id,
                    block.r_items.len(),
                    block.r_items.len()
                ))
            })?;
        }
        Ok(mats)
    }

    /// The matrix for one cut with its row labels, if the certificate lists
    /// it.
    pub fn matrix_for_cut(&self, cut_id: usize) -> Option<(&[EdgeLabel], DMatrix<f64>)> {
        self.cuts.iter().find(|c| c.cut_id == cut_id).map(|c| {
            let n = c.r_edges.len();
            (
                c.r_edges.as_slice(),
                from_rows(&c.p, n).unwrap_or_else(|| DMatrix::zeros(n, n)),
            )
        })
    }

    /// Same matrices under a different color label.
    pub fn relabeled(&self, label: &str) -> Self {
        let mut out = self.clone();
        out.color = label.to_string();
        for c in &mut out.cuts {
            for e in &mut c.r_edges {
                e.0 = label.to_string();
            }
        }
        out
    }
}

/// Checks a certificate against the cuts of `z` (ids index `cuts`). The
/// tolerances are the stricter of the certificate's own and those its
/// provenance is held to. Unseparated pairs are counted in the report and
/// make it fail.
pub fn verify_edge_convexity(
    z: &PsiGraph,
    cuts: &[ReflectingCut],
    cert: &EdgeConvexityCertificate,
) -> Result<VerificationReport> {
    let color = z.color_index(&cert.color)?;
    if let Some(bad) = cert.cuts.iter().find(|c| c.cut_id >= cuts.len()) {
        return Err(Error::UnknownCut(bad.cut_id));
    }
    let system = edge_pair_system(z, cuts, color);
    let mats = cert.matrices(z, &system)?;
    let tol = cert.tolerances.stricter(cert.provenance.tolerances());
    Ok(system.verify(&mats, tol))
}

#[derive(Clone, Debug)]
pub enum EdgeSolveOutcome {
    Certified {
        certificate: EdgeConvexityCertificate,
        sweeps: usize,
    },
    /// The color is not edge-reflecting: this pair is separated by no cut.
    Infeasible { pair: (EdgeId, EdgeId) },
    NotConverged {
        best: EdgeConvexityCertificate,
        sum_residual: f64,
        sweeps: usize,
    },
}

impl EdgeSolveOutcome {
    pub fn certificate(&self) -> Option<&EdgeConvexityCertificate> {
        match self {
            EdgeSolveOutcome::Certified { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

pub fn solve_edge_convexity(
    z: &PsiGraph,
    cuts: &[ReflectingCut],
    color: usize,
    options: &SolverOptions,
) -> EdgeSolveOutcome {
    let system = edge_pair_system(z, cuts, color);
    let edge = |w| EdgeId { color, white: w };
    match system.solve(options) {
        SolveOutcome::Certified { matrices, sweeps } => EdgeSolveOutcome::Certified {
            certificate: EdgeConvexityCertificate::from_matrices(
                z,
                &system,
                color,
                &matrices,
                Provenance::Solved,
            ),
            sweeps,
        },
        SolveOutcome::Infeasible { pair } => EdgeSolveOutcome::Infeasible {
            pair: (edge(pair.0), edge(pair.1)),
        },
        SolveOutcome::NotConverged {
            matrices,
            sum_residual,
            sweeps,
        } => EdgeSolveOutcome::NotConverged {
            best: EdgeConvexityCertificate::from_matrices(
                z,
                &system,
                color,
                &matrices,
                Provenance::Solved,
            ),
            sum_residual,
            sweeps,
        },
    }
}

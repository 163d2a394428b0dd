//! End-to-end edge certification of a finite Coxeter group, by recursive
//! composition over parabolic subgroups where a construction applies and
//! by the numerical solver elsewhere.

use std::collections::HashMap;

use serde::Serialize;

use super::compose::{compose_coset, product_vertex_certificate, ComposeInputs};
use super::{solve_edge_convexity, verify_edge_convexity, EdgeConvexityCertificate, EdgeSolveOutcome};
use crate::coset::{build_coset_graph, project_cuts_to_planes, recipe_with_fallback, CosetGraph, PolytopeKind, Recipe};
use crate::coxeter::{enumerate_group, subgroup_embedding, CDDiagram, CoxeterGroup};
use crate::cuts::{enumerate_cayley_cuts, ReflectingCut};
use crate::error::{Error, Result};
use crate::feasibility::{SolverOptions, VerificationReport};
use crate::psigraph::CayleyPsiGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificationMethod {
    /// Compose from subgroups; fail if a composition step fails.
    Construct,
    /// Run the solver on every color.
    Solve,
    /// Compose, falling back to the solver color by color.
    Auto,
}

impl std::str::FromStr for CertificationMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "construct" => Ok(Self::Construct),
            "solve" => Ok(Self::Solve),
            "auto" => Ok(Self::Auto),
            other => Err(Error::InvalidState(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VertexRoute {
    Recipe {
        recipe: Recipe,
        polytope: String,
        solver_fallback: bool,
    },
    /// Cosets identified with the elements of the complementary factor.
    ProductFactor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColorRoute {
    Solved { sweeps: usize },
    Composed { subgroup: Vec<String>, vertex: VertexRoute },
}

#[derive(Clone, Debug, Serialize)]
pub struct ColorCertification {
    pub color: String,
    pub route: ColorRoute,
    pub certificate: EdgeConvexityCertificate,
    pub report: VerificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoxeterCertification {
    pub diagram: String,
    pub order: usize,
    pub cut_count: usize,
    pub colors: Vec<ColorCertification>,
}

impl CoxeterCertification {
    pub fn certificates(&self) -> Vec<EdgeConvexityCertificate> {
        self.colors.iter().map(|c| c.certificate.clone()).collect()
    }

    pub fn all_verified(&self) -> bool {
        self.colors.iter().all(|c| c.report.passed)
    }
}

struct Certifier {
    method: CertificationMethod,
    options: SolverOptions,
    memo: HashMap<String, Vec<EdgeConvexityCertificate>>,
}

fn memo_key(g: &CoxeterGroup) -> String {
    format!("{:?}{:?}", g.diagram().nodes(), g.diagram().coxeter_matrix())
}

struct Context {
    cay: CayleyPsiGraph,
    cuts: Vec<ReflectingCut>,
}

impl Certifier {
    fn solve(&self, ctx: &Context, color: usize) -> Result<(EdgeConvexityCertificate, ColorRoute)> {
        match solve_edge_convexity(&ctx.cay.graph, &ctx.cuts, color, &self.options) {
            EdgeSolveOutcome::Certified { certificate, sweeps } => Ok((certificate, ColorRoute::Solved { sweeps })),
            EdgeSolveOutcome::Infeasible { pair } => Err(Error::CertificateRejected(format!(
                "edges {pair:?} are separated by no cut"
            ))),
            EdgeSolveOutcome::NotConverged { sum_residual, sweeps, .. } => Err(Error::NotConverged {
                residual: sum_residual,
                sweeps,
            }),
        }
    }

    fn certs_of(&mut self, g: &CoxeterGroup) -> Result<Vec<EdgeConvexityCertificate>> {
        let key = memo_key(g);
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let certs: Vec<EdgeConvexityCertificate> = self.certify(g)?.colors.into_iter().map(|c| c.certificate).collect();
        self.memo.insert(key, certs.clone());
        Ok(certs)
    }

    fn compose_with(
        &mut self,
        ctx: &Context,
        cg: &CosetGraph,
        planes: &[crate::coset::ReflectingPlane],
        vertex_cert: &crate::coset::VertexConvexityCertificate,
        color: usize,
    ) -> Result<EdgeConvexityCertificate> {
        let sub = &cg.embedding.subgroup;
        let sub_certs = self.certs_of(sub)?;
        let sub_cay = CayleyPsiGraph::new(sub.clone());
        let sub_cuts = enumerate_cayley_cuts(&sub_cay);
        let h_color = cg.embedding.nodes.iter().position(|&a| a == color).expect("color lies in the subgroup");
        compose_coset(&ComposeInputs {
            cay: &ctx.cay,
            cuts: &ctx.cuts,
            coset: cg,
            planes,
            vertex_cert,
            sub_cay: &sub_cay,
            sub_cuts: &sub_cuts,
            sub_cert: &sub_certs[h_color],
            color,
        })
    }

    /// Composition route for one color of an irreducible group, if some
    /// leaf other than `color` leaves a tagged coset graph.
    fn construct_irreducible(&mut self, ctx: &Context, color: usize) -> Result<Option<(EdgeConvexityCertificate, ColorRoute)>> {
        let g = &ctx.cay.group;
        let d = g.diagram();
        let q = g.rank();
        let leaves: Vec<usize> = (0..q)
            .filter(|&v| v != color && (0..q).filter(|&u| u != v && d.m(u, v) > 2).count() == 1)
            .collect();
        let preference = [
            PolytopeKind::Simplex,
            PolytopeKind::Orthoplex,
            PolytopeKind::Demihypercube,
            PolytopeKind::Hypercube,
        ];
        let mut best: Option<(usize, CosetGraph, PolytopeKind)> = None;
        for &leaf in &leaves {
            let k: Vec<usize> = (0..q).filter(|&v| v != leaf).collect();
            let cg = build_coset_graph(g, &k)?;
            let Some(tag) = cg.tag else { continue };
            let Some(rank) = preference.iter().position(|&kind| tag.is_a(kind)) else {
                continue;
            };
            if best.as_ref().is_none_or(|(r, _, _)| rank < *r) {
                best = Some((rank, cg, preference[rank]));
            }
        }
        let Some((_, cg, kind)) = best else {
            return Ok(None);
        };
        let planes = project_cuts_to_planes(&ctx.cay, &ctx.cuts, &cg);
        let recipe = Recipe::for_kind(kind);
        let audit = recipe_with_fallback(&cg, &planes, recipe, &self.options)?;
        let Some(vertex_cert) = audit.certificate.clone() else {
            return Err(Error::CertificateRejected(format!(
                "no vertex certificate for {}",
                cg.tag.map(|t| t.to_string()).unwrap_or_default()
            )));
        };
        let cert = self.compose_with(ctx, &cg, &planes, &vertex_cert, color)?;
        let labels = d.nodes();
        Ok(Some((
            cert,
            ColorRoute::Composed {
                subgroup: cg.embedding.nodes.iter().map(|&a| labels[a].clone()).collect(),
                vertex: VertexRoute::Recipe {
                    recipe,
                    polytope: cg.tag.map(|t| t.to_string()).unwrap_or_default(),
                    solver_fallback: audit.fallback_used,
                },
            },
        )))
    }

    fn construct_reducible(&mut self, ctx: &Context) -> Result<Vec<(EdgeConvexityCertificate, ColorRoute)>> {
        let g = &ctx.cay.group;
        let comps = g.diagram().components();
        let first: Vec<usize> = comps[0].nodes.clone();
        let rest: Vec<usize> = (0..g.rank()).filter(|v| !first.contains(v)).collect();
        let labels = g.diagram().nodes();
        let mut out: Vec<Option<(EdgeConvexityCertificate, ColorRoute)>> = vec![None; g.rank()];
        for (own, other) in [(&first, &rest), (&rest, &first)] {
            let cg = build_coset_graph(g, own)?;
            let planes = project_cuts_to_planes(&ctx.cay, &ctx.cuts, &cg);
            let other_group = subgroup_embedding(g, other)?.subgroup;
            let other_certs = self.certs_of(&other_group)?;
            let vertex_cert = product_vertex_certificate(&ctx.cay, &cg, &planes, other, &other_certs)?;
            for &color in own.iter() {
                let cert = self.compose_with(ctx, &cg, &planes, &vertex_cert, color)?;
                out[color] = Some((
                    cert,
                    ColorRoute::Composed {
                        subgroup: own.iter().map(|&a| labels[a].clone()).collect(),
                        vertex: VertexRoute::ProductFactor,
                    },
                ));
            }
        }
        Ok(out.into_iter().map(|c| c.expect("every color is in one factor")).collect())
    }

    fn certify(&mut self, g: &CoxeterGroup) -> Result<CoxeterCertification> {
        let cay = CayleyPsiGraph::new(g.clone());
        let cuts = enumerate_cayley_cuts(&cay);
        let ctx = Context { cay, cuts };
        let q = g.rank();
        let mut results: Vec<(EdgeConvexityCertificate, ColorRoute)> = Vec::with_capacity(q);
        let reducible = g.diagram().components().len() > 1;
        if self.method == CertificationMethod::Solve {
            for color in 0..q {
                results.push(self.solve(&ctx, color)?);
            }
        } else if reducible {
            match self.construct_reducible(&ctx) {
                Ok(r) => results = r,
                Err(e) if self.method == CertificationMethod::Auto => {
                    log::warn!("composition failed for {}: {e}; solving", g.diagram());
                    for color in 0..q {
                        results.push(self.solve(&ctx, color)?);
                    }
                }
                Err(e) => return Err(e),
            }
        } else {
            for color in 0..q {
                let constructed = if q >= 2 {
                    self.construct_irreducible(&ctx, color)
                } else {
                    Ok(None)
                };
                let r = match constructed {
                    Ok(Some(r)) => r,
                    Ok(None) => self.solve(&ctx, color)?,
                    Err(e) if self.method == CertificationMethod::Auto => {
                        log::warn!("composition failed for {} color {color}: {e}; solving", g.diagram());
                        self.solve(&ctx, color)?
                    }
                    Err(e) => return Err(e),
                };
                results.push(r);
            }
        }
        let colors = results
            .into_iter()
            .map(|(certificate, route)| {
                let report = verify_edge_convexity(&ctx.cay.graph, &ctx.cuts, &certificate)?;
                Ok(ColorCertification {
                    color: certificate.color.clone(),
                    route,
                    certificate,
                    report,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoxeterCertification {
            diagram: g.diagram().to_string(),
            order: g.order(),
            cut_count: ctx.cuts.len(),
            colors,
        })
    }
}

/// Certificates for every color of `Cay(G)`, each verified against the
/// cuts in [`enumerate_cayley_cuts`] order.
pub fn certify_group(g: &CoxeterGroup, method: CertificationMethod, options: &SolverOptions) -> Result<CoxeterCertification> {
    Certifier {
        method,
        options: *options,
        memo: HashMap::new(),
    }
    .certify(g)
}

pub fn certify_coxeter(d: &CDDiagram, method: CertificationMethod, options: &SolverOptions) -> Result<CoxeterCertification> {
    certify_group(&enumerate_group(d)?, method, options)
}

//! Schreier coset graphs of parabolic subgroups, their reflecting planes and
//! vertex-convexity certificates.

mod certificate;
mod recipes;

pub use certificate::{
    edgevertex_certificate, planes_from_cuts, solve_vertex_convexity, transport_vertex_certificate,
    verify_vertex_convexity, vertex_pair_system, PlaneMatrix, VertexConvexityCertificate,
    VertexSolveOutcome,
};
pub use recipes::{
    demihypercube_certificate, hypercube_certificate, orthoplex_certificate, recipe_with_fallback,
    simplex_certificate, PairAudit, Recipe, RecipeAudit,
};

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coxeter::{subgroup_embedding, CoxeterGroup, Family, SubgroupEmbedding};
use crate::cuts::{cut_reflection, ReflectingCut, Side};
use crate::error::{Error, Result};
use crate::psigraph::CayleyPsiGraph;

/// Named polytopes whose 1-skeleton a coset graph realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dimension", rename_all = "snake_case")]
pub enum PolytopeTag {
    Simplex(usize),
    Hypercube(usize),
    Orthoplex(usize),
    Demihypercube(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolytopeKind {
    Simplex,
    Hypercube,
    Orthoplex,
    Demihypercube,
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolytopeKind::Simplex => "simplex",
            PolytopeKind::Hypercube => "hypercube",
            PolytopeKind::Orthoplex => "orthoplex",
            PolytopeKind::Demihypercube => "demihypercube",
        })
    }
}

impl fmt::Display for PolytopeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, d) = self.parts();
        write!(f, "{kind}({d})")
    }
}

impl PolytopeTag {
    fn parts(&self) -> (PolytopeKind, usize) {
        match *self {
            PolytopeTag::Simplex(n) => (PolytopeKind::Simplex, n),
            PolytopeTag::Hypercube(n) => (PolytopeKind::Hypercube, n),
            PolytopeTag::Orthoplex(n) => (PolytopeKind::Orthoplex, n),
            PolytopeTag::Demihypercube(n) => (PolytopeKind::Demihypercube, n),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            PolytopeTag::Simplex(n) => n + 1,
            PolytopeTag::Hypercube(n) => 1 << n,
            PolytopeTag::Orthoplex(n) => 2 * n,
            PolytopeTag::Demihypercube(n) => 1 << (n - 1),
        }
    }

    /// Whether this polytope is also a member of `kind`'s family: a segment
    /// belongs to every family, the square is both a 2-cube and a
    /// 2-orthoplex, and the tetrahedron is the 3-demicube.
    pub fn is_a(&self, kind: PolytopeKind) -> bool {
        let (own, d) = self.parts();
        if own == kind || self.vertex_count() == 2 {
            return true;
        }
        use PolytopeKind::*;
        matches!(
            (own, d, kind),
            (Hypercube, 2, Orthoplex)
                | (Orthoplex, 2, Hypercube)
                | (Simplex, 3, Demihypercube)
                | (Demihypercube, 3, Simplex)
        )
    }
}

/// Collapsed edges between two cosets for one generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetEdge {
    pub a: usize,
    pub b: usize,
    pub generator: usize,
    pub multiplicity: usize,
}

/// `Coset(G/H, S \ K)`: vertices are the cosets `Hg` (ids from the
/// embedding, coset 0 is `H`), edges are the Cayley edges of the remaining
/// generators with both ends collapsed to their cosets.
#[derive(Clone, Debug)]
pub struct CosetGraph {
    pub embedding: SubgroupEmbedding,
    /// Generators of `G` outside `K`.
    pub generators: Vec<usize>,
    pub edges: Vec<CosetEdge>,
    pub tag: Option<PolytopeTag>,
    /// Vertex coordinates `g^{-1} omega` for a vector `omega` fixed by `H`.
    pub geometry: Vec<Vec<f64>>,
}

impl CosetGraph {
    pub fn vertex_count(&self) -> usize {
        self.embedding.coset_count()
    }

    pub fn lift(&self, element: usize) -> usize {
        self.embedding.coset_of[element]
    }

    /// Graph distances from one coset.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut dist = vec![usize::MAX; n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn to_record(&self, g: &CoxeterGroup) -> CosetGraphRecord {
        let labels = g.diagram().nodes();
        CosetGraphRecord {
            diagram: g.diagram().to_string(),
            subgroup: self.embedding.nodes.iter().map(|&a| labels[a].clone()).collect(),
            subgroup_diagram: self.embedding.subgroup.diagram().to_string(),
            vertices: self.vertex_count(),
            edges: self
                .edges
                .iter()
                .map(|e| CosetEdgeRecord {
                    a: e.a,
                    b: e.b,
                    color: labels[e.generator].clone(),
                    multiplicity: e.multiplicity,
                })
                .collect(),
            tag: self.tag.map(|t| t.to_string()),
            geometry: self.geometry.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetEdgeRecord {
    pub a: usize,
    pub b: usize,
    pub color: String,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetGraphRecord {
    pub diagram: String,
    pub subgroup: Vec<String>,
    pub subgroup_diagram: String,
    pub vertices: usize,
    pub edges: Vec<CosetEdgeRecord>,
    pub tag: Option<String>,
    pub geometry: Vec<Vec<f64>>,
}

fn detect_tag(g: &CoxeterGroup, emb: &SubgroupEmbedding) -> Option<PolytopeTag> {
    let index = emb.coset_count();
    let whole = g.diagram().components();
    let sub = emb.subgroup.diagram().components();
    let tag = match (whole, sub) {
        ([c], [h]) => match (c.family, h.family) {
            (Family::A(n), Family::A(m)) if m + 1 == n => Some(PolytopeTag::Simplex(n)),
            (Family::B(n), Family::A(m)) if m + 1 == n => Some(PolytopeTag::Hypercube(n)),
            (Family::B(n), Family::B(m)) if m + 1 == n => Some(PolytopeTag::Orthoplex(n)),
            // B2 minus either node leaves A1
            (Family::D(n), Family::A(m)) if m + 1 == n => Some(PolytopeTag::Demihypercube(n)),
            _ => None,
        },
        _ => None,
    };
    match tag {
        Some(t) if t.vertex_count() == index => Some(t),
        _ if index == 2 => Some(PolytopeTag::Simplex(1)),
        _ => None,
    }
}

/// Coordinates `g^{-1} omega` of every coset, where `omega` is orthogonal to
/// the simple roots of `K` and has unit inner product with the others.
fn coset_geometry(g: &CoxeterGroup, emb: &SubgroupEmbedding) -> Vec<Vec<f64>> {
    let q = g.rank();
    let roots = g.roots();
    let gram = DMatrix::from_fn(q, q, |i, j| {
        roots[i].iter().zip(&roots[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let rhs = DVector::from_fn(q, |j, _| if emb.nodes.contains(&j) { 0.0 } else { 1.0 });
    let Some(coeffs) = gram.lu().solve(&rhs) else {
        return Vec::new();
    };
    let dim = roots[0].len();
    emb.representatives
        .iter()
        .map(|&rep| {
            let inv = g.inverse(rep);
            let mut x = vec![0.0; dim];
            for (j, c) in coeffs.iter().enumerate() {
                let r = &roots[g.root_image(inv, j)];
                for (xi, ri) in x.iter_mut().zip(r) {
                    *xi += c * ri;
                }
            }
            x
        })
        .collect()
}

/// Builds `Coset(G/H, S \ K)` for `H` generated by the nodes `k`.
pub fn build_coset_graph(g: &CoxeterGroup, k: &[usize]) -> Result<CosetGraph> {
    let mut nodes = k.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.iter().any(|&a| a >= g.rank()) {
        return Err(Error::InvalidSubgroup(format!("node index out of range in {k:?}")));
    }
    if nodes.len() == g.rank() {
        return Err(Error::InvalidSubgroup(
            "the subgroup must leave at least one generator".into(),
        ));
    }
    let embedding = subgroup_embedding(g, &nodes)?;
    let generators: Vec<usize> = (0..g.rank()).filter(|a| !nodes.contains(a)).collect();
    let mut collapsed: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for &s in &generators {
        for x in (0..g.order()).filter(|&x| g.parity(x) == 0) {
            let a = embedding.coset_of[x];
            let b = embedding.coset_of[g.left_gen(s, x)];
            *collapsed.entry((a.min(b), a.max(b), s)).or_default() += 1;
        }
    }
    let edges = collapsed
        .into_iter()
        .map(|((a, b, generator), multiplicity)| CosetEdge {
            a,
            b,
            generator,
            multiplicity,
        })
        .collect();
    let tag = detect_tag(g, &embedding);
    let geometry = coset_geometry(g, &embedding);
    Ok(CosetGraph {
        embedding,
        generators,
        edges,
        tag,
        geometry,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaneSide {
    R,
    L,
    On,
}

/// A reflecting plane: an involution of the vertices with two strict sides
/// it exchanges and a (possibly empty) set of vertices it passes through.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectingPlane {
    /// Cuts of the Cayley graph inducing this plane, smallest first. Only
    /// the first one carries the plane's matrix when certificates are
    /// lifted back to the Cayley graph.
    pub source_cuts: Vec<usize>,
    pub involution: Vec<usize>,
    pub sides: Vec<PlaneSide>,
    pub extendible: bool,
}

impl ReflectingPlane {
    pub fn side_vertices(&self, side: PlaneSide) -> Vec<usize> {
        (0..self.sides.len()).filter(|&v| self.sides[v] == side).collect()
    }

    pub fn fixed_vertices(&self) -> Vec<usize> {
        self.side_vertices(PlaneSide::On)
    }

    /// Strict separation; vertices on the plane are on neither side.
    pub fn separates(&self, u: usize, v: usize) -> bool {
        matches!(
            (self.sides[u], self.sides[v]),
            (PlaneSide::R, PlaneSide::L) | (PlaneSide::L, PlaneSide::R)
        )
    }
}

/// Projects every cut of the Cayley graph to the coset graph. A coset lies
/// on the plane when the cut's involution maps it to itself; otherwise it
/// takes the side of its elements. Planes equal as (involution, sides) are
/// merged.
pub fn project_cuts_to_planes(
    cay: &CayleyPsiGraph,
    cuts: &[ReflectingCut],
    cg: &CosetGraph,
) -> Vec<ReflectingPlane> {
    let g = &cay.group;
    let reps = &cg.embedding.representatives;
    let mut planes: Vec<ReflectingPlane> = Vec::new();
    for (id, cut) in cuts.iter().enumerate() {
        let t = cut_reflection(cay, cut);
        let involution: Vec<usize> = reps.iter().map(|&r| cg.lift(g.mul(r, t))).collect();
        let sides: Vec<PlaneSide> = reps
            .iter()
            .enumerate()
            .map(|(c, &r)| {
                if involution[c] == c {
                    PlaneSide::On
                } else {
                    match cut.vertex_side(cay.vertex_of(r)) {
                        Side::R => PlaneSide::R,
                        Side::L => PlaneSide::L,
                    }
                }
            })
            .collect();
        match planes
            .iter_mut()
            .find(|p| p.involution == involution && p.sides == sides)
        {
            Some(p) => p.source_cuts.push(id),
            None => planes.push(ReflectingPlane {
                source_cuts: vec![id],
                involution,
                sides,
                extendible: true,
            }),
        }
    }
    planes
}

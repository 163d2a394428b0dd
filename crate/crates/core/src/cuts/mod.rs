//! Reflecting cuts: odd involutive automorphisms whose fixed edges split a
//! psi-graph into two halves exchanged by the involution.

mod geodesic;
mod recognize;

pub use geodesic::{check_geodesic_lemma, GeodesicCounterexample, GeodesicReport};
pub use recognize::{recognize_coxeter, Recognition};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psigraph::{automorphism_group, CayleyPsiGraph, EdgeId, GraphAutomorphism, Parity, PsiGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    R,
    L,
}

/// Where a pair of items sits relative to a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separation {
    Separated,
    SameSide,
    /// At least one of the items is a fixed edge of the cut.
    OnCut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectingCut {
    automorphism: GraphAutomorphism,
    fixed_edges: Vec<EdgeId>,
    sides: Vec<Side>,
}

impl ReflectingCut {
    /// Checks that `k` is an odd involution with fixed edges whose removal
    /// leaves exactly two components exchanged by `k`. The component of
    /// white vertex 0 becomes side `R`.
    pub fn from_automorphism(z: &PsiGraph, k: GraphAutomorphism) -> Option<Self> {
        if k.kind != Parity::Odd || !k.is_automorphism_of(z) || !k.is_involution() {
            return None;
        }
        let fixed_edges: Vec<EdgeId> = z.edges().filter(|&e| k.apply_edge(z, e) == e).collect();
        if fixed_edges.is_empty() {
            return None;
        }
        let mut cut = vec![false; z.edge_count()];
        for &e in &fixed_edges {
            cut[z.edge_index(e)] = true;
        }
        let mut side = vec![None; z.vertex_count()];
        side[0] = Some(Side::R);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for c in 0..z.q() {
                if cut[z.edge_index(z.edge_at(v, c))] {
                    continue;
                }
                let u = z.neighbor(v, c);
                if side[u].is_none() {
                    side[u] = Some(Side::R);
                    queue.push_back(u);
                }
            }
        }
        let mut sides = Vec::with_capacity(z.vertex_count());
        for v in 0..z.vertex_count() {
            let in_r = side[v].is_some();
            let image_in_r = side[k.apply(v)].is_some();
            if in_r == image_in_r {
                return None;
            }
            sides.push(if in_r { Side::R } else { Side::L });
        }
        // the L side must be connected too; it is the image of R under k, so
        // this holds automatically once every vertex is matched across
        Some(Self {
            automorphism: k,
            fixed_edges,
            sides,
        })
    }

    pub fn automorphism(&self) -> &GraphAutomorphism {
        &self.automorphism
    }

    /// Fixed edges sorted by `(color, white)`.
    pub fn fixed_edges(&self) -> &[EdgeId] {
        &self.fixed_edges
    }

    pub fn is_fixed(&self, e: EdgeId) -> bool {
        self.fixed_edges.binary_search(&e).is_ok()
    }

    pub fn vertex_side(&self, v: usize) -> Side {
        self.sides[v]
    }

    pub fn side_vertices(&self, side: Side) -> Vec<usize> {
        (0..self.sides.len()).filter(|&v| self.sides[v] == side).collect()
    }

    /// Side of a non-fixed edge; `None` for edges on the cut.
    pub fn edge_side(&self, z: &PsiGraph, e: EdgeId) -> Option<Side> {
        let (w, b) = z.endpoints(e);
        let (sw, sb) = (self.sides[w], self.sides[b]);
        (sw == sb).then_some(sw)
    }

    /// Edges of one color lying strictly in the given side, sorted.
    pub fn side_edges(&self, z: &PsiGraph, color: usize, side: Side) -> Vec<EdgeId> {
        z.edges_of_color(color)
            .filter(|&e| self.edge_side(z, e) == Some(side))
            .collect()
    }

    pub fn mirror_edge(&self, z: &PsiGraph, e: EdgeId) -> EdgeId {
        self.automorphism.apply_edge(z, e)
    }

    pub fn separates_edges(&self, z: &PsiGraph, e: EdgeId, f: EdgeId) -> Separation {
        match (self.edge_side(z, e), self.edge_side(z, f)) {
            (Some(a), Some(b)) if a != b => Separation::Separated,
            (Some(_), Some(_)) => Separation::SameSide,
            _ => Separation::OnCut,
        }
    }

    /// Vertices are never on a psi-graph cut: an odd map fixes no vertex.
    pub fn separates_vertices(&self, v: usize, u: usize) -> bool {
        self.sides[v] != self.sides[u]
    }

    pub fn to_record(&self, z: &PsiGraph) -> CutRecord {
        CutRecord {
            tau: self.automorphism.white_map.iter().map(|&b| z.n() + b).collect(),
            upsilon: self.automorphism.black_map.clone(),
            fixed_edges: self
                .fixed_edges
                .iter()
                .map(|e| (z.colors()[e.color].clone(), e.white))
                .collect(),
        }
    }

    pub fn from_record(z: &PsiGraph, record: &CutRecord) -> Result<Self> {
        let n = z.n();
        if record.tau.len() != n || record.upsilon.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "cut maps have lengths {} and {}, graph has n = {n}",
                record.tau.len(),
                record.upsilon.len()
            )));
        }
        if record.tau.iter().any(|&b| b < n || b >= 2 * n) || record.upsilon.iter().any(|&w| w >= n) {
            return Err(Error::InvalidGraph("cut maps out of range".into()));
        }
        let k = GraphAutomorphism {
            kind: Parity::Odd,
            white_map: record.tau.iter().map(|&b| b - n).collect(),
            black_map: record.upsilon.clone(),
        };
        let cut = Self::from_automorphism(z, k)
            .ok_or_else(|| Error::InvalidGraph("maps do not define a reflecting cut".into()))?;
        let mut listed = record
            .fixed_edges
            .iter()
            .map(|(c, w)| Ok(EdgeId { color: z.color_index(c)?, white: *w }))
            .collect::<Result<Vec<_>>>()?;
        listed.sort();
        if listed != cut.fixed_edges {
            return Err(Error::InvalidGraph("listed fixed edges do not match the cut".into()));
        }
        Ok(cut)
    }
}

/// Serialized cut: `tau` maps white index to black vertex id (`n + beta`),
/// `upsilon` maps black index to white index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutRecord {
    pub tau: Vec<usize>,
    pub upsilon: Vec<usize>,
    pub fixed_edges: Vec<(String, usize)>,
}

fn sorted(mut cuts: Vec<ReflectingCut>) -> Vec<ReflectingCut> {
    cuts.sort_by(|a, b| a.fixed_edges.cmp(&b.fixed_edges));
    cuts
}

/// All reflecting cuts of a connected graph, ordered by their sorted
/// fixed-edge lists.
pub fn enumerate_cuts(z: &PsiGraph) -> Result<Vec<ReflectingCut>> {
    z.require_connected()?;
    let group = automorphism_group(z)?;
    Ok(sorted(
        group
            .odd
            .into_iter()
            .filter_map(|k| ReflectingCut::from_automorphism(z, k))
            .collect(),
    ))
}

/// Cuts of a Coxeter Cayley graph, one candidate per reflection `t` (the
/// right multiplication `v -> v t`). Same output as [`enumerate_cuts`].
pub fn enumerate_cayley_cuts(c: &CayleyPsiGraph) -> Vec<ReflectingCut> {
    let z = &c.graph;
    let n = z.n();
    sorted(
        c.group
            .reflections()
            .iter()
            .filter_map(|&t| {
                let map = c.right_multiplication(t);
                let k = GraphAutomorphism {
                    kind: Parity::Odd,
                    white_map: map[..n].iter().map(|&x| x - n).collect(),
                    black_map: map[n..].to_vec(),
                };
                ReflectingCut::from_automorphism(z, k)
            })
            .collect(),
    )
}

/// The reflection `t` with `k(v) = v t` for a cut of a Cayley graph.
pub fn cut_reflection(c: &CayleyPsiGraph, cut: &ReflectingCut) -> usize {
    c.element_of(cut.automorphism.apply(c.vertex_of(0)))
}

/// For every unordered pair of distinct `color`-edges (indexed by white
/// endpoint, `i < j`), whether some cut separates it. Row-major over `i`.
fn separated_pairs(z: &PsiGraph, cuts: &[ReflectingCut], color: usize) -> Vec<Vec<bool>> {
    let n = z.n();
    let mut sep = vec![vec![false; n]; n];
    for cut in cuts {
        let sides: Vec<Option<Side>> = z.edges_of_color(color).map(|e| cut.edge_side(z, e)).collect();
        for i in 0..n {
            for j in i + 1..n {
                if let (Some(a), Some(b)) = (sides[i], sides[j]) {
                    if a != b {
                        sep[i][j] = true;
                    }
                }
            }
        }
    }
    sep
}

/// The first pair of same-colored edges separated by no cut.
pub fn unseparated_pair(
    z: &PsiGraph,
    cuts: &[ReflectingCut],
    color: usize,
) -> Option<(EdgeId, EdgeId)> {
    let sep = separated_pairs(z, cuts, color);
    for i in 0..z.n() {
        for j in i + 1..z.n() {
            if !sep[i][j] {
                return Some((EdgeId { color, white: i }, EdgeId { color, white: j }));
            }
        }
    }
    None
}

/// Whether every pair of distinct edges of `color` (or of every color) is
/// separated by some reflecting cut.
pub fn is_edge_reflecting(z: &PsiGraph, color: Option<usize>) -> Result<bool> {
    let cuts = enumerate_cuts(z)?;
    Ok(edge_reflecting_with(z, &cuts, color))
}

pub fn edge_reflecting_with(z: &PsiGraph, cuts: &[ReflectingCut], color: Option<usize>) -> bool {
    match color {
        Some(c) => unseparated_pair(z, cuts, c).is_none(),
        None => (0..z.q()).all(|c| unseparated_pair(z, cuts, c).is_none()),
    }
}

/// An edge lying in no cut, if any.
pub fn mirror_witness(z: &PsiGraph, cuts: &[ReflectingCut]) -> Option<EdgeId> {
    let mut covered = vec![false; z.edge_count()];
    for cut in cuts {
        for &e in cut.fixed_edges() {
            covered[z.edge_index(e)] = true;
        }
    }
    z.edges().find(|&e| !covered[z.edge_index(e)])
}

/// Whether every edge is fixed by some reflecting cut.
pub fn is_mirror(z: &PsiGraph) -> Result<bool> {
    let cuts = enumerate_cuts(z)?;
    Ok(mirror_witness(z, &cuts).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{enumerate_group, CDDiagram};
    use crate::psigraph::{default_colors, enumerate_psigraphs, named, EnumerationCaps};

    fn cayley(s: &str) -> CayleyPsiGraph {
        CayleyPsiGraph::new(enumerate_group(&CDDiagram::parse(s).unwrap()).unwrap())
    }

    #[test]
    fn single_pair_has_one_cut() {
        let z = named::single_pair(3);
        let cuts = enumerate_cuts(&z).unwrap();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].fixed_edges().len(), 3);
        assert_eq!(cuts[0].side_vertices(Side::R), vec![0]);
        assert_eq!(cuts[0].side_vertices(Side::L), vec![1]);
    }

    #[test]
    fn even_cycles_have_m_cuts_through_antipodal_edges() {
        for m in 2..=6 {
            let z = named::cycle(m);
            let cuts = enumerate_cuts(&z).unwrap();
            assert_eq!(cuts.len(), m);
            for cut in &cuts {
                assert_eq!(cut.fixed_edges().len(), 2);
                let (a, b) = (cut.fixed_edges()[0], cut.fixed_edges()[1]);
                // antipodal: distance between the edges' endpoints is m - 1
                let d = z.distances_from(z.endpoints(a).0);
                let (w, bl) = z.endpoints(b);
                assert_eq!(d[w].min(d[bl]), m - 1);
            }
        }
    }

    #[test]
    fn square_separation() {
        let z = named::square();
        let cuts = enumerate_cuts(&z).unwrap();
        let a0 = EdgeId { color: 0, white: 0 };
        let a1 = EdgeId { color: 0, white: 1 };
        let b_cut = cuts.iter().find(|c| c.fixed_edges()[0].color == 1).unwrap();
        let a_cut = cuts.iter().find(|c| c.fixed_edges()[0].color == 0).unwrap();
        assert_eq!(b_cut.separates_edges(&z, a0, a1), Separation::Separated);
        assert_eq!(a_cut.separates_edges(&z, a0, a1), Separation::OnCut);
    }

    #[test]
    fn same_arc_edges_are_not_separated() {
        let z = named::cycle(4);
        for cut in enumerate_cuts(&z).unwrap() {
            let r = cut.side_edges(&z, 0, Side::R);
            if r.len() >= 2 {
                assert_eq!(cut.separates_edges(&z, r[0], r[1]), Separation::SameSide);
            }
        }
    }

    #[test]
    fn cuts_never_share_edges() {
        for z in enumerate_psigraphs(4, 3, true, EnumerationCaps::default()).unwrap() {
            let cuts = enumerate_cuts(&z).unwrap();
            let mut all: Vec<EdgeId> = cuts.iter().flat_map(|c| c.fixed_edges().to_vec()).collect();
            let total = all.len();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), total);
            for cut in &cuts {
                assert!(cut.automorphism().is_involution());
            }
        }
    }

    #[test]
    fn cayley_fast_path_matches_generic_enumeration() {
        for s in ["A1", "A2", "A3", "B2", "B3", "I5", "A1+A1+A1", "A1+A2"] {
            let c = cayley(s);
            let fast = enumerate_cayley_cuts(&c);
            assert_eq!(fast, enumerate_cuts(&c.graph).unwrap(), "{s}");
            assert_eq!(fast.len(), c.group.reflections().len(), "{s}");
            for cut in &fast {
                assert!(c.group.is_reflection(cut_reflection(&c, cut)));
            }
        }
    }

    #[test]
    fn edge_reflecting_and_mirror() {
        assert!(is_edge_reflecting(&named::square(), None).unwrap());
        assert!(is_edge_reflecting(&cayley("A3").graph, None).unwrap());
        assert!(is_edge_reflecting(&named::cycle(4), None).unwrap());
        assert!(is_mirror(&named::square()).unwrap());
        assert!(is_mirror(&named::cycle(3)).unwrap());

        let census = enumerate_psigraphs(3, 3, true, EnumerationCaps::default()).unwrap();
        let odd_one = census
            .iter()
            .find(|z| !is_edge_reflecting(z, None).unwrap())
            .expect("a non-reflecting 3-color graph");
        let cuts = enumerate_cuts(odd_one).unwrap();
        assert!(mirror_witness(odd_one, &cuts).is_some());
    }

    #[test]
    fn cut_record_round_trip() {
        let z = cayley("A2").graph;
        for cut in enumerate_cuts(&z).unwrap() {
            let rec = cut.to_record(&z);
            let text = serde_json::to_string(&rec).unwrap();
            let back: CutRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(ReflectingCut::from_record(&z, &back).unwrap(), cut);
        }
        let sq = named::square();
        let rec = enumerate_cuts(&sq).unwrap()[0].to_record(&sq);
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"tau":[2,3],"upsilon":[0,1],"fixed_edges":[["A",0],["A",1]]}"#
        );
    }

    #[test]
    fn rejects_disconnected() {
        let z = PsiGraph::from_sigma(2, default_colors(1), vec![vec![0, 1]]).unwrap();
        assert!(matches!(enumerate_cuts(&z), Err(Error::NotConnected)));
    }
}

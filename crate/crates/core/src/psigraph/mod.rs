//! Psi-graphs: bipartite, q-edge-colored graphs given by one perfect
//! matching `sigma_A` per party.
//!
//! White vertex `alpha` stands for a copy of the state and black vertex
//! `beta` for a copy of its conjugate; the `A`-edge of white `alpha` ends at
//! black `sigma_A(alpha)`. Vertex ids are `alpha` for whites and `n + beta`
//! for blacks. An edge is identified by its color and white endpoint.
//!
//! Isomorphisms never permute colors: parties are distinguishable, so two
//! graphs that differ only by a color relabeling are treated as different.

mod automorphism;
mod canonical;
mod cayley;
mod census;
mod transitivity;

pub use automorphism::{automorphism_group, AutomorphismGroup, GraphAutomorphism, Parity};
pub use canonical::{canonical_form, canonical_graph};
pub use cayley::{from_cayley, CayleyPsiGraph};
pub use census::{enumerate_psigraphs, EnumerationCaps};
pub use transitivity::{
    is_hypercube, property_p_hypercube, transitivity_battery, TransitivityReport,
};

use std::collections::VecDeque;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Edge `(color, white endpoint)`; orders by color first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub color: usize,
    pub white: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiGraph {
    n: usize,
    colors: Vec<String>,
    sigma: Vec<Vec<usize>>,
    sigma_inv: Vec<Vec<usize>>,
}

fn check_perm(p: &[usize], n: usize) -> Result<Vec<usize>> {
    if p.len() != n {
        return Err(Error::InvalidGraph(format!(
            "permutation has length {}, expected {n}",
            p.len()
        )));
    }
    let mut inv = vec![usize::MAX; n];
    for (i, &x) in p.iter().enumerate() {
        if x >= n || inv[x] != usize::MAX {
            return Err(Error::InvalidGraph(format!("{p:?} is not a permutation")));
        }
        inv[x] = i;
    }
    Ok(inv)
}

/// Default party labels `A`, `B`, `C`, ...
pub fn default_colors(q: usize) -> Vec<String> {
    (0..q)
        .map(|i| {
            if i < 26 {
                ((b'A' + i as u8) as char).to_string()
            } else {
                format!("P{i}")
            }
        })
        .collect()
}

impl PsiGraph {
    pub fn from_sigma(n: usize, colors: Vec<String>, sigma: Vec<Vec<usize>>) -> Result<Self> {
        if colors.len() != sigma.len() {
            return Err(Error::InvalidGraph(format!(
                "{} colors but {} permutations",
                colors.len(),
                sigma.len()
            )));
        }
        if colors.is_empty() {
            return Err(Error::InvalidGraph("a psi-graph needs at least one color".into()));
        }
        for (i, c) in colors.iter().enumerate() {
            if colors[..i].contains(c) {
                return Err(Error::InvalidGraph(format!("duplicate color {c:?}")));
            }
        }
        let sigma_inv = sigma
            .iter()
            .map(|p| check_perm(p, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            colors,
            sigma,
            sigma_inv,
        })
    }

    /// White vertex count (equal to the black count), the `n_r` of the invariant.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color_index(&self, label: &str) -> Result<usize> {
        self.colors
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownColor(label.to_string()))
    }

    pub fn sigma(&self, color: usize) -> &[usize] {
        &self.sigma[color]
    }

    pub fn sigma_inv(&self, color: usize) -> &[usize] {
        &self.sigma_inv[color]
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.q()
    }

    pub fn is_white(&self, v: usize) -> bool {
        v < self.n
    }

    pub fn black_vertex(&self, beta: usize) -> usize {
        self.n + beta
    }

    /// The vertex joined to `v` by its edge of the given color.
    pub fn neighbor(&self, v: usize, color: usize) -> usize {
        if v < self.n {
            self.n + self.sigma[color][v]
        } else {
            self.sigma_inv[color][v - self.n]
        }
    }

    /// Endpoints `(white vertex id, black vertex id)`.
    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        (e.white, self.n + self.sigma[e.color][e.white])
    }

    /// The edge of color `color` at vertex `v`.
    pub fn edge_at(&self, v: usize, color: usize) -> EdgeId {
        let white = if v < self.n {
            v
        } else {
            self.sigma_inv[color][v - self.n]
        };
        EdgeId { color, white }
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.q()).flat_map(move |color| (0..self.n).map(move |white| EdgeId { color, white }))
    }

    pub fn edges_of_color(&self, color: usize) -> impl Iterator<Item = EdgeId> {
        (0..self.n).map(move |white| EdgeId { color, white })
    }

    /// Dense edge index `color * n + white`.
    pub fn edge_index(&self, e: EdgeId) -> usize {
        e.color * self.n + e.white
    }

    /// Connected components as sorted vertex-id lists, ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count()];
        let mut out = Vec::new();
        for start in 0..self.vertex_count() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for c in 0..self.q() {
                    let u = self.neighbor(v, c);
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::NotConnected)
        }
    }

    /// Same matchings under new color labels.
    pub fn with_colors(&self, colors: Vec<String>) -> Result<Self> {
        Self::from_sigma(self.n, colors, self.sigma.clone())
    }

    /// Relabels whites by `white_perm` and blacks by `black_perm`
    /// (old index -> new index).
    pub fn relabel(&self, white_perm: &[usize], black_perm: &[usize]) -> Result<Self> {
        check_perm(white_perm, self.n)?;
        check_perm(black_perm, self.n)?;
        let sigma = self
            .sigma
            .iter()
            .map(|s| {
                let mut out = vec![0; self.n];
                for a in 0..self.n {
                    out[white_perm[a]] = black_perm[s[a]];
                }
                out
            })
            .collect();
        Self::from_sigma(self.n, self.colors.clone(), sigma)
    }

    /// Graph distances from `source` to every vertex (`usize::MAX` if unreachable).
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for c in 0..self.q() {
                let u = self.neighbor(v, c);
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    q: usize,
    n: usize,
    colors: Vec<String>,
    sigma: serde_json::Map<String, serde_json::Value>,
}

struct SigmaMap<'a>(&'a PsiGraph);

impl Serialize for SigmaMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.q()))?;
        for (c, p) in self.0.colors.iter().zip(&self.0.sigma) {
            map.serialize_entry(c, p)?;
        }
        map.end()
    }
}

impl Serialize for PsiGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PsiGraph", 4)?;
        st.serialize_field("q", &self.q())?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("colors", &self.colors)?;
        st.serialize_field("sigma", &SigmaMap(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PsiGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGraph::deserialize(d)?;
        if raw.q != raw.colors.len() {
            return Err(D::Error::custom("q does not match the number of colors"));
        }
        let mut sigma = Vec::with_capacity(raw.q);
        for c in &raw.colors {
            let v = raw
                .sigma
                .get(c)
                .ok_or_else(|| D::Error::custom(format!("missing sigma for color {c:?}")))?;
            let p: Vec<usize> = serde_json::from_value(v.clone()).map_err(D::Error::custom)?;
            sigma.push(p);
        }
        if raw.sigma.len() != raw.q {
            return Err(D::Error::custom("sigma has entries for unknown colors"));
        }
        PsiGraph::from_sigma(raw.n, raw.colors, sigma).map_err(D::Error::custom)
    }
}

/// Convenience constructors for the small graphs used throughout.
pub mod named {
    use super::*;

    /// `E^(1)`: one white and one black vertex joined by `q` edges.
    pub fn single_pair(q: usize) -> PsiGraph {
        PsiGraph::from_sigma(1, default_colors(q), vec![vec![0]; q]).unwrap()
    }

    /// The `2m`-cycle with alternating colors `A`, `B`.
    pub fn cycle(m: usize) -> PsiGraph {
        let shift: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
        PsiGraph::from_sigma(m, default_colors(2), vec![(0..m).collect(), shift]).unwrap()
    }

    /// The 4-cycle.
    pub fn square() -> PsiGraph {
        cycle(2)
    }

    /// The `q`-dimensional hypercube with color `i` flipping coordinate `i`.
    pub fn hypercube(q: usize) -> PsiGraph {
        hypercube_with_colors(default_colors(q))
    }

    pub fn hypercube_with_colors(colors: Vec<String>) -> PsiGraph {
        let q = colors.len();
        let even: Vec<usize> = (0..1usize << q).filter(|x| x.count_ones() % 2 == 0).collect();
        let odd: Vec<usize> = (0..1usize << q).filter(|x| x.count_ones() % 2 == 1).collect();
        let pos = |list: &[usize], x: usize| list.iter().position(|&y| y == x).unwrap();
        let sigma = (0..q)
            .map(|c| even.iter().map(|&w| pos(&odd, w ^ (1 << c))).collect())
            .collect();
        PsiGraph::from_sigma(even.len(), colors, sigma).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair_and_square() {
        let e1 = PsiGraph::from_sigma(1, default_colors(3), vec![vec![0]; 3]).unwrap();
        assert_eq!(e1.edge_count(), 3);
        assert!(e1.is_connected());

        let sq = PsiGraph::from_sigma(2, default_colors(2), vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(sq.is_connected());
        assert_eq!(sq.distances_from(0), vec![0, 2, 1, 1]);
    }

    #[test]
    fn hexagon_adjacency() {
        let c6 = PsiGraph::from_sigma(3, default_colors(2), vec![vec![0, 1, 2], vec![1, 2, 0]])
            .unwrap();
        assert!(c6.is_connected());
        for v in 0..6 {
            assert_eq!(c6.neighbor(c6.neighbor(v, 0), 0), v);
            assert_ne!(c6.neighbor(v, 0), c6.neighbor(v, 1));
        }
        assert_eq!(*c6.distances_from(0).iter().max().unwrap(), 3);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(PsiGraph::from_sigma(2, default_colors(1), vec![vec![0, 0]]).is_err());
        assert!(PsiGraph::from_sigma(2, default_colors(1), vec![vec![0]]).is_err());
        assert!(PsiGraph::from_sigma(2, default_colors(2), vec![vec![0, 1]]).is_err());
        assert!(PsiGraph::from_sigma(
            1,
            vec!["A".into(), "A".into()],
            vec![vec![0], vec![0]]
        )
        .is_err());
    }

    #[test]
    fn disjoint_squares_are_disconnected() {
        let z = PsiGraph::from_sigma(4, default_colors(2), vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]])
            .unwrap();
        assert!(!z.is_connected());
        assert_eq!(z.components().len(), 2);
    }

    #[test]
    fn json_round_trip_and_format() {
        let sq = named::square();
        let text = serde_json::to_string(&sq).unwrap();
        assert_eq!(text, r#"{"q":2,"n":2,"colors":["A","B"],"sigma":{"A":[0,1],"B":[1,0]}}"#);
        let back: PsiGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sq);
        let bad = r#"{"q":2,"n":2,"colors":["A","B"],"sigma":{"A":[0,1]}}"#;
        assert!(serde_json::from_str::<PsiGraph>(bad).is_err());
    }

    #[test]
    fn hypercube_shape() {
        let c3 = named::hypercube(3);
        assert_eq!(c3.n(), 4);
        assert!(c3.is_connected());
        assert_eq!(named::hypercube(1), named::single_pair(1));
    }
}

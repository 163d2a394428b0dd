use std::collections::VecDeque;

use super::{EdgeId, PsiGraph};
use crate::error::{Error, Result};

const AUTOMORPHISM_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    /// Preserves vertex color.
    Even,
    /// Swaps white and black vertices.
    Odd,
}

/// A color-preserving automorphism of a psi-graph.
///
/// For an even automorphism `white_map` and `black_map` are the permutations
/// of white and black indices. For an odd one `white_map` is `tau`
/// (white index -> black index) and `black_map` is `upsilon`
/// (black index -> white index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphAutomorphism {
    pub kind: Parity,
    pub white_map: Vec<usize>,
    pub black_map: Vec<usize>,
}

impl GraphAutomorphism {
    pub fn identity(n: usize) -> Self {
        Self {
            kind: Parity::Even,
            white_map: (0..n).collect(),
            black_map: (0..n).collect(),
        }
    }

    fn n(&self) -> usize {
        self.white_map.len()
    }

    /// Image of a vertex id.
    pub fn apply(&self, v: usize) -> usize {
        let n = self.n();
        match (self.kind, v < n) {
            (Parity::Even, true) => self.white_map[v],
            (Parity::Even, false) => n + self.black_map[v - n],
            (Parity::Odd, true) => n + self.white_map[v],
            (Parity::Odd, false) => self.black_map[v - n],
        }
    }

    pub fn apply_edge(&self, z: &PsiGraph, e: EdgeId) -> EdgeId {
        let (w, b) = z.endpoints(e);
        let (w2, b2) = (self.apply(w), self.apply(b));
        let white = if w2 < z.n() { w2 } else { b2 };
        EdgeId {
            color: e.color,
            white,
        }
    }

    fn from_vertex_map(n: usize, map: &[usize]) -> Self {
        if map[0] < n {
            Self {
                kind: Parity::Even,
                white_map: map[..n].to_vec(),
                black_map: map[n..].iter().map(|&x| x - n).collect(),
            }
        } else {
            Self {
                kind: Parity::Odd,
                white_map: map[..n].iter().map(|&x| x - n).collect(),
                black_map: map[n..].to_vec(),
            }
        }
    }

    fn vertex_map(&self) -> Vec<usize> {
        (0..2 * self.n()).map(|v| self.apply(v)).collect()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let map: Vec<usize> = (0..2 * self.n()).map(|v| self.apply(other.apply(v))).collect();
        Self::from_vertex_map(self.n(), &map)
    }

    pub fn inverse(&self) -> Self {
        let fwd = self.vertex_map();
        let mut inv = vec![0; fwd.len()];
        for (v, &u) in fwd.iter().enumerate() {
            inv[u] = v;
        }
        Self::from_vertex_map(self.n(), &inv)
    }

    pub fn is_identity(&self) -> bool {
        self.kind == Parity::Even
            && self.white_map.iter().enumerate().all(|(i, &x)| i == x)
            && self.black_map.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn is_involution(&self) -> bool {
        self.compose(self).is_identity()
    }

    /// Checks the defining relations against `z`.
    pub fn is_automorphism_of(&self, z: &PsiGraph) -> bool {
        let n = z.n();
        if self.white_map.len() != n || self.black_map.len() != n {
            return false;
        }
        (0..2 * n).all(|v| (0..z.q()).all(|c| self.apply(z.neighbor(v, c)) == z.neighbor(self.apply(v), c)))
    }
}

/// The extended replica symmetry: all even automorphisms (the replica
/// symmetry) and all odd ones, each sorted.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    pub even: Vec<GraphAutomorphism>,
    pub odd: Vec<GraphAutomorphism>,
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn all(&self) -> impl Iterator<Item = &GraphAutomorphism> {
        self.even.iter().chain(&self.odd)
    }
}

/// Extends `map` from the seed assignment across the seed's component by
/// following colored edges. Returns false on a conflict.
fn propagate(z: &PsiGraph, map: &mut [usize], used: &mut [bool], seed: usize) -> bool {
    let mut queue = VecDeque::from([seed]);
    while let Some(v) = queue.pop_front() {
        let img = map[v];
        for c in 0..z.q() {
            let u = z.neighbor(v, c);
            let u_img = z.neighbor(img, c);
            if map[u] == usize::MAX {
                if used[u_img] {
                    return false;
                }
                map[u] = u_img;
                used[u_img] = true;
                queue.push_back(u);
            } else if map[u] != u_img {
                return false;
            }
        }
    }
    true
}

fn search(
    z: &PsiGraph,
    parity: Parity,
    map: &mut [usize],
    used: &mut [bool],
    out: &mut Vec<GraphAutomorphism>,
) -> Result<()> {
    let n = z.n();
    let Some(v) = map.iter().position(|&x| x == usize::MAX) else {
        out.push(GraphAutomorphism::from_vertex_map(n, map));
        if out.len() > AUTOMORPHISM_CAP {
            return Err(Error::CapExceeded("too many automorphisms".into()));
        }
        return Ok(());
    };
    let want_white = (v < n) == (parity == Parity::Even);
    let candidates = if want_white { 0..n } else { n..2 * n };
    for c in candidates {
        if used[c] {
            continue;
        }
        let mut m2 = map.to_vec();
        let mut u2 = used.to_vec();
        m2[v] = c;
        u2[c] = true;
        if propagate(z, &mut m2, &mut u2, v) {
            search(z, parity, &mut m2, &mut u2, out)?;
        }
    }
    Ok(())
}

/// All automorphisms of `z`. The image of one vertex determines an
/// automorphism on that vertex's component, so the search seeds one vertex
/// per component and propagates along colored edges.
pub fn automorphism_group(z: &PsiGraph) -> Result<AutomorphismGroup> {
    let mut result = AutomorphismGroup {
        even: Vec::new(),
        odd: Vec::new(),
    };
    for parity in [Parity::Even, Parity::Odd] {
        let mut out = Vec::new();
        let mut map = vec![usize::MAX; z.vertex_count()];
        let mut used = vec![false; z.vertex_count()];
        search(z, parity, &mut map, &mut used, &mut out)?;
        out.sort();
        match parity {
            Parity::Even => result.even = out,
            Parity::Odd => result.odd = out,
        }
    }
    Ok(result)
}

use std::collections::HashMap;

use serde::Serialize;

use super::{
    automorphism_group, canonical_form, named, AutomorphismGroup, GraphAutomorphism, PsiGraph,
};
use crate::error::Result;

/// The five symmetry conditions that are equivalent for connected
/// psi-graphs, each evaluated on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransitivityReport {
    /// All automorphisms act transitively on all vertices.
    pub vertex_transitive: bool,
    /// Even automorphisms act transitively on white vertices.
    pub weakly_vertex_transitive: bool,
    /// Even automorphisms act transitively on the edges of each color.
    pub strongly_all_edge_transitive: bool,
    /// All automorphisms act transitively on the edges of each color.
    pub all_edge_transitive: bool,
    /// The graph is a Cayley graph of its automorphism group with
    /// involutive generators.
    pub cayley_involutive: bool,
}

impl TransitivityReport {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.vertex_transitive,
            self.weakly_vertex_transitive,
            self.strongly_all_edge_transitive,
            self.all_edge_transitive,
            self.cayley_involutive,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|&x| x == a[0])
    }

    pub fn all_true(&self) -> bool {
        self.as_array().iter().all(|&x| x)
    }
}

fn orbit_is_everything<'a>(
    count: usize,
    autos: impl Iterator<Item = &'a GraphAutomorphism>,
    image_of_first: impl Fn(&GraphAutomorphism) -> usize,
) -> bool {
    let mut hit = vec![false; count];
    for a in autos {
        hit[image_of_first(a)] = true;
    }
    hit.iter().all(|&h| h)
}

/// Builds `Cay(G, {g_A})` where `G` is the full automorphism group and
/// `g_A` is the automorphism carrying white 0 to its `A`-neighbor, then
/// compares it with `z`.
fn is_cayley_of_automorphisms(z: &PsiGraph, group: &AutomorphismGroup) -> bool {
    if group.order() != z.vertex_count() {
        return false;
    }
    let n = z.n();
    let odd_index: HashMap<&GraphAutomorphism, usize> =
        group.odd.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut sigma = Vec::with_capacity(z.q());
    for c in 0..z.q() {
        let target = z.neighbor(0, c);
        let Some(gen) = group.odd.iter().find(|a| a.apply(0) == target) else {
            return false;
        };
        if !gen.is_involution() {
            return false;
        }
        let mut row = Vec::with_capacity(n);
        for g in &group.even {
            match odd_index.get(&g.compose(gen)) {
                Some(&i) => row.push(i),
                None => return false,
            }
        }
        sigma.push(row);
    }
    match PsiGraph::from_sigma(n, z.colors().to_vec(), sigma) {
        Ok(cay) => cay.is_connected() && canonical_form(&cay) == canonical_form(z),
        Err(_) => false,
    }
}

/// Evaluates the five transitivity conditions independently.
pub fn transitivity_battery(z: &PsiGraph) -> Result<TransitivityReport> {
    z.require_connected()?;
    let group = automorphism_group(z)?;
    let n = z.n();
    let vertex_transitive =
        orbit_is_everything(2 * n, group.all(), |a| a.apply(0));
    let weakly_vertex_transitive =
        orbit_is_everything(n, group.even.iter(), |a| a.apply(0));
    let color_orbit = |autos: &mut dyn Iterator<Item = &GraphAutomorphism>, c: usize| {
        let e0 = z.edge_at(0, c);
        let mut hit = vec![false; n];
        for a in autos {
            hit[a.apply_edge(z, e0).white] = true;
        }
        hit.iter().all(|&h| h)
    };
    let strongly_all_edge_transitive =
        (0..z.q()).all(|c| color_orbit(&mut group.even.iter(), c));
    let all_edge_transitive = (0..z.q()).all(|c| color_orbit(&mut group.all(), c));
    Ok(TransitivityReport {
        vertex_transitive,
        weakly_vertex_transitive,
        strongly_all_edge_transitive,
        all_edge_transitive,
        cayley_involutive: is_cayley_of_automorphisms(z, &group),
    })
}

/// Whether every two-color alternating cycle has length 4.
///
/// Starting from a white vertex, following `A` then `B` returns to a white
/// vertex via `sigma_B^{-1} sigma_A`; all such cycles are `ABAB` squares
/// exactly when that map is a fixed-point-free involution.
pub fn property_p_hypercube(z: &PsiGraph) -> Result<bool> {
    z.require_connected()?;
    for a in 0..z.q() {
        for b in a + 1..z.q() {
            for w in 0..z.n() {
                let step = |x: usize| z.sigma_inv(b)[z.sigma(a)[x]];
                let w1 = step(w);
                if w1 == w || step(w1) != w {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Structural hypercube test: `2^q` vertices and isomorphic to the
/// coordinate-flip cube with the same colors.
pub fn is_hypercube(z: &PsiGraph) -> bool {
    let q = z.q();
    q < usize::BITS as usize - 1
        && z.vertex_count() == 1 << q
        && canonical_form(z) == canonical_form(&named::hypercube_with_colors(z.colors().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::super::{default_colors, enumerate_psigraphs, from_cayley, EnumerationCaps};
    use super::*;
    use crate::coxeter::{enumerate_group, CDDiagram};

    #[test]
    fn cycles_are_fully_symmetric() {
        for m in [2, 3, 4] {
            let r = transitivity_battery(&named::cycle(m)).unwrap();
            assert!(r.all_true(), "cycle {m}: {r:?}");
        }
    }

    #[test]
    fn cayley_graphs_are_fully_symmetric() {
        for s in ["A2", "A3", "B2", "A1+A1+A1"] {
            let z = from_cayley(&enumerate_group(&CDDiagram::parse(s).unwrap()).unwrap());
            assert!(transitivity_battery(&z).unwrap().all_true(), "{s}");
        }
    }

    #[test]
    fn asymmetric_three_color_graph_exists() {
        let census = enumerate_psigraphs(3, 3, true, EnumerationCaps::default()).unwrap();
        let reports: Vec<_> = census.iter().map(|z| transitivity_battery(z).unwrap()).collect();
        assert!(reports.iter().all(|r| r.all_agree()));
        assert!(reports.iter().any(|r| !r.all_true()));
        assert!(reports.iter().any(|r| r.all_true()));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let z = PsiGraph::from_sigma(4, default_colors(2), vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]])
            .unwrap();
        assert!(transitivity_battery(&z).is_err());
        assert!(property_p_hypercube(&z).is_err());
    }

    #[test]
    fn property_p() {
        assert!(property_p_hypercube(&named::square()).unwrap());
        assert!(!property_p_hypercube(&named::cycle(3)).unwrap());
        let cube = from_cayley(&enumerate_group(&CDDiagram::parse("A1+A1+A1").unwrap()).unwrap());
        assert!(property_p_hypercube(&cube).unwrap());
        assert!(is_hypercube(&cube));
        assert!(!is_hypercube(&named::cycle(3)));
    }

    /// Alternating cycles enumerated by walking, independent of the
    /// involution shortcut.
    fn alternating_cycle_lengths(z: &PsiGraph, a: usize, b: usize) -> Vec<usize> {
        let mut seen = vec![false; z.vertex_count()];
        let mut lengths = Vec::new();
        for start in 0..z.vertex_count() {
            if seen[start] {
                continue;
            }
            let mut v = start;
            let mut len = 0;
            loop {
                seen[v] = true;
                v = z.neighbor(v, if len % 2 == 0 { a } else { b });
                len += 1;
                if v == start && len % 2 == 0 {
                    break;
                }
            }
            lengths.push(len);
        }
        lengths
    }

    #[test]
    fn property_p_matches_walked_cycles_and_hypercube_on_census() {
        for q in 2..=3 {
            for n in 1..=4 {
                for z in enumerate_psigraphs(n, q, true, EnumerationCaps::default()).unwrap() {
                    let walked = (0..q).all(|a| {
                        (a + 1..q).all(|b| alternating_cycle_lengths(&z, a, b).iter().all(|&l| l == 4))
                    });
                    let p = property_p_hypercube(&z).unwrap();
                    assert_eq!(p, walked);
                    assert_eq!(p, is_hypercube(&z));
                    if p {
                        assert_eq!(z.n(), 1 << (q - 1));
                        assert!(transitivity_battery(&z).unwrap().all_true());
                    }
                }
            }
        }
    }
}

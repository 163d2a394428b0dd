use super::{EdgeId, PsiGraph};
use crate::coxeter::CoxeterGroup;

/// The Cayley psi-graph of a finite Coxeter group with its standard
/// involutive generators, together with the element <-> vertex maps.
///
/// Whites are the even elements and blacks the odd ones, each in id order.
/// The `A`-edge of element `g` joins `g` and `s_A g`.
#[derive(Clone, Debug)]
pub struct CayleyPsiGraph {
    pub group: CoxeterGroup,
    pub graph: PsiGraph,
    white_elements: Vec<usize>,
    black_elements: Vec<usize>,
    /// element id -> vertex id
    vertex_of: Vec<usize>,
}

impl CayleyPsiGraph {
    pub fn new(group: CoxeterGroup) -> Self {
        let mut white_elements = Vec::new();
        let mut black_elements = Vec::new();
        let mut local = vec![0; group.order()];
        for g in 0..group.order() {
            if group.parity(g) == 0 {
                local[g] = white_elements.len();
                white_elements.push(g);
            } else {
                local[g] = black_elements.len();
                black_elements.push(g);
            }
        }
        let n = white_elements.len();
        let sigma = (0..group.rank())
            .map(|a| {
                white_elements
                    .iter()
                    .map(|&w| local[group.left_gen(a, w)])
                    .collect()
            })
            .collect();
        let colors = group.diagram().nodes().to_vec();
        let graph = PsiGraph::from_sigma(n, colors, sigma)
            .expect("generator actions are fixed-point-free involutions");
        let vertex_of = (0..group.order())
            .map(|g| if group.parity(g) == 0 { local[g] } else { n + local[g] })
            .collect();
        Self {
            group,
            graph,
            white_elements,
            black_elements,
            vertex_of,
        }
    }

    pub fn element_of(&self, v: usize) -> usize {
        let n = self.graph.n();
        if v < n {
            self.white_elements[v]
        } else {
            self.black_elements[v - n]
        }
    }

    pub fn vertex_of(&self, g: usize) -> usize {
        self.vertex_of[g]
    }

    /// The `color`-edge incident to element `g`.
    pub fn edge_at_element(&self, color: usize, g: usize) -> EdgeId {
        self.graph.edge_at(self.vertex_of[g], color)
    }

    /// The vertex map of right multiplication `v -> v t`, an automorphism of
    /// the Cayley graph (odd when `t` is odd).
    pub fn right_multiplication(&self, t: usize) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .map(|v| self.vertex_of[self.group.mul(self.element_of(v), t)])
            .collect()
    }
}

/// Cayley psi-graph of `g`: `n = |G| / 2`, one color per generator.
pub fn from_cayley(g: &CoxeterGroup) -> PsiGraph {
    CayleyPsiGraph::new(g.clone()).graph
}

#[cfg(test)]
mod tests {
    use super::super::{canonical_form, named};
    use super::*;
    use crate::coxeter::{enumerate_group, CDDiagram};

    fn cay(s: &str) -> PsiGraph {
        from_cayley(&enumerate_group(&CDDiagram::parse(s).unwrap()).unwrap())
    }

    #[test]
    fn a1_is_a_single_edge() {
        let z = cay("A1");
        assert_eq!(z.n(), 1);
        assert_eq!(z.q(), 1);
    }

    #[test]
    fn dihedral_groups_give_even_cycles() {
        for m in 2..=6 {
            let z = cay(&format!("I{m}"));
            assert_eq!(z.n(), m);
            let cyc = named::cycle(m)
                .with_colors(vec!["g0".into(), "g1".into()])
                .unwrap();
            assert_eq!(canonical_form(&z), canonical_form(&cyc), "I{m}");
        }
    }

    #[test]
    fn three_commuting_involutions_give_the_cube() {
        let z = cay("A1+A1+A1");
        assert_eq!(z.n(), 4);
        let cube = named::hypercube_with_colors(z.colors().to_vec());
        assert_eq!(canonical_form(&z), canonical_form(&cube));
    }

    #[test]
    fn right_multiplication_by_reflection_is_odd_automorphism() {
        let c = CayleyPsiGraph::new(enumerate_group(&CDDiagram::parse("A3").unwrap()).unwrap());
        let z = &c.graph;
        for &t in c.group.reflections() {
            let map = c.right_multiplication(t);
            for v in 0..z.vertex_count() {
                assert_ne!(z.is_white(v), z.is_white(map[v]));
                for col in 0..z.q() {
                    assert_eq!(map[z.neighbor(v, col)], z.neighbor(map[v], col));
                }
            }
        }
    }
}

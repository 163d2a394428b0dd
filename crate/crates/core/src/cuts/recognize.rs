use serde::Serialize;

use super::{edge_reflecting_with, enumerate_cuts};
use crate::coxeter::{CDDiagram, CoxeterGroup};
use crate::error::Result;
use crate::psigraph::{canonical_form, from_cayley, PsiGraph};

/// Outcome of [`recognize_coxeter`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Recognition {
    /// The graph is the Cayley graph of the Coxeter group of this diagram.
    /// Colors whose matchings coincide share one generator; node labels are
    /// the colors of each class joined by `=`.
    Coxeter {
        #[serde(serialize_with = "as_display")]
        diagram: CDDiagram,
        generator_of_color: Vec<usize>,
    },
    /// Two alternating cycles of the same color pair have different
    /// lengths, so the graph is not edge-transitive.
    InconsistentCycles {
        colors: (String, String),
        lengths: Vec<usize>,
    },
    NotEdgeReflecting,
    /// Edge-reflecting, yet reconstruction failed. Every edge-reflecting
    /// graph is a Coxeter Cayley graph, so this indicates a defect.
    Inconsistent { reason: String },
}

fn as_display<S: serde::Serializer>(d: &CDDiagram, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(d)
}

impl Recognition {
    pub fn diagram(&self) -> Option<&CDDiagram> {
        match self {
            Recognition::Coxeter { diagram, .. } => Some(diagram),
            _ => None,
        }
    }
}

/// Lengths (in edges) of the alternating `a`/`b` cycles, one per cycle,
/// in order of their smallest white vertex.
pub fn alternating_cycle_lengths(z: &PsiGraph, a: usize, b: usize) -> Vec<usize> {
    let mut seen = vec![false; z.n()];
    let mut lengths = Vec::new();
    for start in 0..z.n() {
        if seen[start] {
            continue;
        }
        let mut w = start;
        let mut len = 0;
        loop {
            seen[w] = true;
            w = z.sigma_inv(b)[z.sigma(a)[w]];
            len += 2;
            if w == start {
                break;
            }
        }
        lengths.push(len);
    }
    lengths
}

/// Reads `m_AB` off the alternating cycles, rebuilds the Cayley graph of
/// the resulting Coxeter group and checks that it is isomorphic to `z`.
///
/// Colors with identical matchings (alternating cycles of length 2) are
/// merged into one generator before the Coxeter matrix is formed.
pub fn recognize_coxeter(z: &PsiGraph) -> Result<Recognition> {
    z.require_connected()?;
    let mut generator_of_color = Vec::with_capacity(z.q());
    let mut reps: Vec<usize> = Vec::new();
    for c in 0..z.q() {
        match reps.iter().position(|&r| z.sigma(r) == z.sigma(c)) {
            Some(i) => generator_of_color.push(i),
            None => {
                generator_of_color.push(reps.len());
                reps.push(c);
            }
        }
    }
    let q = reps.len();
    let mut matrix = vec![vec![1u32; q]; q];
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate().skip(i + 1) {
            let lengths = alternating_cycle_lengths(z, a, b);
            if lengths.iter().any(|&l| l != lengths[0]) {
                return Ok(Recognition::InconsistentCycles {
                    colors: (z.colors()[a].clone(), z.colors()[b].clone()),
                    lengths,
                });
            }
            // a cycle of 2m edges encodes (s_A s_B)^m = 1
            let m = (lengths[0] / 2) as u32;
            matrix[i][j] = m;
            matrix[j][i] = m;
        }
    }
    let cuts = enumerate_cuts(z)?;
    if !edge_reflecting_with(z, &cuts, None) {
        return Ok(Recognition::NotEdgeReflecting);
    }
    let inconsistent = |reason: String| {
        log::error!("edge-reflecting graph failed Coxeter reconstruction: {reason}");
        Ok(Recognition::Inconsistent { reason })
    };
    let labels = (0..q)
        .map(|i| {
            (0..z.q())
                .filter(|&c| generator_of_color[c] == i)
                .map(|c| z.colors()[c].as_str())
                .collect::<Vec<_>>()
                .join("=")
        })
        .collect();
    let diagram = match CDDiagram::from_matrix(labels, matrix) {
        Ok(d) => d,
        Err(e) => return inconsistent(format!("alternating cycles give no finite diagram: {e}")),
    };
    let group = match CoxeterGroup::enumerate(&diagram, z.vertex_count()) {
        Ok(g) => g,
        Err(e) => return inconsistent(format!("group of {diagram} is larger than the graph: {e}")),
    };
    let cay = from_cayley(&group);
    let sigma = generator_of_color.iter().map(|&i| cay.sigma(i).to_vec()).collect();
    let rebuilt = PsiGraph::from_sigma(cay.n(), z.colors().to_vec(), sigma)?;
    if canonical_form(&rebuilt) != canonical_form(z) {
        return inconsistent(format!("Cayley graph of {diagram} is not isomorphic to the input"));
    }
    Ok(Recognition::Coxeter {
        diagram,
        generator_of_color,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::enumerate_group;
    use crate::cuts::is_mirror;
    use crate::psigraph::{enumerate_psigraphs, named, EnumerationCaps};

    fn recognized(z: &PsiGraph) -> String {
        recognize_coxeter(z).unwrap().diagram().unwrap().to_string()
    }

    #[test]
    fn small_graphs() {
        assert_eq!(recognized(&named::square()), "A1+A1");
        assert_eq!(recognized(&named::cycle(3)), "A2");
        assert_eq!(recognized(&named::cycle(4)), "B2");
        assert_eq!(recognized(&named::cycle(5)), "I5");
        assert_eq!(recognized(&named::hypercube(3)), "A1+A1+A1");
        assert_eq!(recognized(&named::single_pair(1)), "A1");
    }

    #[test]
    fn cayley_graphs_round_trip() {
        for s in ["A3", "B3", "A1+A2", "H3"] {
            let g = enumerate_group(&CDDiagram::parse(s).unwrap()).unwrap();
            let z = from_cayley(&g);
            let d = recognize_coxeter(&z).unwrap().diagram().cloned().unwrap();
            assert_eq!(d.coxeter_matrix(), g.diagram().coxeter_matrix(), "{s}");
        }
    }

    #[test]
    fn parallel_colors_share_a_generator() {
        let r = recognize_coxeter(&named::single_pair(3)).unwrap();
        let Recognition::Coxeter { diagram, generator_of_color } = r else {
            panic!("{r:?}");
        };
        assert_eq!(diagram.to_string(), "A1");
        assert_eq!(diagram.nodes(), ["A=B=C".to_string()]);
        assert_eq!(generator_of_color, vec![0, 0, 0]);

        let doubled = PsiGraph::from_sigma(
            2,
            crate::psigraph::default_colors(3),
            vec![vec![0, 1], vec![1, 0], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(recognized(&doubled), "A1+A1");
    }

    #[test]
    fn census_agreement() {
        for (q, n) in [(2, 3), (3, 2), (3, 3), (3, 4)] {
            for z in enumerate_psigraphs(n, q, true, EnumerationCaps::default()).unwrap() {
                let r = recognize_coxeter(&z).unwrap();
                assert!(!matches!(r, Recognition::Inconsistent { .. }), "{r:?}");
                assert_eq!(r.diagram().is_some(), is_mirror(&z).unwrap());
            }
        }
    }
}

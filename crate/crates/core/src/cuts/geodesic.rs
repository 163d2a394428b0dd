use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{enumerate_cuts, ReflectingCut};
use crate::error::Result;
use crate::psigraph::PsiGraph;

/// Random geodesics sampled in addition to one BFS geodesic per pair.
pub const GEODESIC_SAMPLES: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicCounterexample {
    /// Vertex sequence of the geodesic.
    pub path: Vec<usize>,
    pub cut_id: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicReport {
    pub holds: bool,
    pub geodesics_checked: usize,
    pub counterexample: Option<GeodesicCounterexample>,
}

fn crossings(z: &PsiGraph, cut: &ReflectingCut, path: &[usize]) -> usize {
    path.windows(2)
        .filter(|w| {
            let c = (0..z.q()).find(|&c| z.neighbor(w[0], c) == w[1]).expect("path follows edges");
            cut.is_fixed(z.edge_at(w[0], c))
        })
        .count()
}

fn first_violation(z: &PsiGraph, cuts: &[ReflectingCut], path: &[usize]) -> Option<GeodesicCounterexample> {
    cuts.iter().position(|cut| crossings(z, cut, path) > 1).map(|cut_id| GeodesicCounterexample {
        path: path.to_vec(),
        cut_id,
    })
}

/// Checks that no geodesic uses two edges of the same cut: one BFS geodesic
/// for every ordered vertex pair plus [`GEODESIC_SAMPLES`] geodesics drawn
/// by random descent towards random targets.
pub fn check_geodesic_lemma(z: &PsiGraph, seed: u64) -> Result<GeodesicReport> {
    let cuts = enumerate_cuts(z)?;
    let nv = z.vertex_count();
    let dist: Vec<Vec<usize>> = (0..nv).map(|v| z.distances_from(v)).collect();
    let mut checked = 0;
    let report = |checked, counterexample: Option<GeodesicCounterexample>| GeodesicReport {
        holds: counterexample.is_none(),
        geodesics_checked: checked,
        counterexample,
    };

    for source in 0..nv {
        for target in 0..nv {
            if source == target {
                continue;
            }
            // deterministic descent: lowest color that gets closer
            let mut path = vec![source];
            let mut v = source;
            while v != target {
                v = (0..z.q())
                    .map(|c| z.neighbor(v, c))
                    .find(|&u| dist[target][u] + 1 == dist[target][v])
                    .expect("connected graph");
                path.push(v);
            }
            checked += 1;
            if let Some(bad) = first_violation(z, &cuts, &path) {
                return Ok(report(checked, Some(bad)));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GEODESIC_SAMPLES {
        let source = rng.random_range(0..nv);
        let target = rng.random_range(0..nv);
        let mut path = vec![source];
        let mut v = source;
        while v != target {
            let steps: Vec<usize> = (0..z.q())
                .map(|c| z.neighbor(v, c))
                .filter(|&u| dist[target][u] + 1 == dist[target][v])
                .collect();
            v = steps[rng.random_range(0..steps.len())];
            path.push(v);
        }
        checked += 1;
        if let Some(bad) = first_violation(z, &cuts, &path) {
            return Ok(report(checked, Some(bad)));
        }
    }
    Ok(report(checked, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{enumerate_group, CDDiagram};
    use crate::psigraph::{from_cayley, named};

    #[test]
    fn cycles_and_cayley_graphs_satisfy_the_lemma() {
        assert!(check_geodesic_lemma(&named::cycle(4), 1).unwrap().holds);
        let a3 = from_cayley(&enumerate_group(&CDDiagram::parse("A3").unwrap()).unwrap());
        let r = check_geodesic_lemma(&a3, 2).unwrap();
        assert!(r.holds);
        assert_eq!(r.geodesics_checked, 24 * 23 + GEODESIC_SAMPLES);
    }

    #[test]
    fn crossing_count_on_a_long_walk() {
        // walking half-way around the 8-cycle crosses each cut at most once,
        // walking all the way round crosses each cut twice
        let z = named::cycle(4);
        let cuts = enumerate_cuts(&z).unwrap();
        let mut walk = vec![0];
        let mut v = 0;
        for i in 0..8 {
            v = z.neighbor(v, i % 2);
            walk.push(v);
        }
        assert!(cuts.iter().all(|c| crossings(&z, c, &walk[..5]) <= 1));
        assert!(cuts.iter().all(|c| crossings(&z, c, &walk) == 2));
    }
}

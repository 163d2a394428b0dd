use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use super::{canonical_form, canonical_graph, default_colors, PsiGraph};
use crate::error::{Error, Result};

/// Size limits for [`enumerate_psigraphs`]. The search visits
/// `(n!)^(q-1)` labelled graphs, so both bounds matter.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationCaps {
    pub max_n: usize,
    pub max_q: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self { max_n: 6, max_q: 3 }
    }
}

/// One representative of every isomorphism class of psi-graphs with `n`
/// white vertices and `q` colors `A, B, ...`, sorted by canonical form.
///
/// White relabeling makes `sigma_A = id` free, so only the remaining
/// `q - 1` matchings are enumerated. Work is split by the choice of
/// `sigma_B`, and the result does not depend on the thread count.
pub fn enumerate_psigraphs(
    n: usize,
    q: usize,
    connected_only: bool,
    caps: EnumerationCaps,
) -> Result<Vec<PsiGraph>> {
    if n > caps.max_n || q > caps.max_q {
        return Err(Error::CapExceeded(format!(
            "census limited to n <= {}, q <= {} (asked n = {n}, q = {q})",
            caps.max_n, caps.max_q
        )));
    }
    if n == 0 || q == 0 {
        return Err(Error::InvalidGraph("census needs n >= 1 and q >= 1".into()));
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let identity: Vec<usize> = (0..n).collect();
    let colors = default_colors(q);

    let classes = |head: &Vec<usize>| -> BTreeMap<Vec<u8>, PsiGraph> {
        let mut out = BTreeMap::new();
        let tails = if q >= 3 {
            (0..q - 2).map(|_| perms.iter()).multi_cartesian_product().collect()
        } else {
            vec![Vec::new()]
        };
        for tail in tails {
            let mut sigma = vec![identity.clone()];
            if q >= 2 {
                sigma.push(head.clone());
            }
            sigma.extend(tail.into_iter().cloned());
            let z = PsiGraph::from_sigma(n, colors.clone(), sigma).expect("valid permutations");
            if connected_only && !z.is_connected() {
                continue;
            }
            out.entry(canonical_form(&z)).or_insert_with(|| canonical_graph(&z));
        }
        out
    };

    let heads: Vec<Vec<usize>> = if q >= 2 { perms.clone() } else { vec![identity.clone()] };
    let merged = heads
        .par_iter()
        .map(classes)
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });
    Ok(merged.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::super::named;
    use super::*;

    fn census(n: usize, q: usize, connected: bool) -> Vec<PsiGraph> {
        enumerate_psigraphs(n, q, connected, EnumerationCaps::default()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(census(1, 2, false).len(), 1);
        assert_eq!(census(2, 2, true), vec![canonical_graph(&named::square())]);
        assert_eq!(census(3, 2, true).len(), 1);
        assert_eq!(canonical_form(&census(3, 2, true)[0]), canonical_form(&named::cycle(3)));
    }

    #[test]
    fn two_color_census_counts_partitions() {
        // connected 2-colored graphs are single even cycles, and all graphs
        // correspond to the cycle type of sigma_B, i.e. partitions of n
        for (n, partitions) in [(1, 1), (2, 2), (3, 3), (4, 5), (5, 7)] {
            assert_eq!(census(n, 2, true).len(), 1);
            assert_eq!(census(n, 2, false).len(), partitions);
        }
    }

    #[test]
    fn census_has_no_duplicates() {
        let graphs = census(3, 3, false);
        let mut forms: Vec<_> = graphs.iter().map(canonical_form).collect();
        forms.dedup();
        assert_eq!(forms.len(), graphs.len());
    }

    #[test]
    fn caps_are_enforced() {
        assert!(enumerate_psigraphs(7, 2, true, EnumerationCaps::default()).is_err());
        assert!(enumerate_psigraphs(2, 4, true, EnumerationCaps::default()).is_err());
    }
}

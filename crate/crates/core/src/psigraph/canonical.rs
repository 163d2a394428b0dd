use std::collections::VecDeque;

use super::PsiGraph;

/// Breadth-first relabeling of the component of white vertex `anchor`.
/// Returns `(new white order, new black order)` as lists of old indices.
fn bfs_order(z: &PsiGraph, anchor: usize) -> (Vec<usize>, Vec<usize>) {
    let n = z.n();
    let mut seen = vec![false; 2 * n];
    let mut whites = Vec::new();
    let mut blacks = Vec::new();
    let mut queue = VecDeque::from([anchor]);
    seen[anchor] = true;
    whites.push(anchor);
    while let Some(v) = queue.pop_front() {
        for c in 0..z.q() {
            let u = z.neighbor(v, c);
            if !seen[u] {
                seen[u] = true;
                if u < n {
                    whites.push(u);
                } else {
                    blacks.push(u - n);
                }
                queue.push_back(u);
            }
        }
    }
    (whites, blacks)
}

/// Code of one component anchored at `anchor`: its size followed by each
/// color's matching in the relabeled indices.
fn component_code(z: &PsiGraph, anchor: usize) -> Vec<u32> {
    let (whites, blacks) = bfs_order(z, anchor);
    let mut new_black = vec![u32::MAX; z.n()];
    for (i, &b) in blacks.iter().enumerate() {
        new_black[b] = i as u32;
    }
    let mut code = vec![whites.len() as u32];
    for c in 0..z.q() {
        code.extend(whites.iter().map(|&w| new_black[z.sigma(c)[w]]));
    }
    code
}

fn best_anchor(z: &PsiGraph, whites_in_component: &[usize]) -> (Vec<u32>, usize) {
    whites_in_component
        .iter()
        .map(|&a| (component_code(z, a), a))
        .min()
        .expect("components contain a white vertex")
}

/// Isomorphism-invariant encoding. White and black vertices may be
/// relabeled freely; colors are not permuted. Two graphs have equal forms
/// exactly when they are isomorphic by an even, color-preserving map.
pub fn canonical_form(z: &PsiGraph) -> Vec<u8> {
    let mut codes: Vec<Vec<u32>> = z
        .components()
        .iter()
        .map(|comp| {
            let whites: Vec<usize> = comp.iter().copied().filter(|&v| v < z.n()).collect();
            best_anchor(z, &whites).0
        })
        .collect();
    codes.sort();
    let mut out = Vec::new();
    out.extend((z.q() as u32).to_le_bytes());
    for c in z.colors() {
        out.extend((c.len() as u32).to_le_bytes());
        out.extend(c.as_bytes());
    }
    out.extend((codes.len() as u32).to_le_bytes());
    for code in codes {
        for x in code {
            out.extend(x.to_le_bytes());
        }
    }
    out
}

/// The representative of `z`'s isomorphism class whose labels follow the
/// canonical anchoring (components ordered by their codes).
pub fn canonical_graph(z: &PsiGraph) -> PsiGraph {
    let mut parts: Vec<(Vec<u32>, usize)> = z
        .components()
        .iter()
        .map(|comp| {
            let whites: Vec<usize> = comp.iter().copied().filter(|&v| v < z.n()).collect();
            best_anchor(z, &whites)
        })
        .collect();
    parts.sort();
    let mut white_perm = vec![0; z.n()];
    let mut black_perm = vec![0; z.n()];
    let (mut wo, mut bo) = (0, 0);
    for (_, anchor) in parts {
        let (whites, blacks) = bfs_order(z, anchor);
        for w in whites {
            white_perm[w] = wo;
            wo += 1;
        }
        for b in blacks {
            black_perm[b] = bo;
            bo += 1;
        }
    }
    z.relabel(&white_perm, &black_perm)
        .expect("canonical relabeling is a permutation")
}

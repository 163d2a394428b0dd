//! Coxeter-Dynkin diagrams and finite Coxeter groups.

mod diagram;
mod group;

pub use diagram::{CDDiagram, Component, Family};
pub use group::{enumerate_group, root_system, CoxeterGroup, DEFAULT_ORDER_CAP, ROOT_ORBIT_CAP};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A parabolic subgroup `H = <K>` of `G` together with its coset structure.
///
/// Cosets are the classes `H g`, i.e. the connected components of the Cayley
/// graph of `G` after deleting every edge whose generator is not in `K`
/// (Cayley edges join `g` and `s g`). Coset ids increase with the smallest
/// element id they contain, so the subgroup itself is coset 0.
#[derive(Clone, Debug)]
pub struct SubgroupEmbedding {
    pub nodes: Vec<usize>,
    pub subgroup: CoxeterGroup,
    /// subgroup element id -> element id in `G`
    pub embed: Vec<usize>,
    /// element id in `G` -> coset id
    pub coset_of: Vec<usize>,
    /// coset id -> smallest element id of the coset
    pub representatives: Vec<usize>,
}

impl SubgroupEmbedding {
    pub fn coset_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn index(&self) -> usize {
        self.coset_count()
    }

    /// Inverse of `embed`: `G` element id -> subgroup id, if it lies in `H`.
    pub fn restrict(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.coset_of.len()];
        for (h, &g) in self.embed.iter().enumerate() {
            out[g] = Some(h);
        }
        out
    }
}

/// Parabolic subgroup generated by `nodes` (indices into `g`'s diagram).
pub fn subgroup_embedding(g: &CoxeterGroup, nodes: &[usize]) -> Result<SubgroupEmbedding> {
    let sub_diagram = g.diagram().sub_diagram(nodes)?;
    let subgroup = enumerate_group(&sub_diagram)?;

    let mut embed = vec![usize::MAX; subgroup.order()];
    embed[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(h) = queue.pop_front() {
        for (j, &a) in nodes.iter().enumerate() {
            let h2 = subgroup.left_gen(j, h);
            let g2 = g.left_gen(a, embed[h]);
            if embed[h2] == usize::MAX {
                embed[h2] = g2;
                queue.push_back(h2);
            } else if embed[h2] != g2 {
                return Err(Error::InvalidSubgroup(
                    "parabolic subgroup does not embed consistently".into(),
                ));
            }
        }
    }

    let mut coset_of = vec![usize::MAX; g.order()];
    let mut representatives = Vec::new();
    for start in 0..g.order() {
        if coset_of[start] != usize::MAX {
            continue;
        }
        let id = representatives.len();
        representatives.push(start);
        coset_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &a in nodes {
                let y = g.left_gen(a, x);
                if coset_of[y] == usize::MAX {
                    coset_of[y] = id;
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(SubgroupEmbedding {
        nodes: nodes.to_vec(),
        subgroup,
        embed,
        coset_of,
        representatives,
    })
}

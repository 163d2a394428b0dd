use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Irreducible finite Coxeter family of a connected diagram component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    A(usize),
    B(usize),
    D(usize),
    /// Dihedral group of order `2m`. Rank-2 components with `m = 3` and
    /// `m = 4` are reported as `A(2)` and `B(2)` instead.
    I2(u32),
    H3,
    H4,
    F4,
    E6,
    E7,
    E8,
}

impl Family {
    pub fn rank(&self) -> usize {
        match *self {
            Family::A(n) | Family::B(n) | Family::D(n) => n,
            Family::I2(_) => 2,
            Family::H3 => 3,
            Family::H4 | Family::F4 => 4,
            Family::E6 => 6,
            Family::E7 => 7,
            Family::E8 => 8,
        }
    }

    /// Group order, computed from the closed-form formula of each family.
    pub fn group_order(&self) -> u128 {
        fn fact(n: usize) -> u128 {
            (1..=n as u128).product()
        }
        match *self {
            Family::A(n) => fact(n + 1),
            Family::B(n) => (1u128 << n) * fact(n),
            Family::D(n) => (1u128 << (n - 1)) * fact(n),
            Family::I2(m) => 2 * m as u128,
            Family::H3 => 120,
            Family::H4 => 14_400,
            Family::F4 => 1_152,
            Family::E6 => 51_840,
            Family::E7 => 2_903_040,
            Family::E8 => 696_729_600,
        }
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(
            self,
            Family::H3 | Family::H4 | Family::F4 | Family::E6 | Family::E7 | Family::E8
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A(n) => write!(f, "A{n}"),
            Family::B(n) => write!(f, "B{n}"),
            Family::D(n) => write!(f, "D{n}"),
            Family::I2(m) => write!(f, "I{m}"),
            Family::H3 => f.write_str("H3"),
            Family::H4 => f.write_str("H4"),
            Family::F4 => f.write_str("F4"),
            Family::E6 => f.write_str("E6"),
            Family::E7 => f.write_str("E7"),
            Family::E8 => f.write_str("E8"),
        }
    }
}

/// A connected component of a diagram.
///
/// `nodes` is listed in the family's standard order:
/// * `A_n`, `F_4`: the path, starting from the end with the smaller index;
/// * `B_n`: the path, ending at the node of the 4-labeled end edge;
/// * `H_3`, `H_4`: the path, starting at the end of the 5-labeled edge;
/// * `D_n`: the long arm from its far end, the branch node, then the two
///   short leaves;
/// * `E_n`: the length-2 arm from its far end, the branch node, the longest
///   arm outwards, then the length-1 leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub family: Family,
}

/// A validated Coxeter-Dynkin diagram of a finite Coxeter group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CDDiagram {
    nodes: Vec<String>,
    matrix: Vec<Vec<u32>>,
    components: Vec<Component>,
}

impl CDDiagram {
    /// Parses a `+`-separated list of family tokens such as `"A3+B2+I5"`.
    /// Nodes are labeled `g0`, `g1`, ... in token order.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut blocks: Vec<Vec<Vec<u32>>> = Vec::new();
        for raw in spec.split('+') {
            let token = raw.trim();
            if token.is_empty() {
                return Err(Error::InvalidDiagram(format!("empty token in {spec:?}")));
            }
            blocks.push(token_matrix(token)?);
        }
        let rank: usize = blocks.iter().map(Vec::len).sum();
        let mut matrix = vec![vec![2u32; rank]; rank];
        let mut offset = 0;
        for block in &blocks {
            for (i, row) in block.iter().enumerate() {
                for (j, &m) in row.iter().enumerate() {
                    matrix[offset + i][offset + j] = m;
                }
            }
            offset += block.len();
        }
        let labels = (0..rank).map(|i| format!("g{i}")).collect();
        Self::from_matrix(labels, matrix)
    }

    /// Builds a diagram from node labels and a Coxeter matrix, rejecting
    /// anything that is not a disjoint sum of finite-type diagrams.
    pub fn from_matrix(nodes: Vec<String>, matrix: Vec<Vec<u32>>) -> Result<Self> {
        let q = nodes.len();
        if matrix.len() != q || matrix.iter().any(|r| r.len() != q) {
            return Err(Error::InvalidDiagram(format!(
                "matrix shape does not match {q} nodes"
            )));
        }
        for i in 0..q {
            if matrix[i][i] != 1 {
                return Err(Error::InvalidDiagram(format!("m[{i}][{i}] must be 1")));
            }
            for j in 0..q {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidDiagram("matrix is not symmetric".into()));
                }
                if i != j && matrix[i][j] < 2 {
                    return Err(Error::InvalidDiagram(format!("m[{i}][{j}] must be >= 2")));
                }
            }
        }
        for (i, a) in nodes.iter().enumerate() {
            if nodes[..i].contains(a) {
                return Err(Error::InvalidDiagram(format!("duplicate node label {a:?}")));
            }
        }
        let mut components = Vec::new();
        let mut seen = vec![false; q];
        for start in 0..q {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for v in 0..q {
                    if !seen[v] && matrix[u][v] >= 3 {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(classify(&comp, &matrix)?);
        }
        Ok(Self {
            nodes,
            matrix,
            components,
        })
    }

    pub fn rank(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == label)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn m(&self, i: usize, j: usize) -> u32 {
        self.matrix[i][j]
    }

    /// The Coxeter matrix: 1 on the diagonal, 3 for an unlabeled edge,
    /// the label for a labeled edge and 2 for non-adjacent nodes.
    pub fn coxeter_matrix(&self) -> Vec<Vec<u32>> {
        self.matrix.clone()
    }

    /// Diagram edges `(i, j, m_ij)` with `i < j` and `m_ij >= 3`.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                if self.matrix[i][j] >= 3 {
                    out.push((i, j, self.matrix[i][j]));
                }
            }
        }
        out
    }

    /// The diagram induced on `subset` (labels preserved, order as given).
    pub fn sub_diagram(&self, subset: &[usize]) -> Result<Self> {
        for (i, &a) in subset.iter().enumerate() {
            if a >= self.rank() || subset[..i].contains(&a) {
                return Err(Error::InvalidSubgroup(format!("bad node subset {subset:?}")));
            }
        }
        let labels = subset.iter().map(|&i| self.nodes[i].clone()).collect();
        let matrix = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.matrix[i][j]).collect())
            .collect();
        Self::from_matrix(labels, matrix)
    }

    /// Disjoint sum; nodes of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let q1 = self.rank();
        let q = q1 + other.rank();
        let mut matrix = vec![vec![2u32; q]; q];
        for i in 0..q {
            for j in 0..q {
                matrix[i][j] = match (i < q1, j < q1) {
                    (true, true) => self.matrix[i][j],
                    (false, false) => other.matrix[i - q1][j - q1],
                    _ => 2,
                };
            }
        }
        let mut labels: Vec<String> = self.nodes.iter().chain(&other.nodes).cloned().collect();
        let clash = labels
            .iter()
            .enumerate()
            .any(|(i, l)| labels[..i].contains(l));
        if clash {
            labels = (0..q).map(|i| format!("g{i}")).collect();
        }
        Self::from_matrix(labels, matrix)
    }

    /// Component containing `node`.
    pub fn component_of(&self, node: usize) -> &Component {
        self.components
            .iter()
            .find(|c| c.nodes.contains(&node))
            .expect("every node lies in a component")
    }
}

impl fmt::Display for CDDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("trivial");
        }
        let parts: Vec<String> = self.components.iter().map(|c| c.family.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for CDDiagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn token_matrix(token: &str) -> Result<Vec<Vec<u32>>> {
    let bad = || Error::InvalidDiagram(format!("malformed token {token:?}"));
    let mut chars = token.chars();
    let family = chars.next().ok_or_else(bad)?;
    let digits = chars.as_str();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: usize = digits.parse().map_err(|_| bad())?;
    let out_of_range = |what: &str| Error::InvalidDiagram(format!("{token}: {what}"));
    let path = |n: usize| {
        let mut m = vec![vec![2u32; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for i in 1..n {
            m[i - 1][i] = 3;
            m[i][i - 1] = 3;
        }
        m
    };
    let set = |m: &mut Vec<Vec<u32>>, i: usize, j: usize, v: u32| {
        m[i][j] = v;
        m[j][i] = v;
    };
    let branch = |n: usize, at: usize| {
        // path 0..n-2 plus node n-1 attached to `at`
        let mut m = path(n - 1);
        for row in m.iter_mut() {
            row.push(2);
        }
        m.push(vec![2; n]);
        m[n - 1][n - 1] = 1;
        m[at][n - 1] = 3;
        m[n - 1][at] = 3;
        m
    };
    match family {
        'A' => {
            if n < 1 {
                return Err(out_of_range("A_n needs n >= 1"));
            }
            Ok(path(n))
        }
        'B' => {
            if n < 2 {
                return Err(out_of_range("B_n needs n >= 2"));
            }
            let mut m = path(n);
            set(&mut m, n - 2, n - 1, 4);
            Ok(m)
        }
        'D' => {
            if n < 4 {
                return Err(out_of_range("D_n needs n >= 4 (write A1+A1 or A3)"));
            }
            Ok(branch(n, n - 3))
        }
        'I' => {
            if n < 2 {
                return Err(out_of_range("I_2(m) needs m >= 2"));
            }
            let mut m = vec![vec![1, 2], vec![2, 1]];
            set(&mut m, 0, 1, n as u32);
            Ok(m)
        }
        'H' => match n {
            3 | 4 => {
                let mut m = path(n);
                set(&mut m, 0, 1, 5);
                Ok(m)
            }
            _ => Err(out_of_range("H_n exists for n = 3, 4")),
        },
        'F' => match n {
            4 => {
                let mut m = path(4);
                set(&mut m, 1, 2, 4);
                Ok(m)
            }
            _ => Err(out_of_range("F_n exists for n = 4")),
        },
        'E' => match n {
            6..=8 => Ok(branch(n, 2)),
            _ => Err(out_of_range("E_n exists for n = 6, 7, 8")),
        },
        _ => Err(Error::InvalidDiagram(format!("unknown family in {token:?}"))),
    }
}

fn classify(comp: &[usize], m: &[Vec<u32>]) -> Result<Component> {
    let reject = |why: &str| {
        Err(Error::InvalidDiagram(format!(
            "component {comp:?} is not of finite type: {why}"
        )))
    };
    let k = comp.len();
    if k == 1 {
        return Ok(Component {
            nodes: comp.to_vec(),
            family: Family::A(1),
        });
    }
    if k == 2 {
        let family = match m[comp[0]][comp[1]] {
            3 => Family::A(2),
            4 => Family::B(2),
            x => Family::I2(x),
        };
        return Ok(Component {
            nodes: comp.to_vec(),
            family,
        });
    }
    let nbrs = |u: usize| -> Vec<usize> {
        comp.iter().copied().filter(|&v| v != u && m[u][v] >= 3).collect()
    };
    let edge_count: usize = comp.iter().map(|&u| nbrs(u).len()).sum::<usize>() / 2;
    if edge_count != k - 1 {
        return reject("diagram contains a cycle");
    }
    let labeled: Vec<(usize, usize, u32)> = comp
        .iter()
        .flat_map(|&u| nbrs(u).into_iter().map(move |v| (u, v)))
        .filter(|&(u, v)| u < v && m[u][v] > 3)
        .map(|(u, v)| (u, v, m[u][v]))
        .collect();
    let max_deg = comp.iter().map(|&u| nbrs(u).len()).max().unwrap_or(0);
    // walk a path from `start`, never stepping back to `prev`
    let walk = |start: usize, prev: Option<usize>| -> Vec<usize> {
        let mut out = vec![start];
        let mut prev = prev;
        let mut cur = start;
        loop {
            let next: Vec<usize> = nbrs(cur).into_iter().filter(|&v| Some(v) != prev).collect();
            if next.len() != 1 {
                break;
            }
            prev = Some(cur);
            cur = next[0];
            out.push(cur);
        }
        out
    };
    if max_deg <= 2 {
        let ends: Vec<usize> = comp.iter().copied().filter(|&u| nbrs(u).len() == 1).collect();
        let from_low = walk(ends[0], None);
        let is_end = |u: usize, v: usize| {
            let (a, b) = (from_low[0], from_low[1]);
            let (y, z) = (from_low[k - 2], from_low[k - 1]);
            (u == a && v == b) || (u == b && v == a) || (u == y && v == z) || (u == z && v == y)
        };
        return match labeled.as_slice() {
            [] => Ok(Component {
                nodes: from_low,
                family: Family::A(k),
            }),
            [(u, v, 4)] => {
                if is_end(*u, *v) {
                    let mut nodes = from_low.clone();
                    if nodes[0] == *u || nodes[0] == *v {
                        nodes.reverse();
                    }
                    Ok(Component {
                        nodes,
                        family: Family::B(k),
                    })
                } else if k == 4 {
                    Ok(Component {
                        nodes: from_low,
                        family: Family::F4,
                    })
                } else {
                    reject("interior 4-labeled edge")
                }
            }
            [(u, v, 5)] if is_end(*u, *v) && (k == 3 || k == 4) => {
                let mut nodes = from_low.clone();
                if nodes[0] != *u && nodes[0] != *v {
                    nodes.reverse();
                }
                Ok(Component {
                    nodes,
                    family: if k == 3 { Family::H3 } else { Family::H4 },
                })
            }
            _ => reject("unsupported edge labels"),
        };
    }
    if !labeled.is_empty() {
        return reject("labeled edge in a branched diagram");
    }
    let branch: Vec<usize> = comp.iter().copied().filter(|&u| nbrs(u).len() >= 3).collect();
    if branch.len() != 1 || nbrs(branch[0]).len() != 3 {
        return reject("more than one branch point");
    }
    let center = branch[0];
    let mut arms: Vec<Vec<usize>> = nbrs(center)
        .into_iter()
        .map(|v| walk(v, Some(center)))
        .collect();
    arms.sort_by_key(|a| (a.len(), a.iter().min().copied()));
    let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
    let far_to_center = |a: &Vec<usize>| a.iter().rev().copied().collect::<Vec<_>>();
    match lens.as_slice() {
        [1, 1, c] => {
            let mut nodes = far_to_center(&arms[2]);
            nodes.push(center);
            nodes.push(arms[0][0]);
            nodes.push(arms[1][0]);
            if *c == 1 {
                // D4: every arm has length one; the smallest leaf plays the long arm
                let mut leaves = [arms[0][0], arms[1][0], arms[2][0]];
                leaves.sort_unstable();
                nodes = vec![leaves[0], center, leaves[1], leaves[2]];
            }
            Ok(Component {
                nodes,
                family: Family::D(k),
            })
        }
        [1, 2, c @ 2..=4] => {
            let mut nodes = far_to_center(&arms[1]);
            nodes.push(center);
            nodes.extend(arms[2].iter().copied());
            nodes.push(arms[0][0]);
            let family = match c {
                2 => Family::E6,
                3 => Family::E7,
                _ => Family::E8,
            };
            Ok(Component { nodes, family })
        }
        _ => reject("branch arms do not match D or E"),
    }
}

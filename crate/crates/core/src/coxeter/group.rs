use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

use super::diagram::CDDiagram;
use crate::error::{Error, Result};

/// Default cap on enumerated group orders.
pub const DEFAULT_ORDER_CAP: usize = 1_000_000;
/// Hard cap on the size of a root orbit.
pub const ROOT_ORBIT_CAP: usize = 1_000_000;
const ROOT_TOL: f64 = 1e-9;

/// Simple roots of the geometric representation, as rows of the Cholesky
/// factor of the bilinear form `B_ij = -cos(pi / m_ij)`.
fn simple_roots(d: &CDDiagram) -> Result<Vec<Vec<f64>>> {
    let q = d.rank();
    let form = |i: usize, j: usize| -> f64 {
        match d.m(i, j) {
            1 => 1.0,
            2 => 0.0,
            m => -(PI / m as f64).cos(),
        }
    };
    let mut l = vec![vec![0.0; q]; q];
    for i in 0..q {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let diag = form(i, i) - s;
                if diag <= 1e-12 {
                    return Err(Error::InvalidDiagram(
                        "bilinear form is not positive definite".into(),
                    ));
                }
                l[i][i] = diag.sqrt();
            } else {
                l[i][j] = (form(i, j) - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reflection of `v` in the hyperplane orthogonal to the unit vector `root`.
fn reflect(v: &[f64], root: &[f64]) -> Vec<f64> {
    let c = 2.0 * dot(v, root);
    v.iter().zip(root).map(|(x, r)| x - c * r).collect()
}

struct RootIndex {
    map: HashMap<Vec<i64>, usize>,
}

impl RootIndex {
    fn key(v: &[f64]) -> Vec<i64> {
        v.iter().map(|x| (x * 1e6).round() as i64).collect()
    }
    fn get(&self, v: &[f64], roots: &[Vec<f64>]) -> Option<usize> {
        let idx = *self.map.get(&Self::key(v))?;
        let close = roots[idx].iter().zip(v).all(|(a, b)| (a - b).abs() <= ROOT_TOL);
        close.then_some(idx)
    }
}

/// Closed orbit of the simple roots under the simple reflections. The first
/// `rank` vectors are the simple roots themselves.
pub fn root_system(d: &CDDiagram) -> Result<Vec<Vec<f64>>> {
    Ok(build_roots(d)?.0)
}

fn build_roots(d: &CDDiagram) -> Result<(Vec<Vec<f64>>, RootIndex)> {
    let simple = simple_roots(d)?;
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut index = RootIndex {
        map: HashMap::new(),
    };
    let mut queue = VecDeque::new();
    for r in &simple {
        if index.get(r, &roots).is_none() {
            index.map.insert(RootIndex::key(r), roots.len());
            queue.push_back(roots.len());
            roots.push(r.clone());
        }
    }
    while let Some(i) = queue.pop_front() {
        for s in &simple {
            let image = reflect(&roots[i], s);
            if index.get(&image, &roots).is_none() {
                if roots.len() >= ROOT_ORBIT_CAP {
                    return Err(Error::RootOrbitTooLarge {
                        cap: ROOT_ORBIT_CAP,
                    });
                }
                index.map.insert(RootIndex::key(&image), roots.len());
                queue.push_back(roots.len());
                roots.push(image);
            }
        }
    }
    Ok((roots, index))
}

/// A fully enumerated finite Coxeter group.
///
/// Elements are stored as permutations of the root system. Identity has id 0
/// and ids follow breadth-first order of left multiplication by generators
/// taken in node order.
#[derive(Clone, Debug)]
pub struct CoxeterGroup {
    diagram: CDDiagram,
    roots: Vec<Vec<f64>>,
    /// element-major, `order * roots.len()` entries
    perms: Vec<u32>,
    index: HashMap<Vec<u32>, u32>,
    generator_action: Vec<Vec<u32>>,
    length: Vec<u32>,
    reflections: Vec<usize>,
    is_reflection: Vec<bool>,
}

/// Enumerates the group of a diagram with the default order cap.
pub fn enumerate_group(d: &CDDiagram) -> Result<CoxeterGroup> {
    CoxeterGroup::enumerate(d, DEFAULT_ORDER_CAP)
}

impl CoxeterGroup {
    pub fn enumerate(d: &CDDiagram, cap: usize) -> Result<Self> {
        let q = d.rank();
        for c in d.components() {
            if c.family.group_order() > cap as u128 {
                return Err(Error::GroupTooLarge { cap });
            }
        }
        let (roots, root_index) = build_roots(d)?;
        let nr = roots.len();
        let gen_perm: Vec<Vec<u32>> = (0..q)
            .map(|a| {
                roots
                    .iter()
                    .map(|r| {
                        let img = reflect(r, &roots[a]);
                        root_index
                            .get(&img, &roots)
                            .expect("root system is closed under simple reflections")
                            as u32
                    })
                    .collect()
            })
            .collect();

        let mut perms: Vec<u32> = (0..nr as u32).collect();
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        index.insert(perms[..q].to_vec(), 0);
        let mut length = vec![0u32];
        let mut generator_action: Vec<Vec<u32>> = vec![Vec::new(); q];
        let mut head = 0usize;
        while head < length.len() {
            let g = head;
            head += 1;
            for a in 0..q {
                let base = g * nr;
                let img: Vec<u32> = (0..nr)
                    .map(|r| gen_perm[a][perms[base + r] as usize])
                    .collect();
                let key = img[..q].to_vec();
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = length.len() as u32;
                        if id as usize >= cap {
                            return Err(Error::GroupTooLarge { cap });
                        }
                        index.insert(key, id);
                        perms.extend_from_slice(&img);
                        length.push(length[g] + 1);
                        id
                    }
                };
                generator_action[a].push(id);
            }
        }
        let order = length.len();

        let mut group = Self {
            diagram: d.clone(),
            roots,
            perms,
            index,
            generator_action,
            length,
            reflections: Vec::new(),
            is_reflection: vec![false; order],
        };
        let mut refl = BTreeSet::new();
        for beta in &group.roots {
            let key: Vec<u32> = (0..q)
                .map(|j| {
                    let img = reflect(&group.roots[j], beta);
                    root_index.get(&img, &group.roots).expect("reflection permutes roots") as u32
                })
                .collect();
            refl.insert(group.index[&key] as usize);
        }
        group.reflections = refl.into_iter().collect();
        for &t in &group.reflections {
            group.is_reflection[t] = true;
        }
        Ok(group)
    }

    pub fn diagram(&self) -> &CDDiagram {
        &self.diagram
    }

    pub fn rank(&self) -> usize {
        self.diagram.rank()
    }

    pub fn order(&self) -> usize {
        self.length.len()
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Vec<f64>] {
        &self.roots
    }

    /// Id of `s_a * g`.
    pub fn left_gen(&self, a: usize, g: usize) -> usize {
        self.generator_action[a][g] as usize
    }

    /// Left multiplication by generator `a` as a permutation of element ids.
    pub fn generator_action(&self, a: usize) -> &[u32] {
        &self.generator_action[a]
    }

    pub fn generator(&self, a: usize) -> usize {
        self.left_gen(a, 0)
    }

    pub fn length(&self, g: usize) -> usize {
        self.length[g] as usize
    }

    /// Length mod 2; generators are odd.
    pub fn parity(&self, g: usize) -> u8 {
        (self.length[g] & 1) as u8
    }

    pub fn reflections(&self) -> &[usize] {
        &self.reflections
    }

    pub fn is_reflection(&self, g: usize) -> bool {
        self.is_reflection[g]
    }

    fn perm(&self, g: usize) -> &[u32] {
        let nr = self.roots.len();
        &self.perms[g * nr..(g + 1) * nr]
    }

    /// Index of the root `g(beta_r)`; the first `rank` roots are the
    /// simple roots.
    pub fn root_image(&self, g: usize, r: usize) -> usize {
        self.perm(g)[r] as usize
    }

    /// Id of the product `g * h`.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        let q = self.rank();
        let pg = self.perm(g);
        let ph = self.perm(h);
        let key: Vec<u32> = (0..q).map(|j| pg[ph[j] as usize]).collect();
        self.index[&key] as usize
    }

    pub fn inverse(&self, g: usize) -> usize {
        let q = self.rank();
        let pg = self.perm(g);
        let mut key = vec![0u32; q];
        for (r, &img) in pg.iter().enumerate() {
            if (img as usize) < q {
                key[img as usize] = r as u32;
            }
        }
        self.index[&key] as usize
    }

    /// Multiplicative order of an element, by iteration.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }
}

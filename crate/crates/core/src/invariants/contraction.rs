//! Dense tensor-network contraction with a greedy pairwise order.

use nalgebra::DMatrix;

use super::state::C64;
use crate::error::{Error, Result};

/// A dense tensor whose axes carry integer labels. A label shared by two
/// tensors of a network is summed over; a label held by one tensor stays
/// open.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub labels: Vec<usize>,
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

fn result_shape(a: (&[usize], &[usize]), b: (&[usize], &[usize])) -> (Vec<usize>, Vec<usize>, usize) {
    let mut labels = Vec::new();
    let mut dims = Vec::new();
    let mut shared = 0;
    for (l, d) in a.0.iter().zip(a.1) {
        if b.0.contains(l) {
            shared += 1;
        } else {
            labels.push(*l);
            dims.push(*d);
        }
    }
    for (l, d) in b.0.iter().zip(b.1) {
        if !a.0.contains(l) {
            labels.push(*l);
            dims.push(*d);
        }
    }
    (labels, dims, shared)
}

/// Greedy order: repeatedly contract the pair with the smallest result,
/// preferring pairs that share a label. Returns the pair sequence (the
/// second index is removed, the first replaced by the result) and the
/// largest intermediate size.
pub fn plan(shapes: &[(Vec<usize>, Vec<usize>)], cap: usize) -> Result<(Vec<(usize, usize)>, usize)> {
    let mut live: Vec<(Vec<usize>, Vec<usize>)> = shapes.to_vec();
    let mut steps = Vec::new();
    let mut peak = live.iter().map(|s| s.1.iter().product::<usize>()).max().unwrap_or(1);
    while live.len() > 1 {
        let mut best: Option<((bool, usize), usize, usize)> = None;
        for i in 0..live.len() {
            for j in i + 1..live.len() {
                let (_, dims, shared) = result_shape((&live[i].0, &live[i].1), (&live[j].0, &live[j].1));
                let size = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
                let key = (shared == 0, size);
                if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                    best = Some((key, i, j));
                }
            }
        }
        let ((_, size), i, j) = best.expect("at least two tensors");
        if size > cap {
            return Err(Error::ContractionTooLarge { entries: size, cap });
        }
        peak = peak.max(size);
        let (labels, dims, _) = result_shape((&live[i].0, &live[i].1), (&live[j].0, &live[j].1));
        live.remove(j);
        live[i] = (labels, dims);
        steps.push((i, j));
    }
    Ok((steps, peak))
}

/// Moves axes so that new axis `k` is old axis `perm[k]`.
fn permute(t: &Tensor, perm: &[usize]) -> Vec<C64> {
    let rank = t.dims.len();
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return t.data.clone();
    }
    let mut old_stride = vec![1usize; rank];
    for k in (0..rank.saturating_sub(1)).rev() {
        old_stride[k] = old_stride[k + 1] * t.dims[k + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| t.dims[p]).collect();
    let strides: Vec<usize> = perm.iter().map(|&p| old_stride[p]).collect();
    let mut out = Vec::with_capacity(t.data.len());
    let mut idx = vec![0usize; rank];
    let mut offset = 0usize;
    for _ in 0..t.data.len() {
        out.push(t.data[offset]);
        for k in (0..rank).rev() {
            idx[k] += 1;
            offset += strides[k];
            if idx[k] < new_dims[k] {
                break;
            }
            offset -= strides[k] * new_dims[k];
            idx[k] = 0;
        }
    }
    out
}

pub fn contract_pair(a: &Tensor, b: &Tensor) -> Tensor {
    let shared: Vec<usize> = a.labels.iter().copied().filter(|l| b.labels.contains(l)).collect();
    let pos = |t: &Tensor, l: usize| t.labels.iter().position(|&x| x == l).expect("label present");
    let free_a: Vec<usize> = (0..a.labels.len()).filter(|&k| !shared.contains(&a.labels[k])).collect();
    let free_b: Vec<usize> = (0..b.labels.len()).filter(|&k| !shared.contains(&b.labels[k])).collect();
    let shared_a: Vec<usize> = shared.iter().map(|&l| pos(a, l)).collect();
    let shared_b: Vec<usize> = shared.iter().map(|&l| pos(b, l)).collect();

    let perm_a: Vec<usize> = free_a.iter().chain(&shared_a).copied().collect();
    let perm_b: Vec<usize> = shared_b.iter().chain(&free_b).copied().collect();
    let rows: usize = free_a.iter().map(|&k| a.dims[k]).product();
    let inner: usize = shared_a.iter().map(|&k| a.dims[k]).product();
    let cols: usize = free_b.iter().map(|&k| b.dims[k]).product();
    let ma = DMatrix::from_row_slice(rows, inner, &permute(a, &perm_a));
    let mb = DMatrix::from_row_slice(inner, cols, &permute(b, &perm_b));
    let prod = ma * mb;
    // row-major data of prod is the column-major data of its transpose
    let data = prod.transpose().as_slice().to_vec();
    Tensor {
        labels: free_a.iter().map(|&k| a.labels[k]).chain(free_b.iter().map(|&k| b.labels[k])).collect(),
        dims: free_a.iter().map(|&k| a.dims[k]).chain(free_b.iter().map(|&k| b.dims[k])).collect(),
        data,
    }
}

/// Contracts a whole network down to one tensor of its open labels.
pub fn contract_network(mut tensors: Vec<Tensor>, cap: usize) -> Result<Tensor> {
    if tensors.is_empty() {
        return Ok(Tensor {
            labels: vec![],
            dims: vec![],
            data: vec![C64::new(1.0, 0.0)],
        });
    }
    let shapes: Vec<(Vec<usize>, Vec<usize>)> = tensors.iter().map(|t| (t.labels.clone(), t.dims.clone())).collect();
    let (steps, _) = plan(&shapes, cap)?;
    for (i, j) in steps {
        let b = tensors.remove(j);
        tensors[i] = contract_pair(&tensors[i], &b);
    }
    Ok(tensors.pop().expect("one tensor left"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(labels: &[usize], dims: &[usize], data: &[f64]) -> Tensor {
        Tensor {
            labels: labels.to_vec(),
            dims: dims.to_vec(),
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    #[test]
    fn matrix_product_and_trace() {
        // A_{ij} B_{jk}
        let a = t(&[0, 1], &[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = t(&[1, 2], &[3, 2], &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let c = contract_pair(&a, &b);
        assert_eq!(c.labels, vec![0, 2]);
        let re: Vec<f64> = c.data.iter().map(|x| x.re).collect();
        assert_eq!(re, vec![4.0, 5.0, 10.0, 11.0]);
        // trace of A B with B's output contracted back onto A's input
        let b2 = t(&[1, 0], &[3, 2], &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let s = contract_network(vec![a, b2], 100).unwrap();
        assert_eq!(s.data[0].re, 4.0 + 11.0);
    }

    #[test]
    fn permutation_reorders_axes() {
        let a = t(&[0, 1, 2], &[2, 3, 2], &(0..12).map(|x| x as f64).collect::<Vec<_>>());
        let p = permute(&a, &[2, 0, 1]);
        // new (k, i, j) = old (i, j, k)
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    assert_eq!(p[k * 6 + i * 3 + j].re, (i * 6 + j * 2 + k) as f64);
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let shapes = vec![(vec![0], vec![1000]), (vec![1], vec![1000])];
        assert!(matches!(plan(&shapes, 10_000), Err(Error::ContractionTooLarge { entries: 1_000_000, .. })));
    }
}

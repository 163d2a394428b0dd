//! Multi-invariants `Z(psi)` of a psi-graph by dense tensor contraction,
//! with the normalized value, the candidate monotone and property checks.

mod contraction;
mod state;

pub use contraction::{contract_network, contract_pair, plan, Tensor};
pub use state::{haar_unitary, StateTensor, C64};

use rayon::prelude::*;
use serde::Serialize;

use crate::cuts::{ReflectingCut, Side};
use crate::error::{Error, Result};
use crate::psigraph::PsiGraph;

/// Largest intermediate tensor the contraction may build.
pub const CONTRACTION_CAP: usize = 100_000_000;

/// `Z` is treated as real and nonnegative when its imaginary part and any
/// negative real part are below this.
pub const REAL_TOLERANCE: f64 = 1e-10;

fn check_parties(z: &PsiGraph, psi: &StateTensor) -> Result<()> {
    if psi.parties() != z.q() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} colors, state has {} parties",
            z.q(),
            psi.parties()
        )));
    }
    Ok(())
}

fn vertex_tensor(z: &PsiGraph, psi: &StateTensor, conj: &[C64], v: usize) -> Tensor {
    let labels = (0..z.q()).map(|c| z.edge_index(z.edge_at(v, c))).collect();
    let data = if z.is_white(v) {
        psi.amplitudes().to_vec()
    } else {
        conj.to_vec()
    };
    Tensor {
        labels,
        dims: psi.dims().to_vec(),
        data,
    }
}

fn network(z: &PsiGraph, psi: &StateTensor, vertices: impl Iterator<Item = usize>) -> Vec<Tensor> {
    let conj: Vec<C64> = psi.amplitudes().iter().map(|a| a.conj()).collect();
    vertices.map(|v| vertex_tensor(z, psi, &conj, v)).collect()
}

/// Largest intermediate the greedy order builds for `z` on states with
/// these party dimensions.
pub fn contraction_peak(z: &PsiGraph, dims: &[usize]) -> Result<usize> {
    let shapes: Vec<(Vec<usize>, Vec<usize>)> = (0..z.vertex_count())
        .map(|v| ((0..z.q()).map(|c| z.edge_index(z.edge_at(v, c))).collect(), dims.to_vec()))
        .collect();
    Ok(plan(&shapes, usize::MAX)?.1)
}

/// `Z(psi)`: one `psi` per white vertex, one `conj(psi)` per black vertex,
/// the `A` indices of the two ends of every `A`-edge summed together.
pub fn evaluate(z: &PsiGraph, psi: &StateTensor) -> Result<C64> {
    evaluate_with_cap(z, psi, CONTRACTION_CAP)
}

pub fn evaluate_with_cap(z: &PsiGraph, psi: &StateTensor, cap: usize) -> Result<C64> {
    check_parties(z, psi)?;
    let out = contract_network(network(z, psi, 0..z.vertex_count()), cap)?;
    Ok(out.data[0])
}

/// Evaluates many states in parallel, in input order.
pub fn evaluate_batch(z: &PsiGraph, states: &[StateTensor]) -> Vec<Result<C64>> {
    states.par_iter().map(|psi| evaluate(z, psi)).collect()
}

/// `Z^(1/n)`. In the positive regime (imaginary part and negative real
/// part below [`REAL_TOLERANCE`]) this is the real nonnegative root;
/// otherwise the principal complex root, with a warning.
pub fn principal_root(value: C64, n: usize) -> C64 {
    let scale = value.norm().max(1.0);
    if value.im.abs() <= REAL_TOLERANCE * scale && value.re >= -REAL_TOLERANCE * scale {
        return C64::new(value.re.max(0.0).powf(1.0 / n as f64), 0.0);
    }
    log::warn!("multi-invariant {value} is outside the positive regime; using the principal root");
    value.powf(1.0 / n as f64)
}

pub fn normalized_invariant(z: &PsiGraph, psi: &StateTensor) -> Result<C64> {
    Ok(principal_root(evaluate(z, psi)?, z.n()))
}

/// `1 - Re Z^(1/n)` from an already computed `Z`.
pub fn monotone_from_value(value: C64, n: usize) -> f64 {
    let root = principal_root(value, n);
    if root.im.abs() > 1e-8 {
        log::warn!("normalized invariant {root} is not real; using its real part");
    }
    1.0 - root.re
}

pub fn monotone_value(z: &PsiGraph, psi: &StateTensor) -> Result<f64> {
    Ok(monotone_from_value(evaluate(z, psi)?, z.n()))
}

/// `||T||^2` for the open tensor `T` of the cut's `R` side, the fixed
/// edges left as open indices. Equals `Z` for a reflecting cut.
pub fn half_graph_norm(z: &PsiGraph, cut: &ReflectingCut, psi: &StateTensor) -> Result<f64> {
    check_parties(z, psi)?;
    let side = cut.side_vertices(Side::R);
    let t = contract_network(network(z, psi, side.into_iter()), CONTRACTION_CAP)?;
    Ok(t.data.iter().map(|x| x.norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub abs_value: f64,
    /// `max(0, |Z| - 1)`.
    pub excess: f64,
}

pub fn check_bounded(z: &PsiGraph, psi: &StateTensor) -> Result<BoundCheck> {
    let abs_value = evaluate(z, psi)?.norm();
    Ok(BoundCheck {
        abs_value,
        excess: (abs_value - 1.0).max(0.0),
    })
}

/// `|Z(psi1 (x) psi2) - Z(psi1) Z(psi2)|`, parties merged pairwise.
pub fn check_factorization(z: &PsiGraph, psi1: &StateTensor, psi2: &StateTensor) -> Result<f64> {
    let joint = evaluate(z, &psi1.merged_product(psi2)?)?;
    Ok((joint - evaluate(z, psi1)? * evaluate(z, psi2)?).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::enumerate_cuts;
    use crate::psigraph::{canonical_form, enumerate_psigraphs, named, EnumerationCaps};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Sum over every assignment of an index to every edge.
    fn brute_force(z: &PsiGraph, psi: &StateTensor) -> C64 {
        let edges: Vec<_> = z.edges().collect();
        let dims = psi.dims();
        let strides: Vec<usize> = (0..dims.len()).map(|k| dims[k + 1..].iter().product()).collect();
        let total: usize = edges.iter().map(|e| dims[e.color]).product();
        let mut sum = C64::new(0.0, 0.0);
        let mut assign = vec![0usize; edges.len()];
        for mut x in 0..total {
            for (k, e) in edges.iter().enumerate().rev() {
                assign[k] = x % dims[e.color];
                x /= dims[e.color];
            }
            let mut term = C64::new(1.0, 0.0);
            for v in 0..z.vertex_count() {
                let flat: usize = (0..z.q()).map(|c| assign[z.edge_index(z.edge_at(v, c))] * strides[c]).sum();
                let a = psi.amplitudes()[flat];
                term *= if z.is_white(v) { a } else { a.conj() };
            }
            sum += term;
        }
        sum
    }

    /// `Tr rho_A^k` from the reduced density matrix of party 0.
    fn purity_power(psi: &StateTensor, k: u32) -> f64 {
        let d = psi.dims()[0];
        let rest = psi.amplitudes().len() / d;
        let m = DMatrix::from_row_slice(d, rest, psi.amplitudes());
        let rho = &m * m.adjoint();
        let mut p = DMatrix::<C64>::identity(d, d);
        for _ in 0..k {
            p = &p * &rho;
        }
        p.trace().re
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bell_values() {
        let bell = StateTensor::bell(2);
        let sq = evaluate(&named::square(), &bell).unwrap();
        assert!((sq - C64::new(0.5, 0.0)).norm() < 1e-12);
        let c6 = evaluate(&named::cycle(3), &bell).unwrap();
        assert!((c6 - C64::new(0.25, 0.0)).norm() < 1e-12);
        assert!((monotone_value(&named::square(), &bell).unwrap() - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        let q3 = StateTensor::bell(3);
        assert!((monotone_value(&named::square(), &q3).unwrap() - (1.0 - (1.0f64 / 3.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn single_pair_is_the_norm() {
        let mut r = rng(5);
        for q in 1..=3 {
            let psi = StateTensor::random(&vec![2; q], &mut r).unwrap();
            let v = evaluate(&named::single_pair(q), &psi).unwrap();
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_brute_force_and_reduced_density_matrices() {
        let mut r = rng(11);
        for z in [named::square(), named::cycle(3), named::cycle(4), named::hypercube(3)] {
            let dims = vec![2; z.q()];
            for _ in 0..3 {
                let psi = StateTensor::random(&dims, &mut r).unwrap();
                let a = evaluate(&z, &psi).unwrap();
                let b = brute_force(&z, &psi);
                assert!((a - b).norm() < 1e-12, "{a} vs {b}");
            }
        }
        for m in 2..=5 {
            let psi = StateTensor::random(&[3, 2], &mut r).unwrap();
            let a = evaluate(&named::cycle(m), &psi).unwrap();
            assert!((a.re - purity_power(&psi, m as u32)).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn product_states_give_one() {
        let mut r = rng(2);
        for z in [named::square(), named::cycle(5), named::hypercube(3)] {
            let psi = StateTensor::random_product(&vec![3; z.q()], &mut r).unwrap();
            assert!((evaluate(&z, &psi).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(monotone_value(&z, &psi).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn census_graphs_with_cuts_are_positive_and_match_half_graph_norms() {
        let mut r = rng(8);
        for z in enumerate_psigraphs(3, 2, true, EnumerationCaps::default())
            .unwrap()
            .into_iter()
            .chain(enumerate_psigraphs(2, 3, true, EnumerationCaps::default()).unwrap())
        {
            let cuts = enumerate_cuts(&z).unwrap();
            for _ in 0..4 {
                let psi = StateTensor::random(&vec![2; z.q()], &mut r).unwrap();
                let v = evaluate(&z, &psi).unwrap();
                assert!(v.norm() <= 1.0 + 1e-12);
                if !cuts.is_empty() {
                    assert!(v.im.abs() < 1e-10 && v.re > -1e-10);
                }
                for cut in &cuts {
                    assert!((half_graph_norm(&z, cut, &psi).unwrap() - v.re).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn relabeling_keeps_the_value() {
        let z = named::cycle(4);
        let moved = z.relabel(&[2, 0, 3, 1], &[1, 3, 0, 2]).unwrap();
        assert_eq!(canonical_form(&z), canonical_form(&moved));
        let mut r = rng(4);
        for _ in 0..20 {
            let psi = StateTensor::random(&[2, 2], &mut r).unwrap();
            assert!((evaluate(&z, &psi).unwrap() - evaluate(&moved, &psi).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn party_count_must_match() {
        let psi = StateTensor::bell(2);
        assert!(matches!(evaluate(&named::hypercube(3), &psi), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn principal_root_branches() {
        assert_eq!(principal_root(C64::new(0.25, 0.0), 2), C64::new(0.5, 0.0));
        assert_eq!(principal_root(C64::new(-1e-13, 1e-13), 2).re, 0.0);
        let r = principal_root(C64::new(-1.0, 0.0), 2);
        assert!((r - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn local_unitaries_leave_z_unchanged(seed in any::<u64>()) {
            let mut r = rng(seed);
            let z = named::hypercube(3);
            let psi = StateTensor::random(&[2, 2, 2], &mut r).unwrap();
            let mut moved = psi.clone();
            for party in 0..3 {
                moved = moved.apply_local(party, &haar_unitary(2, &mut r)).unwrap();
            }
            prop_assert!((evaluate(&z, &psi).unwrap() - evaluate(&z, &moved).unwrap()).norm() < 1e-10);
        }

        #[test]
        fn factorization_holds(seed in any::<u64>()) {
            let mut r = rng(seed);
            let z = named::cycle(3);
            let a = StateTensor::random(&[2, 2], &mut r).unwrap();
            let b = StateTensor::random(&[2, 3], &mut r).unwrap();
            prop_assert!(check_factorization(&z, &a, &b).unwrap() < 1e-10);
            prop_assert!(check_bounded(&z, &a).unwrap().excess <= 1e-12);
        }
    }
}

//! Random local operations and Monte-Carlo checks that the candidate
//! monotone does not increase on average.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::invariants::{evaluate, haar_unitary, monotone_from_value, StateTensor, C64};
use crate::psigraph::PsiGraph;

/// Branches with probability at or below this are dropped.
pub const EPSILON_DROP: f64 = 1e-12;
/// Largest `n` the Monte-Carlo driver accepts.
pub const MONTE_CARLO_MAX_N: usize = 6;

/// Local operators `E_i` on one party with `sum_i E_i^dagger E_i = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausFamily {
    pub party: usize,
    pub operators: Vec<DMatrix<C64>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRecord {
    party: usize,
    operators: Vec<MatrixRecord>,
}

impl Serialize for KrausFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRecord {
            party: self.party,
            operators: self
                .operators
                .iter()
                .map(|m| MatrixRecord {
                    re: (0..m.nrows()).map(|i| m.row(i).iter().map(|x| x.re).collect()).collect(),
                    im: (0..m.nrows()).map(|i| m.row(i).iter().map(|x| x.im).collect()).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FamilyRecord::deserialize(d)?;
        let operators = r
            .operators
            .iter()
            .map(|m| {
                let n = m.re.len();
                if m.im.len() != n || m.re.iter().chain(&m.im).any(|row| row.len() != n) {
                    return Err(serde::de::Error::custom("operators must be square with matching re/im"));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| C64::new(m.re[i][j], m.im[i][j])))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(KrausFamily { party: r.party, operators })
    }
}

impl KrausFamily {
    pub fn dimension(&self) -> usize {
        self.operators.first().map_or(0, |m| m.nrows())
    }

    /// Largest entry of `|sum_i E_i^dagger E_i - 1|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dimension();
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for e in &self.operators {
            sum += e.adjoint() * e;
        }
        (sum - DMatrix::identity(d, d)).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// The computational-basis measurement `{|k><k|}` on `party`.
    pub fn projective(d: usize, party: usize) -> Self {
        Self {
            party,
            operators: (0..d)
                .map(|k| DMatrix::from_fn(d, d, |i, j| C64::new(f64::from(u8::from(i == k && j == k)), 0.0)))
                .collect(),
        }
    }

    /// `count` operators from the first `d` columns of a Haar unitary of
    /// size `count d`, cut into stacked `d x d` blocks.
    pub fn random_with<R: Rng + ?Sized>(d: usize, count: usize, party: usize, rng: &mut R) -> Self {
        let u = haar_unitary(count * d, rng);
        Self {
            party,
            operators: (0..count).map(|i| u.view((i * d, 0), (d, d)).into_owned()).collect(),
        }
    }
}

/// Random family on party 0, seeded.
pub fn random_kraus(d: usize, count: usize, seed: u64) -> Result<KrausFamily> {
    if d == 0 || count == 0 {
        return Err(Error::InvalidState("dimension and operator count must be positive".into()));
    }
    Ok(KrausFamily::random_with(d, count, 0, &mut ChaCha8Rng::seed_from_u64(seed)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub probability: f64,
    pub state: StateTensor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub branches: Vec<Branch>,
    /// Total probability of the dropped branches.
    pub dropped_mass: f64,
}

impl Ensemble {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

/// `p_i = |E_i psi|^2` and `psi_i = E_i psi / sqrt(p_i)`. Branches with
/// `p_i <= EPSILON_DROP` are left out and their mass reported.
pub fn apply(psi: &StateTensor, family: &KrausFamily) -> Result<Ensemble> {
    if !psi.is_normalized() {
        return Err(Error::InvalidState(format!("state has squared norm {}", psi.norm_sqr())));
    }
    let mut branches = Vec::new();
    let mut dropped_mass = 0.0;
    for e in &family.operators {
        let out = psi.apply_local(family.party, e)?;
        let p = out.norm_sqr();
        if p <= EPSILON_DROP {
            dropped_mass += p;
            continue;
        }
        branches.push(Branch {
            probability: p,
            state: out.normalized()?,
        });
    }
    Ok(Ensemble { branches, dropped_mass })
}

/// `nu(psi) - sum_i p_i nu(psi_i)`.
pub fn monotonicity_gap(z: &PsiGraph, psi: &StateTensor, family: &KrausFamily) -> Result<f64> {
    let before = monotone_from_value(evaluate(z, psi)?, z.n());
    let ensemble = apply(psi, family)?;
    let mut after = 0.0;
    for b in &ensemble.branches {
        after += b.probability * monotone_from_value(evaluate(z, &b.state)?, z.n());
    }
    Ok(before - after)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub min_operators: usize,
    pub max_operators: usize,
    pub seed: u64,
}

impl MonteCarloConfig {
    pub fn new(dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            dims,
            trials,
            min_operators: 2,
            max_operators: 4,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub gap: f64,
    pub state: StateTensor,
    pub family: KrausFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub min_gap: f64,
    pub mean_gap: f64,
    pub witness: Option<Witness>,
}

/// The random state and family of one trial. Trial `t` draws from the
/// ChaCha8 stream `t` of `seed`, so trials are independent of scheduling.
pub fn trial_instance(config: &MonteCarloConfig, trial: usize) -> Result<(StateTensor, KrausFamily)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let psi = StateTensor::random(&config.dims, &mut rng)?;
    let party = rng.random_range(0..config.dims.len());
    let count = rng.random_range(config.min_operators..=config.max_operators);
    let family = KrausFamily::random_with(config.dims[party], count, party, &mut rng);
    Ok((psi, family))
}

pub fn monte_carlo_test(z: &PsiGraph, config: &MonteCarloConfig) -> Result<MonteCarloReport> {
    z.require_connected()?;
    if z.n() > MONTE_CARLO_MAX_N {
        return Err(Error::CapExceeded(format!(
            "Monte-Carlo runs take n <= {MONTE_CARLO_MAX_N}, graph has n = {}",
            z.n()
        )));
    }
    if config.dims.len() != z.q() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} colors, dims list {} parties",
            z.q(),
            config.dims.len()
        )));
    }
    if config.min_operators == 0 || config.min_operators > config.max_operators {
        return Err(Error::InvalidState("operator count range is empty".into()));
    }
    let gaps: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let (psi, family) = trial_instance(config, t)?;
            monotonicity_gap(z, &psi, &family)
        })
        .collect::<Result<_>>()?;
    let worst = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(t, &g)| (t, g));
    let witness = match worst {
        Some((trial, gap)) => {
            let (state, family) = trial_instance(config, trial)?;
            Some(Witness {
                trial,
                gap,
                state,
                family,
            })
        }
        None => None,
    };
    let mean_gap = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };
    Ok(MonteCarloReport {
        seed: config.seed,
        trials: config.trials,
        dims: config.dims.clone(),
        min_gap: worst.map_or(0.0, |w| w.1),
        mean_gap,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::monotone_value;
    use crate::psigraph::named;

    #[test]
    fn random_families_preserve_the_trace() {
        let f = random_kraus(2, 2, 42).unwrap();
        assert_eq!(f.operators.len(), 2);
        assert!(f.trace_preservation_residual() < 1e-12);
        let f = random_kraus(3, 4, 1).unwrap();
        assert!(f.trace_preservation_residual() < 1e-12);
        assert_eq!(random_kraus(2, 2, 42).unwrap(), random_kraus(2, 2, 42).unwrap());
    }

    #[test]
    fn unitary_family_keeps_the_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for z in [named::square(), named::cycle(3)] {
            let psi = StateTensor::random(&[2, 2], &mut rng).unwrap();
            let f = KrausFamily::random_with(2, 1, 1, &mut rng);
            let e = apply(&psi, &f).unwrap();
            assert_eq!(e.branches.len(), 1);
            assert!((e.branches[0].probability - 1.0).abs() < 1e-12);
            assert!(monotonicity_gap(&z, &psi, &f).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn measuring_a_bell_pair() {
        let bell = StateTensor::bell(2);
        let m = KrausFamily::projective(2, 0);
        let e = apply(&bell, &m).unwrap();
        assert_eq!(e.branches.len(), 2);
        for b in &e.branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
            assert!(monotone_value(&named::square(), &b.state).unwrap().abs() < 1e-12);
        }
        let gap = monotonicity_gap(&named::square(), &bell, &m).unwrap();
        assert!((gap - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_branches_are_reported() {
        // measuring |00> leaves the |1> branch empty
        let psi = StateTensor::product(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let e = apply(&psi, &KrausFamily::projective(2, 1)).unwrap();
        assert_eq!(e.branches.len(), 1);
        assert_eq!(e.dropped_mass, 0.0);
        assert!((e.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_ensembles_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = StateTensor::random(&[2, 3], &mut rng).unwrap();
        let f = KrausFamily::random_with(3, 3, 1, &mut rng);
        let e = apply(&psi, &f).unwrap();
        assert!((e.total_probability() + e.dropped_mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_states_stay_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let psi = StateTensor::random_product(&[2, 2, 2], &mut rng).unwrap();
        let f = KrausFamily::random_with(2, 3, 2, &mut rng);
        for b in apply(&psi, &f).unwrap().branches {
            assert!(monotone_value(&named::hypercube(3), &b.state).unwrap().abs() < 1e-12);
        }
        assert!(monotonicity_gap(&named::hypercube(3), &psi, &f).unwrap().abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_nonnegative() {
        let cfg = MonteCarloConfig::new(vec![2, 2], 200, 7);
        let a = monte_carlo_test(&named::square(), &cfg).unwrap();
        let b = monte_carlo_test(&named::square(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.min_gap >= -1e-9);
        let w = a.witness.as_ref().unwrap();
        let (psi, fam) = trial_instance(&cfg, w.trial).unwrap();
        assert_eq!(monotonicity_gap(&named::square(), &psi, &fam).unwrap(), w.gap);
    }

    #[test]
    fn monte_carlo_preconditions() {
        let cfg = MonteCarloConfig::new(vec![2, 2], 1, 0);
        assert!(monte_carlo_test(&named::cycle(7), &cfg).is_err());
        let cfg3 = MonteCarloConfig::new(vec![2, 2, 2], 1, 0);
        assert!(matches!(monte_carlo_test(&named::square(), &cfg3), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn family_json_round_trip() {
        let f = random_kraus(2, 2, 5).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["operators"][0]["re"].as_array().unwrap().len(), 2);
        let back: KrausFamily = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }

    proptest::proptest! {
        #[test]
        fn ensembles_conserve_probability(d in 2usize..=3, count in 1usize..=4, seed in 0u64..1000) {
            let family = random_kraus(d, count, seed).unwrap();
            proptest::prop_assert!(family.trace_preservation_residual() < 1e-12);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let psi = StateTensor::random(&[d, 2], &mut rng).unwrap();
            let ens = apply(&psi, &family).unwrap();
            proptest::prop_assert!((ens.total_probability() + ens.dropped_mass - 1.0).abs() < 1e-12);
            for b in &ens.branches {
                proptest::prop_assert!(b.state.is_normalized());
            }
        }
    }
}

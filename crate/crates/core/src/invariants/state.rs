use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// A pure state of `q` parties as a dense amplitude array, row-major with
/// party 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTensor {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    dims: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for StateTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRecord {
            dims: self.dims.clone(),
            re: self.amps.iter().map(|a| a.re).collect(),
            im: self.amps.iter().map(|a| a.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StateRecord::deserialize(d)?;
        if r.re.len() != r.im.len() {
            return Err(serde::de::Error::custom("re and im differ in length"));
        }
        let amps = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        StateTensor::new(r.dims, amps).map_err(serde::de::Error::custom)
    }
}

impl StateTensor {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidState(format!("bad party dimensions {dims:?}")));
        }
        let len: usize = dims.iter().product();
        if amps.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need {len} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    /// Rescaled to unit norm; errors on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a / n).collect(),
        })
    }

    /// Complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let len: usize = dims.iter().product();
        let amps = (0..len)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::new(dims.to_vec(), amps)?.normalized()
    }

    /// `|v_1> (x) ... (x) |v_q>`, normalized.
    pub fn product(factors: &[Vec<C64>]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            amps = amps.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        Self::new(dims, amps)?.normalized()
    }

    pub fn random_product<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let factors: Vec<Vec<C64>> = dims
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        Self::product(&factors)
    }

    /// `sum_i |i...i> / sqrt(d)` on `parties` parties of dimension `d`.
    pub fn ghz(parties: usize, d: usize) -> Result<Self> {
        let len = d.pow(parties as u32);
        let step: usize = (0..parties).map(|k| d.pow(k as u32)).sum();
        let mut amps = vec![C64::new(0.0, 0.0); len];
        for i in 0..d {
            amps[i * step] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        Self::new(vec![d; parties], amps)
    }

    /// Two-party maximally entangled state of local dimension `d`.
    pub fn bell(d: usize) -> Self {
        Self::ghz(2, d).expect("positive dimension")
    }

    fn stride(&self, party: usize) -> usize {
        self.dims[party + 1..].iter().product()
    }

    /// `(1 (x) ... (x) op (x) ... (x) 1) |psi>` with `op` acting on `party`.
    pub fn apply_local(&self, party: usize, op: &DMatrix<C64>) -> Result<Self> {
        let d = *self
            .dims
            .get(party)
            .ok_or_else(|| Error::DimensionMismatch(format!("no party {party}")))?;
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "party {party} has dimension {d}, operator is {}x{}",
                op.nrows(),
                op.ncols()
            )));
        }
        let stride = self.stride(party);
        let block = d * stride;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for base in (0..self.amps.len()).step_by(block) {
            for inner in 0..stride {
                for i in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..d {
                        acc += op[(i, j)] * self.amps[base + j * stride + inner];
                    }
                    out[base + i * stride + inner] = acc;
                }
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            amps: out,
        })
    }

    /// Tensor product merging party `A` of both states into one party of
    /// dimension `d1_A d2_A`, with merged index `i1 d2_A + i2`.
    pub fn merged_product(&self, other: &Self) -> Result<Self> {
        if self.parties() != other.parties() {
            return Err(Error::DimensionMismatch(format!(
                "{} parties against {}",
                self.parties(),
                other.parties()
            )));
        }
        let q = self.parties();
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a * b).collect();
        let len: usize = dims.iter().product();
        let mut amps = vec![C64::new(0.0, 0.0); len];
        let mut i1 = vec![0usize; q];
        for (x, a) in self.amps.iter().enumerate() {
            unravel(x, &self.dims, &mut i1);
            let mut i2 = vec![0usize; q];
            for (y, b) in other.amps.iter().enumerate() {
                unravel(y, &other.dims, &mut i2);
                let mut flat = 0;
                for k in 0..q {
                    flat = flat * dims[k] + i1[k] * other.dims[k] + i2[k];
                }
                amps[flat] = a * b;
            }
        }
        Self::new(dims, amps)
    }
}

pub(crate) fn unravel(mut x: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = x % dims[k];
        x /= dims[k];
    }
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) / std::f64::consts::SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let x = r[(j, j)];
        let phase = if x.norm() > 0.0 { x / x.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_round_trip() {
        let psi = StateTensor::bell(2);
        let v = serde_json::to_value(&psi).unwrap();
        assert_eq!(v["dims"], serde_json::json!([2, 2]));
        assert_eq!(v["re"].as_array().unwrap().len(), 4);
        let back: StateTensor = serde_json::from_value(v).unwrap();
        assert_eq!(back, psi);
        let bad = serde_json::json!({"dims": [2, 2], "re": [1.0], "im": [0.0]});
        assert!(serde_json::from_value::<StateTensor>(bad).is_err());
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=5 {
            let u = haar_unitary(d, &mut rng);
            let id = DMatrix::<C64>::identity(d, d);
            assert!((u.adjoint() * &u - id).norm() < 1e-12);
        }
    }

    #[test]
    fn local_operator_acts_on_one_party() {
        // X on party 1 of |00> gives |01>
        let psi = StateTensor::product(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        );
        let out = psi.apply_local(1, &x).unwrap();
        assert_eq!(out.amplitudes()[1], C64::new(1.0, 0.0));
        let out = psi.apply_local(0, &x).unwrap();
        assert_eq!(out.amplitudes()[2], C64::new(1.0, 0.0));
    }

    #[test]
    fn merged_product_indexing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = StateTensor::random(&[2, 3], &mut rng).unwrap();
        let b = StateTensor::random(&[2, 2], &mut rng).unwrap();
        let ab = a.merged_product(&b).unwrap();
        assert_eq!(ab.dims(), &[4, 6]);
        // amplitude of (i1, j1) (x) (i2, j2) sits at (i1*2+i2, j1*2+j2)
        let (i1, j1, i2, j2) = (1, 2, 0, 1);
        let flat = (i1 * 2 + i2) * 6 + (j1 * 2 + j2);
        assert!((ab.amplitudes()[flat] - a.amplitudes()[i1 * 3 + j1] * b.amplitudes()[i2 * 2 + j2]).norm() < 1e-15);
        assert!(ab.is_normalized());
    }
}

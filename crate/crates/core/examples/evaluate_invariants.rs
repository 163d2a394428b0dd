//! Evaluate a few multi-invariants on the Bell pair, a GHZ state and a
//! random three-qubit state.

use multinv::invariants::{evaluate, monotone_value, StateTensor};
use multinv::psigraph::named;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> multinv::Result<()> {
    let bell = StateTensor::bell(2);
    for (name, z) in [("square", named::square()), ("C6", named::cycle(3)), ("C8", named::cycle(4))] {
        println!("{name:>6} on Bell: Z = {:.6}, nu = {:.6}", evaluate(&z, &bell)?.re, monotone_value(&z, &bell)?);
    }
    let cube = named::hypercube(3);
    let ghz = StateTensor::ghz(3, 2)?;
    let random = StateTensor::random(&[2, 2, 2], &mut ChaCha8Rng::seed_from_u64(1))?;
    for (name, psi) in [("GHZ", &ghz), ("random", &random)] {
        println!("{name:>6} cube: Z = {}, nu = {:.6}", evaluate(&cube, psi)?, monotone_value(&cube, psi)?);
    }
    Ok(())
}

//! Seeded source of "generic" coefficients for linear combinations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactalg::{BiPoly, Scalar};

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "KOHN_SEED";
pub const DEFAULT_SEED: u64 = 20_260_115;

pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

#[derive(Clone, Debug)]
pub struct GenericSource {
    rng: ChaCha8Rng,
}

impl GenericSource {
    pub fn new(seed: u64) -> Self {
        GenericSource { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A nonzero integer in [-9, 9].
    pub fn coeff(&mut self) -> i64 {
        loop {
            let c = self.rng.gen_range(-9i64..=9);
            if c != 0 {
                return c;
            }
        }
    }

    /// `Σ c_i p_i` with fresh coefficients; returns the coefficients used.
    pub fn combination(&mut self, polys: &[BiPoly]) -> (BiPoly, Vec<i64>) {
        let cs: Vec<i64> = polys.iter().map(|_| self.coeff()).collect();
        let mut acc = BiPoly::zero();
        for (p, c) in polys.iter().zip(&cs) {
            acc = acc.add(&p.scale(&Scalar::int(*c)));
        }
        (acc, cs)
    }
}

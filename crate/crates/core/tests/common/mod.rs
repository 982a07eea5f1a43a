//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use kohn_core::exactalg::{rat, BiPoly, Mono, Scalar, TSeries};
use kohn_core::germs::CurveGerm;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coeff(r: &mut TestRng) -> Scalar {
    loop {
        let c = r.gen_range(-4i64..=4);
        if c != 0 {
            return Scalar::int(c);
        }
    }
}

/// Sum of `terms` random monomials with total degree in `lo..=hi`.
pub fn poly(r: &mut TestRng, lo: u32, hi: u32, terms: usize) -> BiPoly {
    let mut acc = BiPoly::zero();
    for _ in 0..terms {
        let d = r.gen_range(lo..=hi);
        let a = r.gen_range(0..=d);
        acc = acc.add(&BiPoly::monomial(coeff(r), a, d - a));
    }
    acc
}

/// Nonzero polynomial vanishing at 0.
pub fn germ(r: &mut TestRng, hi: u32) -> BiPoly {
    loop {
        let n = r.gen_range(1..=4);
        let p = poly(r, 1, hi, n);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Exact polynomial curve germ: monomial-led components with random tails,
/// occasionally an axis.
pub fn curve(r: &mut TestRng) -> CurveGerm {
    let comp = |r: &mut TestRng, lead: u32| {
        let mut c = vec![Scalar::int(0); lead as usize + 3];
        c[lead as usize] = coeff(r);
        for x in c.iter_mut().skip(lead as usize + 1) {
            if r.gen_bool(0.4) {
                *x = coeff(r);
            }
        }
        TSeries::exact(c)
    };
    match r.gen_range(0..6) {
        0 => {
            let q = r.gen_range(1..=2);
            CurveGerm::new(TSeries::zero(), comp(r, q)).unwrap()
        }
        1 => {
            let p = r.gen_range(1..=2);
            CurveGerm::new(comp(r, p), TSeries::zero()).unwrap()
        }
        _ => {
            let p = r.gen_range(1..=3);
            let q = r.gen_range(1..=3);
            CurveGerm::new(comp(r, p), comp(r, q)).unwrap()
        }
    }
}

/// (t, β(t)) or (β(t), t), with the polynomial h vanishing on it.
pub fn graph_curve(r: &mut TestRng) -> (CurveGerm, BiPoly) {
    let deg = r.gen_range(1..=3);
    let mut cs = vec![Scalar::int(0)];
    let mut h = BiPoly::zero();
    for e in 1..=deg {
        let c = if e == 1 && r.gen_bool(0.5) { Scalar::int(0) } else { coeff(r) };
        h = h.add(&BiPoly::monomial(c.clone(), e, 0));
        cs.push(c);
    }
    let beta = TSeries::exact(cs);
    let t = TSeries::monomial(Scalar::int(1), 1);
    // h = β(z) − w vanishes on (t, β(t)).
    let h = h.sub(&BiPoly::w());
    if r.gen_bool(0.5) {
        (CurveGerm::new(t, beta).unwrap(), h)
    } else {
        (CurveGerm::new(beta, t).unwrap(), h.swap())
    }
}

pub fn half() -> Scalar {
    Scalar::Rat(rat(1) / rat(2))
}

pub fn mono(z: u32, w: u32) -> Mono {
    Mono::new(z, w)
}

//! Ideal membership in the local ring through a standard basis of
//! I + m^{D+1}, computed in the Artinian quotient O/m^{D+1}.
//!
//! Leading terms follow the local degree order: lowest total degree first,
//! ties broken by graded lex with z > w. In the truncated ring this order is
//! a well order on the finitely many surviving monomials, so reduction
//! terminates without the écart bookkeeping a full Mora algorithm needs; the
//! écart is still used to pick among reducers.
//!
//! The basis is `certified` when every monomial of degree D is a leading
//! monomial multiple. Then m^D ⊂ I + m^{D+1}, hence m^D ⊂ I by Nakayama,
//! and membership modulo m^{D+1} is membership in I.

use std::cmp::Reverse;
use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::exactalg::{BiPoly, Coeff, Mono, Scalar};

type Key = (u32, Reverse<u32>);
type LPoly = BTreeMap<Key, Scalar>;

const STEP_CAP: usize = 2_000_000;

fn key(m: &Mono) -> Key {
    (m.deg(), Reverse(m.z))
}

fn mono(k: &Key) -> Mono {
    Mono::new(k.1 .0, k.0 - k.1 .0)
}

fn to_local(p: &BiPoly, top: u32) -> LPoly {
    p.terms().filter(|(m, _)| m.deg() < top).map(|(m, c)| (key(m), c.clone())).collect()
}

fn to_bipoly(p: &LPoly) -> BiPoly {
    BiPoly::from_terms(p.iter().map(|(k, c)| (mono(k), c.clone())), None)
}

fn lead(p: &LPoly) -> Option<(Mono, Scalar)> {
    p.iter().next().map(|(k, c)| (mono(k), c.clone()))
}

fn ecart(p: &LPoly) -> u32 {
    match (p.keys().next(), p.keys().next_back()) {
        (Some(a), Some(b)) => b.0 - a.0,
        _ => 0,
    }
}

fn make_monic(p: &mut LPoly) {
    if let Some((_, c)) = lead(p) {
        let inv = c.finv();
        for v in p.values_mut() {
            *v = v.fmul(&inv);
        }
    }
}

/// p − c·m·q, dropping terms of degree ≥ top.
fn sub_multiple(p: &mut LPoly, c: &Scalar, m: &Mono, q: &LPoly, top: u32) {
    for (k, qc) in q {
        let t = mono(k).mul(m);
        if t.deg() >= top {
            continue;
        }
        let kk = key(&t);
        let e = p.entry(kk).or_insert_with(Scalar::zero);
        *e = e.fsub(&c.fmul(qc));
        if e.is_zero_c() {
            p.remove(&kk);
        }
    }
}

fn shifted(q: &LPoly, m: &Mono, top: u32) -> LPoly {
    q.iter()
        .filter_map(|(k, c)| {
            let t = mono(k).mul(m);
            (t.deg() < top).then(|| (key(&t), c.clone()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalBasis {
    pub generators: Vec<BiPoly>,
    pub basis: Vec<BiPoly>,
    /// D: the basis is a standard basis of I + m^{D+1}.
    pub complete_to_degree: u32,
    pub certified: bool,
    lpolys: Vec<LPoly>,
}

struct Reducer<'a> {
    polys: &'a [LPoly],
    top: u32,
    steps: usize,
}

impl Reducer<'_> {
    /// Reduces until the leading term is not divisible by any basis leader.
    fn reduce_lead(&mut self, mut p: LPoly) -> Result<LPoly> {
        while let Some((lm, lc)) = lead(&p) {
            let mut best: Option<(u32, usize)> = None;
            for (i, q) in self.polys.iter().enumerate() {
                let (qm, _) = lead(q).expect("basis elements are nonzero");
                if qm.divides(&lm) {
                    let e = ecart(q);
                    if best.is_none_or(|(be, _)| e < be) {
                        best = Some((e, i));
                    }
                }
            }
            let Some((_, i)) = best else { return Ok(p) };
            let q = &self.polys[i];
            let (qm, qc) = lead(q).unwrap();
            sub_multiple(&mut p, &lc.fdiv(&qc), &lm.div(&qm), q, self.top);
            self.steps += 1;
            if self.steps > STEP_CAP {
                return Err(Error::Unsupported(format!("standard basis reduction exceeded {STEP_CAP} steps")));
            }
        }
        Ok(p)
    }

    fn reduce_full(&mut self, p: LPoly) -> Result<LPoly> {
        let mut p = self.reduce_lead(p)?;
        let mut out = LPoly::new();
        while let Some((lm, lc)) = lead(&p) {
            out.insert(key(&lm), lc);
            p.remove(&key(&lm));
            p = self.reduce_lead(p)?;
        }
        Ok(out)
    }
}

/// Standard basis of (gens) + m^{D+1}.
pub fn local_basis(gens: &[BiPoly], d: u32) -> Result<LocalBasis> {
    let top = d + 1;
    for g in gens {
        if let Some(n) = g.truncation() {
            if n < top {
                return Err(Error::precision(format!("generator known only below degree {n}, need {top}")));
            }
        }
    }
    let mut polys: Vec<LPoly> = Vec::new();
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    let mut steps = 0usize;
    let mut pending: VecDeque<LPoly> = gens.iter().map(|g| to_local(g, top)).collect();
    loop {
        while let Some(p) = pending.pop_front() {
            let mut r = Reducer { polys: &polys, top, steps };
            let mut p = r.reduce_lead(p)?;
            steps = r.steps;
            if p.is_empty() {
                continue;
            }
            make_monic(&mut p);
            let n = polys.len();
            polys.push(p);
            for i in 0..n {
                pairs.push_back((i, n));
            }
        }
        let Some((i, j)) = pairs.pop_front() else { break };
        let (mi, _) = lead(&polys[i]).unwrap();
        let (mj, _) = lead(&polys[j]).unwrap();
        let l = mi.lcm(&mj);
        if l.deg() >= top {
            continue;
        }
        let mut s = shifted(&polys[i], &l.div(&mi), top);
        sub_multiple(&mut s, &Scalar::int(1), &l.div(&mj), &polys[j], top);
        pending.push_back(s);
    }

    // Minimal, tail-reduced basis in insertion order.
    let leads: Vec<Mono> = polys.iter().map(|p| lead(p).unwrap().0).collect();
    let keep: Vec<usize> = (0..polys.len())
        .filter(|&i| !(0..polys.len()).any(|j| j != i && leads[j].divides(&leads[i]) && (leads[j] != leads[i] || j < i)))
        .collect();
    let minimal: Vec<LPoly> = keep.iter().map(|&i| polys[i].clone()).collect();
    let mut reduced = Vec::with_capacity(minimal.len());
    for (i, p) in minimal.iter().enumerate() {
        let (lm, lc) = lead(p).unwrap();
        let mut tail = p.clone();
        tail.remove(&key(&lm));
        let others: Vec<LPoly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
        let mut r = Reducer { polys: &others, top, steps };
        let mut t = r.reduce_full(tail)?;
        steps = r.steps;
        t.insert(key(&lm), lc);
        make_monic(&mut t);
        reduced.push(t);
    }
    let certified = (0..=d).all(|a| {
        let m = Mono::new(a, d - a);
        reduced.iter().any(|p| lead(p).unwrap().0.divides(&m))
    });
    Ok(LocalBasis {
        generators: gens.to_vec(),
        basis: reduced.iter().map(to_bipoly).collect(),
        complete_to_degree: d,
        certified,
        lpolys: reduced,
    })
}

/// Normal form of `g` modulo the basis and m^{D+1}.
pub fn normal_form(g: &BiPoly, b: &LocalBasis) -> Result<BiPoly> {
    let top = b.complete_to_degree + 1;
    if let Some(n) = g.truncation() {
        if n < top {
            return Err(Error::precision(format!("{g} known only below degree {n}")));
        }
    }
    let mut r = Reducer { polys: &b.lpolys, top, steps: 0 };
    Ok(to_bipoly(&r.reduce_full(to_local(g, top))?))
}

/// Whether g ∈ I + m^{D+1}; this is membership in I when `b.certified`.
pub fn reduces_to_zero(g: &BiPoly, b: &LocalBasis) -> Result<bool> {
    if let Some(v) = g.low_degree() {
        if v > b.complete_to_degree {
            return Err(Error::InvalidInput(format!(
                "order {v} of {g} exceeds the degree budget {}",
                b.complete_to_degree
            )));
        }
    }
    Ok(normal_form(g, b)?.is_zero())
}

/// Number of monomials of degree ≤ D outside the leading ideal:
/// dim O/(I + m^{D+1}).
pub fn staircase(b: &LocalBasis) -> u64 {
    let leads: Vec<Mono> = b.lpolys.iter().map(|p| lead(p).unwrap().0).collect();
    let mut n = 0;
    for s in 0..=b.complete_to_degree {
        for a in 0..=s {
            let m = Mono::new(a, s - a);
            if !leads.iter().any(|l| l.divides(&m)) {
                n += 1;
            }
        }
    }
    n
}

/// Default degree budget for testing a-th powers.
pub fn default_budget(a: u64) -> u32 {
    a as u32 + 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_poly;
    use crate::invariants::colength_truncated;

    fn p(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn monomial_ideal_is_its_own_basis() {
        let b = local_basis(&[p("z^2"), p("w^3")], 10).unwrap();
        assert_eq!(b.basis, vec![p("z^2"), p("w^3")]);
        assert!(b.certified);
        assert_eq!(staircase(&b), 6);
        assert!(reduces_to_zero(&p("z^6"), &b).unwrap());
        assert!(!reduces_to_zero(&p("w"), &b).unwrap());
    }

    #[test]
    fn reduction_by_linear_generator() {
        let b = local_basis(&[p("z"), p("w^2 - z^3")], 8).unwrap();
        assert_eq!(b.basis, vec![p("z"), p("w^2")]);
        assert_eq!(staircase(&b), 2);
    }

    #[test]
    fn completion_adds_pair() {
        let b = local_basis(&[p("w^2 - z^3"), p("z*w")], 9).unwrap();
        assert!(b.basis.contains(&p("z^4")));
        assert_eq!(staircase(&b), 5);
        assert_eq!(staircase(&b), colength_truncated(&b.generators, 10).unwrap());
        assert!(b.certified);
    }

    #[test]
    fn uncertified_when_budget_too_small() {
        let b = local_basis(&[p("z^2"), p("w^7")], 4).unwrap();
        assert!(!b.certified);
        assert_eq!(staircase(&b), colength_truncated(&b.generators, 5).unwrap());
    }

    #[test]
    fn family_pair() {
        let f = p("6*z*w^2 + 2*z^11");
        let ft = p("w^4 + z^3");
        let b = local_basis(&[f, ft], 16).unwrap();
        assert!(b.certified);
        assert!(reduces_to_zero(&p("z^12"), &b).unwrap());
        assert!(reduces_to_zero(&p("w^12"), &b).unwrap());
    }
}

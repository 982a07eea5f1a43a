//! Contact orders, jet types along branch sets, the type of a germ set,
//! and the colength D(F, F̃) of a pair.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactalg::{BiPoly, Coeff, Mono, Rat, Scalar};
use crate::generic::GenericSource;
use crate::germs::{nu, nu_gamma, nu_k_gamma, order_along, ExtOrder, Germ};
use crate::puiseux::{branches, default_precision, Branch, BranchSet};

#[derive(Clone, Debug, PartialEq)]
pub struct GermSet {
    pub members: Vec<Germ>,
    pub label: String,
}

impl GermSet {
    pub fn new(polys: &[BiPoly], label: &str) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidInput("empty germ set".into()));
        }
        let members = polys.iter().enumerate().map(|(i, p)| Germ::new(p.clone(), format!("{label}{}", i + 1))).collect();
        Ok(GermSet { members, label: label.into() })
    }

    pub fn polys(&self) -> Vec<BiPoly> {
        self.members.iter().map(|g| g.poly.clone()).collect()
    }
}

/// ν(S) = min over members.
pub fn nu_set(s: &[BiPoly]) -> ExtOrder {
    s.iter().fold(ExtOrder::Infinite, |acc, f| acc.min(&nu(f)))
}

/// Contact order of `f` along `v`: the maximum of ν_γ(f) over branches.
pub fn contact_order(f: &BiPoly, v: &BranchSet) -> Result<ExtOrder> {
    if v.branches.is_empty() {
        return Err(Error::InvalidInput("contact order along an empty branch set".into()));
    }
    Ok(v.branches.iter().fold(ExtOrder::int(0), |acc, b| acc.max(&nu_gamma(f, &b.curve))))
}

/// min over members of ν^k_γ along one curve.
pub fn set_order_along(s: &[BiPoly], k: u32, b: &Branch) -> ExtOrder {
    let mut acc = ExtOrder::Infinite;
    for f in s {
        acc = acc.min(&nu_k_gamma(f, k, &b.curve));
        if acc == ExtOrder::int(0) {
            break;
        }
    }
    acc
}

/// τ^k_V(S): max over branches of min over members of ν^k_γ.
pub fn k_jet_type_along(s: &[BiPoly], k: u32, v: &BranchSet) -> Result<ExtOrder> {
    if v.branches.is_empty() {
        return Err(Error::InvalidInput("jet type along an empty branch set".into()));
    }
    Ok(v.branches.iter().fold(ExtOrder::int(0), |acc, b| acc.max(&set_order_along(s, k, b))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    CertifiedExact,
    BoundsOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeReport {
    pub lower: ExtOrder,
    pub upper: ExtOrder,
    /// Branch description and the min-member order realized on it.
    pub witnesses: Vec<(String, ExtOrder)>,
    pub exactness: Exactness,
    /// Independent upper bound max_f min_{g≠f} D(f, g), when finite.
    pub multiplicity_upper: Option<ExtOrder>,
    pub notes: Vec<String>,
}

/// Candidate curves for the type computation.
pub enum Candidates<'a> {
    /// Branches of every member plus one seeded generic combination.
    Auto { seed: u64 },
    Given(&'a BranchSet),
}

/// τ(S) = sup over curves of min over members of ν_γ.
///
/// Along the path in the valuative tree from the multiplicity valuation to
/// any curve, each ν_·(f) is nondecreasing and stays constant once the path
/// leaves the directions of f's branches. Following the member whose
/// branches the curve tracks longest to one of those branches never lowers
/// any member's order, so the supremum is attained on a branch of a member.
/// With automatic candidates the lower bound is therefore exact.
pub fn dangelo_type(s: &[BiPoly], candidates: Candidates) -> Result<TypeReport> {
    if s.is_empty() {
        return Err(Error::InvalidInput("type of an empty set".into()));
    }
    for f in s {
        if !f.constant_term().is_zero_c() {
            return Err(Error::InvalidInput(format!("member {f} does not vanish at 0")));
        }
    }
    let mut notes = Vec::new();
    let mut sets: Vec<BranchSet> = Vec::new();
    let auto = matches!(candidates, Candidates::Auto { .. });
    match candidates {
        Candidates::Given(v) => sets.push(v.clone()),
        Candidates::Auto { seed } => {
            for f in s {
                if f.is_zero() {
                    continue;
                }
                sets.push(branches(f, default_precision(f))?);
            }
            if s.len() > 1 {
                let (g, cs) = GenericSource::new(seed).combination(s);
                match branches(&g, default_precision(&g)) {
                    Ok(b) => sets.push(b),
                    Err(e) => notes.push(format!("generic combination {cs:?} skipped: {e}")),
                }
            }
        }
    }
    let mut lower = ExtOrder::int(0);
    let mut witnesses = Vec::new();
    let mut decided = true;
    for set in &sets {
        for b in &set.branches {
            let v = set_order_along(s, 0, b);
            if !matches!(v, ExtOrder::Exact(_) | ExtOrder::Infinite) {
                decided = false;
            }
            lower = lower.max(&v);
            witnesses.push((b.curve.to_string(), v));
        }
    }
    if lower.is_infinite() {
        let w = witnesses.iter().find(|(_, v)| v.is_infinite()).map(|(c, _)| c.clone()).unwrap_or_default();
        return Err(Error::InfiniteType { witness: format!("all members vanish identically along {w}") });
    }
    let multiplicity_upper = pair_upper_bound(s);
    let exact = auto && decided;
    let upper = if exact { lower.clone() } else { multiplicity_upper.clone().unwrap_or(ExtOrder::Infinite) };
    if let Some(u) = &multiplicity_upper {
        if u.lt(&lower).unwrap_or(false) {
            return Err(Error::InvariantViolation(format!("type lower bound {lower} exceeds multiplicity bound {u}")));
        }
    }
    Ok(TypeReport {
        lower,
        upper,
        witnesses,
        exactness: if exact { Exactness::CertifiedExact } else { Exactness::BoundsOnly },
        multiplicity_upper,
        notes,
    })
}

/// max over f of min over g ≠ f of D(f, g); `None` when some member has no finite partner.
fn pair_upper_bound(s: &[BiPoly]) -> Option<ExtOrder> {
    if s.len() < 2 || s.len() > 6 {
        return None;
    }
    let mut best = ExtOrder::int(0);
    for (i, f) in s.iter().enumerate() {
        let mut m = ExtOrder::Infinite;
        for (j, g) in s.iter().enumerate() {
            if i != j {
                if let Ok(d) = multiplicity(f, g, Method::BranchSum) {
                    m = m.min(&d);
                }
            }
        }
        if m.is_infinite() {
            return None;
        }
        best = best.max(&m);
    }
    Some(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    BranchSum,
    LinearAlgebra,
}

/// D(F, F̃) = dim O/(F, F̃).
pub fn multiplicity(f: &BiPoly, g: &BiPoly, method: Method) -> Result<ExtOrder> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidInput("multiplicity with a zero generator".into()));
    }
    if !f.constant_term().is_zero_c() || !g.constant_term().is_zero_c() {
        return Ok(ExtOrder::int(0));
    }
    match method {
        Method::BranchSum => branch_sum(f, g),
        Method::LinearAlgebra => linear_algebra(f, g).map(|d| ExtOrder::int(d as i64)),
    }
}

/// Runs `op` on the branches of `f` at precisions 16, 32, ... up to the
/// default, moving up only on precision errors.
fn with_branches<T>(f: &BiPoly, op: impl Fn(&BranchSet) -> Result<T>) -> Result<T> {
    let cap = default_precision(f);
    let mut prec = cap.min(16);
    loop {
        let r = branches(f, prec).and_then(|set| op(&set));
        match r {
            Err(Error::Precision(_)) if prec < cap => prec = (2 * prec).min(cap),
            r => return r,
        }
    }
}

fn branch_sum(f: &BiPoly, g: &BiPoly) -> Result<ExtOrder> {
    with_branches(f, |set| branch_sum_on(set, g))
}

fn branch_sum_on(set: &BranchSet, g: &BiPoly) -> Result<ExtOrder> {
    let mut total = ExtOrder::int(0);
    for b in &set.branches {
        let o = order_along(g, &b.curve);
        if o.is_infinite() {
            return Err(Error::CommonBranch(format!("{} vanishes along {}", g, b.curve)));
        }
        if !o.is_exact() {
            return Err(Error::precision(format!("order of {} along {} is {o}", g, b.curve)));
        }
        let w = Rat::from_integer(((b.multiplicity * b.conjugates) as i64).into());
        total = total.add(&ExtOrder::Exact(o.value().unwrap() * w));
    }
    Ok(total)
}

/// Upper limit on the degree explored by the linear-algebra oracle.
const LINALG_MAX_DEGREE: u32 = 96;

/// dim O/(F, G) via dim O/(I + m^D) at D = 1, 2, 4, ...: once the values at
/// D and D + 1 agree, m^D ⊆ I + m^{D+1}, hence m^D ⊆ I by Nakayama.
fn linear_algebra(f: &BiPoly, g: &BiPoly) -> Result<u64> {
    let gens = [f.clone(), g.clone()];
    let mut d = 1;
    while d < LINALG_MAX_DEGREE {
        let q = colength_truncated(&gens, d)?;
        if colength_truncated(&gens, d + 1)? == q {
            return Ok(q);
        }
        d *= 2;
    }
    Err(Error::CommonBranch(format!("colength of ({f}, {g}) did not stabilize below degree {LINALG_MAX_DEGREE}")))
}

/// Local order index: lower degree first, then z-heavier first.
fn mono_key(m: &Mono) -> (u32, std::cmp::Reverse<u32>) {
    (m.deg(), std::cmp::Reverse(m.z))
}

/// dim of O/(I + m^D) with I generated by `gens`.
pub fn colength_truncated(gens: &[BiPoly], d: u32) -> Result<u64> {
    for p in gens {
        if let Some(n) = p.truncation() {
            if n < d {
                return Err(Error::precision(format!("generator known only below degree {n}, need {d}")));
            }
        }
    }
    let total = (d as u64) * (d as u64 + 1) / 2;
    let rank = truncated_rank(gens, d);
    Ok(total - rank as u64)
}

type Row = BTreeMap<(u32, std::cmp::Reverse<u32>), Scalar>;

fn to_row(p: &BiPoly, d: u32) -> Row {
    p.terms().filter(|(m, _)| m.deg() < d).map(|(m, c)| (mono_key(m), c.clone())).collect()
}

/// Rank of the span of {monomial · generator} modulo m^D.
fn truncated_rank(gens: &[BiPoly], d: u32) -> usize {
    let mut pivots: BTreeMap<(u32, std::cmp::Reverse<u32>), Row> = BTreeMap::new();
    for g in gens {
        let gd = match g.low_degree() {
            Some(x) => x,
            None => continue,
        };
        if gd >= d {
            continue;
        }
        for s in 0..(d - gd) {
            for a in 0..=s {
                let m = Mono::new(a, s - a);
                let mut row = to_row(&g.mul_monomial(m), d);
                // Reduce against pivots, lowest key first.
                while let Some((k, c)) = row.iter().next().map(|(k, c)| (*k, c.clone())) {
                    match pivots.get(&k) {
                        Some(pr) => {
                            let factor = c.fdiv(&pr[&k]);
                            for (pk, pc) in pr {
                                let e = row.entry(*pk).or_insert_with(Scalar::zero);
                                *e = e.fsub(&factor.fmul(pc));
                                if e.is_zero_c() {
                                    row.remove(pk);
                                }
                            }
                        }
                        None => {
                            pivots.insert(k, row);
                            break;
                        }
                    }
                }
            }
        }
    }
    pivots.len()
}

/// The a of the power-of-maximal-ideal bound: ⌊d·t⌋ with d = ν(F) and
/// t the contact order of F̃ along {F = 0}.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerBound {
    pub d: u32,
    pub t: Rat,
    pub a: u64,
}

pub fn power_in_ideal_bound(f: &BiPoly, ft: &BiPoly) -> Result<PowerBound> {
    let d = nu(f).as_int().ok_or_else(|| Error::precision("ν(F) undecided"))? as u32;
    let t = with_branches(f, |v| {
        if v.branches.is_empty() {
            return Ok(None);
        }
        match contact_order(ft, v)? {
            ExtOrder::Exact(t) => Ok(Some(t)),
            ExtOrder::Infinite => Err(Error::CommonBranch(format!("{ft} vanishes on a branch of {f}"))),
            ExtOrder::AtLeast(q) => Err(Error::precision(format!("contact order only known to be at least {q}"))),
        }
    })?;
    let Some(t) = t else {
        // F is a unit or has no branches: the ideal is the whole ring.
        return Ok(PowerBound { d, t: Rat::from_integer(0.into()), a: 0 });
    };
    let dt = &t * Rat::from_integer((d as i64).into());
    let a = dt.floor().to_integer();
    Ok(PowerBound { d, t, a: u64::try_from(a).unwrap_or(0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_poly;

    fn p(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn types_of_example_sets() {
        for k in [3, 5, 7] {
            let s = [p(&format!("z^3 + z*w^{k}")), p("w")];
            let r = dangelo_type(&s, Candidates::Auto { seed: 1 }).unwrap();
            assert_eq!(r.lower, ExtOrder::int(3));
            assert_eq!(r.exactness, Exactness::CertifiedExact);
        }
        let r = dangelo_type(&[p("z"), p("w")], Candidates::Auto { seed: 1 }).unwrap();
        assert_eq!(r.lower, ExtOrder::int(1));
        let r = dangelo_type(&[p("z^2"), p("w^3 + z^10*w")], Candidates::Auto { seed: 1 }).unwrap();
        assert_eq!(r.lower, ExtOrder::int(3));
        assert!(matches!(dangelo_type(&[p("z^2"), p("z^2*w")], Candidates::Auto { seed: 1 }), Err(Error::InfiniteType { .. })));
    }

    #[test]
    fn multiplicities() {
        for (a, b, d) in [("z^2", "w^3", 6), ("z", "w^2 - z^3", 2), ("z^3", "w^4", 12), ("w^2 - z^3", "z*w", 5)] {
            let (f, g) = (p(a), p(b));
            assert_eq!(multiplicity(&f, &g, Method::BranchSum).unwrap(), ExtOrder::int(d), "{a},{b}");
            assert_eq!(multiplicity(&f, &g, Method::LinearAlgebra).unwrap(), ExtOrder::int(d), "{a},{b}");
        }
        assert!(matches!(multiplicity(&p("z*w"), &p("z^2"), Method::BranchSum), Err(Error::CommonBranch(_))));
    }

    #[test]
    fn contact_and_power_bound() {
        let v = branches(&p("z"), 16).unwrap();
        assert_eq!(contact_order(&p("w^4"), &v).unwrap(), ExtOrder::int(4));
        let v = branches(&p("w^2 - z^3"), 16).unwrap();
        assert_eq!(contact_order(&p("z"), &v).unwrap(), ExtOrder::int(1));
        assert_eq!(power_in_ideal_bound(&p("z^2"), &p("w^3")).unwrap().a, 6);
        assert_eq!(power_in_ideal_bound(&p("z"), &p("w")).unwrap().a, 1);
    }

    #[test]
    fn jet_type_along_axis() {
        let v = branches(&p("z"), 16).unwrap();
        assert_eq!(k_jet_type_along(&[p("6*z*w^2 + 2*z^11")], 1, &v).unwrap(), ExtOrder::int(2));
        assert_eq!(k_jet_type_along(&[p("6*z*w^2 + 2*z^11")], 3, &v).unwrap(), ExtOrder::int(0));
    }
}

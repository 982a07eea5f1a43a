//! Orders of germs: vanishing order, normalized order along a curve,
//! jets and jet vanishing orders, and curve normalization.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{compose_series, fmt_rat, rat, BiPoly, Coeff, Rat, Scalar, SeriesOrder, TSeries};

/// An order value: exact, known only from below (truncation), or infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtOrder {
    Exact(Rat),
    AtLeast(Rat),
    Infinite,
}

/// Interval end points; `None` is +∞.
fn le_bound(a: &Option<Rat>, b: &Option<Rat>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

fn lt_bound(a: &Option<Rat>, b: &Option<Rat>) -> bool {
    match (a, b) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(x), Some(y)) => x < y,
    }
}

impl ExtOrder {
    pub fn int(n: i64) -> Self {
        ExtOrder::Exact(rat(n))
    }

    pub fn at_least_int(n: i64) -> Self {
        ExtOrder::AtLeast(rat(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExtOrder::Exact(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtOrder::Infinite)
    }

    /// The exact value, if decided and finite.
    pub fn value(&self) -> Option<&Rat> {
        match self {
            ExtOrder::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// Exact value as an integer, when it is one.
    pub fn as_int(&self) -> Option<i64> {
        self.value().filter(|v| v.is_integer()).and_then(|v| i64::try_from(v.to_integer()).ok())
    }

    /// Decided finite value or an error describing what is missing.
    pub fn require_exact(&self, what: &str) -> Result<Rat> {
        match self {
            ExtOrder::Exact(v) => Ok(v.clone()),
            ExtOrder::AtLeast(q) => Err(Error::precision(format!("{what} is only known to be at least {}", fmt_rat(q)))),
            ExtOrder::Infinite => Err(Error::InvalidInput(format!("{what} is infinite"))),
        }
    }

    fn lo(&self) -> Option<Rat> {
        match self {
            ExtOrder::Exact(v) | ExtOrder::AtLeast(v) => Some(v.clone()),
            ExtOrder::Infinite => None,
        }
    }

    fn hi(&self) -> Option<Rat> {
        match self {
            ExtOrder::Exact(v) => Some(v.clone()),
            _ => None,
        }
    }

    fn undecided(&self, op: &str, o: &ExtOrder) -> Error {
        Error::precision(format!("cannot decide {self} {op} {o}"))
    }

    /// `self > o`, or a precision error when the truncation hides the answer.
    pub fn gt(&self, o: &ExtOrder) -> Result<bool> {
        // Decided true when lo(self) > hi(o); decided false when hi(self) <= lo(o).
        if lt_bound(&o.hi(), &self.lo()) && o.hi().is_some() {
            return Ok(true);
        }
        if le_bound(&self.hi(), &o.lo()) && (self.hi().is_some() || o.lo().is_none()) {
            return Ok(false);
        }
        Err(self.undecided(">", o))
    }

    /// `self >= o`.
    pub fn ge(&self, o: &ExtOrder) -> Result<bool> {
        if le_bound(&o.hi(), &self.lo()) && (o.hi().is_some() || self.lo().is_none()) {
            return Ok(true);
        }
        if lt_bound(&self.hi(), &o.lo()) {
            return Ok(false);
        }
        Err(self.undecided(">=", o))
    }

    pub fn lt(&self, o: &ExtOrder) -> Result<bool> {
        o.gt(self)
    }

    pub fn le(&self, o: &ExtOrder) -> Result<bool> {
        o.ge(self)
    }

    /// Decided equality.
    pub fn eq_decided(&self, o: &ExtOrder) -> Result<bool> {
        Ok(self.ge(o)? && o.ge(self)?)
    }

    /// Exact comparison when both sides are decided.
    pub fn cmp_decided(&self, o: &ExtOrder) -> Result<Ordering> {
        if self.gt(o)? {
            Ok(Ordering::Greater)
        } else if o.gt(self)? {
            Ok(Ordering::Less)
        } else {
            Ok(Ordering::Equal)
        }
    }

    /// Lattice minimum with exactness propagation.
    pub fn min(&self, o: &ExtOrder) -> ExtOrder {
        use ExtOrder::*;
        match (self, o) {
            (Infinite, x) | (x, Infinite) => x.clone(),
            (Exact(a), Exact(b)) => Exact(a.min(b).clone()),
            (Exact(e), AtLeast(q)) | (AtLeast(q), Exact(e)) => {
                if e <= q {
                    Exact(e.clone())
                } else {
                    AtLeast(q.clone())
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b).clone()),
        }
    }

    /// Lattice maximum with exactness propagation.
    pub fn max(&self, o: &ExtOrder) -> ExtOrder {
        use ExtOrder::*;
        match (self, o) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Exact(a), Exact(b)) => Exact(a.max(b).clone()),
            (Exact(e), AtLeast(q)) | (AtLeast(q), Exact(e)) => AtLeast(e.max(q).clone()),
            (AtLeast(a), AtLeast(b)) => AtLeast(a.max(b).clone()),
        }
    }

    pub fn add_rat(&self, r: &Rat) -> ExtOrder {
        match self {
            ExtOrder::Exact(v) => ExtOrder::Exact(v + r),
            ExtOrder::AtLeast(v) => ExtOrder::AtLeast(v + r),
            ExtOrder::Infinite => ExtOrder::Infinite,
        }
    }

    pub fn add(&self, o: &ExtOrder) -> ExtOrder {
        use ExtOrder::*;
        match (self, o) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Exact(a), Exact(b)) => Exact(a + b),
            (Exact(a), AtLeast(b)) | (AtLeast(a), Exact(b)) | (AtLeast(a), AtLeast(b)) => AtLeast(a + b),
        }
    }

    pub fn div_rat(&self, r: &Rat) -> ExtOrder {
        match self {
            ExtOrder::Exact(v) => ExtOrder::Exact(v / r),
            ExtOrder::AtLeast(v) => ExtOrder::AtLeast(v / r),
            ExtOrder::Infinite => ExtOrder::Infinite,
        }
    }

    /// `max(self - k, 0)` as used for jet orders of exact-order germs.
    pub fn sub_clamped(&self, k: u32) -> ExtOrder {
        let k = rat(k as i64);
        let clamp = |v: &Rat| if *v > k { v - &k } else { <Rat as Zero>::zero() };
        match self {
            ExtOrder::Exact(v) => ExtOrder::Exact(clamp(v)),
            ExtOrder::AtLeast(v) => ExtOrder::AtLeast(clamp(v)),
            ExtOrder::Infinite => ExtOrder::Infinite,
        }
    }
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtOrder::Exact(v) => write!(f, "{}", fmt_rat(v)),
            ExtOrder::AtLeast(v) => write!(f, ">={}", fmt_rat(v)),
            ExtOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// A germ at the origin with a provenance label.
#[derive(Clone, Debug, PartialEq)]
pub struct Germ {
    pub poly: BiPoly,
    pub label: String,
}

impl Germ {
    pub fn new(poly: BiPoly, label: impl Into<String>) -> Self {
        Germ { poly, label: label.into() }
    }
}

/// A parametrized curve germ `t -> (α(t), β(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveGerm {
    pub alpha: TSeries,
    pub beta: TSeries,
}

impl CurveGerm {
    /// Checks that both components vanish at 0 and that ν(γ) is decided.
    pub fn new(alpha: TSeries, beta: TSeries) -> Result<Self> {
        let g = CurveGerm { alpha, beta };
        for s in [&g.alpha, &g.beta] {
            if let SeriesOrder::Exact(0) = s.order() {
                return Err(Error::InvalidInput(format!("curve component {s} does not vanish at 0")));
            }
        }
        if g.alpha.is_exact_zero() && g.beta.is_exact_zero() {
            return Err(Error::InvalidInput("constant curve".into()));
        }
        if !nu_curve(&g).is_exact() {
            return Err(Error::precision(format!("order of curve {g} is not resolved")));
        }
        Ok(g)
    }

    /// The monomial curve `(c1 t^p, c2 t^q)` with exact coefficients; `None` exponent gives 0.
    pub fn monomial(p: Option<u32>, q: Option<u32>) -> Result<Self> {
        let comp = |e: Option<u32>| e.map_or_else(TSeries::zero, TSeries::t_pow);
        Self::new(comp(p), comp(q))
    }

    /// Reparametrization `t -> t^r`.
    pub fn reparametrize(&self, r: u32) -> Self {
        let one = Scalar::int(1);
        CurveGerm { alpha: self.alpha.subst_monomial(&one, r), beta: self.beta.subst_monomial(&one, r) }
    }

    pub fn is_rational(&self) -> bool {
        self.alpha.is_rational() && self.beta.is_rational()
    }

    /// Common precision of the two components.
    pub fn precision(&self) -> Option<u32> {
        match (self.alpha.precision(), self.beta.precision()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

impl fmt::Display for CurveGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// ν(f): lowest total degree of a nonzero term.
pub fn nu(f: &BiPoly) -> ExtOrder {
    match f.low_degree() {
        Some(d) => ExtOrder::int(d as i64),
        None => match f.truncation() {
            Some(n) => ExtOrder::at_least_int(n as i64),
            None => ExtOrder::Infinite,
        },
    }
}

fn series_order(s: &TSeries) -> ExtOrder {
    match s.order() {
        SeriesOrder::Exact(e) => ExtOrder::int(e as i64),
        SeriesOrder::AtLeast(n) => ExtOrder::at_least_int(n as i64),
        SeriesOrder::Zero => ExtOrder::Infinite,
    }
}

/// ν(γ) = min(ord α, ord β).
pub fn nu_curve(g: &CurveGerm) -> ExtOrder {
    series_order(&g.alpha).min(&series_order(&g.beta))
}

fn curve_order_int(g: &CurveGerm) -> u32 {
    nu_curve(g).as_int().expect("curve order decided at construction") as u32
}

/// ord(f∘γ) as a raw integer order, with an adaptive composition target.
pub fn order_along(f: &BiPoly, g: &CurveGerm) -> ExtOrder {
    if f.is_exact_zero() {
        return ExtOrder::Infinite;
    }
    let ng = curve_order_int(g).max(1);
    let base = f.low_degree().unwrap_or(0).max(1) * ng;
    for target in [Some(base * 4 + 16), Some(base * 16 + 64), None] {
        let s = compose_series(f, &g.alpha, &g.beta, target);
        match s.order() {
            SeriesOrder::Exact(e) => return ExtOrder::int(e as i64),
            SeriesOrder::Zero => return ExtOrder::Infinite,
            SeriesOrder::AtLeast(n) => {
                if target.is_some_and(|t| n >= t) {
                    continue;
                }
                return ExtOrder::at_least_int(n as i64);
            }
        }
    }
    unreachable!("uncapped composition always decides")
}

/// ν_γ(f) = ν(f∘γ)/ν(γ).
pub fn nu_gamma(f: &BiPoly, g: &CurveGerm) -> ExtOrder {
    order_along(f, g).div_rat(&rat(curve_order_int(g) as i64))
}

/// All partials ∂_z^a ∂_w^b f with a + b ≤ k, in order of (a+b, then a descending).
pub fn jet(f: &BiPoly, k: u32) -> Vec<((u32, u32), BiPoly)> {
    let mut out = Vec::new();
    for s in 0..=k {
        for a in (0..=s).rev() {
            out.push(((a, s - a), f.partial_k(a, s - a)));
        }
    }
    out
}

/// ν^k(f) = max(ν(f) − k, 0).
pub fn nu_k(f: &BiPoly, k: u32) -> ExtOrder {
    nu(f).sub_clamped(k)
}

/// ν^k(f) computed directly as the minimum of ν over the k-jet.
pub fn nu_k_direct(f: &BiPoly, k: u32) -> ExtOrder {
    jet(f, k).iter().fold(ExtOrder::Infinite, |acc, (_, p)| acc.min(&nu(p)))
}

/// ν^k_γ(f) = min over |α| ≤ k of ν_γ(∂^α f).
pub fn nu_k_gamma(f: &BiPoly, k: u32, g: &CurveGerm) -> ExtOrder {
    let mut acc = ExtOrder::Infinite;
    let zero = ExtOrder::int(0);
    for (_, p) in jet(f, k) {
        if !p.constant_term().is_zero_c() {
            return zero;
        }
        acc = acc.min(&nu_gamma(&p, g));
        if acc == zero {
            break;
        }
    }
    acc
}

/// Linear coordinate change used to bring a curve into the form ν(α) > ν(β).
#[derive(Clone, Debug, PartialEq)]
pub enum CoordChange {
    Identity,
    /// z ↔ w.
    Swap,
    /// New coordinates z' = z − c·w, w' = w.
    Shear(Scalar),
    /// Swap, then shear.
    SwapShear(Scalar),
}

impl CoordChange {
    /// Expresses `f` in the new coordinates.
    pub fn apply(&self, f: &BiPoly) -> BiPoly {
        match self {
            CoordChange::Identity => f.clone(),
            CoordChange::Swap => f.swap(),
            CoordChange::Shear(c) => shear(f, c),
            CoordChange::SwapShear(c) => shear(&f.swap(), c),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CoordChange::Identity => "identity".into(),
            CoordChange::Swap => "swap z<->w".into(),
            CoordChange::Shear(c) => format!("z -> z + {c}*w"),
            CoordChange::SwapShear(c) => format!("swap z<->w, then z -> z + {c}*w"),
        }
    }
}

fn shear(f: &BiPoly, c: &Scalar) -> BiPoly {
    // f(z' + c w', w')
    let pz = BiPoly::z().add(&BiPoly::w().scale(c));
    f.compose(&pz, &BiPoly::w())
}

/// Brings γ into the form ν(α) > ν(β) ≥ 1 and transforms `context` accordingly.
pub fn normalize_curve(g: &CurveGerm, context: &[BiPoly]) -> Result<(CurveGerm, CoordChange, Vec<BiPoly>)> {
    let oa = series_order(&g.alpha);
    let ob = series_order(&g.beta);
    let (base, swapped) = if oa.gt(&ob)? {
        (g.clone(), false)
    } else if ob.gt(&oa)? {
        (CurveGerm { alpha: g.beta.clone(), beta: g.alpha.clone() }, true)
    } else {
        // Equal orders: shear away the leading term of α.
        let e = oa.as_int().unwrap() as u32;
        let ca = g.alpha.coeff(e).unwrap();
        let cb = g.beta.coeff(e).unwrap();
        let c = ca.fdiv(&cb);
        let alpha = g.alpha.sub(&g.beta.scale(&c));
        let out = CurveGerm { alpha, beta: g.beta.clone() };
        if !series_order(&out.alpha).gt(&ob)? {
            return Err(Error::precision("shear did not separate curve orders"));
        }
        let ch = CoordChange::Shear(c);
        let ctx = context.iter().map(|f| ch.apply(f)).collect();
        return Ok((out, ch, ctx));
    };
    let ch = if swapped { CoordChange::Swap } else { CoordChange::Identity };
    let ctx = context.iter().map(|f| ch.apply(f)).collect();
    Ok((base, ch, ctx))
}

/// `true` when a rational is a nonnegative integer.
pub fn is_nonneg_int(r: &Rat) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_poly, rat_frac};

    fn p(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn order_comparisons() {
        let e3 = ExtOrder::int(3);
        let a5 = ExtOrder::at_least_int(5);
        let a2 = ExtOrder::at_least_int(2);
        assert!(a5.gt(&e3).unwrap());
        assert!(a2.gt(&e3).is_err());
        assert!(!e3.gt(&a5).unwrap());
        assert!(ExtOrder::Infinite.gt(&e3).unwrap());
        assert!(!ExtOrder::Infinite.gt(&ExtOrder::Infinite).unwrap());
        assert!(ExtOrder::Infinite.gt(&a5).is_err());
        assert_eq!(e3.min(&a5), e3);
        assert_eq!(ExtOrder::int(7).min(&a5), a5);
        assert!(a5.ge(&ExtOrder::int(5)).unwrap());
        assert!(ExtOrder::int(5).ge(&a5).is_err());
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(nu(&p("z^3 + z*w^7")), ExtOrder::int(3));
        assert_eq!(nu(&p("1")), ExtOrder::int(0));
        assert_eq!(nu(&BiPoly::big_o(64)), ExtOrder::at_least_int(64));
        assert_eq!(nu(&BiPoly::zero()), ExtOrder::Infinite);
    }

    #[test]
    fn curve_orders() {
        assert_eq!(nu_curve(&CurveGerm::monomial(Some(2), Some(3)).unwrap()), ExtOrder::int(2));
        assert_eq!(nu_curve(&CurveGerm::monomial(None, Some(1)).unwrap()), ExtOrder::int(1));
        let g = CurveGerm::monomial(Some(5), Some(3)).unwrap();
        assert_eq!(nu_gamma(&p("z"), &g), ExtOrder::Exact(rat_frac(5, 3)));
        let g = CurveGerm::monomial(None, Some(1)).unwrap();
        assert_eq!(nu_gamma(&p("w^2 + z*w^2"), &g), ExtOrder::int(2));
        let g = CurveGerm::monomial(Some(2), Some(3)).unwrap();
        assert_eq!(nu_gamma(&p("z + w"), &g), ExtOrder::int(1));
        assert_eq!(nu_gamma(&p("w^2 - z^3"), &g), ExtOrder::Infinite);
    }

    #[test]
    fn jets() {
        let j = jet(&p("z*w"), 1);
        let polys: Vec<String> = j.iter().map(|(_, q)| q.to_string()).collect();
        assert_eq!(polys, vec!["z*w", "w", "z"]);
        assert_eq!(jet(&p("z^2"), 0).len(), 1);
        assert!(jet(&p("z^2"), 2).iter().any(|(_, q)| nu(q) == ExtOrder::int(0)));
        assert_eq!(nu_k(&p("z^3 + z*w^7"), 1), ExtOrder::int(2));
        assert_eq!(nu_k_direct(&p("z^3 + z*w^7"), 1), ExtOrder::int(2));
    }

    #[test]
    fn jet_orders_along_axis() {
        let g = CurveGerm::monomial(None, Some(1)).unwrap();
        assert_eq!(nu_k_gamma(&p("w^2 + z*w^2"), 1, &g), ExtOrder::int(1));
        // f1 of the M=2, N=3, K=10 family.
        assert_eq!(nu_k_gamma(&p("6*z*w^2 + 2*z^11"), 1, &g), ExtOrder::int(2));
        assert_eq!(nu_k_gamma(&p("6*z*w^2 + 2*z^11"), 3, &g), ExtOrder::int(0));
    }

    #[test]
    fn normalization() {
        let g = CurveGerm::monomial(Some(1), Some(1)).unwrap();
        let (g2, ch, ctx) = normalize_curve(&g, &[p("z")]).unwrap();
        assert!(g2.alpha.is_exact_zero());
        assert_eq!(g2.beta, TSeries::t_pow(1));
        // z in new coordinates: z' + w'.
        assert_eq!(ctx[0], p("z + w"));
        assert!(matches!(ch, CoordChange::Shear(_)));
        let g = CurveGerm::monomial(None, Some(1)).unwrap();
        assert_eq!(normalize_curve(&g, &[]).unwrap().1, CoordChange::Identity);
        let g = CurveGerm::monomial(Some(3), Some(2)).unwrap();
        assert_eq!(normalize_curve(&g, &[]).unwrap().1, CoordChange::Identity);
        let g = CurveGerm::monomial(Some(2), Some(3)).unwrap();
        assert_eq!(normalize_curve(&g, &[]).unwrap().1, CoordChange::Swap);
    }
}

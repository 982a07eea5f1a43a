//! Sparse bivariate polynomials in `z, w` with optional truncation degree.
//!
//! A polynomial with truncation `N` stands for `p + O(|(z,w)|^N)`: only
//! terms of total degree `< N` are known.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::scalar::{AlgExt, Rat, Scalar};
use super::unipoly::{Coeff, UniPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono {
    pub z: u32,
    pub w: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { z: 0, w: 0 };

    pub fn new(z: u32, w: u32) -> Self {
        Mono { z, w }
    }
    pub fn deg(&self) -> u32 {
        self.z + self.w
    }
    pub fn mul(&self, o: &Mono) -> Mono {
        Mono { z: self.z + o.z, w: self.w + o.w }
    }
    pub fn divides(&self, o: &Mono) -> bool {
        self.z <= o.z && self.w <= o.w
    }
    pub fn div(&self, o: &Mono) -> Mono {
        Mono { z: self.z - o.z, w: self.w - o.w }
    }
    pub fn lcm(&self, o: &Mono) -> Mono {
        Mono { z: self.z.max(o.z), w: self.w.max(o.w) }
    }
}

/// Graded lexicographic with `z > w`.
impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.deg().cmp(&o.deg()).then(self.z.cmp(&o.z))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Z,
    W,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    terms: BTreeMap<Mono, Scalar>,
    trunc: Option<u32>,
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { terms: BTreeMap::new(), trunc: None }
    }

    /// The unknown germ `O(N)`.
    pub fn big_o(n: u32) -> Self {
        BiPoly { terms: BTreeMap::new(), trunc: Some(n) }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Scalar::int(n))
    }

    pub fn monomial(c: Scalar, z: u32, w: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(Mono::new(z, w), c);
        p
    }

    pub fn z() -> Self {
        Self::monomial(Scalar::int(1), 1, 0)
    }

    pub fn w() -> Self {
        Self::monomial(Scalar::int(1), 0, 1)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::Z => Self::z(),
            Var::W => Self::w(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Scalar)>, trunc: Option<u32>) -> Self {
        let mut p = BiPoly { terms: BTreeMap::new(), trunc };
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero_c() || self.trunc.is_some_and(|n| m.deg() >= n) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.fadd(&c);
                if s.is_zero_c() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn truncation(&self) -> Option<u32> {
        self.trunc
    }

    /// Lowers the truncation degree to `min(current, n)`, dropping terms.
    pub fn truncate(&self, n: u32) -> Self {
        let t = min_opt(self.trunc, Some(n));
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())), t)
    }

    /// Same terms, truncation removed (the polynomial taken as exact).
    pub fn as_exact(&self) -> Self {
        BiPoly { terms: self.terms.clone(), trunc: None }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exactly the zero polynomial (no unknown tail).
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, z: u32, w: u32) -> Scalar {
        self.terms.get(&Mono::new(z, w)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(0, 0)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Lowest total degree of a stored term.
    pub fn low_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.deg())
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.deg())
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| if v == Var::Z { m.z } else { m.w }).max()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }

    /// The extension containing all coefficients, if any.
    pub fn field(&self) -> Result<Option<Arc<AlgExt>>> {
        let mut f: Option<&Scalar> = None;
        for c in self.terms.values() {
            if c.field().is_some() {
                if let Some(prev) = f {
                    prev.check_compatible(c)?;
                } else {
                    f = Some(c);
                }
            }
        }
        Ok(f.and_then(|c| c.field().cloned()))
    }

    fn check_fields(&self, o: &BiPoly) -> Result<()> {
        match (self.field()?, o.field()?) {
            (Some(a), Some(b)) if a.minimal_polynomial() != b.minimal_polynomial() => Err(Error::FieldMismatch),
            _ => Ok(()),
        }
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let mut r = BiPoly { terms: BTreeMap::new(), trunc: min_opt(self.trunc, o.trunc) };
        for (m, c) in self.terms.iter().chain(o.terms.iter()) {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(m, c)| (*m, c.fneg())).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> BiPoly {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.fmul(s))), self.trunc)
    }

    /// Lower bound on the vanishing order: lowest stored degree, or the
    /// truncation degree when nothing is stored.
    fn order_lower(&self) -> Option<u32> {
        match (self.low_degree(), self.trunc) {
            (Some(d), _) => Some(d),
            (None, t) => t,
        }
    }

    /// Product; the truncation degree is `min(Na + ν(b), Nb + ν(a))`.
    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        if self.is_exact_zero() || o.is_exact_zero() {
            return BiPoly::zero();
        }
        let ta = self.trunc.map(|n| n + o.order_lower().unwrap_or(0));
        let tb = o.trunc.map(|n| n + self.order_lower().unwrap_or(0));
        let mut r = BiPoly { terms: BTreeMap::new(), trunc: min_opt(ta, tb) };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(ma.mul(mb), ca.fmul(cb));
            }
        }
        r
    }

    pub fn try_add(&self, o: &BiPoly) -> Result<BiPoly> {
        self.check_fields(o)?;
        Ok(self.add(o))
    }

    pub fn try_sub(&self, o: &BiPoly) -> Result<BiPoly> {
        self.check_fields(o)?;
        Ok(self.sub(o))
    }

    pub fn try_mul(&self, o: &BiPoly) -> Result<BiPoly> {
        self.check_fields(o)?;
        Ok(self.mul(o))
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut acc = BiPoly::int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_monomial(&self, m: Mono) -> BiPoly {
        Self::from_terms(self.terms.iter().map(|(k, c)| (k.mul(&m), c.clone())), self.trunc.map(|n| n + m.deg()))
    }

    /// Formal partial derivative; a finite truncation degree drops by one.
    pub fn partial(&self, v: Var) -> BiPoly {
        let mut r = BiPoly { terms: BTreeMap::new(), trunc: self.trunc.map(|n| n.saturating_sub(1)) };
        for (m, c) in &self.terms {
            let (e, nm) = match v {
                Var::Z if m.z > 0 => (m.z, Mono::new(m.z - 1, m.w)),
                Var::W if m.w > 0 => (m.w, Mono::new(m.z, m.w - 1)),
                _ => continue,
            };
            r.add_term(nm, c.fmul(&Scalar::int(e as i64)));
        }
        r
    }

    /// `∂_z^a ∂_w^b`.
    pub fn partial_k(&self, a: u32, b: u32) -> BiPoly {
        let mut r = self.clone();
        for _ in 0..a {
            r = r.partial(Var::Z);
        }
        for _ in 0..b {
            r = r.partial(Var::W);
        }
        r
    }

    pub fn eval(&self, z: &Scalar, w: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            acc = acc.fadd(&c.fmul(&z.pow(m.z as i64)).fmul(&w.pow(m.w as i64)));
        }
        acc
    }

    /// Substitutes `z -> pz`, `w -> pw`.
    pub fn compose(&self, pz: &BiPoly, pw: &BiPoly) -> BiPoly {
        let dz = self.degree_in(Var::Z).unwrap_or(0);
        let dw = self.degree_in(Var::W).unwrap_or(0);
        let mut zp = vec![BiPoly::int(1)];
        for i in 1..=dz as usize {
            zp.push(zp[i - 1].mul(pz));
        }
        let mut wp = vec![BiPoly::int(1)];
        for i in 1..=dw as usize {
            wp.push(wp[i - 1].mul(pw));
        }
        // The unknown tail O(N) maps to O(N * min order of the substitution).
        let sub_ord = pz.order_lower().unwrap_or(u32::MAX).min(pw.order_lower().unwrap_or(u32::MAX));
        let tail = self.trunc.map(|n| n.saturating_mul(sub_ord.max(1)));
        let mut r = BiPoly { terms: BTreeMap::new(), trunc: tail };
        for (m, c) in &self.terms {
            let t = zp[m.z as usize].mul(&wp[m.w as usize]).scale(c);
            r = r.add(&t);
        }
        r
    }

    /// Exchanges `z` and `w`.
    pub fn swap(&self) -> BiPoly {
        Self::from_terms(self.terms.iter().map(|(m, c)| (Mono::new(m.w, m.z), c.clone())), self.trunc)
    }

    /// Largest monomial dividing every stored term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Mono::ONE };
        it.fold(*first, |acc, m| Mono::new(acc.z.min(m.z), acc.w.min(m.w)))
    }

    pub fn div_monomial(&self, m: Mono) -> BiPoly {
        Self::from_terms(
            self.terms.iter().map(|(k, c)| (k.div(&m), c.clone())),
            self.trunc.map(|n| n.saturating_sub(m.deg())),
        )
    }

    /// Coefficients of `var^i` as univariate polynomials in the other variable.
    pub fn coeffs_in(&self, v: Var) -> Vec<UniPoly<Scalar>> {
        let d = self.degree_in(v).unwrap_or(0) as usize;
        let mut rows: Vec<Vec<Scalar>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (i, j) = match v {
                Var::W => (m.w as usize, m.z as usize),
                Var::Z => (m.z as usize, m.w as usize),
            };
            if rows[i].len() <= j {
                rows[i].resize(j + 1, Scalar::zero());
            }
            rows[i][j] = c.clone();
        }
        if self.is_zero() {
            return Vec::new();
        }
        rows.into_iter().map(UniPoly::new).collect()
    }

    /// Inverse of [`BiPoly::coeffs_in`].
    pub fn from_coeffs_in(v: Var, cs: &[UniPoly<Scalar>]) -> BiPoly {
        let mut terms = Vec::new();
        for (i, p) in cs.iter().enumerate() {
            for (j, c) in p.coeffs().iter().enumerate() {
                let m = match v {
                    Var::W => Mono::new(j as u32, i as u32),
                    Var::Z => Mono::new(i as u32, j as u32),
                };
                terms.push((m, c.clone()));
            }
        }
        Self::from_terms(terms, None)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &BiPoly) -> Option<BiPoly> {
        if d.is_zero() {
            return None;
        }
        // Lex order with w first makes the leading term well defined for division.
        let lead = |p: &BiPoly| p.terms.iter().max_by(|a, b| (a.0.w, a.0.z).cmp(&(b.0.w, b.0.z))).map(|(m, c)| (*m, c.clone()));
        let (dm, dc) = lead(d)?;
        let inv = dc.finv();
        let mut r = self.as_exact();
        let mut q = BiPoly::zero();
        while let Some((rm, rc)) = lead(&r) {
            if !dm.divides(&rm) {
                return None;
            }
            let m = rm.div(&dm);
            let c = rc.fmul(&inv);
            r = r.sub(&d.as_exact().mul_monomial(m).scale(&c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Sylvester resultant with respect to `v`, as a polynomial in the other
    /// variable. Sign convention: determinant of the Sylvester matrix whose
    /// rows hold coefficients in ascending powers, rows of `p` on top.
    pub fn resultant(p: &BiPoly, q: &BiPoly, v: Var) -> Result<BiPoly> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidInput("resultant of two zero polynomials".into()));
        }
        if p.is_zero() || q.is_zero() {
            return Ok(BiPoly::zero());
        }
        let other = if v == Var::W { Var::Z } else { Var::W };
        let pc = p.coeffs_in(v);
        let qc = q.coeffs_in(v);
        let m = pc.len() - 1;
        let n = qc.len() - 1;
        let dp = p.degree_in(other).unwrap_or(0) as usize;
        let dq = q.degree_in(other).unwrap_or(0) as usize;
        let bound = m * dq + n * dp;
        let xs: Vec<Scalar> = (0..=bound).map(|i| Scalar::int(i as i64)).collect();
        let ys: Vec<Scalar> = xs
            .iter()
            .map(|x| {
                let pv: Vec<Scalar> = pc.iter().map(|c| c.eval(x)).collect();
                let qv: Vec<Scalar> = qc.iter().map(|c| c.eval(x)).collect();
                determinant(sylvester(&pv, &qv))
            })
            .collect();
        let r = interpolate(&xs, &ys);
        Ok(BiPoly::from_coeffs_in(v, &[r]))
    }

    /// Canonical text without the truncation marker.
    pub fn to_plain_string(&self) -> String {
        let mut s = String::new();
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if first {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if body != "1" || m.deg() == 0 {
                factors.push(body);
            }
            for (e, name) in [(m.z, "z"), (m.w, "w")] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            s.push_str(&factors.join("*"));
        }
        if first {
            s.push('0');
        }
        s
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.trunc {
            None => write!(f, "{}", self.to_plain_string()),
            Some(n) if self.is_zero() => write!(f, "O({n})"),
            Some(n) => write!(f, "{} + O({n})", self.to_plain_string()),
        }
    }
}

fn sylvester(p: &[Scalar], q: &[Scalar]) -> Vec<Vec<Scalar>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![Scalar::zero(); size];
        for (j, c) in p.iter().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![Scalar::zero(); size];
        for (j, c) in q.iter().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    rows
}

/// Determinant by fraction-based Gaussian elimination.
pub fn determinant(mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    let mut det = Scalar::int(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero_c()) else {
            return Scalar::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = det.fneg();
        }
        let pv = a[col][col].clone();
        det = det.fmul(&pv);
        let inv = pv.finv();
        for r in col + 1..n {
            if a[r][col].is_zero_c() {
                continue;
            }
            let f = a[r][col].fmul(&inv);
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = x.fsub(&y.fmul(&f));
            }
        }
    }
    det
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Scalar], ys: &[Scalar]) -> UniPoly<Scalar> {
    let n = xs.len();
    let mut dd: Vec<Scalar> = ys.to_vec();
    for lvl in 1..n {
        for i in (lvl..n).rev() {
            let num = dd[i].fsub(&dd[i - 1]);
            let den = xs[i].fsub(&xs[i - lvl]);
            dd[i] = num.fdiv(&den);
        }
    }
    let mut acc = UniPoly::zero();
    for i in (0..n).rev() {
        let lin = UniPoly::new(vec![xs[i].fneg(), Scalar::int(1)]);
        acc = acc.mul(&lin).add(&UniPoly::constant(dd[i].clone()));
    }
    acc
}

/// Rational-coefficient view of a univariate scalar polynomial.
pub fn uni_to_rat(p: &UniPoly<Scalar>) -> Option<UniPoly<Rat>> {
    let mut v = Vec::new();
    for c in p.coeffs() {
        v.push(c.as_rat()?.clone());
    }
    Some(UniPoly::new(v))
}

pub fn uni_from_rat(p: &UniPoly<Rat>) -> UniPoly<Scalar> {
    p.map(|c| Scalar::Rat(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse::parse_poly;

    fn pp(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(pp("z + w").mul(&pp("z - w")), pp("z^2 - w^2"));
    }

    #[test]
    fn cd_column_product() {
        assert_eq!(pp("z^2").mul(&pp("3*w^2 + z^10")), pp("3*z^2*w^2 + z^12"));
    }

    #[test]
    fn truncated_add() {
        let a = pp("z^4").truncate(5);
        let b = pp("z^6");
        let s = a.add(&b);
        assert_eq!(s.truncation(), Some(5));
        assert_eq!(s.to_plain_string(), "z^4");
    }

    #[test]
    fn partials() {
        assert_eq!(pp("z^3 + z*w^7").partial(Var::Z), pp("3*z^2 + w^7"));
        assert!(pp("z^2").partial(Var::W).is_zero());
        assert_eq!(pp("z^2").partial(Var::Z), pp("2*z"));
        assert_eq!(pp("z^4").truncate(9).partial(Var::Z).truncation(), Some(8));
    }

    #[test]
    fn resultant_sign_convention() {
        assert_eq!(BiPoly::resultant(&pp("w - z"), &pp("w"), Var::W).unwrap(), pp("-z"));
        assert_eq!(BiPoly::resultant(&pp("w^2 - z^3"), &pp("w"), Var::W).unwrap(), pp("-z^3"));
        assert_eq!(BiPoly::resultant(&pp("w"), &pp("z"), Var::W).unwrap(), pp("z"));
        assert!(BiPoly::resultant(&BiPoly::zero(), &BiPoly::zero(), Var::W).is_err());
    }

    #[test]
    fn resultant_in_z() {
        let r = BiPoly::resultant(&pp("z - w^2"), &pp("z + w"), Var::Z).unwrap();
        assert_eq!(r, pp("-w^2 - w"));
    }

    #[test]
    fn exact_division() {
        let a = pp("z^2 - w^2");
        assert_eq!(a.div_exact(&pp("z - w")).unwrap(), pp("z + w"));
        assert!(a.div_exact(&pp("z - 2*w")).is_none());
    }

    #[test]
    fn mul_truncation_is_sharp() {
        // (z + O(3)) * (w^2 + O(5)) = z w^2 + O(min(3+2, 5+1)) = O(5)
        let a = pp("z").truncate(3);
        let b = pp("w^2").truncate(5);
        assert_eq!(a.mul(&b).truncation(), Some(5));
    }
}

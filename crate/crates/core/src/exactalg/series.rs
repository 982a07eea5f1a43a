//! Truncated univariate power series in `t` with explicit precision.
//!
//! `prec = Some(N)` means coefficients of `t^i` are known for `i < N` and
//! nothing is known beyond; `prec = None` marks an exact (finite) series.

use std::fmt;

use super::bipoly::BiPoly;
use super::scalar::Scalar;
use super::unipoly::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub struct TSeries {
    coeffs: Vec<Scalar>,
    prec: Option<u32>,
}

/// Order of a series as far as it is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOrder {
    Exact(u32),
    /// Zero below the precision `N`.
    AtLeast(u32),
    /// The exact zero series.
    Zero,
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.saturating_add(y)),
        _ => None,
    }
}

impl TSeries {
    pub fn new(mut coeffs: Vec<Scalar>, prec: Option<u32>) -> Self {
        if let Some(n) = prec {
            coeffs.truncate(n as usize);
        }
        while coeffs.last().is_some_and(|c| c.is_zero_c()) {
            coeffs.pop();
        }
        TSeries { coeffs, prec }
    }

    pub fn exact(coeffs: Vec<Scalar>) -> Self {
        Self::new(coeffs, None)
    }

    pub fn zero() -> Self {
        Self::new(Vec::new(), None)
    }

    /// `O(t^n)`.
    pub fn unknown(n: u32) -> Self {
        Self::new(Vec::new(), Some(n))
    }

    /// `c t^e`, exact.
    pub fn monomial(c: Scalar, e: u32) -> Self {
        let mut v = vec![Scalar::zero(); e as usize + 1];
        v[e as usize] = c;
        Self::exact(v)
    }

    /// `t^e`, exact.
    pub fn t_pow(e: u32) -> Self {
        Self::monomial(Scalar::int(1), e)
    }

    pub fn precision(&self) -> Option<u32> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, `None` if beyond the precision.
    pub fn coeff(&self, i: u32) -> Option<Scalar> {
        if self.prec.is_some_and(|n| i >= n) {
            return None;
        }
        Some(self.coeffs.get(i as usize).cloned().unwrap_or_else(Scalar::zero))
    }

    pub fn order(&self) -> SeriesOrder {
        match self.coeffs.iter().position(|c| !c.is_zero_c()) {
            Some(i) => SeriesOrder::Exact(i as u32),
            None => match self.prec {
                Some(n) => SeriesOrder::AtLeast(n),
                None => SeriesOrder::Zero,
            },
        }
    }

    /// Lower bound for the order, `None` for the exact zero series.
    pub fn order_lower(&self) -> Option<u32> {
        match self.order() {
            SeriesOrder::Exact(e) | SeriesOrder::AtLeast(e) => Some(e),
            SeriesOrder::Zero => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.order() == SeriesOrder::Zero
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_rational())
    }

    pub fn truncate(&self, n: u32) -> Self {
        Self::new(self.coeffs.clone(), min_opt(self.prec, Some(n)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = min_opt(self.prec, o.prec);
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero);
                match o.coeffs.get(i) {
                    Some(b) => a.fadd(b),
                    None => a,
                }
            })
            .collect();
        Self::new(v, prec)
    }

    pub fn neg(&self) -> Self {
        TSeries { coeffs: self.coeffs.iter().map(|c| c.fneg()).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero_c() {
            return Self::new(Vec::new(), self.prec);
        }
        Self::new(self.coeffs.iter().map(|c| c.fmul(s)).collect(), self.prec)
    }

    /// Product to the attainable precision `min(pa + ν(b), pb + ν(a))`.
    pub fn mul(&self, o: &Self) -> Self {
        self.mul_cap(o, None)
    }

    /// Product, additionally truncated at `cap`.
    pub fn mul_cap(&self, o: &Self, cap: Option<u32>) -> Self {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero();
        }
        let prec = min_opt(min_opt(add_opt(self.prec, o.order_lower()), add_opt(o.prec, self.order_lower())), cap);
        let limit = prec.map(|n| n as usize).unwrap_or(usize::MAX);
        let len = (self.coeffs.len() + o.coeffs.len()).saturating_sub(1).min(limit);
        let mut v = vec![Scalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero_c() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero_c() {
                    continue;
                }
                v[i + j] = v[i + j].fadd(&a.fmul(b));
            }
        }
        Self::new(v, prec)
    }

    pub fn pow_cap(&self, e: u32, cap: Option<u32>) -> Self {
        let mut acc = Self::exact(vec![Scalar::int(1)]);
        for _ in 0..e {
            acc = acc.mul_cap(self, cap);
        }
        acc
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: u32) -> Self {
        let mut v = vec![Scalar::zero(); k as usize];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v, self.prec.map(|n| n + k))
    }

    /// Division by `t^k`; the first `k` coefficients must be zero.
    pub fn unshift(&self, k: u32) -> Self {
        debug_assert!(self.coeffs.iter().take(k as usize).all(|c| c.is_zero_c()));
        let v = self.coeffs.iter().skip(k as usize).cloned().collect();
        Self::new(v, self.prec.map(|n| n.saturating_sub(k)))
    }

    /// Substitution `t -> c t^q` (q ≥ 1).
    pub fn subst_monomial(&self, c: &Scalar, q: u32) -> Self {
        let mut v = vec![Scalar::zero(); (self.coeffs.len().max(1) - 1) * q as usize + 1];
        let mut cp = Scalar::int(1);
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero_c() {
                v[i * q as usize] = a.fmul(&cp);
            }
            cp = cp.fmul(c);
        }
        Self::new(v, self.prec.map(|n| n.saturating_mul(q)))
    }

    /// Inverse of a unit series to precision `n` (or its own precision).
    pub fn inverse_unit(&self, n: u32) -> Self {
        let c0 = self.coeffs.first().cloned().unwrap_or_else(Scalar::zero);
        assert!(!c0.is_zero_c(), "inverse of a non-unit series");
        let n = self.prec.map_or(n, |p| p.min(n));
        let inv0 = c0.finv();
        let mut out: Vec<Scalar> = Vec::with_capacity(n as usize);
        for k in 0..n as usize {
            if k == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut s = Scalar::zero();
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                if self.coeffs[j].is_zero_c() || out[k - j].is_zero_c() {
                    continue;
                }
                s = s.fadd(&self.coeffs[j].fmul(&out[k - j]));
            }
            out.push(s.fneg().fmul(&inv0));
        }
        Self::new(out, Some(n))
    }

    /// Display with variable name `t`.
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero_c() {
                continue;
            }
            let cs = c.to_string();
            let tp = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            let term = if tp.is_empty() {
                cs
            } else if cs == "1" {
                tp
            } else if cs == "-1" {
                format!("-{tp}")
            } else {
                format!("{cs}*{tp}")
            };
            parts.push(term);
        }
        let mut s = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k == 0 {
                s.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        match self.prec {
            Some(n) if s.is_empty() => format!("O(t^{n})"),
            Some(n) => format!("{s} + O(t^{n})"),
            None if s.is_empty() => "0".into(),
            None => s,
        }
    }
}

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// `p(α(t), β(t))` to the attainable precision, optionally capped at `target`.
///
/// Unknown tail terms of a truncated `p` (degree ≥ N) contribute at order
/// ≥ N·min(ord α, ord β), which bounds the result precision.
pub fn compose_series(p: &BiPoly, alpha: &TSeries, beta: &TSeries, target: Option<u32>) -> TSeries {
    if p.is_exact_zero() {
        return TSeries::zero();
    }
    let og = match (alpha.order_lower(), beta.order_lower()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    };
    let tail = match (p.truncation(), og) {
        (Some(n), Some(o)) => Some(n.saturating_mul(o)),
        (Some(_), None) => None,
        (None, _) => None,
    };
    let cap = min_opt(target, tail);
    if p.is_zero() {
        return TSeries::unknown(cap.unwrap_or(0));
    }
    let dz = p.terms().map(|(m, _)| m.z).max().unwrap_or(0);
    let dw = p.terms().map(|(m, _)| m.w).max().unwrap_or(0);
    let mut ap = vec![TSeries::exact(vec![Scalar::int(1)])];
    for i in 1..=dz as usize {
        let next = ap[i - 1].mul_cap(alpha, cap);
        ap.push(next);
    }
    // Horner-like grouping: for each w-exponent b, A_b = Σ_a c_ab α^a.
    let mut groups: std::collections::BTreeMap<u32, Vec<(u32, Scalar)>> = Default::default();
    for (m, c) in p.terms() {
        groups.entry(m.w).or_default().push((m.z, c.clone()));
    }
    let mut acc = match cap {
        Some(n) => TSeries::new(Vec::new(), Some(n)),
        None => TSeries::zero(),
    };
    let mut bpow = TSeries::exact(vec![Scalar::int(1)]);
    let mut bexp = 0u32;
    for (b, list) in groups {
        while bexp < b {
            bpow = bpow.mul_cap(beta, cap);
            bexp += 1;
        }
        let mut ab = TSeries::zero();
        for (a, c) in list {
            ab = ab.add(&ap[a as usize].scale(&c));
        }
        acc = acc.add(&ab.mul_cap(&bpow, cap));
    }
    let _ = dw;
    match cap {
        Some(n) => acc.truncate(n),
        None => acc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse::parse_poly;

    fn tp(e: u32) -> TSeries {
        TSeries::t_pow(e)
    }

    #[test]
    fn compose_monomial_curve() {
        let s = compose_series(&parse_poly("z").unwrap(), &tp(5), &tp(3), None);
        assert_eq!(s, tp(5));
    }

    #[test]
    fn compose_axis_example() {
        let s = compose_series(&parse_poly("w^2 + z*w^2").unwrap(), &TSeries::zero(), &tp(1), None);
        assert_eq!(s, tp(2));
    }

    #[test]
    fn compose_cusp_vanishes() {
        let s = compose_series(&parse_poly("w^2 - z^3").unwrap(), &tp(2), &tp(3), None);
        assert!(s.is_exact_zero());
        let s = compose_series(&parse_poly("w^2 - z^3").unwrap(), &tp(2).truncate(10), &tp(3).truncate(10), None);
        assert_eq!(s.order(), SeriesOrder::AtLeast(13));
    }

    #[test]
    fn truncated_poly_limits_precision() {
        let p = parse_poly("z + O(4)").unwrap();
        let s = compose_series(&p, &tp(2), &tp(1), None);
        assert_eq!(s.precision(), Some(4));
        assert_eq!(s.order(), SeriesOrder::Exact(2));
    }

    #[test]
    fn product_precision_rule() {
        let a = TSeries::new(vec![Scalar::int(0), Scalar::int(1)], Some(5)); // t + O(t^5)
        let b = TSeries::new(vec![Scalar::int(0), Scalar::int(0), Scalar::int(1)], Some(4)); // t^2 + O(t^4)
        assert_eq!(a.mul(&b).precision(), Some(5)); // min(5+2, 4+1)
    }

    #[test]
    fn unit_inverse() {
        let u = TSeries::exact(vec![Scalar::int(1), Scalar::int(1)]);
        let inv = u.inverse_unit(6);
        let prod = u.mul(&inv);
        assert_eq!(prod.truncate(6), TSeries::new(vec![Scalar::int(1)], Some(6)));
    }

    #[test]
    fn text_form() {
        let s = TSeries::new(vec![Scalar::int(0), Scalar::int(2), Scalar::int(-1)], Some(4));
        assert_eq!(s.to_text(), "2*t - t^2 + O(t^4)");
    }
}

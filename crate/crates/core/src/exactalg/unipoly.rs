//! Dense univariate polynomials over an exact field, coefficients stored
//! in ascending order with no trailing zeros.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact field operations needed by the polynomial kernels.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero_c(&self) -> bool;
    fn fadd(&self, o: &Self) -> Self;
    fn fsub(&self, o: &Self) -> Self;
    fn fmul(&self, o: &Self) -> Self;
    fn fneg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn finv(&self) -> Self;
    fn fdiv(&self, o: &Self) -> Self {
        self.fmul(&o.finv())
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero_c(&self) -> bool {
        Zero::is_zero(self)
    }
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn finv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<C: Coeff> {
    coeffs: Vec<C>,
}

impl<C: Coeff> UniPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero_c()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        UniPoly { coeffs: vec![C::zero(), C::one()] }
    }

    pub fn monomial(c: C, e: usize) -> Self {
        let mut v = vec![C::zero(); e + 1];
        v[e] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> C {
        self.coeffs.last().cloned().unwrap_or_else(C::zero)
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.fmul(x).fadd(c);
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).fadd(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).fsub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        UniPoly { coeffs: self.coeffs.iter().map(|c| c.fneg()).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.fmul(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_c() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero_c() {
                    continue;
                }
                out[i + j] = out[i + j].fadd(&a.fmul(b));
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lc().finv();
        let mut r = self.coeffs.clone();
        if r.len() < dd + 1 {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![C::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].fmul(&inv);
            if c.is_zero_c() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = r[i + j].fsub(&c.fmul(dc));
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().finv())
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s)` with `g = gcd(self, m)` monic and `s * self = g (mod m)`.
    pub fn xgcd_left(&self, m: &Self) -> (Self, Self) {
        let (mut r0, mut r1) = (self.clone(), m.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let inv = r0.lc().finv();
        (r0.scale(&inv), s0.scale(&inv))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.fmul(&C::from_int(i as i64)))
                .collect(),
        )
    }

    /// Product of the distinct irreducible factors, made monic.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> UniPoly<D> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    /// Substitute `x -> x + c`.
    pub fn shift(&self, c: &C) -> Self {
        let lin = Self::new(vec![c.clone(), C::one()]);
        let mut acc = Self::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(a.clone()));
        }
        acc
    }
}

impl UniPoly<BigRational> {
    /// Primitive integer polynomial with the same roots and positive leading coefficient.
    pub fn to_primitive_integer(&self) -> Vec<BigInt> {
        use num_integer::Integer;
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if !g.is_zero() {
            if self.lc().is_negative() {
                g = -g;
            }
            for c in ints.iter_mut() {
                *c = &*c / &g;
            }
        }
        ints
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_var(f, "x")
    }
}

impl<C: Coeff + fmt::Display> UniPoly<C> {
    pub fn fmt_var(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero_c() {
                continue;
            }
            let s = c.to_string();
            let (neg, body) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = if body.contains(' ') { format!("({body})") } else { body };
            match i {
                0 => write!(f, "{body}")?,
                _ => {
                    if body != "1" {
                        write!(f, "{body}*")?;
                    }
                    if i == 1 {
                        write!(f, "{var}")?
                    } else {
                        write!(f, "{var}^{i}")?
                    }
                }
            }
        }
        Ok(())
    }

    pub fn display_var<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        struct D<'a, C: Coeff>(&'a UniPoly<C>, &'a str);
        impl<C: Coeff + fmt::Display> fmt::Display for D<'_, C> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_var(f, self.1)
            }
        }
        D(self, var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_int(n)
    }

    fn p(v: &[i64]) -> UniPoly<BigRational> {
        UniPoly::new(v.iter().map(|&n| q(n)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[1, 2, 3, 4, 5]);
        let d = p(&[-1, 0, 2]);
        let (qq, r) = a.divrem(&d);
        assert_eq!(qq.mul(&d).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn gcd_and_squarefree() {
        // (x-1)^2 (x+2)
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        assert_eq!(f.gcd(&f.derivative()), p(&[-1, 1]));
        assert_eq!(f.squarefree_part(), p(&[-1, 1]).mul(&p(&[2, 1])));
    }

    #[test]
    fn inverse_mod() {
        let m = p(&[2, 0, 1]); // x^2 + 2
        let a = p(&[1, 1]);
        let (g, s) = a.xgcd_left(&m);
        assert_eq!(g, UniPoly::one());
        assert_eq!(s.mul(&a).rem(&m), UniPoly::one());
    }

    #[test]
    fn shift_matches_eval() {
        let f = p(&[3, -1, 0, 2]);
        let g = f.shift(&q(5));
        assert_eq!(g.eval(&q(2)), f.eval(&q(7)));
    }

    #[test]
    fn primitive_integer_form() {
        let f = UniPoly::new(vec![BigRational::new(1.into(), 2.into()), q(0), BigRational::new((-3).into(), 4.into())]);
        let ints = f.to_primitive_integer();
        assert_eq!(ints, vec![BigInt::from(-2), BigInt::zero(), BigInt::from(3)]);
    }
}

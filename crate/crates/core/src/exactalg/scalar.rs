//! Coefficient field: exact rationals, optionally inside one simple
//! algebraic extension `Q(θ)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::unipoly::{Coeff, UniPoly};
use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `p/q` (or `p` when integral).
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A simple extension `Q[x]/(m)` with `m` monic and irreducible of degree ≥ 2.
#[derive(Debug, PartialEq)]
pub struct AlgExt {
    minimal_polynomial: UniPoly<Rat>,
}

impl AlgExt {
    /// Builds the extension generated by a root of `m` (made monic).
    ///
    /// Irreducibility is the caller's responsibility; squarefreeness is checked.
    pub fn new(m: &UniPoly<Rat>) -> Result<Arc<AlgExt>> {
        let m = m.monic();
        match m.degree() {
            None | Some(0) => return Err(Error::InvalidInput("minimal polynomial must have degree ≥ 1".into())),
            Some(1) => return Err(Error::InvalidInput("degree-1 extensions are plain rationals".into())),
            _ => {}
        }
        if m.gcd(&m.derivative()).degree() != Some(0) {
            return Err(Error::InvalidInput("minimal polynomial is not squarefree".into()));
        }
        Ok(Arc::new(AlgExt { minimal_polynomial: m }))
    }

    pub fn minimal_polynomial(&self) -> &UniPoly<Rat> {
        &self.minimal_polynomial
    }

    pub fn degree(&self) -> usize {
        self.minimal_polynomial.degree().unwrap()
    }

    /// The generator θ.
    pub fn generator(self: &Arc<Self>) -> Scalar {
        Scalar::from_repr(self, UniPoly::x())
    }

    pub fn describe(&self) -> String {
        format!("Q(θ), {} = 0", self.minimal_polynomial.display_var("θ"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgElem {
    field: Arc<AlgExt>,
    repr: UniPoly<Rat>,
}

impl AlgElem {
    pub fn field(&self) -> &Arc<AlgExt> {
        &self.field
    }
    pub fn repr(&self) -> &UniPoly<Rat> {
        &self.repr
    }
}

/// An exact coefficient: a rational or an element of one algebraic extension.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rat(Rat),
    Alg(AlgElem),
}

fn same_field(a: &Arc<AlgExt>, b: &Arc<AlgExt>) -> bool {
    Arc::ptr_eq(a, b) || a.minimal_polynomial == b.minimal_polynomial
}

impl Scalar {
    pub fn int(n: i64) -> Scalar {
        Scalar::Rat(rat(n))
    }

    /// Reduces `repr` modulo the minimal polynomial, collapsing to `Rat` when constant.
    pub fn from_repr(field: &Arc<AlgExt>, repr: UniPoly<Rat>) -> Scalar {
        let r = repr.rem(&field.minimal_polynomial);
        if r.degree().unwrap_or(0) == 0 {
            Scalar::Rat(r.coeff(0))
        } else {
            Scalar::Alg(AlgElem { field: field.clone(), repr: r })
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Alg(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn field(&self) -> Option<&Arc<AlgExt>> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Alg(a) => Some(&a.field),
        }
    }

    /// Errors when the two values live in different extensions.
    pub fn check_compatible(&self, o: &Scalar) -> Result<()> {
        match (self, o) {
            (Scalar::Alg(a), Scalar::Alg(b)) if !same_field(&a.field, &b.field) => Err(Error::FieldMismatch),
            _ => Ok(()),
        }
    }

    /// Representation as a polynomial in θ (constant for rationals).
    pub fn repr(&self) -> UniPoly<Rat> {
        match self {
            Scalar::Rat(r) => UniPoly::constant(r.clone()),
            Scalar::Alg(a) => a.repr.clone(),
        }
    }

    fn binop(&self, o: &Scalar, rf: impl Fn(&Rat, &Rat) -> Rat, pf: impl Fn(&UniPoly<Rat>, &UniPoly<Rat>) -> UniPoly<Rat>) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(rf(a, b)),
            (Scalar::Alg(a), Scalar::Rat(_)) => Scalar::from_repr(&a.field, pf(&a.repr, &o.repr())),
            (Scalar::Rat(_), Scalar::Alg(b)) => Scalar::from_repr(&b.field, pf(&self.repr(), &b.repr)),
            (Scalar::Alg(a), Scalar::Alg(b)) => {
                assert!(same_field(&a.field, &b.field), "coefficient fields are incompatible");
                Scalar::from_repr(&a.field, pf(&a.repr, &b.repr))
            }
        }
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.finv().pow(-e);
        }
        let mut acc = Scalar::int(1);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.fmul(&base);
            }
            base = base.fmul(&base);
            e >>= 1;
        }
        acc
    }

    /// Sign used for canonical orientation: sign of the rational part's
    /// leading nonzero coefficient in θ.
    pub fn sign_hint(&self) -> i32 {
        let r = self.repr();
        match r.degree() {
            None => 0,
            Some(_) => {
                if r.lc().is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::Rat(<Rat as Zero>::zero())
    }
    fn one() -> Self {
        Scalar::Rat(<Rat as One>::one())
    }
    fn from_int(n: i64) -> Self {
        Scalar::int(n)
    }
    fn is_zero_c(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Alg(_) => false,
        }
    }
    fn fadd(&self, o: &Self) -> Self {
        self.binop(o, |a, b| a + b, |a, b| a.add(b))
    }
    fn fsub(&self, o: &Self) -> Self {
        self.binop(o, |a, b| a - b, |a, b| a.sub(b))
    }
    fn fmul(&self, o: &Self) -> Self {
        match (self, o) {
            (Scalar::Rat(a), _) if a.is_zero() => Scalar::zero(),
            (_, Scalar::Rat(b)) if b.is_zero() => Scalar::zero(),
            _ => self.binop(o, |a, b| a * b, |a, b| a.mul(b)),
        }
    }
    fn fneg(&self) -> Self {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Alg(a) => Scalar::Alg(AlgElem { field: a.field.clone(), repr: a.repr.neg() }),
        }
    }
    fn finv(&self) -> Self {
        match self {
            Scalar::Rat(r) => {
                assert!(!r.is_zero(), "inverse of zero");
                Scalar::Rat(r.recip())
            }
            Scalar::Alg(a) => {
                let (g, s) = a.repr.xgcd_left(&a.field.minimal_polynomial);
                assert_eq!(g.degree(), Some(0), "non-invertible element: minimal polynomial not irreducible");
                Scalar::from_repr(&a.field, s)
            }
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

macro_rules! scalar_ops {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$f(o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$f(&o)
            }
        }
    };
}
scalar_ops!(Add, add, fadd);
scalar_ops!(Sub, sub, fsub);
scalar_ops!(Mul, mul, fmul);
scalar_ops!(Div, div, fdiv);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.fneg()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.fneg()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", fmt_rat(r)),
            Scalar::Alg(a) => {
                let p: UniPoly<RatDisplay> = a.repr.map(|c| RatDisplay(c.clone()));
                let s = p.display_var("θ").to_string();
                write!(f, "({s})")
            }
        }
    }
}

/// Wrapper giving rationals the `p/q` display inside polynomial printing.
#[derive(Clone, Debug, PartialEq)]
pub struct RatDisplay(pub Rat);

impl Coeff for RatDisplay {
    fn zero() -> Self {
        RatDisplay(<Rat as Zero>::zero())
    }
    fn one() -> Self {
        RatDisplay(<Rat as One>::one())
    }
    fn from_int(n: i64) -> Self {
        RatDisplay(rat(n))
    }
    fn is_zero_c(&self) -> bool {
        self.0.is_zero()
    }
    fn fadd(&self, o: &Self) -> Self {
        RatDisplay(&self.0 + &o.0)
    }
    fn fsub(&self, o: &Self) -> Self {
        RatDisplay(&self.0 - &o.0)
    }
    fn fmul(&self, o: &Self) -> Self {
        RatDisplay(&self.0 * &o.0)
    }
    fn fneg(&self) -> Self {
        RatDisplay(-&self.0)
    }
    fn finv(&self) -> Self {
        RatDisplay(self.0.recip())
    }
}

impl fmt::Display for RatDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rat(&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_i() -> Arc<AlgExt> {
        AlgExt::new(&UniPoly::new(vec![rat(1), rat(0), rat(1)])).unwrap()
    }

    #[test]
    fn theta_squared_is_rational() {
        let k = field_i();
        let t = k.generator();
        assert_eq!(&t * &t, Scalar::int(-1));
    }

    #[test]
    fn inverse_roundtrip() {
        let k = field_i();
        let x = &k.generator() + &Scalar::int(3);
        assert_eq!(&x * &x.finv(), Scalar::int(1));
    }

    #[test]
    fn degree_one_rejected() {
        assert!(AlgExt::new(&UniPoly::new(vec![rat(2), rat(1)])).is_err());
    }

    #[test]
    fn mismatch_detected() {
        let a = field_i().generator();
        let k2 = AlgExt::new(&UniPoly::new(vec![rat(-2), rat(0), rat(1)])).unwrap();
        assert_eq!(a.check_compatible(&k2.generator()), Err(Error::FieldMismatch));
        assert!(a.check_compatible(&Scalar::int(5)).is_ok());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::Rat(rat_frac(-3, 6)).to_string(), "-1/2");
        let k = field_i();
        let x = &k.generator().fmul(&Scalar::Rat(rat_frac(1, 3))) + &Scalar::int(2);
        assert_eq!(x.to_string(), "(1/3*θ + 2)");
    }
}

//! Factorization over Q (delegated to `algebraics`) and root finding in
//! `Q` or a single extension `Q(θ)` via the norm method.

use std::sync::Arc;

use algebraics::polynomial::Polynomial;
use num_bigint::BigInt;
use num_traits::Zero;

use super::bipoly::{BiPoly, Mono, Var};
use super::scalar::{AlgExt, Rat, Scalar};
use super::unipoly::{Coeff, UniPoly};
use crate::error::{Error, Result};

/// Monic irreducible factors over Q with multiplicities; constants dropped.
pub fn factor_rat(p: &UniPoly<Rat>) -> Vec<(UniPoly<Rat>, usize)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let ints = p.to_primitive_integer();
    let poly: Polynomial<BigInt> = ints.into();
    let factors = poly.factor();
    let mut out: Vec<(UniPoly<Rat>, usize)> = factors
        .polynomial_factors
        .into_iter()
        .map(|f| {
            let coeffs: Vec<Rat> = f.polynomial.iter().map(|c| Rat::from_integer(c.clone())).collect();
            (UniPoly::new(coeffs).monic(), f.power)
        })
        .filter(|(f, _)| f.degree().unwrap_or(0) > 0)
        .collect();
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| format!("{}", a.0).cmp(&format!("{}", b.0))));
    out
}

/// Roots of a polynomial found inside its own coefficient field.
#[derive(Clone, Debug, Default)]
pub struct FieldRoots {
    /// Roots with multiplicity, in a deterministic order.
    pub roots: Vec<(Scalar, usize)>,
    /// Irreducible factors of degree ≥ 2 over Q (only for rational input).
    pub irreducible: Vec<(UniPoly<Rat>, usize)>,
    /// Degree of the part with no root in the field (input over `Q(θ)` only).
    pub rootless_degree: usize,
}

/// Roots of `p` in `field` (Q when `None`). Coefficients must lie in `field`.
pub fn roots_in_field(p: &UniPoly<Scalar>, field: Option<&Arc<AlgExt>>) -> Result<FieldRoots> {
    let mut field: Option<Arc<AlgExt>> = field.cloned();
    for c in p.coeffs() {
        if let Some(k) = c.field() {
            match &field {
                Some(f) if !Arc::ptr_eq(f, k) && f.minimal_polynomial() != k.minimal_polynomial() => {
                    return Err(Error::FieldMismatch)
                }
                _ => field = Some(k.clone()),
            }
        }
    }
    match field {
        None => {
            let pr = p.map(|c| c.as_rat().cloned().unwrap());
            let mut out = FieldRoots::default();
            for (f, m) in factor_rat(&pr) {
                if f.degree() == Some(1) {
                    out.roots.push((Scalar::Rat(-f.coeff(0)), m));
                } else {
                    out.irreducible.push((f, m));
                }
            }
            Ok(out)
        }
        Some(k) => roots_over_extension(p, &k),
    }
}

fn lift(p: &UniPoly<Scalar>, k: &Arc<AlgExt>) -> UniPoly<Scalar> {
    p.map(|c| Scalar::from_repr(k, c.repr()))
}

/// Squarefree decomposition over K by Yun's algorithm: `p = Π g_i^i`.
fn yun(p: &UniPoly<Scalar>) -> Vec<UniPoly<Scalar>> {
    let mut out = Vec::new();
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.divrem(&a0).0;
    let mut c = dp.divrem(&a0).0;
    let mut d = c.sub(&b.derivative());
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        out.push(a.clone());
        b = b.divrem(&a).0;
        c = d.divrem(&a).0;
        d = c.sub(&b.derivative());
    }
    out
}

/// Norm `N(X) = Res_θ(m(θ), q(X, θ))` of a polynomial over `K = Q[θ]/m`.
fn norm(q: &UniPoly<Scalar>, k: &Arc<AlgExt>) -> Result<UniPoly<Rat>> {
    // Encode X as z and θ as w.
    let mut terms = Vec::new();
    for (i, c) in q.coeffs().iter().enumerate() {
        for (j, r) in c.repr().coeffs().iter().enumerate() {
            terms.push((Mono::new(i as u32, j as u32), Scalar::Rat(r.clone())));
        }
    }
    let qq = BiPoly::from_terms(terms, None);
    let m = BiPoly::from_terms(
        k.minimal_polynomial().coeffs().iter().enumerate().map(|(j, r)| (Mono::new(0, j as u32), Scalar::Rat(r.clone()))),
        None,
    );
    let n = BiPoly::resultant(&m, &qq, Var::W)?;
    let coeffs = n.coeffs_in(Var::W);
    let c0 = coeffs.into_iter().next().unwrap_or_else(UniPoly::zero);
    Ok(c0.map(|c| c.as_rat().cloned().unwrap_or_else(<Rat as Zero>::zero)))
}

fn roots_over_extension(p: &UniPoly<Scalar>, k: &Arc<AlgExt>) -> Result<FieldRoots> {
    let p = lift(p, k);
    let mut out = FieldRoots::default();
    for (idx, g) in yun(&p).into_iter().enumerate() {
        let mult = idx + 1;
        let Some(deg) = g.degree() else { continue };
        if deg == 0 {
            continue;
        }
        let theta = k.generator();
        let mut found = None;
        for s in 0..16i64 {
            // q(X) = g(X - sθ) has roots α + sθ.
            let shift = theta.fmul(&Scalar::int(-s));
            let q = g.shift(&shift);
            let n = norm(&q, k)?;
            if n.gcd(&n.derivative()).degree() == Some(0) {
                found = Some((s, q, n));
                break;
            }
        }
        let Some((s, q, n)) = found else {
            return Err(Error::Unsupported("no squarefree norm found for extension factorization".into()));
        };
        let mut linear = 0usize;
        for (h, _) in factor_rat(&n) {
            let hk = h.map(|c| Scalar::from_repr(k, UniPoly::constant(c.clone())));
            let f = q.gcd(&hk);
            if f.degree() == Some(1) {
                let root = f.coeff(0).fneg().fadd(&theta.fmul(&Scalar::int(-s)));
                out.roots.push((root, mult));
                linear += 1;
            }
        }
        out.rootless_degree += (deg - linear) * mult;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{rat, rat_frac};

    fn up(v: &[i64]) -> UniPoly<Rat> {
        UniPoly::new(v.iter().map(|&n| rat(n)).collect())
    }

    #[test]
    fn rational_factorization() {
        // (x - 1)^2 (x^2 + 1/3) scaled by 6
        let f = up(&[-1, 1]).pow(2).mul(&UniPoly::new(vec![rat_frac(1, 3), rat(0), rat(1)])).scale(&rat(6));
        let fs = factor_rat(&f);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0], (up(&[-1, 1]), 2));
        assert_eq!(fs[1], (UniPoly::new(vec![rat_frac(1, 3), rat(0), rat(1)]), 1));
    }

    #[test]
    fn roots_over_q() {
        let p = up(&[6, -5, 1]).map(|c| Scalar::Rat(c.clone()));
        let r = roots_in_field(&p, None).unwrap();
        let mut vals: Vec<String> = r.roots.iter().map(|(x, _)| x.to_string()).collect();
        vals.sort();
        assert_eq!(vals, vec!["2", "3"]);
    }

    #[test]
    fn roots_over_extension() {
        let k = AlgExt::new(&UniPoly::new(vec![rat_frac(1, 3), rat(0), rat(1)])).unwrap();
        let t = k.generator();
        // X^2 + 1/3 splits over Q(θ) with θ^2 = -1/3.
        let p = UniPoly::new(vec![Scalar::Rat(rat_frac(1, 3)), Scalar::int(0), Scalar::int(1)]).map(|c| Scalar::from_repr(&k, c.repr()));
        let r = roots_in_field(&p, Some(&k)).unwrap();
        assert_eq!(r.roots.len(), 2);
        for (x, _) in &r.roots {
            assert!(p.eval(x).is_zero_c());
        }
        // X^2 - θ has no root in Q(θ).
        let q = UniPoly::new(vec![t.fneg(), Scalar::from_repr(&k, UniPoly::zero()), Scalar::from_repr(&k, UniPoly::constant(rat(1)))]);
        let r = roots_in_field(&q, Some(&k)).unwrap();
        assert!(r.roots.is_empty());
        assert_eq!(r.rootless_degree, 2);
    }
}

//! Squarefree decomposition of exact rational polynomials in `z, w`,
//! viewed as elements of `Q[z][w]`.

use super::bipoly::{BiPoly, Var};
use super::scalar::{Rat, Scalar};
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

type ZPoly = UniPoly<Rat>;
/// Polynomial in `w` with coefficients in `Q[z]`, ascending, trimmed.
type WPoly = Vec<ZPoly>;

fn trim(mut a: WPoly) -> WPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn to_w(p: &BiPoly) -> WPoly {
    trim(p.coeffs_in(Var::W).into_iter().map(|c| c.map(|s| s.as_rat().cloned().unwrap())).collect())
}

fn from_w(a: &WPoly) -> BiPoly {
    let cs: Vec<UniPoly<Scalar>> = a.iter().map(|c| c.map(|r| Scalar::Rat(r.clone()))).collect();
    BiPoly::from_coeffs_in(Var::W, &cs)
}

fn content(a: &WPoly) -> ZPoly {
    a.iter().fold(ZPoly::zero(), |g, c| g.gcd(c))
}

fn div_coeffs(a: &WPoly, d: &ZPoly) -> WPoly {
    a.iter().map(|c| c.divrem(d).0).collect()
}

fn primitive(a: &WPoly) -> WPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut p = div_coeffs(a, &content(a));
    // Normalize so the leading coefficient is monic in z.
    let lc = p.last().unwrap().lc();
    let inv = ZPoly::constant(lc.recip());
    p = p.iter().map(|c| c.mul(&inv)).collect();
    p
}

fn prem(a: &WPoly, b: &WPoly) -> WPoly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: WPoly = r.iter().map(|c| c.mul(&lb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lr));
        }
        r = trim(next);
    }
    r
}

fn gcd_w(a: &WPoly, b: &WPoly) -> WPoly {
    if a.is_empty() {
        return primitive_full(b);
    }
    if b.is_empty() {
        return primitive_full(a);
    }
    let c = content(a).gcd(&content(b));
    let (mut x, mut y) = (primitive(a), primitive(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { primitive(&r) };
    }
    let x = primitive(&x);
    x.iter().map(|p| p.mul(&c)).collect()
}

fn primitive_full(a: &WPoly) -> WPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let c = content(a);
    let p = primitive(a);
    p.iter().map(|x| x.mul(&c)).collect()
}

/// Greatest common divisor of exact rational polynomials (up to a constant).
pub fn gcd(a: &BiPoly, b: &BiPoly) -> Result<BiPoly> {
    require_exact_rational(a)?;
    require_exact_rational(b)?;
    Ok(from_w(&gcd_w(&to_w(a), &to_w(b))))
}

fn require_exact_rational(p: &BiPoly) -> Result<()> {
    if p.truncation().is_some() || !p.is_rational() {
        return Err(Error::Unsupported("squarefree decomposition needs an exact rational polynomial".into()));
    }
    Ok(())
}

fn uni_yun(p: &ZPoly) -> Vec<ZPoly> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.divrem(&a0).0;
    let c = dp.divrem(&a0).0;
    let mut d = c.sub(&b.derivative());
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        out.push(a.clone());
        b = b.divrem(&a).0;
        d = d.divrem(&a).0.sub(&b.derivative());
    }
    out
}

fn deriv_w(a: &WPoly) -> WPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Rat::from_integer((i as i64).into()))).collect())
}

fn div_w(a: &WPoly, d: &WPoly) -> WPoly {
    to_w(&from_w(a).div_exact(&from_w(d)).expect("exact division in squarefree decomposition"))
}

/// `f = c · Π g_i^{m_i}` with pairwise coprime squarefree nonconstant `g_i`.
pub fn squarefree_decomposition(f: &BiPoly) -> Result<Vec<(BiPoly, u32)>> {
    require_exact_rational(f)?;
    let a = to_w(f);
    if a.is_empty() {
        return Err(Error::InvalidInput("squarefree decomposition of zero".into()));
    }
    let mut out: Vec<(BiPoly, u32)> = Vec::new();
    let cont = content(&a);
    for (i, g) in uni_yun(&cont).into_iter().enumerate() {
        if g.degree().unwrap_or(0) > 0 {
            out.push((from_w(&vec![g]), i as u32 + 1));
        }
    }
    let p = primitive(&a);
    if p.len() > 1 {
        let dp = deriv_w(&p);
        let a0 = gcd_w(&p, &dp);
        let mut b = div_w(&p, &a0);
        let c = div_w(&dp, &a0);
        let mut d = sub_w(&c, &deriv_w(&b));
        let mut i = 1u32;
        while b.len() > 1 {
            let g = gcd_w(&b, &d);
            if g.len() > 1 {
                out.push((from_w(&g), i));
            }
            b = div_w(&b, &g);
            d = sub_w(&div_w(&d, &g), &deriv_w(&b));
            i += 1;
        }
    }
    Ok(out)
}

fn sub_w(a: &WPoly, b: &WPoly) -> WPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(ZPoly::zero);
                let y = b.get(i).cloned().unwrap_or_else(ZPoly::zero);
                x.sub(&y)
            })
            .collect(),
    )
}

const PRIMES: [u64; 2] = [2_147_483_647, 1_000_000_007];

fn rat_mod(r: &Rat, p: u64) -> Option<u64> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb).to_u64()?;
    let d = r.denom().mod_floor(&pb).to_u64()?;
    (d != 0).then(|| mul_mod(n, pow_mod(d, p - 2, p), p))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn trim_mod(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn rem_mod(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let inv = pow_mod(*b.last().unwrap(), p - 2, p);
    while a.len() >= b.len() {
        let c = mul_mod(*a.last().unwrap(), inv, p);
        let shift = a.len() - b.len();
        for (i, bc) in b.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - mul_mod(c, *bc, p)) % p;
        }
        a = trim_mod(a);
    }
    a
}

fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    a = trim_mod(a);
    b = trim_mod(b);
    while !b.is_empty() {
        let r = rem_mod(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn eval_mod(c: &[u64], x: u64, p: u64) -> u64 {
    c.iter().rev().fold(0, |acc, v| (mul_mod(acc, x, p) + v) % p)
}

/// A sufficient test for squarefreeness of an exact rational polynomial:
/// `true` only when the w-content is constant and some specialisation
/// z = z₀ keeps the w-degree and is squarefree modulo a large prime.
pub fn certainly_squarefree(h: &BiPoly) -> bool {
    if h.truncation().is_some() || !h.is_rational() {
        return false;
    }
    let cols = h.coeffs_in(Var::W);
    if cols.is_empty() {
        return false;
    }
    'primes: for p in PRIMES {
        let mut mcols = Vec::with_capacity(cols.len());
        for c in &cols {
            let mut v = Vec::with_capacity(c.coeffs().len());
            for s in c.coeffs() {
                match rat_mod(s.as_rat().unwrap(), p) {
                    Some(x) => v.push(x),
                    None => continue 'primes,
                }
            }
            mcols.push(trim_mod(v));
        }
        let content = mcols.iter().fold(Vec::new(), |g, c| gcd_mod(g, c.clone(), p));
        if content.len() != 1 {
            return false;
        }
        if mcols.len() < 2 {
            return false;
        }
        for z0 in [3u64, p - 5, 7, 11, 13] {
            let spec_vals: Vec<u64> = mcols.iter().map(|c| eval_mod(c, z0, p)).collect();
            if *spec_vals.last().unwrap() == 0 {
                continue;
            }
            let der: Vec<u64> = spec_vals.iter().enumerate().skip(1).map(|(i, c)| mul_mod(i as u64 % p, *c, p)).collect();
            return gcd_mod(spec_vals, der, p).len() == 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse::parse_poly;

    fn product(parts: &[(BiPoly, u32)]) -> BiPoly {
        parts.iter().fold(BiPoly::int(1), |acc, (g, m)| acc.mul(&g.pow(*m)))
    }

    fn same_up_to_constant(a: &BiPoly, b: &BiPoly) -> bool {
        let (ma, ca) = a.leading().map(|(m, c)| (*m, c.clone())).unwrap();
        let cb = b.coeff(ma.z, ma.w);
        if cb.is_zero_c() {
            return false;
        }
        a.scale(&cb).sub(&b.scale(&ca)).is_zero()
    }

    use crate::exactalg::unipoly::Coeff;

    #[test]
    fn decomposes_mixed_powers() {
        let f = parse_poly("z^2*w^3 - z^5*w").unwrap(); // z^2 w (w^2 - z^3)
        let g = parse_poly("w^2 - z^3").unwrap();
        let f = f.mul(&g); // z^2 w (w^2 - z^3)^2
        let dec = squarefree_decomposition(&f).unwrap();
        assert!(same_up_to_constant(&product(&dec), &f));
        let twos: Vec<_> = dec.iter().filter(|(_, m)| *m == 2).collect();
        assert_eq!(twos.len(), 2);
    }

    #[test]
    fn gcd_of_products() {
        let a = parse_poly("w^2 - z^3").unwrap().mul(&parse_poly("z + w").unwrap());
        let b = parse_poly("w^2 - z^3").unwrap().mul(&parse_poly("z - w + 1").unwrap());
        let g = gcd(&a, &b).unwrap();
        assert!(same_up_to_constant(&g, &parse_poly("w^2 - z^3").unwrap()));
    }
}

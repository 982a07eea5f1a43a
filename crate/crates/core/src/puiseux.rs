//! Newton–Puiseux decomposition of plane-curve germs into parametrized
//! branches.
//!
//! A branch is solved for `w` as a series in a root of `z`. Each level
//! substitutes `x = λ x'^q`, `y = x'^p (μ + y')` along a Newton polygon
//! edge of slope `p/q` and a root `X = μ^q / λ^p` of the edge polynomial,
//! until the remaining equation is smooth in `y` (then Newton lifting)
//! or `y' = 0` is an exact solution.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactalg::factor::{roots_in_field, FieldRoots};
use crate::exactalg::squarefree::{certainly_squarefree, squarefree_decomposition};
use crate::exactalg::{compose_series, AlgExt, BiPoly, Coeff, Mono, Rat, Scalar, SeriesOrder, TSeries, UniPoly, Var};
use crate::germs::{nu, nu_curve, CurveGerm, ExtOrder};

const MAX_LEVELS: usize = 64;

/// A compact edge of the Newton polygon, between support points `(a, b)`
/// (exponents of `z`, `w`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: (u32, u32),
    pub to: (u32, u32),
}

impl Edge {
    /// Slope Δb/Δa as a reduced fraction.
    pub fn slope(&self) -> Rat {
        let db = self.to.1 as i64 - self.from.1 as i64;
        let da = self.to.0 as i64 - self.from.0 as i64;
        Rat::new(db.into(), da.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub support: Vec<(u32, u32)>,
    /// Edges ordered from the `z`-axis side to the `w`-axis side.
    pub edges: Vec<Edge>,
}

/// Lower-left hull of the support of `f`.
pub fn newton_polygon(f: &BiPoly) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::InvalidInput("Newton polygon of the zero polynomial".into()));
    }
    let support: Vec<(u32, u32)> = f.terms().map(|(m, _)| (m.z, m.w)).collect();
    // Lowest z-exponent for each w-exponent.
    let mut col: std::collections::BTreeMap<u32, u32> = Default::default();
    for &(a, b) in &support {
        let e = col.entry(b).or_insert(a);
        *e = (*e).min(a);
    }
    let pts: Vec<(u32, u32)> = col.into_iter().map(|(b, a)| (a, b)).collect();
    let edges = hull_edges(&pts).into_iter().map(|(from, to)| Edge { from, to }).collect();
    Ok(NewtonPolygon { support, edges })
}

/// Hull edges through points `(i, j)`, one per distinct `j`, sorted by `j`,
/// starting at the lowest `j` and ending at the first point with the
/// smallest `i`.
fn hull_edges(pts: &[(u32, u32)]) -> Vec<((u32, u32), (u32, u32))> {
    let mut edges = Vec::new();
    if pts.is_empty() {
        return edges;
    }
    let imin = pts.iter().map(|p| p.0).min().unwrap();
    let mut cur = pts[0];
    while cur.0 > imin {
        // Steepest descent in i per unit of j; ties go to the farthest point.
        let mut best: Option<((u32, u32), Rat)> = None;
        for &pt in pts.iter().filter(|p| p.1 > cur.1) {
            let s = Rat::new((cur.0 as i64 - pt.0 as i64).into(), ((pt.1 - cur.1) as i64).into());
            match &best {
                Some((_, bs)) if s < *bs => {}
                Some((bp, bs)) if s == *bs && pt.1 <= bp.1 => {}
                _ => best = Some((pt, s)),
            }
        }
        let (next, _) = best.expect("hull continues while i exceeds its minimum");
        edges.push((cur, next));
        cur = next;
    }
    edges
}

/// One parametrized branch of a curve germ.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub curve: CurveGerm,
    pub multiplicity: u32,
    /// Number of Galois-conjugate branches this representative stands for.
    pub conjugates: u32,
    pub field_note: String,
}

impl Branch {
    pub fn field(&self) -> Option<Arc<AlgExt>> {
        self.curve
            .alpha
            .coeffs()
            .iter()
            .chain(self.curve.beta.coeffs())
            .find_map(|c| c.field().cloned())
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} multiplicity {} conjugates {} field {}", self.curve, self.multiplicity, self.conjugates, self.field_note)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet {
    pub branches: Vec<Branch>,
    pub source: String,
    pub precision: u32,
}

impl BranchSet {
    /// Σ multiplicity · conjugates · ν(γ): the degree of the tangent cone.
    pub fn degree_count(&self) -> ExtOrder {
        let mut acc = ExtOrder::int(0);
        for b in &self.branches {
            let n = nu_curve(&b.curve);
            let w = Rat::from_integer(((b.multiplicity * b.conjugates) as i64).into());
            acc = acc.add(&match n {
                ExtOrder::Exact(v) => ExtOrder::Exact(v * w),
                other => other,
            });
        }
        acc
    }
}

/// Default series precision for branches of `f`.
pub fn default_precision(f: &BiPoly) -> u32 {
    (4 * f.truncation().unwrap_or(64)).min(256)
}

/// `true` iff `f∘curve` has no known nonzero coefficient.
pub fn verify_branch(f: &BiPoly, b: &Branch) -> bool {
    let s = compose_series(f, &b.curve.alpha, &b.curve.beta, None);
    !matches!(s.order(), SeriesOrder::Exact(_))
}

#[derive(Clone, Debug)]
struct Level {
    p: u32,
    q: u32,
    lambda: Scalar,
    mu: Scalar,
}

#[derive(Clone)]
struct Ctx {
    cap: u32,
    multiplicity: u32,
}

#[derive(Clone)]
struct Node {
    g: Vec<TSeries>,
    levels: Vec<Level>,
    field: Option<Arc<AlgExt>>,
    conjugates: u32,
}

/// Branches of the zero set of `f` at the origin.
pub fn branches(f: &BiPoly, precision: u32) -> Result<BranchSet> {
    if f.is_zero() {
        return Err(Error::InvalidInput("branches of a germ that vanishes to the working precision".into()));
    }
    let mut out = BranchSet { branches: Vec::new(), source: f.to_string(), precision };
    if !f.constant_term().is_zero_c() {
        return Ok(out);
    }
    let mc = f.monomial_content();
    if mc.z > 0 {
        out.branches.push(axis_branch(true, mc.z));
    }
    if mc.w > 0 {
        out.branches.push(axis_branch(false, mc.w));
    }
    let rest = f.div_monomial(mc);
    if rest.is_zero() || !rest.constant_term().is_zero_c() {
        return Ok(out);
    }
    for (h, m) in reduced_parts(&rest)? {
        if !h.constant_term().is_zero_c() {
            continue;
        }
        let field = h.field()?;
        let ctx = Ctx { cap: precision.max(8), multiplicity: m };
        let node = Node { g: w_coefficients(&h), levels: Vec::new(), field, conjugates: 1 };
        solve(node, &ctx, &mut out.branches)?;
    }
    Ok(out)
}

fn axis_branch(z_axis: bool, mult: u32) -> Branch {
    let curve = if z_axis {
        CurveGerm { alpha: TSeries::zero(), beta: TSeries::t_pow(1) }
    } else {
        CurveGerm { alpha: TSeries::t_pow(1), beta: TSeries::zero() }
    };
    Branch { curve, multiplicity: mult, conjugates: 1, field_note: "rational".into() }
}

/// Squarefree parts with multiplicities; the fast path checks that a
/// specialization in `z` stays squarefree of full degree.
fn reduced_parts(h: &BiPoly) -> Result<Vec<(BiPoly, u32)>> {
    if h.truncation().is_some() || !h.is_rational() {
        return Ok(vec![(h.clone(), 1)]);
    }
    if certainly_squarefree(h) {
        return Ok(vec![(h.clone(), 1)]);
    }
    squarefree_decomposition(h)
}

/// Coefficients of `w^j` as series in `z`, with the precision implied by the truncation.
fn w_coefficients(h: &BiPoly) -> Vec<TSeries> {
    let cols = h.coeffs_in(Var::W);
    cols.iter()
        .enumerate()
        .map(|(j, c)| {
            let prec = h.truncation().map(|n| n.saturating_sub(j as u32));
            TSeries::new(c.coeffs().to_vec(), prec)
        })
        .chain(std::iter::once(TSeries::new(Vec::new(), h.truncation().map(|n| n.saturating_sub(cols.len() as u32)))))
        .collect()
}

fn is_exact_zero(s: &TSeries) -> bool {
    s.is_exact_zero()
}

fn solve(mut node: Node, ctx: &Ctx, out: &mut Vec<Branch>) -> Result<()> {
    if node.levels.len() > MAX_LEVELS {
        return Err(Error::precision("Puiseux iteration did not separate branches within the level budget"));
    }
    // Trim trailing exact zeros.
    while node.g.len() > 1 && is_exact_zero(node.g.last().unwrap()) {
        node.g.pop();
    }
    if !node.levels.is_empty() && node.g.first().is_some_and(is_exact_zero) {
        // y' = 0 solves the current equation exactly.
        out.push(finish(&node, TSeries::zero(), ctx));
        node.g.remove(0);
        if node.g.first().is_some_and(|g0| !matches!(g0.order(), SeriesOrder::Exact(0))) {
            return solve(node, ctx, out);
        }
        return Ok(());
    }
    let r = node.g.iter().position(|s| matches!(s.order(), SeriesOrder::Exact(0)));
    let Some(r) = r else {
        return Err(Error::precision("no unit coefficient in y within the working precision"));
    };
    match r {
        0 => Ok(()),
        1 => {
            let y = newton_lift(&node.g, ctx.cap);
            out.push(finish(&node, y, ctx));
            Ok(())
        }
        _ => expand_edges(node, r, ctx, out),
    }
}

fn expand_edges(node: Node, r: usize, ctx: &Ctx, out: &mut Vec<Branch>) -> Result<()> {
    let mut pts: Vec<(u32, u32)> = Vec::new();
    for (j, s) in node.g.iter().enumerate().take(r + 1) {
        match s.order() {
            SeriesOrder::Exact(e) => pts.push((e, j as u32)),
            SeriesOrder::Zero => {}
            SeriesOrder::AtLeast(_) => {
                if j == 0 {
                    return Err(Error::precision("lowest Newton polygon point hidden by truncation"));
                }
            }
        }
    }
    for (from, to) in hull_edges(&pts) {
        let di = from.0 - to.0;
        let dj = to.1 - from.1;
        let g = di.gcd(&dj);
        let (p, q) = (di / g, dj / g);
        let m = q * from.0 + p * from.1;
        // Unknown coefficients must lie strictly above the edge line.
        for (j, s) in node.g.iter().enumerate().take(r + 1) {
            if let SeriesOrder::AtLeast(n) = s.order() {
                if q * n + p * j as u32 <= m {
                    return Err(Error::precision("Newton polygon edge not resolved at the working precision"));
                }
            }
        }
        let mut pc: Vec<Scalar> = Vec::new();
        let mut j = from.1;
        while j <= to.1 {
            let s = &node.g[j as usize];
            let i = (m - p * j) / q;
            let c = if (m - p * j) % q == 0 { s.coeff(i).unwrap_or_else(Scalar::zero) } else { Scalar::zero() };
            pc.push(if s.order() == SeriesOrder::Exact(i) { c } else { Scalar::zero() });
            j += q;
        }
        let edge_poly = UniPoly::new(pc);
        let roots = edge_roots(&edge_poly, node.field.as_ref())?;
        for (x0, field, conj) in roots {
            let (u, v) = exponents_for(p, q);
            let lambda = x0.pow(u as i64);
            let mu = x0.pow(v as i64);
            let g = transform(&node.g, p, q, m, &lambda, &mu, ctx.cap);
            let mut levels = node.levels.clone();
            levels.push(Level { p, q, lambda, mu });
            let child = Node { g, levels, field: field.clone(), conjugates: node.conjugates * conj };
            solve(child, ctx, out)?;
        }
    }
    Ok(())
}

/// Root, its coefficient field, and the number of conjugates it stands for.
type EdgeRoot = (Scalar, Option<Arc<AlgExt>>, u32);

/// Nonzero roots of an edge polynomial.
fn edge_roots(p: &UniPoly<Scalar>, field: Option<&Arc<AlgExt>>) -> Result<Vec<EdgeRoot>> {
    let FieldRoots { roots, irreducible, rootless_degree } = roots_in_field(p, field)?;
    let mut out: Vec<EdgeRoot> = Vec::new();
    for (x, _) in roots {
        if !x.is_zero_c() {
            out.push((x, field.cloned(), 1));
        }
    }
    if rootless_degree > 0 {
        return Err(Error::ExtensionTower { minimal_polynomial: format!("{}", p.display_var("X")) });
    }
    for (h, _) in irreducible {
        if field.is_some() {
            return Err(Error::ExtensionTower { minimal_polynomial: format!("{}", h.display_var("X")) });
        }
        let k = AlgExt::new(&h)?;
        let d = k.degree() as u32;
        out.push((k.generator(), Some(k), d));
    }
    Ok(out)
}

/// `(u, v)` with `q v − p u = 1`, `u ≥ 0` minimal.
fn exponents_for(p: u32, q: u32) -> (u32, u32) {
    for u in 0..q.max(1) {
        if (1 + p * u).is_multiple_of(q) {
            return (u, (1 + p * u) / q);
        }
    }
    unreachable!("p and q are coprime")
}

/// Coefficients after `x = λ x'^q`, `y = x'^p (μ + y')`, divided by `x'^m`.
fn transform(g: &[TSeries], p: u32, q: u32, m: u32, lambda: &Scalar, mu: &Scalar, cap: u32) -> Vec<TSeries> {
    let mut h: Vec<TSeries> = g
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let shift = (p * j as u32) as i64 - m as i64;
            // Exact data stays exact while it is short; long series are capped.
            let short = s.is_exact() && (s.coeffs().len() as i64 * q as i64 + shift) <= 4 * cap as i64;
            if !short && shift >= cap as i64 {
                return TSeries::unknown(cap);
            }
            let s = if short { s.clone() } else { s.truncate(cap.saturating_add(m)) };
            let s = s.subst_monomial(lambda, q);
            let s = if shift >= 0 { s.shift(shift as u32) } else { s.unshift((-shift) as u32) };
            if short {
                s
            } else {
                s.truncate(cap)
            }
        })
        .collect();
    // Taylor shift in y: Σ H_j (μ + y')^j.
    let n = h.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let add = h[j + 1].scale(mu);
            h[j] = h[j].add(&add);
        }
    }
    h
}

/// Solves `Σ G_j(x) y^j = 0` for `y(0) = 0` when `G_1(0) ≠ 0`.
fn newton_lift(g: &[TSeries], cap: u32) -> TSeries {
    let prec = g.iter().filter_map(|s| s.precision()).min().unwrap_or(cap).min(cap);
    let mut y = TSeries::zero();
    let mut n = 1u32;
    loop {
        n = (2 * n).min(prec);
        let gt: Vec<TSeries> = g.iter().map(|s| s.truncate(n)).collect();
        let mut val = gt.last().cloned().unwrap();
        for s in gt.iter().rev().skip(1) {
            val = val.mul_cap(&y, Some(n)).add(s);
        }
        let jmax = gt.len() - 1;
        let mut der = gt[jmax].scale(&Scalar::int(jmax as i64));
        for j in (1..jmax).rev() {
            der = der.mul_cap(&y, Some(n)).add(&gt[j].scale(&Scalar::int(j as i64)));
        }
        let inv = der.inverse_unit(n);
        // The iterate is an exact polynomial approximant, not a truncated series.
        y = TSeries::exact(y.sub(&val.mul_cap(&inv, Some(n))).truncate(n).coeffs().to_vec());
        if n >= prec {
            break;
        }
    }
    y.truncate(prec)
}

fn finish(node: &Node, y_last: TSeries, ctx: &Ctx) -> Branch {
    // x_i as monomials c t^e in the final parameter.
    let k = node.levels.len();
    let mut xs: Vec<(Scalar, u32)> = vec![(Scalar::int(1), 1); k + 1];
    for i in (0..k).rev() {
        let l = &node.levels[i];
        let (c, e) = &xs[i + 1];
        xs[i] = (l.lambda.fmul(&c.pow(l.q as i64)), e * l.q);
    }
    let mut y = y_last;
    if k > 0 {
        // y_last is a series in x_k = t already.
        for i in (0..k).rev() {
            let l = &node.levels[i];
            let (c, e) = &xs[i + 1];
            let lead = TSeries::monomial(c.pow(l.p as i64), e * l.p);
            let inner = TSeries::exact(vec![l.mu.clone()]).add(&y);
            y = lead.mul(&inner);
        }
    }
    let alpha = TSeries::monomial(xs[0].0.clone(), xs[0].1);
    let field_note = match &node.field {
        None => "rational".to_string(),
        Some(f) => f.describe(),
    };
    Branch {
        curve: CurveGerm { alpha, beta: y },
        multiplicity: ctx.multiplicity,
        conjugates: node.conjugates,
        field_note,
    }
}

/// Support exponents of both components share no common factor.
pub fn is_primitive(c: &CurveGerm) -> bool {
    let mut g = 0u32;
    for s in [&c.alpha, &c.beta] {
        for (i, x) in s.coeffs().iter().enumerate() {
            if !x.is_zero_c() {
                g = g.gcd(&(i as u32));
            }
        }
    }
    g == 1
}

/// Convenience: monomial `z^a w^b` as a polynomial.
pub fn monomial(a: u32, b: u32) -> BiPoly {
    BiPoly::from_terms([(Mono::new(a, b), Scalar::int(1))], None)
}

/// ν of the source germ as a consistency anchor for [`BranchSet::degree_count`].
pub fn expected_degree(f: &BiPoly) -> ExtOrder {
    nu(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_poly;

    fn p(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    fn check_all(f: &BiPoly, set: &BranchSet) {
        for b in &set.branches {
            assert!(verify_branch(f, b), "branch {b} fails for {f}");
            assert!(is_primitive(&b.curve), "branch {b} not primitive");
        }
        assert_eq!(set.degree_count(), nu(f), "degree count for {f}");
    }

    #[test]
    fn polygon_examples() {
        let np = newton_polygon(&p("w^2 - z^3")).unwrap();
        assert_eq!(np.edges, vec![Edge { from: (3, 0), to: (0, 2) }]);
        assert_eq!(np.edges[0].slope(), Rat::new((-2).into(), 3.into()));
        assert!(newton_polygon(&p("z*w")).unwrap().edges.is_empty());
        let np = newton_polygon(&p("3*z^2 + w^7")).unwrap();
        assert_eq!(np.edges, vec![Edge { from: (2, 0), to: (0, 7) }]);
    }

    #[test]
    fn cusp_branch() {
        let f = p("w^2 - z^3");
        let set = branches(&f, 32).unwrap();
        assert_eq!(set.branches.len(), 1);
        let b = &set.branches[0];
        assert_eq!(b.curve.alpha, TSeries::t_pow(2));
        assert_eq!(b.curve.beta, TSeries::t_pow(3));
        check_all(&f, &set);
    }

    #[test]
    fn axis_branches() {
        let f = p("z*w");
        let set = branches(&f, 32).unwrap();
        assert_eq!(set.branches.len(), 2);
        check_all(&f, &set);
    }

    #[test]
    fn extension_branches() {
        let f = p("6*z*w^2 + 2*z^11");
        let set = branches(&f, 32).unwrap();
        assert_eq!(set.branches.len(), 2);
        assert_eq!(set.branches[0].curve.alpha, TSeries::zero());
        let b = &set.branches[1];
        assert_eq!(b.conjugates, 2);
        assert!(b.curve.beta.is_exact());
        assert_eq!(b.curve.beta.order(), SeriesOrder::Exact(5));
        let c = b.curve.beta.coeff(5).unwrap();
        assert_eq!(c.fmul(&c), Scalar::Rat(Rat::new((-1).into(), 3.into())));
        check_all(&f, &set);
    }

    #[test]
    fn heier_branch_is_exact() {
        for k in [3, 5, 7, 9] {
            let f = p(&format!("3*z^2 + w^{k}"));
            let set = branches(&f, 64).unwrap();
            assert_eq!(set.branches.len(), 1);
            assert!(set.branches[0].curve.beta.is_exact());
            check_all(&f, &set);
        }
    }

    #[test]
    fn nonreduced_and_series_branches() {
        let f = p("w^2 - z^3").pow(2).mul(&p("w - z - z^2"));
        let set = branches(&f, 32).unwrap();
        assert_eq!(set.branches.len(), 2);
        assert!(set.branches.iter().any(|b| b.multiplicity == 2));
        check_all(&f, &set);
        let g = p("w - z^2 + w^3");
        let set = branches(&g, 20).unwrap();
        assert_eq!(set.branches.len(), 1);
        assert_eq!(set.branches[0].curve.beta.precision(), Some(20));
        check_all(&g, &set);
    }

    #[test]
    fn tangent_branches_separate_late() {
        // Two branches w = z^2 ± z^3 share their first term.
        let f = p("w - z^2 - z^3").mul(&p("w - z^2 + z^3"));
        let set = branches(&f, 24).unwrap();
        assert_eq!(set.branches.len(), 2);
        check_all(&f, &set);
        // Higher-genus: (w^2 - z^3)^2 - 4 z^5 w - z^7.
        let f = p("w^4 - 2*z^3*w^2 + z^6 - 4*z^5*w - z^7");
        let set = branches(&f, 40).unwrap();
        check_all(&f, &set);
    }
}

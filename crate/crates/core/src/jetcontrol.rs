//! Jet-order control under Jacobian determinants: transversality of the
//! minimal derivative, the controlled Jacobian step, and the descent
//! iterations built from it.
//!
//! Jet orders ν^k_γ are invariant under linear coordinate changes (the span
//! of the partials of order ≤ k is preserved) and the Jacobian determinant
//! only picks up a constant factor, so all orders are computed in the
//! original coordinates. The normalizing change is still computed and
//! recorded, since the transversality conclusion names ∂_z^k in the
//! normalized frame.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{BiPoly, Coeff, Rat, Scalar, Var};
use crate::germs::{normalize_curve, nu, nu_gamma, nu_k_gamma, CoordChange, CurveGerm, ExtOrder, Germ};
use crate::puiseux::Branch;

/// G = ∂_z f · ∂_w φ − ∂_w f · ∂_z φ.
pub fn jacobian_det(f: &BiPoly, phi: &BiPoly) -> BiPoly {
    let fz = f.partial(Var::Z);
    let fw = f.partial(Var::W);
    let pz = phi.partial(Var::Z);
    let pw = phi.partial(Var::W);
    fz.mul(&pw).sub(&fw.mul(&pz))
}

pub fn jacobian_germ(f: &Germ, phi: &Germ) -> Germ {
    Germ::new(jacobian_det(&f.poly, &phi.poly), format!("det(d{}, d{})", f.label, phi.label))
}

fn one() -> Rat {
    Rat::from_integer(1.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransversalResult {
    pub holds: bool,
    /// ν^{k−1}_γ(F) and ν^k_γ(F).
    pub lower_jet: ExtOrder,
    pub jet: ExtOrder,
    /// ν_γ(∂_z^k F) in the normalized frame, when the hypothesis holds.
    pub value: Option<ExtOrder>,
    pub change: CoordChange,
}

/// If ν^{k−1}_γ(F) > ν^k_γ(F) + 1, checks that ν^k_γ(F) = ν_γ(∂_z^k F) after
/// normalizing γ to ν(α) > ν(β).
pub fn transversal_min(f: &BiPoly, k: u32, g: &CurveGerm) -> Result<TransversalResult> {
    if k == 0 {
        return Err(Error::InvalidInput("transversality needs k >= 1".into()));
    }
    let (gn, change, ctx) = normalize_curve(g, std::slice::from_ref(f))?;
    let fnorm = &ctx[0];
    let lower_jet = nu_k_gamma(fnorm, k - 1, &gn);
    let jet = nu_k_gamma(fnorm, k, &gn);
    let holds = lower_jet.gt(&jet.add_rat(&one()))?;
    let mut value = None;
    if holds {
        let v = nu_gamma(&fnorm.partial_k(k, 0), &gn);
        if !v.eq_decided(&jet)? {
            return Err(Error::InvariantViolation(format!(
                "minimal derivative of order {k} of {f} along {g} is not the transversal one: {v} vs {jet}"
            )));
        }
        value = Some(v);
    }
    Ok(TransversalResult { holds, lower_jet, jet, value, change })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControlledResult {
    pub applies: bool,
    pub g: BiPoly,
    /// ν^k_γ(F) + ν_γ(φ) − 1 when the hypothesis holds.
    pub asserted: Option<ExtOrder>,
    /// ν^{k−1}_γ(G), recomputed directly.
    pub recomputed: ExtOrder,
    pub change: CoordChange,
}

fn require_order_two(phi: &BiPoly) -> Result<()> {
    if !nu(phi).ge(&ExtOrder::int(2))? {
        return Err(Error::InvalidInput(format!("premultiplier {phi} has vanishing order below 2")));
    }
    Ok(())
}

/// The controlled Jacobian step: when ν^{k−1}_γ(F) > ν^k_γ(F) + ν_γ(φ) − 1,
/// ν^{k−1}_γ(det(∂F, ∂φ)) equals the right-hand side; this is rechecked.
pub fn controlled_jacobian(f: &BiPoly, phi: &BiPoly, k: u32, g: &CurveGerm) -> Result<ControlledResult> {
    require_order_two(phi)?;
    if k == 0 {
        return Err(Error::InvalidInput("controlled Jacobian needs k >= 1".into()));
    }
    let (_, change, _) = normalize_curve(g, &[])?;
    let rhs = nu_k_gamma(f, k, g).add(&nu_gamma(phi, g)).add_rat(&-one());
    let applies = nu_k_gamma(f, k - 1, g).gt(&rhs)?;
    let gdet = jacobian_det(f, phi);
    let recomputed = nu_k_gamma(&gdet, k - 1, g);
    let asserted = if applies {
        if !recomputed.eq_decided(&rhs)? {
            return Err(Error::InvariantViolation(format!(
                "controlled Jacobian of {f} and {phi} along {g} at k={k}: expected {rhs}, found {recomputed}"
            )));
        }
        Some(rhs)
    } else {
        None
    };
    Ok(ControlledResult { applies, g: gdet, asserted, recomputed, change })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Kept,
    Jacobian,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Kept => "kept",
            StepKind::Jacobian => "jacobian",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentStep {
    pub g: BiPoly,
    pub kind: StepKind,
    /// ν^k_γ(F) + ν_γ(φ) − 1.
    pub bound: ExtOrder,
    /// ν^{k−1}_γ(G).
    pub realized: ExtOrder,
}

/// One descent step from jet level k to k − 1: G ∈ {F, det(∂F, ∂φ)} with
/// ν^{k−1}_γ(G) ≤ ν^k_γ(F) + ν_γ(φ) − 1, preferring G = F.
pub fn descend_one(f: &BiPoly, phi: &BiPoly, k: u32, g: &CurveGerm) -> Result<DescentStep> {
    require_order_two(phi)?;
    if k == 0 {
        return Err(Error::InvalidInput("descent needs k >= 1".into()));
    }
    let bound = nu_k_gamma(f, k, g).add(&nu_gamma(phi, g)).add_rat(&-one());
    let lower = nu_k_gamma(f, k - 1, g);
    if lower.le(&bound)? {
        return Ok(DescentStep { g: f.clone(), kind: StepKind::Kept, bound, realized: lower });
    }
    let c = controlled_jacobian(f, phi, k, g)?;
    debug_assert!(c.applies);
    if !c.recomputed.le(&bound)? {
        return Err(Error::InvariantViolation(format!("descent bound {bound} exceeded by {}", c.recomputed)));
    }
    Ok(DescentStep { g: c.g, kind: StepKind::Jacobian, bound, realized: c.recomputed })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryEntry {
    pub germ: Germ,
    pub kind: StepKind,
    /// Jet level of the recorded order.
    pub k: u32,
    pub realized: ExtOrder,
    pub bound: ExtOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentState {
    pub current: Germ,
    pub history: Vec<HistoryEntry>,
    pub gamma: CurveGerm,
    pub phi: Germ,
    pub change: CoordChange,
    /// Index j of the final f_j (1 + number of Jacobian steps).
    pub j: u32,
    /// (ν(f) − target)(ν_γ(φ) − 1).
    pub final_bound: ExtOrder,
}

/// Descends from k = ν(f) to `target_k`; the final f_j satisfies
/// ν^{target}_γ(f_j) ≤ (ν(f) − target)(ν_γ(φ) − 1) with j ≤ ν(f) − target + 1.
pub fn descend_chain(f: &Germ, phi: &Germ, g: &CurveGerm, target_k: u32) -> Result<DescentState> {
    require_order_two(&phi.poly)?;
    let nf = nu(&f.poly).as_int().ok_or_else(|| Error::precision(format!("vanishing order of {} undecided", f.label)))? as u32;
    if target_k > nf {
        return Err(Error::InvalidInput(format!("target jet level {target_k} exceeds ν(f) = {nf}")));
    }
    let (_, change, _) = normalize_curve(g, &[])?;
    let nphi = nu_gamma(&phi.poly, g);
    let base = nu_k_gamma(&f.poly, nf, g);
    let mut history = vec![HistoryEntry { germ: f.clone(), kind: StepKind::Kept, k: nf, realized: base.clone(), bound: ExtOrder::int(0) }];
    if !base.le(&ExtOrder::int(0))? {
        return Err(Error::InvariantViolation(format!("ν^{nf}_γ({}) = {base} is not 0", f.label)));
    }
    let mut cur = f.clone();
    let mut j = 1u32;
    let mut k = nf;
    while k > target_k {
        let step = descend_one(&cur.poly, &phi.poly, k, g)?;
        if step.kind == StepKind::Jacobian {
            j += 1;
            let base_label = f.label.trim_end_matches(|c: char| c.is_ascii_digit());
            cur = Germ::new(step.g, format!("{base_label}{j} = det(d{}, d{})", cur.label.split(' ').next().unwrap_or(""), phi.label));
        }
        k -= 1;
        history.push(HistoryEntry { germ: cur.clone(), kind: step.kind, k, realized: step.realized, bound: step.bound });
    }
    let slope = nphi.add_rat(&-one());
    let final_bound = match &slope {
        ExtOrder::Exact(v) => ExtOrder::Exact(v * Rat::from_integer(((nf - target_k) as i64).into())),
        other => other.clone(),
    };
    let realized = history.last().unwrap().realized.clone();
    if !realized.le(&final_bound)? {
        return Err(Error::InvariantViolation(format!("descent chain order {realized} exceeds {final_bound}")));
    }
    if j > nf - target_k + 1 {
        return Err(Error::InvariantViolation(format!("descent chain used {j} steps")));
    }
    Ok(DescentState { current: cur, history, gamma: g.clone(), phi: phi.clone(), change, j, final_bound })
}

/// Polynomial scaled so that its grlex-leading coefficient is 1.
pub fn monic_form(p: &BiPoly) -> BiPoly {
    match p.leading() {
        Some((_, c)) => p.scale(&c.finv()),
        None => p.clone(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCertificate {
    pub level: u32,
    /// k = d − level.
    pub k: u32,
    pub value: ExtOrder,
    pub bound: ExtOrder,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetLevel {
    pub members: Vec<BiPoly>,
    pub certificate: Option<LevelCertificate>,
}

pub const DEFAULT_SET_CAP: usize = 256;

/// S_{j+1} = S_j ∪ {det(∂f, ∂φ) : f ∈ S_j ∪ Φ, φ ∈ Φ}, for j < d, with
/// τ^{d−j}(S_j) ≤ j(τ(Φ) − 1) checked along `along` when ν(Φ) ≥ 2.
pub fn set_descent(s0: &[BiPoly], phi: &[BiPoly], d: u32, tau_phi: u32, along: &[Branch], cap: usize) -> Result<Vec<SetLevel>> {
    let phi_ok = phi.iter().all(|p| nu(p).ge(&ExtOrder::int(2)).unwrap_or(false));
    let mut seen: Vec<BiPoly> = Vec::new();
    let mut cur: Vec<BiPoly> = Vec::new();
    for p in s0 {
        let m = monic_form(p);
        if !p.is_zero() && !seen.contains(&m) {
            seen.push(m);
            cur.push(p.clone());
        }
    }
    let mut out = Vec::new();
    for j in 0..=d {
        let certificate = if phi_ok && !along.is_empty() {
            let k = d - j;
            let mut value = ExtOrder::int(0);
            for b in along {
                let mut m = ExtOrder::Infinite;
                for f in &cur {
                    m = m.min(&nu_k_gamma(f, k, &b.curve));
                }
                value = value.max(&m);
            }
            let bound = ExtOrder::int(j as i64 * (tau_phi as i64 - 1));
            let pass = value.le(&bound)?;
            Some(LevelCertificate { level: j, k, value, bound, pass })
        } else {
            None
        };
        out.push(SetLevel { members: cur.clone(), certificate });
        if j == d {
            break;
        }
        let mut next = cur.clone();
        let sources: Vec<BiPoly> = cur.iter().chain(phi.iter()).cloned().collect();
        for f in &sources {
            for p in phi {
                let g = jacobian_det(f, p);
                if g.is_zero() {
                    continue;
                }
                let m = monic_form(&g);
                if !seen.contains(&m) {
                    seen.push(m);
                    next.push(g);
                    if next.len() > cap {
                        return Err(Error::Unsupported(format!(
                            "set descent exceeded {cap} members at level {}; run the per-branch descent chain instead",
                            j + 1
                        )));
                    }
                }
            }
        }
        cur = next;
    }
    Ok(out)
}

/// Scalar helper used by callers building combinations.
pub fn scaled(p: &BiPoly, c: i64) -> BiPoly {
    p.scale(&Scalar::int(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_poly;

    fn p(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    fn axis() -> CurveGerm {
        CurveGerm::monomial(None, Some(1)).unwrap()
    }

    #[test]
    fn jacobians() {
        assert_eq!(jacobian_det(&p("z^3 + z*w^7"), &p("w")), p("3*z^2 + w^7"));
        assert_eq!(jacobian_det(&p("z^2"), &p("w^3 + z^10*w")), p("6*z*w^2 + 2*z^11"));
        assert!(jacobian_det(&p("z^2 + w"), &p("z^2 + w")).is_zero());
    }

    #[test]
    fn transversality() {
        let r = transversal_min(&p("z^2 + w^5"), 2, &axis()).unwrap();
        assert!(r.holds);
        assert_eq!(r.value, Some(ExtOrder::int(0)));
        let r = transversal_min(&p("w^2 + z*w^2"), 1, &axis()).unwrap();
        assert!(!r.holds);
        assert_eq!((r.lower_jet, r.jet), (ExtOrder::int(2), ExtOrder::int(1)));
    }

    #[test]
    fn controlled_examples() {
        let r = controlled_jacobian(&p("z^2 + w^5"), &p("w^2"), 2, &axis()).unwrap();
        assert!(r.applies);
        assert_eq!(r.g, p("4*z*w"));
        assert_eq!(r.recomputed, ExtOrder::int(1));
        // The z*w^2 terms of degree k-1 in z cancel, but the z*w^2 coming
        // from z^{k-1} w^s times a*z survives: G = 6z^2 + 3zw^2 + 3w^4.
        let r = controlled_jacobian(&p("z^2 + z*w^2"), &p("w^3 + 3*z*w"), 2, &axis()).unwrap();
        assert!(!r.applies);
        assert_eq!(r.g, p("6*z^2 + 3*z*w^2 + 3*w^4"));
        assert_eq!(r.recomputed, ExtOrder::int(2));
        assert!(matches!(controlled_jacobian(&p("z^2"), &p("w"), 1, &axis()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn chain_on_family() {
        let f = Germ::new(p("6*z*w^2 + 2*z^11"), "f1");
        let phi = Germ::new(p("w^3 + z^10*w"), "F2");
        let st = descend_chain(&f, &phi, &axis(), 0).unwrap();
        let kinds: Vec<StepKind> = st.history.iter().skip(1).map(|h| h.kind).collect();
        assert_eq!(kinds, vec![StepKind::Kept, StepKind::Kept, StepKind::Jacobian]);
        assert_eq!(st.history.last().unwrap().realized, ExtOrder::int(4));
        assert_eq!(st.j, 2);
        let mid = &st.history[2];
        assert_eq!((mid.k, mid.realized.clone()), (1, ExtOrder::int(2)));
    }

    #[test]
    fn set_descent_levels() {
        let s0 = [p("z^2")];
        let phi = [p("z^2"), p("w^3 + z^10*w")];
        let v = crate::puiseux::branches(&p("6*z*w^2 + 2*z^11"), 32).unwrap();
        let levels = set_descent(&s0, &phi, 2, 3, &v.branches, DEFAULT_SET_CAP).unwrap();
        assert_eq!(levels.len(), 3);
        assert!(levels.iter().all(|l| l.certificate.as_ref().unwrap().pass));
        assert!(levels[1].members.contains(&p("6*z*w^2 + 2*z^11")));
    }
}

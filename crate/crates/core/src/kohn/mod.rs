//! The effective multiplier construction for special domains
//! Re z₃ + Σ|F_j(z, w)|² < 0, and a restricted version of the classic
//! radical-based procedure for comparison.

mod classic;

pub use classic::{classic_kohn, compare_modes, ClassicLevel, ClassicState, CompareRow};

use crate::error::{Error, Result};
use crate::exactalg::{BiPoly, Coeff, Rat, Var};
use crate::generic::GenericSource;
use crate::germs::{nu, nu_gamma, nu_k_gamma, ExtOrder, Germ};
use crate::invariants::{contact_order, dangelo_type, multiplicity, Candidates, Exactness, Method};
use crate::jetcontrol::{descend_chain, jacobian_det, monic_form, HistoryEntry, StepKind};
use crate::membership::{default_budget, local_basis, reduces_to_zero, staircase};
use crate::puiseux::{branches, BranchSet};

/// Retries for a seeded generic combination before giving up.
pub const GENERIC_RETRIES: usize = 8;
pub const DEFAULT_TRUNCATION: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct SpecialDomain {
    pub premultipliers: Vec<Germ>,
    pub type_hint: Option<u32>,
    /// Degree L of explicit perturbation tails, if the input carries them.
    pub perturbation_degree: Option<u32>,
}

impl SpecialDomain {
    pub fn new(polys: Vec<BiPoly>, type_hint: Option<u32>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidInput("at least one premultiplier is required".into()));
        }
        let mut premultipliers = Vec::new();
        for (i, p) in polys.into_iter().enumerate() {
            if p.is_zero() || p.truncation().is_some() {
                return Err(Error::InvalidInput(format!("premultiplier {} must be a nonzero exact polynomial", i + 1)));
            }
            if !p.constant_term().is_zero_c() {
                return Err(Error::InvalidInput(format!("premultiplier {p} does not vanish at 0")));
            }
            premultipliers.push(Germ::new(p, format!("F{}", i + 1)));
        }
        Ok(SpecialDomain { premultipliers, type_hint, perturbation_degree: None })
    }

    pub fn polys(&self) -> Vec<BiPoly> {
        self.premultipliers.iter().map(|g| g.poly.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Series truncation N; the precision ladder is capped at min(4N, 256).
    pub truncation: u32,
    pub verify_membership: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: crate::generic::default_seed(), truncation: DEFAULT_TRUNCATION, verify_membership: false }
    }
}

pub fn precision_ladder(truncation: u32) -> Vec<u32> {
    let cap = (4 * truncation).min(256);
    let mut v: Vec<u32> = [32, 64, 128, 256].into_iter().filter(|&p| p < cap).collect();
    v.push(cap);
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainElement {
    pub label: String,
    pub poly: BiPoly,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub bound: String,
    pub realized: String,
    pub pass: bool,
}

impl BoundCheck {
    fn orders(name: impl Into<String>, bound: &ExtOrder, realized: &ExtOrder) -> Result<Self> {
        Ok(BoundCheck { name: name.into(), bound: bound.to_string(), realized: realized.to_string(), pass: realized.le(bound)? })
    }

    fn ints(name: impl Into<String>, bound: i128, realized: i128) -> Self {
        BoundCheck { name: name.into(), bound: bound.to_string(), realized: realized.to_string(), pass: realized <= bound }
    }
}

fn r(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

fn fmt_ratio(q: &Rat) -> String {
    crate::exactalg::fmt_rat(q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step1Log {
    pub m: u32,
    pub f: Germ,
    pub gamma: String,
    pub phi: Germ,
    pub nu_gamma_phi: ExtOrder,
    pub mu: Option<ExtOrder>,
    pub k0: Option<u32>,
    pub f1: BiPoly,
    pub nu_f1: u32,
    /// Whether the determinant was negated to make its leading coefficient positive.
    pub negated: bool,
}

/// Orients a multiplier so that its graded-lex leading coefficient is positive.
fn orient(p: BiPoly) -> (BiPoly, bool) {
    match p.leading() {
        Some((_, c)) if c.sign_hint() < 0 => (p.neg(), true),
        _ => (p, false),
    }
}

fn int_order(o: &ExtOrder, what: &str) -> Result<u32> {
    match o.as_int() {
        Some(v) if v >= 0 => Ok(v as u32),
        _ => Err(Error::precision(format!("{what} is {o}, not a decided integer"))),
    }
}

/// Step 1: f of minimal order, a branch γ of {f = 0}, the member φ of least
/// finite order along γ, and f₁ = det(∂f, ∂φ).
pub fn step1(s: &[Germ], t_bound: u32, precision: u32) -> Result<Step1Log> {
    let polys: Vec<BiPoly> = s.iter().map(|g| g.poly.clone()).collect();
    let m = int_order(&crate::invariants::nu_set(&polys), "ν(S)")?;
    let f = s.iter().find(|g| nu(&g.poly).as_int() == Some(m as i64)).cloned().expect("ν(S) is attained");
    let v = branches(&f.poly, precision)?;
    let gamma = v
        .branches
        .first()
        .ok_or_else(|| Error::InvalidInput(format!("{} has no zero curve through 0", f.label)))?
        .curve
        .clone();
    let mut best: Option<(ExtOrder, &Germ)> = None;
    for g in s {
        let o = nu_gamma(&g.poly, &gamma);
        if o.is_infinite() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, _)) => o.lt(b)?,
        };
        if better {
            best = Some((o, g));
        }
    }
    let (nphi, phi) = best.ok_or_else(|| Error::InfiniteType { witness: format!("every premultiplier vanishes along {gamma}") })?;
    if !nphi.le(&ExtOrder::int(t_bound as i64))? {
        return Err(Error::InvariantViolation(format!("ν_γ({}) = {nphi} exceeds the type bound {t_bound}", phi.label)));
    }
    let mut mu: Option<ExtOrder> = None;
    let mut k0 = None;
    for k in 1..=m {
        let jk = nu_k_gamma(&f.poly, k, &gamma);
        let rhs = jk.add(&nphi).add_rat(&-r(1));
        if nu_k_gamma(&f.poly, k - 1, &gamma).gt(&rhs)? {
            let cand = jk.add_rat(&r(k as i64 - 1));
            mu = Some(match mu {
                None => cand,
                Some(x) => x.min(&cand),
            });
            k0 = Some(k);
        }
    }
    let (f1, negated) = orient(jacobian_det(&f.poly, &phi.poly));
    if f1.is_zero() {
        return Err(Error::InvariantViolation(format!("det(∂{}, ∂{}) vanishes identically", f.label, phi.label)));
    }
    let nu_f1 = int_order(&nu(&f1), "ν(f1)")?;
    Ok(Step1Log { m, f, gamma: gamma.to_string(), phi: phi.clone(), nu_gamma_phi: nphi, mu, k0, f1, nu_f1, negated })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchLog {
    pub branch: String,
    pub multiplicity: u32,
    pub conjugates: u32,
    pub phi_order: ExtOrder,
    pub steps: Vec<HistoryEntry>,
    pub terminal: String,
    pub terminal_order: ExtOrder,
    pub ftilde_order: ExtOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step2Result {
    pub phi: BiPoly,
    pub phi_coefficients: Vec<i64>,
    /// Distinct multipliers produced by the per-branch descents, in order.
    pub produced: Vec<Germ>,
    pub terminals: Vec<Germ>,
    pub ftilde: BiPoly,
    pub ftilde_coefficients: Vec<i64>,
    pub t_bound: ExtOrder,
    pub logs: Vec<BranchLog>,
    pub retries: usize,
}

fn min_order(polys: &[BiPoly], b: &crate::puiseux::Branch) -> ExtOrder {
    polys.iter().fold(ExtOrder::Infinite, |acc, p| acc.min(&nu_gamma(p, &b.curve)))
}

fn position_up_to_scalar(list: &[Germ], p: &BiPoly) -> Option<usize> {
    let m = monic_form(p);
    list.iter().position(|g| monic_form(&g.poly) == m)
}

/// Step 2: per branch of {f₁ = 0}, descend with one seeded generic φ ∈ span(S)
/// and combine the distinct terminal multipliers into F̃.
pub fn step2(f1: &BiPoly, s: &[Germ], t_bound: u32, v: &BranchSet, gen: &mut GenericSource) -> Result<Step2Result> {
    let d = int_order(&nu(f1), "ν(f1)")?;
    let polys: Vec<BiPoly> = s.iter().map(|g| g.poly.clone()).collect();
    let tb = ExtOrder::int(t_bound as i64);
    let mut retries = 0;
    let (phi, phi_coefficients) = loop {
        let (phi, cs) = gen.combination(&polys);
        let mut ok = nu(&phi).ge(&ExtOrder::int(2))?;
        for b in &v.branches {
            if !ok {
                break;
            }
            let o = nu_gamma(&phi, &b.curve);
            ok = o.eq_decided(&min_order(&polys, b))? && o.le(&tb)?;
        }
        if ok {
            break (phi, cs);
        }
        retries += 1;
        if retries >= GENERIC_RETRIES {
            return Err(Error::GenericityExhausted(format!("no combination of S with generic orders along the branches of {f1}")));
        }
    };
    let phi_label = "phi";
    let phi_germ = Germ::new(phi.clone(), phi_label);
    let f1_germ = Germ::new(f1.clone(), "f1");
    let bound = ExtOrder::int(d as i64 * (t_bound as i64 - 1));
    let mut produced: Vec<Germ> = Vec::new();
    let mut terminals: Vec<Germ> = Vec::new();
    let mut logs = Vec::new();
    for b in &v.branches {
        let st = descend_chain(&f1_germ, &phi_germ, &b.curve, 0)?;
        // Relabel the chain's Jacobian steps against the merged list.
        let mut prev_label = "f1".to_string();
        let mut steps = Vec::new();
        for h in &st.history {
            let mut h = h.clone();
            if h.kind == StepKind::Jacobian {
                let label = match position_up_to_scalar(&produced, &h.germ.poly) {
                    Some(i) => produced[i].label.split(' ').next().unwrap_or("").to_string(),
                    None => {
                        let label = format!("g{}", produced.len() + 1);
                        produced.push(Germ::new(h.germ.poly.clone(), format!("{label} = det(d{prev_label}, dphi)")));
                        label
                    }
                };
                h.germ.label = label;
            } else {
                h.germ.label = prev_label.clone();
            }
            prev_label = h.germ.label.split(' ').next().unwrap_or("").to_string();
            steps.push(h);
        }
        let terminal_order = st.history.last().unwrap().realized.clone();
        if !terminal_order.le(&bound)? {
            return Err(Error::InvariantViolation(format!("terminal order {terminal_order} along {} exceeds {bound}", b.curve)));
        }
        let term = Germ::new(st.current.poly.clone(), prev_label.clone());
        if position_up_to_scalar(&terminals, &term.poly).is_none() {
            terminals.push(term);
        }
        logs.push(BranchLog {
            branch: b.curve.to_string(),
            multiplicity: b.multiplicity,
            conjugates: b.conjugates,
            phi_order: nu_gamma(&phi, &b.curve),
            steps,
            terminal: prev_label,
            terminal_order,
            ftilde_order: ExtOrder::Infinite,
        });
    }
    let tpolys: Vec<BiPoly> = terminals.iter().map(|g| g.poly.clone()).collect();
    let mut tries = 0;
    let (ftilde, ftilde_coefficients) = loop {
        let (ft, cs) = if tpolys.len() == 1 { (tpolys[0].clone(), vec![1]) } else { gen.combination(&tpolys) };
        let mut ok = !ft.is_zero();
        for b in &v.branches {
            if !ok {
                break;
            }
            let o = nu_gamma(&ft, &b.curve);
            ok = o.eq_decided(&min_order(&tpolys, b))? && o.le(&bound)?;
        }
        if ok {
            break (ft, cs);
        }
        tries += 1;
        if tries >= GENERIC_RETRIES || tpolys.len() == 1 {
            return Err(Error::GenericityExhausted("no generic combination of the terminal multipliers".into()));
        }
    };
    for (log, b) in logs.iter_mut().zip(&v.branches) {
        log.ftilde_order = nu_gamma(&ftilde, &b.curve);
    }
    Ok(Step2Result {
        phi,
        phi_coefficients,
        produced,
        terminals,
        ftilde,
        ftilde_coefficients,
        t_bound: bound,
        logs,
        retries: retries + tries,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step3Result {
    pub d: u32,
    pub t: Rat,
    pub a: u64,
    pub multiplicity: ExtOrder,
    pub tail: Vec<ChainElement>,
}

/// Step 3: a = ⌊d·t⌋ with d = ν(F) and t the contact order of F̃ along {F = 0};
/// then z, w as roots of order a and det(∂z, ∂w) = 1.
pub fn step3(f: &BiPoly, ftilde: &BiPoly, v: &BranchSet) -> Result<Step3Result> {
    let d = int_order(&nu(f), "ν(F)")?;
    let t = match contact_order(ftilde, v)? {
        ExtOrder::Exact(t) => t,
        ExtOrder::Infinite => return Err(Error::CommonBranch(format!("{ftilde} vanishes on a branch of {f}"))),
        ExtOrder::AtLeast(q) => return Err(Error::precision(format!("contact order only known to be at least {}", fmt_ratio(&q)))),
    };
    let dt = &t * r(d as i64);
    let a = dt.floor().to_integer();
    let a = u64::try_from(a).map_err(|_| Error::InvariantViolation("negative root order".into()))?.max(1);
    let mult = multiplicity(f, ftilde, Method::BranchSum)?;
    let root = |var: &str| ChainElement {
        label: var.to_string(),
        poly: BiPoly::var(if var == "z" { Var::Z } else { Var::W }),
        provenance: format!("root of order {a}: {var}^{a} in (F, Ftilde)"),
    };
    let tail = vec![
        root("z"),
        root("w"),
        ChainElement { label: "1".into(), poly: BiPoly::int(1), provenance: "det(dz, dw)".into() },
    ];
    Ok(Step3Result { d, t, a, multiplicity: mult, tail })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Path {
    /// Steps 1–3 with a single radical of controlled order.
    Effective,
    /// Repeated determinants against a premultiplier of order 1; no radical.
    LinearPremultiplier,
}

impl Path {
    pub fn name(&self) -> &'static str {
        match self {
            Path::Effective => "effective",
            Path::LinearPremultiplier => "linear-premultiplier",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub generators: Vec<BiPoly>,
    pub degree_budget: u32,
    pub certified: bool,
    pub z_power: bool,
    pub w_power: bool,
    pub staircase: u64,
}

impl MembershipReport {
    pub fn verified(&self) -> bool {
        self.certified && self.z_power && self.w_power
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub path: Path,
    pub premultipliers: Vec<Germ>,
    pub seed: u64,
    pub precision: u32,
    pub type_bound: u32,
    pub type_source: String,
    pub m: u32,
    pub d: u32,
    pub t: Option<Rat>,
    pub a: u64,
    pub l: usize,
    pub epsilon: Rat,
    pub chain: Vec<ChainElement>,
    pub step1: Step1Log,
    pub step2: Option<Step2Result>,
    pub multiplicity: Option<ExtOrder>,
    pub bound_checks: Vec<BoundCheck>,
    pub membership: Option<MembershipReport>,
    pub warnings: Vec<String>,
}

impl Certificate {
    pub fn all_checks_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass) && self.membership.as_ref().is_none_or(|m| m.verified())
    }

    pub fn ftilde(&self) -> Option<&BiPoly> {
        self.step2.as_ref().map(|s| &s.ftilde)
    }
}

/// The type bound T and a description of where it came from.
pub fn type_bound(domain: &SpecialDomain, seed: u64) -> Result<(u32, String)> {
    let report = dangelo_type(&domain.polys(), Candidates::Auto { seed })?;
    let lower = report.lower.clone();
    let computed = match (&report.upper, &report.exactness) {
        (ExtOrder::Exact(u), _) => Some(u.ceil().to_integer()),
        _ => None,
    };
    match domain.type_hint {
        Some(h) => {
            if !lower.le(&ExtOrder::int(h as i64))? {
                return Err(Error::InvalidInput(format!("type hint {h} is below the computed lower bound {lower}")));
            }
            Ok((h, format!("hint {h}, at least the computed lower bound {lower}")))
        }
        None => {
            let c = computed.ok_or_else(|| Error::precision(format!("no finite type upper bound (lower bound {lower})")))?;
            let how = if report.exactness == Exactness::CertifiedExact { "computed, certified exact" } else { "computed upper bound" };
            Ok((u32::try_from(c).unwrap_or(u32::MAX), how.to_string()))
        }
    }
}

fn pow2(e: usize) -> Rat {
    let mut x = r(1);
    for _ in 0..e {
        x *= r(2);
    }
    x
}

/// ε ≥ 1/(2^{T(T−1)+3} T²(T−1)³), the a-priori bound.
pub fn epsilon_floor(t: u32) -> Rat {
    let t = t as i64;
    let s = (t * t * (t - 1).pow(3)).max(1);
    r(1) / (pow2((t * (t - 1) + 3) as usize) * r(s))
}

fn common_checks(st1: &Step1Log, t: u32, l: usize, eps: &Rat) -> Result<Vec<BoundCheck>> {
    let mut checks = Vec::new();
    if let Some(mu) = &st1.mu {
        let b = mu.add(&st1.nu_gamma_phi).add_rat(&-r(1));
        checks.push(BoundCheck::orders("step1: nu(f1) <= mu + nu_gamma(phi) - 1", &b, &ExtOrder::int(st1.nu_f1 as i64))?);
    }
    checks.push(BoundCheck::ints("step1: nu(f1) <= m(T-1)", st1.m as i128 * (t as i128 - 1), st1.nu_f1 as i128));
    checks.push(BoundCheck::ints("l <= T(T-1)+4", t as i128 * (t as i128 - 1) + 4, l as i128));
    let floor = epsilon_floor(t);
    checks.push(BoundCheck {
        name: "epsilon >= 1/(2^(T(T-1)+3) T^2 (T-1)^3)".into(),
        bound: fmt_ratio(&floor),
        realized: fmt_ratio(eps),
        pass: *eps >= floor,
    });
    Ok(checks)
}

/// Full pipeline over the precision ladder; the first precision at which no
/// comparison is undecided wins.
pub fn run(domain: &SpecialDomain, config: &RunConfig) -> Result<Certificate> {
    let (t, how) = type_bound(domain, config.seed)?;
    let mut notes = Vec::new();
    let ladder = precision_ladder(config.truncation);
    let mut last = None;
    for p in ladder {
        match run_at(domain, config, t, &how, p) {
            Ok(mut c) => {
                notes.append(&mut c.warnings);
                c.warnings = notes;
                return Ok(c);
            }
            Err(Error::Precision(msg)) => {
                notes.push(format!("precision {p} insufficient: {msg}"));
                last = Some(Error::Precision(msg));
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::precision("empty precision ladder")))
}

fn run_at(domain: &SpecialDomain, config: &RunConfig, t: u32, how: &str, precision: u32) -> Result<Certificate> {
    let s = &domain.premultipliers;
    let st1 = step1(s, t, precision)?;
    let linear = s.iter().find(|g| nu(&g.poly).as_int() == Some(1)).cloned();
    let mut cert = match linear {
        Some(lin) => linear_path(domain, config, &st1, &lin, t)?,
        None => effective_path(domain, config, &st1, t, precision)?,
    };
    cert.precision = precision;
    cert.type_source = how.to_string();
    if let Some(bad) = cert.bound_checks.iter().find(|c| !c.pass) {
        return Err(Error::InvariantViolation(format!("bound check failed: {} (bound {}, realized {})", bad.name, bad.bound, bad.realized)));
    }
    if let Some(m) = &cert.membership {
        if !m.verified() {
            return Err(Error::InvariantViolation(format!("z^{0}, w^{0} not verified in the ideal at degree budget {1}", cert.a, m.degree_budget)));
        }
    }
    Ok(cert)
}

fn is_unit(p: &BiPoly) -> bool {
    !p.constant_term().is_zero_c()
}

fn f1_element(st1: &Step1Log) -> ChainElement {
    let sign = if st1.negated { "-" } else { "" };
    ChainElement { label: "f1".into(), poly: st1.f1.clone(), provenance: format!("{sign}det(d{}, d{})", st1.f.label, st1.phi.label) }
}

fn membership_report(gens: Vec<BiPoly>, a: u64) -> Result<MembershipReport> {
    let budget = default_budget(a);
    let b = local_basis(&gens, budget)?;
    let zp = reduces_to_zero(&BiPoly::z().pow(a as u32), &b)?;
    let wp = reduces_to_zero(&BiPoly::w().pow(a as u32), &b)?;
    Ok(MembershipReport { generators: gens, degree_budget: budget, certified: b.certified, z_power: zp, w_power: wp, staircase: staircase(&b) })
}

/// Each determinant halves the order of subellipticity starting from 1/4 at
/// f₁, so f_l = 1 reached without radicals gives ε = 1/2^{l+1}.
fn linear_path(domain: &SpecialDomain, config: &RunConfig, st1: &Step1Log, lin: &Germ, t: u32) -> Result<Certificate> {
    let mut chain = vec![f1_element(st1)];
    let mut cur = st1.f1.clone();
    let cap = st1.nu_f1 as usize + 1;
    while !is_unit(&cur) {
        if chain.len() > cap {
            return Err(Error::Unsupported(format!("determinants against {} do not reach a unit", lin.label)));
        }
        let prev = chain.last().unwrap().label.clone();
        let (next, neg) = orient(jacobian_det(&cur, &lin.poly));
        if next.is_zero() {
            return Err(Error::Unsupported(format!("{} vanishes along {{{} = 0}}; the linear shortcut does not apply", prev, lin.label)));
        }
        let sign = if neg { "-" } else { "" };
        chain.push(ChainElement { label: format!("f{}", chain.len() + 1), poly: next.clone(), provenance: format!("{sign}det(d{prev}, d{})", lin.label) });
        cur = next;
    }
    let last = chain.last_mut().unwrap();
    if cur != BiPoly::int(1) {
        last.provenance = format!("{} = {}, a unit; rescaled to 1", last.provenance, cur);
        last.poly = BiPoly::int(1);
    }
    let l = chain.len();
    let epsilon = r(1) / pow2(l + 1);
    let bound_checks = common_checks(st1, t, l, &epsilon)?;
    let membership = if config.verify_membership && l >= 2 {
        Some(membership_report(vec![chain[l - 2].poly.clone(), chain[l - 1].poly.clone()], 1)?)
    } else {
        None
    };
    Ok(Certificate {
        path: Path::LinearPremultiplier,
        premultipliers: domain.premultipliers.clone(),
        seed: config.seed,
        precision: 0,
        type_bound: t,
        type_source: String::new(),
        m: st1.m,
        d: st1.nu_f1,
        t: None,
        a: 1,
        l,
        epsilon,
        chain,
        step1: st1.clone(),
        step2: None,
        multiplicity: None,
        bound_checks,
        membership,
        warnings: Vec::new(),
    })
}

fn effective_path(domain: &SpecialDomain, config: &RunConfig, st1: &Step1Log, t: u32, precision: u32) -> Result<Certificate> {
    let s = &domain.premultipliers;
    let mut gen = GenericSource::new(config.seed);
    let v = branches(&st1.f1, precision)?;
    let st2 = step2(&st1.f1, s, t, &v, &mut gen)?;
    let st3 = step3(&st1.f1, &st2.ftilde, &v)?;

    let mut chain = vec![f1_element(st1)];
    let f1_monic = monic_form(&st1.f1);
    let ft_monic = monic_form(&st2.ftilde);
    for g in &st2.produced {
        let m = monic_form(&g.poly);
        if m == f1_monic || m == ft_monic {
            continue;
        }
        let (label, prov) = g.label.split_once(" = ").unwrap_or((&g.label, ""));
        chain.push(ChainElement { label: label.to_string(), poly: g.poly.clone(), provenance: prov.to_string() });
    }
    let ft_prov = if st2.terminals.len() == 1 {
        format!("terminal multiplier {}", st2.terminals[0].label)
    } else {
        let mut text = String::new();
        for (i, (g, c)) in st2.terminals.iter().zip(&st2.ftilde_coefficients).enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            text.push_str(&format!("{sep}{sign}{}{}*{}", if i > 0 { " " } else { "" }, c.abs(), g.label));
        }
        format!("generic combination {text}")
    };
    chain.push(ChainElement { label: "Ftilde".into(), poly: st2.ftilde.clone(), provenance: ft_prov });
    chain.extend(st3.tail.iter().cloned());
    let l = chain.len();
    let epsilon = r(1) / (pow2(l - 1) * r(st3.a as i64));

    let mut checks = common_checks(st1, t, l, &epsilon)?;
    let tb = &st2.t_bound;
    for (i, log) in st2.logs.iter().enumerate() {
        checks.push(BoundCheck::orders(format!("step2 branch {}: terminal order <= d(T-1)", i + 1), tb, &log.terminal_order)?);
        checks.push(BoundCheck::orders(format!("step2 branch {}: nu_C(Ftilde) <= d(T-1)", i + 1), tb, &log.ftilde_order)?);
        checks.push(BoundCheck::orders(format!("step2 branch {}: nu_C(phi) <= T", i + 1), &ExtOrder::int(t as i64), &log.phi_order)?);
    }
    let dt = &st3.t * r(st3.d as i64);
    checks.push(BoundCheck::orders("step3: D(F, Ftilde) <= d t", &ExtOrder::Exact(dt.clone()), &st3.multiplicity)?);
    checks.push(BoundCheck::orders("step3: t <= d(T-1)", tb, &ExtOrder::Exact(st3.t.clone()))?);
    let tt = t as i128;
    checks.push(BoundCheck::ints("d <= T(T-1)", tt * (tt - 1), st3.d as i128));
    checks.push(BoundCheck::ints("a <= T^2(T-1)^3", tt * tt * (tt - 1).pow(3), st3.a as i128));

    let membership = if config.verify_membership {
        Some(membership_report(vec![st1.f1.clone(), st2.ftilde.clone()], st3.a)?)
    } else {
        None
    };
    let warnings = perturbation_warnings(domain, &st2, &st3);
    Ok(Certificate {
        path: Path::Effective,
        premultipliers: domain.premultipliers.clone(),
        seed: config.seed,
        precision,
        type_bound: t,
        type_source: String::new(),
        m: st1.m,
        d: st3.d,
        t: Some(st3.t.clone()),
        a: st3.a,
        l,
        epsilon,
        chain,
        step1: st1.clone(),
        step2: Some(st2),
        multiplicity: Some(st3.multiplicity),
        bound_checks: checks,
        membership,
        warnings,
    })
}

/// Realized orders within 1 of the perturbation degree could be affected by
/// the tails and deserve a larger L.
fn perturbation_warnings(domain: &SpecialDomain, st2: &Step2Result, st3: &Step3Result) -> Vec<String> {
    let Some(l) = domain.perturbation_degree else { return Vec::new() };
    let limit = r(l as i64 - 1);
    let mut out = Vec::new();
    let near = |o: &ExtOrder| matches!(o, ExtOrder::Exact(v) if *v >= limit);
    for (i, log) in st2.logs.iter().enumerate() {
        for h in &log.steps {
            if near(&h.realized) || near(&h.bound) {
                out.push(format!("branch {}: jet order {} at level {} is within 1 of the perturbation degree {l}", i + 1, h.realized, h.k));
            }
        }
    }
    let dt = &st3.t * r(st3.d as i64);
    if dt >= limit {
        out.push(format!("d*t = {} is within 1 of the perturbation degree {l}", fmt_ratio(&dt)));
    }
    out
}

/// Exact ε as p/q text.
pub fn epsilon_text(c: &Certificate) -> String {
    fmt_ratio(&c.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_poly;

    fn p(s: &str) -> BiPoly {
        parse_poly(s).unwrap()
    }

    fn domain(v: &[&str], hint: Option<u32>) -> SpecialDomain {
        SpecialDomain::new(v.iter().map(|s| p(s)).collect(), hint).unwrap()
    }

    fn cfg() -> RunConfig {
        RunConfig { seed: crate::generic::DEFAULT_SEED, truncation: 64, verify_membership: true }
    }

    #[test]
    fn step1_examples() {
        let s = domain(&["z^3 + z*w^7", "w"], None);
        let st = step1(&s.premultipliers, 3, 32).unwrap();
        assert_eq!(st.f1, p("3*z^2 + w^7"));
        let s = domain(&["z^2", "w^3 + z^10*w"], None);
        let st = step1(&s.premultipliers, 3, 32).unwrap();
        assert_eq!(st.f1, p("6*z*w^2 + 2*z^11"));
        assert_eq!((st.m, st.nu_f1, st.k0), (2, 3, Some(2)));
        let s = domain(&["z^2", "w^2"], None);
        let st = step1(&s.premultipliers, 2, 32).unwrap();
        assert_eq!(st.f1, p("4*z*w"));
    }

    #[test]
    fn heier_certificate_independent_of_k() {
        let mut seen = None;
        for k in [3, 5, 7, 9] {
            let c = run(&domain(&[&format!("z^3 + z*w^{k}"), "w"], None), &cfg()).unwrap();
            assert_eq!(c.chain[0].poly, p(&format!("3*z^2 + w^{k}")));
            assert_eq!(c.chain.last().unwrap().poly, BiPoly::int(1));
            let key = (c.l, c.a, c.epsilon.clone());
            if let Some(s) = &seen {
                assert_eq!(s, &key);
            }
            seen = Some(key);
        }
    }

    #[test]
    fn family_certificate() {
        let c = run(&domain(&["z^2", "w^3 + z^10*w"], Some(3)), &cfg()).unwrap();
        assert_eq!((c.d, c.a), (3, 12));
        assert_eq!(c.t, Some(r(4)));
        assert!(c.l <= 10);
        let st2 = c.step2.as_ref().unwrap();
        let orders: Vec<String> = st2.logs.iter().map(|l| l.terminal_order.to_string()).collect();
        assert!(orders.contains(&"4".to_string()) && orders.contains(&"3".to_string()));
        assert!(c.membership.as_ref().unwrap().verified());
        assert_eq!(c.epsilon, r(1) / (pow2(c.l - 1) * r(12)));
    }

    #[test]
    fn steps_on_toy_inputs() {
        let v = branches(&p("z*w"), 16).unwrap();
        let s = domain(&["z^2", "w^2"], None);
        let mut gen = GenericSource::new(1);
        let st2 = step2(&p("z*w"), &s.premultipliers, 2, &v, &mut gen).unwrap();
        assert!(st2.logs.iter().all(|l| !l.ftilde_order.is_infinite()));
        let v = branches(&p("z"), 16).unwrap();
        assert_eq!(step3(&p("z"), &p("w"), &v).unwrap().a, 1);
        let v = branches(&p("z^2"), 16).unwrap();
        assert_eq!(step3(&p("z^2"), &p("w^3"), &v).unwrap().a, 6);
    }

    #[test]
    fn infinite_type_domain() {
        let e = run(&domain(&["z^2", "z^2*w"], None), &cfg()).unwrap_err();
        assert!(matches!(e, Error::InfiniteType { .. }));
    }
}

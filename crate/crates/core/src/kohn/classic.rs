//! Kohn's original procedure I_k = √J(S ∪ I_{k−1}), with radicals limited
//! to principal ideals (squarefree part) and ideals containing pure powers
//! z^p, w^q (giving (z, w) with root order max(p, q)).

use crate::error::{Error, Result};
use crate::exactalg::squarefree::squarefree_decomposition;
use crate::exactalg::{BiPoly, Coeff, Mono, Rat};
use crate::jetcontrol::{jacobian_det, monic_form};
use crate::membership::{local_basis, reduces_to_zero, LocalBasis};

use super::{run, RunConfig, SpecialDomain};

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicLevel {
    pub k: u32,
    /// Generators of J_k: I_{k−1} and the determinants over S ∪ I_{k−1}.
    pub j_generators: Vec<BiPoly>,
    /// Reduced local standard basis of J_k, when J_k is m-primary.
    pub j_basis: Option<Vec<BiPoly>>,
    pub i_generators: Vec<BiPoly>,
    pub root_order: u64,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicState {
    pub levels: Vec<ClassicLevel>,
    pub terminated: bool,
}

impl ClassicState {
    pub fn max_root_order(&self) -> u64 {
        self.levels.iter().map(|l| l.root_order).max().unwrap_or(1)
    }
}

fn is_unit(p: &BiPoly) -> bool {
    !p.constant_term().is_zero_c()
}

fn push_unique(out: &mut Vec<BiPoly>, seen: &mut Vec<BiPoly>, p: BiPoly) {
    if p.is_zero() {
        return;
    }
    let m = monic_form(&p);
    if !seen.contains(&m) {
        seen.push(m.clone());
        out.push(m);
    }
}

fn jacobian_ideal(s: &[BiPoly], prev: &[BiPoly]) -> Vec<BiPoly> {
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for p in prev {
        push_unique(&mut out, &mut seen, p.clone());
    }
    let all: Vec<&BiPoly> = s.iter().chain(prev.iter()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            push_unique(&mut out, &mut seen, jacobian_det(all[i], all[j]));
        }
    }
    out
}

const BUDGETS: [u32; 6] = [8, 16, 32, 64, 128, 192];

fn certified_basis(gens: &[BiPoly]) -> Result<Option<LocalBasis>> {
    for d in BUDGETS {
        let b = local_basis(gens, d)?;
        if b.certified {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

fn min_power(var: Mono, b: &LocalBasis) -> Result<u64> {
    for e in 1..=b.complete_to_degree {
        let p = BiPoly::from_terms([(Mono::new(var.z * e, var.w * e), crate::exactalg::Scalar::int(1))], None);
        if reduces_to_zero(&p, b)? {
            return Ok(e as u64);
        }
    }
    Err(Error::InvariantViolation("certified basis without a pure power".into()))
}

struct Radical {
    gens: Vec<BiPoly>,
    root_order: u64,
    rule: String,
    basis: Option<Vec<BiPoly>>,
}

fn radical(gens: &[BiPoly]) -> Result<Radical> {
    if gens.iter().any(is_unit) {
        return Ok(Radical { gens: vec![BiPoly::int(1)], root_order: 1, rule: "unit ideal".into(), basis: None });
    }
    let g = gens.iter().min_by_key(|p| (p.degree(), p.num_terms())).expect("nonempty generator list");
    if gens.iter().all(|h| h.div_exact(g).is_some()) {
        let mut sq = BiPoly::int(1);
        let mut e_max = 0u32;
        for (p, e) in squarefree_decomposition(g)? {
            // Factors not vanishing at 0 are units in the local ring.
            if is_unit(&p) {
                continue;
            }
            sq = sq.mul(&p);
            e_max = e_max.max(e);
        }
        return Ok(Radical {
            gens: vec![monic_form(&sq)],
            root_order: e_max.max(1) as u64,
            rule: "principal: squarefree part".into(),
            basis: None,
        });
    }
    let Some(b) = certified_basis(gens)? else {
        let list: Vec<String> = gens.iter().map(|p| p.to_string()).collect();
        return Err(Error::Unsupported(format!("radical of ({}) is outside the supported scope", list.join(", "))));
    };
    let p = min_power(Mono::new(1, 0), &b)?;
    let q = min_power(Mono::new(0, 1), &b)?;
    Ok(Radical {
        gens: vec![BiPoly::z(), BiPoly::w()],
        root_order: p.max(q),
        rule: format!("contains z^{p} and w^{q}"),
        basis: Some(b.basis),
    })
}

/// Runs the classic levels until 1 ∈ I_k or `max_levels` is reached.
pub fn classic_kohn(domain: &SpecialDomain, max_levels: u32) -> Result<ClassicState> {
    let s = domain.polys();
    let mut levels: Vec<ClassicLevel> = Vec::new();
    let mut prev: Vec<BiPoly> = Vec::new();
    for k in 0..max_levels {
        let j = jacobian_ideal(&s, &prev);
        if j.is_empty() {
            return Err(Error::InfiniteType { witness: "all Jacobian determinants of the premultipliers vanish".into() });
        }
        let rad = radical(&j)?;
        let terminated = rad.gens.iter().any(is_unit);
        if !terminated && rad.gens == prev {
            let list: Vec<String> = prev.iter().map(|p| p.to_string()).collect();
            return Err(Error::InfiniteType { witness: format!("multiplier ideals stabilise at ({})", list.join(", ")) });
        }
        levels.push(ClassicLevel {
            k,
            j_generators: j,
            j_basis: rad.basis,
            i_generators: rad.gens.clone(),
            root_order: rad.root_order,
            rule: rad.rule,
        });
        if terminated {
            return Ok(ClassicState { levels, terminated: true });
        }
        prev = rad.gens;
    }
    Ok(ClassicState { levels, terminated: false })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub parameter: u32,
    pub classic_root_order: u64,
    pub classic_levels: usize,
    pub effective_a: u64,
    pub effective_l: usize,
    pub effective_epsilon: Rat,
}

/// Classic against effective on a parametrized family.
pub fn compare_modes(family: &[(u32, SpecialDomain)], config: &RunConfig) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for (k, d) in family {
        let c = classic_kohn(d, 8)?;
        let e = run(d, config)?;
        rows.push(CompareRow {
            parameter: *k,
            classic_root_order: c.max_root_order(),
            classic_levels: c.levels.len(),
            effective_a: e.a,
            effective_l: e.l,
            effective_epsilon: e.epsilon,
        });
    }
    Ok(rows)
}

//! Canonical boolean and distributive machines of a language, the
//! bijections of quotients of the reverse with their irreducibles, and the
//! dual descriptions.

use std::collections::HashSet;
use std::sync::Arc;

use crate::automata::Nfa;
use crate::bits::{self, Bits};
use crate::error::{cap_check, Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::jsl::Jsl;
use crate::jsldfa::{airr, check_jsl_dfa_iso, dep_of_nfa, det, full_subset, sat_min_dfa, DepAut, JslDfa};
use crate::lang::{reversed, Atoms, Congruence, Language, QuotientIndex};

/// Largest atom or class count for which the exponential carriers are built.
pub const DEFAULT_CAP: usize = 12;

/// Which family of left predicates a carrier holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredicateKind {
    /// All unions of atoms.
    Boolean,
    /// Closure of the quotients under union and intersection.
    Positive,
    /// All unions of syntactic classes.
    Subatomic,
}

/// A family of languages stored as unions of atoms (boolean, positive) or
/// of syntactic classes (subatomic).
#[derive(Clone, Debug)]
pub struct LeftPredicateFamily {
    pub language: Language,
    pub kind: PredicateKind,
    pub members: Arc<Jsl>,
}

impl LeftPredicateFamily {
    pub fn languages(&self) -> Vec<Language> {
        match self.kind {
            PredicateKind::Subatomic => {
                let cong = Congruence::of_languages(self.language.alphabet(), std::slice::from_ref(&self.language));
                self.members.family().iter().map(|m| cong.language_of(m)).collect()
            }
            _ => {
                let atoms = self.language.atoms();
                self.members.family().iter().map(|m| atoms.mask_language(m)).collect()
            }
        }
    }
}

fn atom_base(l: &Language, atoms: &Atoms) -> FinSet {
    FinSet::new((0..atoms.len()).map(|x| l.alphabet().fmt_word(atoms.rep(x)))).expect("distinct shortest words")
}

/// The machine `X ↦ a⁻¹X` on a family of atom masks.
fn atom_machine(l: &Language, atoms: &Atoms, carrier: Arc<Jsl>) -> JslDfa {
    let trans = (0..l.alphabet().len() as u8)
        .map(|a| {
            (0..carrier.len())
                .map(|x| carrier.index_of(&atoms.letter_quotient(a, carrier.element(x))).expect("closed under quotients"))
                .collect()
        })
        .collect();
    let init = carrier.index_of(&atoms.quotient_mask(0)).expect("L is a member");
    let tnf = carrier.largest_below(&bits::complement(&bits::singleton(atoms.len(), 0)));
    JslDfa::new(l.alphabet().clone(), carrier, init, trans, tnf).expect("letter quotients preserve unions")
}

pub fn boolean_family(l: &Language, cap: usize) -> Result<LeftPredicateFamily> {
    let atoms = l.atoms();
    cap_check("atom count", atoms.len(), cap)?;
    let members = Arc::new(Jsl::powerset(atom_base(l, &atoms)));
    Ok(LeftPredicateFamily { language: l.clone(), kind: PredicateKind::Boolean, members })
}

/// Alternating union and intersection passes from the quotients (plus the
/// empty and full sets) until nothing new appears. Returns the members and
/// the number of passes.
pub fn positive_closure(atoms: &Atoms, n_quotients: usize) -> (Vec<Bits>, usize) {
    let n = atoms.len();
    let mut seen: HashSet<Bits> = HashSet::new();
    let mut members: Vec<Bits> = Vec::new();
    for m in [bits::empty(n), bits::full(n)].into_iter().chain((0..n_quotients).map(|q| atoms.quotient_mask(q))) {
        if seen.insert(m.clone()) {
            members.push(m);
        }
    }
    let mut passes = 0;
    loop {
        passes += 1;
        let mut added = false;
        for op in 0..2 {
            let snapshot = members.clone();
            for x in &snapshot {
                for y in &snapshot {
                    let z = if op == 0 { bits::union(x, y) } else { bits::intersection(x, y) };
                    if seen.insert(z.clone()) {
                        members.push(z);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    members.sort_by_cached_key(bits::size_lex_key);
    (members, passes)
}

pub fn positive_family(l: &Language, cap: usize) -> Result<LeftPredicateFamily> {
    let atoms = l.atoms();
    cap_check("atom count", atoms.len(), cap)?;
    let (members, _) = positive_closure(&atoms, l.num_states());
    let members = Arc::new(Jsl::from_family(atom_base(l, &atoms), members)?);
    Ok(LeftPredicateFamily { language: l.clone(), kind: PredicateKind::Positive, members })
}

pub fn subatomic_family(l: &Language, cap: usize) -> Result<LeftPredicateFamily> {
    let cong = Congruence::of_languages(l.alphabet(), std::slice::from_ref(l));
    cap_check("syntactic class count", cong.len(), cap)?;
    let base = FinSet::new((0..cong.len()).map(|m| l.alphabet().fmt_word(cong.rep(m)))).expect("distinct shortest words");
    Ok(LeftPredicateFamily { language: l.clone(), kind: PredicateKind::Subatomic, members: Arc::new(Jsl::powerset(base)) })
}

/// The machine on all unions of atoms.
pub fn bool_min(l: &Language, cap: usize) -> Result<JslDfa> {
    let fam = boolean_family(l, cap)?;
    Ok(atom_machine(l, &l.atoms(), fam.members))
}

/// The machine on the union- and intersection-closure of the quotients.
pub fn dist_min(l: &Language, cap: usize) -> Result<JslDfa> {
    let fam = positive_family(l, cap)?;
    Ok(atom_machine(l, &l.atoms(), fam.members))
}

/// The machine on all unions of syntactic classes.
pub fn syn_bool_min(l: &Language, cap: usize) -> Result<JslDfa> {
    let fam = subatomic_family(l, cap)?;
    let cong = Congruence::of_languages(l.alphabet(), std::slice::from_ref(l));
    let carrier = fam.members;
    let trans = (0..l.alphabet().len() as u8)
        .map(|a| {
            (0..carrier.len()).map(|x| carrier.index_of(&cong.letter_quotient(a, carrier.element(x))).expect("powerset")).collect()
        })
        .collect();
    let init = carrier.index_of(&cong.mask_of(l).expect("recognised")).expect("powerset");
    let tnf = carrier.index_of(&bits::complement(&bits::singleton(cong.len(), 0))).expect("powerset");
    JslDfa::new(l.alphabet().clone(), carrier, init, trans, tnf)
}

/// `v⁻¹Lʳ ↦ [vʳ]`: for each quotient of `Lʳ` (canonical order), its atom.
pub fn kappa(l: &Language) -> Vec<usize> {
    let atoms = l.atoms();
    kappa_with(&atoms, &l.reverse().quotients())
}

fn kappa_with(atoms: &Atoms, rev_idx: &QuotientIndex) -> Vec<usize> {
    (0..rev_idx.len()).map(|j| atoms.atom_of(&reversed(rev_idx.rep(j)))).collect()
}

/// Checks that `kappa` is a bijection and that
/// `κ(x⁻¹Lʳ) ⊆ a⁻¹κ(y⁻¹Lʳ) ⟺ (xa)⁻¹Lʳ = y⁻¹Lʳ` over all representatives.
pub fn kappa_check(l: &Language) -> Result<Vec<usize>> {
    let atoms = l.atoms();
    let rev = l.reverse();
    let rev_idx = rev.quotients();
    let k = kappa_with(&atoms, &rev_idx);
    if rev_idx.len() != atoms.len() || k.iter().collect::<HashSet<_>>().len() != k.len() {
        return Err(Error::CheckFailed(format!("{} reverse quotients against {} atoms", rev_idx.len(), atoms.len())));
    }
    let n = atoms.len();
    for x in 0..rev_idx.len() {
        for y in 0..rev_idx.len() {
            for a in 0..l.alphabet().len() as u8 {
                let lhs = atoms.letter_quotient(a, &bits::singleton(n, k[y])).contains(k[x]);
                let rhs = rev.delta(x, a) == y;
                if lhs != rhs {
                    return Err(Error::CheckFailed(format!("transition relationship fails at ({x}, {y}, {a})")));
                }
            }
        }
    }
    Ok(k)
}

/// `λ(Y) = complement(dr_{L̄}(Ȳ))` for each quotient `Y` of `Lʳ`, as an
/// element index of `dist_min`.
pub fn lambda_bij(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let dist = dist_min(l, cap)?;
    lambda_into(l, &dist)
}

fn lambda_into(l: &Language, dist: &JslDfa) -> Result<Vec<usize>> {
    let atoms = l.atoms();
    let rev_idx = l.reverse().quotients();
    let co = l.complement();
    (0..rev_idx.len())
        .map(|j| {
            let y = rev_idx.language(j);
            let image = co.dr(&y.complement())?.complement();
            let mask = atoms.mask_of(&image).ok_or(Error::NotAQuotient)?;
            dist.carrier().index_of(&mask).ok_or_else(|| Error::CheckFailed(format!("λ of quotient {j} is not positive")))
        })
        .collect()
}

/// Checks `λ` against the intersection description, its bijectivity onto
/// the join-irreducibles, the transition relationship, and that the
/// unique-cover map sends `λ(Y)` to `dr_L(Y)`.
pub fn lambda_check(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let dist = dist_min(l, cap)?;
    let lam = lambda_into(l, &dist)?;
    let s = dist.carrier();
    let atoms = l.atoms();
    let rev = l.reverse();
    let rev_idx = rev.quotients();
    let n = atoms.len();
    for (j, &x) in lam.iter().enumerate() {
        let vr = reversed(rev_idx.rep(j));
        let mut cap_mask = bits::full(n);
        for q in 0..l.num_states() {
            if l.is_final(l.run(q, &vr)) {
                cap_mask.intersect_with(&atoms.quotient_mask(q));
            }
        }
        if *s.element(x) != cap_mask {
            return Err(Error::CheckFailed(format!("λ of quotient {j} differs from the intersection of quotients containing vʳ")));
        }
    }
    let mut sorted = lam.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let mut js = s.join_irreducibles().to_vec();
    js.sort_unstable();
    if sorted != js || s.meet_irreducibles().len() != rev_idx.len() {
        return Err(Error::CheckFailed("λ is not a bijection onto the join-irreducibles".into()));
    }
    for x in 0..rev_idx.len() {
        for y in 0..rev_idx.len() {
            for a in 0..l.alphabet().len() as u8 {
                let lhs = s.element(lam[x]).is_subset(&atoms.letter_quotient(a, s.element(lam[y])));
                let rhs = rev_idx.language(y).is_subset(rev_idx.language(rev.delta(x, a)));
                if lhs != rhs {
                    return Err(Error::CheckFailed(format!("transition relationship fails at ({x}, {y}, {a})")));
                }
            }
        }
    }
    for (j, &x) in lam.iter().enumerate() {
        let others: Vec<usize> = (0..s.len()).filter(|&z| !s.leq(x, z)).collect();
        let tau = s.join(&others);
        let dr = atoms.mask_of(&l.dr(rev_idx.language(j))?).ok_or(Error::NotAQuotient)?;
        if *s.element(tau) != dr {
            return Err(Error::CheckFailed(format!("unique cover of λ({j}) is not dr_L")));
        }
    }
    Ok(lam)
}

/// `θ(S) = ⋃{κ(Y) : Y ∉ S}` as an isomorphism from the full subset machine
/// of the minimal dfa of `Lʳ` onto the dual of `bool_min`.
pub fn dual_bool_check(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let bm = bool_min(l, cap)?;
    let (_, to_op) = bm.carrier().op();
    let dual = bm.pentagram();
    let src = full_subset(&Nfa::from_language(&l.reverse()));
    let k = kappa(l);
    let n = bm.carrier().base().len();
    let map: Vec<usize> = (0..src.len())
        .map(|x| {
            let s = src.carrier().element(x);
            let mask = bits::from_iter(n, (0..k.len()).filter(|&y| !s.contains(y)).map(|y| k[y]));
            to_op[bm.carrier().index_of(&mask).expect("powerset")]
        })
        .collect();
    check_jsl_dfa_iso(&src, &dual, &map)?;
    Ok(map)
}

/// The saturated dfa of `Lʳ` with `⊇` against its reverse.
pub fn sat_superset_dep(l: &Language) -> DepAut {
    let rev = l.reverse();
    let rev_idx = rev.quotients();
    let sat = sat_min_dfa(&rev);
    let incl = rev_idx.inclusion();
    let rel = FinRel::from_fn(sat.states().clone(), sat.states().clone(), |i, j| incl[j][i]);
    DepAut::new(sat.clone(), rel, sat.reverse()).expect("the saturated dfa with ⊇ is a dependency automaton")
}

/// `ρ(S) = ⋂{dr_L(Y) : Y ∈ S}` as an isomorphism onto the dual of `dist_min`.
pub fn dual_dist_check(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let dm = dist_min(l, cap)?;
    let (_, to_op) = dm.carrier().op();
    let dual = dm.pentagram();
    let src = det(&sat_superset_dep(l));
    let atoms = l.atoms();
    let rev_idx = l.reverse().quotients();
    let drs: Vec<Bits> = (0..rev_idx.len())
        .map(|j| atoms.mask_of(&l.dr(rev_idx.language(j))?).ok_or(Error::NotAQuotient))
        .collect::<Result<_>>()?;
    let mut map = Vec::with_capacity(src.len());
    for x in 0..src.len() {
        let mut m = bits::full(atoms.len());
        for y in src.carrier().element(x).ones() {
            m.intersect_with(&drs[y]);
        }
        let i = dm.carrier().index_of(&m).ok_or_else(|| Error::CheckFailed("ρ leaves the positive family".into()))?;
        map.push(to_op[i]);
    }
    check_jsl_dfa_iso(&src, &dual, &map)?;
    Ok(map)
}

/// The dependency automaton of the reversed minimal dfa of `Lʳ` against
/// the irreducibles of `bool_min`, compared through `Det` with upper map
/// `Y ↦ complement(κ(Y))`.
pub fn bool_dep_aut_check(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let bm = bool_min(l, cap)?;
    let target = airr(&bm);
    let source = dep_of_nfa(&Nfa::from_language(&l.reverse()).reverse());
    let s = bm.carrier();
    let k = kappa(l);
    let n = s.base().len();
    let ms = s.meet_irreducibles();
    let upper: Vec<usize> = k
        .iter()
        .map(|&atom| {
            let co = s.index_of(&bits::complement(&bits::singleton(n, atom))).expect("powerset");
            ms.iter().position(|&m| m == co).expect("coatoms are meet-irreducible")
        })
        .collect();
    induced_iso(&source, &target, &upper)
}

/// `(rev sat(Lʳ), ⊆, sat(Lʳ))` against the irreducibles of `dist_min`,
/// with upper map `Y ↦ dr_L(Y)`.
pub fn dist_dep_aut_check(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let dm = dist_min(l, cap)?;
    let target = airr(&dm);
    let sup = sat_superset_dep(l);
    let rev_idx = l.reverse().quotients();
    let incl = rev_idx.inclusion();
    let sat = sup.lower().clone();
    let rel = FinRel::from_fn(sat.states().clone(), sat.states().clone(), |i, j| incl[i][j]);
    let source = DepAut::new(sat.reverse(), rel, sat)?;
    let s = dm.carrier();
    let atoms = l.atoms();
    let ms = s.meet_irreducibles();
    let upper: Vec<usize> = (0..rev_idx.len())
        .map(|j| {
            let dr = atoms.mask_of(&l.dr(rev_idx.language(j))?).ok_or(Error::NotAQuotient)?;
            let x = s.index_of(&dr).ok_or_else(|| Error::CheckFailed("dr_L leaves the positive family".into()))?;
            ms.iter().position(|&m| m == x).ok_or_else(|| Error::CheckFailed(format!("dr_L of quotient {j} is not meet-irreducible")))
        })
        .collect::<Result<_>>()?;
    induced_iso(&source, &target, &upper)
}

/// Given a bijection between the upper state sets, verifies that its image
/// map on open sets is an isomorphism `det(source) → det(target)`.
fn induced_iso(source: &DepAut, target: &DepAut, upper: &[usize]) -> Result<Vec<usize>> {
    let (a, b) = (det(source), det(target));
    let m = target.upper().num_states();
    if upper.len() != source.upper().num_states() || upper.len() != m {
        return Err(Error::CheckFailed("upper state counts differ".into()));
    }
    let map: Vec<usize> = (0..a.len())
        .map(|x| {
            let img = bits::from_iter(m, a.carrier().element(x).ones().map(|y| upper[y]));
            b.carrier().index_of(&img).ok_or_else(|| Error::CheckFailed("image of an open set is not open".into()))
        })
        .collect::<Result<_>>()?;
    check_jsl_dfa_iso(&a, &b, &map)?;
    Ok(map)
}

//! Saturation predicates on nfas, irreducible simplification, greedy
//! transition-maximal extension, the atomizer of a JSL-dfa, and the
//! atomic / positively atomic / subatomic tests from both sides.

use std::fmt;

use crate::automata::{iso_dfa, Dfa, Nfa};
use crate::bits::{self, Bits};
use crate::canonical::{kappa, positive_family};
use crate::error::{cap_check, Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::jsl::Jsl;
use crate::jsldfa::JslDfa;
use crate::lang::{Congruence, Language};

/// One offending component of an nfa.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    Initial(usize),
    Final(usize),
    Edge(usize, u8, usize),
    /// A state whose language is the union of the smaller state languages.
    Union(usize),
}

impl Violation {
    fn render(&self, n: &Nfa) -> String {
        let s = |z: usize| n.states().label(z).to_string();
        match *self {
            Violation::Initial(z) => format!("initial {}", s(z)),
            Violation::Final(z) => format!("final {}", s(z)),
            Violation::Edge(p, a, q) => format!("{} -{}-> {}", s(p), n.alphabet().symbol(a), s(q)),
            Violation::Union(z) => format!("union {}", s(z)),
        }
    }
}

/// Four saturation flags; each flag is false exactly when its witness list
/// is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub locally: bool,
    pub intersection: bool,
    pub transition_maximal: bool,
    pub union_free: bool,
    pub locally_witnesses: Vec<Violation>,
    pub intersection_witnesses: Vec<Violation>,
    /// Single additions that keep the language.
    pub extension_witnesses: Vec<Violation>,
    pub union_witnesses: Vec<Violation>,
}

impl SaturationReport {
    pub fn render(&self, n: &Nfa) -> String {
        let rows = [
            ("locally-saturated", self.locally, &self.locally_witnesses),
            ("intersection-saturated", self.intersection, &self.intersection_witnesses),
            ("transition-maximal", self.transition_maximal, &self.extension_witnesses),
            ("union-free", self.union_free, &self.union_witnesses),
        ];
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (name, flag, ws) in rows {
            let w: Vec<String> = ws.iter().map(|v| v.render(n)).collect();
            out.push_str(&format!("{name:<width$}  {:<5}  {}\n", flag, w.join(", ")));
        }
        out
    }
}

impl fmt::Display for SaturationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "locally={} intersection={} transition_maximal={} union_free={}",
            self.locally, self.intersection, self.transition_maximal, self.union_free
        )
    }
}

/// Initial states and edges that disagree with the state languages:
/// `z ∈ I ⟺ L(z) ⊆ L` and `z₁ →a z₂ ⟺ L(z₂) ⊆ a⁻¹L(z₁)`.
pub fn local_violations(n: &Nfa) -> Vec<Violation> {
    let l = n.language();
    let langs = n.state_languages();
    let mut out: Vec<Violation> = (0..n.num_states())
        .filter(|&z| n.initial().contains(z) != langs[z].is_subset(&l))
        .map(Violation::Initial)
        .collect();
    for (p, lp) in langs.iter().enumerate() {
        for a in 0..n.alphabet().len() as u8 {
            let quotient = lp.left_word_quotient(&[a]);
            for (q, lq) in langs.iter().enumerate() {
                if n.has_edge(p, a, q) != lq.is_subset(&quotient) {
                    out.push(Violation::Edge(p, a, q));
                }
            }
        }
    }
    out
}

/// Violations of the intersection rule, read off the local violations of
/// the reverse machine.
pub fn intersection_violations(n: &Nfa) -> Vec<Violation> {
    let mut out: Vec<Violation> = local_violations(&n.reverse())
        .into_iter()
        .map(|v| match v {
            Violation::Initial(z) => Violation::Final(z),
            Violation::Edge(p, a, q) => Violation::Edge(q, a, p),
            other => other,
        })
        .collect();
    out.sort_by_key(|v| match *v {
        Violation::Final(z) => (0, z, 0, 0),
        Violation::Edge(p, a, q) => (1, p, a as usize, q),
        _ => (2, 0, 0, 0),
    });
    out
}

/// Every single initial state, final state or edge whose addition keeps the
/// language, in scan order.
pub fn preserving_additions(n: &Nfa) -> Vec<Violation> {
    let l = n.language();
    candidates(n).into_iter().filter(|&v| add(n, v).language() == l).collect()
}

fn candidates(n: &Nfa) -> Vec<Violation> {
    let z = n.num_states();
    let mut out: Vec<Violation> = (0..z).filter(|&q| !n.initial().contains(q)).map(Violation::Initial).collect();
    out.extend((0..z).filter(|&q| !n.finals().contains(q)).map(Violation::Final));
    for p in 0..z {
        for a in 0..n.alphabet().len() as u8 {
            out.extend((0..z).filter(|&q| !n.has_edge(p, a, q)).map(|q| Violation::Edge(p, a, q)));
        }
    }
    out
}

fn add(n: &Nfa, v: Violation) -> Nfa {
    match v {
        Violation::Initial(z) => n.with_initial(z),
        Violation::Final(z) => n.with_final(z),
        Violation::Edge(p, a, q) => n.with_edge(p, a, q),
        Violation::Union(_) => n.clone(),
    }
}

/// States `z` with `L(z) = ⋃{L(z') : z' ≠ z, L(z') ⊆ L(z)}`.
pub fn union_violations(n: &Nfa) -> Vec<Violation> {
    let langs = n.state_languages();
    (0..langs.len())
        .filter(|&z| {
            let below = (0..langs.len())
                .filter(|&y| y != z && langs[y].is_subset(&langs[z]))
                .fold(Language::empty(n.alphabet()), |acc, y| acc.union(&langs[y]));
            below == langs[z]
        })
        .map(Violation::Union)
        .collect()
}

pub fn saturation(n: &Nfa) -> SaturationReport {
    let locally_witnesses = local_violations(n);
    let intersection_witnesses = intersection_violations(n);
    let extension_witnesses = preserving_additions(n);
    let union_witnesses = union_violations(n);
    SaturationReport {
        locally: locally_witnesses.is_empty(),
        intersection: intersection_witnesses.is_empty(),
        transition_maximal: extension_witnesses.is_empty(),
        union_free: union_witnesses.is_empty(),
        locally_witnesses,
        intersection_witnesses,
        extension_witnesses,
        union_witnesses,
    }
}

/// Adds initial states, then final states, then edges by `(src, letter,
/// dst)`, keeping each one that leaves the language unchanged, until a full
/// scan adds nothing. Other scan orders can reach other maximal extensions.
pub fn transition_maximal_extension(n: &Nfa) -> Nfa {
    let l = n.language();
    let mut m = n.clone();
    loop {
        let mut changed = false;
        for v in candidates(&m) {
            let next = add(&m, v);
            if next.language() == l {
                m = next;
                changed = true;
            }
        }
        if !changed {
            return m;
        }
    }
}

/// The nfa on the join-irreducible state languages: `X` initial when
/// `X ⊆ L`, final when `ε ∈ X`, and `X →a Y` when `Y ⊆ a⁻¹X`. Each state
/// keeps the label of the first state accepting its language.
pub fn simple_irr(n: &Nfa) -> Nfa {
    let l = n.language();
    let langs = n.state_languages();
    let mut kept: Vec<usize> = Vec::new();
    for z in 0..langs.len() {
        if kept.iter().any(|&y| langs[y] == langs[z]) {
            continue;
        }
        let below = (0..langs.len())
            .filter(|&y| langs[y] != langs[z] && langs[y].is_subset(&langs[z]))
            .fold(Language::empty(n.alphabet()), |acc, y| acc.union(&langs[y]));
        if below != langs[z] {
            kept.push(z);
        }
    }
    let xs: Vec<&Language> = kept.iter().map(|&z| &langs[z]).collect();
    let labels: Vec<String> = kept.iter().map(|&z| n.states().label(z).to_string()).collect();
    let initial: Vec<usize> = (0..xs.len()).filter(|&i| xs[i].is_subset(&l)).collect();
    let finals: Vec<usize> = (0..xs.len()).filter(|&i| xs[i].contains_epsilon()).collect();
    let mut edges = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        for a in 0..n.alphabet().len() as u8 {
            let quotient = x.left_word_quotient(&[a]);
            edges.extend((0..xs.len()).filter(|&k| xs[k].is_subset(&quotient)).map(|k| (i, a, k)));
        }
    }
    Nfa::from_edges(n.alphabet().clone(), labels, &initial, &finals, &edges).expect("labels come from distinct states")
}

/// The atomizer of `j`: each element's accepted language closed up to a
/// union of atoms (as an atom mask), and the family of those masks.
pub fn atomizer(j: &JslDfa) -> Result<(Vec<Bits>, Jsl)> {
    let l = j.language();
    let atoms = l.atoms();
    let masks: Vec<Bits> = j.element_languages().iter().map(|x| atoms.meeting(x)).collect();
    let base = FinSet::new((0..atoms.len()).map(|x| l.alphabet().fmt_word(atoms.rep(x))))?;
    let mut family: Vec<Bits> = Vec::new();
    for m in &masks {
        if !family.contains(m) {
            family.push(m.clone());
        }
    }
    family.sort_by_cached_key(bits::size_lex_key);
    let jsl = Jsl::from_family(base, family)?;
    Ok((masks, jsl))
}

/// `H_e` over the join-irreducibles of `j` and the left quotients of `Lʳ`:
/// `x` relates to `v⁻¹Lʳ` when `vʳ` is in the closure of `x`'s language.
pub fn atomizer_relation(j: &JslDfa) -> Result<FinRel> {
    let l = j.language();
    let (masks, _) = atomizer(j)?;
    let js = j.carrier().join_irreducibles().to_vec();
    let atom_of_col = kappa(&l);
    let src = FinSet::new(js.iter().map(|&x| j.carrier().label(x)))?;
    let dst = l.dependency_relation().dst().clone();
    Ok(FinRel::from_fn(src, dst, |h, y| masks[js[h]].contains(atom_of_col[y])))
}

/// `θ(Y) = {v⁻¹Lʳ : vʳ ∈ Y}` on the atomized family. Checks that it is a
/// bijection onto the open sets of `H_e` and returns the images in family
/// order.
pub fn theta_check(j: &JslDfa) -> Result<Vec<Bits>> {
    let l = j.language();
    let (_, fam) = atomizer(j)?;
    let rel = atomizer_relation(j)?;
    let atom_of_col = kappa(&l);
    let cols = atom_of_col.len();
    let images: Vec<Bits> =
        fam.family().iter().map(|y| bits::from_iter(cols, (0..cols).filter(|&c| y.contains(atom_of_col[c])))).collect();
    let open = Jsl::open_of(&rel);
    let mut sorted = images.clone();
    sorted.sort_by_cached_key(bits::size_lex_key);
    sorted.dedup();
    if sorted.len() != images.len() {
        return Err(Error::CheckFailed("θ is not injective".into()));
    }
    if sorted != open.family() {
        return Err(Error::CheckFailed("θ is not onto the open sets of H_e".into()));
    }
    Ok(images)
}

/// Both sides of the three atomicity characterisations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicityReport {
    pub atomic_direct: bool,
    pub atomic_via_rsc: bool,
    pub positive_direct: bool,
    pub positive_via_order: bool,
    pub subatomic_direct: bool,
    pub subatomic_via_monoid: bool,
}

impl AtomicityReport {
    pub fn render(&self) -> String {
        let rows = [
            ("atomic", self.atomic_direct, self.atomic_via_rsc),
            ("positively atomic", self.positive_direct, self.positive_via_order),
            ("subatomic", self.subatomic_direct, self.subatomic_via_monoid),
        ];
        let mut out = format!("{:<18}  {:<6}  {:<8}\n", "", "direct", "indirect");
        for (name, d, i) in rows {
            out.push_str(&format!("{name:<18}  {d:<6}  {i:<8}\n"));
        }
        out
    }
}

/// The dfa map from `rsc(rev n)` to the minimal dfa of `Lʳ`, as pairs of
/// states reached by the same word. `None` unless it is a bijection that
/// matches finals.
fn rsc_rev_iso(n: &Nfa) -> Option<(Dfa, Vec<usize>)> {
    let d = n.reverse().rsc();
    let lr = n.language().reverse();
    let k = n.alphabet().len() as u8;
    let mut map = vec![usize::MAX; d.num_states()];
    let mut back = vec![usize::MAX; lr.num_states()];
    map[d.start()] = 0;
    back[0] = d.start();
    let mut stack = vec![d.start()];
    while let Some(x) = stack.pop() {
        for a in 0..k {
            let (y, q) = (d.delta(x, a), lr.delta(map[x], a));
            if map[y] == usize::MAX && back[q] == usize::MAX {
                map[y] = q;
                back[q] = y;
                stack.push(y);
            } else if map[y] != q || back[q] != y {
                return None;
            }
        }
    }
    if back.contains(&usize::MAX) || (0..map.len()).any(|x| d.is_final(x) != lr.is_final(map[x])) {
        return None;
    }
    Some((d, map))
}

/// Computes all six flags and fails if a direct side and its indirect side
/// disagree. The direct sides materialise carriers and honour `cap`.
pub fn atomicity(n: &Nfa, cap: usize) -> Result<AtomicityReport> {
    let l = n.language();
    let langs = n.state_languages();
    let lr = l.reverse();

    let atoms = l.atoms();
    cap_check("atom count", atoms.len(), cap)?;
    let state_masks: Vec<Option<Bits>> = langs.iter().map(|x| atoms.mask_of(x)).collect();
    let atomic_direct = state_masks.iter().all(Option::is_some);
    let positive_direct = atomic_direct && {
        let fam = positive_family(&l, cap)?;
        state_masks.iter().flatten().all(|m| fam.members.index_of(m).is_some())
    };
    let cong = Congruence::of_languages(l.alphabet(), std::slice::from_ref(&l));
    cap_check("syntactic class count", cong.len(), cap)?;
    let subatomic_direct = langs.iter().all(|x| cong.mask_of(x).is_some());

    let d = n.reverse().rsc();
    let atomic_via_rsc = iso_dfa(&d, &Dfa::from_language(&lr));
    let positive_via_order = match rsc_rev_iso(n) {
        Some((d, map)) => {
            let (subsets, _) = n.reverse().subset_table();
            let qs = lr.quotients();
            (0..d.num_states()).all(|x| {
                (0..d.num_states()).all(|y| {
                    subsets[x].is_subset(&subsets[y]) == qs.language(map[x]).is_subset(qs.language(map[y]))
                })
            })
        }
        None => false,
    };
    let subatomic_via_monoid = monoid_generator_bijection(&d, &lr);

    let report = AtomicityReport {
        atomic_direct,
        atomic_via_rsc,
        positive_direct,
        positive_via_order,
        subatomic_direct,
        subatomic_via_monoid,
    };
    for (name, x, y) in [
        ("atomic", atomic_direct, atomic_via_rsc),
        ("positively atomic", positive_direct, positive_via_order),
        ("subatomic", subatomic_direct, subatomic_via_monoid),
    ] {
        if x != y {
            return Err(Error::CheckFailed(format!("{name}: direct side says {x}, indirect side says {y}")));
        }
    }
    Ok(report)
}

/// Whether `[w] ↦ [w]` from the transition monoid of `d` to the syntactic
/// monoid of `lr` is a well-defined bijection.
fn monoid_generator_bijection(d: &Dfa, lr: &Language) -> bool {
    let alphabet = d.nfa().alphabet();
    let tm = Congruence::from_table(alphabet, d.num_states(), &d.table());
    let syn = Congruence::of_languages(alphabet, std::slice::from_ref(lr));
    if tm.len() != syn.len() {
        return false;
    }
    let mut map = vec![usize::MAX; tm.len()];
    let mut back = vec![usize::MAX; syn.len()];
    let (e1, e2) = (tm.class_of(&[]), syn.class_of(&[]));
    map[e1] = e2;
    back[e2] = e1;
    let mut stack = vec![e1];
    while let Some(x) = stack.pop() {
        for a in 0..alphabet.len() as u8 {
            let (y, z) = (tm.right_mul(x, a), syn.right_mul(map[x], a));
            if map[y] == usize::MAX && back[z] == usize::MAX {
                map[y] = z;
                back[z] = y;
                stack.push(y);
            } else if map[y] != z || back[z] != y {
                return false;
            }
        }
    }
    !map.contains(&usize::MAX)
}

//! Deterministic automata whose states form a join-semilattice, dependency
//! automata, and the passages between them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::{min_dfa_of, Dfa, Nfa};
use crate::bits::{self, Bits};
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::jsl::{adjoint_table, check_join_preserving, Jsl, JslMor};
use crate::lang::{reversed, Alphabet, Atoms, Congruence, Language};

/// A dfa on the elements of a finite join-semilattice whose letter actions
/// preserve joins. The final elements are those not below `top_non_final`.
#[derive(Clone, Debug)]
pub struct JslDfa {
    alphabet: Alphabet,
    carrier: Arc<Jsl>,
    init: usize,
    trans: Vec<Vec<usize>>,
    top_non_final: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct JslDfaJson {
    pub alphabet: String,
    pub base: Vec<String>,
    pub carrier: Vec<Vec<String>>,
    pub init: usize,
    pub trans: BTreeMap<String, Vec<usize>>,
    pub top_non_final: usize,
}

impl JslDfa {
    pub fn new(alphabet: Alphabet, carrier: Arc<Jsl>, init: usize, trans: Vec<Vec<usize>>, top_non_final: usize) -> Result<Self> {
        let n = carrier.len();
        if trans.len() != alphabet.len() {
            return Err(Error::InvalidAutomaton("one action per letter required".into()));
        }
        if init >= n || top_non_final >= n || trans.iter().any(|t| t.len() != n || t.iter().any(|&y| y >= n)) {
            return Err(Error::DimensionMismatch("element out of range".into()));
        }
        for t in &trans {
            check_join_preserving(&carrier, &carrier, t)?;
        }
        Ok(JslDfa { alphabet, carrier, init, trans, top_non_final })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn carrier(&self) -> &Arc<Jsl> {
        &self.carrier
    }
    pub fn init(&self) -> usize {
        self.init
    }
    pub fn top_non_final(&self) -> usize {
        self.top_non_final
    }
    pub fn len(&self) -> usize {
        self.carrier.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The action of a letter as a morphism of the carrier.
    pub fn letter_mor(&self, a: u8) -> JslMor {
        JslMor::new(self.carrier.clone(), self.carrier.clone(), self.trans[a as usize].clone()).expect("validated")
    }

    pub fn step(&self, x: usize, a: u8) -> usize {
        self.trans[a as usize][x]
    }

    pub fn run(&self, x: usize, w: &[u8]) -> usize {
        w.iter().fold(x, |x, &a| self.step(x, a))
    }

    pub fn is_final(&self, x: usize) -> bool {
        !self.carrier.leq(x, self.top_non_final)
    }

    pub fn accepts(&self, w: &[u8]) -> bool {
        self.is_final(self.run(self.init, w))
    }

    fn table(&self) -> Vec<usize> {
        let k = self.alphabet.len();
        (0..self.len()).flat_map(|x| (0..k).map(move |a| self.trans[a][x])).collect()
    }

    fn final_flags(&self) -> Vec<bool> {
        (0..self.len()).map(|x| self.is_final(x)).collect()
    }

    /// The language accepted from element `x`.
    pub fn lang_of_element(&self, x: usize) -> Language {
        Language::from_dfa(self.alphabet.clone(), x, &self.table(), &self.final_flags())
    }

    pub fn language(&self) -> Language {
        self.lang_of_element(self.init)
    }

    pub fn element_languages(&self) -> Vec<Language> {
        let (table, finals) = (self.table(), self.final_flags());
        (0..self.len()).map(|x| Language::from_dfa(self.alphabet.clone(), x, &table, &finals)).collect()
    }

    /// The whole carrier as a classical dfa, states labelled by members.
    pub fn underlying_dfa(&self) -> Dfa {
        let labels: Vec<String> = (0..self.len()).map(|x| self.carrier.label(x)).collect();
        let finals: Vec<usize> = (0..self.len()).filter(|&x| self.is_final(x)).collect();
        let edges: Vec<(usize, u8, usize)> = (0..self.len())
            .flat_map(|x| (0..self.alphabet.len() as u8).map(move |a| (x, a)))
            .map(|(x, a)| (x, a, self.step(x, a)))
            .collect();
        Dfa::new(Nfa::from_edges(self.alphabet.clone(), labels, &[self.init], &finals, &edges).expect("members are distinct"))
            .expect("deterministic")
    }

    /// The dual machine: order-dual carrier, adjoint actions, initial and
    /// top non-final elements swapped.
    pub fn pentagram(&self) -> JslDfa {
        let (op, to_op) = self.carrier.op();
        let mut trans = Vec::with_capacity(self.alphabet.len());
        for t in &self.trans {
            let adj = adjoint_table(&self.carrier, &self.carrier, t);
            let mut m = vec![0; op.len()];
            for y in 0..self.len() {
                m[to_op[y]] = to_op[adj[y]];
            }
            trans.push(m);
        }
        JslDfa::new(self.alphabet.clone(), Arc::new(op), to_op[self.top_non_final], trans, to_op[self.init])
            .expect("adjoints preserve joins of the dual")
    }

    /// Elements reachable by letters from the initial one.
    pub fn reachable(&self) -> Bits {
        let mut seen = bits::singleton(self.len(), self.init);
        let mut queue = VecDeque::from([self.init]);
        while let Some(x) = queue.pop_front() {
            for a in 0..self.alphabet.len() as u8 {
                let y = self.step(x, a);
                if !seen.put(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Every join-irreducible is classically reachable.
    pub fn is_jsl_reachable(&self) -> bool {
        let r = self.reachable();
        self.carrier.join_irreducibles().iter().all(|&j| r.contains(j))
    }

    /// Distinct elements accept distinct languages.
    pub fn is_simple(&self) -> bool {
        let langs = self.element_languages();
        let mut seen = std::collections::HashSet::new();
        langs.into_iter().all(|l| seen.insert(l))
    }

    pub fn to_json_value(&self) -> JslDfaJson {
        let base = self.carrier.base();
        JslDfaJson {
            alphabet: self.alphabet.symbols().iter().collect(),
            base: base.labels().to_vec(),
            carrier: (0..self.len()).map(|x| self.carrier.element(x).ones().map(|b| base.label(b).to_string()).collect()).collect(),
            init: self.init,
            trans: (0..self.alphabet.len()).map(|a| (self.alphabet.symbol(a as u8).to_string(), self.trans[a].clone())).collect(),
            top_non_final: self.top_non_final,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serialisable")
    }
}

/// Verifies that `map` is a morphism of JSL-dfas `a → b`.
pub fn check_jsl_dfa_morphism(a: &JslDfa, b: &JslDfa, map: &[usize]) -> Result<()> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch(format!("{} vs {}", a.alphabet, b.alphabet)));
    }
    if map.len() != a.len() || map.iter().any(|&y| y >= b.len()) {
        return Err(Error::DimensionMismatch("map does not match carriers".into()));
    }
    check_join_preserving(&a.carrier, &b.carrier, map)?;
    if map[a.init] != b.init {
        return Err(Error::CheckFailed("initial element not preserved".into()));
    }
    for x in 0..a.len() {
        if a.is_final(x) != b.is_final(map[x]) {
            return Err(Error::CheckFailed(format!("finality differs at {}", a.carrier.label(x))));
        }
        for c in 0..a.alphabet.len() as u8 {
            if map[a.step(x, c)] != b.step(map[x], c) {
                return Err(Error::CheckFailed(format!(
                    "action of {} differs at {}",
                    a.alphabet.symbol(c),
                    a.carrier.label(x)
                )));
            }
        }
    }
    Ok(())
}

/// A bijective morphism.
pub fn check_jsl_dfa_iso(a: &JslDfa, b: &JslDfa, map: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::CheckFailed(format!("carrier sizes {} and {}", a.len(), b.len())));
    }
    let mut hit = vec![false; b.len()];
    for (x, &y) in map.iter().enumerate() {
        if std::mem::replace(&mut hit[y], true) {
            return Err(Error::CheckFailed(format!("{} is not mapped injectively", a.carrier.label(x))));
        }
    }
    check_jsl_dfa_morphism(a, b, map)
}

/// Searches for an isomorphism of JSL-dfas. Simple machines are matched by
/// their element languages; otherwise lattice isomorphisms are enumerated.
pub fn jsl_dfa_isomorphism(a: &JslDfa, b: &JslDfa) -> Option<Vec<usize>> {
    if a.alphabet != b.alphabet || a.len() != b.len() {
        return None;
    }
    let (la, lb) = (a.element_languages(), b.element_languages());
    let index: HashMap<&Language, usize> = lb.iter().enumerate().map(|(i, l)| (l, i)).collect();
    if index.len() == b.len() {
        let map: Option<Vec<usize>> = la.iter().map(|l| index.get(l).copied()).collect();
        return map.filter(|m| check_jsl_dfa_iso(a, b, m).is_ok());
    }
    a.carrier.find_isomorphism(&b.carrier, |m| check_jsl_dfa_iso(a, b, m).is_ok())
}

pub fn iso_jsl_dfa(a: &JslDfa, b: &JslDfa) -> bool {
    jsl_dfa_isomorphism(a, b).is_some()
}

/// A union-closed family of languages recognised by one dfa table. Each
/// member is stored as its set of transition-monoid classes, labelled by
/// shortest words.
#[derive(Clone, Debug)]
pub struct LanguageFamily {
    cong: Arc<Congruence>,
    jsl: Arc<Jsl>,
}

impl LanguageFamily {
    /// Closes `gens` (and ∅) under binary union.
    pub fn generated(alphabet: &Alphabet, gens: &[Language]) -> Self {
        let cong = Congruence::of_languages(alphabet, gens);
        let masks: Vec<Bits> = gens.iter().map(|g| cong.mask_of(g).expect("recognised by construction")).collect();
        Self::from_masks(Arc::new(cong), &masks)
    }

    pub fn from_masks(cong: Arc<Congruence>, masks: &[Bits]) -> Self {
        let alphabet = cong.alphabet();
        let base = FinSet::new((0..cong.len()).map(|m| alphabet.fmt_word(cong.rep(m)))).expect("distinct shortest words");
        let jsl = Arc::new(Jsl::generated(base, masks));
        LanguageFamily { cong, jsl }
    }

    pub fn jsl(&self) -> &Arc<Jsl> {
        &self.jsl
    }
    pub fn congruence(&self) -> &Arc<Congruence> {
        &self.cong
    }
    pub fn len(&self) -> usize {
        self.jsl.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn language(&self, i: usize) -> Language {
        self.cong.language_of(self.jsl.element(i))
    }

    pub fn languages(&self) -> Vec<Language> {
        (0..self.len()).map(|i| self.language(i)).collect()
    }

    pub fn index_of(&self, l: &Language) -> Option<usize> {
        self.jsl.index_of(&self.cong.mask_of(l)?)
    }

    /// The machine `X ↦ a⁻¹X` started at member `init`; the family must be
    /// closed under letter quotients.
    pub fn machine(&self, init: usize) -> Result<JslDfa> {
        let alphabet = self.cong.alphabet();
        let mut trans = Vec::with_capacity(alphabet.len());
        for a in 0..alphabet.len() as u8 {
            let row = (0..self.len())
                .map(|x| {
                    self.jsl.index_of(&self.cong.letter_quotient(a, self.jsl.element(x))).ok_or_else(|| {
                        Error::NotAJsl(format!("{}⁻¹ of member {x} is missing", alphabet.symbol(a)))
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            trans.push(row);
        }
        let tnf = self.jsl.largest_below(&bits::complement(&bits::singleton(self.cong.len(), 0)));
        JslDfa::new(alphabet.clone(), self.jsl.clone(), init, trans, tnf)
    }

    pub fn machine_for(&self, init: &Language) -> Result<JslDfa> {
        let i = self.index_of(init).ok_or_else(|| Error::NotAJsl("initial language is not a member".into()))?;
        self.machine(i)
    }
}

/// The congruence of a machine's table and each element's language in it.
fn element_masks(j: &JslDfa) -> (Arc<Congruence>, Vec<Bits>) {
    let cong = Congruence::from_table(&j.alphabet, j.len(), &j.table());
    let finals = bits::from_iter(j.len(), (0..j.len()).filter(|&x| j.is_final(x)));
    let masks = (0..j.len()).map(|x| cong.mask_at(x, &finals)).collect();
    (Arc::new(cong), masks)
}

/// The sub-machine on the union-closure of the reachable elements.
pub fn jsl_reach(j: &JslDfa) -> JslDfa {
    let s = &j.carrier;
    let gens: Vec<Bits> = j.reachable().ones().map(|x| s.element(x).clone()).collect();
    let sub = Arc::new(Jsl::generated(s.base().clone(), &gens));
    let orig: Vec<usize> = (0..sub.len()).map(|y| s.index_of(sub.element(y)).expect("sub-family")).collect();
    let trans = (0..j.alphabet.len() as u8)
        .map(|a| (0..sub.len()).map(|y| sub.index_of(s.element(j.step(orig[y], a))).expect("closed")).collect())
        .collect();
    let init = sub.index_of(s.element(j.init)).expect("reachable");
    let tnf = sub.largest_below(s.element(j.top_non_final));
    JslDfa::new(j.alphabet.clone(), sub, init, trans, tnf).expect("restriction of a JSL-dfa")
}

/// The machine of accepted languages, with the acceptance map onto it.
pub fn jsl_simple(j: &JslDfa) -> (JslDfa, Vec<usize>) {
    let (cong, masks) = element_masks(j);
    let fam = LanguageFamily::from_masks(cong, &masks);
    let acc: Vec<usize> = masks.iter().map(|m| fam.jsl.index_of(m).expect("member")).collect();
    let m = fam.machine(acc[j.init]).expect("accepted languages are closed under quotients");
    (m, acc)
}

/// The union-closure of every right word quotient of the join-irreducible
/// accepted languages, as a simplified machine accepting the same language.
pub fn rqc(j: &JslDfa) -> JslDfa {
    let (cong, masks) = element_masks(j);
    let accepted = LanguageFamily::from_masks(cong.clone(), &masks);
    let mut gens: Vec<Bits> = Vec::new();
    for &x in accepted.jsl.join_irreducibles() {
        for q in cong.right_quotients(accepted.jsl.element(x)) {
            if !gens.contains(&q) {
                gens.push(q);
            }
        }
    }
    let fam = LanguageFamily::from_masks(cong, &gens);
    let init = fam.jsl.index_of(&masks[j.init]).expect("unions of irreducibles");
    fam.machine(init).expect("right quotients of a quotient-closed family are quotient-closed")
}

/// `(lower, rel, upper)` with `lower_a ; rel = rel ; upper_a˘` for each
/// letter and the initial states of each side determining the finals of
/// the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepAut {
    lower: Nfa,
    rel: FinRel,
    upper: Nfa,
}

impl DepAut {
    pub fn new(lower: Nfa, rel: FinRel, upper: Nfa) -> Result<Self> {
        if lower.alphabet() != upper.alphabet() {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", lower.alphabet(), upper.alphabet())));
        }
        if lower.states() != rel.src() || upper.states() != rel.dst() {
            return Err(Error::InvalidDepAut("relation does not span the two state sets".into()));
        }
        for a in 0..lower.alphabet().len() as u8 {
            let left = lower.trans(a).compose(&rel)?;
            let right = rel.compose(&upper.trans(a).converse())?;
            if !left.same_edges(&right) {
                return Err(Error::InvalidDepAut(format!("letter {} does not commute", lower.alphabet().symbol(a))));
            }
        }
        if rel.image(lower.initial()) != *upper.finals() {
            return Err(Error::InvalidDepAut("upper finals differ from the image of the lower initials".into()));
        }
        if rel.converse().image(upper.initial()) != *lower.finals() {
            return Err(Error::InvalidDepAut("lower finals differ from the preimage of the upper initials".into()));
        }
        Ok(DepAut { lower, rel, upper })
    }

    pub fn lower(&self) -> &Nfa {
        &self.lower
    }
    pub fn rel(&self) -> &FinRel {
        &self.rel
    }
    pub fn upper(&self) -> &Nfa {
        &self.upper
    }

    /// The lower nfa at the bottom, the upper one at the top, the relation
    /// as undirected edges between them.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph dep {\n  rankdir=BT;\n  newrank=true;\n");
        let side = |s: &mut String, tag: &str, n: &Nfa| {
            let _ = writeln!(s, "  subgraph cluster_{tag} {{\n    label=\"{tag}\";");
            for z in 0..n.num_states() {
                let mut shape = "circle";
                if n.finals().contains(z) {
                    shape = "doublecircle";
                }
                let init = if n.initial().contains(z) { ", penwidth=2" } else { "" };
                let _ = writeln!(s, "    {tag}{z} [label=\"{}\", shape={shape}{init}];", n.states().label(z));
            }
            for (p, a, q) in n.edges() {
                let _ = writeln!(s, "    {tag}{p} -> {tag}{q} [label=\"{}\"];", n.alphabet().symbol(a));
            }
            s.push_str("  }\n");
        };
        side(&mut s, "lower", &self.lower);
        side(&mut s, "upper", &self.upper);
        for (g, h) in self.rel.edges() {
            let _ = writeln!(s, "  lower{g} -> upper{h} [dir=none, style=dashed, constraint=true];");
        }
        s.push_str("}\n");
        s
    }
}

/// `(N, Δ, rev N)`.
pub fn dep_of_nfa(n: &Nfa) -> DepAut {
    DepAut::new(n.clone(), FinRel::identity(n.states()), n.reverse()).expect("the diagonal is always a dependency")
}

/// The minimal dfas of `L` and `Lʳ` linked by the dependency relation, all
/// states labelled by representative words.
pub fn dep_of_lang(l: &Language) -> DepAut {
    let rel = l.dependency_relation();
    let lower = Nfa::from_language(l).relabel(rel.src().labels().to_vec()).expect("same size");
    let upper = Nfa::from_language(&l.reverse()).relabel(rel.dst().labels().to_vec()).expect("same size");
    DepAut::new(lower, rel, upper).expect("the canonical dependency automaton is valid")
}

pub fn rev_dep(d: &DepAut) -> DepAut {
    DepAut { lower: d.upper.clone(), rel: d.rel.converse(), upper: d.lower.clone() }
}

/// The machine on the open sets of the relation.
pub fn det(d: &DepAut) -> JslDfa {
    let carrier = Arc::new(Jsl::open_of(&d.rel));
    let init = carrier.index_of(d.upper.finals()).expect("the upper finals are open");
    let trans = (0..d.lower.alphabet().len() as u8)
        .map(|a| {
            let back = d.upper.trans(a).converse();
            (0..carrier.len()).map(|y| carrier.index_of(&back.image(carrier.element(y))).expect("open image")).collect()
        })
        .collect();
    let tnf = carrier.largest_below(&bits::complement(d.upper.initial()));
    JslDfa::new(d.lower.alphabet().clone(), carrier, init, trans, tnf).expect("Det of a dependency automaton")
}

/// Powerset carrier, relational image, finals meeting `F`.
pub fn full_subset(n: &Nfa) -> JslDfa {
    let carrier = Arc::new(Jsl::powerset(n.states().clone()));
    let init = carrier.index_of(n.initial()).expect("every subset");
    let trans = (0..n.alphabet().len() as u8)
        .map(|a| (0..carrier.len()).map(|x| carrier.index_of(&n.step(carrier.element(x), a)).expect("every subset")).collect())
        .collect();
    let tnf = carrier.index_of(&bits::complement(n.finals())).expect("every subset");
    JslDfa::new(n.alphabet().clone(), carrier, init, trans, tnf).expect("relational image preserves unions")
}

/// Lower nfa on the join-irreducibles, upper nfa on the meet-irreducibles,
/// related by `⊄`.
pub fn airr(j: &JslDfa) -> DepAut {
    let s = &j.carrier;
    let rel = s.pirr();
    let (js, ms) = (s.join_irreducibles(), s.meet_irreducibles());
    let k = j.alphabet.len() as u8;
    let mut lower_edges = Vec::new();
    let mut upper_edges = Vec::new();
    for a in 0..k {
        let t = &j.trans[a as usize];
        let adj = adjoint_table(s, s, t);
        for (p, &j1) in js.iter().enumerate() {
            for (q, &j2) in js.iter().enumerate() {
                if s.leq(j2, t[j1]) {
                    lower_edges.push((p, a, q));
                }
            }
        }
        for (p, &m1) in ms.iter().enumerate() {
            for (q, &m2) in ms.iter().enumerate() {
                if s.leq(adj[m1], m2) {
                    upper_edges.push((p, a, q));
                }
            }
        }
    }
    let pick = |xs: &[usize], f: &dyn Fn(usize) -> bool| -> Vec<usize> { (0..xs.len()).filter(|&i| f(xs[i])).collect() };
    let lower_init = pick(js, &|x| s.leq(x, j.init));
    let lower_final = pick(js, &|x| !s.leq(x, j.top_non_final));
    let upper_init = pick(ms, &|x| s.leq(j.top_non_final, x));
    let upper_final = pick(ms, &|x| !s.leq(j.init, x));
    let lower = Nfa::from_edges(j.alphabet.clone(), rel.src().labels().to_vec(), &lower_init, &lower_final, &lower_edges)
        .expect("well-formed");
    let upper = Nfa::from_edges(j.alphabet.clone(), rel.dst().labels().to_vec(), &upper_init, &upper_final, &upper_edges)
        .expect("well-formed");
    DepAut::new(lower, rel, upper).expect("Airr of a JSL-dfa is a dependency automaton")
}

/// The explicit isomorphism `j → det(airr(j))`, `x ↦ {m : x ⊄ m}`.
pub fn det_airr_iso(j: &JslDfa) -> Vec<usize> {
    let target = det(&airr(j));
    (0..j.len()).map(|x| target.carrier.index_of(&j.carrier.rep(x)).expect("rep is onto the opens")).collect()
}

/// The minimal JSL-dfa. Each member is a union of left word quotients,
/// stored as its set of atoms; atoms are labelled by shortest words.
pub fn jsl_dfa_min(l: &Language) -> JslDfa {
    let atoms = l.atoms();
    jsl_dfa_min_with(l, &atoms)
}

fn jsl_dfa_min_with(l: &Language, atoms: &Atoms) -> JslDfa {
    let alphabet = l.alphabet();
    let base = FinSet::new((0..atoms.len()).map(|x| alphabet.fmt_word(atoms.rep(x)))).expect("distinct shortest words");
    let gens: Vec<Bits> = (0..l.num_states()).map(|q| atoms.quotient_mask(q)).collect();
    let carrier = Arc::new(Jsl::generated(base, &gens));
    let trans = (0..alphabet.len() as u8)
        .map(|a| (0..carrier.len()).map(|x| carrier.index_of(&atoms.letter_quotient(a, carrier.element(x))).expect("closed")).collect())
        .collect();
    let init = carrier.index_of(&gens[0]).expect("generator");
    let tnf = carrier.largest_below(&bits::complement(&bits::singleton(atoms.len(), 0)));
    JslDfa::new(alphabet.clone(), carrier, init, trans, tnf).expect("letter quotients preserve unions")
}

/// Builds `X ↦ {v⁻¹Lʳ : v ∈ Xʳ}` from words and verifies it is an
/// isomorphism from the minimal JSL-dfa onto `det(dep(L))`.
pub fn dependency_theorem_check(l: &Language) -> Result<Vec<usize>> {
    let atoms = l.atoms();
    let min = jsl_dfa_min_with(l, &atoms);
    let target = det(&dep_of_lang(l));
    let rev_idx = l.reverse().quotients();
    let k = rev_idx.len();
    let mut map = Vec::with_capacity(min.len());
    for x in 0..min.len() {
        let mask = min.carrier.element(x);
        let image = bits::from_iter(k, (0..k).filter(|&j| mask.contains(atoms.atom_of(&reversed(rev_idx.rep(j))))));
        let y = target.carrier.index_of(&image).ok_or_else(|| {
            Error::CheckFailed(format!("image of {} is not open", min.carrier.label(x)))
        })?;
        map.push(y);
    }
    check_jsl_dfa_iso(&min, &target, &map)?;
    Ok(map)
}

/// Verifies that `dr_L` is an isomorphism from the dual of the minimal
/// JSL-dfa of `Lʳ` onto the minimal JSL-dfa of `L`.
pub fn dr_iso_check(l: &Language) -> Result<Vec<usize>> {
    let rev = l.reverse();
    let rev_atoms = rev.atoms();
    let src_min = jsl_dfa_min_with(&rev, &rev_atoms);
    let (op, to_op) = src_min.carrier.op();
    let src = src_min.pentagram();
    debug_assert_eq!(op.len(), src.len());
    let atoms = l.atoms();
    let dst = jsl_dfa_min_with(l, &atoms);
    let mut map = vec![0; src.len()];
    for x in 0..src_min.len() {
        let lang = rev_atoms.mask_language(src_min.carrier.element(x));
        let image = l.dr(&lang)?;
        let mask = atoms.mask_of(&image).ok_or(Error::NotAQuotient)?;
        map[to_op[x]] = dst
            .carrier
            .index_of(&mask)
            .ok_or_else(|| Error::CheckFailed(format!("dr of {} is not a union of quotients", src_min.carrier.label(x))))?;
    }
    check_jsl_dfa_iso(&src, &dst, &map)?;
    Ok(map)
}

fn quotient_nfa(l: &Language, atoms: &Atoms, masks: &[(String, Bits)]) -> Nfa {
    let whole = atoms.quotient_mask(0);
    let k = l.alphabet().len() as u8;
    let mut edges = Vec::new();
    for (p, (_, x1)) in masks.iter().enumerate() {
        for a in 0..k {
            let q1 = atoms.letter_quotient(a, x1);
            for (q, (_, x2)) in masks.iter().enumerate() {
                if x2.is_subset(&q1) {
                    edges.push((p, a, q));
                }
            }
        }
    }
    let init: Vec<usize> = (0..masks.len()).filter(|&i| masks[i].1.is_subset(&whole)).collect();
    let fin: Vec<usize> = (0..masks.len()).filter(|&i| atoms.contains_epsilon(&masks[i].1)).collect();
    let labels = masks.iter().map(|m| m.0.clone()).collect();
    Nfa::from_edges(l.alphabet().clone(), labels, &init, &fin, &edges).expect("well-formed")
}

/// The nfa on the join-irreducible left quotients with `X → Y` on `a`
/// whenever `Y ⊆ a⁻¹X`. States are labelled by representative words.
pub fn canonical_rfsa(l: &Language) -> Nfa {
    let atoms = l.atoms();
    let idx = l.quotients();
    let min = jsl_dfa_min_with(l, &atoms);
    let masks: Vec<(String, Bits)> = min
        .carrier
        .join_irreducibles()
        .iter()
        .map(|&x| {
            let m = min.carrier.element(x).clone();
            let q = (0..idx.len()).find(|&q| atoms.quotient_mask(q) == m).expect("irreducibles are word quotients");
            (l.alphabet().fmt_word(idx.rep(q)), m)
        })
        .collect();
    quotient_nfa(l, &atoms, &masks)
}

/// The same construction over all left word quotients.
pub fn sat_min_dfa(l: &Language) -> Nfa {
    let atoms = l.atoms();
    let idx = l.quotients();
    let masks: Vec<(String, Bits)> =
        (0..idx.len()).map(|q| (l.alphabet().fmt_word(idx.rep(q)), atoms.quotient_mask(q))).collect();
    quotient_nfa(l, &atoms, &masks)
}

/// Reverse, determinise, reverse, determinise; cross-checked against the
/// canonical minimal dfa.
pub fn brzozowski_minimize(n: &Nfa) -> Result<Dfa> {
    let d = n.reverse().rsc().into_nfa().reverse().rsc();
    if !d.is_isomorphic(&min_dfa_of(n)) {
        return Err(Error::CheckFailed("double reversal does not give the minimal dfa".into()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::iso_nfa;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn l(s: &str) -> Language {
        Language::parse(s).unwrap()
    }

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn random_nfa(rng: &mut ChaCha8Rng, max: usize) -> Nfa {
        let n = rng.gen_range(1..=max);
        Nfa::random(rng, &ab(), n, 0.3)
    }

    /// A random JSL-dfa: the full subset machine of a random nfa restricted
    /// to a random sub-lattice generated by its reachable part.
    fn random_jsl_dfa(rng: &mut ChaCha8Rng) -> JslDfa {
        let n = random_nfa(rng, 4);
        let fs = full_subset(&n);
        if rng.gen_bool(0.5) {
            jsl_reach(&fs)
        } else {
            fs
        }
    }

    #[test]
    fn bottom_accepts_nothing_and_joins_are_unions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let j = random_jsl_dfa(&mut rng);
            let langs = j.element_languages();
            assert!(langs[0].is_empty());
            if j.len() <= 8 {
                for mask in bits::all_subsets(j.len()) {
                    let xs: Vec<usize> = mask.ones().collect();
                    let u = xs.iter().fold(Language::empty(&ab()), |acc, &x| acc.union(&langs[x]));
                    assert_eq!(langs[j.carrier.join(&xs)], u);
                }
            } else {
                for x in 0..j.len() {
                    for y in 0..j.len() {
                        assert_eq!(langs[j.carrier.join2(x, y)], langs[x].union(&langs[y]));
                    }
                }
            }
        }
    }

    #[test]
    fn minimal_machine_of_a_plus_aa() {
        let lang = l("a+aa");
        let m = jsl_dfa_min(&lang);
        assert_eq!(m.language(), lang);
        // union-closure oracle over the quotient languages themselves
        let qs = lang.quotients();
        let mut fam: Vec<Language> = vec![Language::empty(lang.alphabet())];
        for mask in bits::all_subsets(qs.len()) {
            let u = qs.union_of(&mask);
            if !fam.contains(&u) {
                fam.push(u);
            }
        }
        assert_eq!(m.len(), fam.len());
        for x in m.element_languages() {
            assert!(fam.contains(&x));
        }
        assert_eq!(jsl_dfa_min(&Language::universal(&ab())).len(), 2);
        assert_eq!(jsl_dfa_min(&Language::empty(&ab())).len(), 1);
    }

    #[test]
    fn pentagram_reverses_and_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let j = random_jsl_dfa(&mut rng);
            let p = j.pentagram();
            assert_eq!(p.language(), j.language().reverse());
            if j.len() <= 16 {
                assert!(iso_jsl_dfa(&p.pentagram(), &j));
            }
        }
    }

    #[test]
    fn pentagram_of_full_subset() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = random_nfa(&mut rng, 3);
            assert!(iso_jsl_dfa(&full_subset(&n).pentagram(), &full_subset(&n.reverse())));
        }
    }

    #[test]
    fn full_subset_basics() {
        let n = Nfa::from_edges(ab(), vec!["p"], &[0], &[0], &[(0, 0, 0)]).unwrap();
        assert_eq!(full_subset(&n).len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let n = random_nfa(&mut rng, 4);
            let fs = full_subset(&n);
            assert_eq!(fs.language(), n.language());
            let reach = fs.underlying_dfa().into_nfa().reach_part();
            assert!(iso_nfa(&reach, n.rsc().nfa()) || Dfa::new(reach).unwrap().is_isomorphic(&n.rsc()));
            let d = det(&dep_of_nfa(&n));
            assert_eq!(d.carrier.family(), fs.carrier.family());
            assert_eq!((d.init, d.top_non_final, &d.trans), (fs.init, fs.top_non_final, &fs.trans));
        }
    }

    #[test]
    fn canonical_dependency_automaton_of_a_plus_aa() {
        let d = dep_of_lang(&l("a+aa"));
        assert_eq!(d.lower().num_states(), 4);
        assert_eq!(d.upper().num_states(), 4);
        assert_eq!(d.rel().edge_count(), 5);
        // sink rows and columns are isolated
        assert!(d.rel().row(3).is_clear());
        assert!(d.rel().col(3).is_clear());
        let e = dep_of_lang(&Language::empty(&ab()));
        assert_eq!((e.lower().num_states(), e.upper().num_states(), e.rel().edge_count()), (1, 1, 0));
    }

    #[test]
    fn random_canonical_dependency_automata_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let lang = Language::random(&mut rng, &ab(), 4);
            let d = dep_of_lang(&lang);
            assert_eq!(d.upper().language(), d.lower().language().reverse());
            assert_eq!(rev_dep(&rev_dep(&d)), d);
        }
    }

    #[test]
    fn invalid_dependency_automaton_rejected() {
        let n = Nfa::from_edges(ab(), vec!["p", "q"], &[0], &[1], &[(0, 0, 1)]).unwrap();
        let full = FinRel::full(n.states().clone(), n.states().clone());
        assert!(matches!(DepAut::new(n.clone(), full, n.reverse()), Err(Error::InvalidDepAut(_))));
    }

    #[test]
    fn det_airr_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let j = random_jsl_dfa(&mut rng);
            let map = det_airr_iso(&j);
            check_jsl_dfa_iso(&j, &det(&airr(&j)), &map).unwrap();
            let d = dep_of_nfa(&random_nfa(&mut rng, 3));
            let dd = det(&d);
            check_jsl_dfa_iso(&dd, &det(&airr(&dd)), &det_airr_iso(&dd)).unwrap();
            assert_eq!(airr(&j).upper().language(), j.language().reverse());
        }
    }

    #[test]
    fn airr_of_minimal_machine_is_the_canonical_rfsa() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..40 {
            let lang = if i == 0 { l("a+aa") } else { Language::random(&mut rng, &ab(), 4) };
            let lower = airr(&det(&dep_of_lang(&lang))).lower().clone();
            let rfsa = canonical_rfsa(&lang);
            assert_eq!(lower.num_states(), rfsa.num_states());
            let mut a: Vec<Language> = lower.state_languages();
            let mut b: Vec<Language> = rfsa.state_languages();
            a.sort();
            b.sort();
            assert_eq!(a, b);
            assert_eq!(lower.edge_count(), rfsa.edge_count());
        }
    }

    #[test]
    fn reach_and_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let one = jsl_dfa_min(&Language::empty(&ab()));
        assert!(one.is_jsl_reachable() && one.is_simple());
        for _ in 0..100 {
            let j = full_subset(&random_nfa(&mut rng, 3));
            assert_eq!(j.is_jsl_reachable(), j.pentagram().is_simple());
            let r = jsl_reach(&j);
            assert!(r.is_jsl_reachable());
            assert_eq!(r.language(), j.language());
            assert_eq!(jsl_reach(&j).len() == j.len(), j.is_jsl_reachable());
            let (s, acc) = jsl_simple(&j);
            assert!(s.is_simple());
            check_jsl_dfa_morphism(&j, &s, &acc).unwrap();
            // De Morgan: the dual of the reach of the dual is the simplification
            assert!(iso_jsl_dfa(&jsl_reach(&j.pentagram()).pentagram(), &s));
        }
    }

    #[test]
    fn minimal_machine_is_reachable_and_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let lang = Language::random(&mut rng, &ab(), 4);
            let m = jsl_dfa_min(&lang);
            assert_eq!(jsl_reach(&m).len(), m.len());
            assert!(m.is_simple());
            assert!(m.is_jsl_reachable());
        }
    }

    #[test]
    fn minimal_machine_is_no_larger_than_others() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let n = random_nfa(&mut rng, 4);
            let m = jsl_dfa_min(&n.language());
            let fs = full_subset(&n);
            assert!(m.len() <= fs.len());
            assert!(m.len() <= jsl_reach(&fs).len());
            assert!(iso_jsl_dfa(&jsl_simple(&jsl_reach(&fs)).0, &m));
        }
    }

    #[test]
    fn reachability_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = random_nfa(&mut rng, 4);
            let rsc = n.rsc().into_nfa();
            let (subsets, _) = n.subset_table();
            let reach_states: Vec<usize> = n.reachable_states().ones().collect();
            let reach = n.reach_part();
            let rel = FinRel::from_fn(rsc.states().clone(), reach.states().clone(), |s, z| subsets[s].contains(reach_states[z]));
            let d = DepAut::new(rsc, rel, reach.reverse()).unwrap();
            assert!(iso_jsl_dfa(&det(&d), &jsl_reach(&full_subset(&n))));
        }
    }

    #[test]
    fn simplicity_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let n = random_nfa(&mut rng, 4);
            let co_states: Vec<usize> = n.reverse().reachable_states().ones().collect();
            let co = n.coreach_part();
            let up = n.reverse().rsc().into_nfa();
            let (subsets, _) = n.reverse().subset_table();
            let rel = FinRel::from_fn(co.states().clone(), up.states().clone(), |z, s| subsets[s].contains(co_states[z]));
            let d = DepAut::new(co, rel, up).unwrap();
            assert!(iso_jsl_dfa(&det(&d), &jsl_simple(&full_subset(&n)).0));
        }
    }

    #[test]
    fn simplified_machines_are_quotient_closed_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let (s, _) = jsl_simple(&full_subset(&random_nfa(&mut rng, 3)));
            let langs = s.element_languages();
            let fam = LanguageFamily::generated(&ab(), &langs);
            assert_eq!(fam.len(), s.len());
            for x in &langs {
                for a in 0..2 {
                    assert!(langs.contains(&x.left_word_quotient(&[a])));
                }
            }
            let again = fam.machine_for(&s.language()).unwrap();
            assert!(iso_jsl_dfa(&again, &s));
        }
        // a family missing a quotient is rejected
        let fam = LanguageFamily::generated(&ab(), &[l("ab")]);
        assert!(fam.machine_for(&l("ab")).is_err());
    }

    #[test]
    fn dependency_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        dependency_theorem_check(&l("a+aa")).unwrap();
        dependency_theorem_check(&Language::empty(&ab())).unwrap();
        dependency_theorem_check(&Language::universal(&ab())).unwrap();
        for _ in 0..100 {
            dependency_theorem_check(&Language::random(&mut rng, &ab(), 5)).unwrap();
        }
    }

    #[test]
    fn dr_is_an_isomorphism_of_minimal_machines() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        dr_iso_check(&l("(ab)*+(abc)*")).unwrap();
        for _ in 0..40 {
            dr_iso_check(&Language::random(&mut rng, &ab(), 4)).unwrap();
        }
    }

    #[test]
    fn canonical_rfsa_and_saturated_dfa() {
        let lang = l("a+aa");
        let rfsa = canonical_rfsa(&lang);
        // irreducibility scan: quotients that are not unions of strictly smaller ones
        let qs = lang.quotients();
        let irr: Vec<usize> = (0..qs.len())
            .filter(|&i| {
                let x = qs.language(i);
                let below = (0..qs.len())
                    .filter(|&j| j != i && qs.language(j).is_subset(x) && qs.language(j) != x)
                    .fold(Language::empty(lang.alphabet()), |acc, j| acc.union(qs.language(j)));
                below != *x
            })
            .collect();
        assert_eq!(rfsa.num_states(), irr.len());
        assert_eq!(rfsa.language(), lang);
        let sat = sat_min_dfa(&lang);
        assert_eq!(sat.language(), lang);
        for (p, a, q) in Nfa::from_language(&lang).edges() {
            assert!(sat.has_edge(p, a, q));
        }
        let word = l("abab");
        let chain = canonical_rfsa(&word);
        assert_eq!(chain.num_states(), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..100 {
            let x = Language::random(&mut rng, &ab(), 5);
            assert_eq!(canonical_rfsa(&x).language(), x);
            assert_eq!(sat_min_dfa(&x).language(), x);
        }
    }

    #[test]
    fn brzozowski() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = brzozowski_minimize(&Nfa::from_edges(Alphabet::from_str("a").unwrap(), vec!["i", "o"], &[0], &[1], &[(0, 0, 1), (0, 0, 0)]).unwrap()).unwrap();
        assert_eq!(m.num_states(), 2);
        let aa = Nfa::from_edges(Alphabet::from_str("a").unwrap(), vec!["i", "m", "o"], &[0], &[1, 2], &[(0, 0, 1), (1, 0, 2)]).unwrap();
        assert_eq!(brzozowski_minimize(&aa).unwrap().num_states(), 4);
        for _ in 0..200 {
            let n = random_nfa(&mut rng, 5);
            brzozowski_minimize(&n).unwrap();
            let d = Nfa::from_language(&n.language());
            assert!(brzozowski_minimize(&d).unwrap().is_isomorphic(&Dfa::new(d).unwrap()));
        }
    }

    #[test]
    fn right_quotient_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..30 {
            let lang = Language::random(&mut rng, &ab(), 3);
            let m = jsl_dfa_min(&lang);
            let r = rqc(&m);
            assert_eq!(r.language(), lang);
            let langs = r.element_languages();
            // quotient-orbit oracle: every Xv⁻¹ for |v| ≤ 3 stays in the family
            for x in &langs {
                for v in ab().words_upto(3) {
                    let xv = x.right_quotient(&Language::word(&ab(), &v));
                    assert!(langs.contains(&xv));
                }
            }
            assert!(iso_jsl_dfa(&rqc(&r), &r));
            assert!(r.len() >= m.len());
        }
    }

    #[test]
    fn json_dump() {
        let m = jsl_dfa_min(&l("a+aa"));
        let v: JslDfaJson = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v.carrier.len(), m.len());
        assert_eq!(v.trans["a"].len(), m.len());
        assert!(dep_of_lang(&l("a+aa")).to_dot().contains("dir=none"));
    }
}

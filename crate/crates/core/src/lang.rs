//! Regular languages as canonical minimal DFAs, with quotients, reversal,
//! the dependency relation, `dr_L` and atoms.

pub mod regex;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::Rng;

use crate::automata::Nfa;
use crate::bits::{self, Bits};
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};

/// Letters are addressed by their position in the alphabet.
pub type Word = Vec<u8>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    /// Sorts and deduplicates; rejects an empty set or more than 26 symbols.
    pub fn new<I: IntoIterator<Item = char>>(symbols: I) -> Result<Self> {
        let mut symbols: Vec<char> = symbols.into_iter().collect();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(Error::Parse("alphabet must be non-empty".into()));
        }
        if symbols.len() > 26 {
            return Err(Error::Parse("alphabet has more than 26 symbols".into()));
        }
        if let Some(c) = symbols.iter().find(|c| c.is_whitespace() || "+*()%#".contains(**c)) {
            return Err(Error::Parse(format!("`{c}` cannot be a symbol")));
        }
        Ok(Alphabet { symbols })
    }

    pub fn from_str(s: &str) -> Result<Self> {
        Self::new(s.chars())
    }

    /// `{a, b, ...}` with the first `k` lowercase letters.
    pub fn first(k: usize) -> Self {
        Alphabet { symbols: (0..k.clamp(1, 26)).map(|i| (b'a' + i as u8) as char).collect() }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, a: u8) -> char {
        self.symbols[a as usize]
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as u8)
    }

    /// Parses a word; `%` or `ε` alone denotes the empty word.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        if s == "%" || s == "ε" {
            return Ok(Vec::new());
        }
        s.chars()
            .map(|c| self.index_of(c).ok_or_else(|| Error::Parse(format!("`{c}` is not in the alphabet"))))
            .collect()
    }

    pub fn fmt_word(&self, w: &[u8]) -> String {
        if w.is_empty() {
            "ε".to_string()
        } else {
            w.iter().map(|&a| self.symbol(a)).collect()
        }
    }

    /// All words of length at most `k`, shortlex ordered.
    pub fn words_upto(&self, k: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..k {
            let next: Vec<Word> = layer
                .iter()
                .flat_map(|w| {
                    (0..self.len() as u8).map(move |a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn reversed(w: &[u8]) -> Word {
    w.iter().rev().copied().collect()
}

pub fn concat(u: &[u8], v: &[u8]) -> Word {
    let mut w = u.to_vec();
    w.extend_from_slice(v);
    w
}

/// A regular language, held as its minimal complete DFA with states numbered
/// breadth-first from the initial state 0, letters explored in order.
/// Equality is equality of these tables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Language {
    alphabet: Alphabet,
    trans: Vec<usize>,
    finals: Vec<bool>,
}

impl Language {
    /// Canonical form of the DFA `(start, trans, finals)`; `trans[q * |Σ| + a]`.
    pub fn from_dfa(alphabet: Alphabet, start: usize, trans: &[usize], finals: &[bool]) -> Self {
        let k = alphabet.len();
        let n = finals.len();
        assert_eq!(trans.len(), n * k, "transition table must be |states| × |alphabet|");
        // reachable part
        let mut id = vec![usize::MAX; n];
        let mut order = vec![start];
        id[start] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for a in 0..k {
                let r = trans[q * k + a];
                if id[r] == usize::MAX {
                    id[r] = order.len();
                    order.push(r);
                }
            }
            i += 1;
        }
        let m = order.len();
        let rtrans: Vec<usize> = order.iter().flat_map(|&q| (0..k).map(move |a| trans[q * k + a])).map(|r| id[r]).collect();
        let rfinals: Vec<bool> = order.iter().map(|&q| finals[q]).collect();
        // Moore refinement
        let mut class: Vec<usize> = rfinals.iter().map(|&f| f as usize).collect();
        let mut count = 0;
        loop {
            let mut sigs: HashMap<Vec<usize>, usize> = HashMap::new();
            let next: Vec<usize> = (0..m)
                .map(|q| {
                    let mut sig = Vec::with_capacity(k + 1);
                    sig.push(class[q]);
                    sig.extend((0..k).map(|a| class[rtrans[q * k + a]]));
                    let len = sigs.len();
                    *sigs.entry(sig).or_insert(len)
                })
                .collect();
            let new_count = sigs.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // BFS renumbering of the quotient
        let mut num = vec![usize::MAX; count];
        let mut rep = vec![usize::MAX; count];
        for q in 0..m {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let mut queue = vec![class[0]];
        num[class[0]] = 0;
        let mut i = 0;
        while i < queue.len() {
            let c = queue[i];
            for a in 0..k {
                let d = class[rtrans[rep[c] * k + a]];
                if num[d] == usize::MAX {
                    num[d] = queue.len();
                    queue.push(d);
                }
            }
            i += 1;
        }
        let ftrans: Vec<usize> =
            queue.iter().flat_map(|&c| (0..k).map(move |a| (c, a))).map(|(c, a)| num[class[rtrans[rep[c] * k + a]]]).collect();
        let ffinals: Vec<bool> = queue.iter().map(|&c| rfinals[rep[c]]).collect();
        Language { alphabet, trans: ftrans, finals: ffinals }
    }

    /// Determinises and minimises an NFA.
    pub fn from_nfa(n: &Nfa) -> Self {
        let alphabet = n.alphabet().clone();
        let k = alphabet.len();
        let mut index: HashMap<Bits, usize> = HashMap::new();
        let mut subsets: Vec<Bits> = vec![n.initial().clone()];
        index.insert(n.initial().clone(), 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            for a in 0..k {
                let next = n.step(&subsets[i], a as u8);
                let len = subsets.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    len
                });
                trans.push(id);
            }
            i += 1;
        }
        let finals: Vec<bool> = subsets.iter().map(|s| !s.is_disjoint(n.finals())).collect();
        Self::from_dfa(alphabet, 0, &trans, &finals)
    }

    pub fn parse(regex: &str) -> Result<Self> {
        Ok(Self::from_nfa(&regex::compile(regex, None)?))
    }

    pub fn parse_over(regex: &str, alphabet: &Alphabet) -> Result<Self> {
        Ok(Self::from_nfa(&regex::compile(regex, Some(alphabet))?))
    }

    pub fn empty(alphabet: &Alphabet) -> Self {
        let k = alphabet.len();
        Language { alphabet: alphabet.clone(), trans: vec![0; k], finals: vec![false] }
    }

    pub fn universal(alphabet: &Alphabet) -> Self {
        Self::empty(alphabet).complement()
    }

    /// The singleton `{w}`.
    pub fn word(alphabet: &Alphabet, w: &[u8]) -> Self {
        let k = alphabet.len();
        let n = w.len() + 2;
        let sink = w.len() + 1;
        let mut trans = vec![sink; n * k];
        for (i, &a) in w.iter().enumerate() {
            trans[i * k + a as usize] = i + 1;
        }
        let mut finals = vec![false; n];
        finals[w.len()] = true;
        Self::from_dfa(alphabet.clone(), 0, &trans, &finals)
    }

    /// Finite language of the given words.
    pub fn finite(alphabet: &Alphabet, words: &[Word]) -> Self {
        words.iter().fold(Self::empty(alphabet), |acc, w| acc.union(&Self::word(alphabet, w)))
    }

    /// Random complete DFA on `n` states, canonicalised.
    pub fn random<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> Self {
        let k = alphabet.len();
        let trans: Vec<usize> = (0..n * k).map(|_| rng.gen_range(0..n)).collect();
        let finals: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        Self::from_dfa(alphabet.clone(), 0, &trans, &finals)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of states of the minimal complete DFA, i.e. `|LW(L)|`.
    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn delta(&self, q: usize, a: u8) -> usize {
        self.trans[q * self.alphabet.len() + a as usize]
    }

    pub fn run(&self, q: usize, w: &[u8]) -> usize {
        w.iter().fold(q, |q, &a| self.delta(q, a))
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> Bits {
        bits::from_iter(self.num_states(), (0..self.num_states()).filter(|&q| self.finals[q]))
    }

    pub fn trans_table(&self) -> &[usize] {
        &self.trans
    }

    pub fn member(&self, w: &[u8]) -> bool {
        self.finals[self.run(0, w)]
    }

    pub fn is_empty(&self) -> bool {
        self.num_states() == 1 && !self.finals[0]
    }

    pub fn is_universal(&self) -> bool {
        self.num_states() == 1 && self.finals[0]
    }

    pub fn contains_epsilon(&self) -> bool {
        self.finals[0]
    }

    /// The language accepted from state `q`, i.e. the quotient it names.
    pub fn at_state(&self, q: usize) -> Self {
        Self::from_dfa(self.alphabet.clone(), q, &self.trans, &self.finals)
    }

    /// The language accepted from any of the states in `qs`.
    pub fn at_states(&self, qs: &Bits) -> Self {
        let n = self.num_states();
        let k = self.alphabet.len();
        let mut index: HashMap<Bits, usize> = HashMap::new();
        let mut subsets = vec![qs.clone()];
        index.insert(qs.clone(), 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            for a in 0..k {
                let next = bits::from_iter(n, subsets[i].ones().map(|q| self.delta(q, a as u8)));
                let len = subsets.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    len
                });
                trans.push(id);
            }
            i += 1;
        }
        let finals: Vec<bool> = subsets.iter().map(|s| s.ones().any(|q| self.finals[q])).collect();
        Self::from_dfa(self.alphabet.clone(), 0, &trans, &finals)
    }

    pub fn left_word_quotient(&self, u: &[u8]) -> Self {
        self.at_state(self.run(0, u))
    }

    fn check_alphabet(&self, other: &Self) {
        assert_eq!(self.alphabet, other.alphabet, "languages over different alphabets");
    }

    /// Product construction.
    ///
    /// # Panics
    /// If the alphabets differ.
    pub fn product(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        self.check_alphabet(other);
        let k = self.alphabet.len();
        let m = other.num_states();
        let n = self.num_states() * m;
        let trans: Vec<usize> = (0..n)
            .flat_map(|p| (0..k).map(move |a| (p, a)))
            .map(|(p, a)| self.delta(p / m, a as u8) * m + other.delta(p % m, a as u8))
            .collect();
        let finals: Vec<bool> = (0..n).map(|p| op(self.finals[p / m], other.finals[p % m])).collect();
        Self::from_dfa(self.alphabet.clone(), 0, &trans, &finals)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.product(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.product(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.product(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        let finals: Vec<bool> = self.finals.iter().map(|f| !f).collect();
        Language { alphabet: self.alphabet.clone(), trans: self.trans.clone(), finals }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn reverse(&self) -> Self {
        Self::from_nfa(&Nfa::from_language(self).reverse())
    }

    /// `U⁻¹L`: the words `w` with `uw ∈ L` for some `u ∈ U`.
    pub fn left_set_quotient(&self, u_set: &Self) -> Self {
        self.check_alphabet(u_set);
        let k = self.alphabet.len();
        let m = self.num_states();
        let mut seen = vec![false; u_set.num_states() * m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut hits = bits::empty(m);
        while let Some(p) = queue.pop_front() {
            let (uq, lq) = (p / m, p % m);
            if u_set.finals[uq] {
                hits.insert(lq);
            }
            for a in 0..k as u8 {
                let r = u_set.delta(uq, a) * m + self.delta(lq, a);
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        self.at_states(&hits)
    }

    /// `LV⁻¹ = ((Vʳ)⁻¹Lʳ)ʳ`.
    pub fn right_quotient(&self, v_set: &Self) -> Self {
        self.reverse().left_set_quotient(&v_set.reverse()).reverse()
    }

    /// The distinct right word quotients `Lv⁻¹`, in BFS order of `v` read
    /// backwards from the final states.
    pub fn right_word_quotients(&self) -> Vec<Self> {
        let n = self.num_states();
        let k = self.alphabet.len();
        let start = self.finals();
        let mut seen: HashMap<Bits, ()> = HashMap::from([(start.clone(), ())]);
        let mut sets = vec![start];
        let mut i = 0;
        while i < sets.len() {
            for a in 0..k as u8 {
                let pre = bits::from_iter(n, (0..n).filter(|&q| sets[i].contains(self.delta(q, a))));
                if seen.insert(pre.clone(), ()).is_none() {
                    sets.push(pre);
                }
            }
            i += 1;
        }
        let mut out: Vec<Self> = Vec::new();
        for f in &sets {
            let finals: Vec<bool> = (0..n).map(|q| f.contains(q)).collect();
            let x = Self::from_dfa(self.alphabet.clone(), 0, &self.trans, &finals);
            if !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    pub fn quotients(&self) -> QuotientIndex {
        QuotientIndex::new(self)
    }

    /// `dr_L(X) = [complement(X)ʳ]⁻¹ L`, for `X` a union of left word
    /// quotients of `Lʳ`.
    pub fn dr(&self, x: &Self) -> Result<Self> {
        if x.alphabet != self.alphabet {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", x.alphabet, self.alphabet)));
        }
        let rev = self.reverse();
        if quotient_union_mask(&rev.quotients(), x).is_none() {
            return Err(Error::NotAQuotient);
        }
        Ok(self.left_set_quotient(&x.complement().reverse()))
    }

    /// The same map by its second description: the union of the quotients of
    /// `L` avoiding `vʳ` for every representative `v` of a quotient of `Lʳ`
    /// contained in `X`.
    pub fn dr_by_quotients(&self, x: &Self) -> Result<Self> {
        let rev_idx = self.reverse().quotients();
        let mask = quotient_union_mask(&rev_idx, x).ok_or(Error::NotAQuotient)?;
        let vs: Vec<Word> = mask.ones().map(|j| reversed(rev_idx.rep(j))).collect();
        let keep = bits::from_iter(
            self.num_states(),
            (0..self.num_states()).filter(|&q| vs.iter().all(|vr| !self.finals[self.run(q, vr)])),
        );
        Ok(self.at_states(&keep))
    }

    /// `DR_L(u⁻¹L, v⁻¹Lʳ) ⟺ uvʳ ∈ L`, rows indexed by `LW(L)` and columns by
    /// `LW(Lʳ)`, both in canonical order and labelled by representatives.
    pub fn dependency_relation(&self) -> FinRel {
        let rows = self.quotients();
        let cols = self.reverse().quotients();
        let src = FinSet::new(rows.reps().iter().map(|u| self.alphabet.fmt_word(u))).expect("distinct reps");
        let dst = FinSet::new(cols.reps().iter().map(|v| self.alphabet.fmt_word(v))).expect("distinct reps");
        FinRel::from_fn(src, dst, |i, j| self.finals[self.run(i, &reversed(cols.rep(j)))])
    }

    pub fn atoms(&self) -> Atoms {
        Atoms::new(self)
    }

    /// `cl_L(X)`: the union of the atoms of `L` meeting `X`.
    pub fn atomic_closure(&self, x: &Self) -> Self {
        let atoms = self.atoms();
        atoms.mask_language(&atoms.meeting(x))
    }

    /// Brute-force enumeration oracle: the words of length ≤ k in `L`.
    pub fn words_upto(&self, k: usize) -> Vec<Word> {
        self.alphabet.words_upto(k).into_iter().filter(|w| self.member(w)).collect()
    }

    /// Short textual form: state count and the transition table.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for q in 0..self.num_states() {
            let succ: Vec<String> =
                (0..self.alphabet.len()).map(|a| format!("{}→{}", self.alphabet.symbol(a as u8), self.delta(q, a as u8))).collect();
            s.push_str(&format!("{q}{} {}\n", if self.finals[q] { "*" } else { "" }, succ.join(" ")));
        }
        s
    }
}

/// If `x` is a union of the quotients listed in `idx`, the set of those quotients.
pub fn quotient_union_mask(idx: &QuotientIndex, x: &Language) -> Option<Bits> {
    let n = idx.len();
    let mask = bits::from_iter(n, (0..n).filter(|&j| idx.language(j).is_subset(x)));
    let union = idx.union_of(&mask);
    (union == *x).then_some(mask)
}

/// The left word quotients of a language with a shortest representative each.
#[derive(Clone, Debug)]
pub struct QuotientIndex {
    language: Language,
    reps: Vec<Word>,
    langs: Vec<Language>,
}

impl QuotientIndex {
    pub fn new(l: &Language) -> Self {
        let n = l.num_states();
        let k = l.alphabet.len();
        let mut reps: Vec<Option<Word>> = vec![None; n];
        reps[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            for a in 0..k as u8 {
                let r = l.delta(q, a);
                if reps[r].is_none() {
                    let mut w = reps[q].clone().unwrap();
                    w.push(a);
                    reps[r] = Some(w);
                    queue.push_back(r);
                }
            }
        }
        let reps: Vec<Word> = reps.into_iter().map(|r| r.expect("canonical DFAs are reachable")).collect();
        let langs = (0..n).map(|q| l.at_state(q)).collect();
        QuotientIndex { language: l.clone(), reps, langs }
    }

    pub fn language(&self, i: usize) -> &Language {
        &self.langs[i]
    }

    pub fn languages(&self) -> &[Language] {
        &self.langs
    }

    pub fn rep(&self, i: usize) -> &Word {
        &self.reps[i]
    }

    pub fn reps(&self) -> &[Word] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn base(&self) -> &Language {
        &self.language
    }

    pub fn index_of(&self, x: &Language) -> Option<usize> {
        self.langs.iter().position(|l| l == x)
    }

    /// Union of the quotients in `mask`.
    pub fn union_of(&self, mask: &Bits) -> Language {
        self.language.at_states(mask)
    }

    /// `u⁻¹L ⊆ v⁻¹L` as a table.
    pub fn inclusion(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.langs[i].is_subset(&self.langs[j])).collect()).collect()
    }
}

/// The classes of words that agree on membership in every left word
/// quotient. Atom `α` is identified by `S_α = {q : δ(q, w) final}` for any
/// of its words `w`; atom 0 contains ε.
#[derive(Clone, Debug)]
pub struct Atoms {
    language: Language,
    sets: Vec<Bits>,
    reps: Vec<Word>,
    /// `pre[a][α]` is the atom of `a·w` for `w ∈ α`.
    pre: Vec<Vec<usize>>,
    index: HashMap<Bits, usize>,
}

impl Atoms {
    pub fn new(l: &Language) -> Self {
        let n = l.num_states();
        let k = l.alphabet.len();
        let start = l.finals();
        let mut index = HashMap::from([(start.clone(), 0usize)]);
        let mut sets = vec![start];
        let mut reps: Vec<Word> = vec![Vec::new()];
        let mut i = 0;
        while i < sets.len() {
            for a in 0..k as u8 {
                let pre = bits::from_iter(n, (0..n).filter(|&q| sets[i].contains(l.delta(q, a))));
                if !index.contains_key(&pre) {
                    index.insert(pre.clone(), sets.len());
                    sets.push(pre);
                    let mut w = vec![a];
                    w.extend_from_slice(&reps[i]);
                    reps.push(w);
                }
            }
            i += 1;
        }
        let pre: Vec<Vec<usize>> = (0..k as u8)
            .map(|a| {
                sets.iter()
                    .map(|s| index[&bits::from_iter(n, (0..n).filter(|&q| s.contains(l.delta(q, a))))])
                    .collect()
            })
            .collect();
        Atoms { language: l.clone(), sets, reps, pre, index }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The quotients (as canonical states) containing this atom.
    pub fn quotient_set(&self, atom: usize) -> &Bits {
        &self.sets[atom]
    }

    /// A shortest word of the atom.
    pub fn rep(&self, atom: usize) -> &Word {
        &self.reps[atom]
    }

    pub fn atom_of(&self, w: &[u8]) -> usize {
        let n = self.language.num_states();
        let s = bits::from_iter(n, (0..n).filter(|&q| self.language.is_final(self.language.run(q, w))));
        self.index[&s]
    }

    /// The atom of `a·w` given the atom of `w`.
    pub fn prepend(&self, a: u8, atom: usize) -> usize {
        self.pre[a as usize][atom]
    }

    /// The quotient `δ(0, ·)`-state `q` as the set of atoms it contains.
    pub fn quotient_mask(&self, q: usize) -> Bits {
        bits::from_iter(self.len(), (0..self.len()).filter(|&a| self.sets[a].contains(q)))
    }

    /// `a⁻¹X` for `X` a union of atoms.
    pub fn letter_quotient(&self, a: u8, mask: &Bits) -> Bits {
        bits::from_iter(self.len(), (0..self.len()).filter(|&x| mask.contains(self.pre[a as usize][x])))
    }

    pub fn word_quotient(&self, w: &[u8], mask: &Bits) -> Bits {
        w.iter().rev().fold(mask.clone(), |m, &a| self.letter_quotient(a, &m))
    }

    /// The union of the atoms in `mask`.
    pub fn mask_language(&self, mask: &Bits) -> Language {
        // reading a word backwards moves through atoms via `pre`
        let k = self.language.alphabet.len();
        let trans: Vec<usize> = (0..self.len()).flat_map(|x| (0..k).map(move |a| self.pre[a][x])).collect();
        let finals: Vec<bool> = (0..self.len()).map(|x| mask.contains(x)).collect();
        Language::from_dfa(self.language.alphabet.clone(), 0, &trans, &finals).reverse()
    }

    pub fn atom_language(&self, atom: usize) -> Language {
        self.mask_language(&bits::singleton(self.len(), atom))
    }

    /// The atoms meeting `x`.
    pub fn meeting(&self, x: &Language) -> Bits {
        bits::from_iter(self.len(), (0..self.len()).filter(|&a| !self.atom_language(a).is_disjoint(x)))
    }

    /// `Some(mask)` when `x` is a union of atoms.
    pub fn mask_of(&self, x: &Language) -> Option<Bits> {
        let mask = self.meeting(x);
        (self.mask_language(&mask) == *x).then_some(mask)
    }

    pub fn contains_epsilon(&self, mask: &Bits) -> bool {
        mask.contains(0)
    }

    /// Intersection of the quotient masks containing atom `a`; the whole
    /// space when none does.
    pub fn positive_closure(&self, atom: usize) -> Bits {
        let mut m = bits::full(self.len());
        for q in self.sets[atom].ones() {
            m.intersect_with(&self.quotient_mask(q));
        }
        m
    }

    /// Whether a union of atoms lies in the closure of the quotients under
    /// unions and intersections.
    pub fn is_positive(&self, mask: &Bits) -> bool {
        mask.ones().all(|a| self.positive_closure(a).is_subset(mask))
    }

    pub fn language(&self) -> &Language {
        &self.language
    }
}

/// The classes of words inducing the same state transformation of a dfa
/// table, i.e. the elements of its transition monoid. A language recognised
/// by the table is stored as the set of classes it contains, so unions,
/// inclusions and quotients become bit operations. Class 0 is the class of ε.
#[derive(Clone, Debug)]
pub struct Congruence {
    alphabet: Alphabet,
    states: usize,
    table: Vec<usize>,
    maps: Vec<Vec<u32>>,
    reps: Vec<Word>,
    index: HashMap<Vec<u32>, usize>,
    /// `right[a][m]` is the class of `w·a`.
    right: Vec<Vec<usize>>,
    /// `left[a][m]` is the class of `a·w`.
    left: Vec<Vec<usize>>,
}

impl Congruence {
    /// `table[q * |Σ| + a]`, over `states` states.
    pub fn from_table(alphabet: &Alphabet, states: usize, table: &[usize]) -> Self {
        let k = alphabet.len();
        assert_eq!(table.len(), states * k, "transition table must be |states| × |alphabet|");
        let id: Vec<u32> = (0..states as u32).collect();
        let mut index = HashMap::from([(id.clone(), 0usize)]);
        let mut maps = vec![id];
        let mut reps: Vec<Word> = vec![Vec::new()];
        let mut right: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut i = 0;
        while i < maps.len() {
            for a in 0..k {
                let next: Vec<u32> = maps[i].iter().map(|&q| table[q as usize * k + a] as u32).collect();
                let len = maps.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    maps.push(next);
                    let mut w = reps[i].clone();
                    w.push(a as u8);
                    reps.push(w);
                    len
                });
                right[a].push(id);
            }
            i += 1;
        }
        let left = (0..k)
            .map(|a| {
                maps.iter()
                    .map(|f| {
                        let g: Vec<u32> = (0..states).map(|q| f[table[q * k + a]]).collect();
                        index[&g]
                    })
                    .collect()
            })
            .collect();
        Congruence { alphabet: alphabet.clone(), states, table: table.to_vec(), maps, reps, index, right, left }
    }

    /// The joint congruence of several languages, via the disjoint union of
    /// their canonical dfas.
    pub fn of_languages(alphabet: &Alphabet, langs: &[Language]) -> Self {
        let mut table = Vec::new();
        let mut offset = 0;
        for l in langs {
            assert_eq!(&l.alphabet, alphabet, "alphabet mismatch");
            table.extend(l.trans.iter().map(|&q| q + offset));
            offset += l.num_states();
        }
        Self::from_table(alphabet, offset, &table)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// A shortest word of the class.
    pub fn rep(&self, m: usize) -> &Word {
        &self.reps[m]
    }

    pub fn class_of(&self, w: &[u8]) -> usize {
        w.iter().fold(0, |m, &a| self.right[a as usize][m])
    }

    pub fn right_mul(&self, m: usize, a: u8) -> usize {
        self.right[a as usize][m]
    }

    pub fn left_mul(&self, a: u8, m: usize) -> usize {
        self.left[a as usize][m]
    }

    /// The state transformation of a class.
    pub fn map(&self, m: usize) -> &[u32] {
        &self.maps[m]
    }

    pub fn index_of_map(&self, f: &[u32]) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Words leading from `start` into `finals`.
    pub fn mask_at(&self, start: usize, finals: &Bits) -> Bits {
        bits::from_iter(self.len(), (0..self.len()).filter(|&m| finals.contains(self.maps[m][start] as usize)))
    }

    /// `Some(mask)` when `l` is a union of classes.
    pub fn mask_of(&self, l: &Language) -> Option<Bits> {
        let mask = bits::from_iter(self.len(), (0..self.len()).filter(|&m| l.member(&self.reps[m])));
        (self.language_of(&mask) == *l).then_some(mask)
    }

    pub fn language_of(&self, mask: &Bits) -> Language {
        let k = self.alphabet.len();
        let trans: Vec<usize> = (0..self.len()).flat_map(|m| (0..k).map(move |a| self.right[a][m])).collect();
        let finals: Vec<bool> = (0..self.len()).map(|m| mask.contains(m)).collect();
        Language::from_dfa(self.alphabet.clone(), 0, &trans, &finals)
    }

    /// `a⁻¹X`.
    pub fn letter_quotient(&self, a: u8, mask: &Bits) -> Bits {
        bits::from_iter(self.len(), (0..self.len()).filter(|&m| mask.contains(self.left[a as usize][m])))
    }

    /// `Xa⁻¹`.
    pub fn right_letter_quotient(&self, mask: &Bits, a: u8) -> Bits {
        bits::from_iter(self.len(), (0..self.len()).filter(|&m| mask.contains(self.right[a as usize][m])))
    }

    /// Every `Xv⁻¹`, deduplicated, `X` first.
    pub fn right_quotients(&self, mask: &Bits) -> Vec<Bits> {
        let mut seen = std::collections::HashSet::from([mask.clone()]);
        let mut out = vec![mask.clone()];
        let mut i = 0;
        while i < out.len() {
            for a in 0..self.alphabet.len() as u8 {
                let q = self.right_letter_quotient(&out[i], a);
                if seen.insert(q.clone()) {
                    out.push(q);
                }
            }
            i += 1;
        }
        out
    }

    pub fn contains_epsilon(&self, mask: &Bits) -> bool {
        mask.contains(0)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

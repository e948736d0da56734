//! Nondeterministic and deterministic finite automata over an `Alphabet`.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{self, Bits};
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::lang::{Alphabet, Language};

/// `(I, Z, N_a, F)` with one relation `Z × Z` per letter.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    states: FinSet,
    initial: Bits,
    finals: Bits,
    trans: Vec<FinRel>,
}

/// Wire format: `{"alphabet":"ab","states":[..],"initial":[..],"final":[..],"trans":[["p","a","q"],..]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct NfaJson {
    pub alphabet: String,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    pub trans: Vec<(String, String, String)>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet, states: FinSet, initial: Bits, finals: Bits, trans: Vec<FinRel>) -> Result<Self> {
        let n = states.len();
        if trans.len() != alphabet.len() {
            return Err(Error::InvalidAutomaton("one transition relation per letter required".into()));
        }
        if trans.iter().any(|r| r.src().len() != n || r.dst().len() != n) {
            return Err(Error::InvalidAutomaton("transition relation has the wrong size".into()));
        }
        if initial.ones().chain(finals.ones()).any(|q| q >= n) {
            return Err(Error::InvalidAutomaton("initial or final state out of range".into()));
        }
        let (mut initial, mut finals) = (initial, finals);
        initial.grow(n);
        finals.grow(n);
        let trans = trans.into_iter().map(|r| r.relabel(states.clone(), states.clone())).collect::<Result<_>>()?;
        Ok(Nfa { alphabet, states, initial, finals, trans })
    }

    pub fn from_edges<S: Into<String>>(
        alphabet: Alphabet,
        labels: Vec<S>,
        initial: &[usize],
        finals: &[usize],
        edges: &[(usize, u8, usize)],
    ) -> Result<Self> {
        let states = FinSet::new(labels)?;
        let n = states.len();
        if edges.iter().any(|&(p, a, q)| p >= n || q >= n || a as usize >= alphabet.len()) {
            return Err(Error::InvalidAutomaton("edge out of range".into()));
        }
        let trans = (0..alphabet.len() as u8)
            .map(|a| {
                let pairs: Vec<(usize, usize)> = edges.iter().filter(|e| e.1 == a).map(|e| (e.0, e.2)).collect();
                FinRel::from_pairs(states.clone(), states.clone(), &pairs)
            })
            .collect();
        Self::new(alphabet, states.clone(), bits::from_iter(n, initial.iter().copied()), bits::from_iter(n, finals.iter().copied()), trans)
    }

    /// The canonical DFA of `l` viewed as an NFA; states are labelled by index.
    pub fn from_language(l: &Language) -> Self {
        let n = l.num_states();
        let edges: Vec<(usize, u8, usize)> =
            (0..n).flat_map(|q| (0..l.alphabet().len() as u8).map(move |a| (q, a))).map(|(q, a)| (q, a, l.delta(q, a))).collect();
        let finals: Vec<usize> = (0..n).filter(|&q| l.is_final(q)).collect();
        Self::from_edges(l.alphabet().clone(), (0..n).map(|q| q.to_string()).collect(), &[0], &finals, &edges)
            .expect("canonical DFA is a valid automaton")
    }

    /// Each possible edge is present with probability `density`; initial and
    /// final states are chosen with probability 1/2 (at least one initial).
    pub fn random<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize, density: f64) -> Self {
        let mut edges = Vec::new();
        for p in 0..n {
            for a in 0..alphabet.len() as u8 {
                for q in 0..n {
                    if rng.gen_bool(density) {
                        edges.push((p, a, q));
                    }
                }
            }
        }
        let mut initial: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if initial.is_empty() && n > 0 {
            initial.push(rng.gen_range(0..n));
        }
        let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        Self::from_edges(alphabet.clone(), (0..n).map(|q| format!("z{q}")).collect(), &initial, &finals, &edges)
            .expect("random automaton is well-formed")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn states(&self) -> &FinSet {
        &self.states
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn initial(&self) -> &Bits {
        &self.initial
    }
    pub fn finals(&self) -> &Bits {
        &self.finals
    }
    pub fn trans(&self, a: u8) -> &FinRel {
        &self.trans[a as usize]
    }
    pub fn transitions(&self) -> &[FinRel] {
        &self.trans
    }

    pub fn has_edge(&self, p: usize, a: u8, q: usize) -> bool {
        self.trans[a as usize].get(p, q)
    }

    pub fn edges(&self) -> Vec<(usize, u8, usize)> {
        let mut out = Vec::new();
        for (a, r) in self.trans.iter().enumerate() {
            for (p, q) in r.edges() {
                out.push((p, a as u8, q));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.trans.iter().map(FinRel::edge_count).sum()
    }

    /// `N_a[S]`.
    pub fn step(&self, s: &Bits, a: u8) -> Bits {
        self.trans[a as usize].image(s)
    }

    pub fn run(&self, s: &Bits, w: &[u8]) -> Bits {
        w.iter().fold(s.clone(), |s, &a| self.step(&s, a))
    }

    pub fn accepts(&self, w: &[u8]) -> bool {
        !self.run(&self.initial, w).is_disjoint(&self.finals)
    }

    pub fn language(&self) -> Language {
        Language::from_nfa(self)
    }

    /// `N_@S`: the same automaton with initial states `s`.
    pub fn at_states(&self, s: &Bits) -> Nfa {
        let mut m = self.clone();
        m.initial = s.clone();
        m.initial.grow(self.num_states());
        m
    }

    pub fn state_language(&self, z: usize) -> Language {
        self.at_states(&bits::singleton(self.num_states(), z)).language()
    }

    pub fn state_languages(&self) -> Vec<Language> {
        (0..self.num_states()).map(|z| self.state_language(z)).collect()
    }

    /// `(F, Z, N_a˘, I)`.
    pub fn reverse(&self) -> Nfa {
        Nfa {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            initial: self.finals.clone(),
            finals: self.initial.clone(),
            trans: self.trans.iter().map(FinRel::converse).collect(),
        }
    }

    /// Reachable subset construction; states in BFS order labelled by subsets.
    pub fn rsc(&self) -> Dfa {
        let (subsets, table) = self.subset_table();
        let k = self.alphabet.len();
        let labels: Vec<String> = subsets.iter().map(|s| self.states.fmt_subset(s)).collect();
        let finals: Vec<usize> = (0..subsets.len()).filter(|&i| !subsets[i].is_disjoint(&self.finals)).collect();
        let edges: Vec<(usize, u8, usize)> =
            (0..subsets.len()).flat_map(|i| (0..k).map(move |a| (i, a))).map(|(i, a)| (i, a as u8, table[i * k + a])).collect();
        Dfa::new(Nfa::from_edges(self.alphabet.clone(), labels, &[0], &finals, &edges).expect("subsets are distinct"))
            .expect("subset construction is deterministic")
    }

    /// The reachable subsets in BFS order with the successor table.
    pub fn subset_table(&self) -> (Vec<Bits>, Vec<usize>) {
        let k = self.alphabet.len();
        let mut index: HashMap<Bits, usize> = HashMap::from([(self.initial.clone(), 0)]);
        let mut subsets = vec![self.initial.clone()];
        let mut table = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            for a in 0..k as u8 {
                let next = self.step(&subsets[i], a);
                let len = subsets.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    len
                });
                table.push(id);
            }
            i += 1;
        }
        (subsets, table)
    }

    pub fn reachable_states(&self) -> Bits {
        let mut seen = self.initial.clone();
        let mut frontier = self.initial.clone();
        while !frontier.is_clear() {
            let mut next = bits::empty(self.num_states());
            for a in 0..self.alphabet.len() as u8 {
                next.union_with(&self.step(&frontier, a));
            }
            next.difference_with(&seen);
            seen.union_with(&next);
            frontier = next;
        }
        seen
    }

    /// The sub-automaton on `keep` (in the original order).
    pub fn restrict(&self, keep: &Bits) -> Nfa {
        let idx: Vec<usize> = keep.ones().collect();
        let mut pos = vec![usize::MAX; self.num_states()];
        for (i, &z) in idx.iter().enumerate() {
            pos[z] = i;
        }
        let labels: Vec<String> = idx.iter().map(|&z| self.states.label(z).to_string()).collect();
        let edges: Vec<(usize, u8, usize)> = self
            .edges()
            .into_iter()
            .filter(|&(p, _, q)| keep.contains(p) && keep.contains(q))
            .map(|(p, a, q)| (pos[p], a, pos[q]))
            .collect();
        let init: Vec<usize> = self.initial.ones().filter(|&z| keep.contains(z)).map(|z| pos[z]).collect();
        let fin: Vec<usize> = self.finals.ones().filter(|&z| keep.contains(z)).map(|z| pos[z]).collect();
        Nfa::from_edges(self.alphabet.clone(), labels, &init, &fin, &edges).expect("restriction is well-formed")
    }

    pub fn reach_part(&self) -> Nfa {
        self.restrict(&self.reachable_states())
    }

    pub fn coreach_part(&self) -> Nfa {
        self.reverse().reach_part().reverse()
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.count_ones(..) == 1 && self.trans.iter().all(|r| r.rows().iter().all(|row| row.count_ones(..) == 1))
    }

    pub fn with_edge(&self, p: usize, a: u8, q: usize) -> Nfa {
        let mut edges = self.edges();
        edges.push((p, a, q));
        self.rebuild(&edges, self.initial.clone(), self.finals.clone())
    }

    pub fn without_edge(&self, p: usize, a: u8, q: usize) -> Nfa {
        let edges: Vec<_> = self.edges().into_iter().filter(|&e| e != (p, a, q)).collect();
        self.rebuild(&edges, self.initial.clone(), self.finals.clone())
    }

    pub fn with_initial(&self, z: usize) -> Nfa {
        let mut i = self.initial.clone();
        i.insert(z);
        self.rebuild(&self.edges(), i, self.finals.clone())
    }

    pub fn with_final(&self, z: usize) -> Nfa {
        let mut f = self.finals.clone();
        f.insert(z);
        self.rebuild(&self.edges(), self.initial.clone(), f)
    }

    fn rebuild(&self, edges: &[(usize, u8, usize)], initial: Bits, finals: Bits) -> Nfa {
        let n = self.num_states();
        let trans = (0..self.alphabet.len() as u8)
            .map(|a| {
                let pairs: Vec<(usize, usize)> = edges.iter().filter(|e| e.1 == a).map(|e| (e.0, e.2)).collect();
                FinRel::from_pairs(self.states.clone(), self.states.clone(), &pairs)
            })
            .collect();
        let _ = n;
        Nfa { alphabet: self.alphabet.clone(), states: self.states.clone(), initial, finals, trans }
    }

    pub fn relabel(&self, labels: Vec<String>) -> Result<Nfa> {
        let states = FinSet::new(labels)?;
        if states.len() != self.num_states() {
            return Err(Error::DimensionMismatch("relabel with a different state count".into()));
        }
        Nfa::new(self.alphabet.clone(), states, self.initial.clone(), self.finals.clone(), self.trans.clone())
    }

    pub fn to_json_value(&self) -> NfaJson {
        NfaJson {
            alphabet: self.alphabet.to_string(),
            states: self.states.labels().to_vec(),
            initial: self.initial.ones().map(|z| self.states.label(z).to_string()).collect(),
            finals: self.finals.ones().map(|z| self.states.label(z).to_string()).collect(),
            trans: self
                .edges()
                .into_iter()
                .map(|(p, a, q)| {
                    (self.states.label(p).to_string(), self.alphabet.symbol(a).to_string(), self.states.label(q).to_string())
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serialisable")
    }

    pub fn from_json(text: &str) -> Result<Nfa> {
        let j: NfaJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&j)
    }

    pub fn from_json_value(j: &NfaJson) -> Result<Nfa> {
        let alphabet = Alphabet::from_str(&j.alphabet)?;
        let states = FinSet::new(j.states.clone())?;
        let find = |l: &str| states.position(l).ok_or_else(|| Error::Parse(format!("unknown state `{l}`")));
        let initial: Vec<usize> = j.initial.iter().map(|l| find(l)).collect::<Result<_>>()?;
        let finals: Vec<usize> = j.finals.iter().map(|l| find(l)).collect::<Result<_>>()?;
        let mut edges = Vec::new();
        for (p, a, q) in &j.trans {
            let mut cs = a.chars();
            let (Some(c), None) = (cs.next(), cs.next()) else {
                return Err(Error::Parse(format!("letter `{a}` must be one symbol")));
            };
            let a = alphabet.index_of(c).ok_or_else(|| Error::Parse(format!("`{c}` is not in the alphabet")))?;
            edges.push((find(p)?, a, find(q)?));
        }
        Nfa::from_edges(alphabet, j.states.clone(), &initial, &finals, &edges)
    }

    /// DOT with initial states marked `i` and final states `o`.
    pub fn to_dot(&self) -> String {
        self.to_dot_named("nfa")
    }

    pub fn to_dot_named(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n  rankdir=LR;\n");
        for z in 0..self.num_states() {
            let mut label = self.states.label(z).to_string();
            let tags: String = [(self.initial.contains(z), "i"), (self.finals.contains(z), "o")]
                .iter()
                .filter(|t| t.0)
                .map(|t| t.1)
                .collect();
            if !tags.is_empty() {
                label = format!("{label} ({tags})");
            }
            let shape = if self.finals.contains(z) { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {name}{z} [label=\"{label}\", shape={shape}];");
        }
        let mut grouped: HashMap<(usize, usize), Vec<char>> = HashMap::new();
        for (p, a, q) in self.edges() {
            grouped.entry((p, q)).or_default().push(self.alphabet.symbol(a));
        }
        let mut keys: Vec<_> = grouped.keys().copied().collect();
        keys.sort_unstable();
        for (p, q) in keys {
            let l: Vec<String> = grouped[&(p, q)].iter().map(char::to_string).collect();
            let _ = writeln!(s, "  {name}{p} -> {name}{q} [label=\"{}\"];", l.join(","));
        }
        s.push_str("}\n");
        s
    }

    /// Human-readable listing.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "states: {}\ninitial: {}\nfinal: {}\n",
            self.num_states(),
            self.states.fmt_subset(&self.initial),
            self.states.fmt_subset(&self.finals)
        );
        for (p, a, q) in self.edges() {
            let _ = writeln!(s, "  {} -{}-> {}", self.states.label(p), self.alphabet.symbol(a), self.states.label(q));
        }
        s
    }
}

/// Whether some bijection of states maps `I`, `F` and every letter's
/// relation of one automaton onto the other's.
pub fn iso_nfa(n1: &Nfa, n2: &Nfa) -> bool {
    nfa_isomorphism(n1, n2).is_some()
}

pub fn nfa_isomorphism(n1: &Nfa, n2: &Nfa) -> Option<Vec<usize>> {
    let n = n1.num_states();
    if n != n2.num_states() || n1.alphabet != n2.alphabet || n1.edge_count() != n2.edge_count() {
        return None;
    }
    let sig = |m: &Nfa, z: usize| {
        let mut v = vec![m.initial.contains(z) as usize, m.finals.contains(z) as usize];
        for r in &m.trans {
            v.push(r.row(z).count_ones(..));
            v.push((0..m.num_states()).filter(|&p| r.get(p, z)).count());
            v.push(r.get(z, z) as usize);
        }
        v
    };
    let s1: Vec<Vec<usize>> = (0..n).map(|z| sig(n1, z)).collect();
    let s2: Vec<Vec<usize>> = (0..n).map(|z| sig(n2, z)).collect();
    let mut a = s1.clone();
    let mut b = s2.clone();
    a.sort();
    b.sort();
    if a != b {
        return None;
    }
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(n1: &Nfa, n2: &Nfa, s1: &[Vec<usize>], s2: &[Vec<usize>], i: usize, assign: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let n = assign.len();
        if i == n {
            return true;
        }
        for c in 0..n {
            if used[c] || s1[i] != s2[c] {
                continue;
            }
            let ok = (0..i).all(|p| {
                n1.trans.iter().zip(&n2.trans).all(|(r1, r2)| r1.get(p, i) == r2.get(assign[p], c) && r1.get(i, p) == r2.get(c, assign[p]))
            });
            if !ok {
                continue;
            }
            assign[i] = c;
            used[c] = true;
            if go(n1, n2, s1, s2, i + 1, assign, used) {
                return true;
            }
            used[c] = false;
        }
        false
    }
    go(n1, n2, &s1, &s2, 0, &mut assign, &mut used).then_some(assign)
}

/// An `Nfa` with one initial state and total, functional letter relations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dfa(Nfa);

impl Dfa {
    pub fn new(n: Nfa) -> Result<Self> {
        if !n.is_deterministic() {
            return Err(Error::InvalidAutomaton("not deterministic and complete".into()));
        }
        Ok(Dfa(n))
    }

    /// The canonical minimal complete DFA of `l`.
    pub fn from_language(l: &Language) -> Self {
        Dfa(Nfa::from_language(l))
    }

    pub fn nfa(&self) -> &Nfa {
        &self.0
    }

    pub fn into_nfa(self) -> Nfa {
        self.0
    }

    pub fn num_states(&self) -> usize {
        self.0.num_states()
    }

    pub fn start(&self) -> usize {
        self.0.initial.ones().next().expect("one initial state")
    }

    pub fn delta(&self, q: usize, a: u8) -> usize {
        self.0.trans[a as usize].row(q).ones().next().expect("total")
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.0.finals.contains(q)
    }

    pub fn table(&self) -> Vec<usize> {
        let k = self.0.alphabet.len();
        (0..self.num_states()).flat_map(|q| (0..k).map(move |a| (q, a as u8))).map(|(q, a)| self.delta(q, a)).collect()
    }

    pub fn language(&self) -> Language {
        Language::from_dfa(self.0.alphabet.clone(), self.start(), &self.table(), &(0..self.num_states()).map(|q| self.is_final(q)).collect::<Vec<_>>())
    }

    /// States not accepting ∅; the count a partial DFA would have.
    pub fn partial_size(&self) -> usize {
        (0..self.num_states()).filter(|&q| !self.0.state_language(q).is_empty()).count()
    }

    /// Table renumbered breadth-first from the start, for reachable DFAs.
    fn bfs_form(&self) -> Option<(Vec<usize>, Vec<bool>)> {
        let k = self.0.alphabet.len();
        let n = self.num_states();
        let mut id = vec![usize::MAX; n];
        let mut order = vec![self.start()];
        id[self.start()] = 0;
        let mut i = 0;
        while i < order.len() {
            for a in 0..k as u8 {
                let r = self.delta(order[i], a);
                if id[r] == usize::MAX {
                    id[r] = order.len();
                    order.push(r);
                }
            }
            i += 1;
        }
        if order.len() != n {
            return None;
        }
        let table = order.iter().flat_map(|&q| (0..k).map(move |a| (q, a as u8))).map(|(q, a)| id[self.delta(q, a)]).collect();
        let finals = order.iter().map(|&q| self.is_final(q)).collect();
        Some((table, finals))
    }

    /// Dfa isomorphism; the states' labels are ignored.
    pub fn is_isomorphic(&self, other: &Dfa) -> bool {
        if self.0.alphabet != other.0.alphabet || self.num_states() != other.num_states() {
            return false;
        }
        match (self.bfs_form(), other.bfs_form()) {
            (Some(a), Some(b)) => a == b,
            _ => iso_nfa(&self.0, &other.0),
        }
    }

    /// The dfa of accepted languages and the acceptance map onto it.
    pub fn simple(&self) -> (Dfa, Vec<usize>, Vec<Language>) {
        let n = self.num_states();
        let k = self.0.alphabet.len();
        let table = self.table();
        let mut class: Vec<usize> = (0..n).map(|q| self.is_final(q) as usize).collect();
        let mut count = 0;
        loop {
            let mut sigs: HashMap<Vec<usize>, usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|q| {
                    let mut sig = vec![class[q]];
                    sig.extend((0..k).map(|a| class[table[q * k + a]]));
                    let len = sigs.len();
                    *sigs.entry(sig).or_insert(len)
                })
                .collect();
            class = next;
            if sigs.len() == count {
                break;
            }
            count = sigs.len();
        }
        let mut reps = vec![usize::MAX; count];
        for q in 0..n {
            if reps[class[q]] == usize::MAX {
                reps[class[q]] = q;
            }
        }
        let langs: Vec<Language> = reps.iter().map(|&q| self.0.state_language(q)).collect();
        let labels: Vec<String> = reps.iter().map(|&q| self.0.states.label(q).to_string()).collect();
        let finals: Vec<usize> = (0..count).filter(|&c| self.is_final(reps[c])).collect();
        let edges: Vec<(usize, u8, usize)> =
            (0..count).flat_map(|c| (0..k).map(move |a| (c, a))).map(|(c, a)| (c, a as u8, class[table[reps[c] * k + a]])).collect();
        let d = Nfa::from_edges(self.0.alphabet.clone(), labels, &[class[self.start()]], &finals, &edges).expect("well-formed");
        (Dfa(d), class, langs)
    }
}

/// The canonical minimal complete DFA of `L(n)`.
pub fn min_dfa_of(n: &Nfa) -> Dfa {
    Dfa::from_language(&n.language())
}

pub fn iso_dfa(d1: &Dfa, d2: &Dfa) -> bool {
    d1.is_isomorphic(d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::reversed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// i -a-> p -a-> o with i -a-> o.
    fn a_plus_aa() -> Nfa {
        Nfa::from_edges(Alphabet::first(1), vec!["i", "p", "o"], &[0], &[2], &[(0, 0, 1), (1, 0, 2), (0, 0, 2)]).unwrap()
    }

    #[test]
    fn accepts_a_plus_aa_only() {
        let n = a_plus_aa();
        let acc: Vec<usize> = (0..5).filter(|&k| n.accepts(&vec![0; k])).collect();
        assert_eq!(acc, vec![1, 2]);
        assert!(n.at_states(&bits::empty(3)).language().is_empty());
    }

    #[test]
    fn at_states_union_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let n = Nfa::random(&mut rng, &Alphabet::first(2), 4, 0.3);
            let s = bits::from_iter(4, (0..4).filter(|_| rng.gen_bool(0.5)));
            let union = s.ones().fold(Language::empty(n.alphabet()), |acc, z| acc.union(&n.state_language(z)));
            assert_eq!(n.at_states(&s).language(), union);
        }
    }

    #[test]
    fn reverse_laws() {
        let n = a_plus_aa();
        assert_eq!(n.reverse().reverse(), n);
        assert_eq!(n.reverse().language(), n.language());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let m = Nfa::random(&mut rng, &Alphabet::first(2), 4, 0.3);
            assert_eq!(m.reverse().language(), m.language().reverse());
            for w in m.alphabet().words_upto(4) {
                assert_eq!(m.reverse().accepts(&w), m.accepts(&reversed(&w)));
            }
        }
    }

    #[test]
    fn rsc_properties() {
        let l = Language::parse("(ab)*+(abc)*").unwrap();
        let d = Dfa::from_language(&l);
        assert!(d.nfa().rsc().is_isomorphic(&d));
        let r = a_plus_aa().reverse().rsc();
        assert!(r.num_states() <= 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = Nfa::random(&mut rng, &Alphabet::first(2), 4, 0.3);
            let d = m.rsc();
            assert!(d.num_states() <= 16);
            assert_eq!(d.nfa().language(), m.language());
            assert_eq!(d.nfa().reach_part().num_states(), d.num_states());
            assert!(m.reach_part().num_states() <= 4);
            assert_eq!(m.reach_part().language(), m.language());
            assert_eq!(m.coreach_part().language(), m.language());
        }
    }

    #[test]
    fn subset_blowup_family() {
        for n in 0..=3usize {
            let re = format!("(a+b)*a{}", "(a+b)".repeat(n));
            let l = Language::parse(&re).unwrap();
            let d = Dfa::from_language(&l);
            assert_eq!(d.partial_size(), 1 << (n + 1));
            // the n + 2 state machine guessing the a, whose rsc hits the bound
            let mut edges = vec![(0, 0, 0), (0, 1, 0), (0, 0, 1)];
            for i in 1..=n {
                edges.push((i, 0, i + 1));
                edges.push((i, 1, i + 1));
            }
            let nfa = Nfa::from_edges(Alphabet::first(2), (0..n + 2).map(|z| z.to_string()).collect(), &[0], &[n + 1], &edges).unwrap();
            assert_eq!(nfa.language(), l);
            assert_eq!(nfa.rsc().num_states(), 1 << (n + 1));
        }
    }

    /// a(b+c)+b(a+c)+c(a+b): two machines, same language, not isomorphic.
    pub(crate) fn five_state_pair() -> (Nfa, Nfa) {
        let abc = Alphabet::first(3);
        let labels = vec!["i", "p1", "p2", "p3", "o"];
        let m1 = Nfa::from_edges(
            abc.clone(),
            labels.clone(),
            &[0],
            &[4],
            &[(0, 0, 1), (0, 1, 2), (0, 2, 3), (1, 1, 4), (1, 2, 4), (2, 0, 4), (2, 2, 4), (3, 0, 4), (3, 1, 4)],
        )
        .unwrap();
        let m2 = Nfa::from_edges(
            abc,
            labels,
            &[0],
            &[4],
            &[(0, 1, 1), (0, 2, 1), (0, 0, 2), (0, 2, 2), (0, 0, 3), (0, 1, 3), (1, 0, 4), (2, 1, 4), (3, 2, 4)],
        )
        .unwrap();
        (m1, m2)
    }

    #[test]
    fn five_state_machines_differ() {
        let (m1, m2) = five_state_pair();
        let l = Language::parse("a(b+c)+b(a+c)+c(a+b)").unwrap();
        assert_eq!(m1.language(), l);
        assert_eq!(m2.language(), l);
        assert!(!iso_nfa(&m1, &m2));
        assert!(iso_nfa(&m1, &m1));
        let d = min_dfa_of(&m1);
        assert!(iso_dfa(&d, &d));
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_iso(a: &Nfa, b: &Nfa) -> bool {
        let n = a.num_states();
        n == b.num_states()
            && permutations(n).iter().any(|p| {
                (0..n).all(|z| a.initial().contains(z) == b.initial().contains(p[z]) && a.finals().contains(z) == b.finals().contains(p[z]))
                    && a.edges().iter().all(|&(x, c, y)| b.has_edge(p[x], c, p[y]))
                    && a.edge_count() == b.edge_count()
            })
    }

    #[test]
    fn iso_nfa_matches_permutation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..150 {
            let n = rng.gen_range(1..=5);
            let a = Nfa::random(&mut rng, &Alphabet::first(2), n, 0.25);
            // half the time compare with a shuffled copy
            let b = if rng.gen_bool(0.5) {
                let perm = &permutations(n)[rng.gen_range(0..permutations(n).len())];
                let edges: Vec<_> = a.edges().iter().map(|&(x, c, y)| (perm[x], c, perm[y])).collect();
                let init: Vec<usize> = a.initial().ones().map(|z| perm[z]).collect();
                let fin: Vec<usize> = a.finals().ones().map(|z| perm[z]).collect();
                Nfa::from_edges(a.alphabet().clone(), (0..n).map(|z| z.to_string()).collect(), &init, &fin, &edges).unwrap()
            } else {
                Nfa::random(&mut rng, &Alphabet::first(2), n, 0.25)
            };
            assert_eq!(iso_nfa(&a, &b), brute_iso(&a, &b));
        }
    }

    #[test]
    fn simple_dfa() {
        let l = Language::parse("a(a+b)*").unwrap();
        let d = Dfa::from_language(&l);
        let (s, _, langs) = d.simple();
        assert!(s.is_isomorphic(&d));
        assert_eq!(langs.len(), d.num_states());
        // duplicate every state, then collapse
        let n = d.num_states();
        let k = 2;
        let table = d.table();
        let mut edges = Vec::new();
        for q in 0..2 * n {
            for a in 0..k {
                let t = table[(q % n) * k + a];
                edges.push((q, a as u8, if q < n { t + n } else { t }));
            }
        }
        let fin: Vec<usize> = (0..2 * n).filter(|q| d.is_final(q % n)).collect();
        let doubled = Dfa::new(Nfa::from_edges(Alphabet::first(2), (0..2 * n).map(|q| q.to_string()).collect(), &[0], &fin, &edges).unwrap()).unwrap();
        let (s2, acc, _) = doubled.simple();
        assert_eq!(s2.num_states(), n);
        assert!(s2.is_isomorphic(&d));
        assert_eq!(s2.nfa().language(), doubled.nfa().language());
        for q in 0..2 * n {
            assert_eq!(acc[q], acc[q % n]);
        }
    }

    #[test]
    fn brzozowski_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = Nfa::random(&mut rng, &Alphabet::first(2), 5, 0.25);
            let b = m.reverse().rsc().nfa().reverse().rsc();
            assert!(iso_dfa(&b, &min_dfa_of(&m)));
        }
    }

    #[test]
    fn json_round_trip() {
        let n = a_plus_aa();
        let text = n.to_json();
        assert!(text.contains("\"final\":[\"o\"]"));
        assert_eq!(Nfa::from_json(&text).unwrap(), n);
        assert!(Nfa::from_json("{\"alphabet\":\"a\",\"states\":[\"p\"],\"initial\":[\"q\"],\"final\":[],\"trans\":[]}").is_err());
        assert!(n.to_dot().contains("(i)"));
    }

    #[test]
    fn dfa_rejects_nondeterminism() {
        assert!(Dfa::new(a_plus_aa()).is_err());
    }
}

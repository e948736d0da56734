//! Transition and syntactic monoids, idempotent semirings, power semirings,
//! and the dualities between transition semirings and right-quotient
//! closure.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::automata::{Dfa, Nfa};
use crate::bits::{self, Bits};
use crate::canonical::syn_bool_min;
use crate::error::{cap_check, Error, Result};
use crate::finrel::FinSet;
use crate::jsl::Jsl;
use crate::jsldfa::{check_jsl_dfa_iso, full_subset, jsl_dfa_min, rqc, JslDfa};
use crate::lang::{Alphabet, Congruence, Language, Word};

/// Default bound on the number of semiring elements built by closure.
pub const SEMIRING_CAP: usize = 4096;

/// Tables up to this size are checked on every triple; larger ones on a
/// fixed-seed sample.
const EXHAUSTIVE_LIMIT: usize = 200;
const SAMPLE_TRIPLES: usize = 1 << 20;

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    if n <= EXHAUSTIVE_LIMIT {
        (0..n).flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z)))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..SAMPLE_TRIPLES).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    }
}

/// A finite monoid presented by its multiplication table, with one
/// generator per letter and a shortest word for each element.
#[derive(Clone, Debug)]
pub struct FinMonoid {
    alphabet: Alphabet,
    mult: Vec<Vec<usize>>,
    unit: usize,
    generators: Vec<usize>,
    words: Vec<Word>,
}

impl FinMonoid {
    pub fn new(alphabet: Alphabet, mult: Vec<Vec<usize>>, unit: usize, generators: Vec<usize>, words: Vec<Word>) -> Result<Self> {
        let n = mult.len();
        if mult.iter().any(|r| r.len() != n || r.iter().any(|&z| z >= n)) || unit >= n || words.len() != n {
            return Err(Error::DimensionMismatch("monoid table is not square".into()));
        }
        if generators.len() != alphabet.len() || generators.iter().any(|&g| g >= n) {
            return Err(Error::DimensionMismatch("one generator per letter".into()));
        }
        let m = FinMonoid { alphabet, mult, unit, generators, words };
        m.check_laws()?;
        Ok(m)
    }

    fn from_congruence(cong: &Congruence) -> Self {
        let n = cong.len();
        let mult = (0..n).map(|x| (0..n).map(|y| cong.rep(y).iter().fold(x, |m, &a| cong.right_mul(m, a))).collect()).collect();
        let generators = (0..cong.alphabet().len() as u8).map(|a| cong.class_of(&[a])).collect();
        let words = (0..n).map(|m| cong.rep(m).clone()).collect();
        FinMonoid::new(cong.alphabet().clone(), mult, 0, generators, words).expect("transformation monoids satisfy the laws")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.mult.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mult[x][y]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn generator(&self, a: u8) -> usize {
        self.generators[a as usize]
    }

    /// A shortest word evaluating to `x`.
    pub fn word(&self, x: usize) -> &Word {
        &self.words[x]
    }

    pub fn eval(&self, w: &[u8]) -> usize {
        w.iter().fold(self.unit, |m, &a| self.mult[m][self.generators[a as usize]])
    }

    /// Associativity, unit laws, and that the generators reach everything.
    pub fn check_laws(&self) -> Result<()> {
        let n = self.len();
        let m = &self.mult;
        if let Some((x, y, z)) = triples(n).into_par_iter().find_any(|&(x, y, z)| m[m[x][y]][z] != m[x][m[y][z]]) {
            return Err(Error::CheckFailed(format!("associativity fails at ({x}, {y}, {z})")));
        }
        if (0..n).any(|x| m[self.unit][x] != x || m[x][self.unit] != x) {
            return Err(Error::CheckFailed("unit law fails".into()));
        }
        let mut seen = bits::singleton(n, self.unit);
        let mut stack = vec![self.unit];
        while let Some(x) = stack.pop() {
            for &g in &self.generators {
                let y = m[x][g];
                if !seen.put(y) {
                    stack.push(y);
                }
            }
        }
        if seen.count_ones(..) != n {
            return Err(Error::CheckFailed("generators do not generate".into()));
        }
        for (x, w) in self.words.iter().enumerate() {
            if self.eval(w) != x {
                return Err(Error::CheckFailed(format!("witness word of element {x} evaluates elsewhere")));
            }
        }
        Ok(())
    }

    fn label(&self, x: usize) -> String {
        self.alphabet.fmt_word(&self.words[x])
    }

    /// Elements by shortest word, then the multiplication table.
    pub fn to_text(&self) -> String {
        let mut out = format!("elements {}\n", self.len());
        for x in 0..self.len() {
            out.push_str(&format!("{x}: {}\n", self.label(x)));
        }
        out.push_str("mult\n");
        for row in &self.mult {
            let r: Vec<String> = row.iter().map(|z| z.to_string()).collect();
            out.push_str(&r.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The monoid of letter-composite maps of `d` and its dfa structure, which
/// accepts the language of `d`.
pub fn transition_monoid(d: &Dfa) -> (FinMonoid, Dfa) {
    let cong = Congruence::from_table(d.nfa().alphabet(), d.num_states(), &d.table());
    let m = FinMonoid::from_congruence(&cong);
    let finals: Vec<usize> = (0..m.len()).filter(|&x| d.is_final(cong.map(x)[d.start()] as usize)).collect();
    (m.clone(), monoid_dfa(&m, &finals))
}

fn monoid_dfa(m: &FinMonoid, finals: &[usize]) -> Dfa {
    let labels: Vec<String> = (0..m.len()).map(|x| m.label(x)).collect();
    let edges: Vec<(usize, u8, usize)> = (0..m.len())
        .flat_map(|x| (0..m.alphabet.len() as u8).map(move |a| (x, a)))
        .map(|(x, a)| (x, a, m.mul(x, m.generator(a))))
        .collect();
    Dfa::new(Nfa::from_edges(m.alphabet.clone(), labels, &[m.unit], finals, &edges).expect("distinct words")).expect("deterministic")
}

/// Syntactic monoid of `l` as the transition monoid of its minimal dfa.
pub fn syntactic_monoid(l: &Language) -> (FinMonoid, Dfa) {
    transition_monoid(&Dfa::from_language(l))
}

/// An idempotent semiring on a finite join-semilattice. Multiplication is
/// written in word order: `x·y` is "first `x`, then `y`". Each element
/// carries a finite set of words whose classes join to it.
#[derive(Clone, Debug)]
pub struct IdemSemiring {
    alphabet: Alphabet,
    carrier: Arc<Jsl>,
    mult: Vec<Vec<usize>>,
    unit: usize,
    generators: Vec<usize>,
    witnesses: Vec<Vec<Word>>,
}

impl IdemSemiring {
    pub fn carrier(&self) -> &Arc<Jsl> {
        &self.carrier
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.mult.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mult[x][y]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn generator(&self, a: u8) -> usize {
        self.generators[a as usize]
    }

    pub fn witness(&self, x: usize) -> &[Word] {
        &self.witnesses[x]
    }

    pub fn eval_word(&self, w: &[u8]) -> usize {
        w.iter().fold(self.unit, |x, &a| self.mult[x][self.generators[a as usize]])
    }

    /// The image of a finite language.
    pub fn eval_set(&self, ws: &[Word]) -> usize {
        let xs: Vec<usize> = ws.iter().map(|w| self.eval_word(w)).collect();
        self.carrier.join(&xs)
    }

    /// Monoid laws, bilinearity on both sides, and that the bottom
    /// annihilates.
    pub fn check_laws(&self) -> Result<()> {
        let (s, m) = (&self.carrier, &self.mult);
        let n = self.len();
        let bot = s.bottom();
        let bad = triples(n).into_par_iter().find_any(|&(x, y, z)| {
            m[m[x][y]][z] != m[x][m[y][z]]
                || m[x][s.join2(y, z)] != s.join2(m[x][y], m[x][z])
                || m[s.join2(y, z)][x] != s.join2(m[y][x], m[z][x])
        });
        if let Some((x, y, z)) = bad {
            return Err(Error::CheckFailed(format!("associativity or bilinearity fails at ({x}, {y}, {z})")));
        }
        if (0..n).any(|x| m[self.unit][x] != x || m[x][self.unit] != x) {
            return Err(Error::CheckFailed("unit law fails".into()));
        }
        if (0..n).any(|x| m[bot][x] != bot || m[x][bot] != bot) {
            return Err(Error::CheckFailed("bottom does not annihilate".into()));
        }
        for (x, ws) in self.witnesses.iter().enumerate() {
            if self.eval_set(ws) != x {
                return Err(Error::CheckFailed(format!("witness of element {x} evaluates elsewhere")));
            }
        }
        Ok(())
    }

    /// The dfa structure `x ↦ x·a` started at the unit, with threshold `tnf`.
    pub fn machine(&self, tnf: usize) -> Result<JslDfa> {
        let trans = (0..self.alphabet.len()).map(|a| (0..self.len()).map(|x| self.mult[x][self.generators[a]]).collect()).collect();
        JslDfa::new(self.alphabet.clone(), self.carrier.clone(), self.unit, trans, tnf)
    }

    /// Plain-text dump: carrier family, multiplication table, unit and
    /// generators.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("elements {}\n", self.len()));
        for x in 0..self.len() {
            let ws: Vec<String> = self.witnesses[x].iter().map(|w| self.alphabet.fmt_word(w)).collect();
            out.push_str(&format!("{x}: {} {{{}}}\n", self.carrier.label(x), ws.join(", ")));
        }
        out.push_str("mult\n");
        for row in &self.mult {
            let r: Vec<String> = row.iter().map(|z| z.to_string()).collect();
            out.push_str(&r.join(" "));
            out.push('\n');
        }
        out.push_str(&format!("unit {}\n", self.unit));
        let gs: Vec<String> =
            self.generators.iter().enumerate().map(|(a, g)| format!("{}={g}", self.alphabet.symbol(a as u8))).collect();
        out.push_str(&format!("generators {}\n", gs.join(" ")));
        out
    }
}

/// Elements of a generated semiring, as built by [`close_semiring`]: the
/// semiring itself, the key of each element, and the indices of the
/// single-word elements `γ_w`.
struct Closure<K> {
    semiring: IdemSemiring,
    keys: Vec<K>,
    words: Vec<usize>,
}

/// Closes `{unit} ∪ generators` under products, then under joins with
/// `bottom`. Elements are totally described by their keys.
fn close_semiring<K: Clone + Eq + Hash + Sync>(
    alphabet: &Alphabet,
    unit: K,
    bottom: K,
    gens: &[K],
    join: impl Fn(&K, &K) -> K + Sync,
    mul: impl Fn(&K, &K) -> K + Sync,
    cap: usize,
) -> Result<Closure<K>> {
    let mut keys: Vec<K> = vec![unit];
    let mut words: Vec<Word> = vec![Vec::new()];
    let mut index: HashMap<K, usize> = HashMap::from([(keys[0].clone(), 0)]);
    let mut i = 0;
    while i < keys.len() {
        for (a, g) in gens.iter().enumerate() {
            let next = mul(&keys[i], g);
            if !index.contains_key(&next) {
                cap_check("semiring size", keys.len() + 1, cap)?;
                index.insert(next.clone(), keys.len());
                keys.push(next);
                let mut w = words[i].clone();
                w.push(a as u8);
                words.push(w);
            }
        }
        i += 1;
    }
    let n_words = keys.len();
    let mut witnesses: Vec<Vec<Word>> = words.iter().map(|w| vec![w.clone()]).collect();
    if !index.contains_key(&bottom) {
        index.insert(bottom.clone(), keys.len());
        keys.push(bottom);
        witnesses.push(Vec::new());
    }
    let mut i = 0;
    while i < keys.len() {
        for m in 0..n_words {
            let next = join(&keys[i], &keys[m]);
            if !index.contains_key(&next) {
                cap_check("semiring size", keys.len() + 1, cap)?;
                index.insert(next.clone(), keys.len());
                keys.push(next);
                let mut w = witnesses[i].clone();
                w.push(words[m].clone());
                witnesses.push(w);
            }
        }
        i += 1;
    }
    let n = keys.len();
    // x ↦ {z : x ≰ z} sends joins to unions.
    let family: Vec<Bits> = (0..n)
        .into_par_iter()
        .map(|x| bits::from_iter(n, (0..n).filter(|&z| join(&keys[x], &keys[z]) != keys[z])))
        .collect();
    let carrier = Arc::new(Jsl::from_family(FinSet::prefixed("s", n), family.clone())?);
    let pos: Vec<usize> = family.iter().map(|f| carrier.index_of(f).expect("member")).collect();
    let mut inv = vec![0; n];
    for (x, &p) in pos.iter().enumerate() {
        inv[p] = x;
    }
    let mult: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|p| (0..n).map(|q| pos[index[&mul(&keys[inv[p]], &keys[inv[q]])]]).collect())
        .collect();
    let semiring = IdemSemiring {
        alphabet: alphabet.clone(),
        carrier,
        mult,
        unit: pos[0],
        generators: gens.iter().map(|g| pos[index[g]]).collect(),
        witnesses: inv.iter().map(|&x| witnesses[x].clone()).collect(),
    };
    semiring.check_laws()?;
    Ok(Closure { semiring, keys: inv.iter().map(|&x| keys[x].clone()).collect(), words: (0..n_words).map(|x| pos[x]).collect() })
}

/// The semiring of joins of the letter-composite endomorphisms of `j`, with
/// its dfa structure. The threshold is the join of every `γ_w` with `w`
/// rejected; rejection only depends on `γ_w`, so ranging over the
/// single-word elements is exact.
pub fn transition_semiring(j: &JslDfa, cap: usize) -> Result<(IdemSemiring, JslDfa)> {
    let s = j.carrier().clone();
    let n = s.len();
    let unit: Vec<usize> = (0..n).collect();
    let bottom = vec![s.bottom(); n];
    let gens: Vec<Vec<usize>> = (0..j.alphabet().len() as u8).map(|a| (0..n).map(|x| j.step(x, a)).collect()).collect();
    let c = close_semiring(
        j.alphabet(),
        unit,
        bottom,
        &gens,
        |f, g| f.iter().zip(g).map(|(&x, &y)| s.join2(x, y)).collect(),
        |f, g| f.iter().map(|&x| g[x]).collect(),
        cap,
    )?;
    let rejected: Vec<usize> = c.words.iter().copied().filter(|&x| !j.is_final(c.keys[x][j.init()])).collect();
    let tnf = c.semiring.carrier.join(&rejected);
    let machine = c.semiring.machine(tnf)?;
    Ok((c.semiring, machine))
}

/// The syntactic semiring built from its definition: a finite language `U`
/// is represented by the set of contexts `(x, y)` with `xUy ∩ L ≠ ∅`,
/// contexts taken up to syntactic equivalence.
pub fn syntactic_semiring(l: &Language, cap: usize) -> Result<(IdemSemiring, JslDfa)> {
    let (mon, syn_dfa) = syntactic_monoid(l);
    let n = mon.len();
    let accepted: Vec<bool> = (0..n).map(|x| syn_dfa.is_final(x)).collect();
    let ctx: Vec<Bits> = (0..n)
        .map(|m| bits::from_iter(n * n, (0..n * n).filter(|&pq| accepted[mon.mul(mon.mul(pq / n, m), pq % n)])))
        .collect();
    let classes_below = |x: &Bits| -> Vec<usize> { (0..n).filter(|&m| ctx[m].is_subset(x)).collect() };
    let gens: Vec<Bits> = (0..l.alphabet().len() as u8).map(|a| ctx[mon.generator(a)].clone()).collect();
    let c = close_semiring(
        l.alphabet(),
        ctx[mon.unit()].clone(),
        bits::empty(n * n),
        &gens,
        bits::union,
        |x, y| {
            let (xs, ys) = (classes_below(x), classes_below(y));
            let mut out = bits::empty(n * n);
            for &p in &xs {
                for &q in &ys {
                    out.union_with(&ctx[mon.mul(p, q)]);
                }
            }
            out
        },
        cap,
    )?;
    // (1, 1) is context index 0: U meets L exactly when it is present.
    let rejecting: Vec<usize> = (0..c.keys.len()).filter(|&x| !c.keys[x].contains(0)).collect();
    let tnf = c.semiring.carrier.join(&rejecting);
    let machine = c.semiring.machine(tnf)?;
    Ok((c.semiring, machine))
}

/// Checks that distinct syntactic classes have distinct context sets, so
/// that singletons are identified exactly as the monoid identifies words.
pub fn singleton_congruence_check(l: &Language) -> Result<()> {
    let (mon, syn_dfa) = syntactic_monoid(l);
    let n = mon.len();
    let ctx: Vec<Vec<bool>> =
        (0..n).map(|m| (0..n * n).map(|pq| syn_dfa.is_final(mon.mul(mon.mul(pq / n, m), pq % n))).collect()).collect();
    for x in 0..n {
        for y in x + 1..n {
            if ctx[x] == ctx[y] {
                return Err(Error::CheckFailed(format!("classes {x} and {y} share their contexts")));
            }
        }
    }
    Ok(())
}

/// All subsets of the monoid with the elementwise product.
pub fn power_semiring(m: &FinMonoid, cap: usize) -> Result<IdemSemiring> {
    let n = m.len();
    cap_check("monoid size", n, cap)?;
    if n >= usize::BITS as usize {
        return Err(Error::CapExceeded { what: format!("monoid size ({n})"), cap });
    }
    let labels: Vec<String> = (0..n).map(|x| m.label(x)).collect();
    let carrier = Arc::new(Jsl::powerset(FinSet::new(labels)?));
    let size = 1usize << n;
    let code = |b: &Bits| b.ones().fold(0usize, |c, i| c | 1 << i);
    let pos_of_code: Vec<usize> = {
        let mut v = vec![0; size];
        for x in 0..carrier.len() {
            v[code(carrier.element(x))] = x;
        }
        v
    };
    // left_row[x][Y] = {x·y : y ∈ Y}, built from the lowest bit upwards.
    let left_row: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut row = vec![0usize; size];
            for y_set in 1..size {
                let low = y_set.trailing_zeros() as usize;
                row[y_set] = row[y_set & (y_set - 1)] | 1 << m.mul(x, low);
            }
            row
        })
        .collect();
    let mut table = vec![vec![0usize; size]; size];
    for x_set in 1..size {
        let low = x_set.trailing_zeros() as usize;
        let rest = x_set & (x_set - 1);
        for y_set in 0..size {
            table[x_set][y_set] = table[rest][y_set] | left_row[low][y_set];
        }
    }
    let codes: Vec<usize> = (0..carrier.len()).map(|x| code(carrier.element(x))).collect();
    let mult = (0..carrier.len()).map(|x| (0..carrier.len()).map(|y| pos_of_code[table[codes[x]][codes[y]]]).collect()).collect();
    let single = |x: usize| pos_of_code[1 << x];
    let s = IdemSemiring {
        alphabet: m.alphabet.clone(),
        witnesses: (0..carrier.len()).map(|x| carrier.element(x).ones().map(|i| m.word(i).clone()).collect()).collect(),
        carrier,
        mult,
        unit: single(m.unit()),
        generators: (0..m.alphabet.len() as u8).map(|a| single(m.generator(a))).collect(),
    };
    s.check_laws()?;
    Ok(s)
}

/// The generator-respecting map `a → b` (each element goes to the join of
/// its witness words in `b`), checked to be a semiring isomorphism.
pub fn generator_iso(a: &IdemSemiring, b: &IdemSemiring) -> Result<Vec<usize>> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch(format!("{} vs {}", a.alphabet, b.alphabet)));
    }
    if a.len() != b.len() {
        return Err(Error::CheckFailed(format!("{} elements against {}", a.len(), b.len())));
    }
    let map: Vec<usize> = (0..a.len()).map(|x| b.eval_set(a.witness(x))).collect();
    let mut hit = bits::empty(b.len());
    for &y in &map {
        hit.insert(y);
    }
    if hit.count_ones(..) != b.len() {
        return Err(Error::CheckFailed("generator map is not a bijection".into()));
    }
    let n = a.len();
    let ok = (0..n).into_par_iter().all(|x| {
        (0..n).all(|y| {
            map[a.carrier.join2(x, y)] == b.carrier.join2(map[x], map[y]) && map[a.mult[x][y]] == b.mult[map[x]][map[y]]
        })
    });
    if !ok || map[a.unit] != b.unit {
        return Err(Error::CheckFailed("generator map is not a semiring morphism".into()));
    }
    Ok(map)
}

/// Map each element of `src` to the element of `dst` accepting the same
/// language, then check it is an isomorphism.
pub fn acceptance_iso(src: &JslDfa, dst: &JslDfa) -> Result<Vec<usize>> {
    let index: HashMap<Language, usize> = dst.element_languages().into_iter().enumerate().map(|(i, l)| (l, i)).collect();
    let map: Vec<usize> = src
        .element_languages()
        .iter()
        .map(|l| index.get(l).copied().ok_or_else(|| Error::CheckFailed("accepted language missing from target".into())))
        .collect::<Result<_>>()?;
    check_jsl_dfa_iso(src, dst, &map)?;
    Ok(map)
}

/// The smallest right-quotient closed machine accepting `l`.
pub fn jsl_dfa_syn_min(l: &Language) -> JslDfa {
    rqc(&jsl_dfa_min(l))
}

/// For reachable `j`: acceptance is an isomorphism from the dual of the
/// transition-semiring machine onto the right-quotient closure of the dual
/// of `j`.
pub fn rqc_duality_check(j: &JslDfa, cap: usize) -> Result<Vec<usize>> {
    if !j.is_jsl_reachable() {
        return Err(Error::CheckFailed("input is not reachable".into()));
    }
    let (_, ts) = transition_semiring(j, cap)?;
    acceptance_iso(&ts.pentagram(), &rqc(&j.pentagram()))
}

/// The syntactic semiring against the transition semiring of the minimal
/// machine, both as semirings and as machines.
pub fn syntactic_transition_check(l: &Language, cap: usize) -> Result<Vec<usize>> {
    let (syn, syn_m) = syntactic_semiring(l, cap)?;
    let (ts, ts_m) = transition_semiring(&jsl_dfa_min(l), cap)?;
    let map = generator_iso(&syn, &ts)?;
    check_jsl_dfa_iso(&syn_m, &ts_m, &map)?;
    Ok(map)
}

/// Three dualities for the power and syntactic semirings:
/// the transition semiring of the subset machine of the syntactic monoid
/// dfa is the power semiring of the monoid; the dual of its machine is the
/// subatomic machine; the dual of the syntactic machine of `Lʳ` is the
/// minimal right-quotient closed machine of `L`.
pub fn power_dual_check(l: &Language, cap: usize) -> Result<()> {
    let (mon, syn_dfa) = syntactic_monoid(l);
    cap_check("syntactic monoid size", mon.len(), cap)?;
    let subsets = full_subset(syn_dfa.nfa());
    let (ts, ts_m) = transition_semiring(&subsets, SEMIRING_CAP)?;
    let power = power_semiring(&mon, cap)?;
    generator_iso(&ts, &power)?;
    acceptance_iso(&ts_m.pentagram(), &syn_bool_min(l, cap)?)?;
    let (_, syn_rev) = syntactic_semiring(&l.reverse(), SEMIRING_CAP)?;
    acceptance_iso(&syn_rev.pentagram(), &jsl_dfa_syn_min(l))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::iso_dfa;
    use crate::jsldfa::jsl_reach;

    fn l(s: &str) -> Language {
        Language::parse(s).unwrap()
    }

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn reach_dfa(j: &JslDfa) -> Dfa {
        Dfa::new(j.underlying_dfa().nfa().reach_part()).unwrap()
    }

    /// Words up to `k` grouped by their two-sided contexts up to `c`.
    fn context_classes(x: &Language, k: usize, c: usize) -> usize {
        let ws = x.alphabet().words_upto(k);
        let cs = x.alphabet().words_upto(c);
        let mut sigs: Vec<Vec<bool>> = ws
            .iter()
            .map(|w| {
                cs.iter().flat_map(|p| cs.iter().map(move |q| (p, q))).map(|(p, q)| x.member(&[&p[..], w, q].concat())).collect()
            })
            .collect();
        sigs.sort();
        sigs.dedup();
        sigs.len()
    }

    #[test]
    fn trivial_monoids() {
        let d = Dfa::from_language(&Language::universal(&ab()));
        assert_eq!(transition_monoid(&d).0.len(), 1);
        let (m, _) = syntactic_monoid(&Language::universal(&ab()));
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn monoid_of_a_plus_aa() {
        let x = l("a+aa");
        let (m, md) = syntactic_monoid(&x);
        // ε, a, aa, and everything longer.
        assert_eq!(m.len(), 4);
        assert_eq!(context_classes(&x, 5, 3), 4);
        assert_eq!(md.language(), x);
        let words: Vec<String> = (0..4).map(|i| m.label(i)).collect();
        assert!(words.contains(&"aaa".to_string()));
    }

    #[test]
    fn syntactic_monoid_matches_context_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = Language::random(&mut rng, &ab(), 3);
            let (m, md) = syntactic_monoid(&x);
            assert_eq!(md.language(), x);
            let longest = (0..m.len()).map(|i| m.word(i).len()).max().unwrap();
            // Three states: a prefix and a suffix of length two separate any two maps.
            assert_eq!(context_classes(&x, longest, 2), m.len());
        }
    }

    #[test]
    fn transition_monoid_dfa_accepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let n = Nfa::random(&mut rng, &ab(), 4, 0.3);
            let d = n.rsc();
            let (_, md) = transition_monoid(&d);
            assert_eq!(md.language(), d.language());
        }
    }

    #[test]
    fn identity_dfa_has_trivial_monoid() {
        let n = Nfa::from_edges(ab(), vec!["p", "q"], &[0], &[1], &[(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)]).unwrap();
        let d = Dfa::new(n).unwrap();
        assert_eq!(transition_monoid(&d).0.len(), 1);
    }

    #[test]
    fn power_semiring_sizes() {
        let (one, _) = syntactic_monoid(&Language::universal(&ab()));
        let p = power_semiring(&one, 10).unwrap();
        assert_eq!(p.len(), 2);
        let (m, _) = syntactic_monoid(&l("a+aa"));
        let p = power_semiring(&m, 10).unwrap();
        assert_eq!(p.len(), 16);
        let (m3, _) = syntactic_monoid(&l("a*b"));
        let p3 = power_semiring(&m3, 10).unwrap();
        assert_eq!(p3.len(), 1 << m3.len());
        assert!(matches!(power_semiring(&m, 3), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn bilinearity_on_a_three_element_monoid() {
        // ε, a, and everything longer.
        let (m, _) = syntactic_monoid(&Language::parse_over("a", &Alphabet::from_str("a").unwrap()).unwrap());
        assert_eq!(m.len(), 3);
        let p = power_semiring(&m, 10).unwrap();
        let s = p.carrier();
        for a in 0..p.len() {
            for b in 0..p.len() {
                for c in 0..p.len() {
                    assert_eq!(p.mul(a, s.join2(b, c)), s.join2(p.mul(a, b), p.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn one_element_machine() {
        let x = Language::empty(&ab());
        let j = jsl_dfa_min(&x);
        assert_eq!(j.len(), 1);
        let (s, _) = transition_semiring(&j, SEMIRING_CAP).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn universal_syntactic_semiring() {
        let (s, m) = syntactic_semiring(&Language::universal(&ab()), SEMIRING_CAP).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(m.language(), Language::universal(&ab()));
    }

    #[test]
    fn a_plus_aa_semirings() {
        let x = l("a+aa");
        let (syn, m) = syntactic_semiring(&x, SEMIRING_CAP).unwrap();
        assert_eq!(m.language(), x);
        // Closure oracle: distinct joins of γ_w over the minimal machine,
        // enumerated as sets of single-word maps.
        let j = jsl_dfa_min(&x);
        let words = x.alphabet().words_upto(4);
        let maps: Vec<Vec<usize>> = words.iter().map(|w| (0..j.len()).map(|s| j.run(s, w)).collect()).collect();
        let mut distinct = maps.clone();
        distinct.sort();
        distinct.dedup();
        let mut joins = std::collections::HashSet::new();
        for sub in 0..1u32 << distinct.len() {
            let mut f = vec![j.carrier().bottom(); j.len()];
            for (i, g) in distinct.iter().enumerate() {
                if sub >> i & 1 == 1 {
                    f = f.iter().zip(g).map(|(&p, &q)| j.carrier().join2(p, q)).collect();
                }
            }
            joins.insert(f);
        }
        assert_eq!(syn.len(), joins.len());
        syntactic_transition_check(&x, SEMIRING_CAP).unwrap();
    }

    #[test]
    fn transition_semiring_machine_is_reachable_and_accepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..15 {
            let x = Language::random(&mut rng, &ab(), 3);
            let (_, m) = transition_semiring(&jsl_dfa_min(&x), SEMIRING_CAP).unwrap();
            assert_eq!(m.language(), x);
            assert!(m.is_jsl_reachable());
        }
    }

    #[test]
    fn reach_of_semiring_machine_is_monoid_dfa() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let n = Nfa::random(&mut rng, &ab(), 3, 0.35);
            let (_, m) = transition_semiring(&jsl_reach(&full_subset(&n)), SEMIRING_CAP).unwrap();
            let (_, md) = transition_monoid(&n.rsc());
            assert!(iso_dfa(&reach_dfa(&m), &md));
        }
    }

    #[test]
    fn syntactic_semiring_against_transition_semiring() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..15 {
            let x = Language::random(&mut rng, &ab(), 3);
            singleton_congruence_check(&x).unwrap();
            syntactic_transition_check(&x, SEMIRING_CAP).unwrap();
            let (_, m) = syntactic_semiring(&x, SEMIRING_CAP).unwrap();
            let (_, md) = syntactic_monoid(&x);
            assert!(iso_dfa(&reach_dfa(&m), &md));
        }
    }

    #[test]
    fn power_onto_syntactic_semiring() {
        let x = l("a+aa");
        let (mon, _) = syntactic_monoid(&x);
        let p = power_semiring(&mon, 10).unwrap();
        let (syn, _) = syntactic_semiring(&x, SEMIRING_CAP).unwrap();
        // Well-defined onto map sending each subset to the join of its classes.
        let q: Vec<usize> = (0..p.len()).map(|u| syn.eval_set(p.witness(u))).collect();
        let mut hit = bits::empty(syn.len());
        for &y in &q {
            hit.insert(y);
        }
        assert_eq!(hit.count_ones(..), syn.len());
        for u in 0..p.len() {
            for v in 0..p.len() {
                assert_eq!(q[p.mul(u, v)], syn.mul(q[u], q[v]));
                assert_eq!(q[p.carrier().join2(u, v)], syn.carrier().join2(q[u], q[v]));
            }
        }
    }

    #[test]
    fn syn_min_of_universal_is_min() {
        let u = Language::universal(&ab());
        assert!(crate::jsldfa::iso_jsl_dfa(&jsl_dfa_syn_min(&u), &jsl_dfa_min(&u)));
    }

    #[test]
    fn rqc_duality() {
        rqc_duality_check(&jsl_dfa_min(&l("a+aa")), SEMIRING_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let x = Language::random(&mut rng, &ab(), 3);
            rqc_duality_check(&jsl_dfa_min(&x), SEMIRING_CAP).unwrap();
        }
    }

    #[test]
    fn power_duality() {
        power_dual_check(&l("a+aa"), 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut done = 0;
        while done < 8 {
            let x = Language::random(&mut rng, &ab(), 2);
            if syntactic_monoid(&x).0.len() > 3 {
                continue;
            }
            power_dual_check(&x, 6).unwrap();
            done += 1;
        }
    }

    #[test]
    fn dump_mentions_every_element() {
        let (s, _) = syntactic_semiring(&l("a+aa"), SEMIRING_CAP).unwrap();
        let t = s.to_text();
        assert!(t.starts_with(&format!("elements {}", s.len())));
        assert!(t.contains("generators a="));
    }
}

//! Finite join-semilattices as union-closed set families, with their
//! morphisms, adjoints and irreducibles.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;

use crate::bits::{self, Bits};
use crate::error::{Error, Result};
use crate::finrel::{DepMor, FinRel, FinSet};

/// A union-closed family of subsets of `base`, containing ∅.
/// Members are addressed by their index in `family`: ∅ is index 0 and the
/// top is the last index.
#[derive(Clone, Debug)]
pub struct Jsl {
    base: FinSet,
    family: Vec<Bits>,
    index: HashMap<Bits, usize>,
    join_irr: Vec<usize>,
    meet_irr: Vec<usize>,
}

impl PartialEq for Jsl {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.family == other.family
    }
}
impl Eq for Jsl {}

impl Jsl {
    /// Validates union closure and ∅-membership.
    pub fn from_family(base: FinSet, family: Vec<Bits>) -> Result<Self> {
        let n = base.len();
        let mut family: Vec<Bits> = family
            .into_iter()
            .map(|mut b| {
                b.grow(n);
                b
            })
            .collect();
        if family.iter().any(|b| b.len() > n) {
            return Err(Error::DimensionMismatch("member outside the base".into()));
        }
        family.sort_by_cached_key(bits::size_lex_key);
        family.dedup();
        if family.first().map_or(true, |b| !b.is_clear()) {
            return Err(Error::NotAJsl("∅ is not a member".into()));
        }
        let members: std::collections::HashSet<&Bits> = family.iter().collect();
        for x in &family {
            for y in &family {
                if !members.contains(&bits::union(x, y)) {
                    return Err(Error::NotAJsl(format!("{} ∪ {} is missing", base.fmt_subset(x), base.fmt_subset(y))));
                }
            }
        }
        let s = Self::build(base, family);
        Ok(s)
    }

    /// The union closure of `gens` (plus ∅).
    pub fn generated(base: FinSet, gens: &[Bits]) -> Self {
        let n = base.len();
        let gens: Vec<Bits> = gens
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.grow(n);
                g
            })
            .collect();
        Self::build(base, bits::union_closure(n, &gens))
    }

    pub fn powerset(base: FinSet) -> Self {
        let n = base.len();
        let gens: Vec<Bits> = (0..n).map(|i| bits::singleton(n, i)).collect();
        Self::generated(base, &gens)
    }

    /// The open sets of a relation, over its target.
    pub fn open_of(rel: &FinRel) -> Self {
        Self::build(rel.dst().clone(), rel.open_sets())
    }

    /// `k` uniformly random subsets of an `n`-element base, closed under union.
    pub fn random<R: Rng>(rng: &mut R, n: usize, k: usize) -> Self {
        let gens: Vec<Bits> = (0..k).map(|_| bits::from_iter(n, (0..n).filter(|_| rng.gen_bool(0.5)))).collect();
        Self::generated(FinSet::range(n), &gens)
    }

    fn build(base: FinSet, family: Vec<Bits>) -> Self {
        let index: HashMap<Bits, usize> = family.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let mut s = Jsl { base, family, index, join_irr: Vec::new(), meet_irr: Vec::new() };
        // members are sorted by size, so strict subsets come earlier
        s.join_irr = (1..s.len())
            .filter(|&x| {
                let mut below = bits::empty(s.base.len());
                for y in 0..x {
                    if s.family[y].is_subset(&s.family[x]) {
                        below.union_with(&s.family[y]);
                    }
                }
                below != s.family[x]
            })
            .collect();
        // every upper cover of x has the form x ∨ j
        let top = s.top();
        s.meet_irr = (0..top)
            .filter(|&x| {
                let mut cands: Vec<usize> = s.join_irr.iter().filter(|&&j| !s.leq(j, x)).map(|&j| s.join2(x, j)).collect();
                cands.sort_unstable();
                cands.dedup();
                cands.iter().filter(|&&c| !cands.iter().any(|&d| d != c && s.leq(d, c))).count() == 1
            })
            .collect();
        s
    }

    pub fn base(&self) -> &FinSet {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn family(&self) -> &[Bits] {
        &self.family
    }

    pub fn element(&self, i: usize) -> &Bits {
        &self.family[i]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.family.len() - 1
    }

    pub fn index_of(&self, b: &Bits) -> Option<usize> {
        if b.len() == self.base.len() {
            self.index.get(b).copied()
        } else {
            let mut c = b.clone();
            c.grow(self.base.len());
            self.index.get(&c).copied()
        }
    }

    pub fn label(&self, i: usize) -> String {
        self.base.fmt_subset(&self.family[i])
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.family[x].is_subset(&self.family[y])
    }

    pub fn join2(&self, x: usize, y: usize) -> usize {
        self.index[&bits::union(&self.family[x], &self.family[y])]
    }

    pub fn join(&self, xs: &[usize]) -> usize {
        let mut u = bits::empty(self.base.len());
        for &x in xs {
            u.union_with(&self.family[x]);
        }
        self.index[&u]
    }

    /// The largest member below every `xs` (the top for an empty list).
    pub fn meet(&self, xs: &[usize]) -> usize {
        let mut cap = self.family[self.top()].clone();
        for &x in xs {
            cap.intersect_with(&self.family[x]);
        }
        self.largest_below(&cap)
    }

    /// The largest member contained in an arbitrary subset of the base.
    pub fn largest_below(&self, set: &Bits) -> usize {
        let mut u = bits::empty(self.base.len());
        for f in &self.family {
            if f.is_subset(set) {
                u.union_with(f);
            }
        }
        self.index[&u]
    }

    pub fn join_irreducibles(&self) -> &[usize] {
        &self.join_irr
    }

    pub fn meet_irreducibles(&self) -> &[usize] {
        &self.meet_irr
    }

    /// `{j ∈ J : j ≤ x}` as positions within `join_irreducibles`.
    pub fn j_below(&self, x: usize) -> Vec<usize> {
        (0..self.join_irr.len()).filter(|&k| self.leq(self.join_irr[k], x)).collect()
    }

    /// The order dual, realized on base `J(S)` via `s ↦ {j : j ⊄ s}`.
    /// Returns the dual and the map from our indices to its indices.
    pub fn op(&self) -> (Jsl, Vec<usize>) {
        let labels: Vec<String> = self.join_irr.iter().map(|&j| self.label(j)).collect();
        let base = FinSet::new(labels).expect("distinct members have distinct labels");
        let k = self.join_irr.len();
        let images: Vec<Bits> = (0..self.len())
            .map(|s| bits::from_iter(k, (0..k).filter(|&a| !self.leq(self.join_irr[a], s))))
            .collect();
        let dual = Jsl::build(base, {
            let mut f = images.clone();
            f.sort_by_cached_key(bits::size_lex_key);
            f
        });
        let map = images.iter().map(|b| dual.index[b]).collect();
        (dual, map)
    }

    /// The relation `⊄` restricted to `J × M`.
    pub fn pirr(&self) -> FinRel {
        let src = FinSet::new(self.join_irr.iter().map(|&j| self.label(j))).expect("distinct");
        let dst = FinSet::new(self.meet_irr.iter().map(|&m| self.label(m))).expect("distinct");
        FinRel::from_fn(src, dst, |a, b| !self.leq(self.join_irr[a], self.meet_irr[b]))
    }

    /// `⊄` restricted to arbitrary generating subsets.
    pub fn nleq_on(&self, js: &[usize], ms: &[usize]) -> FinRel {
        FinRel::from_fn(FinSet::range(js.len()), FinSet::range(ms.len()), |a, b| !self.leq(js[a], ms[b]))
    }

    /// The iso onto `Open(Pirr S)`: `s ↦ {m ∈ M : s ⊄ m}`.
    pub fn rep_iso(self: &Arc<Self>) -> JslMor {
        let target = Arc::new(Jsl::open_of(&self.pirr()));
        let map = (0..self.len()).map(|s| target.index[&self.rep(s)]).collect();
        JslMor::new(self.clone(), target, map).expect("rep is join-preserving")
    }

    pub fn rep(&self, s: usize) -> Bits {
        let k = self.meet_irr.len();
        bits::from_iter(k, (0..k).filter(|&b| !self.leq(s, self.meet_irr[b])))
    }

    /// Inverse of `rep`: `Y ↦ ⋀ (M ∖ Y)`.
    pub fn rep_inverse(&self, y: &Bits) -> usize {
        let ms: Vec<usize> = (0..self.meet_irr.len()).filter(|&b| !y.contains(b)).map(|b| self.meet_irr[b]).collect();
        self.meet(&ms)
    }

    /// Lattice isomorphism test; returns the element map when one exists.
    pub fn isomorphism(&self, other: &Jsl) -> Option<Vec<usize>> {
        self.find_isomorphism(other, |_| true)
    }

    /// The first lattice isomorphism (as an element map) accepted by `accept`.
    /// Candidates come from bijections of join-irreducibles that respect
    /// their order, extended by joins and verified.
    pub fn find_isomorphism(&self, other: &Jsl, mut accept: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
        if self.len() != other.len()
            || self.join_irr.len() != other.join_irr.len()
            || self.meet_irr.len() != other.meet_irr.len()
        {
            return None;
        }
        let sig = |s: &Jsl, j: usize| {
            let below = (0..s.len()).filter(|&y| s.leq(y, j)).count();
            let above = (0..s.len()).filter(|&y| s.leq(j, y)).count();
            (below, above)
        };
        let a_sig: Vec<_> = self.join_irr.iter().map(|&j| sig(self, j)).collect();
        let b_sig: Vec<_> = other.join_irr.iter().map(|&j| sig(other, j)).collect();
        let k = self.join_irr.len();
        let mut assign = vec![usize::MAX; k];
        let mut used = vec![false; k];
        let mut search = IsoSearch { a: self, b: other, a_sig: &a_sig, b_sig: &b_sig, accept: &mut accept };
        search.run(0, &mut assign, &mut used)
    }

    fn extend_iso(&self, other: &Jsl, assign: &[usize]) -> Option<Vec<usize>> {
        let map: Vec<usize> = (0..self.len())
            .map(|x| {
                let js: Vec<usize> = self.j_below(x).into_iter().map(|a| other.join_irr[assign[a]]).collect();
                other.join(&js)
            })
            .collect();
        let mut hit = vec![false; other.len()];
        for &y in &map {
            if hit[y] {
                return None;
            }
            hit[y] = true;
        }
        for x in 0..self.len() {
            for y in 0..self.len() {
                if self.leq(x, y) != other.leq(map[x], map[y]) {
                    return None;
                }
            }
        }
        Some(map)
    }

    pub fn is_isomorphic(&self, other: &Jsl) -> bool {
        self.isomorphism(other).is_some()
    }

    /// One line of base labels, then one line per member.
    pub fn to_text(&self) -> String {
        let mut s = self.base.labels().join(" ");
        s.push('\n');
        for i in 0..self.len() {
            s.push_str(&self.label(i));
            s.push('\n');
        }
        s
    }

    /// Hasse diagram, drawn bottom-up.
    pub fn hasse_dot(&self) -> String {
        let mut s = String::from("digraph jsl {\n  rankdir=BT;\n");
        for i in 0..self.len() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", self.label(i));
        }
        for x in 0..self.len() {
            for y in 0..self.len() {
                if x != y && self.leq(x, y) && !(0..self.len()).any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y)) {
                    let _ = writeln!(s, "  n{x} -> n{y} [arrowhead=none];");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

struct IsoSearch<'a, F: FnMut(&[usize]) -> bool> {
    a: &'a Jsl,
    b: &'a Jsl,
    a_sig: &'a [(usize, usize)],
    b_sig: &'a [(usize, usize)],
    accept: &'a mut F,
}

impl<F: FnMut(&[usize]) -> bool> IsoSearch<'_, F> {
    fn run(&mut self, i: usize, assign: &mut Vec<usize>, used: &mut Vec<bool>) -> Option<Vec<usize>> {
        let (a, b) = (self.a, self.b);
        let k = assign.len();
        if i == k {
            let map = a.extend_iso(b, assign)?;
            return (self.accept)(&map).then_some(map);
        }
        for c in 0..k {
            if used[c] || self.a_sig[i] != self.b_sig[c] {
                continue;
            }
            let consistent = (0..i).all(|p| {
                a.leq(a.join_irr[p], a.join_irr[i]) == b.leq(b.join_irr[assign[p]], b.join_irr[c])
                    && a.leq(a.join_irr[i], a.join_irr[p]) == b.leq(b.join_irr[c], b.join_irr[assign[p]])
            });
            if !consistent {
                continue;
            }
            assign[i] = c;
            used[c] = true;
            if let Some(m) = self.run(i + 1, assign, used) {
                return Some(m);
            }
            used[c] = false;
        }
        None
    }
}

/// Two relations are isomorphic objects iff their open-set lattices are.
pub fn dep_isomorphic(g: &FinRel, h: &FinRel) -> bool {
    Jsl::open_of(g).is_isomorphic(&Jsl::open_of(h))
}

/// A join-preserving map, tabulated over member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JslMor {
    dom: Arc<Jsl>,
    cod: Arc<Jsl>,
    map: Vec<usize>,
}

impl JslMor {
    pub fn new(dom: Arc<Jsl>, cod: Arc<Jsl>, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.len() || map.iter().any(|&y| y >= cod.len()) {
            return Err(Error::DimensionMismatch("map does not match carriers".into()));
        }
        check_join_preserving(&dom, &cod, &map)?;
        Ok(JslMor { dom, cod, map })
    }

    pub fn identity(s: &Arc<Jsl>) -> Self {
        JslMor { dom: s.clone(), cod: s.clone(), map: (0..s.len()).collect() }
    }

    pub fn dom(&self) -> &Arc<Jsl> {
        &self.dom
    }
    pub fn cod(&self) -> &Arc<Jsl> {
        &self.cod
    }
    pub fn map(&self) -> &[usize] {
        &self.map
    }
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn compose(&self, then: &JslMor) -> Result<JslMor> {
        if *self.cod != *then.dom {
            return Err(Error::DimensionMismatch("carriers do not match".into()));
        }
        Ok(JslMor { dom: self.dom.clone(), cod: then.cod.clone(), map: self.map.iter().map(|&x| then.map[x]).collect() })
    }

    /// `f_*(t) = ⋁ {s : f(s) ≤ t}` as a table from codomain to domain indices.
    pub fn adjoint_table(&self) -> Vec<usize> {
        adjoint_table(&self.dom, &self.cod, &self.map)
    }

    /// `f_*` as a join-preserving map between the order duals.
    pub fn adjoint(&self) -> JslMor {
        let (cod_op, cod_to_op) = self.cod.op();
        let (dom_op, dom_to_op) = self.dom.op();
        let table = self.adjoint_table();
        let mut map = vec![0; cod_op.len()];
        for t in 0..self.cod.len() {
            map[cod_to_op[t]] = dom_to_op[table[t]];
        }
        JslMor::new(Arc::new(cod_op), Arc::new(dom_op), map).expect("adjoints preserve joins of the duals")
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && {
            let mut seen = vec![false; self.cod.len()];
            self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        }
    }
}

pub(crate) fn adjoint_table(dom: &Jsl, cod: &Jsl, map: &[usize]) -> Vec<usize> {
    (0..cod.len())
        .map(|t| {
            let below: Vec<usize> = (0..dom.len()).filter(|&s| cod.leq(map[s], t)).collect();
            dom.join(&below)
        })
        .collect()
}

/// `f(⊥) = ⊥` and `f(x ∨ j) = f(x) ∨ f(j)` for every `x` and irreducible `j`.
pub(crate) fn check_join_preserving(dom: &Jsl, cod: &Jsl, map: &[usize]) -> Result<()> {
    if map[0] != 0 {
        return Err(Error::NotJoinPreserving("bottom is not preserved".into()));
    }
    for x in 0..dom.len() {
        for &j in dom.join_irreducibles() {
            if map[dom.join2(x, j)] != cod.join2(map[x], map[j]) {
                return Err(Error::NotJoinPreserving(format!("at {} ∨ {}", dom.label(x), dom.label(j))));
            }
        }
    }
    Ok(())
}

/// `Open f`: `Y ↦ upper˘[Y]`.
pub fn open_mor(f: &DepMor) -> JslMor {
    let dom = Arc::new(Jsl::open_of(f.dom()));
    let cod = Arc::new(Jsl::open_of(f.cod()));
    let conv = f.upper().converse();
    let map = (0..dom.len()).map(|y| cod.index_of(&conv.image(dom.element(y))).expect("open image")).collect();
    JslMor::new(dom, cod, map).expect("Open of a morphism preserves joins")
}

/// `Pirr f`: `(j, m) ⟺ f(j) ≰ m`.
pub fn pirr_mor(f: &JslMor) -> Result<DepMor> {
    let (s, t) = (f.dom(), f.cod());
    let src = s.pirr();
    let dst = t.pirr();
    let rel = FinRel::from_fn(src.src().clone(), dst.dst().clone(), |a, b| {
        !t.leq(f.apply(s.join_irreducibles()[a]), t.meet_irreducibles()[b])
    });
    DepMor::new(rel, src, dst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p6() -> FinRel {
        let odd = [1i32, 3, 5];
        let even = [0i32, 2, 4, 6];
        FinRel::from_fn(
            FinSet::new(odd.iter().map(|x| x.to_string())).unwrap(),
            FinSet::new(even.iter().map(|x| x.to_string())).unwrap(),
            |i, j| (odd[i] - even[j]).abs() == 1,
        )
    }

    fn random_mor(rng: &mut ChaCha8Rng, s: &Arc<Jsl>, t: &Arc<Jsl>) -> JslMor {
        // images of irreducibles chosen freely, extended by joins; retry until join-preserving
        loop {
            let js = s.join_irreducibles();
            let img: Vec<usize> = js.iter().map(|_| rng.gen_range(0..t.len())).collect();
            let map: Vec<usize> = (0..s.len())
                .map(|x| {
                    let parts: Vec<usize> = s.j_below(x).into_iter().map(|a| img[a]).collect();
                    t.join(&parts)
                })
                .collect();
            if let Ok(f) = JslMor::new(s.clone(), t.clone(), map) {
                return f;
            }
        }
    }

    #[test]
    fn p6_lattice_numbers() {
        let s = Jsl::open_of(&p6());
        assert_eq!(s.len(), 7);
        assert_eq!(s.join_irreducibles().len(), 3);
        assert_eq!(s.meet_irreducibles().len(), 4);
        let a = s.index_of(&bits::from_iter(4, [0, 1, 2])).unwrap();
        let b = s.index_of(&bits::from_iter(4, [1, 2, 3])).unwrap();
        assert_eq!(bits::to_vec(s.element(s.meet(&[a, b]))), vec![1, 2]);
        assert_eq!(s.join(&[]), s.bottom());
        assert_eq!(s.meet(&[]), s.top());
    }

    #[test]
    fn powerset_irreducibles() {
        let s = Jsl::powerset(FinSet::range(4));
        assert_eq!(s.len(), 16);
        for &j in s.join_irreducibles() {
            assert_eq!(s.element(j).count_ones(..), 1);
        }
        for &m in s.meet_irreducibles() {
            assert_eq!(s.element(m).count_ones(..), 3);
        }
    }

    #[test]
    fn meet_is_greatest_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let s = Jsl::random(&mut rng, 5, 4);
            for x in 0..s.len() {
                for y in 0..s.len() {
                    let m = s.meet(&[x, y]);
                    let lbs: Vec<usize> = (0..s.len()).filter(|&z| s.leq(z, x) && s.leq(z, y)).collect();
                    assert!(lbs.contains(&m));
                    assert!(lbs.iter().all(|&z| s.leq(z, m)));
                }
            }
        }
    }

    #[test]
    fn irreducibles_generate() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let s = Jsl::random(&mut rng, 4, 5);
            for x in 0..s.len() {
                let js: Vec<usize> = s.j_below(x).iter().map(|&a| s.join_irreducibles()[a]).collect();
                assert_eq!(s.join(&js), x);
                let ms: Vec<usize> = s.meet_irreducibles().iter().copied().filter(|&m| s.leq(x, m)).collect();
                assert_eq!(s.meet(&ms), x);
            }
        }
    }

    #[test]
    fn join_irreducibles_are_the_minimal_generating_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let s = Jsl::random(&mut rng, 4, 3);
            if s.len() > 12 {
                continue;
            }
            let n = s.len() - 1;
            let mut best: Option<Bits> = None;
            for sub in bits::all_subsets(n) {
                let gens: Vec<Bits> = sub.ones().map(|i| s.element(i + 1).clone()).collect();
                if Jsl::generated(s.base().clone(), &gens) == s
                    && best.as_ref().map_or(true, |b| sub.count_ones(..) < b.count_ones(..))
                {
                    best = Some(sub);
                }
            }
            let best: Vec<usize> = best.unwrap().ones().map(|i| i + 1).collect();
            assert_eq!(best, s.join_irreducibles());
        }
    }

    #[test]
    fn rejects_non_union_closed() {
        let fam = vec![bits::empty(2), bits::singleton(2, 0), bits::singleton(2, 1)];
        assert!(matches!(Jsl::from_family(FinSet::range(2), fam), Err(Error::NotAJsl(_))));
        let fam = vec![bits::singleton(2, 0)];
        assert!(Jsl::from_family(FinSet::range(2), fam).is_err());
    }

    #[test]
    fn adjoint_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..30 {
            let s = Arc::new(Jsl::random(&mut rng, 4, 3));
            let t = Arc::new(Jsl::random(&mut rng, 4, 3));
            let f = random_mor(&mut rng, &s, &t);
            let lower = f.adjoint_table();
            for x in 0..s.len() {
                for y in 0..t.len() {
                    assert_eq!(t.leq(f.apply(x), y), s.leq(x, lower[y]));
                }
            }
            // the left adjoint of f_* recovers f
            for x in 0..s.len() {
                let above: Vec<usize> = (0..t.len()).filter(|&y| s.leq(x, lower[y])).collect();
                assert_eq!(t.meet(&above), f.apply(x));
            }
            let g = f.adjoint();
            assert_eq!(g.dom().len(), t.len());
            let gg = g.adjoint();
            assert!(gg.dom().is_isomorphic(&s));
        }
        let s = Arc::new(Jsl::random(&mut rng, 4, 3));
        let id = JslMor::identity(&s);
        assert_eq!(id.adjoint_table(), (0..s.len()).collect::<Vec<_>>());
    }

    #[test]
    fn adjoint_of_up_is_down() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let r = FinRel::from_fn(FinSet::range(3), FinSet::range(4), |_, _| rng.gen_bool(0.4));
            let p = Arc::new(Jsl::powerset(FinSet::range(3)));
            let q = Arc::new(Jsl::powerset(FinSet::range(4)));
            let map = (0..p.len()).map(|x| q.index_of(&r.up(p.element(x))).unwrap()).collect();
            let f = JslMor::new(p.clone(), q.clone(), map).unwrap();
            let table = f.adjoint_table();
            for y in 0..q.len() {
                assert_eq!(p.element(table[y]), &r.down(q.element(y)));
            }
        }
    }

    #[test]
    fn open_and_pirr_functors() {
        let g = p6();
        let id = open_mor(&DepMor::identity(&g));
        assert_eq!(id.map(), (0..7).collect::<Vec<_>>());
        assert!(Jsl::open_of(&FinRel::identity(&FinSet::range(3))) == Jsl::powerset(FinSet::range(3)));
        let pw = Jsl::powerset(FinSet::range(3));
        assert!(dep_isomorphic(&pw.pirr(), &FinRel::identity(&FinSet::range(3))));
        assert_eq!(pw.pirr().edge_count(), 3);
        // a chain reduces to its order
        let chain = Jsl::generated(FinSet::range(3), &[bits::from_iter(3, [0]), bits::from_iter(3, [0, 1]), bits::full(3)]);
        let pc = chain.pirr();
        assert_eq!((pc.src().len(), pc.dst().len()), (3, 3));
        assert_eq!(pc.edge_count(), 6);
    }

    #[test]
    fn open_mor_functoriality() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut checked = 0;
        for _ in 0..300 {
            let objs: Vec<FinRel> =
                (0..3).map(|_| FinRel::from_fn(FinSet::range(3), FinSet::range(3), |_, _| rng.gen_bool(0.5))).collect();
            let mk = |rng: &mut ChaCha8Rng, a: &FinRel, b: &FinRel| {
                let x = FinRel::from_fn(FinSet::range(3), FinSet::range(3), |_, _| rng.gen_bool(0.5));
                DepMor::new(x.compose(b).unwrap(), a.clone(), b.clone()).ok()
            };
            let (Some(f), Some(g)) = (mk(&mut rng, &objs[0], &objs[1]), mk(&mut rng, &objs[1], &objs[2])) else {
                continue;
            };
            checked += 1;
            let lhs = open_mor(&f.then(&g).unwrap());
            let rhs = open_mor(&f).compose(&open_mor(&g)).unwrap();
            assert_eq!(lhs.map(), rhs.map());
        }
        assert!(checked > 10);
    }

    #[test]
    fn pirr_mor_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let s = Arc::new(Jsl::random(&mut rng, 4, 3));
            let t = Arc::new(Jsl::random(&mut rng, 4, 3));
            let f = random_mor(&mut rng, &s, &t);
            let m = pirr_mor(&f).unwrap();
            // lower component (j1, j2) ⟺ j2 ≤ f(j1)
            for (a, &j1) in s.join_irreducibles().iter().enumerate() {
                for (b, &j2) in t.join_irreducibles().iter().enumerate() {
                    assert_eq!(m.lower().get(a, b), t.leq(j2, f.apply(j1)));
                }
            }
        }
    }

    #[test]
    fn rep_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..100 {
            let s = Arc::new(Jsl::random(&mut rng, 5, 4));
            let rep = s.rep_iso();
            assert!(rep.is_bijective());
            for x in 0..s.len() {
                assert_eq!(s.rep_inverse(&s.rep(x)), x);
            }
            let two = Arc::new(Jsl::powerset(FinSet::range(1)));
            assert!(two.rep_iso().is_bijective());
        }
        let s = Jsl::open_of(&p6());
        assert_eq!(Jsl::open_of(&s.pirr()).len(), 7);
    }

    #[test]
    fn dual_pirr_is_converse() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let s = Jsl::random(&mut rng, 5, 4);
            let (d, map) = s.op();
            assert_eq!(d.len(), s.len());
            for x in 0..s.len() {
                for y in 0..s.len() {
                    assert_eq!(s.leq(x, y), d.leq(map[y], map[x]));
                }
            }
            assert!(d.pirr().same_edges(&s.pirr().converse()) || dep_isomorphic(&d.pirr(), &s.pirr().converse()));
            // exact: J(op) = images of M(S) in the same order, M(op) = images of J(S)
            let jd: Vec<usize> = d.join_irreducibles().to_vec();
            let mut expect: Vec<usize> = s.meet_irreducibles().iter().map(|&m| map[m]).collect();
            expect.sort_unstable();
            assert_eq!(jd, expect);
        }
    }

    #[test]
    fn generator_extension_is_isomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..40 {
            let s = Jsl::random(&mut rng, 4, 4);
            let mut js = s.join_irreducibles().to_vec();
            let mut ms = s.meet_irreducibles().to_vec();
            for x in 0..s.len() {
                if rng.gen_bool(0.3) && !js.contains(&x) {
                    js.push(x);
                }
                if rng.gen_bool(0.3) && !ms.contains(&x) {
                    ms.push(x);
                }
            }
            assert!(dep_isomorphic(&s.nleq_on(&js, &ms), &s.pirr()));
        }
    }

    #[test]
    fn isomorphism_detects_relabelling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let s = Jsl::random(&mut rng, 4, 4);
            let perm = [2usize, 0, 3, 1];
            let t = Jsl::generated(
                FinSet::range(4),
                &s.family().iter().map(|b| bits::from_iter(4, b.ones().map(|i| perm[i]))).collect::<Vec<_>>(),
            );
            assert!(s.is_isomorphic(&t));
        }
        let chain = Jsl::generated(FinSet::range(2), &[bits::singleton(2, 0), bits::full(2)]);
        let square = Jsl::powerset(FinSet::range(2));
        assert!(!chain.is_isomorphic(&square));
    }

    #[test]
    fn text_and_dot() {
        let s = Jsl::open_of(&p6());
        assert_eq!(s.to_text().lines().count(), 8);
        assert!(s.hasse_dot().contains("->"));
    }
}

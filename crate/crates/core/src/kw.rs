//! Coverings of the dependency relation by grids, their induced nfas, and
//! the exact minimal-nfa search over grid covers.

use rayon::prelude::*;

use crate::automata::{iso_nfa, Nfa};
use crate::bits::{self, Bits};
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::jsldfa::{jsl_simple, JslDfa};
use crate::lang::{reversed, Alphabet, Language};

/// Default bound on the number of grids of a language.
pub const GRID_CAP: usize = 32;

/// An inclusion-maximal product `rows × cols` inside the dependency
/// relation; rows index left quotients of `L`, columns those of `Lʳ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    pub rows: Bits,
    pub cols: Bits,
}

impl Grid {
    /// `A={u-reps} x B={v-reps}`.
    pub fn describe(&self, dr: &FinRel) -> String {
        format!("A={} x B={}", dr.src().fmt_subset(&self.rows), dr.dst().fmt_subset(&self.cols))
    }
}

/// All grids of `l` in a fixed order (by rows, then columns).
pub fn grids(l: &Language, cap: usize) -> Result<Vec<Grid>> {
    Ok(l.dependency_relation().maximal_bicliques(cap)?.into_iter().map(|(rows, cols)| Grid { rows, cols }).collect())
}

/// A factorisation `DR_L = lower ; rel` with `rel ⊆ states × LW(Lʳ)`.
#[derive(Clone, Debug)]
pub struct LCovering {
    language: Language,
    rel: FinRel,
    lower: FinRel,
}

impl LCovering {
    /// Computes the lower witness pointwise,
    /// `lower(X, h) ⟺ rel[h] ⊆ DR[X]`, and checks the factorisation.
    pub fn new(language: &Language, rel: FinRel) -> Result<Self> {
        let dr = language.dependency_relation();
        if rel.dst().len() != dr.dst().len() {
            return Err(Error::DimensionMismatch(format!(
                "covering has {} columns, the reverse has {} quotients",
                rel.dst().len(),
                dr.dst().len()
            )));
        }
        let lower = FinRel::from_fn(dr.src().clone(), rel.src().clone(), |x, h| rel.row(h).is_subset(dr.row(x)));
        let rel = rel.relabel(rel.src().clone(), dr.dst().clone())?;
        if !lower.compose(&rel)?.same_edges(&dr) {
            return Err(Error::NotACovering("lower ; rel differs from the dependency relation".into()));
        }
        Ok(LCovering { language: language.clone(), rel, lower })
    }

    /// The covering whose states are the given grids.
    pub fn of_grids(language: &Language, grids: &[Grid]) -> Result<Self> {
        let dr = language.dependency_relation();
        let states = grid_states(&dr, grids);
        let rows = grids.iter().map(|g| g.cols.clone()).collect();
        LCovering::new(language, FinRel::from_rows(states, dr.dst().clone(), rows)?)
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn rel(&self) -> &FinRel {
        &self.rel
    }

    pub fn lower(&self) -> &FinRel {
        &self.lower
    }

    pub fn num_states(&self) -> usize {
        self.rel.src().len()
    }

    /// States relabelled as the products `lower˘[h] × rel[h]`, merged
    /// when equal.
    pub fn biclique_form(&self) -> Result<LCovering> {
        let dr = self.language.dependency_relation();
        let mut grids: Vec<Grid> = Vec::new();
        for h in 0..self.num_states() {
            let g = Grid { rows: self.lower.col(h), cols: self.rel.row(h).clone() };
            if !grids.contains(&g) {
                grids.push(g);
            }
        }
        let states = grid_states(&dr, &grids);
        let rel = FinRel::from_rows(states, dr.dst().clone(), grids.iter().map(|g| g.cols.clone()).collect())?;
        let c = LCovering::new(&self.language, rel)?;
        for (k, g) in grids.iter().enumerate() {
            if c.lower.col(k) != g.rows {
                return Err(Error::CheckFailed("biclique-form lower witness differs from the grid rows".into()));
            }
        }
        Ok(c)
    }

    /// The converse of the lower witness, as a covering of `Lʳ`.
    pub fn dual(&self) -> Result<LCovering> {
        let rev = self.language.reverse();
        let cols = rev.dependency_relation().dst().clone();
        LCovering::new(&rev, self.lower.converse().relabel(self.rel.src().clone(), cols)?)
    }

    pub fn is_maximal(&self) -> Result<bool> {
        Ok(self.dual()?.dual()?.rel.same_edges(&self.rel))
    }

    /// Initial states `lower[L]`, finals those whose lower column meets only
    /// quotients containing ε, and `h₁ →a h₂` whenever every quotient
    /// below `h₁` has its `a`-quotient below `h₂`.
    pub fn induced_nfa(&self) -> Nfa {
        let l = &self.language;
        let n = self.num_states();
        let cols: Vec<Bits> = (0..n).map(|h| self.lower.col(h)).collect();
        let initial: Vec<usize> = self.lower.row(0).ones().collect();
        let finals: Vec<usize> = (0..n).filter(|&h| cols[h].ones().all(|x| l.is_final(x))).collect();
        let mut edges = Vec::new();
        for a in 0..l.alphabet().len() as u8 {
            for h1 in 0..n {
                for h2 in 0..n {
                    if cols[h1].ones().all(|x| cols[h2].contains(l.delta(x, a))) {
                        edges.push((h1, a, h2));
                    }
                }
            }
        }
        Nfa::from_edges(l.alphabet().clone(), self.rel.src().labels().to_vec(), &initial, &finals, &edges)
            .expect("labels come from a FinSet")
    }

    pub fn is_legitimate(&self) -> bool {
        self.induced_nfa().language() == self.language
    }
}

fn grid_states(dr: &FinRel, grids: &[Grid]) -> FinSet {
    let mut labels: Vec<String> = Vec::new();
    for (k, g) in grids.iter().enumerate() {
        let s = format!("{}x{}", dr.src().fmt_subset(&g.rows), dr.dst().fmt_subset(&g.cols));
        labels.push(if labels.contains(&s) { format!("{s}#{k}") } else { s });
    }
    FinSet::new(labels).expect("made distinct")
}

/// Every way to choose `k` of the grids so that their union covers all of
/// `targets`; `covers[g]` is the set of targets grid `g` covers.
fn covering_subsets(covers: &[Bits], n_targets: usize, k: usize) -> Vec<Vec<usize>> {
    let g = covers.len();
    // later[i] = targets covered by some grid with index ≥ i
    let mut later = vec![bits::empty(n_targets); g + 1];
    for i in (0..g).rev() {
        later[i] = bits::union(&later[i + 1], &covers[i]);
    }
    let full = bits::full(n_targets);
    if !full.is_subset(&later[0]) {
        return Vec::new();
    }
    if k == 0 {
        return if n_targets == 0 { vec![vec![]] } else { vec![] };
    }
    (0..g)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut chosen = vec![first];
            extend_cover(covers, &later, &full, covers[first].clone(), first + 1, k, &mut chosen, &mut out);
            out
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn extend_cover(
    covers: &[Bits],
    later: &[Bits],
    full: &Bits,
    covered: Bits,
    next: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if chosen.len() == k {
        if covered == *full {
            out.push(chosen.clone());
        }
        return;
    }
    if next >= covers.len() || covers.len() - next < k - chosen.len() {
        return;
    }
    if !bits::difference(full, &covered).is_subset(&later[next]) {
        return;
    }
    chosen.push(next);
    extend_cover(covers, later, full, bits::union(&covered, &covers[next]), next + 1, k, chosen, out);
    chosen.pop();
    extend_cover(covers, later, full, covered, next + 1, k, chosen, out);
}

/// Per-grid edge sets of the dependency relation.
fn grid_edge_sets(dr: &FinRel, grids: &[Grid]) -> (usize, Vec<Bits>) {
    let edges = dr.edges();
    let sets = grids
        .iter()
        .map(|g| bits::from_iter(edges.len(), (0..edges.len()).filter(|&e| g.rows.contains(edges[e].0) && g.cols.contains(edges[e].1))))
        .collect();
    (edges.len(), sets)
}

/// The legitimate covers of exactly `k` grids, in lexicographic order of
/// grid indices.
pub fn legitimate_covers_of_size(l: &Language, grids: &[Grid], k: usize) -> Vec<Vec<usize>> {
    let dr = l.dependency_relation();
    let (n_edges, sets) = grid_edge_sets(&dr, grids);
    let mut found: Vec<Vec<usize>> = covering_subsets(&sets, n_edges, k)
        .into_par_iter()
        .filter(|idx| {
            let chosen: Vec<Grid> = idx.iter().map(|&i| grids[i].clone()).collect();
            LCovering::of_grids(l, &chosen).map(|c| c.is_legitimate()).unwrap_or(false)
        })
        .collect();
    found.sort();
    found
}

/// The least number of grids of a legitimate cover, with the first such
/// cover, searching upwards from the bipartite dimension.
fn minimum_cover(l: &Language, grids: &[Grid], cap: usize) -> Result<(usize, Vec<Vec<usize>>)> {
    let dr = l.dependency_relation();
    let lower = dr.bipartite_dimension(cap)?;
    for k in lower..=grids.len() {
        let found = legitimate_covers_of_size(l, grids, k);
        if !found.is_empty() {
            return Ok((k, found));
        }
    }
    Err(Error::CheckFailed("the full set of grids is always legitimate".into()))
}

/// A state-minimal nfa for `l` induced by a smallest legitimate grid cover.
pub fn minimal_nfa(l: &Language, cap: usize) -> Result<(Nfa, LCovering)> {
    let gs = grids(l, cap)?;
    let (_, found) = minimum_cover(l, &gs, cap)?;
    let chosen: Vec<Grid> = found[0].iter().map(|&i| gs[i].clone()).collect();
    let c = LCovering::of_grids(l, &chosen)?;
    Ok((c.induced_nfa(), c))
}

/// Every smallest legitimate grid cover, keeping one per isomorphism class
/// of induced nfa.
pub fn enumerate_minimal_covers(l: &Language, cap: usize) -> Result<Vec<(Vec<usize>, Nfa)>> {
    let gs = grids(l, cap)?;
    let (_, found) = minimum_cover(l, &gs, cap)?;
    let mut out: Vec<(Vec<usize>, Nfa)> = Vec::new();
    for idx in found {
        let chosen: Vec<Grid> = idx.iter().map(|&i| gs[i].clone()).collect();
        let n = LCovering::of_grids(l, &chosen)?.induced_nfa();
        if !out.iter().any(|(_, m)| iso_nfa(m, &n)) {
            out.push((idx, n));
        }
    }
    Ok(out)
}

/// Exhaustive search over all nfas with exactly `k` states; returns one
/// accepting `l` if there is any.
pub fn brute_force_nfa(l: &Language, k: usize) -> Option<Nfa> {
    let mut found = None;
    visit_nfas(l, k, |n| {
        found = Some(n);
        true
    });
    found
}

/// All nfas with exactly `k` states accepting `l`, one per isomorphism class.
/// Empty when the search space is too large (see [`brute_force_nfa`]).
pub fn all_nfas_of_size(l: &Language, k: usize) -> Vec<Nfa> {
    let mut out: Vec<Nfa> = Vec::new();
    visit_nfas(l, k, |n| {
        if !out.iter().any(|m| iso_nfa(m, &n)) {
            out.push(n);
        }
        false
    });
    out
}

// Calls `f` on every k-state nfa for `l` until it returns true. Gives up
// beyond 2^24 candidates.
fn visit_nfas(l: &Language, k: usize, mut f: impl FnMut(Nfa) -> bool) {
    let alphabet: &Alphabet = l.alphabet();
    let slots = k * k * alphabet.len();
    if slots + 2 * k > 24 {
        return;
    }
    let labels: Vec<String> = (0..k).map(|i| format!("q{i}")).collect();
    for init in 0..1u32 << k {
        for fin in 0..1u32 << k {
            for t in 0..1u64 << slots {
                let edges: Vec<(usize, u8, usize)> = (0..slots)
                    .filter(|&s| t >> s & 1 == 1)
                    .map(|s| (s / (k * alphabet.len()), (s / k % alphabet.len()) as u8, s % k))
                    .collect();
                let i: Vec<usize> = (0..k).filter(|&z| init >> z & 1 == 1).collect();
                let f_: Vec<usize> = (0..k).filter(|&z| fin >> z & 1 == 1).collect();
                let n = Nfa::from_edges(alphabet.clone(), labels.clone(), &i, &f_, &edges).expect("in range");
                if n.language() == *l && f(n) {
                    return;
                }
            }
        }
    }
}

/// The atomizer relation of a machine, as a covering: rows are the
/// join-irreducible accepted languages `Y`, with an edge to `v⁻¹Lʳ`
/// exactly when `vʳ` lies in the atomic closure of `Y`. Checks the lower
/// witness `acc(j) ⊆ u⁻¹L` and legitimacy.
pub fn covering_of_extension(j: &JslDfa) -> Result<LCovering> {
    let l = j.language();
    let (simple, _) = jsl_simple(j);
    let langs = simple.element_languages();
    let js = simple.carrier().join_irreducibles().to_vec();
    let rev_idx = l.reverse().quotients();
    let atoms = l.atoms();
    let closures: Vec<Bits> = js.iter().map(|&x| atoms.meeting(&langs[x])).collect();
    let dr = l.dependency_relation();
    let states = FinSet::new(js.iter().map(|&x| format!("J{x}")))?;
    let rel = FinRel::from_fn(states, dr.dst().clone(), |h, y| closures[h].contains(atoms.atom_of(&reversed(rev_idx.rep(y)))));
    let c = LCovering::new(&l, rel)?;
    let quotients = l.quotients();
    for (h, &x) in js.iter().enumerate() {
        for q in 0..quotients.len() {
            if c.lower.get(q, h) != langs[x].is_subset(quotients.language(q)) {
                return Err(Error::CheckFailed(format!("lower witness differs at ({q}, {h})")));
            }
        }
    }
    if !c.is_legitimate() {
        return Err(Error::CheckFailed("atomizer covering is not legitimate".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsldfa::{canonical_rfsa, full_subset, jsl_dfa_min};
    use crate::lang::concat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l(s: &str) -> Language {
        Language::parse(s).unwrap()
    }

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    /// A random covering: random rows, kept only when the factorisation holds.
    fn random_covering(rng: &mut ChaCha8Rng, x: &Language) -> Option<LCovering> {
        use rand::Rng;
        let dr = x.dependency_relation();
        let gs = grids(x, 64).ok()?;
        let mut rows: Vec<Bits> = gs.iter().filter(|_| rng.gen_bool(0.7)).map(|g| g.cols.clone()).collect();
        for _ in 0..rng.gen_range(0..3) {
            // subsets of grid columns are still bicliques
            if let Some(g) = gs.get(rng.gen_range(0..gs.len().max(1))) {
                let sub = bits::from_iter(dr.dst().len(), g.cols.ones().filter(|_| rng.gen_bool(0.6)));
                rows.push(sub);
            }
        }
        let states = FinSet::prefixed("h", rows.len());
        LCovering::new(x, FinRel::from_rows(states, dr.dst().clone(), rows).ok()?).ok()
    }

    #[test]
    fn grids_of_a_plus_aa() {
        let x = l("a+aa");
        let gs = grids(&x, GRID_CAP).unwrap();
        assert_eq!(gs.len(), 4);
        let dr = x.dependency_relation();
        // The sink row and column never take part.
        let sink_row = (0..dr.src().len()).find(|&r| dr.row(r).is_clear()).unwrap();
        assert!(gs.iter().all(|g| !g.rows.contains(sink_row)));
        assert!(grids(&Language::empty(&ab()), GRID_CAP).unwrap().is_empty());
    }

    #[test]
    fn every_edge_in_a_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..40 {
            let x = Language::random(&mut rng, &ab(), 4);
            let Ok(gs) = grids(&x, 64) else { continue };
            let dr = x.dependency_relation();
            for (i, j) in dr.edges() {
                assert!(gs.iter().any(|g| g.rows.contains(i) && g.cols.contains(j)));
            }
        }
    }

    #[test]
    fn identity_covering() {
        let x = l("a+aa");
        let dr = x.dependency_relation();
        let c = LCovering::new(&x, dr.clone()).unwrap();
        assert!(c.lower.compose(&c.rel).unwrap().same_edges(&dr));
        assert!(c.is_legitimate());
    }

    #[test]
    fn non_coverings_are_rejected() {
        let x = l("a+aa");
        let dr = x.dependency_relation();
        let states = FinSet::prefixed("h", 1);
        let rel = FinRel::from_rows(states, dr.dst().clone(), vec![bits::empty(dr.dst().len())]).unwrap();
        assert!(matches!(LCovering::new(&x, rel), Err(Error::NotACovering(_))));
    }

    #[test]
    fn biclique_form_and_duals() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut seen = 0;
        for _ in 0..200 {
            let x = Language::random(&mut rng, &ab(), 3);
            let Some(c) = random_covering(&mut rng, &x) else { continue };
            seen += 1;
            let flat = c.biclique_form().unwrap();
            assert_eq!(flat.induced_nfa().language(), c.induced_nfa().language());
            assert!(c.induced_nfa().language().is_subset(&x));
            // Grid-form laws for the induced nfa.
            let n = flat.induced_nfa();
            for h in 0..flat.num_states() {
                let rows = flat.lower.col(h);
                assert_eq!(n.initial().contains(h), rows.contains(0));
                assert_eq!(n.finals().contains(h), rows.ones().all(|q| x.is_final(q)));
            }
            let d = c.dual().unwrap();
            assert!(d.rel.same_edges(&c.lower.converse().relabel(d.rel.src().clone(), d.rel.dst().clone()).unwrap()));
            assert!(d.is_maximal().unwrap());
            let dd = d.dual().unwrap();
            assert!(c.rel.is_subset(&dd.rel));
            assert!(c.lower.same_edges(&dd.lower));
            assert_eq!(c.is_maximal().unwrap(), c.rel.same_edges(&dd.rel));
            if c.is_legitimate() {
                assert!(dd.is_legitimate());
            }
            // Grid flip between the biclique forms of the dual and the double dual.
            let f2 = dd.biclique_form().unwrap();
            let f1 = d.biclique_form().unwrap();
            let g2: Vec<(Vec<usize>, Vec<usize>)> =
                (0..f2.num_states()).map(|h| (bits::to_vec(&f2.lower.col(h)), bits::to_vec(f2.rel.row(h)))).collect();
            let g1: Vec<(Vec<usize>, Vec<usize>)> =
                (0..f1.num_states()).map(|h| (bits::to_vec(f1.rel.row(h)), bits::to_vec(&f1.lower.col(h)))).collect();
            let (mut g1, mut g2) = (g1, g2);
            g1.sort();
            g2.sort();
            assert_eq!(g1, g2);
        }
        assert!(seen > 50);
    }

    #[test]
    fn reachable_grids_contain_the_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..30 {
            let x = Language::random(&mut rng, &ab(), 3);
            let Some(c) = random_covering(&mut rng, &x) else { continue };
            let flat = c.biclique_form().unwrap();
            let n = flat.induced_nfa();
            for u in ab().words_upto(4) {
                let q = x.run(0, &u);
                for h in n.run(n.initial(), &u).ones() {
                    assert!(flat.lower.get(q, h));
                }
            }
        }
    }

    #[test]
    fn dropping_a_grid_can_break_legitimacy() {
        // small hand languages only have legitimate grid covers; random ones do not
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let found = (0..100).any(|_| {
            let x = Language::random(&mut rng, &ab(), 4);
            let Ok(gs) = grids(&x, 12) else { return false };
            let dr = x.dependency_relation();
            let (n_edges, sets) = grid_edge_sets(&dr, &gs);
            (1..=gs.len()).any(|k| {
                covering_subsets(&sets, n_edges, k).into_iter().any(|idx| {
                    let chosen: Vec<Grid> = idx.iter().map(|&i| gs[i].clone()).collect();
                    let c = LCovering::of_grids(&x, &chosen).unwrap();
                    !c.is_legitimate()
                })
            })
        });
        assert!(found);
    }

    #[test]
    fn enumerated_covers_of_a_plus_aa() {
        let found = enumerate_minimal_covers(&l("a+aa"), GRID_CAP).unwrap();
        assert!(found.iter().all(|(_, n)| n.num_states() == 3));
        let all = all_nfas_of_size(&l("a+aa"), 3);
        // five 3-state nfas in all; grid covers induce two of them
        assert_eq!(all.len(), 5);
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|(_, n)| all.iter().any(|m| iso_nfa(m, n))));
    }

    #[test]
    fn two_cycle_union_needs_five_states() {
        let (n, c) = minimal_nfa(&l("(ab)*+(abc)*"), GRID_CAP).unwrap();
        assert_eq!(n.num_states(), 5);
        assert!(c.is_legitimate());
        // extended fooling set: any nfa needs five states
        let x = l("(ab)*+(abc)*");
        let w = |s: &str| x.alphabet().parse_word(s).unwrap();
        let pairs = [("", "ab"), ("a", "bc"), ("ab", "c"), ("aba", "b"), ("abc", "")];
        for (i, p) in pairs.iter().enumerate() {
            assert!(x.member(&concat(&w(p.0), &w(p.1))));
            for q in &pairs[i + 1..] {
                let cross = x.member(&concat(&w(p.0), &w(q.1))) && x.member(&concat(&w(q.0), &w(p.1)));
                assert!(!cross);
            }
        }
    }

    #[test]
    fn minimal_nfas_of_small_languages() {
        let x = l("a+aa");
        let (n, c) = minimal_nfa(&x, GRID_CAP).unwrap();
        assert_eq!(n.num_states(), 3);
        assert_eq!(n.language(), x);
        assert!(c.is_legitimate());
        assert!(brute_force_nfa(&x, 2).is_none());
        assert!(brute_force_nfa(&x, 1).is_none());
        let y = l("a(b+c)+b(a+c)+c(a+b)");
        let (n, _) = minimal_nfa(&y, GRID_CAP).unwrap();
        assert_eq!(n.num_states(), 5);
        assert_eq!(n.language(), y);
    }

    #[test]
    fn minimal_nfas_agree_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = Alphabet::from_str("a").unwrap();
        for _ in 0..20 {
            let x = Language::random(&mut rng, &a, 3);
            let (n, _) = minimal_nfa(&x, GRID_CAP).unwrap();
            assert_eq!(n.language(), x);
            let k = n.num_states();
            if k > 0 {
                assert!(brute_force_nfa(&x, k - 1).is_none(), "{}", x.describe());
            }
            if k <= 3 {
                assert!(brute_force_nfa(&x, k).is_some());
            }
        }
    }

    #[test]
    fn atomizer_coverings() {
        let x = l("a+aa");
        let rfsa = canonical_rfsa(&x);
        let c = covering_of_extension(&full_subset(&rfsa)).unwrap();
        assert!(c.is_legitimate());
        let m = covering_of_extension(&jsl_dfa_min(&x)).unwrap();
        assert_eq!(m.num_states(), rfsa.num_states());
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..40 {
            let n = Nfa::random(&mut rng, &ab(), 3, 0.35);
            covering_of_extension(&full_subset(&n)).unwrap();
        }
    }
}

//! Finite relations between labelled sets, viewed as objects and morphisms of
//! the category of relations whose morphisms factor through both endpoints.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::bits::{self, Bits};
use crate::error::{Error, Result};

/// An ordered set of distinct labels.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FinSet {
    labels: Arc<Vec<String>>,
}

impl FinSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(FinSet { labels: Arc::new(labels) })
    }

    /// `{0, .., n-1}` labelled by decimal numerals.
    pub fn range(n: usize) -> Self {
        Self::prefixed("", n)
    }

    pub fn prefixed(prefix: &str, n: usize) -> Self {
        FinSet { labels: Arc::new((0..n).map(|i| format!("{prefix}{i}")).collect()) }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn fmt_subset(&self, s: &Bits) -> String {
        bits::fmt_set(&self.labels, s)
    }
}

/// A relation `R ⊆ src × dst`, stored as one bit row per source element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FinRel {
    src: FinSet,
    dst: FinSet,
    rows: Vec<Bits>,
}

impl FinRel {
    pub fn empty(src: FinSet, dst: FinSet) -> Self {
        let rows = vec![bits::empty(dst.len()); src.len()];
        FinRel { src, dst, rows }
    }

    pub fn from_rows(src: FinSet, dst: FinSet, rows: Vec<Bits>) -> Result<Self> {
        if rows.len() != src.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} sources",
                rows.len(),
                src.len()
            )));
        }
        let mut rows = rows;
        for r in &mut rows {
            if r.ones().any(|j| j >= dst.len()) {
                return Err(Error::DimensionMismatch("row entry beyond target size".into()));
            }
            r.grow(dst.len());
        }
        Ok(FinRel { src, dst, rows })
    }

    pub fn from_fn(src: FinSet, dst: FinSet, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let (n, m) = (src.len(), dst.len());
        let rows = (0..n).map(|i| bits::from_iter(m, (0..m).filter(|&j| f(i, j)))).collect();
        FinRel { src, dst, rows }
    }

    pub fn from_pairs(src: FinSet, dst: FinSet, pairs: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(src, dst);
        for &(i, j) in pairs {
            r.rows[i].insert(j);
        }
        r
    }

    /// Relation between `{0..n}` and `{0..m}` from a row-major 0/1 matrix.
    pub fn from_matrix(matrix: &[Vec<bool>], cols: usize) -> Self {
        Self::from_fn(FinSet::range(matrix.len()), FinSet::range(cols), |i, j| matrix[i][j])
    }

    pub fn identity(x: &FinSet) -> Self {
        Self::from_fn(x.clone(), x.clone(), |i, j| i == j)
    }

    pub fn full(src: FinSet, dst: FinSet) -> Self {
        Self::from_fn(src, dst, |_, _| true)
    }

    pub fn src(&self) -> &FinSet {
        &self.src
    }

    pub fn dst(&self) -> &FinSet {
        &self.dst
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Bits {
        &self.rows[i]
    }

    /// `{x : R(x, j)}`.
    pub fn col(&self, j: usize) -> Bits {
        bits::from_iter(self.src.len(), (0..self.src.len()).filter(|&i| self.rows[i].contains(j)))
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.ones().map(move |j| (i, j))).collect()
    }

    /// Same relation with relabelled endpoints of equal size.
    pub fn relabel(&self, src: FinSet, dst: FinSet) -> Result<Self> {
        if src.len() != self.src.len() || dst.len() != self.dst.len() {
            return Err(Error::DimensionMismatch("relabel with different sizes".into()));
        }
        Ok(FinRel { src, dst, rows: self.rows.clone() })
    }

    pub fn compose(&self, other: &FinRel) -> Result<FinRel> {
        if self.dst.len() != other.src.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.src.len(),
                self.dst.len(),
                other.src.len(),
                other.dst.len()
            )));
        }
        let rows = self.rows.iter().map(|r| other.image(r)).collect();
        Ok(FinRel { src: self.src.clone(), dst: other.dst.clone(), rows })
    }

    pub fn converse(&self) -> FinRel {
        let rows = (0..self.dst.len()).map(|j| self.col(j)).collect();
        FinRel { src: self.dst.clone(), dst: self.src.clone(), rows }
    }

    pub fn union(&self, other: &FinRel) -> FinRel {
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| bits::union(a, b)).collect();
        FinRel { src: self.src.clone(), dst: self.dst.clone(), rows }
    }

    pub fn is_subset(&self, other: &FinRel) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    /// Same edges regardless of labels.
    pub fn same_edges(&self, other: &FinRel) -> bool {
        self.src.len() == other.src.len() && self.dst.len() == other.dst.len() && self.rows == other.rows
    }

    /// `R[X]`.
    pub fn image(&self, x: &Bits) -> Bits {
        let mut out = bits::empty(self.dst.len());
        for i in x.ones() {
            out.union_with(&self.rows[i]);
        }
        out
    }

    pub fn up(&self, x: &Bits) -> Bits {
        self.image(x)
    }

    /// `{x : R[x] ⊆ Y}`.
    pub fn down(&self, y: &Bits) -> Bits {
        bits::from_iter(self.src.len(), (0..self.src.len()).filter(|&i| self.rows[i].is_subset(y)))
    }

    pub fn closure(&self, x: &Bits) -> Bits {
        self.down(&self.up(x))
    }

    pub fn interior(&self, y: &Bits) -> Bits {
        self.up(&self.down(y))
    }

    /// All `R[X]`, sorted by size and then members.
    pub fn open_sets(&self) -> Vec<Bits> {
        bits::union_closure(self.dst.len(), &self.rows)
    }

    /// All `down(up(X))`, equivalently `down(Y)` over open `Y`.
    pub fn closed_sets(&self) -> Vec<Bits> {
        let mut out: Vec<Bits> = self.open_sets().iter().map(|o| self.down(o)).collect();
        out.sort_by_cached_key(bits::size_lex_key);
        out.dedup();
        out
    }

    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> FinRel {
        let src = FinSet { labels: Arc::new(rows.iter().map(|&i| self.src.label(i).to_string()).collect()) };
        let dst = FinSet { labels: Arc::new(cols.iter().map(|&j| self.dst.label(j).to_string()).collect()) };
        FinRel::from_fn(src, dst, |a, b| self.get(rows[a], cols[b]))
    }

    /// Maximal bicliques `A × B ⊆ R` with both sides nonempty, ordered by
    /// extent then intent. Fails once more than `cap` are found.
    pub fn maximal_bicliques(&self, cap: usize) -> Result<Vec<(Bits, Bits)>> {
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut intents: Vec<Bits> = Vec::new();
        for r in &self.rows {
            if !r.is_clear() && seen.insert(r.clone()) {
                intents.push(r.clone());
            }
        }
        let mut i = 0;
        while i < intents.len() {
            for r in &self.rows {
                let b = bits::intersection(&intents[i], r);
                if !b.is_clear() && seen.insert(b.clone()) {
                    intents.push(b);
                }
            }
            if intents.len() > cap {
                return Err(Error::CapExceeded { what: "maximal bicliques".into(), cap });
            }
            i += 1;
        }
        let mut out: Vec<(Bits, Bits)> = intents
            .into_iter()
            .map(|b| {
                let a = bits::from_iter(self.src.len(), (0..self.src.len()).filter(|&x| b.is_subset(&self.rows[x])));
                (a, b)
            })
            .collect();
        out.sort_by_cached_key(|(a, b)| (bits::size_lex_key(a), bits::size_lex_key(b)));
        Ok(out)
    }

    /// Size of a fooling set found greedily: a lower bound on the dimension.
    pub fn fooling_lower_bound(&self) -> usize {
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        for (i, j) in self.edges() {
            if chosen.iter().all(|&(k, l)| !(self.get(i, l) && self.get(k, j))) {
                chosen.push((i, j));
            }
        }
        chosen.len()
    }

    /// Bipartite dimension: the least number of bicliques covering every edge.
    pub fn bipartite_dimension(&self, cap: usize) -> Result<usize> {
        Ok(self.minimum_biclique_cover(cap)?.len())
    }

    /// A minimum cover by maximal bicliques (indices into `maximal_bicliques`).
    pub fn minimum_biclique_cover(&self, cap: usize) -> Result<Vec<usize>> {
        let bicliques = self.maximal_bicliques(cap)?;
        let edges = self.edges();
        if edges.is_empty() {
            return Ok(Vec::new());
        }
        // covers[e] = bicliques containing edge e
        let covers: Vec<Vec<usize>> = edges
            .iter()
            .map(|&(i, j)| {
                (0..bicliques.len())
                    .filter(|&k| bicliques[k].0.contains(i) && bicliques[k].1.contains(j))
                    .collect()
            })
            .collect();
        let edge_sets: Vec<Bits> = (0..bicliques.len())
            .map(|k| bits::from_iter(edges.len(), (0..edges.len()).filter(|&e| covers[e].contains(&k))))
            .collect();
        let lower = self.fooling_lower_bound().max(1);
        for k in lower..=bicliques.len() {
            let mut chosen = Vec::new();
            if cover_search(&edge_sets, &covers, bits::empty(edges.len()), k, &mut chosen) {
                chosen.sort_unstable();
                return Ok(chosen);
            }
        }
        unreachable!("the maximal bicliques always cover every edge")
    }

    /// `Pirr(Open R)` together with the isomorphism `red_R : R → Pirr(Open R)`.
    pub fn reduce(&self) -> (FinRel, DepMor) {
        let s = crate::jsl::Jsl::open_of(self);
        let pirr = s.pirr();
        let m_elems: Vec<&Bits> = s.meet_irreducibles().iter().map(|&m| s.element(m)).collect();
        let red = FinRel::from_fn(self.src.clone(), pirr.dst.clone(), |x, m| !self.rows[x].is_subset(m_elems[m]));
        let mor = DepMor::new(red, self.clone(), pirr.clone()).expect("red is always a Dep morphism");
        (pirr, mor)
    }

    /// Inverse of the reduction iso: `Pirr(Open R) → R`, `(X, t) ↦ t ∈ X`.
    pub fn reduce_inverse(&self) -> DepMor {
        let s = crate::jsl::Jsl::open_of(self);
        let pirr = s.pirr();
        let j_elems: Vec<&Bits> = s.join_irreducibles().iter().map(|&j| s.element(j)).collect();
        let rel = FinRel::from_fn(pirr.src.clone(), self.dst.clone(), |j, t| j_elems[j].contains(t));
        DepMor::new(rel, pirr, self.clone()).expect("red inverse is always a Dep morphism")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.src.len(), self.dst.len());
        for r in &self.rows {
            let line: String = (0..self.dst.len()).map(|j| if r.contains(j) { '1' } else { '0' }).collect();
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    /// Parses `rows cols` followed by a 0/1 matrix (whitespace between cells is ignored).
    pub fn from_text(text: &str) -> Result<FinRel> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty relation text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimension `{t}`"))))
            .collect::<Result<_>>()?;
        let [n, m] = dims[..] else {
            return Err(Error::Parse("header must be `rows cols`".into()));
        };
        let mut matrix = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse("missing matrix row".into()))?;
            let row: Vec<bool> = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Parse(format!("bad cell `{c}`"))),
                })
                .collect::<Result<_>>()?;
            if row.len() != m {
                return Err(Error::Parse(format!("row has {} cells, expected {m}", row.len())));
            }
            matrix.push(row);
        }
        Ok(FinRel::from_matrix(&matrix, m))
    }

    /// DOT rendering as an undirected bipartite graph.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph rel {\n  rankdir=LR;\n");
        for (i, l) in self.src.labels().iter().enumerate() {
            let _ = writeln!(s, "  s{i} [label=\"{l}\"];");
        }
        for (j, l) in self.dst.labels().iter().enumerate() {
            let _ = writeln!(s, "  t{j} [label=\"{l}\", shape=box];");
        }
        for (i, j) in self.edges() {
            let _ = writeln!(s, "  s{i} -- t{j};");
        }
        s.push_str("}\n");
        s
    }
}

fn cover_search(edge_sets: &[Bits], covers: &[Vec<usize>], covered: Bits, k: usize, chosen: &mut Vec<usize>) -> bool {
    let Some(e) = (0..covers.len()).find(|&e| !covered.contains(e)) else {
        return true;
    };
    if k == 0 {
        return false;
    }
    for &b in &covers[e] {
        chosen.push(b);
        if cover_search(edge_sets, covers, bits::union(&covered, &edge_sets[b]), k - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Lower and upper components of `R : G → H`:
/// `lower(g, h) ⟺ H[h] ⊆ R[g]` and `upper(h', g') ⟺ Ğ[g'] ⊆ Ř[h']`.
pub fn components(rel: &FinRel, dom: &FinRel, cod: &FinRel) -> (FinRel, FinRel) {
    let lower = FinRel::from_fn(dom.src.clone(), cod.src.clone(), |g, h| cod.rows[h].is_subset(&rel.rows[g]));
    let rel_conv = rel.converse();
    let dom_conv = dom.converse();
    let upper = FinRel::from_fn(cod.dst.clone(), dom.dst.clone(), |h, g| dom_conv.rows[g].is_subset(&rel_conv.rows[h]));
    (lower, upper)
}

/// A validated morphism `rel : dom → cod` with its maximum witnesses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DepMor {
    rel: FinRel,
    dom: FinRel,
    cod: FinRel,
    lower: FinRel,
    upper: FinRel,
}

impl DepMor {
    pub fn new(rel: FinRel, dom: FinRel, cod: FinRel) -> Result<Self> {
        if rel.src.len() != dom.src.len() || rel.dst.len() != cod.dst.len() {
            return Err(Error::DimensionMismatch("morphism must lie in dom.src × cod.dst".into()));
        }
        let (lower, upper) = components(&rel, &dom, &cod);
        if !lower.compose(&cod)?.same_edges(&rel) {
            return Err(Error::NotADepMorphism("relation does not factor through the codomain".into()));
        }
        if !dom.compose(&upper.converse())?.same_edges(&rel) {
            return Err(Error::NotADepMorphism("relation does not factor through the domain".into()));
        }
        Ok(DepMor { rel, dom, cod, lower, upper })
    }

    pub fn identity(g: &FinRel) -> Self {
        Self::new(g.clone(), g.clone(), g.clone()).expect("identity is a morphism")
    }

    pub fn rel(&self) -> &FinRel {
        &self.rel
    }
    pub fn dom(&self) -> &FinRel {
        &self.dom
    }
    pub fn cod(&self) -> &FinRel {
        &self.cod
    }
    pub fn lower(&self) -> &FinRel {
        &self.lower
    }
    pub fn upper(&self) -> &FinRel {
        &self.upper
    }

    /// Composite `self ; other`. Every formula for the composite is
    /// evaluated and they must all agree.
    pub fn then(&self, other: &DepMor) -> Result<DepMor> {
        if !self.cod.same_edges(&other.dom) {
            return Err(Error::DimensionMismatch("codomain and domain differ".into()));
        }
        let h = &self.cod;
        let candidates = [
            self.lower.compose(&other.lower)?.compose(&other.cod)?,
            self.lower.compose(&other.rel)?,
            self.lower.compose(h)?.compose(&other.upper.converse())?,
            self.rel.compose(&other.upper.converse())?,
            self.dom.compose(&self.upper.converse())?.compose(&other.upper.converse())?,
        ];
        for c in &candidates[1..] {
            if !c.same_edges(&candidates[0]) {
                return Err(Error::CheckFailed("composition formulas disagree".into()));
            }
        }
        DepMor::new(candidates[0].clone(), self.dom.clone(), other.cod.clone())
    }

    /// The self-duality: `R : G → H` becomes `Ř : Ȟ → Ğ`.
    pub fn dual(&self) -> DepMor {
        DepMor::new(self.rel.converse(), self.cod.converse(), self.dom.converse())
            .expect("converse of a morphism is a morphism between converses")
    }
}

//! Small helpers over `FixedBitSet`, the subset type used throughout.

use fixedbitset::FixedBitSet;

pub type Bits = FixedBitSet;

/// Empty subset of a universe of size `n`.
pub fn empty(n: usize) -> Bits {
    FixedBitSet::with_capacity(n)
}

/// The whole universe of size `n`.
pub fn full(n: usize) -> Bits {
    let mut b = FixedBitSet::with_capacity(n);
    b.insert_range(..);
    b
}

pub fn from_iter<I: IntoIterator<Item = usize>>(n: usize, items: I) -> Bits {
    let mut b = FixedBitSet::with_capacity(n);
    for i in items {
        b.insert(i);
    }
    b
}

pub fn singleton(n: usize, i: usize) -> Bits {
    from_iter(n, [i])
}

pub fn union(a: &Bits, b: &Bits) -> Bits {
    let mut c = a.clone();
    c.union_with(b);
    c
}

pub fn intersection(a: &Bits, b: &Bits) -> Bits {
    let mut c = a.clone();
    c.intersect_with(b);
    c
}

pub fn difference(a: &Bits, b: &Bits) -> Bits {
    let mut c = a.clone();
    c.difference_with(b);
    c
}

pub fn complement(a: &Bits) -> Bits {
    let mut c = a.clone();
    c.toggle_range(..);
    c
}

pub fn is_empty(a: &Bits) -> bool {
    a.is_clear()
}

pub fn to_vec(a: &Bits) -> Vec<usize> {
    a.ones().collect()
}

/// Sort key: cardinality first, then the sorted member list.
pub fn size_lex_key(a: &Bits) -> (usize, Vec<usize>) {
    (a.count_ones(..), a.ones().collect())
}

/// Renders a subset as `{x,y}` using the given labels.
pub fn fmt_set<S: AsRef<str>>(labels: &[S], a: &Bits) -> String {
    let parts: Vec<&str> = a.ones().map(|i| labels[i].as_ref()).collect();
    format!("{{{}}}", parts.join(","))
}

/// All subsets of an `n`-element universe, in binary counting order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = Bits> {
    assert!(n < usize::BITS as usize, "universe too large to enumerate");
    (0usize..(1usize << n)).map(move |m| from_iter(n, (0..n).filter(|i| m >> i & 1 == 1)))
}

/// Closes a list of subsets under binary union and adds the empty set.
/// The result is deduplicated and sorted by `size_lex_key`.
pub fn union_closure(n: usize, gens: &[Bits]) -> Vec<Bits> {
    use std::collections::HashSet;
    let mut seen: HashSet<Bits> = HashSet::new();
    let mut out: Vec<Bits> = Vec::new();
    let e = empty(n);
    seen.insert(e.clone());
    out.push(e);
    let mut distinct_gens: Vec<Bits> = Vec::new();
    for g in gens {
        if seen.insert(g.clone()) {
            out.push(g.clone());
            distinct_gens.push(g.clone());
        }
    }
    let mut i = 0;
    while i < out.len() {
        for g in &distinct_gens {
            let u = union(&out[i], g);
            if seen.insert(u.clone()) {
                out.push(u);
            }
        }
        i += 1;
    }
    out.sort_by_cached_key(size_lex_key);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_closure_of_singletons_is_powerset() {
        let gens: Vec<Bits> = (0..3).map(|i| singleton(3, i)).collect();
        let fam = union_closure(3, &gens);
        assert_eq!(fam.len(), 8);
        assert!(fam[0].is_clear());
        assert_eq!(fam[7], full(3));
    }

    #[test]
    fn complement_round_trip() {
        let a = from_iter(5, [0, 3]);
        assert_eq!(complement(&complement(&a)), a);
        assert_eq!(to_vec(&complement(&a)), vec![1, 2, 4]);
    }
}

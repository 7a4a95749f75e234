//! The complex `ΔS` on `Δ₀S = S ⊔ 2^S`, its top chains and their signs.
//!
//! Ground sets are finite sets of integers below 64; subsets are bitmasks.
//! `Δ(l)` is `ΔS` for `S = [l−1] = {0, …, l−1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// A finite totally ordered ground set, stored as a bitmask of its elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ground(u64);

impl Ground {
    /// `[l−1] = {0, …, l−1}`.
    pub fn standard(l: usize) -> Ground {
        assert!(l <= 63, "ground sets live below 64");
        Ground((1u64 << l) - 1)
    }

    pub fn from_elements(elements: &[u32]) -> Result<Ground> {
        let mut mask = 0u64;
        for &s in elements {
            if s >= 63 {
                return Err(Error::IndexOutOfRange { index: s as usize, len: 63 });
            }
            mask |= 1 << s;
        }
        Ok(Ground(mask))
    }

    /// `S ∖ {s}`.
    pub fn without(self, s: u32) -> Ground {
        Ground(self.0 & !(1u64 << s))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn elements(self) -> Vec<u32> {
        elements_of(self.0)
    }
}

fn elements_of(mask: u64) -> Vec<u32> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeltaVertex {
    Element(u32),
    Set(u64),
}

impl DeltaVertex {
    pub fn set(elements: &[u32]) -> DeltaVertex {
        DeltaVertex::Set(elements.iter().fold(0, |m, &s| m | 1 << s))
    }

    /// `|c|`: `0` on elements, the cardinality on sets.
    pub fn level(self) -> usize {
        match self {
            DeltaVertex::Element(_) => 0,
            DeltaVertex::Set(c) => c.count_ones() as usize,
        }
    }

    pub fn map(self, f: impl Fn(u32) -> u32) -> DeltaVertex {
        match self {
            DeltaVertex::Element(s) => DeltaVertex::Element(f(s)),
            DeltaVertex::Set(c) => DeltaVertex::Set(elements_of(c).into_iter().fold(0, |m, s| m | 1 << f(s))),
        }
    }

    fn within(self, ground: Ground) -> bool {
        match self {
            DeltaVertex::Element(s) => s < 64 && ground.0 >> s & 1 == 1,
            DeltaVertex::Set(c) => c & !ground.0 == 0,
        }
    }
}

/// Enumeration order: elements by value, then sets by cardinality and then
/// lexicographically on their sorted elements.
impl Ord for DeltaVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DeltaVertex::Element(a), DeltaVertex::Element(b)) => a.cmp(b),
            (DeltaVertex::Element(_), DeltaVertex::Set(_)) => Ordering::Less,
            (DeltaVertex::Set(_), DeltaVertex::Element(_)) => Ordering::Greater,
            (DeltaVertex::Set(a), DeltaVertex::Set(b)) => a.count_ones().cmp(&b.count_ones()).then_with(|| elements_of(*a).cmp(&elements_of(*b))),
        }
    }
}

impl PartialOrd for DeltaVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DeltaVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaVertex::Element(s) => write!(f, "{s}"),
            DeltaVertex::Set(0) => f.write_str("∅"),
            DeltaVertex::Set(c) => {
                f.write_str("{")?;
                for (i, s) in elements_of(*c).iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// The relation `<` on `Δ₀S`. Not transitive.
pub fn less(a: DeltaVertex, b: DeltaVertex) -> bool {
    match (a, b) {
        (DeltaVertex::Element(s), DeltaVertex::Element(t)) => s < t,
        (DeltaVertex::Set(c), DeltaVertex::Set(d)) => c != d && c & !d == 0,
        (DeltaVertex::Element(s), DeltaVertex::Set(c)) => s < 64 && c >> s & 1 == 1,
        (DeltaVertex::Set(_), DeltaVertex::Element(_)) => false,
    }
}

/// `Δ₀S = S ⊔ 2^S` in enumeration order.
pub fn vertices(ground: Ground) -> Vec<DeltaVertex> {
    let mut out: Vec<DeltaVertex> = ground.elements().into_iter().map(DeltaVertex::Element).collect();
    let mut sets: Vec<DeltaVertex> = subsets(ground.0).map(DeltaVertex::Set).collect();
    sets.sort();
    out.extend(sets);
    out
}

fn subsets(mask: u64) -> impl Iterator<Item = u64> {
    // Iterates all submasks, including 0 and `mask` itself.
    let mut next = Some(mask);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// `Δ₀S_m = {c : |c| ≤ m}`.
pub fn filtration(ground: Ground, m: usize) -> Vec<DeltaVertex> {
    vertices(ground).into_iter().filter(|v| v.level() <= m).collect()
}

/// Positions of `Δ₀S_m` inside `Δ₀S_{m+1}`: the coordinates kept by `π_m`.
pub fn pi_indices(ground: Ground, m: usize) -> Vec<usize> {
    restriction_indices(&filtration(ground, m + 1), &filtration(ground, m))
}

/// Positions of `Δ₀T_m` inside `Δ₀S_m` for `T ⊂ S`: the coordinates kept by `η_{T⊂S}`.
pub fn eta_indices(sub: Ground, ground: Ground, m: usize) -> Result<Vec<usize>> {
    if sub.0 & !ground.0 != 0 {
        return Err(Error::HypothesisViolated("T must be a subset of S"));
    }
    Ok(restriction_indices(&filtration(ground, m), &filtration(sub, m)))
}

fn restriction_indices(big: &[DeltaVertex], small: &[DeltaVertex]) -> Vec<usize> {
    small.iter().map(|v| big.binary_search(v).expect("sub-filtration")).collect()
}

/// A chain `C_0 < C_1 < ⋯ < C_m`, comparable in every pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    vertices: Vec<DeltaVertex>,
}

impl Chain {
    pub fn new(vertices: Vec<DeltaVertex>) -> Result<Chain> {
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                if !less(a, b) {
                    return Err(Error::HypothesisViolated("chain vertices must be pairwise increasing"));
                }
            }
        }
        Ok(Chain { vertices })
    }

    pub fn vertices(&self) -> &[DeltaVertex] {
        &self.vertices
    }

    /// `m` for an `m`-chain.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `δ_i`: deletes the `i`-th vertex.
    pub fn face(&self, i: usize) -> Result<Chain> {
        if i >= self.vertices.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.vertices.len(),
            });
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        Ok(Chain { vertices })
    }

    pub fn map(&self, f: impl Fn(u32) -> u32) -> Chain {
        Chain {
            vertices: self.vertices.iter().map(|v| v.map(&f)).collect(),
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str("<")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// `Δ_m S` in lexicographic order.
pub fn chains(ground: Ground, m: usize) -> Vec<Chain> {
    let verts = vertices(ground);
    let mut out = Vec::new();
    let mut stack: Vec<DeltaVertex> = Vec::with_capacity(m + 1);
    extend_chains(&verts, m + 1, &mut stack, &mut out);
    out.sort();
    out
}

fn extend_chains(verts: &[DeltaVertex], len: usize, stack: &mut Vec<DeltaVertex>, out: &mut Vec<Chain>) {
    if stack.len() == len {
        out.push(Chain { vertices: stack.clone() });
        return;
    }
    for &v in verts {
        if stack.iter().all(|&a| less(a, v)) {
            stack.push(v);
            extend_chains(verts, len, stack, out);
            stack.pop();
        }
    }
}

/// Top chains `Δ_{|S|} S`.
pub fn top_chains(ground: Ground) -> Vec<Chain> {
    chains(ground, ground.len())
}

/// A top chain in normal form `(s_0 < ⋯ < s_k < C_{k+1} < ⋯ < C_l)`, where
/// `C_{k+1} = {s_0, …, s_k}` and `C_{i+1} ∖ C_i = {s_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    /// `k + 1`, the number of element vertices.
    pub elements: usize,
    /// `s_0, …, s_{l−1}`: a reordering of `S`.
    pub sequence: Vec<u32>,
}

pub fn normal_form(ground: Ground, c: &Chain) -> Result<NormalForm> {
    let l = ground.len();
    if c.vertices.len() != l + 1 || !c.vertices.iter().all(|v| v.within(ground)) {
        return Err(Error::NotATopChain);
    }
    let a = c.vertices.iter().take_while(|v| matches!(v, DeltaVertex::Element(_))).count();
    let mut sequence: Vec<u32> = c.vertices[..a]
        .iter()
        .map(|v| match v {
            DeltaVertex::Element(s) => *s,
            DeltaVertex::Set(_) => unreachable!(),
        })
        .collect();
    let sets: Vec<u64> = c.vertices[a..]
        .iter()
        .map(|v| match v {
            DeltaVertex::Set(m) => Ok(*m),
            DeltaVertex::Element(_) => Err(Error::NotATopChain),
        })
        .collect::<Result<_>>()?;
    let first = sequence.iter().fold(0u64, |m, &s| m | 1 << s);
    if sets.first() != Some(&first) || sets.last() != Some(&ground.0) {
        return Err(Error::NotATopChain);
    }
    for w in sets.windows(2) {
        let diff = w[1] & !w[0];
        if w[0] & !w[1] != 0 || diff.count_ones() != 1 {
            return Err(Error::NotATopChain);
        }
        sequence.push(diff.trailing_zeros());
    }
    Ok(NormalForm { elements: a, sequence })
}

fn chain_from_normal_form(elements: usize, sequence: &[u32]) -> Chain {
    let mut vertices: Vec<DeltaVertex> = sequence[..elements].iter().map(|&s| DeltaVertex::Element(s)).collect();
    let mut mask = sequence[..elements].iter().fold(0u64, |m, &s| m | 1 << s);
    vertices.push(DeltaVertex::Set(mask));
    for &s in &sequence[elements..] {
        mask |= 1 << s;
        vertices.push(DeltaVertex::Set(mask));
    }
    Chain { vertices }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Opposite {
    pub chain: Chain,
    /// `m` with `δ_j(C) = δ_m(C')`.
    pub index: usize,
    /// `op_j(C) = C'_m`.
    pub vertex: DeltaVertex,
}

/// The other top chain sharing the face `δ_j(C)`, for `j ∈ [l−1]`.
pub fn opposite(ground: Ground, c: &Chain, j: usize) -> Result<Opposite> {
    let nf = normal_form(ground, c)?;
    let l = ground.len();
    if j >= l {
        return Err(Error::IndexOutOfRange { index: j, len: l });
    }
    let k1 = nf.elements; // k + 1
    let s = &nf.sequence;
    let chain = if j < k1 {
        // Drop s_j from the elements; C_{k+1} ∖ {s_j} becomes the new first set.
        let mut seq: Vec<u32> = s[..k1].iter().copied().filter(|&x| x != s[j]).collect();
        seq.push(s[j]);
        seq.extend_from_slice(&s[k1..]);
        chain_from_normal_form(k1 - 1, &seq)
    } else if j == k1 {
        // s_{k+1} joins the elements, in its sorted position.
        let mut elems: Vec<u32> = s[..=k1].to_vec();
        elems.sort_unstable();
        elems.extend_from_slice(&s[k1 + 1..]);
        chain_from_normal_form(k1 + 1, &elems)
    } else {
        // Add s_j before s_{j−1}.
        let mut seq = s.clone();
        seq.swap(j - 1, j);
        chain_from_normal_form(k1, &seq)
    };
    let face = c.face(j)?;
    let index = (0..chain.vertices.len())
        .find(|&m| chain.face(m).ok().as_ref() == Some(&face))
        .expect("the opposite chain contains the face");
    let vertex = chain.vertices[index];
    Ok(Opposite { chain, index, vertex })
}

/// `St(C) = {C_l} ∪ ⋃_{i<l} {C_i, op_i(C)}`, listed as `C_0, op_0, C_1, op_1, …, C_l`.
pub fn star(ground: Ground, c: &Chain) -> Result<Vec<DeltaVertex>> {
    let l = ground.len();
    let mut out = Vec::with_capacity(2 * l + 1);
    for i in 0..l {
        out.push(c.vertices[i]);
        out.push(opposite(ground, c, i)?.vertex);
    }
    out.push(c.vertices[l]);
    Ok(out)
}

/// `St(B) = St(C) ∖ {S}` for the unique top `C` with `δ_l(C) = B`.
pub fn relative_star(ground: Ground, b: &Chain) -> Result<Vec<DeltaVertex>> {
    let mut vertices = b.vertices.clone();
    vertices.push(DeltaVertex::Set(ground.0));
    let c = Chain::new(vertices).map_err(|_| Error::NotATopChain)?;
    let mut st = star(ground, &c)?;
    st.pop();
    Ok(st)
}

/// A bijection of `[k] = {0, …, k}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || core::mem::replace(&mut seen[i], true) {
                return Err(Error::HypothesisViolated("not a bijection"));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    /// `±1` by cycle parity.
    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.0.len()];
        let mut transpositions = 0;
        for start in 0..self.0.len() {
            let mut i = start;
            let mut len = 0;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Acts on vertices of `Δ₀[k]` elementwise.
    pub fn act(&self, v: DeltaVertex) -> DeltaVertex {
        v.map(|s| self.0[s as usize] as u32)
    }
}

/// `φ(C) = (∅ < {s_0} < ⋯ < {s_0, …, s_{k−1}} < C_{k+1} < ⋯)`.
pub fn phi(ground: Ground, c: &Chain) -> Result<Chain> {
    let nf = normal_form(ground, c)?;
    Ok(chain_from_normal_form(0, &nf.sequence))
}

/// `α_C` for `C ∈ Φ` over `S = [l]`: the permutation with `α_C·C = (∅ < [0] < ⋯ < [l])`.
pub fn alpha(ground: Ground, c: &Chain) -> Result<Permutation> {
    let nf = normal_form(ground, c)?;
    if nf.elements != 0 || ground != Ground::standard(ground.len()) {
        return Err(Error::HypothesisViolated("alpha is defined on Φ over S = [l]"));
    }
    // The flag adds s_0, s_1, …; α sends s_i to i.
    Permutation::new(nf.sequence.iter().map(|&s| s as usize).collect()).map(|p| p.inverse())
}

/// `sgn(C) = (−1)^{k+1}·sgn(α_{φ(C)})`, for top chains over any ground set
/// (identified with `[l]` in order).
pub fn sgn(ground: Ground, c: &Chain) -> Result<i8> {
    let nf = normal_form(ground, c)?;
    let rank = |s: u32| (ground.0 & ((1u64 << s) - 1)).count_ones() as usize;
    let perm = Permutation::new(nf.sequence.iter().map(|&s| rank(s)).collect())?;
    let parity = if nf.elements % 2 == 0 { 1 } else { -1 };
    Ok(parity * perm.sign())
}

/// `x ↦ x` below `i`, `x ↦ x + 1` from `i` on: the order-preserving bijection
/// `[l−1] → [l] ∖ {i}`.
pub fn skip(i: u32) -> impl Fn(u32) -> u32 {
    move |x| if x < i { x } else { x + 1 }
}

/// `ι_i: Δ₀(l) → Δ₀(l+1)`, for `i ∈ [l]`.
pub fn iota(i: usize, l: usize, v: DeltaVertex) -> Result<DeltaVertex> {
    if i > l {
        return Err(Error::IndexOutOfRange { index: i, len: l + 1 });
    }
    if !v.within(Ground::standard(l)) {
        return Err(Error::HypothesisViolated("vertex outside Δ₀(l)"));
    }
    Ok(v.map(skip(i as u32)))
}

/// `ε_i: Δ₀(l)_m → Δ₀([l] ∖ {i})_m`, for `i ∈ [l]`.
pub fn epsilon(i: usize, l: usize, m: usize, v: DeltaVertex) -> Result<DeltaVertex> {
    if v.level() > m {
        return Err(Error::HypothesisViolated("vertex above filtration level"));
    }
    iota(i, l, v)
}

/// `ε_i⁻¹: Δ₀([l] ∖ {i})_m → Δ₀(l)_m`.
pub fn epsilon_inverse(i: usize, l: usize, m: usize, v: DeltaVertex) -> Result<DeltaVertex> {
    if i > l {
        return Err(Error::IndexOutOfRange { index: i, len: l + 1 });
    }
    if v.level() > m || !v.within(Ground::standard(l + 1).without(i as u32)) {
        return Err(Error::HypothesisViolated("vertex outside Δ₀([l] ∖ {i})_m"));
    }
    let i = i as u32;
    Ok(v.map(|x| if x < i { x } else { x - 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use DeltaVertex::{Element as E, Set};

    fn s(elements: &[u32]) -> DeltaVertex {
        DeltaVertex::set(elements)
    }

    fn ch(v: &[DeltaVertex]) -> Chain {
        Chain::new(v.to_vec()).unwrap()
    }

    #[test]
    fn vertex_sets() {
        assert_eq!(vertices(Ground::standard(1)), [E(0), Set(0), s(&[0])]);
        assert_eq!(vertices(Ground::standard(2)), [E(0), E(1), Set(0), s(&[0]), s(&[1]), s(&[0, 1])]);
        assert_eq!(vertices(Ground::standard(0)), [Set(0)]);
    }

    #[test]
    fn relation() {
        assert!(!less(E(1), s(&[0, 2])));
        assert!(less(s(&[0, 2]), s(&[0, 1, 2])));
        assert!(less(Set(0), s(&[0])));
        assert!(!less(s(&[0]), s(&[0])));
        assert!(!less(s(&[0]), E(0)));
        assert!(Chain::new(alloc::vec![E(0), E(1), E(2), s(&[0, 2])]).is_err());
    }

    #[test]
    fn chain_counts() {
        assert_eq!(chains(Ground::standard(1), 1), [ch(&[E(0), s(&[0])]), ch(&[Set(0), s(&[0])])]);
        let mut t = 1usize;
        for n in 1..=5 {
            t = n * t + 1;
            assert_eq!(top_chains(Ground::standard(n)).len(), t);
        }
        assert_eq!(top_chains(Ground::standard(2)).len(), 5);
    }

    #[test]
    fn faces() {
        let c = ch(&[E(0), E(2), s(&[0, 2]), s(&[0, 1, 2])]);
        assert_eq!(c.face(1).unwrap(), ch(&[E(0), s(&[0, 2]), s(&[0, 1, 2])]));
        assert!(c.face(4).is_err());
        assert_eq!(c.face(3).unwrap(), ch(&[E(0), E(2), s(&[0, 2])]));
    }

    #[test]
    fn face_identities() {
        for n in 0..=4 {
            for m in 1..=n {
                for c in chains(Ground::standard(n), m) {
                    for j in 0..=m {
                        for i in 0..j {
                            let lhs = c.face(j).unwrap().face(i).unwrap();
                            let rhs = c.face(i).unwrap().face(j - 1).unwrap();
                            assert_eq!(lhs, rhs);
                            Chain::new(lhs.vertices().to_vec()).unwrap();
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn opposites_and_stars() {
        let g = Ground::standard(3);
        let c = ch(&[E(0), s(&[0]), s(&[0, 1]), s(&[0, 1, 2])]);
        let ops: Vec<DeltaVertex> = (0..3).map(|j| opposite(g, &c, j).unwrap().vertex).collect();
        assert_eq!(ops, [Set(0), E(1), s(&[0, 2])]);
        assert_eq!(star(g, &c).unwrap(), [E(0), Set(0), s(&[0]), E(1), s(&[0, 1]), s(&[0, 2]), s(&[0, 1, 2])]);
        let b = ch(&[E(0), s(&[0]), s(&[0, 1])]);
        assert_eq!(relative_star(g, &b).unwrap(), [E(0), Set(0), s(&[0]), E(1), s(&[0, 1]), s(&[0, 2])]);

        let g2 = Ground::standard(2);
        let o = opposite(g2, &ch(&[E(0), E(1), s(&[0, 1])]), 1).unwrap();
        assert_eq!((o.chain, o.index), (ch(&[E(0), s(&[0]), s(&[0, 1])]), 1));
        let o = opposite(g2, &ch(&[E(0), s(&[0]), s(&[0, 1])]), 1).unwrap();
        assert_eq!((o.chain, o.index), (ch(&[E(0), E(1), s(&[0, 1])]), 1));

        let g1 = Ground::standard(1);
        assert_eq!(star(g1, &ch(&[Set(0), s(&[0])])).unwrap(), [Set(0), E(0), s(&[0])]);
    }

    /// Brute force: every codimension-one face of a top chain against all top chains.
    #[test]
    fn opposites_match_exhaustive_search() {
        for n in 1..=4 {
            let g = Ground::standard(n);
            let tops = top_chains(g);
            for c in &tops {
                assert_eq!(star(g, c).unwrap().len(), 2 * n + 1);
                for j in 0..=n {
                    let face = c.face(j).unwrap();
                    let cofaces: Vec<(&Chain, usize)> = tops
                        .iter()
                        .filter(|d| *d != c)
                        .filter_map(|d| (0..=n).find(|&m| d.face(m).unwrap() == face).map(|m| (d, m)))
                        .collect();
                    assert!(cofaces.len() <= 1);
                    if j == n {
                        assert!(cofaces.is_empty());
                        continue;
                    }
                    let o = opposite(g, c, j).unwrap();
                    assert_eq!(cofaces, [(&o.chain, o.index)]);
                    assert!(!less(c.vertices()[j], o.vertex) && !less(o.vertex, c.vertices()[j]));
                }
            }
        }
    }

    #[test]
    fn signs() {
        let g = Ground::standard(2);
        let cases = [
            (ch(&[E(0), E(1), s(&[0, 1])]), 1),
            (ch(&[E(0), s(&[0]), s(&[0, 1])]), -1),
            (ch(&[Set(0), s(&[0]), s(&[0, 1])]), 1),
            (ch(&[Set(0), s(&[1]), s(&[0, 1])]), -1),
            (ch(&[E(1), s(&[1]), s(&[0, 1])]), 1),
        ];
        for (c, sign) in cases {
            assert_eq!(sgn(g, &c).unwrap(), sign, "{c}");
        }
        let g = Ground::standard(1);
        assert_eq!(sgn(g, &ch(&[Set(0), s(&[0])])).unwrap(), 1);
        assert_eq!(sgn(g, &ch(&[E(0), s(&[0])])).unwrap(), -1);
    }

    #[test]
    fn sign_cancellation_on_shared_faces() {
        for n in 1..=5 {
            let g = Ground::standard(n);
            for c in top_chains(g) {
                for j in 0..n {
                    let o = opposite(g, &c, j).unwrap();
                    let lhs = (1 - 2 * (j as i8 % 2)) * sgn(g, &c).unwrap();
                    let rhs = (1 - 2 * (o.index as i8 % 2)) * sgn(g, &o.chain).unwrap();
                    assert_eq!(lhs + rhs, 0);
                }
            }
        }
    }

    #[test]
    fn symmetric_group_acts_simply_transitively_on_phi() {
        let mut fact = 1;
        for l in 0..=3usize {
            fact *= l + 1;
            let g = Ground::standard(l + 1);
            let flags: Vec<Chain> = top_chains(g).into_iter().filter(|c| c.vertices()[0] == Set(0)).collect();
            assert_eq!(flags.len(), fact);
            let standard = chain_from_normal_form(0, &(0..=l as u32).collect::<Vec<_>>());
            for c in &flags {
                let a = alpha(g, c).unwrap();
                let moved = Chain::new(c.vertices().iter().map(|&v| a.act(v)).collect()).unwrap();
                assert_eq!(moved, standard);
                assert_eq!(phi(g, c).unwrap(), *c);
            }
            let alphas: alloc::collections::BTreeSet<Permutation> = flags.iter().map(|c| alpha(g, c).unwrap()).collect();
            assert_eq!(alphas.len(), fact);
        }
    }

    #[test]
    fn vertex_maps() {
        assert_eq!(iota(0, 1, E(0)).unwrap(), E(1));
        assert_eq!(iota(0, 1, Set(0)).unwrap(), Set(0));
        assert_eq!(iota(0, 1, s(&[0])).unwrap(), s(&[1]));
        assert_eq!(filtration(Ground::standard(2), 1), [E(0), E(1), Set(0), s(&[0]), s(&[1])]);
        for l in 0..=4 {
            let verts = vertices(Ground::standard(l));
            for i in 0..=l {
                for &a in &verts {
                    for &b in &verts {
                        if less(a, b) {
                            assert!(less(iota(i, l, a).unwrap(), iota(i, l, b).unwrap()));
                        }
                    }
                    let m = a.level();
                    let e = epsilon(i, l, m, a).unwrap();
                    assert_eq!(e.level(), m);
                    assert_eq!(epsilon_inverse(i, l, m, e).unwrap(), a);
                }
            }
        }
        assert!(iota(3, 2, E(0)).is_err());
    }

    #[test]
    fn projections() {
        let g = Ground::standard(2);
        let idx = pi_indices(g, 0);
        let big = filtration(g, 1);
        let small = filtration(g, 0);
        assert_eq!(idx.iter().map(|&i| big[i]).collect::<Vec<_>>(), small);
        let t = Ground::from_elements(&[1]).unwrap();
        let idx = eta_indices(t, g, 1).unwrap();
        assert_eq!(idx.iter().map(|&i| big[i]).collect::<Vec<_>>(), [E(1), Set(0), s(&[1])]);
    }

    #[test]
    fn permutations() {
        let p = Permutation::new(alloc::vec![1, 2, 0]).unwrap();
        assert_eq!(p.sign(), 1);
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(3));
        assert_eq!(Permutation::new(alloc::vec![1, 0, 2]).unwrap().sign(), -1);
        assert!(Permutation::new(alloc::vec![0, 0]).is_err());
    }
}

//! The subdivision identity `β^{l+1}∘d^l + Σ_j (−1)^j ∂^j∘β^l = ∂^∅`, checked
//! as an equality of formal sums of label tuples.
//!
//! A function `f` on `X̄_m` is never evaluated. A term `c·f(t_{c_0}, …, t_{c_m})`
//! is recorded as the tuple `(c_0, …, c_m)` with integer coefficient `c`.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::delta::{chains, opposite, sgn, skip, top_chains, Chain, DeltaVertex, Ground};

pub type LabelTuple = Vec<DeltaVertex>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<LabelTuple, i64>,
}

impl FormalSum {
    pub fn new() -> FormalSum {
        FormalSum::default()
    }

    pub fn add(&mut self, tuple: LabelTuple, coefficient: i64) {
        if coefficient == 0 {
            return;
        }
        match self.terms.entry(tuple) {
            Entry::Vacant(e) => {
                e.insert(coefficient);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coefficient;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn add_sum(&mut self, other: &FormalSum, scale: i64) {
        for (t, &c) in &other.terms {
            self.add(t.clone(), scale * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, tuple: &[DeltaVertex]) -> i64 {
        self.terms.get(tuple).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LabelTuple, i64)> {
        self.terms.iter().map(|(t, &c)| (t, c))
    }
}

/// The terms of `β^{l+1}`: `(sgn(C), C)` for `C ∈ Δ_{l+1}(l+1)`, for `l ≥ −1`.
pub fn expand_beta(l: isize) -> Vec<(i8, Chain)> {
    expand_beta_with(l, &standard_sign)
}

/// `β^{l+1}` with the sign of each top chain supplied by `s`.
pub fn expand_beta_with(l: isize, s: &impl Fn(Ground, &Chain) -> i8) -> Vec<(i8, Chain)> {
    assert!(l >= -1, "β is defined from l = −1 on");
    let g = Ground::standard((l + 1) as usize);
    top_chains(g).into_iter().map(|c| (s(g, &c), c)).collect()
}

pub fn standard_sign(g: Ground, c: &Chain) -> i8 {
    sgn(g, c).expect("top chain")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyCheck {
    pub lhs_beta_d: FormalSum,
    pub lhs_partials: FormalSum,
    pub rhs: FormalSum,
    /// `LHS − RHS`.
    pub residual: FormalSum,
    /// Number of signed terms expanded before cancellation, per side.
    pub raw_terms: (usize, usize, usize),
    pub ok: bool,
}

/// Expands both sides of the identity on `Δ(l+1)` for `l ≥ 0`.
pub fn verify_homotopy_identity(l: usize) -> HomotopyCheck {
    verify_homotopy_identity_with(l, &standard_sign)
}

/// The same expansion with the signs of `β^{l+1}` and `β^l` supplied by `s`.
pub fn verify_homotopy_identity_with(l: usize, s: &impl Fn(Ground, &Chain) -> i8) -> HomotopyCheck {
    let beta_next = expand_beta_with(l as isize, s);
    let beta = expand_beta_with(l as isize - 1, s);

    // β^{l+1}(d^l f)(t) = Σ_C sgn(C) Σ_i (−1)^i f(t_{δ_i C}).
    let mut lhs_beta_d = FormalSum::new();
    let mut n1 = 0;
    for (s, c) in &beta_next {
        for i in 0..=l + 1 {
            lhs_beta_d.add(c.face(i).expect("valid face").vertices().to_vec(), sign(i) * *s as i64);
            n1 += 1;
        }
    }

    // (∂^j β^l f)(t) = Σ_B sgn(B) f(t_{ι_j B}).
    let mut lhs_partials = FormalSum::new();
    let mut n2 = 0;
    for j in 0..=l {
        for (s, b) in &beta {
            lhs_partials.add(b.map(skip(j as u32)).vertices().to_vec(), sign(j) * *s as i64);
            n2 += 1;
        }
    }

    // ∂^∅ f(t) = f(t_0, …, t_l).
    let mut rhs = FormalSum::new();
    rhs.add((0..=l as u32).map(DeltaVertex::Element).collect(), 1);

    let mut residual = lhs_beta_d.clone();
    residual.add_sum(&lhs_partials, 1);
    residual.add_sum(&rhs, -1);
    let ok = residual.is_zero();
    HomotopyCheck {
        lhs_beta_d,
        lhs_partials,
        rhs,
        residual,
        raw_terms: (n1, n2, 1),
        ok,
    }
}

fn sign(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Whether `(−1)^j s(C) + (−1)^m s(C') = 0` for every top `C ∈ Δ_{l+1}(l+1)`
/// and every interior face `j ∈ [l]`, with `δ_j C = δ_m C'`.
pub fn verify_sign_cancellation_with(l: usize, s: impl Fn(&Chain) -> i8) -> bool {
    let g = Ground::standard(l + 1);
    top_chains(g).iter().all(|c| {
        (0..=l).all(|j| {
            let o = opposite(g, c, j).expect("interior face");
            sign(j) * s(c) as i64 + sign(o.index) * s(&o.chain) as i64 == 0
        })
    })
}

pub fn verify_sign_cancellation(l: usize) -> bool {
    let g = Ground::standard(l + 1);
    verify_sign_cancellation_with(l, |c| sgn(g, c).expect("top chain"))
}

/// Number of `m`-chains of `Δ(l)`, exposed for term-count checks.
pub fn chain_count(l: usize, m: usize) -> usize {
    chains(Ground::standard(l), m).len()
}

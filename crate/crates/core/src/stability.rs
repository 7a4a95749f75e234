//! Range functions and the stability decision.
//!
//! `γ̃∗(l) = 2^l + ⌈(l+1)/2⌉`, `γ̃` is its upper adjoint, `γ(r) = γ̃(⌊(r−1)/2⌋)`
//! and `τ(r) = r − 1`. The decision at `(q, r)` reads the inequality
//! `min{γ̃(q,r), τ̃(q,r) − 1} ≥ 0` with
//! `γ̃(q,r) = min_{j=q0+1..q} γ(r+1−2(q−j)) − j` and `τ̃` its twin.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Sub};

use crate::quillen::FamilySpec;

/// `ℤ ∪ {−∞, +∞}` with saturating arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Fin(i64),
    PosInf,
}

impl ExtInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Fin(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_nonnegative(self) -> bool {
        self >= ExtInt::Fin(0)
    }
}

impl Add<i64> for ExtInt {
    type Output = ExtInt;

    fn add(self, k: i64) -> ExtInt {
        match self {
            ExtInt::Fin(x) => ExtInt::Fin(x + k),
            other => other,
        }
    }
}

impl Sub<i64> for ExtInt {
    type Output = ExtInt;

    fn sub(self, k: i64) -> ExtInt {
        self + -k
    }
}

impl PartialEq<i64> for ExtInt {
    fn eq(&self, other: &i64) -> bool {
        *self == ExtInt::Fin(*other)
    }
}

impl PartialOrd<i64> for ExtInt {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&ExtInt::Fin(*other)))
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => f.write_str("-inf"),
            ExtInt::Fin(x) => write!(f, "{x}"),
            ExtInt::PosInf => f.write_str("+inf"),
        }
    }
}

/// `γ̃∗(l) = 2^l + ⌈(l+1)/2⌉`.
pub fn gamma_star(l: u32) -> i64 {
    (1i64 << l) + (l as i64 + 2) / 2
}

/// `γ̃(r) = sup{l ≥ 0 : γ̃∗(l) ≤ r}`, with `sup ∅ = −∞`.
pub fn gamma_tilde(r: i64) -> ExtInt {
    let mut best = ExtInt::NegInf;
    let mut l = 0;
    while gamma_star(l) <= r {
        best = ExtInt::Fin(l as i64);
        l += 1;
    }
    best
}

/// `γ(r) = γ̃(⌊(r−1)/2⌋)`.
pub fn gamma(r: i64) -> ExtInt {
    gamma_tilde((r - 1).div_euclid(2))
}

/// `τ(r) = r − 1`.
pub fn tau(r: i64) -> ExtInt {
    ExtInt::Fin(r - 1)
}

/// The pair `(γ, τ)` of a Quillen family.
#[derive(Clone, Copy)]
pub struct RangeFunctions<G, T> {
    pub gamma: G,
    pub tau: T,
}

pub type StandardRanges = RangeFunctions<fn(i64) -> ExtInt, fn(i64) -> ExtInt>;

/// The acyclicity and transitivity ranges of the Stiefel complexes.
pub fn standard_ranges() -> StandardRanges {
    RangeFunctions { gamma, tau }
}

impl<G: Fn(i64) -> ExtInt, T: Fn(i64) -> ExtInt> RangeFunctions<G, T> {
    /// `(γ̃(q,r), τ̃(q,r))`; both `+∞` when `q ≤ q0`.
    pub fn tilde_ranges(&self, q: i64, r: i64, q0: i64) -> (ExtInt, ExtInt) {
        let mut g = ExtInt::PosInf;
        let mut t = ExtInt::PosInf;
        for j in q0 + 1..=q {
            let s = r + 1 - 2 * (q - j);
            g = g.min((self.gamma)(s) - j);
            t = t.min((self.tau)(s) - j);
        }
        (g, t)
    }

    pub fn decide(&self, q: i64, r: i64, q0: i64) -> StabilityDecision {
        let (tg, tt) = self.tilde_ranges(q, r, q0);
        let holds = q <= q0 || (tg.is_nonnegative() && (tt - 1).is_nonnegative());
        StabilityDecision {
            q,
            r,
            q0,
            iso: holds,
            inj: holds,
            tilde_gamma_qr: tg,
            tilde_tau_qr: tt,
        }
    }
}

pub fn tilde_ranges<G: Fn(i64) -> ExtInt, T: Fn(i64) -> ExtInt>(q: i64, r: i64, q0: i64, f: &RangeFunctions<G, T>) -> (ExtInt, ExtInt) {
    f.tilde_ranges(q, r, q0)
}

pub fn decide<G: Fn(i64) -> ExtInt, T: Fn(i64) -> ExtInt>(q: i64, r: i64, q0: i64, f: &RangeFunctions<G, T>) -> StabilityDecision {
    f.decide(q, r, q0)
}

/// Whether `H^q_b(ι_r)` is an isomorphism (`iso`) and `H^{q+1}_b(ι_r)` an
/// injection (`inj`), as far as the inequality decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StabilityDecision {
    pub q: i64,
    pub r: i64,
    pub q0: i64,
    pub iso: bool,
    pub inj: bool,
    pub tilde_gamma_qr: ExtInt,
    pub tilde_tau_qr: ExtInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RangeRow {
    pub q: u32,
    /// Isomorphism range `2γ̃∗(q)`.
    pub r0: i64,
    /// Injectivity range `2γ̃∗(q−1)`, from `q ≥ q0 + 2` on.
    pub r1: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeReport {
    pub family: FamilySpec,
    pub q0: u32,
    pub rows: Vec<RangeRow>,
    /// `r0(q) ≤ 3·2^q` on every row.
    pub exponential_bound: bool,
}

/// The ranges for `q0 + 1 ≤ q ≤ q_max`. Determinant-one families inherit the
/// ranges of the family they sit in.
pub fn range_report(family: FamilySpec, q_max: u32) -> RangeReport {
    let q0 = family.q0() as u32;
    let rows: Vec<RangeRow> = (q0 + 1..=q_max)
        .map(|q| RangeRow {
            q,
            r0: 2 * gamma_star(q),
            r1: (q >= q0 + 2).then(|| 2 * gamma_star(q - 1)),
        })
        .collect();
    let exponential_bound = rows.iter().all(|row| row.r0 <= 3 * (1i64 << row.q));
    RangeReport {
        family,
        q0,
        rows,
        exponential_bound,
    }
}

/// The least `r ≤ r_max` from which `decide(q, ·)` holds up to `r_max`.
pub fn minimal_stable_rank<G: Fn(i64) -> ExtInt, T: Fn(i64) -> ExtInt>(f: &RangeFunctions<G, T>, q: i64, q0: i64, r_max: i64) -> Option<i64> {
    let mut least = None;
    for r in (0..=r_max).rev() {
        if f.decide(q, r, q0).iso {
            least = Some(r);
        } else {
            break;
        }
    }
    least
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quillen::Family;
    use proptest::prelude::*;

    #[test]
    fn gamma_star_values() {
        let v: Vec<i64> = (0..5).map(gamma_star).collect();
        assert_eq!(v, [2, 3, 6, 10, 19]);
        assert!((0..20).all(|l| gamma_star(l) < gamma_star(l + 1)));
    }

    #[test]
    fn gamma_values() {
        for r in -3..=4 {
            assert_eq!(gamma(r), ExtInt::NegInf);
        }
        assert_eq!(gamma(5), 0);
        assert_eq!(gamma(21), 3);
        assert_eq!(gamma(20), 2);
    }

    #[test]
    fn extended_integers() {
        assert!(ExtInt::NegInf < ExtInt::Fin(i64::MIN));
        assert!(ExtInt::PosInf > ExtInt::Fin(i64::MAX));
        assert_eq!(ExtInt::NegInf - 3, ExtInt::NegInf);
        assert_eq!(ExtInt::PosInf.min(ExtInt::Fin(2)), 2);
        assert_eq!(alloc::format!("{} {}", ExtInt::NegInf, ExtInt::Fin(-1)), "-inf -1");
    }

    #[test]
    fn tilde_ranges_examples() {
        let f = standard_ranges();
        assert_eq!(f.tilde_ranges(3, 20, 2).0, 0);
        assert_eq!(f.tilde_ranges(3, 19, 2).0, -1);
        assert_eq!(f.tilde_ranges(2, 7, 2), (ExtInt::PosInf, ExtInt::PosInf));
        for q in 2..9 {
            for r in 0..60 {
                for q0 in [1, 2] {
                    if q > q0 {
                        assert_eq!(f.tilde_ranges(q, r, q0).1, r - 2 * q + q0 + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn decisions() {
        let f = standard_ranges();
        assert!(f.decide(3, 20, 2).iso);
        assert!(!f.decide(3, 19, 2).iso);
        for r in 0..50 {
            assert!(f.decide(1, r, 2).iso);
            assert!(f.decide(1, r, 1).iso);
        }
    }

    #[test]
    fn closed_form() {
        let f = standard_ranges();
        for q0 in [1i64, 2] {
            for q in q0 + 1..=8 {
                for r in 0..=300 {
                    assert_eq!(f.decide(q, r, q0).iso, r >= 2 * gamma_star(q as u32), "q={q} r={r} q0={q0}");
                }
            }
        }
    }

    #[test]
    fn reports() {
        let sp = FamilySpec::new(Family::Sp, 0).unwrap();
        let rep = range_report(sp, 6);
        // 2·(64 + ⌈7/2⌉) = 136 at q = 6.
        assert_eq!(rep.rows.iter().map(|r| r.r0).collect::<Vec<_>>(), [20, 38, 70, 136]);
        assert_eq!(rep.rows[0].r1, None);
        assert_eq!(rep.rows[1].r1, Some(20));
        assert!(rep.exponential_bound);
        let or = range_report(FamilySpec::new(Family::OR, 2).unwrap(), 4);
        assert_eq!(or.q0, 1);
        assert_eq!(or.rows[0].q, 2);
        let so = range_report(FamilySpec::new(Family::SOR, 1).unwrap(), 4);
        assert_eq!(so.rows, or.rows);
        assert_eq!(minimal_stable_rank(&standard_ranges(), 3, 2, 300), Some(20));
    }

    proptest! {
        #[test]
        fn galois(l in 0u32..12, r in -5i64..=60) {
            prop_assert_eq!(gamma_star(l) <= r, ExtInt::Fin(l as i64) <= gamma_tilde(r));
        }

        #[test]
        fn monotone_in_r(q in 0i64..9, r in 0i64..200, q0 in 1i64..3) {
            let f = standard_ranges();
            if f.decide(q, r, q0).iso {
                prop_assert!(f.decide(q, r + 1, q0).iso);
            }
        }

        #[test]
        fn gamma_tilde_increasing(r in -5i64..200) {
            prop_assert!(gamma_tilde(r) <= gamma_tilde(r + 1));
        }
    }
}

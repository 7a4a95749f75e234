//! An independent derivation of the stability ranges by replaying the
//! spectral-sequence induction.
//!
//! The first page for the complex `X(r+1)` has `E₁^{p,q} ≅ H^q_b(G_{r−p+1})`
//! for `p ≤ τ(r+1)+1`, and `d₁` out of column `p` is `H^q_b(ι_{r−p})` for even
//! `p` and zero for odd `p`. The bounded cohomology groups stay opaque: the
//! tracer only moves iso/injectivity facts about the maps `ι`.
//!
//! A main claim at `(q, r)` (iso in degree `q`, injection in degree `q+1`) is
//! discharged by the range inequalities for `j = q0+1..q` together with
//!
//! * (A) `H^q(ι_r)` injective, from the claim at `(q−1, r)`;
//! * (B) `H^{q−p+1}(ι_{r−p})` iso for even `p`, from `(q−p+1, r−p)`;
//! * (C) `H^{q−p+1}(ι_{r−p−1})` injective for odd `p`, from `(q−p, r−p−1)`;
//! * (D) `d₁^{q+2,0}` injective for even `q`, an inclusion of constants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quillen::FamilySpec;
use crate::stability::{standard_ranges, ExtInt, RangeFunctions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellLabel {
    /// `H^degree_b(G_rank)`.
    Group {
        degree: i64,
        rank: i64,
    },
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PageCell {
    pub p: i64,
    pub q: i64,
    pub label: CellLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DifferentialModel {
    /// `H_b(ι_rank)`.
    IncludedMap {
        rank: i64,
    },
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub q: i64,
    pub r: i64,
    /// Row-major over `q' = 0..=q+1`, `p' = 0..=q+3`.
    pub cells: Vec<PageCell>,
    /// The model of `d₁` out of column `p'`, for `p' = 0..=q+2`.
    pub differentials: Vec<DifferentialModel>,
}

impl Page {
    pub fn cell(&self, p: i64, q: i64) -> Option<&PageCell> {
        self.cells.iter().find(|c| c.p == p && c.q == q)
    }

    pub fn differential(&self, p: i64) -> Option<DifferentialModel> {
        usize::try_from(p).ok().and_then(|p| self.differentials.get(p).copied())
    }
}

/// The first page relevant to the main claim at `(q, r)`.
pub fn build_page<T: Fn(i64) -> ExtInt>(q: i64, r: i64, tau: T) -> Result<Page> {
    let t = tau(r + 1);
    if t < q + 1 {
        return Err(Error::HypothesisViolated("τ(r+1) ≥ q+1"));
    }
    let mut cells = Vec::new();
    for qq in 0..=q + 1 {
        for p in 0..=q + 3 {
            let label = if ExtInt::Fin(p) <= t + 1 {
                CellLabel::Group { degree: qq, rank: r - p + 1 }
            } else {
                CellLabel::Unknown
            };
            cells.push(PageCell { p, q: qq, label });
        }
    }
    let differentials = (0..=q + 2)
        .map(|p| {
            if p % 2 == 0 {
                DifferentialModel::IncludedMap { rank: r - p }
            } else {
                DifferentialModel::Zero
            }
        })
        .collect();
    Ok(Page { q, r, cells, differentials })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statement {
    /// `H^q_b(ι_r)` iso and `H^{q+1}_b(ι_r)` injective.
    MainClaim {
        q: i64,
        r: i64,
    },
    Iso {
        degree: i64,
        rank: i64,
    },
    Inj {
        degree: i64,
        rank: i64,
    },
    /// The inequalities `γ(r+1−2(q−j)) ≥ j`, `τ(r+1−2(q−j)) ≥ j+1`.
    Range {
        q: i64,
        r: i64,
    },
    /// `d₁^{q+2,0}` injective on the page for `(q, r)`.
    BottomInjective {
        q: i64,
        r: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Justification {
    InitialCondition,
    AssertionA,
    AssertionB,
    AssertionC,
    AssertionD,
    Convergence,
    RangeCondition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub statement: Statement,
    pub justification: Justification,
    pub children: Vec<usize>,
}

/// A proof DAG; shared sub-claims appear once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub nodes: Vec<Node>,
    pub root: usize,
    pub q0: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Inequality {
    Gamma,
    Tau,
}

/// The first range inequality that fails, with the claim that needed it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceFailure {
    pub q: i64,
    pub r: i64,
    pub j: i64,
    pub inequality: Inequality,
    /// `γ(r+1−2(q−j))` or `τ(r+1−2(q−j))`.
    pub value: ExtInt,
    /// `j` or `j + 1`.
    pub bound: i64,
}

/// Memoized main claims over a fixed `q0` and `(γ, τ)`.
pub struct Tracer<'a, G, T> {
    f: &'a RangeFunctions<G, T>,
    q0: i64,
    nodes: Vec<Node>,
    memo: BTreeMap<Statement, core::result::Result<usize, TraceFailure>>,
}

impl<'a, G: Fn(i64) -> ExtInt, T: Fn(i64) -> ExtInt> Tracer<'a, G, T> {
    pub fn new(f: &'a RangeFunctions<G, T>, q0: i64) -> Self {
        Tracer {
            f,
            q0,
            nodes: Vec::new(),
            memo: BTreeMap::new(),
        }
    }

    fn push(&mut self, statement: Statement, justification: Justification, children: Vec<usize>) -> usize {
        self.nodes.push(Node {
            statement,
            justification,
            children,
        });
        self.nodes.len() - 1
    }

    fn range_check(&self, q: i64, r: i64) -> core::result::Result<(), TraceFailure> {
        for j in self.q0 + 1..=q {
            let s = r + 1 - 2 * (q - j);
            let g = (self.f.gamma)(s);
            if g < j {
                return Err(TraceFailure {
                    q,
                    r,
                    j,
                    inequality: Inequality::Gamma,
                    value: g,
                    bound: j,
                });
            }
            let t = (self.f.tau)(s);
            if t < j + 1 {
                return Err(TraceFailure {
                    q,
                    r,
                    j,
                    inequality: Inequality::Tau,
                    value: t,
                    bound: j + 1,
                });
            }
        }
        Ok(())
    }

    /// A fact `H^degree(ι_rank)` iso or injective: a leaf if the degree is
    /// within the initial condition, otherwise the main claim `sub`.
    fn fact(&mut self, statement: Statement, tag: Justification, degree: i64, sub: (i64, i64)) -> core::result::Result<usize, TraceFailure> {
        let child = if degree <= self.q0 {
            self.push(statement, Justification::InitialCondition, Vec::new())
        } else {
            self.claim(sub.0, sub.1)?
        };
        Ok(self.push(statement, tag, alloc::vec![child]))
    }

    /// The main claim at `(q, r)`, memoized.
    pub fn claim(&mut self, q: i64, r: i64) -> core::result::Result<usize, TraceFailure> {
        let key = Statement::MainClaim { q, r };
        if let Some(hit) = self.memo.get(&key) {
            return *hit;
        }
        let out = self.discharge(q, r);
        self.memo.insert(key, out);
        out
    }

    fn discharge(&mut self, q: i64, r: i64) -> core::result::Result<usize, TraceFailure> {
        let key = Statement::MainClaim { q, r };
        if q <= self.q0 {
            return Ok(self.push(key, Justification::InitialCondition, Vec::new()));
        }
        self.range_check(q, r)?;
        let mut children = alloc::vec![self.push(Statement::Range { q, r }, Justification::RangeCondition, Vec::new())];
        // (A)
        children.push(self.fact(Statement::Inj { degree: q, rank: r }, Justification::AssertionA, q - 1, (q - 1, r))?);
        // (B) and (C), in the order of the columns.
        for p in 1..=q + 1 {
            let degree = q - p + 1;
            if p % 2 == 0 {
                children.push(self.fact(Statement::Iso { degree, rank: r - p }, Justification::AssertionB, degree, (q - p + 1, r - p))?);
            } else if p <= q {
                children.push(self.fact(
                    Statement::Inj { degree, rank: r - p - 1 },
                    Justification::AssertionC,
                    degree - 1,
                    (q - p, r - p - 1),
                )?);
            }
        }
        // (D)
        if q % 2 == 0 {
            children.push(self.push(Statement::BottomInjective { q, r }, Justification::AssertionD, Vec::new()));
        }
        Ok(self.push(key, Justification::Convergence, children))
    }

    /// The certificate below `root`, re-indexed.
    pub fn extract(&self, root: usize) -> Certificate {
        let mut map = BTreeMap::new();
        let mut order = Vec::new();
        let mut stack = alloc::vec![root];
        while let Some(i) = stack.pop() {
            if map.contains_key(&i) {
                continue;
            }
            map.insert(i, order.len());
            order.push(i);
            stack.extend(self.nodes[i].children.iter().copied());
        }
        let nodes = order
            .iter()
            .map(|&i| {
                let n = &self.nodes[i];
                Node {
                    statement: n.statement,
                    justification: n.justification,
                    children: n.children.iter().map(|c| map[c]).collect(),
                }
            })
            .collect();
        Certificate { nodes, root: 0, q0: self.q0 }
    }
}

pub fn trace<G: Fn(i64) -> ExtInt, T: Fn(i64) -> ExtInt>(q: i64, r: i64, q0: i64, f: &RangeFunctions<G, T>) -> core::result::Result<Certificate, TraceFailure> {
    let mut tracer = Tracer::new(f, q0);
    let root = tracer.claim(q, r)?;
    Ok(tracer.extract(root))
}

impl Certificate {
    pub fn root(&self) -> &Node {
        &self.nodes[self.root]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// Longest chain of main claims below the root, counted in edges.
    pub fn depth(&self) -> usize {
        fn go(c: &Certificate, i: usize, memo: &mut BTreeMap<usize, usize>) -> usize {
            if let Some(&d) = memo.get(&i) {
                return d;
            }
            let own = matches!(c.nodes[i].statement, Statement::MainClaim { .. }) && c.nodes[i].justification == Justification::Convergence;
            let below = c.nodes[i].children.iter().map(|&k| go(c, k, memo)).max().unwrap_or(0);
            let d = below + own as usize;
            memo.insert(i, d);
            d
        }
        go(self, self.root, &mut BTreeMap::new())
    }

    pub fn is_acyclic(&self) -> bool {
        // 0 = unseen, 1 = on stack, 2 = done
        fn visit(c: &Certificate, i: usize, state: &mut [u8]) -> bool {
            match state[i] {
                1 => return false,
                2 => return true,
                _ => {}
            }
            state[i] = 1;
            let ok = c.nodes[i].children.iter().all(|&k| visit(c, k, state));
            state[i] = 2;
            ok
        }
        visit(self, self.root, &mut alloc::vec![0; self.nodes.len()])
    }

    /// Facts established directly under the root.
    pub fn root_facts(&self) -> BTreeSet<Statement> {
        self.root().children.iter().map(|&i| self.nodes[i].statement).collect()
    }

    /// On the second page, every cell of the diagonal `p'+q' = q+2` with
    /// `p' ≥ 2` is zero: for each one, the differentials of the page model
    /// and the facts under the root kill it.
    pub fn second_page_zeros<T: Fn(i64) -> ExtInt>(&self, tau: T) -> bool {
        let Statement::MainClaim { q, r } = self.root().statement else {
            return false;
        };
        if self.root().justification == Justification::InitialCondition {
            return true;
        }
        let Ok(page) = build_page(q, r, tau) else {
            return false;
        };
        let facts = self.root_facts();
        (2..=q + 2).all(|p| {
            let qq = q + 2 - p;
            let incoming = page.differential(p - 1);
            let outgoing = page.differential(p);
            match (incoming, outgoing) {
                // Cokernel of an isomorphism.
                (Some(DifferentialModel::IncludedMap { rank }), Some(DifferentialModel::Zero)) => facts.contains(&Statement::Iso { degree: qq, rank }),
                (Some(DifferentialModel::IncludedMap { rank }), _) if qq == 0 => facts.contains(&Statement::Iso { degree: 0, rank }),
                // Kernel of an injection.
                (Some(DifferentialModel::Zero), Some(DifferentialModel::IncludedMap { rank })) if qq > 0 => {
                    facts.contains(&Statement::Inj { degree: qq, rank })
                }
                (Some(DifferentialModel::Zero), _) if qq == 0 => facts.contains(&Statement::BottomInjective { q, r }),
                _ => false,
            }
        })
    }
}

/// Whether certificate existence agrees with `decide` on every
/// `(q, r) ∈ [q_max] × [r_max]`; the first disagreement otherwise.
pub fn cross_check_with<G1, T1, G2, T2>(
    q_max: i64,
    r_max: i64,
    q0: i64,
    tracer_ranges: &RangeFunctions<G1, T1>,
    decide_ranges: &RangeFunctions<G2, T2>,
) -> core::result::Result<(), (i64, i64)>
where
    G1: Fn(i64) -> ExtInt,
    T1: Fn(i64) -> ExtInt,
    G2: Fn(i64) -> ExtInt,
    T2: Fn(i64) -> ExtInt,
{
    let mut tracer = Tracer::new(tracer_ranges, q0);
    for q in 0..=q_max {
        for r in 0..=r_max {
            if tracer.claim(q, r).is_ok() != decide_ranges.decide(q, r, q0).iso {
                return Err((q, r));
            }
        }
    }
    Ok(())
}

pub fn cross_check(q_max: i64, r_max: i64, family: &FamilySpec) -> bool {
    let f = standard_ranges();
    cross_check_with(q_max, r_max, family.q0() as i64, &f, &f).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quillen::Family;
    use crate::stability::{gamma, tau};

    #[test]
    fn page_layout() {
        let page = build_page(2, 40, tau).unwrap();
        // Row 2 starts H²_{r+1} → H²_r.
        assert_eq!(page.cell(0, 2).unwrap().label, CellLabel::Group { degree: 2, rank: 41 });
        assert_eq!(page.cell(1, 2).unwrap().label, CellLabel::Group { degree: 2, rank: 40 });
        assert_eq!(page.differential(0), Some(DifferentialModel::IncludedMap { rank: 40 }));
        for p in [1, 3] {
            assert_eq!(page.differential(p), Some(DifferentialModel::Zero));
        }
        // Row 0, q even: H⁰_{r−q} → H⁰_{r−q−1} is zero, then d^{q+2,0}.
        assert_eq!(page.differential(3), Some(DifferentialModel::Zero));
        assert_eq!(page.differential(4), Some(DifferentialModel::IncludedMap { rank: 36 }));
        assert!(build_page(5, 4, tau).is_err());
        let tight = build_page(2, 3, tau).unwrap();
        assert_eq!(tight.cell(5, 0).unwrap().label, CellLabel::Unknown);
    }

    #[test]
    fn initial_condition_leaf() {
        let f = standard_ranges();
        let c = trace(2, 0, 2, &f).unwrap();
        assert_eq!(c.nodes.len(), 1);
        assert_eq!(c.root().justification, Justification::InitialCondition);
    }

    #[test]
    fn examples() {
        let f = standard_ranges();
        let c = trace(3, 20, 2, &f).unwrap();
        assert!(c.is_acyclic());
        assert!(c.depth() <= 1);
        assert!(c.second_page_zeros(tau));
        assert!(c.leaves().all(|n| matches!(
            n.justification,
            Justification::InitialCondition | Justification::AssertionD | Justification::RangeCondition
        )));
        let fail = trace(3, 19, 2, &f).unwrap_err();
        assert_eq!((fail.q, fail.r, fail.j, fail.inequality), (3, 19, 3, Inequality::Gamma));
        assert_eq!(fail.value, 2);
    }

    #[test]
    fn deep_certificates() {
        let f = standard_ranges();
        for q0 in [1, 2] {
            for q in q0 + 1..=8 {
                let r = 2 * crate::stability::gamma_star(q as u32) + 3;
                let c = trace(q, r, q0, &f).unwrap();
                assert!(c.is_acyclic());
                assert!(c.depth() as i64 <= q - q0);
                assert!(c.second_page_zeros(tau), "q={q}");
                let claims = c.nodes.iter().filter(|n| matches!(n.statement, Statement::MainClaim { .. })).count();
                let distinct: BTreeSet<_> = c
                    .nodes
                    .iter()
                    .filter(|n| matches!(n.statement, Statement::MainClaim { .. }))
                    .map(|n| n.statement)
                    .collect();
                assert_eq!(claims, distinct.len());
            }
        }
    }

    #[test]
    fn agreement_and_mutation() {
        assert!(cross_check(8, 300, &FamilySpec::new(Family::Sp, 0).unwrap()));
        assert!(cross_check(8, 300, &FamilySpec::new(Family::OR, 0).unwrap()));
        let f = standard_ranges();
        let shifted = RangeFunctions {
            gamma: |r: i64| gamma(r - 1),
            tau,
        };
        assert!(cross_check_with(8, 300, 2, &f, &shifted).is_err());
        assert!(cross_check_with(8, 300, 2, &shifted, &f).is_err());
    }
}

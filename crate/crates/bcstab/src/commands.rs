//! One function per subcommand, each returning a [`Report`], plus the
//! per-cell checks they are built from.

use std::collections::BTreeSet;

use bcstab_core::delta::{relative_star, star, top_chains, Ground};
use bcstab_core::formed::{random_scalar, FormedSpace};
use bcstab_core::homotopy::{standard_sign, verify_homotopy_identity, verify_homotopy_identity_with, verify_sign_cancellation};
use bcstab_core::linalg::{Matrix, Subspace, Vector};
use bcstab_core::quillen::{
    kernel_is_block_solvable, verify_diagram, verify_flag_identity, verify_normalizer, verify_projection_homomorphism, verify_section, w_matrix, FamilySpec,
};
use bcstab_core::stability::{gamma, minimal_stable_rank, range_report, standard_ranges};
use bcstab_core::stiefel::{random_simplex, transitivity_witness};
use bcstab_core::trace::{trace, Certificate, Statement};
use bcstab_core::Base;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{markdown_table, Report};

/// A generator for one verification cell, independent of the order in
/// which cells run.
pub fn cell_rng(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &k in key {
        h ^= k.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

fn family_key(spec: &FamilySpec) -> u64 {
    spec.family as u64 * 64 + spec.d as u64
}

fn family_params(spec: &FamilySpec) -> Value {
    json!({ "family": spec.family.code(), "name": spec.name, "d": spec.d })
}

// ranges

#[derive(Clone, Debug, Serialize)]
pub struct RangeLine {
    pub q: u32,
    pub r0: i64,
    pub r1: Option<i64>,
    /// Least `r` from which `decide(q, r)` holds.
    pub r0_by_decide: Option<i64>,
    /// Least `r` from which `decide(q−1, r)` holds.
    pub r1_by_decide: Option<i64>,
}

pub fn ranges(spec: &FamilySpec, q_max: u32) -> Report {
    let mut report = Report::new("ranges", None, json!({ "family": family_params(spec), "qmax": q_max }));
    let rep = range_report(*spec, q_max);
    let f = standard_ranges();
    let q0 = rep.q0 as i64;
    let lines: Vec<RangeLine> = rep
        .rows
        .iter()
        .map(|row| {
            let q = row.q as i64;
            let r0_by_decide = minimal_stable_rank(&f, q, q0, row.r0 + 64);
            let r1_by_decide = row.r1.and_then(|r1| minimal_stable_rank(&f, q - 1, q0, r1 + 64));
            RangeLine {
                q: row.q,
                r0: row.r0,
                r1: row.r1,
                r0_by_decide,
                r1_by_decide,
            }
        })
        .collect();
    let agree = lines.iter().all(|l| l.r0_by_decide == Some(l.r0) && l.r1_by_decide == l.r1);
    let gamma_void_upto = (0..=64).take_while(|&r| gamma(r).finite().is_none()).last();
    report.pass = agree && rep.exponential_bound;
    report.text.push(format!("{} (d = {}), q0 = {}", spec.name, spec.d, rep.q0));
    for l in &lines {
        report
            .text
            .push(format!("q={} r0={} r1={}", l.q, l.r0, l.r1.map_or("-".to_string(), |x| x.to_string())));
    }
    report.text.push(format!("gamma(r) = -inf for r <= {}", gamma_void_upto.unwrap_or(-1)));
    let md_rows: Vec<Vec<String>> = lines
        .iter()
        .map(|l| vec![l.q.to_string(), l.r0.to_string(), l.r1.map_or("–".to_string(), |x| x.to_string())])
        .collect();
    report.markdown = Some(format!(
        "{} (d = {}), q₀ = {}\n\n{}",
        spec.name,
        spec.d,
        rep.q0,
        markdown_table(&["q", "r₀(q)", "r₁(q)"], &md_rows)
    ));
    report.result = json!({
        "q0": rep.q0,
        "rows": lines,
        "decide_agrees": agree,
        "exponential_bound": rep.exponential_bound,
        "gamma_neg_inf_for_r_le": gamma_void_upto,
    });
    report
}

// verify-homotopy

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyLine {
    pub l: usize,
    pub residual_terms: usize,
    pub raw_terms: (usize, usize, usize),
    pub ok: bool,
}

pub fn homotopy_line(l: usize) -> HomotopyLine {
    let check = verify_homotopy_identity(l);
    HomotopyLine {
        l,
        residual_terms: check.residual.len(),
        raw_terms: check.raw_terms,
        ok: check.ok,
    }
}

/// Flips the sign of every `stride`-th top chain of `Δ(l+1)` and `Δ(l)`, one
/// at a time; returns `(flips tried, flips that broke the identity)`.
pub fn homotopy_mutations(l: usize, stride: usize) -> (usize, usize) {
    let mut tried = 0;
    let mut broken = 0;
    for g in [Ground::standard(l + 1), Ground::standard(l)] {
        for target in top_chains(g).into_iter().step_by(stride.max(1)) {
            let flipped = |h: Ground, c: &bcstab_core::delta::Chain| if h == g && *c == target { -standard_sign(h, c) } else { standard_sign(h, c) };
            tried += 1;
            broken += !verify_homotopy_identity_with(l, &flipped).ok as usize;
        }
    }
    (tried, broken)
}

pub fn verify_homotopy(l_max: usize) -> Report {
    let mut report = Report::new("verify-homotopy", None, json!({ "l": l_max }));
    let lines: Vec<HomotopyLine> = (0..=l_max).map(homotopy_line).collect();
    report.pass = lines.iter().all(|l| l.ok);
    for l in &lines {
        let (a, b, c) = l.raw_terms;
        report.text.push(format!("l={} residual={} terms={}+{}+{}", l.l, l.residual_terms, a, b, c));
    }
    report.result = json!({ "rows": lines });
    report
}

// verify-quillen

#[derive(Clone, Debug, Serialize)]
pub struct QuillenCell {
    pub q: usize,
    pub i: usize,
    pub flag_identity: bool,
    pub w_isometry: bool,
    pub normalizer: bool,
    pub diagram: bool,
    pub error: Option<String>,
}

impl QuillenCell {
    pub fn pass(&self) -> bool {
        self.flag_identity && self.w_isometry && self.normalizer && self.diagram && self.error.is_none()
    }
}

pub fn quillen_cell(spec: &FamilySpec, r: usize, q: usize, i: usize, samples: usize, seed: u64) -> QuillenCell {
    let mut rng = cell_rng(seed, &[family_key(spec), r as u64, q as u64, i as u64]);
    let mut run = || -> bcstab_core::error::Result<(bool, bool, bool, bool)> {
        let w = w_matrix(spec, r, q, i)?;
        let iso = spec.space(r)?.is_isometry(w.matrix());
        Ok((
            verify_flag_identity(spec, r, q, i)?,
            iso,
            verify_normalizer(spec, r, q, i, samples, &mut rng)?,
            verify_diagram(spec, r, q, i, samples, &mut rng)?,
        ))
    };
    match run() {
        Ok((flag_identity, w_isometry, normalizer, diagram)) => QuillenCell {
            q,
            i,
            flag_identity,
            w_isometry,
            normalizer,
            diagram,
            error: None,
        },
        Err(e) => QuillenCell {
            q,
            i,
            flag_identity: false,
            w_isometry: false,
            normalizer: false,
            diagram: false,
            error: Some(e.to_string()),
        },
    }
}

/// Every `(q, i)` with `q ≤ r−2`, `i ≤ q+1`, in that order.
pub fn quillen_cells(spec: &FamilySpec, r: usize, samples: usize, seed: u64) -> Vec<QuillenCell> {
    let keys: Vec<(usize, usize)> = (0..r.saturating_sub(1)).flat_map(|q| (0..=q + 1).map(move |i| (q, i))).collect();
    keys.par_iter().map(|&(q, i)| quillen_cell(spec, r, q, i, samples, seed)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelCell {
    pub q: usize,
    pub block_solvable: bool,
    pub section: bool,
    pub homomorphism: bool,
    pub error: Option<String>,
}

impl KernelCell {
    pub fn pass(&self) -> bool {
        self.block_solvable && self.section && self.homomorphism && self.error.is_none()
    }
}

pub fn kernel_cells(spec: &FamilySpec, r: usize, samples: usize, seed: u64) -> Vec<KernelCell> {
    (0..r)
        .into_par_iter()
        .map(|q| {
            let mut rng = cell_rng(seed, &[family_key(spec), r as u64, q as u64, u64::MAX]);
            let mut run = || -> bcstab_core::error::Result<(bool, bool, bool)> {
                Ok((
                    kernel_is_block_solvable(spec, r, q, samples, &mut rng)?,
                    verify_section(spec, r, q, samples, &mut rng)?,
                    verify_projection_homomorphism(spec, r, q, samples, &mut rng)?,
                ))
            };
            match run() {
                Ok((block_solvable, section, homomorphism)) => KernelCell {
                    q,
                    block_solvable,
                    section,
                    homomorphism,
                    error: None,
                },
                Err(e) => KernelCell {
                    q,
                    block_solvable: false,
                    section: false,
                    homomorphism: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

pub fn verify_quillen(spec: &FamilySpec, r: usize, samples: usize, seed: u64) -> Report {
    let mut report = Report::new(
        "verify-quillen",
        Some(seed),
        json!({ "family": family_params(spec), "rank": r, "samples": samples }),
    );
    let cells = quillen_cells(spec, r, samples, seed);
    let kernels = kernel_cells(spec, r, samples, seed);
    report.pass = cells.iter().all(QuillenCell::pass) && kernels.iter().all(KernelCell::pass);
    report
        .text
        .push(format!("{} (d = {}), r = {}, {} samples, seed {}", spec.name, spec.d, r, samples, seed));
    for c in &cells {
        report.text.push(format!(
            "q={} i={} flag={} isometry={} normalizer={} diagram={}{}",
            c.q,
            c.i,
            c.flag_identity,
            c.w_isometry,
            c.normalizer,
            c.diagram,
            c.error.as_ref().map_or(String::new(), |e| format!(" error: {e}"))
        ));
    }
    for k in &kernels {
        report.text.push(format!(
            "q={} kernel: block-solvable={} section={} homomorphism={}",
            k.q, k.block_solvable, k.section, k.homomorphism
        ));
    }
    let md_rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                c.q.to_string(),
                c.i.to_string(),
                c.flag_identity.to_string(),
                c.w_isometry.to_string(),
                c.normalizer.to_string(),
                c.diagram.to_string(),
            ]
        })
        .collect();
    report.markdown = Some(markdown_table(&["q", "i", "flag", "isometry", "normalizer", "diagram"], &md_rows));
    report.result = json!({ "cells": cells, "kernels": kernels });
    report
}

// verify-formed

#[derive(Clone, Debug, Serialize)]
pub struct FormedLaws {
    pub reflexive: bool,
    pub rank_matches: bool,
    /// `(passed, tried)` per law.
    pub perp_duality: (usize, usize),
    pub adapted_gram: (usize, usize),
    pub configurations: (usize, usize),
}

impl FormedLaws {
    pub fn pass(&self) -> bool {
        let all = |(a, b): (usize, usize)| a == b;
        self.reflexive && self.rank_matches && all(self.perp_duality) && all(self.adapted_gram) && all(self.configurations)
    }
}

/// A product of `2n` shears `I + c·E_ij` with `c` of height one.
fn random_unimodular(base: Base, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut p = Matrix::identity(n);
    if n < 2 {
        return p;
    }
    for _ in 0..2 * n {
        let i = (rng.next_u32() as usize) % n;
        let j = (i + 1 + (rng.next_u32() as usize) % (n - 1)) % n;
        let mut e = Matrix::identity(n);
        e[(i, j)] = random_scalar(base, rng, 1);
        p = e.mul(&p);
    }
    p
}

pub fn formed_laws(spec: &FamilySpec, r: usize, samples: usize, seed: u64) -> bcstab_core::error::Result<FormedLaws> {
    let mut rng = cell_rng(seed, &[family_key(spec), r as u64, 8]);
    let v = spec.space(r)?;
    let fs = spec.field_spec;
    let n = v.dim();
    let reflexive = v.gram().sigma_transpose(fs).scale(&fs.epsilon_scalar()) == *v.gram();
    let rank_matches = v.rank() == r && v.adapted_basis().hyperbolic_pairs.len() == r;
    let mut perp = (0, 0);
    let mut adapted = (0, 0);
    let mut configs = (0, 0);
    for s in 0..samples {
        let k = (rng.next_u32() as usize) % (n + 1);
        let vs: Vec<Vector> = (0..k).map(|_| v.random_vector(&mut rng, 3)).collect();
        let a = Subspace::span(n, &vs);
        perp.1 += 1;
        perp.0 += (v.perp(&v.perp(&a)) == a) as usize;

        let p = random_unimodular(fs.base(), n, &mut rng);
        let w = FormedSpace::new(fs, p.sigma_transpose(fs).mul(v.gram()).mul(&p))?;
        let basis = w.adapted_basis();
        let vectors = basis.vectors();
        adapted.1 += 1;
        adapted.0 += (vectors.len() == n && w.gram_of(&vectors) == basis.expected_gram(&w)) as usize;

        if r > 0 {
            let k = s % r;
            let (ps, qs) = v.random_configuration(k, &mut rng)?;
            configs.1 += 1;
            configs.0 += v.config_nondegenerate_check(&ps, &qs)? as usize;
        }
    }
    Ok(FormedLaws {
        reflexive,
        rank_matches,
        perp_duality: perp,
        adapted_gram: adapted,
        configurations: configs,
    })
}

pub fn verify_formed(spec: &FamilySpec, r: usize, samples: usize, seed: u64) -> Report {
    let mut report = Report::new(
        "verify-formed",
        Some(seed),
        json!({ "family": family_params(spec), "rank": r, "samples": samples }),
    );
    match formed_laws(spec, r, samples, seed) {
        Ok(laws) => {
            report.pass = laws.pass();
            report.text.push(format!("{} (d = {}), r = {}", spec.name, spec.d, r));
            report.text.push(format!("reflexive J = eps*sigma(J)^T: {}", laws.reflexive));
            report.text.push(format!("rank = r: {}", laws.rank_matches));
            report.text.push(format!("perp duality: {}/{}", laws.perp_duality.0, laws.perp_duality.1));
            report.text.push(format!("adapted basis Gram: {}/{}", laws.adapted_gram.0, laws.adapted_gram.1));
            report.text.push(format!("configurations: {}/{}", laws.configurations.0, laws.configurations.1));
            report.result = serde_json::to_value(laws).expect("serializable");
        }
        Err(e) => {
            report.pass = false;
            report.text.push(format!("error: {e}"));
            report.result = json!({ "error": e.to_string() });
        }
    }
    report
}

// delta

#[derive(Clone, Debug, Serialize)]
pub struct DeltaLine {
    /// `|S|`.
    pub n: usize,
    pub top_chains: usize,
    /// `T(n) = n·T(n−1) + 1`.
    pub recurrence: usize,
    pub star_sizes: bool,
    pub relative_star_sizes: bool,
    pub sign_cancellation: bool,
}

pub fn delta_line(n: usize) -> DeltaLine {
    let g = Ground::standard(n);
    let tops = top_chains(g);
    let recurrence = (1..=n).fold(1usize, |t, k| k * t + 1);
    let distinct = |v: Vec<bcstab_core::delta::DeltaVertex>| v.into_iter().collect::<BTreeSet<_>>().len();
    let star_sizes = tops.iter().all(|c| star(g, c).map(distinct) == Ok(2 * n + 1));
    let relative_star_sizes = tops.iter().all(|c| c.face(n).and_then(|b| relative_star(g, &b)).map(distinct) == Ok(2 * n));
    let sign_cancellation = n == 0 || verify_sign_cancellation(n - 1);
    DeltaLine {
        n,
        top_chains: tops.len(),
        recurrence,
        star_sizes,
        relative_star_sizes,
        sign_cancellation,
    }
}

impl DeltaLine {
    pub fn pass(&self) -> bool {
        self.top_chains == self.recurrence && self.star_sizes && self.relative_star_sizes && self.sign_cancellation
    }
}

pub fn delta(n_max: usize) -> Report {
    let mut report = Report::new("delta", None, json!({ "l": n_max }));
    let lines: Vec<DeltaLine> = (0..=n_max).map(delta_line).collect();
    report.pass = lines.iter().all(DeltaLine::pass);
    for l in &lines {
        report.text.push(format!(
            "|S|={} top chains={} T={} |St(C)|=2l+1: {} |St(B)|=2l: {} signs cancel: {}",
            l.n, l.top_chains, l.recurrence, l.star_sizes, l.relative_star_sizes, l.sign_cancellation
        ));
    }
    report.result = json!({ "rows": lines });
    report
}

// witt

#[derive(Clone, Debug, Serialize)]
pub struct WittLine {
    pub r: usize,
    pub kind: &'static str,
    pub dim: usize,
    pub ok: bool,
    pub error: Option<String>,
}

/// A random subspace, a random isometry `h`, and the extension of `h|_W`.
pub fn witt_instance(spec: &FamilySpec, r: usize, seed: u64, index: u64) -> WittLine {
    let mut rng = cell_rng(seed, &[family_key(spec), r as u64, index, 7]);
    let run = |rng: &mut ChaCha8Rng| -> bcstab_core::error::Result<(usize, bool)> {
        let v = spec.space(r)?;
        let n = v.dim();
        let k = (rng.next_u32() as usize) % (n + 1);
        let vs: Vec<Vector> = (0..k).map(|_| v.random_vector(rng, 3)).collect();
        let w = Subspace::span(n, &vs);
        let h = v.random_isometry(rng, 4)?;
        let images: Vec<Vector> = w.basis().iter().map(|x| h.apply(x)).collect();
        let g = v.witt_extend(w.basis(), &images)?;
        let ok = v.is_isometry(g.matrix()) && w.basis().iter().zip(&images).all(|(x, y)| g.apply(x) == *y);
        Ok((w.dim(), ok))
    };
    match run(&mut rng) {
        Ok((dim, ok)) => WittLine {
            r,
            kind: "extension",
            dim,
            ok,
            error: None,
        },
        Err(e) => WittLine {
            r,
            kind: "extension",
            dim: 0,
            ok: false,
            error: Some(e.to_string()),
        },
    }
}

/// Two random simplices of `X_l` and the witness moving one onto the other.
pub fn transitivity_instance(spec: &FamilySpec, r: usize, l: usize, seed: u64, index: u64) -> WittLine {
    let mut rng = cell_rng(seed, &[family_key(spec), r as u64, l as u64, index, 9]);
    let run = |rng: &mut ChaCha8Rng| -> bcstab_core::error::Result<bool> {
        let v = spec.space(r)?;
        let x = random_simplex(&v, l, rng)?;
        let y = random_simplex(&v, l, rng)?;
        let g = transitivity_witness(&v, &x, &y)?;
        Ok(v.is_isometry(g.matrix()) && x.transform(&g) == y)
    };
    match run(&mut rng) {
        Ok(ok) => WittLine {
            r,
            kind: "transitivity",
            dim: l + 1,
            ok,
            error: None,
        },
        Err(e) => WittLine {
            r,
            kind: "transitivity",
            dim: l + 1,
            ok: false,
            error: Some(e.to_string()),
        },
    }
}

pub fn witt(spec: &FamilySpec, r: usize, samples: usize, seed: u64) -> Report {
    let mut report = Report::new("witt", Some(seed), json!({ "family": family_params(spec), "rank": r, "samples": samples }));
    let mut lines: Vec<WittLine> = (0..samples as u64).into_par_iter().map(|s| witt_instance(spec, r, seed, s)).collect();
    if r > 0 {
        lines.extend(
            (0..samples as u64)
                .into_par_iter()
                .map(|s| transitivity_instance(spec, r, s as usize % r, seed, s))
                .collect::<Vec<_>>(),
        );
    }
    report.pass = lines.iter().all(|l| l.ok);
    let count = |kind: &str| {
        (
            lines.iter().filter(|l| l.kind == kind && l.ok).count(),
            lines.iter().filter(|l| l.kind == kind).count(),
        )
    };
    let (e_ok, e_all) = count("extension");
    let (t_ok, t_all) = count("transitivity");
    report.text.push(format!("{} (d = {}), r = {}", spec.name, spec.d, r));
    report.text.push(format!("Witt extensions: {e_ok}/{e_all}"));
    report.text.push(format!("transitivity witnesses: {t_ok}/{t_all}"));
    report.result = json!({ "instances": lines });
    report
}

// trace

pub fn statement_string(s: &Statement) -> String {
    match *s {
        Statement::MainClaim { q, r } => format!("H^{q}(i_{r}) iso and H^{}(i_{r}) injective", q + 1),
        Statement::Iso { degree, rank } => format!("H^{degree}(i_{rank}) iso"),
        Statement::Inj { degree, rank } => format!("H^{degree}(i_{rank}) injective"),
        Statement::Range { q, r } => format!("range inequalities at (q, r) = ({q}, {r})"),
        Statement::BottomInjective { q, r } => format!("d_1^{{{},0}} injective at r = {r}", q + 2),
    }
}

fn certificate_json(c: &Certificate) -> Value {
    let nodes: Vec<Value> = c
        .nodes
        .iter()
        .enumerate()
        .map(|(id, n)| json!({ "id": id, "statement": statement_string(&n.statement), "justification": format!("{:?}", n.justification), "children": n.children }))
        .collect();
    json!({ "root": c.root, "depth": c.depth(), "nodes": nodes })
}

pub fn trace_report(spec: &FamilySpec, q: i64, r: i64) -> Report {
    let mut report = Report::new("trace", None, json!({ "family": family_params(spec), "q": q, "r": r }));
    let f = standard_ranges();
    let q0 = spec.q0() as i64;
    let decided = f.decide(q, r, q0).iso;
    match trace(q, r, q0, &f) {
        Ok(c) => {
            let zeros = c.second_page_zeros(bcstab_core::stability::tau);
            report.pass = decided && zeros && c.is_acyclic() && c.depth() as i64 <= (q - q0).max(0);
            report.text.push(format!(
                "certificate for (q, r) = ({q}, {r}), q0 = {q0}: {} nodes, depth {}",
                c.nodes.len(),
                c.depth()
            ));
            for (id, n) in c.nodes.iter().enumerate() {
                report.text.push(format!(
                    "  [{id}] {:?}: {} <- {:?}",
                    n.justification,
                    statement_string(&n.statement),
                    n.children
                ));
            }
            report.result = json!({ "certificate": certificate_json(&c), "second_page_zeros": zeros, "decide": decided });
        }
        Err(fail) => {
            report.pass = !decided;
            let name = match fail.inequality {
                bcstab_core::trace::Inequality::Gamma => "gamma",
                bcstab_core::trace::Inequality::Tau => "tau",
            };
            let at = fail.r + 1 - 2 * (fail.q - fail.j);
            report.text.push(format!(
                "no certificate for (q, r) = ({q}, {r}), q0 = {q0}; the closed form agrees: {}",
                !decided
            ));
            report.text.push(format!(
                "failing claim ({}, {}): {name}({at}) = {} < {} at j = {}",
                fail.q, fail.r, fail.value, fail.bound, fail.j
            ));
            report.result = json!({
                "certificate": Value::Null,
                "failure": { "q": fail.q, "r": fail.r, "j": fail.j, "inequality": name, "value": fail.value.to_string(), "bound": fail.bound },
                "decide": decided,
            });
        }
    }
    report
}

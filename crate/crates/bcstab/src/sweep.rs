//! The acceptance suite as eight named criteria.

use std::time::{Duration, Instant};

use bcstab_core::delta::DeltaVertex;
use bcstab_core::homotopy::expand_beta;
use bcstab_core::quillen::{Family, FamilySpec};
use bcstab_core::stability::{gamma, gamma_star, minimal_stable_rank, range_report, standard_ranges};
use bcstab_core::trace::cross_check;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{delta_line, formed_laws, homotopy_line, homotopy_mutations, kernel_cells, quillen_cells, transitivity_instance, witt_instance};
use crate::report::{markdown_table, Report};

pub const HOMOTOPY_L_MAX: usize = 5;
pub const HOMOTOPY_BUDGET: Duration = Duration::from_secs(60);
pub const STAR_N_MAX: usize = 5;
pub const CHAIN_COUNT_N_MAX: usize = 6;
pub const QUILLEN_R_MAX: usize = 6;
pub const QUILLEN_SAMPLES: usize = 20;
pub const RANGE_Q_MAX: u32 = 8;
pub const TRACE_Q_MAX: i64 = 8;
pub const TRACE_R_MAX: i64 = 300;
pub const TRACE_BUDGET: Duration = Duration::from_secs(30);
pub const WITT_INSTANCES: usize = 100;
pub const WITT_R_MAX: usize = 4;
pub const TRANSITIVITY_INSTANCES: usize = 50;
pub const TRANSITIVITY_R_MAX: usize = 5;
pub const FORMED_RANK: usize = 3;
pub const FORMED_SAMPLES_PER_FAMILY: usize = 6;
pub const CONFIGURATIONS_MIN: usize = 50;

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> (bool, Value)) -> Criterion {
    let start = Instant::now();
    let (pass, detail) = f();
    Criterion {
        id,
        title,
        pass,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn homotopy_identity() -> Criterion {
    timed(1, "homotopy identity", || {
        let start = Instant::now();
        let lines: Vec<_> = (0..=HOMOTOPY_L_MAX).map(homotopy_line).collect();
        let within_budget = start.elapsed() < HOMOTOPY_BUDGET;
        let mutations: Vec<(usize, usize, usize)> = (0..=HOMOTOPY_L_MAX)
            .map(|l| {
                let (tried, broken) = homotopy_mutations(l, 1);
                (l, tried, broken)
            })
            .collect();
        let pass = lines.iter().all(|l| l.ok && l.residual_terms == 0) && within_budget && mutations.iter().all(|&(_, t, b)| t > 0 && t == b);
        (pass, json!({ "rows": lines, "within_budget": within_budget, "mutations": mutations }))
    })
}

type Term = (i8, Vec<DeltaVertex>);

fn set(elements: &[u32]) -> DeltaVertex {
    DeltaVertex::set(elements)
}

/// The five signed chains of `β²` and the two of `β¹`.
pub fn expected_beta_terms() -> (Vec<Term>, Vec<Term>) {
    use DeltaVertex::Element as E;
    let beta2 = vec![
        (1, vec![E(0), E(1), set(&[0, 1])]),
        (-1, vec![E(0), set(&[0]), set(&[0, 1])]),
        (1, vec![set(&[]), set(&[0]), set(&[0, 1])]),
        (-1, vec![set(&[]), set(&[1]), set(&[0, 1])]),
        (1, vec![E(1), set(&[1]), set(&[0, 1])]),
    ];
    let beta1 = vec![(1, vec![set(&[]), set(&[0])]), (-1, vec![E(0), set(&[0])])];
    (beta2, beta1)
}

fn sorted_terms(l: isize) -> Vec<Term> {
    let mut v: Vec<Term> = expand_beta(l).into_iter().map(|(s, c)| (s, c.vertices().to_vec())).collect();
    v.sort();
    v
}

pub fn sign_calculus() -> Criterion {
    timed(2, "sign calculus", || {
        let (mut beta2, mut beta1) = expected_beta_terms();
        beta2.sort();
        beta1.sort();
        let got2 = sorted_terms(1);
        let got1 = sorted_terms(0);
        let show = |v: &[Term]| {
            v.iter()
                .map(|(s, c)| {
                    format!(
                        "{}({})",
                        if *s > 0 { "+" } else { "-" },
                        c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                    )
                })
                .collect::<Vec<_>>()
        };
        (got2 == beta2 && got1 == beta1, json!({ "beta2": show(&got2), "beta1": show(&got1) }))
    })
}

pub fn star_sizes() -> Criterion {
    timed(3, "star sizes and chain counts", || {
        let lines: Vec<_> = (0..=CHAIN_COUNT_N_MAX).map(delta_line).collect();
        let pass = lines.iter().all(|l| l.top_chains == l.recurrence)
            && lines
                .iter()
                .filter(|l| l.n <= STAR_N_MAX)
                .all(|l| l.star_sizes && l.relative_star_sizes && l.sign_cancellation);
        (pass, json!({ "rows": lines }))
    })
}

pub fn quillen_sweep(seed: u64) -> Criterion {
    timed(4, "Quillen sweep", || {
        let mut pass = true;
        let mut families = Vec::new();
        for spec in FamilySpec::sweep_grid() {
            let mut cells = 0;
            let mut failed = Vec::new();
            let mut kernels_ok = true;
            for r in 2..=QUILLEN_R_MAX {
                for c in quillen_cells(&spec, r, QUILLEN_SAMPLES, seed) {
                    cells += 1;
                    if !c.pass() {
                        failed.push(json!({ "r": r, "q": c.q, "i": c.i, "error": c.error }));
                    }
                }
                kernels_ok &= kernel_cells(&spec, r, QUILLEN_SAMPLES, seed).iter().all(|k| k.pass());
            }
            pass &= failed.is_empty() && kernels_ok;
            families.push(json!({ "family": spec.family.code(), "d": spec.d, "cells": cells, "failed": failed, "kernels": kernels_ok }));
        }
        (pass, json!({ "seed": seed, "samples": QUILLEN_SAMPLES, "families": families }))
    })
}

pub fn range_reproduction() -> Criterion {
    timed(5, "range reproduction", || {
        let f = standard_ranges();
        let mut pass = true;
        let mut regimes = Vec::new();
        for spec in [FamilySpec::new(Family::Sp, 0).expect("sp"), FamilySpec::new(Family::OR, 1).expect("oR")] {
            let rep = range_report(spec, RANGE_Q_MAX);
            let q0 = rep.q0;
            let expected_rows = (q0 + 1..=RANGE_Q_MAX).count();
            let formula = rep
                .rows
                .iter()
                .all(|row| row.r0 == 2 * gamma_star(row.q) && row.r1 == (row.q >= q0 + 2).then(|| 2 * gamma_star(row.q - 1)));
            let by_decide = rep.rows.iter().all(|row| {
                minimal_stable_rank(&f, row.q as i64, q0 as i64, 2 * row.r0) == Some(row.r0)
                    && row.r1.is_none_or(|r1| minimal_stable_rank(&f, row.q as i64 - 1, q0 as i64, 2 * r1) == Some(r1))
            });
            let spots = [(3, 20), (4, 38), (5, 70)]
                .iter()
                .all(|&(q, r0)| rep.rows.iter().any(|row| row.q == q && row.r0 == r0));
            pass &= rep.rows.len() == expected_rows && formula && by_decide && spots && rep.exponential_bound;
            let r0: Vec<_> = rep.rows.iter().map(|row| (row.q, row.r0, row.r1)).collect();
            regimes.push(json!({ "family": spec.family.code(), "q0": q0, "rows": r0, "decide_agrees": by_decide }));
        }
        let gamma_void = (-8..=4).all(|r| gamma(r).finite().is_none()) && gamma(5) == 0;
        pass &= gamma_void;
        (pass, json!({ "regimes": regimes, "gamma_neg_inf_exactly_for_r_le_4": gamma_void }))
    })
}

pub fn oracle_equivalence() -> Criterion {
    timed(6, "oracle equivalence", || {
        let start = Instant::now();
        let sp = cross_check(TRACE_Q_MAX, TRACE_R_MAX, &FamilySpec::new(Family::Sp, 0).expect("sp"));
        let or = cross_check(TRACE_Q_MAX, TRACE_R_MAX, &FamilySpec::new(Family::OR, 1).expect("oR"));
        let within_budget = start.elapsed() < TRACE_BUDGET;
        (sp && or && within_budget, json!({ "q0_2": sp, "q0_1": or, "within_budget": within_budget }))
    })
}

pub fn witt_transitivity(seed: u64) -> Criterion {
    timed(7, "Witt extension and transitivity", || {
        let grid = FamilySpec::sweep_grid();
        let extensions: Vec<_> = (0..WITT_INSTANCES)
            .map(|s| witt_instance(&grid[s % grid.len()], 1 + s % WITT_R_MAX, seed, s as u64))
            .collect();
        let witnesses: Vec<_> = (0..TRANSITIVITY_INSTANCES)
            .map(|s| {
                let r = 1 + s % TRANSITIVITY_R_MAX;
                transitivity_instance(&grid[s % grid.len()], r, (s / TRANSITIVITY_R_MAX) % r, seed, s as u64)
            })
            .collect();
        let e_ok = extensions.iter().filter(|l| l.ok).count();
        let t_ok = witnesses.iter().filter(|l| l.ok).count();
        let errors: Vec<_> = extensions.iter().chain(&witnesses).filter_map(|l| l.error.clone()).collect();
        (
            e_ok == WITT_INSTANCES && t_ok == TRANSITIVITY_INSTANCES,
            json!({ "seed": seed, "extensions": [e_ok, WITT_INSTANCES], "transitivity": [t_ok, TRANSITIVITY_INSTANCES], "errors": errors }),
        )
    })
}

pub fn formed_space_laws(seed: u64) -> Criterion {
    timed(8, "formed-space laws", || {
        let mut pass = true;
        let mut configurations = 0;
        let mut families = Vec::new();
        for spec in FamilySpec::sweep_grid() {
            match formed_laws(&spec, FORMED_RANK, FORMED_SAMPLES_PER_FAMILY, seed) {
                Ok(laws) => {
                    pass &= laws.pass();
                    configurations += laws.configurations.1;
                    families.push(json!({ "family": spec.family.code(), "d": spec.d, "laws": laws }));
                }
                Err(e) => {
                    pass = false;
                    families.push(json!({ "family": spec.family.code(), "d": spec.d, "error": e.to_string() }));
                }
            }
        }
        (
            pass && configurations >= CONFIGURATIONS_MIN,
            json!({ "seed": seed, "configurations": configurations, "families": families }),
        )
    })
}

pub fn run_all(seed: u64) -> Vec<Criterion> {
    vec![
        homotopy_identity(),
        sign_calculus(),
        star_sizes(),
        quillen_sweep(seed),
        range_reproduction(),
        oracle_equivalence(),
        witt_transitivity(seed),
        formed_space_laws(seed),
    ]
}

pub fn sweep(seed: u64) -> (Report, Vec<Criterion>) {
    let mut report = Report::new("sweep", Some(seed), json!({}));
    let criteria = run_all(seed);
    report.pass = criteria.iter().all(|c| c.pass);
    for c in &criteria {
        report
            .text
            .push(format!("{} criterion {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.title));
    }
    let rows: Vec<Vec<String>> = criteria
        .iter()
        .map(|c| vec![c.id.to_string(), c.title.to_string(), if c.pass { "PASS" } else { "FAIL" }.to_string()])
        .collect();
    report.markdown = Some(markdown_table(&["#", "criterion", "status"], &rows));
    report.result = json!({ "criteria": criteria });
    (report, criteria)
}

//! End-to-end checks of the headline values: generate, build or load a
//! witness, evaluate it exactly, and cross-check with the oracle.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use tropsec::bounds::eval_voronoi_partition;
use tropsec::codes::{
    code_from_parity_check, code_to_segre_witness, grassmann_code_bound, greedy_constant_weight_code,
    random_distance_code, rook_bound, veronese_corner_bound, veronese_corner_witness,
};
use tropsec::models::{binomial, segre_config, veronese_config};
use tropsec::oracle::stable_dim;
use tropsec::rational::frac;
use tropsec::search::{
    anneal, extend_veronese_witness, midpoint_chain_witness, perturb_witness, veronese_m3_expected,
    veronese_m3_full_witness, veronese_m3_witness, veronese_witness_for_k, SearchParams, BUNDLED_DEGREES,
};
use tropsec::{GramForm, ModelDescriptor, Problem, RationalPoint, Witness};

use crate::error::CliResult;

/// The parity-check matrix of the `(P^1)^6` code.
pub const SEGRE_CHECK: [[usize; 6]; 3] = [[1, 1, 0, 1, 0, 0], [1, 0, 1, 0, 1, 0], [0, 1, 1, 0, 0, 1]];

/// Random distance-3 codes per length in the code-bounds target.
pub const RANDOM_CODES_PER_LENGTH: u64 = 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub target: String,
    pub rows: Vec<Row>,
    pub passed: bool,
}

impl Report {
    fn new(target: &str, rows: Vec<Row>) -> Self {
        let passed = rows.iter().all(|r| r.pass);
        Report {
            target: target.to_string(),
            rows,
            passed,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.case.len()).max().unwrap_or(4).max(4);
        let e = self.rows.iter().map(|r| r.expected.len()).max().unwrap_or(8).max(8);
        let o = self.rows.iter().map(|r| r.observed.len()).max().unwrap_or(8).max(8);
        let mut out = String::new();
        let _ = writeln!(out, "{:<w$}  {:<e$}  {:<o$}  status", "case", "expected", "observed");
        for r in &self.rows {
            let status = if r.pass { "ok" } else { "FAIL" };
            let _ = writeln!(out, "{:<w$}  {:<e$}  {:<o$}  {status}", r.case, r.expected, r.observed);
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{}: {} of {} rows passed", self.target, self.rows.len() - failed, self.rows.len());
        out
    }
}

fn row(case: String, expected: impl ToString, observed: impl ToString, pass: bool) -> Row {
    Row {
        case,
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass,
    }
}

fn exact(case: String, expected: usize, observed: usize) -> Row {
    row(case, expected, observed, expected == observed)
}

/// Tropical total and oracle dimension must both equal the expected value.
fn checked(case: String, expected: usize, tropical: CliResult<usize>, oracle: CliResult<usize>) -> Row {
    match (tropical, oracle) {
        (Ok(t), Ok(o)) => row(case, expected, format!("{t} / oracle {o}"), t == expected && o == expected),
        (Err(e), _) | (_, Err(e)) => row(case, expected, format!("error: {e}"), false),
    }
}

fn oracle_dim(desc: &ModelDescriptor, k: usize, trials: usize, seed: u64) -> CliResult<usize> {
    Ok(stable_dim(desc, k, trials, seed)?.reported_dim)
}

/// Binary forms of degree `1..=dmax`: midpoint-seeded search reaches
/// `min(2k, d + 1)` for every `k` up to one past saturation.
pub fn binary_forms(dmax: usize, seed: u64, trials: usize) -> CliResult<Report> {
    let g = GramForm::standard(2);
    let params = SearchParams {
        seed,
        restarts: 1,
        steps: 200,
        ..SearchParams::default()
    };
    let mut rows = Vec::new();
    for d in 1..=dmax {
        let config = veronese_config(2, d)?;
        let desc = ModelDescriptor::binary_forms(d)?;
        for k in 1..=(d + 1).div_ceil(2) + 1 {
            let expected = (2 * k).min(d + 1);
            let tropical = (|| {
                let seedw = midpoint_chain_witness(d, k)?;
                let out = anneal(&config, k, Problem::Voronoi, &params, &[seedw], Some(&g))?;
                Ok(out.total())
            })();
            rows.push(checked(format!("d={d} k={k}"), expected, tropical, oracle_dim(&desc, k, trials, seed)));
        }
    }
    Ok(Report::new("binary-forms", rows))
}

fn first_full_k(d: usize) -> usize {
    let n = binomial(d + 2, 2);
    (1..).find(|&k| veronese_m3_expected(d, k) >= n).expect("saturates")
}

/// Planar Veronese: bundled witnesses for `d <= 8`, the extension
/// construction above, and the oracle for every `(d, k)` up to saturation.
pub fn veronese_m3(dmax: usize, seed: u64, trials: usize) -> CliResult<Report> {
    let g = GramForm::standard(3);
    let mut full: BTreeMap<usize, Witness> = BTreeMap::new();
    let mut rows = Vec::new();
    for d in 1..=dmax {
        let config = veronese_config(3, d)?;
        let desc = ModelDescriptor::veronese(3, d)?;
        let bundled = BUNDLED_DEGREES.contains(&d);
        if !bundled {
            let source = d - if d % 3 == 2 { 6 } else { 2 };
            let extended = full
                .get(&source)
                .ok_or_else(|| tropsec::Error::Verification(format!("no full witness of degree {source}")))
                .and_then(|w| extend_veronese_witness(w, d));
            match extended {
                Ok(w) => {
                    full.insert(d, w);
                }
                Err(e) => {
                    rows.push(row(format!("d={d} extension"), "verified", format!("error: {e}"), false));
                    continue;
                }
            }
        } else {
            full.insert(d, veronese_m3_full_witness(d)?);
        }
        for k in 1..=first_full_k(d) {
            let expected = veronese_m3_expected(d, k);
            let witness = if bundled {
                veronese_m3_witness(d, k)
            } else {
                veronese_witness_for_k(&full[&d], d, k)
            };
            let tropical = witness
                .and_then(|w| eval_voronoi_partition(&config, &w, &g))
                .map(|r| r.total)
                .map_err(Into::into);
            let mut oracle = oracle_dim(&desc, k, trials, seed);
            if expected < 3 * k {
                // defective cases: a second seed must agree
                let again = oracle_dim(&desc, k, trials, seed.wrapping_add(1));
                if let (Ok(a), Ok(b)) = (&oracle, &again) {
                    if a != b {
                        oracle = Err(tropsec::Error::Verification(format!("seeds disagree: {a} vs {b}")).into());
                    }
                }
            }
            rows.push(checked(format!("d={d} k={k}"), expected, tropical, oracle));
        }
    }
    Ok(Report::new("veronese-m3", rows))
}

/// The nine-site witness on `(P^1)^6` built from the parity-check code.
pub fn segre_witness() -> CliResult<Witness> {
    let h: Vec<Vec<usize>> = SEGRE_CHECK.iter().map(|r| r.to_vec()).collect();
    let code = code_from_parity_check(&h, 2)?;
    Ok(code_to_segre_witness(&code, &[RationalPoint::new(vec![frac(1, 2); 6])])?)
}

pub fn segre_p1_6(seed: u64, trials: usize) -> CliResult<Report> {
    let h: Vec<Vec<usize>> = SEGRE_CHECK.iter().map(|r| r.to_vec()).collect();
    let code = code_from_parity_check(&h, 2)?;
    let config = segre_config(6, 2, true)?;
    let r = eval_voronoi_partition(&config, &segre_witness()?, &GramForm::standard(6))?;
    let mut complements: Vec<String> = code
        .words()
        .iter()
        .map(|w| w.iter().map(|s| if *s == 0 { '1' } else { '0' }).collect())
        .collect();
    complements.sort();
    let mut centre = r.winning_sets.last().cloned().unwrap_or_default();
    centre.sort();
    let desc = ModelDescriptor::segre(6, 2)?;
    let rows = vec![
        exact("codewords".into(), 8, code.len()),
        exact("minimum distance".into(), 3, code.min_distance()),
        exact("rook bound".into(), 56, rook_bound(&code)),
        exact("witness total".into(), 63, r.total),
        exact("ties".into(), 0, r.ties.len()),
        row(
            "centre cell".into(),
            complements.join(" "),
            centre.join(" "),
            centre == complements,
        ),
        match oracle_dim(&desc, 9, trials, seed) {
            Ok(o) => exact("oracle dim 9C".into(), 63, o),
            Err(e) => row("oracle dim 9C".into(), 63, format!("error: {e}"), false),
        },
    ];
    Ok(Report::new("segre-p1-6", rows))
}

fn perturbed_total(config: &tropsec::PointConfig, w: &Witness) -> CliResult<usize> {
    let g = GramForm::standard(config.ambient_dim());
    let p = perturb_witness(w, config, &g)?;
    Ok(eval_voronoi_partition(config, &p, &g)?.total)
}

fn at_least(case: String, bound: usize, total: CliResult<usize>) -> Row {
    match total {
        Ok(t) => row(case, format!(">= {bound}"), t, t >= bound),
        Err(e) => row(case, format!(">= {bound}"), format!("error: {e}"), false),
    }
}

/// Perturbed corner and code witnesses against the closed-form counts, and
/// constant-weight code counts against the oracle.
pub fn code_bounds(seed: u64, trials: usize) -> CliResult<Report> {
    let mut rows = Vec::new();
    for m in 2..=4 {
        for d in 1..=4 {
            let config = veronese_config(m, d)?;
            for k in 1..=m {
                let corners: Vec<usize> = (1..=k).collect();
                let bound = veronese_corner_bound(&corners, m, d)?;
                let total = veronese_corner_witness(&corners, m, d)
                    .map_err(Into::into)
                    .and_then(|w| perturbed_total(&config, &w));
                rows.push(at_least(format!("veronese m={m} d={d} k={k}"), bound, total));
            }
        }
    }
    for d in 1..=5 {
        let config = segre_config(d, 2, true)?;
        for s in 0..RANDOM_CODES_PER_LENGTH {
            let code_seed = seed.wrapping_mul(1000).wrapping_add(100 * d as u64 + s);
            let code = random_distance_code(2, d, 3, 1 + (s as usize % 4), code_seed)?;
            let total = code_to_segre_witness(&code, &[])
                .map_err(Into::into)
                .and_then(|w| perturbed_total(&config, &w));
            rows.push(at_least(format!("segre d={d} code#{s} |B|={}", code.len()), rook_bound(&code), total));
        }
    }
    for (m, d) in [(6, 2), (6, 3), (7, 3), (8, 3), (8, 4)] {
        let code = greedy_constant_weight_code(m, d, 6)?;
        let bound = grassmann_code_bound(&code)?;
        let case = format!("grassmann m={m} d={d} |B|={}", code.len());
        let desc = ModelDescriptor::grassmannian(m, d)?;
        match oracle_dim(&desc, code.len(), trials, seed) {
            Ok(o) => rows.push(row(case, format!("<= {o}"), bound, bound <= o)),
            Err(e) => rows.push(row(case, bound, format!("error: {e}"), false)),
        }
    }
    Ok(Report::new("code-bounds", rows))
}

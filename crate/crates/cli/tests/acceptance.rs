//! Acceptance run: one line per criterion with the observed values, the
//! elapsed time and the time limit. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropsec::bounds::{
    affine_to_linear_witness, eval_affine_partition, eval_linear_partition, eval_voronoi_partition, evaluate,
    voronoi_to_affine_certified,
};
use tropsec::models::{binomial, grassmann_config, segre_config, veronese_config, LabelledSet};
use tropsec::oracle::{terracini_dim, DEFAULT_PRIMES};
use tropsec::rational::{frac, int};
use tropsec::search::{
    anneal, extend_veronese_witness, seeds_for, veronese_m3_expected, veronese_m3_full_witness,
    veronese_witness_for_k, SearchParams,
};
use tropsec::{affine_dim, GramForm, ModelDescriptor, PointConfig, Problem, RationalPoint, Witness};
use tropsec_cli::render::render_svg;
use tropsec_cli::reproduce::{self, Report};

const SEED: u64 = 0;
const ORACLE_TRIALS: usize = 2;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }

    fn from_report(report: Report) -> Self {
        let failed: Vec<String> = report.failures().map(|r| format!("{}: {}", r.case, r.observed)).collect();
        let detail = if failed.is_empty() {
            format!("{} rows matched", report.rows.len())
        } else {
            format!("{} of {} rows failed; first: {}", failed.len(), report.rows.len(), failed[0])
        };
        Outcome::new(report.passed, detail)
    }
}

type Check = fn() -> Result<Outcome, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn binary_forms() -> Result<Outcome, String> {
    reproduce::binary_forms(12, SEED, ORACLE_TRIALS).map(Outcome::from_report).map_err(err)
}

fn veronese_bundled() -> Result<Outcome, String> {
    let report = reproduce::veronese_m3(8, SEED, ORACLE_TRIALS).map_err(err)?;
    let defects: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.case == "d=2 k=2" || r.case == "d=4 k=5")
        .map(|r| format!("{} -> {}", r.case, r.observed))
        .collect();
    let mut out = Outcome::from_report(report);
    out.detail = format!("{}; defects {}", out.detail, defects.join(", "));
    Ok(out)
}

fn veronese_extension() -> Result<Outcome, String> {
    let g = GramForm::standard(3);
    let mut checked = 0;
    for (source, target) in [(7, 9), (8, 10), (5, 11)] {
        let full = extend_veronese_witness(&veronese_m3_full_witness(source).map_err(err)?, target).map_err(err)?;
        let config = veronese_config(3, target).map_err(err)?;
        let n = config.len();
        for k in 1..=n.div_ceil(3) + 1 {
            let w = veronese_witness_for_k(&full, target, k).map_err(err)?;
            let total = eval_voronoi_partition(&config, &w, &g).map_err(err)?.total;
            let expected = veronese_m3_expected(target, k);
            if total != expected || expected != (3 * k).min(n) {
                return Ok(Outcome::new(false, format!("d={target} k={k}: {total} != {expected}")));
            }
            checked += 1;
        }
    }
    Ok(Outcome::new(true, format!("d = 9, 10, 11 non-defective over {checked} (d, k) pairs")))
}

fn segre() -> Result<Outcome, String> {
    reproduce::segre_p1_6(SEED, ORACLE_TRIALS).map(Outcome::from_report).map_err(err)
}

fn code_bounds() -> Result<Outcome, String> {
    let report = reproduce::code_bounds(SEED, ORACLE_TRIALS).map_err(err)?;
    let instances = report.rows.len();
    let mut out = Outcome::from_report(report);
    out.pass &= instances >= 200;
    Ok(out)
}

fn soundness_grid() -> Vec<ModelDescriptor> {
    let mut models = Vec::new();
    for m in 2..=4 {
        for d in 1..=4 {
            models.push(ModelDescriptor::veronese(m, d).unwrap());
        }
    }
    for m in 2..=3 {
        for d in 1..=4 {
            models.push(ModelDescriptor::segre(d, m).unwrap());
        }
    }
    for m in 4..=6 {
        models.push(ModelDescriptor::grassmannian(m, 2).unwrap());
    }
    models.push(ModelDescriptor::segre_veronese(vec![(2, 2), (2, 1)]).unwrap());
    models.push(ModelDescriptor::segre_veronese(vec![(3, 2), (2, 1)]).unwrap());
    models
}

fn soundness() -> Result<Outcome, String> {
    let params = SearchParams {
        seed: SEED,
        restarts: 1,
        steps: 60,
        ..SearchParams::default()
    };
    let mut instances = 0;
    for model in soundness_grid() {
        let config = model.config();
        let problem = if config.all_singletons() { Problem::Voronoi } else { Problem::Linear };
        for k in 1..=8 {
            let seeds = if problem == Problem::Voronoi { seeds_for(&model, k).map_err(err)? } else { vec![] };
            let total = anneal(&config, k, problem, &params, &seeds, None).map_err(err)?.total();
            let a = terracini_dim(&model, k, DEFAULT_PRIMES[0], ORACLE_TRIALS, SEED).map_err(err)?;
            let b = terracini_dim(&model, k, DEFAULT_PRIMES[1], ORACLE_TRIALS, SEED).map_err(err)?;
            let cap = tropsec::models::expected_secant_dim(&model, k);
            if a.reported_dim != b.reported_dim || total > a.reported_dim || a.reported_dim > cap {
                return Ok(Outcome::new(
                    false,
                    format!(
                        "{model} k={k}: witness {total}, oracle {} / {}, cap {cap}",
                        a.reported_dim, b.reported_dim
                    ),
                ));
            }
            instances += 1;
        }
    }
    Ok(Outcome::new(true, format!("witness <= oracle <= expected on {instances} instances")))
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, lo: i64, hi: i64) -> RationalPoint {
    RationalPoint::new((0..dim).map(|_| int(rng.gen_range(lo..=hi))).collect())
}

fn random_site(rng: &mut ChaCha8Rng, dim: usize) -> RationalPoint {
    RationalPoint::new((0..dim).map(|_| frac(rng.gen_range(-12..=12), rng.gen_range(1..=4))).collect())
}

/// Sets of lattice points on `sum x = level` with nonnegative coordinates.
fn hyperplane_config(rng: &mut ChaCha8Rng) -> PointConfig {
    let dim = rng.gen_range(2..=4);
    let level = rng.gen_range(2..=5);
    let sets = (0..rng.gen_range(3..=8))
        .map(|b| {
            let points = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let mut c = vec![0i64; dim];
                    for _ in 0..level {
                        c[rng.gen_range(0..dim)] += 1;
                    }
                    RationalPoint::from_ints(&c)
                })
                .collect();
            LabelledSet {
                label: format!("A{b}"),
                points,
            }
        })
        .collect();
    PointConfig::new(dim, sets).unwrap()
}

fn interrelations() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for case in 0..100 {
        let config = hyperplane_config(&mut rng);
        let dim = config.ambient_dim();
        let k = rng.gen_range(1..=4);
        let sites: Vec<RationalPoint> = (0..k).map(|_| random_site(&mut rng, dim)).collect();
        let linear = eval_linear_partition(&config, &Witness::sites(sites.clone()).map_err(err)?).map_err(err)?;
        let zero = Witness::new(sites.clone(), Some(vec![int(0); k])).map_err(err)?;
        let affine = eval_affine_partition(&config, &zero).map_err(err)?;
        if linear.winning_sets != affine.winning_sets || linear.total != affine.total {
            return Ok(Outcome::new(false, format!("hyperplane case {case}: zero-offset mismatch")));
        }
        let offsets = (0..k).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
        let w = Witness::new(sites, Some(offsets)).map_err(err)?;
        let (h, c) = config.sum_hyperplane().ok_or("configuration off the hyperplane")?;
        let folded = affine_to_linear_witness(&w, (&h, &c)).map_err(err)?;
        let before = eval_affine_partition(&config, &w).map_err(err)?;
        let after = eval_linear_partition(&config, &folded).map_err(err)?;
        if before.winning_sets != after.winning_sets {
            return Ok(Outcome::new(false, format!("hyperplane case {case}: round trip changed winners")));
        }
    }
    for case in 0..50 {
        let dim = rng.gen_range(1..=3);
        let mut points: Vec<RationalPoint> = (0..rng.gen_range(3..=10)).map(|_| random_point(&mut rng, dim, -4, 4)).collect();
        points.sort();
        points.dedup();
        let config = PointConfig::from_points(dim, points).map_err(err)?;
        let k = rng.gen_range(1..=4);
        let w = Witness::sites((0..k).map(|_| random_site(&mut rng, dim)).collect()).map_err(err)?;
        let g = GramForm::standard(dim);
        let voronoi = eval_voronoi_partition(&config, &w, &g).map_err(err)?;
        let (converted, _) = voronoi_to_affine_certified(&config, &w, &g, &int(1), 24).map_err(err)?;
        let affine = eval_affine_partition(&config, &converted).map_err(err)?;
        if affine.total < voronoi.total {
            return Ok(Outcome::new(
                false,
                format!("singleton case {case}: affine {} < voronoi {}", affine.total, voronoi.total),
            ));
        }
    }
    Ok(Outcome::new(true, "100 hyperplane and 50 singleton configurations"))
}

fn invariants() -> Result<Outcome, String> {
    for m in 2..=4 {
        for d in 1..=5 {
            if veronese_config(m, d).map_err(err)?.len() != binomial(d + m - 1, m - 1) {
                return Ok(Outcome::new(false, format!("veronese({m},{d}) count")));
            }
        }
        for d in 1..=4 {
            if segre_config(d, m, false).map_err(err)?.len() != m.pow(d as u32) {
                return Ok(Outcome::new(false, format!("segre({d},{m}) count")));
            }
        }
    }
    for (m, d) in [(4, 2), (5, 2), (6, 3)] {
        let c = grassmann_config(m, d).map_err(err)?;
        let fact: usize = (1..=d).product();
        if c.len() != binomial(m, d) || c.sets().iter().any(|s| s.points.len() != fact) {
            return Ok(Outcome::new(false, format!("grassmann({m},{d}) count")));
        }
    }
    if affine_dim(&[]).map_err(err)? != -1 || affine_dim(&[RationalPoint::from_ints(&[1, 2])]).map_err(err)? != 0 {
        return Ok(Outcome::new(false, "affine_dim conventions"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    for case in 0..40 {
        let config = veronese_config(3, rng.gen_range(1..=4)).map_err(err)?;
        let w = Witness::sites((0..3).map(|_| random_site(&mut rng, 3)).collect()).map_err(err)?;
        let lin = eval_linear_partition(&config, &w).map_err(err)?;
        let scaled = eval_linear_partition(&config, &w.scaled(&frac(rng.gen_range(1..=9), rng.gen_range(1..=9)))).map_err(err)?;
        let t = random_site(&mut rng, 3);
        let moved = PointConfig::from_points(3, config.all_points().iter().map(|p| p.add(&t)).collect()).map_err(err)?;
        let g = GramForm::standard(3);
        let vor = eval_voronoi_partition(&config, &w, &g).map_err(err)?;
        let vor_moved = eval_voronoi_partition(&moved, &w.translated(&t), &g).map_err(err)?;
        if lin.winning_sets != scaled.winning_sets
            || lin.total != scaled.total
            || vor.total != vor_moved.total
            || vor.winners != vor_moved.winners
        {
            return Ok(Outcome::new(false, format!("invariance case {case}")));
        }
    }

    let model = ModelDescriptor::veronese(3, 3).map_err(err)?;
    let params = SearchParams {
        seed: 17,
        restarts: 3,
        steps: 120,
        ..SearchParams::default()
    };
    let run = || anneal(&model.config(), 3, Problem::Voronoi, &params, &[], None);
    if run().map_err(err)? != run().map_err(err)? {
        return Ok(Outcome::new(false, "search not deterministic"));
    }

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let read = |name: &str| std::fs::read_to_string(golden.join(name)).map_err(err);
    let config: PointConfig = serde_json::from_str(&read("veronese_3_2.config.json")?).map_err(err)?;
    let w: Witness = serde_json::from_str(&read("veronese_3_2_k3.witness.json")?).map_err(err)?;
    let r = evaluate(Problem::Voronoi, &config, &w, None).map_err(err)?;
    let mut sizes: Vec<usize> = r.winning_sets.iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let svg = render_svg(&config, &w, &r).map_err(err)?;
    if sizes != [3, 2, 1] || svg != read("veronese_3_2_k3.svg")? {
        return Ok(Outcome::new(false, format!("golden figure: classes {sizes:?}")));
    }
    Ok(Outcome::new(true, "counts, conventions, invariances, determinism, golden SVG"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 8] = [
        ("binary forms: midpoint search = min(2k, d+1), d <= 12", binary_forms, 10),
        ("veronese m=3 bundled witnesses and oracle, d <= 8", veronese_bundled, 60),
        ("veronese m=3 extension to d = 9, 10, 11", veronese_extension, 120),
        ("segre (P^1)^6: code, rook bound 56, total 63, oracle 63", segre, 30),
        ("perturbed code witnesses >= closed-form bounds", code_bounds, 60),
        ("witness <= oracle <= expected over the grid", soundness, 300),
        ("linear/affine/voronoi interrelations", interrelations, 60),
        ("counts, invariants, determinism, golden SVG", invariants, 30),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {}: {name} | {} | {:.2} s (limit {limit} s{})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" },
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

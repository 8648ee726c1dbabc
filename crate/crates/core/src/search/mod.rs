//! Witness search: exhaustive enumeration at small scale, seeded simulated
//! annealing, tie-breaking perturbation and the Veronese `m = 3` witnesses.

mod seeders;
mod veronese;

pub use seeders::{far_dummy_sites, midpoint_chain_witness, pad_with_dummies, pairwise_midpoints, seeds_for};
pub use veronese::{
    extend_veronese_witness, find_packing, for_each_packing, packing_witness, packing_witness_for,
    realise_packing, veronese_m3_expected, veronese_m3_full_witness, veronese_m3_witness,
    veronese_witness_for_k, BundledWitness, BundledWitnesses, Piece, PieceKinds, BUNDLED_DEGREES,
};

use itertools::Itertools;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate, total_cap, PartitionResult, Problem, Witness};
use crate::error::{Error, Result};
use crate::geometry::{dist_sq_unchecked, GramForm};
use crate::models::PointConfig;
use crate::rational::{int, serde_rational, Rational, RationalPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    pub seed: u64,
    pub restarts: usize,
    pub steps: usize,
    #[serde(with = "serde_rational")]
    pub initial_step_size: Rational,
    #[serde(with = "serde_rational")]
    pub cooling: Rational,
    pub candidate_grid_denominator: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            seed: 0,
            restarts: 8,
            steps: 3000,
            initial_step_size: int(1),
            cooling: Rational::new(997.into(), 1000.into()),
            candidate_grid_denominator: 6,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.steps == 0 {
            return Err(Error::param("restarts and steps must be at least 1"));
        }
        if self.cooling <= Rational::zero() || self.cooling >= Rational::one() {
            return Err(Error::param("cooling must lie strictly between 0 and 1"));
        }
        if self.candidate_grid_denominator == 0 {
            return Err(Error::param("grid denominator must be positive"));
        }
        if self.initial_step_size <= Rational::zero() {
            return Err(Error::param("initial step size must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: u64,
    pub value: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_witness: Witness,
    pub best_result: PartitionResult,
    pub trace: Vec<TraceEntry>,
}

impl SearchOutcome {
    pub fn total(&self) -> usize {
        self.best_result.total
    }
}

pub const DEFAULT_BUDGET: u128 = 2_000_000;

const AFFINE_OFFSET_GRID: [i64; 3] = [-1, 0, 1];

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Evaluate every `k`-subset of `candidates` (for the affine problem, with
/// offsets from `{-1, 0, 1}` and the first offset fixed at 0) and keep the
/// first witness of maximal total in enumeration order.
pub fn brute_force(
    config: &PointConfig,
    k: usize,
    problem: Problem,
    candidates: &[RationalPoint],
    g: Option<&GramForm>,
    budget: u128,
) -> Result<SearchOutcome> {
    if k == 0 || k > candidates.len() {
        return Err(Error::param(format!(
            "need 1 <= k <= {} candidates, got k={k}",
            candidates.len()
        )));
    }
    let offset_patterns = if problem == Problem::Affine {
        (AFFINE_OFFSET_GRID.len() as u128).pow(k as u32 - 1)
    } else {
        1
    };
    let required = binomial_u128(candidates.len(), k).saturating_mul(offset_patterns);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let offset_lists: Vec<Option<Vec<Rational>>> = match problem {
        Problem::Affine if k == 1 => vec![Some(vec![Rational::zero()])],
        Problem::Affine => (0..k - 1)
            .map(|_| AFFINE_OFFSET_GRID.iter())
            .multi_cartesian_product()
            .map(|tail| {
                let mut o = vec![Rational::zero()];
                o.extend(tail.into_iter().map(|&a| int(a)));
                Some(o)
            })
            .collect(),
        _ => vec![None],
    };
    let mut best: Option<(Witness, PartitionResult)> = None;
    let mut trace = Vec::new();
    let mut step = 0u64;
    for combo in candidates.iter().combinations(k) {
        let sites: Vec<RationalPoint> = combo.into_iter().cloned().collect();
        for offsets in &offset_lists {
            step += 1;
            let w = Witness::new(sites.clone(), offsets.clone())?;
            let r = evaluate(problem, config, &w, g)?;
            if best.as_ref().is_none_or(|(_, b)| r.total > b.total) {
                trace.push(TraceEntry {
                    step,
                    value: r.total,
                });
                best = Some((w, r));
            }
        }
    }
    let (best_witness, best_result) = best.expect("at least one combination");
    Ok(SearchOutcome {
        best_witness,
        best_result,
        trace,
    })
}

struct Grid {
    den: Rational,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Grid {
    fn new(config: &PointConfig, den: u64) -> Grid {
        let pts = config.all_points();
        let den_r = int(den as i64);
        let scaled = |v: Option<&Rational>| -> i64 {
            v.map_or(0, |v| (v * &den_r).round().to_i64().unwrap_or(0))
        };
        let (lo, hi) = (0..config.ambient_dim())
            .map(|j| {
                let lo = scaled(pts.iter().map(|p| &p[j]).min()) - den as i64;
                let hi = scaled(pts.iter().map(|p| &p[j]).max()) + den as i64;
                (lo, hi)
            })
            .unzip();
        Grid { den: den_r, lo, hi }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> RationalPoint {
        RationalPoint::new(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(&l, &h)| int(rng.gen_range(l..=h)) / &self.den)
                .collect(),
        )
    }
}

fn propose(
    w: &Witness,
    problem: Problem,
    points: &[RationalPoint],
    grid: &Grid,
    units: i64,
    rng: &mut ChaCha8Rng,
) -> Witness {
    let mut next = w.clone();
    let i = rng.gen_range(0..w.k());
    let roll: f64 = rng.gen();
    if roll < 0.1 {
        let base = &points[rng.gen_range(0..points.len())];
        next.sites[i] = RationalPoint::new(
            base.iter()
                .map(|c| c + int(rng.gen_range(-1..=1)) / &grid.den)
                .collect(),
        );
    } else if problem == Problem::Affine && roll < 0.3 {
        let delta = int(if rng.gen() { units } else { -units }) / &grid.den;
        if let Some(off) = next.offsets.as_mut() {
            off[i] += delta;
        }
    } else {
        let j = rng.gen_range(0..w.dim());
        let delta = int(if rng.gen() { units } else { -units }) / &grid.den;
        *next.sites[i].coord_mut(j) += delta;
    }
    next
}

struct RestartResult {
    witness: Witness,
    result: PartitionResult,
    trace: Vec<TraceEntry>,
}

#[allow(clippy::too_many_arguments)]
fn anneal_restart(
    config: &PointConfig,
    k: usize,
    problem: Problem,
    params: &SearchParams,
    start: Option<&Witness>,
    g: Option<&GramForm>,
    restart: usize,
    cap: usize,
) -> Result<RestartResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(restart as u64);
    let grid = Grid::new(config, params.candidate_grid_denominator);
    let points = config.all_points();
    let mut cur = match start {
        Some(w) => w.clone(),
        None => {
            let sites = (0..k).map(|_| grid.random_point(&mut rng)).collect();
            let offsets = (problem == Problem::Affine).then(|| vec![Rational::zero(); k]);
            Witness::new(sites, offsets)?
        }
    };
    let mut cur_res = evaluate(problem, config, &cur, g)?;
    let mut best = (cur.clone(), cur_res.clone());
    let mut trace = vec![TraceEntry {
        step: 0,
        value: cur_res.total,
    }];
    let base_units = (&params.initial_step_size * &grid.den).ceil().to_f64().unwrap_or(1.0).max(1.0);
    let cooling = params.cooling.to_f64().unwrap_or(0.99);
    let mut temp = 1.0f64;
    for step in 1..=params.steps as u64 {
        if best.1.total >= cap {
            break;
        }
        let units = (base_units * temp).round().max(1.0) as i64;
        let cand = propose(&cur, problem, &points, &grid, units, &mut rng);
        let res = evaluate(problem, config, &cand, g)?;
        let delta = res.total as f64 - cur_res.total as f64;
        let u: f64 = rng.gen();
        if delta >= 0.0 || u < (delta / temp.max(1e-9)).exp() {
            cur = cand;
            cur_res = res;
            if cur_res.total > best.1.total {
                best = (cur.clone(), cur_res.clone());
                trace.push(TraceEntry {
                    step,
                    value: cur_res.total,
                });
            }
        }
        temp *= cooling;
    }
    Ok(RestartResult {
        witness: best.0,
        result: best.1,
        trace,
    })
}

/// Simulated annealing over grid moves of the sites (and offsets for the
/// affine problem). Restart `r` starts from `seeds[r % seeds.len()]` or, with
/// no seeds, from random grid sites in the bounding box of the points.
pub fn anneal(
    config: &PointConfig,
    k: usize,
    problem: Problem,
    params: &SearchParams,
    seeds: &[Witness],
    g: Option<&GramForm>,
) -> Result<SearchOutcome> {
    params.validate()?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    for s in seeds {
        if s.k() != k {
            return Err(Error::input(format!("seed has {} sites, expected {k}", s.k())));
        }
        if (problem == Problem::Affine) != s.offsets.is_some() {
            return Err(Error::input("seed offsets do not match the problem"));
        }
    }
    let cap = total_cap(problem, config, k)?;
    let runs = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let start = (!seeds.is_empty()).then(|| &seeds[r % seeds.len()]);
            anneal_restart(config, k, problem, params, start, g, r, cap)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .into_iter()
        .reduce(|a, b| {
            let better = b.result.total > a.result.total
                || (b.result.total == a.result.total && b.witness < a.witness);
            if better {
                b
            } else {
                a
            }
        })
        .expect("restarts >= 1");
    Ok(SearchOutcome {
        best_witness: best.witness,
        best_result: best.result,
        trace: best.trace,
    })
}

const PERTURB_BASES: [i64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
const PERTURB_HALVINGS: usize = 256;

fn strict_winners(points: &[&RationalPoint], w: &Witness, g: &GramForm) -> Vec<Option<usize>> {
    points
        .iter()
        .map(|p| {
            let d: Vec<Rational> = w.sites.iter().map(|v| dist_sq_unchecked(v, p, g)).collect();
            let min = d.iter().min().expect("k >= 1");
            let mut at_min = d.iter().enumerate().filter(|(_, x)| *x == min);
            let first = at_min.next().map(|(i, _)| i);
            if at_min.next().is_some() {
                None
            } else {
                first
            }
        })
        .collect()
}

/// Move site `i` by `eps^(i+1) (1, t_i, t_i^2, ...)`, halving `eps` until
/// every strict assignment survives and no point is tied. Witnesses without
/// ties are returned unchanged.
pub fn perturb_witness(w: &Witness, config: &PointConfig, g: &GramForm) -> Result<Witness> {
    let points = config.singleton_points()?;
    if w.offsets.is_some() {
        return Err(Error::input("perturbation applies to Voronoi witnesses"));
    }
    if w.dim() != config.ambient_dim() || g.dim() != config.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: config.ambient_dim(),
            found: w.dim(),
        });
    }
    let before = strict_winners(&points, w, g);
    if before.iter().all(Option::is_some) {
        return Ok(w.clone());
    }
    let directions: Vec<RationalPoint> = (0..w.k())
        .map(|i| {
            let t = int(PERTURB_BASES[i % PERTURB_BASES.len()] + (i / PERTURB_BASES.len()) as i64);
            let mut c = Rational::one();
            RationalPoint::new(
                (0..w.dim())
                    .map(|_| {
                        let out = c.clone();
                        c *= &t;
                        out
                    })
                    .collect(),
            )
        })
        .collect();
    let half = Rational::new(1.into(), 2.into());
    let mut eps = half.clone();
    for _ in 0..PERTURB_HALVINGS {
        let mut scale = eps.clone();
        let sites = w
            .sites
            .iter()
            .zip(&directions)
            .map(|(v, z)| {
                let moved = v.add(&z.scale(&scale));
                scale *= &eps;
                moved
            })
            .collect();
        let cand = Witness::sites(sites)?;
        let after = strict_winners(&points, &cand, g);
        let kept = before
            .iter()
            .zip(&after)
            .all(|(b, a)| b.is_none() || b == a);
        if kept && after.iter().all(Option::is_some) {
            return Ok(cand);
        }
        eps *= &half;
    }
    Err(Error::Verification(
        "perturbation did not resolve all ties".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::eval_voronoi_partition;
    use crate::codes::veronese_corner_witness;
    use crate::models::veronese_config;

    #[test]
    fn corner_witness_perturbation() {
        let c = veronese_config(3, 2).unwrap();
        let g = GramForm::standard(3);
        let w = veronese_corner_witness(&[1, 2, 3], 3, 2).unwrap();
        assert_eq!(eval_voronoi_partition(&c, &w, &g).unwrap().ties.len(), 3);
        let p = perturb_witness(&w, &c, &g).unwrap();
        let r = eval_voronoi_partition(&c, &p, &g).unwrap();
        assert!(r.ties.is_empty());
        assert_eq!(r.total, 6);
    }

    #[test]
    fn tie_free_is_fixed_point() {
        let c = veronese_config(2, 3).unwrap();
        let g = GramForm::standard(2);
        let w = midpoint_chain_witness(3, 2).unwrap();
        assert_eq!(perturb_witness(&w, &c, &g).unwrap(), w);
    }

    #[test]
    fn brute_force_binary_forms() {
        let c = veronese_config(2, 2).unwrap();
        let cands = pairwise_midpoints(&c.all_points());
        let out = brute_force(&c, 2, Problem::Voronoi, &cands, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.total(), 3);
        let c3 = veronese_config(2, 3).unwrap();
        let cands = pairwise_midpoints(&c3.all_points());
        let out = brute_force(&c3, 2, Problem::Voronoi, &cands, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.total(), 4);
    }

    #[test]
    fn brute_force_budget() {
        let c = veronese_config(2, 6).unwrap();
        let cands = pairwise_midpoints(&c.all_points());
        let err = brute_force(&c, 4, Problem::Affine, &cands, None, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 1000, .. }));
    }

    #[test]
    fn brute_force_affine_single_player() {
        let c = veronese_config(2, 2).unwrap();
        let cands = vec![RationalPoint::from_ints(&[0, 1])];
        let out = brute_force(&c, 1, Problem::Affine, &cands, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.total(), 2);
    }

    #[test]
    fn anneal_is_deterministic() {
        let c = veronese_config(3, 2).unwrap();
        let params = SearchParams {
            restarts: 3,
            steps: 200,
            seed: 7,
            ..SearchParams::default()
        };
        let a = anneal(&c, 2, Problem::Voronoi, &params, &[], None).unwrap();
        let b = anneal(&c, 2, Problem::Voronoi, &params, &[], None).unwrap();
        assert_eq!(a, b);
        assert!(a.total() <= 5);
    }

    #[test]
    fn params_validation() {
        let bad = SearchParams {
            cooling: int(1),
            ..SearchParams::default()
        };
        assert!(bad.validate().is_err());
        let s = serde_json::to_string(&SearchParams::default()).unwrap();
        assert_eq!(serde_json::from_str::<SearchParams>(&s).unwrap(), SearchParams::default());
    }
}

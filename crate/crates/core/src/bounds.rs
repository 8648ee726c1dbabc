//! Exact evaluation of the linear, affine and Voronoi partition problems at a
//! witness, plus the witness conversions between them.
//!
//! A player `i` wins a set `A_b` when some `alpha in A_b` gives the strict
//! minimum of `<v_i, alpha> (+ a_i)` over *all* pairs `(j, beta)` with
//! `j` a player and `beta in A_b`, including the player's own alternatives.
//! Sets without a strict minimiser are ties and are reported as such.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affine_dim, dist_sq_unchecked, inv_sqrt_enclosure, rank, AffineMap, GramForm};
use crate::models::{LabelledSet, PointConfig};
use crate::rational::{format_rational, serde_rational_matrix, serde_rational_opt_vec, Rational, RationalPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Linear,
    Affine,
    Voronoi,
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Problem::Linear),
            "affine" => Ok(Problem::Affine),
            "voronoi" => Ok(Problem::Voronoi),
            other => Err(Error::input(format!("unknown problem {other:?}"))),
        }
    }
}

/// Sites `v_1..v_k`, with offsets `a_1..a_k` for the affine problem.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Witness {
    pub sites: Vec<RationalPoint>,
    #[serde(
        with = "serde_rational_opt_vec",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub offsets: Option<Vec<Rational>>,
}

impl Witness {
    pub fn new(sites: Vec<RationalPoint>, offsets: Option<Vec<Rational>>) -> Result<Self> {
        let Some(first) = sites.first() else {
            return Err(Error::input("a witness needs at least one site"));
        };
        let dim = first.dim();
        if let Some(bad) = sites.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if let Some(off) = &offsets {
            if off.len() != sites.len() {
                return Err(Error::DimensionMismatch {
                    expected: sites.len(),
                    found: off.len(),
                });
            }
        }
        Ok(Witness { sites, offsets })
    }

    pub fn sites(sites: Vec<RationalPoint>) -> Result<Self> {
        Self::new(sites, None)
    }

    pub fn k(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.sites[0].dim()
    }

    pub fn scaled(&self, lambda: &Rational) -> Witness {
        Witness {
            sites: self.sites.iter().map(|s| s.scale(lambda)).collect(),
            offsets: self
                .offsets
                .as_ref()
                .map(|o| o.iter().map(|a| a * lambda).collect()),
        }
    }

    pub fn translated(&self, t: &RationalPoint) -> Witness {
        Witness {
            sites: self.sites.iter().map(|s| s.add(t)).collect(),
            offsets: self.offsets.clone(),
        }
    }

    pub fn with_zero_offsets(&self) -> Witness {
        Witness {
            sites: self.sites.clone(),
            offsets: Some(vec![Rational::zero(); self.k()]),
        }
    }

    fn check_dim(&self, config: &PointConfig) -> Result<()> {
        if self.dim() != config.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: config.ambient_dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Witness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            sites: Vec<RationalPoint>,
            #[serde(with = "serde_rational_opt_vec", default)]
            offsets: Option<Vec<Rational>>,
        }
        let raw = Raw::deserialize(d)?;
        Witness::new(raw.sites, raw.offsets).map_err(serde::de::Error::custom)
    }
}

/// Winning sets, winning directions and the bound value at a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub problem: Problem,
    /// Labels won by each player.
    pub winning_sets: Vec<Vec<String>>,
    /// `D_i`: the winning points of each player, without repetition.
    pub winning_directions: Vec<Vec<RationalPoint>>,
    pub player_dims: Vec<usize>,
    pub total: usize,
    /// Labels with no strict winner.
    pub ties: Vec<String>,
    /// Winner of each set in configuration order.
    pub winners: Vec<Option<usize>>,
    /// `min_{alpha in A_b} <v_i, alpha> (+ a_i)` per player and set.
    #[serde(
        with = "opt_matrix",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub minima: Option<Vec<Vec<Rational>>>,
}

mod opt_matrix {
    use super::*;

    pub fn serialize<S: serde::Serializer>(
        m: &Option<Vec<Vec<Rational>>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a>(#[serde(with = "serde_rational_matrix")] &'a [Vec<Rational>]);
        match m {
            Some(m) => s.serialize_some(&W(m)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vec<Vec<Rational>>>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serde_rational_matrix")] Vec<Vec<Rational>>);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl PartitionResult {
    pub fn k(&self) -> usize {
        self.player_dims.len()
    }

    /// Attach the per-player, per-set tropical minima.
    pub fn with_minima(mut self, config: &PointConfig, w: &Witness) -> Result<Self> {
        self.minima = Some(tropical_minima(config, w)?);
        Ok(self)
    }
}

/// `l_{i,b}(v_i) = min_{alpha in A_b} <v_i, alpha>` (plus `a_i` when offsets
/// are present), indexed `[player][set]`.
pub fn tropical_minima(config: &PointConfig, w: &Witness) -> Result<Vec<Vec<Rational>>> {
    w.check_dim(config)?;
    Ok(w.sites
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let off = w.offsets.as_ref().map(|o| &o[i]);
            config
                .sets()
                .iter()
                .map(|s| {
                    let m = s
                        .points
                        .iter()
                        .map(|a| v.dot(a))
                        .min()
                        .expect("sets are nonempty");
                    match off {
                        Some(a) => m + a,
                        None => m,
                    }
                })
                .collect()
        })
        .collect())
}

/// Strict minimiser over a list of `(player, point index, value)`.
fn strict_min<'a, I>(values: I) -> Option<(usize, usize)>
where
    I: IntoIterator<Item = (usize, usize, &'a Rational)>,
{
    let mut best: Option<(usize, usize, &Rational)> = None;
    let mut unique = false;
    for (i, j, v) in values {
        match best {
            None => {
                best = Some((i, j, v));
                unique = true;
            }
            Some((_, _, b)) if v < b => {
                best = Some((i, j, v));
                unique = true;
            }
            Some((_, _, b)) if v == b => unique = false,
            _ => {}
        }
    }
    best.filter(|_| unique).map(|(i, j, _)| (i, j))
}

struct Assignment {
    winners: Vec<Option<(usize, usize)>>,
}

impl Assignment {
    fn finish(
        self,
        problem: Problem,
        config: &PointConfig,
        k: usize,
    ) -> Result<PartitionResult> {
        let mut winning_sets = vec![Vec::new(); k];
        let mut winning_directions: Vec<Vec<RationalPoint>> = vec![Vec::new(); k];
        let mut seen: Vec<HashSet<&RationalPoint>> = vec![HashSet::new(); k];
        let mut ties = Vec::new();
        for (set, win) in config.sets().iter().zip(&self.winners) {
            match win {
                Some((i, j)) => {
                    winning_sets[*i].push(set.label.clone());
                    let p = &set.points[*j];
                    if seen[*i].insert(p) {
                        winning_directions[*i].push(p.clone());
                    }
                }
                None => ties.push(set.label.clone()),
            }
        }
        let player_dims = winning_directions
            .iter()
            .map(|d| match problem {
                Problem::Linear => rank(d),
                Problem::Affine | Problem::Voronoi => affine_dim(d).map(|a| (a + 1) as usize),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartitionResult {
            problem,
            total: player_dims.iter().sum(),
            winning_sets,
            winning_directions,
            player_dims,
            ties,
            winners: self.winners.iter().map(|w| w.map(|(i, _)| i)).collect(),
            minima: None,
        })
    }
}

fn eval_min_plus(
    problem: Problem,
    config: &PointConfig,
    w: &Witness,
    offsets: Option<&[Rational]>,
) -> Result<PartitionResult> {
    w.check_dim(config)?;
    let winners = config
        .sets()
        .iter()
        .map(|set| {
            let values: Vec<(usize, usize, Rational)> = w
                .sites
                .iter()
                .enumerate()
                .flat_map(|(i, v)| {
                    set.points.iter().enumerate().map(move |(j, a)| {
                        let val = v.dot(a);
                        let val = match offsets {
                            Some(o) => val + &o[i],
                            None => val,
                        };
                        (i, j, val)
                    })
                })
                .collect();
            strict_min(values.iter().map(|(i, j, v)| (*i, *j, v)))
        })
        .collect();
    Assignment { winners }.finish(problem, config, w.k())
}

/// Evaluate LinearPartition: `player_dims[i] = dim span D_i`.
pub fn eval_linear_partition(config: &PointConfig, w: &Witness) -> Result<PartitionResult> {
    if w.offsets.is_some() {
        return Err(Error::input(
            "the linear problem takes no offsets; use the affine problem",
        ));
    }
    eval_min_plus(Problem::Linear, config, w, None)
}

/// Evaluate AffinePartition: `player_dims[i] = 1 + dim aff D_i`.
pub fn eval_affine_partition(config: &PointConfig, w: &Witness) -> Result<PartitionResult> {
    let Some(offsets) = &w.offsets else {
        return Err(Error::input("the affine problem requires offsets"));
    };
    eval_min_plus(Problem::Affine, config, w, Some(offsets))
}

/// Evaluate VoronoiPartition on a singleton configuration under `g`.
pub fn eval_voronoi_partition(
    config: &PointConfig,
    w: &Witness,
    g: &GramForm,
) -> Result<PartitionResult> {
    let points = config.singleton_points()?;
    if w.offsets.is_some() {
        return Err(Error::input("the Voronoi problem takes no offsets"));
    }
    w.check_dim(config)?;
    if g.dim() != config.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: config.ambient_dim(),
            found: g.dim(),
        });
    }
    let winners = points
        .iter()
        .map(|p| {
            let d: Vec<Rational> = w.sites.iter().map(|v| dist_sq_unchecked(v, p, g)).collect();
            strict_min(d.iter().enumerate().map(|(i, v)| (i, 0, v)))
        })
        .collect();
    Assignment { winners }.finish(Problem::Voronoi, config, w.k())
}

/// Dispatch on `problem`; Voronoi defaults to the standard inner product.
pub fn evaluate(
    problem: Problem,
    config: &PointConfig,
    w: &Witness,
    g: Option<&GramForm>,
) -> Result<PartitionResult> {
    match problem {
        Problem::Linear => eval_linear_partition(config, w),
        Problem::Affine => eval_affine_partition(config, w),
        Problem::Voronoi => match g {
            Some(g) => eval_voronoi_partition(config, w, g),
            None => eval_voronoi_partition(config, w, &GramForm::standard(config.ambient_dim())),
        },
    }
}

/// Upper bound on the total of any witness with `k` players.
pub fn total_cap(problem: Problem, config: &PointConfig, k: usize) -> Result<usize> {
    let per_player = match problem {
        Problem::Linear => config.ambient_dim(),
        Problem::Affine | Problem::Voronoi => (affine_dim(&config.all_points())? + 1) as usize,
    };
    Ok((k * per_player).min(config.len()))
}

/// Replace every set by its image under `map`; labels are kept.
pub fn project_config(config: &PointConfig, map: &AffineMap) -> Result<PointConfig> {
    if map.source_dim() != config.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: config.ambient_dim(),
            found: map.source_dim(),
        });
    }
    let sets = config
        .sets()
        .iter()
        .map(|s| {
            Ok(LabelledSet {
                label: s.label.clone(),
                points: s.points.iter().map(|p| map.apply(p)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PointConfig::new(map.target_dim(), sets)
}

/// For points on `<h, x> = c` (`c != 0`), fold the offsets into the sites:
/// `v_i' = v_i + (a_i / c) h`.
pub fn affine_to_linear_witness(
    w: &Witness,
    hyperplane: (&RationalPoint, &Rational),
) -> Result<Witness> {
    let (h, c) = hyperplane;
    if c.is_zero() {
        return Err(Error::input("hyperplane must not pass through the origin"));
    }
    let Some(offsets) = &w.offsets else {
        return Err(Error::input("affine witness without offsets"));
    };
    if h.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: h.dim(),
        });
    }
    let sites = w
        .sites
        .iter()
        .zip(offsets)
        .map(|(v, a)| v.add(&h.scale(&(a / c))))
        .collect();
    Witness::new(sites, None)
}

const MAX_ENCLOSURE_BITS: u32 = 4096;

/// Sphere-lift conversion of a Voronoi witness into an affine one.
///
/// Sites become `-r_i G v_i` and offsets `-M^2 r_i` with `r_i` a certified
/// rational approximation of `1 / ||(v_i, M)||`. Every strict comparison
/// `d(v_i, alpha) < d(v_j, alpha)` over the configuration's points is
/// checked to carry over to the affine values.
pub fn voronoi_to_affine_witness(
    config: &PointConfig,
    w: &Witness,
    g: &GramForm,
    lift_height: &Rational,
) -> Result<Witness> {
    if w.offsets.is_some() {
        return Err(Error::input("Voronoi witness must not carry offsets"));
    }
    if !lift_height.is_positive() {
        return Err(Error::input("lift height must be positive"));
    }
    let points = config.singleton_points()?;
    w.check_dim(config)?;
    let m2 = lift_height * lift_height;
    let norms: Vec<Rational> = w
        .sites
        .iter()
        .map(|v| g.inner(v, v).map(|n| n + &m2))
        .collect::<Result<_>>()?;
    let gv: Vec<RationalPoint> = w.sites.iter().map(|v| g.apply(v)).collect();

    // Required strict inequalities r_i X_i > r_j X_j with X_i = (v_i, alpha) + M^2.
    let mut required: Vec<(usize, usize, Rational, Rational)> = Vec::new();
    for p in &points {
        let dists: Vec<Rational> = w.sites.iter().map(|v| dist_sq_unchecked(v, p, g)).collect();
        let xs: Vec<Rational> = gv.iter().map(|u| u.dot(p) + &m2).collect();
        for i in 0..w.k() {
            for j in 0..w.k() {
                if i != j && dists[i] < dists[j] {
                    required.push((i, j, xs[i].clone(), xs[j].clone()));
                }
            }
        }
    }

    let product = |lo: &Rational, hi: &Rational, x: &Rational| -> (Rational, Rational) {
        if x.is_negative() {
            (hi * x, lo * x)
        } else {
            (lo * x, hi * x)
        }
    };
    let too_small = || Error::LiftTooSmall {
        height: format_rational(lift_height),
        suggested: format_rational(&(lift_height * Rational::from_integer(2.into()))),
    };

    let mut bits = 32;
    loop {
        let enclosures: Vec<(Rational, Rational)> =
            norms.iter().map(|q| inv_sqrt_enclosure(q, bits)).collect();
        let mut undecided = false;
        for (i, j, xi, xj) in &required {
            let (lo_i, _) = product(&enclosures[*i].0, &enclosures[*i].1, xi);
            let (lo_j, hi_j) = product(&enclosures[*j].0, &enclosures[*j].1, xj);
            let (_, hi_i) = product(&enclosures[*i].0, &enclosures[*i].1, xi);
            if lo_i > hi_j {
                continue;
            }
            if hi_i <= lo_j {
                return Err(too_small());
            }
            undecided = true;
            break;
        }
        if !undecided {
            let rs: Vec<Rational> = enclosures.into_iter().map(|(lo, _)| lo).collect();
            let sites = gv
                .iter()
                .zip(&rs)
                .map(|(u, r)| u.scale(&-r))
                .collect();
            let offsets = rs.iter().map(|r| -(&m2 * r)).collect();
            return Witness::new(sites, Some(offsets));
        }
        if bits >= MAX_ENCLOSURE_BITS {
            return Err(too_small());
        }
        bits *= 2;
    }
}

/// Retry [`voronoi_to_affine_witness`] doubling the lift height until it
/// certifies; returns the witness and the height used.
pub fn voronoi_to_affine_certified(
    config: &PointConfig,
    w: &Witness,
    g: &GramForm,
    start_height: &Rational,
    max_doublings: u32,
) -> Result<(Witness, Rational)> {
    let mut height = start_height.clone();
    let two = Rational::one() + Rational::one();
    for _ in 0..=max_doublings {
        match voronoi_to_affine_witness(config, w, g, &height) {
            Ok(conv) => return Ok((conv, height)),
            Err(Error::LiftTooSmall { .. }) => height = &height * &two,
            Err(e) => return Err(e),
        }
    }
    Err(Error::LiftTooSmall {
        height: format_rational(start_height),
        suggested: format_rational(&height),
    })
}

//! Deterministic starting witnesses.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::bounds::Witness;
use crate::codes::{code_to_segre_witness, hamming, veronese_corner_witness, CodeSpec};
use crate::error::{Error, Result};
use crate::geometry::{dist_sq_unchecked, isqrt, GramForm};
use crate::models::{multi_indices, segre_words, Family, ModelDescriptor, PointConfig};
use crate::rational::{frac, int, Rational, RationalPoint};

use super::veronese::{packing_witness_for, veronese_m3_expected};

/// Binary forms of degree `d`: player `i` takes the `i`-th pair of
/// consecutive points with its site at their midpoint; a lone last point
/// gets a site on itself and surplus players are parked far away.
pub fn midpoint_chain_witness(d: usize, k: usize) -> Result<Witness> {
    if d == 0 || k == 0 {
        return Err(Error::param("need d >= 1 and k >= 1"));
    }
    let pts: Vec<RationalPoint> = multi_indices(2, d)
        .iter()
        .map(|a| RationalPoint::new(a.iter().map(|&x| int(x as i64)).collect()))
        .collect();
    let half = frac(1, 2);
    let mut sites: Vec<RationalPoint> = pts
        .chunks(2)
        .take(k)
        .map(|pair| match pair {
            [a, b] => a.add(b).scale(&half),
            [a] => a.clone(),
            _ => unreachable!(),
        })
        .collect();
    let extra = k - sites.len();
    if extra > 0 {
        let config = PointConfig::from_points(2, pts)?;
        sites.extend(far_dummy_sites(&config, &Witness::sites(sites.clone())?, extra));
    }
    Witness::sites(sites)
}

/// `count` sites on the far side of the bounding box, each strictly farther
/// from every point than that point's nearest site in `w`.
pub fn far_dummy_sites(config: &PointConfig, w: &Witness, count: usize) -> Vec<RationalPoint> {
    let g = GramForm::standard(config.ambient_dim());
    let pts = config.all_points();
    let reach = pts
        .iter()
        .map(|p| {
            w.sites
                .iter()
                .map(|v| dist_sq_unchecked(v, p, &g))
                .min()
                .unwrap_or_else(Rational::zero)
        })
        .max()
        .unwrap_or_else(Rational::zero);
    let box_max = pts
        .iter()
        .flat_map(|p| p.iter().map(|c| c.abs()))
        .max()
        .unwrap_or_else(Rational::zero);
    let radius = isqrt(&reach.ceil().to_integer()).to_i64().unwrap_or(i64::MAX / 4) + 1;
    let base = box_max.ceil().to_integer().to_i64().unwrap_or(0) + radius + 1;
    (0..count)
        .map(|j| {
            let c = -(base + j as i64);
            RationalPoint::new(vec![int(c); config.ambient_dim()])
        })
        .collect()
}

pub fn pad_with_dummies(w: &Witness, config: &PointConfig, k: usize) -> Result<Witness> {
    if k <= w.k() {
        return Ok(w.clone());
    }
    let mut sites = w.sites.clone();
    sites.extend(far_dummy_sites(config, w, k - w.k()));
    Witness::sites(sites)
}

/// The points together with the midpoints of all pairs, sorted and deduplicated.
pub fn pairwise_midpoints(points: &[RationalPoint]) -> Vec<RationalPoint> {
    let half = frac(1, 2);
    let mut out: Vec<RationalPoint> = points.to_vec();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            out.push(a.add(b).scale(&half));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Lexicographic greedy binary code of length `d` and distance `dist`.
fn greedy_binary_code(d: usize, dist: usize) -> Vec<Vec<usize>> {
    let mut words = segre_words(d, 2);
    words.sort();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for w in words {
        if kept.iter().all(|k| hamming(k, &w) >= dist) {
            kept.push(w);
        }
    }
    kept
}

/// Voronoi seeds for a model in the order: code-derived, corners, midpoint
/// chains, triangle packings. May be empty, in which case search starts at
/// random sites.
pub fn seeds_for(model: &ModelDescriptor, k: usize) -> Result<Vec<Witness>> {
    let config = model.config();
    let g = GramForm::standard(config.ambient_dim());
    let mut seeds = Vec::new();
    match model.family() {
        Family::Segre { d, m: 2 } => {
            let words: Vec<Vec<usize>> = greedy_binary_code(*d, 3).into_iter().take(k).collect();
            let code = CodeSpec::new(2, *d, words)?;
            let mut extra = Vec::new();
            if code.len() < k {
                extra.push(RationalPoint::new(vec![frac(1, 2); *d]));
            }
            let w = code_to_segre_witness(&code, &extra)?;
            let w = pad_with_dummies(&w, &config, k)?;
            seeds.push(super::perturb_witness(&w, &config, &g)?);
        }
        Family::Veronese { m, d } if *m >= 3 => {
            if k <= *m {
                let corners: Vec<usize> = (1..=k).collect();
                let w = veronese_corner_witness(&corners, *m, *d)?;
                seeds.push(super::perturb_witness(&w, &config, &g)?);
            }
            if *m == 3 {
                if let Some(w) = packing_witness_for(*d, k, veronese_m3_expected(*d, k)) {
                    seeds.push(w);
                }
            }
        }
        Family::Veronese { m: 2, d } | Family::BinaryForms { d } => {
            seeds.push(midpoint_chain_witness(*d, k)?);
        }
        _ => {}
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::eval_voronoi_partition;
    use crate::models::veronese_config;

    #[test]
    fn midpoint_chain_totals() {
        for d in 1..=8 {
            let c = veronese_config(2, d).unwrap();
            let g = GramForm::standard(2);
            for k in 1..=d + 2 {
                let w = midpoint_chain_witness(d, k).unwrap();
                let r = eval_voronoi_partition(&c, &w, &g).unwrap();
                assert_eq!(r.total, (2 * k).min(d + 1), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn dummies_never_win() {
        let c = veronese_config(2, 4).unwrap();
        let w = midpoint_chain_witness(4, 1).unwrap();
        let padded = pad_with_dummies(&w, &c, 4).unwrap();
        let r = eval_voronoi_partition(&c, &padded, &GramForm::standard(2)).unwrap();
        assert!(r.winning_sets[1..].iter().all(Vec::is_empty));
    }

    #[test]
    fn midpoints_are_sorted_and_unique() {
        let pts = vec![RationalPoint::from_ints(&[0]), RationalPoint::from_ints(&[2]), RationalPoint::from_ints(&[1])];
        let m = pairwise_midpoints(&pts);
        assert_eq!(m.len(), 5);
        assert!(m.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn hexacode_is_greedy() {
        assert_eq!(greedy_binary_code(6, 3).len(), 8);
    }
}

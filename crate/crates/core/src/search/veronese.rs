//! Witnesses for the planar Veronese configurations `m = 3`.
//!
//! A witness is built from a packing of the lattice triangle by pieces:
//! 3-point cells (unit triangles or bent triples), unit edges and single
//! points. Sites are found as a power diagram whose cells contain the
//! pieces, then lifted off the plane so that plain Euclidean distances
//! realise the power weights.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bounds::{eval_voronoi_partition, PartitionResult, Witness};
use crate::error::{Error, Result};
use crate::geometry::{dist_sq_unchecked, isqrt, GramForm};
use crate::models::{binomial, multi_indices, veronese_config, PointConfig};
use crate::rational::{frac, int, Rational, RationalPoint};

use super::seeders::pad_with_dummies;

pub const BUNDLED_DEGREES: std::ops::RangeInclusive<usize> = 1..=8;

/// `dim kC` for the degree-`d` Veronese surface.
pub fn veronese_m3_expected(d: usize, k: usize) -> usize {
    match (d, k) {
        (2, 2) => 5,
        (4, 5) => 14,
        _ => (3 * k).min(binomial(d + 2, 2)),
    }
}

/// A piece of a packing, as indices into the point list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// Three mutually adjacent points.
    Triangle([usize; 3]),
    /// A path of two unit steps at 120 degrees.
    Bent([usize; 3]),
    Edge([usize; 2]),
    Single(usize),
}

impl Piece {
    pub fn indices(&self) -> &[usize] {
        match self {
            Piece::Triangle(t) | Piece::Bent(t) => t,
            Piece::Edge(e) => e,
            Piece::Single(s) => std::slice::from_ref(s),
        }
    }
}

/// Which pieces a packing may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PieceKinds {
    pub bent: bool,
    pub edges: bool,
    pub max_singles: usize,
}

pub(crate) fn lattice(d: usize) -> Vec<[i64; 3]> {
    multi_indices(3, d)
        .into_iter()
        .map(|a| [a[0] as i64, a[1] as i64, a[2] as i64])
        .collect()
}

fn sq_dist(a: &[i64; 3], b: &[i64; 3]) -> i64 {
    (0..3).map(|j| (a[j] - b[j]).pow(2)).sum()
}

struct Packer<'f> {
    n: usize,
    k: usize,
    target: usize,
    max_singles: usize,
    /// pieces indexed by their smallest point index, in preference order
    options: Vec<Vec<Piece>>,
    covered: Vec<bool>,
    chosen: Vec<Piece>,
    budget: usize,
    accept: &'f mut dyn FnMut(&[Piece]) -> bool,
}

impl Packer<'_> {
    fn search(&mut self, start: usize, covered: usize, singles: usize) -> bool {
        if covered >= self.target {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            return (self.accept)(&self.chosen);
        }
        let used = self.chosen.len();
        if used == self.k || self.budget == 0 {
            return false;
        }
        let Some(i) = (start..self.n).find(|&i| !self.covered[i]) else {
            return false;
        };
        let undecided = (i..self.n).filter(|&j| !self.covered[j]).count();
        if covered + undecided.min(3 * (self.k - used)) < self.target {
            return false;
        }
        for piece in self.options[i].clone() {
            if piece.indices().iter().all(|&v| !self.covered[v]) {
                let size = piece.indices().len();
                self.take(piece);
                if self.search(i + 1, covered + size, singles) {
                    return true;
                }
                self.undo();
            }
        }
        if singles < self.max_singles {
            self.take(Piece::Single(i));
            if self.search(i + 1, covered + 1, singles + 1) {
                return true;
            }
            self.undo();
        }
        // leave point i uncovered
        self.covered[i] = true;
        let ok = self.search(i + 1, covered, singles);
        self.covered[i] = false;
        ok
    }

    fn take(&mut self, p: Piece) {
        for &v in p.indices() {
            self.covered[v] = true;
        }
        self.chosen.push(p);
    }

    fn undo(&mut self) {
        let p = self.chosen.pop().expect("a piece to undo");
        for &v in p.indices() {
            self.covered[v] = false;
        }
    }
}

fn piece_options(points: &[[i64; 3]], kinds: PieceKinds) -> Vec<Vec<Piece>> {
    let n = points.len();
    let adjacent = |a: usize, b: usize| sq_dist(&points[a], &points[b]) == 2;
    let mut triangles = vec![Vec::new(); n];
    let mut bent = vec![Vec::new(); n];
    let mut edges = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if kinds.edges && adjacent(a, b) {
                edges[a].push(Piece::Edge([a, b]));
            }
            for c in b + 1..n {
                let links = [adjacent(a, b), adjacent(a, c), adjacent(b, c)];
                let linked = links.iter().filter(|&&l| l).count();
                if linked == 3 {
                    triangles[a].push(Piece::Triangle([a, b, c]));
                } else if kinds.bent && linked == 2 {
                    let far = if !links[0] {
                        sq_dist(&points[a], &points[b])
                    } else if !links[1] {
                        sq_dist(&points[a], &points[c])
                    } else {
                        sq_dist(&points[b], &points[c])
                    };
                    if far == 6 {
                        bent[a].push(Piece::Bent([a, b, c]));
                    }
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            let mut opts = std::mem::take(&mut triangles[i]);
            opts.append(&mut bent[i]);
            opts.append(&mut edges[i]);
            opts
        })
        .collect()
}

/// Depth-first enumeration of packings by at most `k` disjoint pieces that
/// cover exactly `target` points. `accept` is called on each complete
/// packing until it returns true or `budget` packings have been offered.
pub fn for_each_packing(
    points: &[[i64; 3]],
    k: usize,
    target: usize,
    kinds: PieceKinds,
    budget: usize,
    accept: &mut dyn FnMut(&[Piece]) -> bool,
) -> Option<Vec<Piece>> {
    let mut packer = Packer {
        n: points.len(),
        k,
        target,
        max_singles: kinds.max_singles,
        options: piece_options(points, kinds),
        covered: vec![false; points.len()],
        chosen: Vec::new(),
        budget,
        accept,
    };
    packer.search(0, 0, 0).then_some(packer.chosen)
}

/// The first packing found by [`for_each_packing`].
pub fn find_packing(points: &[[i64; 3]], k: usize, target: usize, kinds: PieceKinds) -> Option<Vec<Piece>> {
    for_each_packing(points, k, target, kinds, 1, &mut |_| true)
}

fn centroid(points: &[[i64; 3]], piece: &Piece) -> RationalPoint {
    let idx = piece.indices();
    let n = idx.len() as i64;
    RationalPoint::new(
        (0..3)
            .map(|j| frac(idx.iter().map(|&i| points[i][j]).sum::<i64>(), n))
            .collect(),
    )
}

fn floor_sqrt(q: &Rational, bits: u32) -> Rational {
    let scale = num_bigint::BigInt::from(1) << (2 * bits);
    let n = (q * Rational::from_integer(scale)).floor().to_integer();
    Rational::new(isqrt(&n), num_bigint::BigInt::from(1) << bits)
}

const SQRT_BITS: [u32; 6] = [16, 32, 64, 128, 256, 512];

/// Lift a power diagram on the plane `sum = d` to Euclidean sites: a foot
/// `q` on the plane with weight `w` becomes `q + h (1, 1, 1)`, `3 h^2 = w`
/// after a common shift making all weights nonnegative. The square roots are
/// approximated with increasing precision until `accept` holds.
pub(crate) fn lift_weights(
    config: &PointConfig,
    feet: &[RationalPoint],
    weights: &[Rational],
    accept: &mut dyn FnMut(&PartitionResult) -> bool,
) -> Result<(Witness, PartitionResult, bool)> {
    let g = GramForm::standard(3);
    let ones = RationalPoint::from_ints(&[1, 1, 1]);
    let third = frac(1, 3);
    let floor = weights.iter().min().cloned().unwrap_or_else(Rational::zero);
    let mut last = None;
    for bits in SQRT_BITS {
        let sites = feet
            .iter()
            .zip(weights)
            .map(|(f, wt)| f.add(&ones.scale(&floor_sqrt(&((wt - &floor) * &third), bits))))
            .collect();
        let cand = Witness::sites(sites)?;
        let r = eval_voronoi_partition(config, &cand, &g)?;
        if accept(&r) {
            return Ok((cand, r, true));
        }
        last = Some((cand, r));
    }
    let (w, r) = last.expect("at least one precision");
    Ok((w, r, false))
}

const RELAX_EPOCHS: usize = 4000;

/// Sites for the degree-`d` configuration whose cells contain the given
/// pieces strictly, if the relaxation method finds a separating power
/// diagram.
pub fn realise_packing(d: usize, pieces: &[Piece]) -> Option<Witness> {
    let points = lattice(d);
    let k = pieces.len();
    let feature = |p: &[i64; 3]| [p[0] as f64, p[1] as f64, p[2] as f64, 1.0];
    // affine functions y_i . (alpha, 1), started from the Voronoi diagram of centroids
    let mut y: Vec<[f64; 4]> = pieces
        .iter()
        .map(|pc| {
            let c = centroid(&points, pc).to_f64();
            [-2.0 * c[0], -2.0 * c[1], -2.0 * c[2], c.iter().map(|x| x * x).sum()]
        })
        .collect();
    let constraints: Vec<(usize, usize, [f64; 4])> = pieces
        .iter()
        .enumerate()
        .flat_map(|(i, pc)| {
            pc.indices()
                .iter()
                .flat_map(move |&a| (0..k).filter(move |&j| j != i).map(move |j| (i, j, a)))
        })
        .map(|(i, j, a)| (i, j, feature(&points[a])))
        .collect();
    let mut feasible = false;
    for _ in 0..RELAX_EPOCHS {
        let mut violated = false;
        for (i, j, x) in &constraints {
            let margin: f64 = (0..4).map(|t| (y[*j][t] - y[*i][t]) * x[t]).sum();
            if margin < 1.0 {
                violated = true;
                let norm: f64 = x.iter().map(|v| v * v).sum();
                let step = (1.5 - margin) / (2.0 * norm);
                for t in 0..4 {
                    y[*j][t] += step * x[t];
                    y[*i][t] -= step * x[t];
                }
            }
        }
        if !violated {
            feasible = true;
            break;
        }
    }
    if !feasible {
        return None;
    }
    // exact feet and weights on the plane
    let grid = Rational::from_integer(1i64.checked_shl(20)?.into());
    let exact = |v: f64| -> Option<Rational> {
        Some((Rational::from_float(v)? * &grid).round() / &grid)
    };
    let plane = int(d as i64);
    let mut feet = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for yi in &y {
        let q = RationalPoint::new(
            (0..3)
                .map(|t| exact(-yi[t] / 2.0))
                .collect::<Option<Vec<_>>>()?,
        );
        let c = exact(yi[3])?;
        let shift = (&plane - q.iter().sum::<Rational>()) * frac(1, 3);
        let q = q.add(&RationalPoint::new(vec![shift.clone(); 3]));
        let c = c + int(2) * &shift * &plane;
        weights.push(c - q.dot(&q));
        feet.push(q);
    }
    let config = veronese_config(3, d).ok()?;
    let (w, _, ok) = lift_weights(&config, &feet, &weights, &mut |r| {
        pieces
            .iter()
            .enumerate()
            .all(|(i, pc)| pc.indices().iter().all(|&a| r.winners[a] == Some(i)))
    })
    .ok()?;
    ok.then_some(w)
}

/// Sites at piece centroids; valid without further checks for unit
/// triangles, unit edges and single points.
pub fn packing_witness(points: &[[i64; 3]], pieces: &[Piece]) -> Result<Witness> {
    Witness::sites(pieces.iter().map(|p| centroid(points, p)).collect())
}

const PACKING_BUDGET: usize = 5000;

/// A witness with `k` sites whose Voronoi total on the degree-`d`
/// configuration is at least `target`, built from a realisable packing.
pub fn packing_witness_for(d: usize, k: usize, target: usize) -> Option<Witness> {
    let pts = lattice(d);
    let config = veronese_config(3, d).ok()?;
    let g = GramForm::standard(3);
    let kinds = PieceKinds {
        bent: true,
        edges: true,
        max_singles: k,
    };
    let mut found = None;
    for_each_packing(&pts, k, target, kinds, PACKING_BUDGET, &mut |pieces| {
        let Some(w) = realise_packing(d, pieces) else {
            return false;
        };
        let ok = eval_voronoi_partition(&config, &w, &g).is_ok_and(|r| r.total >= target);
        if ok {
            found = Some(w);
        }
        ok
    })?;
    pad_with_dummies(&found?, &config, k).ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundledWitness {
    pub k: usize,
    pub total: usize,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundledWitnesses {
    pub m: usize,
    pub d: usize,
    pub witnesses: Vec<BundledWitness>,
}

const BUNDLED: [&str; 8] = [
    include_str!("../../witnesses/veronese_m3_d1.json"),
    include_str!("../../witnesses/veronese_m3_d2.json"),
    include_str!("../../witnesses/veronese_m3_d3.json"),
    include_str!("../../witnesses/veronese_m3_d4.json"),
    include_str!("../../witnesses/veronese_m3_d5.json"),
    include_str!("../../witnesses/veronese_m3_d6.json"),
    include_str!("../../witnesses/veronese_m3_d7.json"),
    include_str!("../../witnesses/veronese_m3_d8.json"),
];

fn bundled(d: usize) -> Result<BundledWitnesses> {
    if !BUNDLED_DEGREES.contains(&d) {
        return Err(Error::NotBundled(format!("Veronese m=3, d={d}")));
    }
    let data: BundledWitnesses = serde_json::from_str(BUNDLED[d - 1])
        .map_err(|e| Error::input(format!("corrupt bundled witness file for d={d}: {e}")))?;
    Ok(data)
}

/// The shipped witness for `(d, k)`, `1 <= d <= 8`. Beyond the stored range
/// the largest stored witness is padded with far-away sites.
pub fn veronese_m3_witness(d: usize, k: usize) -> Result<Witness> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let data = bundled(d)?;
    if let Some(b) = data.witnesses.iter().find(|b| b.k == k) {
        return Ok(b.witness.clone());
    }
    let last = data
        .witnesses
        .iter()
        .max_by_key(|b| b.k)
        .ok_or_else(|| Error::input("empty bundled witness file"))?;
    if k < last.k {
        return Err(Error::input(format!("bundled file for d={d} misses k={k}")));
    }
    pad_with_dummies(&last.witness, &veronese_config(3, d)?, k)
}

/// The smallest bundled witness covering every point of the degree-`d` configuration.
pub fn veronese_m3_full_witness(d: usize) -> Result<Witness> {
    let n = binomial(d + 2, 2);
    bundled(d)?
        .witnesses
        .into_iter()
        .filter(|b| b.total == n)
        .min_by_key(|b| b.k)
        .map(|b| b.witness)
        .ok_or_else(|| Error::input(format!("bundled file for d={d} has no full witness")))
}

/// Drop sites from a witness that covers all points (lowest-dimensional
/// cells first, later sites first) or pad it with far sites, then verify
/// the total `min(3k, N)`.
pub fn veronese_witness_for_k(full: &Witness, d: usize, k: usize) -> Result<Witness> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let config = veronese_config(3, d)?;
    let g = GramForm::standard(3);
    let w = if k >= full.k() {
        pad_with_dummies(full, &config, k)?
    } else {
        let r = eval_voronoi_partition(&config, full, &g)?;
        let mut order: Vec<usize> = (0..full.k()).collect();
        order.sort_by_key(|&i| (r.player_dims[i], std::cmp::Reverse(i)));
        let mut keep = vec![true; full.k()];
        for &i in &order[..full.k() - k] {
            keep[i] = false;
        }
        let sites = full
            .sites
            .iter()
            .zip(&keep)
            .filter(|(_, &kp)| kp)
            .map(|(s, _)| s.clone())
            .collect();
        Witness::sites(sites)?
    };
    let want = (3 * k).min(config.len());
    let r = eval_voronoi_partition(&config, &w, &g)?;
    if r.total != want {
        return Err(Error::Verification(format!(
            "degree {d}, k={k}: total {} instead of {want}",
            r.total
        )));
    }
    Ok(w)
}

fn first_defect(config: &PointConfig, r: &PartitionResult, expected: &[usize]) -> String {
    match (0..r.k()).find(|&i| r.player_dims[i] < expected[i]) {
        Some(i) => format!(
            "site {i} wins {{{}}} with dimension {} < {}",
            r.winning_sets[i].join(", "),
            r.player_dims[i],
            expected[i]
        ),
        None => format!(
            "ties at {} of {} points",
            r.ties.len(),
            config.len()
        ),
    }
}

const MAX_LIFT_DOUBLINGS: u32 = 6;

/// Extend a witness covering every point of degree `target_d - 2` (or
/// `target_d - 6` when `target_d = 2 mod 3`) to one covering every point of
/// degree `target_d`.
///
/// The source is shifted into the corner `alpha_3 >= s`; the strip
/// `alpha_3 < s` is covered by unit triangles (plus one single point when
/// its size is 1 mod 3) with sites at their centroids. In power-diagram terms
/// the source sites are tilted by a common affine function that favours the
/// corner, and the resulting weights are realised as heights along
/// `(1, 1, 1)`. If the strip has no unit-triangle cover, bent triples are
/// allowed and the whole cell structure is realised directly. The result is
/// checked by exact evaluation before return.
pub fn extend_veronese_witness(w: &Witness, target_d: usize) -> Result<Witness> {
    if target_d < 9 {
        return Err(Error::param(format!("target degree must be at least 9, got {target_d}")));
    }
    if w.dim() != 3 || w.offsets.is_some() {
        return Err(Error::input("expected a Voronoi witness in Q^3"));
    }
    let s = if target_d % 3 == 2 { 6 } else { 2 };
    let source_d = target_d - s;
    let g = GramForm::standard(3);
    let src_cfg = veronese_config(3, source_d)?;
    let src = eval_voronoi_partition(&src_cfg, w, &g)?;
    if src.total != src_cfg.len() {
        return Err(Error::input(format!(
            "source witness reaches {} of the {} points of degree {source_d}",
            src.total,
            src_cfg.len()
        )));
    }

    let cfg = veronese_config(3, target_d)?;
    let pts = lattice(target_d);
    let strip: Vec<[i64; 3]> = pts.iter().copied().filter(|p| p[2] < s as i64).collect();
    let count = strip.len();
    let kinds = PieceKinds {
        bent: false,
        edges: false,
        max_singles: count % 3,
    };
    let Some(pieces) = find_packing(&strip, count.div_ceil(3), count, kinds) else {
        return realise_extension(&src, source_d, s, target_d);
    };

    let lift = RationalPoint::unit(3, 2).scale(&int(s as i64));
    let ones = RationalPoint::from_ints(&[1, 1, 1]);
    let third = frac(1, 3);
    let plane = int(target_d as i64);
    // in-plane foot and power weight of each lifted source site
    let source: Vec<(RationalPoint, Rational)> = w
        .sites
        .iter()
        .map(|v| {
            let v = v.add(&lift);
            let h = (v.iter().sum::<Rational>() - &plane) * &third;
            (v.sub(&ones.scale(&h)), int(3) * &h * &h)
        })
        .collect();
    let lifted_points: Vec<RationalPoint> =
        src_cfg.all_points().iter().map(|p| p.add(&lift)).collect();
    let reach = lifted_points
        .iter()
        .map(|p| {
            w.sites
                .iter()
                .map(|v| dist_sq_unchecked(&v.add(&lift), p, &g))
                .min()
                .expect("k >= 1")
        })
        .max()
        .expect("nonempty source");

    let u = RationalPoint::new(vec![frac(-1, 3), frac(-1, 3), frac(2, 3)]);
    let u_sq = frac(2, 3);
    let theta = int(s as i64) - frac(1, 2) - &plane * &third;
    let strip_centres: Vec<RationalPoint> = pieces.iter().map(|p| centroid(&strip, p)).collect();
    let expected: Vec<usize> = std::iter::repeat_n(3, w.k())
        .chain(pieces.iter().map(|p| p.indices().len()))
        .collect();

    let mut r_tilt = reach.floor() + int(2);
    let mut last = None;
    for _ in 0..=MAX_LIFT_DOUBLINGS {
        let mut feet = Vec::with_capacity(expected.len());
        let mut weights = Vec::with_capacity(expected.len());
        for (q, wt) in &source {
            feet.push(q.add(&u.scale(&r_tilt)));
            weights.push(wt - int(2) * &r_tilt * u.dot(q) - &r_tilt * &r_tilt * &u_sq);
        }
        for c in &strip_centres {
            feet.push(c.clone());
            weights.push(-(int(2) * &r_tilt * &theta));
        }
        let (cand, r, ok) = lift_weights(&cfg, &feet, &weights, &mut |r| r.total == cfg.len())?;
        if ok {
            return Ok(cand);
        }
        last = Some(r);
        r_tilt *= int(2);
    }
    let r = last.expect("at least one attempt");
    Err(Error::Verification(format!(
        "degree {target_d} extension: {}",
        first_defect(&cfg, &r, &expected)
    )))
}

fn piece_of(points: &[[i64; 3]], idx: &[usize]) -> Piece {
    match *idx {
        [a] => Piece::Single(a),
        [a, b] => Piece::Edge([a, b]),
        [a, b, c] if [(a, b), (a, c), (b, c)].iter().all(|&(x, y)| sq_dist(&points[x], &points[y]) == 2) => {
            Piece::Triangle([a, b, c])
        }
        [a, b, c] => Piece::Bent([a, b, c]),
        _ => unreachable!("cells of a full witness have at most three points"),
    }
}

/// Fallback when the strip has no unit-triangle cover: keep the source
/// cells shifted into the corner, cover the strip with bent triples as well,
/// and realise the whole packing at once.
fn realise_extension(src: &PartitionResult, source_d: usize, s: usize, target_d: usize) -> Result<Witness> {
    let pts = lattice(target_d);
    let index_of = |p: [i64; 3]| pts.iter().position(|q| *q == p).expect("lattice point");
    let mut cells = vec![Vec::new(); src.k()];
    for (p, winner) in lattice(source_d).into_iter().zip(&src.winners) {
        let i = winner.ok_or_else(|| Error::input("source witness has ties"))?;
        cells[i].push(index_of([p[0], p[1], p[2] + s as i64]));
    }
    let source: Vec<Piece> = cells
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| piece_of(&pts, c))
        .collect();

    let strip: Vec<[i64; 3]> = pts.iter().copied().filter(|p| p[2] < s as i64).collect();
    let count = strip.len();
    let kinds = PieceKinds {
        bent: true,
        edges: false,
        max_singles: count % 3,
    };
    let cfg = veronese_config(3, target_d)?;
    let g = GramForm::standard(3);
    let mut found = None;
    for_each_packing(&strip, count.div_ceil(3), count, kinds, PACKING_BUDGET, &mut |strip_pieces| {
        let mut pieces = source.clone();
        pieces.extend(strip_pieces.iter().map(|pc| {
            let idx: Vec<usize> = pc.indices().iter().map(|&i| index_of(strip[i])).collect();
            piece_of(&pts, &idx)
        }));
        let Some(w) = realise_packing(target_d, &pieces) else {
            return false;
        };
        let ok = eval_voronoi_partition(&cfg, &w, &g).is_ok_and(|r| r.total == cfg.len());
        if ok {
            found = Some(w);
        }
        ok
    });
    found.ok_or_else(|| {
        Error::Verification(format!(
            "degree {target_d} extension: no realisable cover of the strip alpha_3 < {s}"
        ))
    })
}

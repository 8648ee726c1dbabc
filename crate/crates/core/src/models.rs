//! Monomial-support configurations and dimension data for the Veronese,
//! Segre, Segre-Veronese and Grassmannian cones.

use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational, RationalPoint};

/// One labelled point set `A_b` of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledSet {
    pub label: String,
    pub points: Vec<RationalPoint>,
}

impl LabelledSet {
    pub fn is_singleton(&self) -> bool {
        self.points.len() == 1
    }
}

/// The family `A = (A_1, ..., A_n)` of monomial supports in `Q^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointConfig {
    ambient_dim: usize,
    sets: Vec<LabelledSet>,
}

impl PointConfig {
    /// Validates lengths, non-emptiness and label uniqueness; duplicate points
    /// inside a set are merged keeping first occurrence order.
    pub fn new(ambient_dim: usize, sets: Vec<LabelledSet>) -> Result<Self> {
        let mut labels = HashSet::new();
        let mut clean = Vec::with_capacity(sets.len());
        for set in sets {
            if !labels.insert(set.label.clone()) {
                return Err(Error::input(format!("duplicate label {:?}", set.label)));
            }
            if set.points.is_empty() {
                return Err(Error::input(format!("set {:?} is empty", set.label)));
            }
            let mut seen = HashSet::new();
            let mut points = Vec::with_capacity(set.points.len());
            for p in set.points {
                if p.dim() != ambient_dim {
                    return Err(Error::DimensionMismatch {
                        expected: ambient_dim,
                        found: p.dim(),
                    });
                }
                if seen.insert(p.clone()) {
                    points.push(p);
                }
            }
            clean.push(LabelledSet {
                label: set.label,
                points,
            });
        }
        Ok(PointConfig {
            ambient_dim,
            sets: clean,
        })
    }

    /// Configuration of singletons `{p}`, labelled by their coordinates.
    pub fn from_points(ambient_dim: usize, points: Vec<RationalPoint>) -> Result<Self> {
        let sets = points
            .into_iter()
            .map(|p| LabelledSet {
                label: p.to_string(),
                points: vec![p],
            })
            .collect();
        Self::new(ambient_dim, sets)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn sets(&self) -> &[LabelledSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn all_singletons(&self) -> bool {
        self.sets.iter().all(LabelledSet::is_singleton)
    }

    /// Every point of every set, in configuration order.
    pub fn all_points(&self) -> Vec<RationalPoint> {
        self.sets.iter().flat_map(|s| s.points.iter().cloned()).collect()
    }

    /// The points of a singleton configuration, one per set.
    pub fn singleton_points(&self) -> Result<Vec<&RationalPoint>> {
        self.sets
            .iter()
            .map(|s| {
                if s.is_singleton() {
                    Ok(&s.points[0])
                } else {
                    Err(Error::ProblemMismatch(format!(
                        "set {:?} has {} points; a singleton configuration is required",
                        s.label,
                        s.points.len()
                    )))
                }
            })
            .collect()
    }

    /// A hyperplane `<h, x> = c` with `c != 0` containing all points, if the
    /// all-ones functional is constant and nonzero on them.
    pub fn sum_hyperplane(&self) -> Option<(RationalPoint, Rational)> {
        let ones = RationalPoint::new(vec![int(1); self.ambient_dim]);
        let mut value: Option<Rational> = None;
        for p in self.sets.iter().flat_map(|s| &s.points) {
            let v = p.dot(&ones);
            match &value {
                None => value = Some(v),
                Some(c) if *c != v => return None,
                _ => {}
            }
        }
        value.filter(|c| !c.is_zero()).map(|c| (ones, c))
    }
}

impl<'de> Deserialize<'de> for PointConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            ambient_dim: usize,
            sets: Vec<LabelledSet>,
        }
        let raw = Raw::deserialize(d)?;
        PointConfig::new(raw.ambient_dim, raw.sets).map_err(serde::de::Error::custom)
    }
}

/// Variety families with their defining parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Degree-`d` Veronese embedding of `P^{m-1}`.
    Veronese { m: usize, d: usize },
    /// Veronese with `m = 2`: pure powers of binary forms.
    BinaryForms { d: usize },
    /// `d`-fold Segre power of `P^{m-1}`.
    Segre { d: usize, m: usize },
    /// Segre product of Veronese embeddings, factors `(m_i, d_i)`.
    SegreVeronese { factors: Vec<(usize, usize)> },
    /// Grassmannian of `d`-planes in `K^m`, `d <= m/2`.
    Grassmannian { m: usize, d: usize },
}

/// A validated family together with `dim C` and `dim V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModelDescriptor {
    #[serde(flatten)]
    family: Family,
    cone_dim: usize,
    ambient_space_dim: usize,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl ModelDescriptor {
    pub fn new(family: Family) -> Result<Self> {
        let (cone_dim, ambient_space_dim) = match &family {
            Family::Veronese { m, d } => {
                check_veronese(*m, *d)?;
                (*m, binomial(d + m - 1, m - 1))
            }
            Family::BinaryForms { d } => {
                check_veronese(2, *d)?;
                (2, d + 1)
            }
            Family::Segre { d, m } => {
                check_segre(*d, *m)?;
                (d * (m - 1) + 1, m.pow(*d as u32))
            }
            Family::SegreVeronese { factors } => {
                check_factors(factors)?;
                (
                    1 + factors.iter().map(|(m, _)| m - 1).sum::<usize>(),
                    factors
                        .iter()
                        .map(|&(m, d)| binomial(d + m - 1, m - 1))
                        .product(),
                )
            }
            Family::Grassmannian { m, d } => {
                check_grassmann(*m, *d)?;
                (d * (m - d) + 1, binomial(*m, *d))
            }
        };
        Ok(ModelDescriptor {
            family,
            cone_dim,
            ambient_space_dim,
        })
    }

    pub fn veronese(m: usize, d: usize) -> Result<Self> {
        Self::new(Family::Veronese { m, d })
    }

    pub fn binary_forms(d: usize) -> Result<Self> {
        Self::new(Family::BinaryForms { d })
    }

    pub fn segre(d: usize, m: usize) -> Result<Self> {
        Self::new(Family::Segre { d, m })
    }

    pub fn segre_veronese(factors: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(Family::SegreVeronese { factors })
    }

    pub fn grassmannian(m: usize, d: usize) -> Result<Self> {
        Self::new(Family::Grassmannian { m, d })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn cone_dim(&self) -> usize {
        self.cone_dim
    }

    pub fn ambient_space_dim(&self) -> usize {
        self.ambient_space_dim
    }

    /// Dimension of the parameter space of the parametrisation.
    pub fn param_dim(&self) -> usize {
        match &self.family {
            Family::Veronese { m, .. } => *m,
            Family::BinaryForms { .. } => 2,
            Family::Segre { d, m } | Family::Grassmannian { m, d } => d * m,
            Family::SegreVeronese { factors } => factors.iter().map(|(m, _)| m).sum(),
        }
    }

    /// The monomial-support configuration; Segre with `m = 2` uses reduced
    /// coordinates.
    pub fn config(&self) -> PointConfig {
        let built = match &self.family {
            Family::Veronese { m, d } => veronese_config(*m, *d),
            Family::BinaryForms { d } => veronese_config(2, *d),
            Family::Segre { d, m } => segre_config(*d, *m, *m == 2),
            Family::SegreVeronese { factors } => segre_veronese_config(factors),
            Family::Grassmannian { m, d } => grassmann_config(*m, *d),
        };
        built.expect("descriptor parameters were validated")
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.cone_dim, self.ambient_space_dim)
    }
}

impl fmt::Display for ModelDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match &self.family {
            Family::Veronese { m, d } => write!(f, "Veronese(m={m}, d={d})"),
            Family::BinaryForms { d } => write!(f, "BinaryForms(d={d})"),
            Family::Segre { d, m } => write!(f, "Segre(d={d}, m={m})"),
            Family::SegreVeronese { factors } => write!(f, "SegreVeronese({factors:?})"),
            Family::Grassmannian { m, d } => write!(f, "Grassmannian(m={m}, d={d})"),
        }
    }
}

impl<'de> Deserialize<'de> for ModelDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(flatten)]
            family: Family,
            cone_dim: Option<usize>,
            ambient_space_dim: Option<usize>,
        }
        let raw = Raw::deserialize(d)?;
        let desc = ModelDescriptor::new(raw.family).map_err(serde::de::Error::custom)?;
        if raw.cone_dim.is_some_and(|c| c != desc.cone_dim)
            || raw.ambient_space_dim.is_some_and(|a| a != desc.ambient_space_dim)
        {
            return Err(serde::de::Error::custom(
                "stored dimensions disagree with the family parameters",
            ));
        }
        Ok(desc)
    }
}

/// `(dim C, dim V)` of a descriptor.
pub fn model_dims(desc: &ModelDescriptor) -> (usize, usize) {
    desc.dims()
}

/// `min(k dim C, dim V)`.
pub fn expected_secant_dim(desc: &ModelDescriptor, k: usize) -> usize {
    (k * desc.cone_dim).min(desc.ambient_space_dim)
}

fn check_veronese(m: usize, d: usize) -> Result<()> {
    if m < 2 || d < 1 {
        return Err(Error::param(format!(
            "Veronese needs m >= 2 and d >= 1, got m={m}, d={d}"
        )));
    }
    Ok(())
}

fn check_segre(d: usize, m: usize) -> Result<()> {
    if d < 1 || m < 2 {
        return Err(Error::param(format!(
            "Segre needs d >= 1 and m >= 2, got d={d}, m={m}"
        )));
    }
    Ok(())
}

fn check_factors(factors: &[(usize, usize)]) -> Result<()> {
    if factors.is_empty() {
        return Err(Error::param("Segre-Veronese needs at least one factor"));
    }
    for &(m, d) in factors {
        check_veronese(m, d)?;
    }
    Ok(())
}

fn check_grassmann(m: usize, d: usize) -> Result<()> {
    if d < 1 || 2 * d > m {
        return Err(Error::param(format!(
            "Grassmannian needs 1 <= d <= m/2, got m={m}, d={d}"
        )));
    }
    Ok(())
}

/// Multi-indices `alpha in N^m` with `|alpha| = d`, in colexicographic order.
pub fn multi_indices(m: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, d: usize, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            out.push(vec![d]);
            return;
        }
        // colex: the last coordinate varies slowest
        for last in 0..=d {
            let mut head = Vec::new();
            rec(m - 1, d - last, &mut head);
            for mut h in head {
                h.push(last);
                out.push(h);
            }
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(m, d, &mut out);
    }
    out
}

fn tuple_label(alpha: &[usize]) -> String {
    let parts: Vec<String> = alpha.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

fn to_point(coords: &[usize]) -> RationalPoint {
    RationalPoint::new(coords.iter().map(|&c| int(c as i64)).collect())
}

pub fn veronese_config(m: usize, d: usize) -> Result<PointConfig> {
    check_veronese(m, d)?;
    let sets = multi_indices(m, d)
        .into_iter()
        .map(|alpha| LabelledSet {
            label: tuple_label(&alpha),
            points: vec![to_point(&alpha)],
        })
        .collect();
    PointConfig::new(m, sets)
}

/// Segre word symbol `s` at row `i` is a 1 in column `s`; the reduced form
/// drops column 0 of every row.
pub fn segre_point(word: &[usize], m: usize, reduced: bool) -> RationalPoint {
    let width = if reduced { m - 1 } else { m };
    let mut coords = vec![0usize; word.len() * width];
    for (row, &s) in word.iter().enumerate() {
        if reduced {
            if s > 0 {
                coords[row * width + s - 1] = 1;
            }
        } else {
            coords[row * width + s] = 1;
        }
    }
    to_point(&coords)
}

/// All `m`-ary words of length `d`, first symbol fastest.
pub fn segre_words(d: usize, m: usize) -> Vec<Vec<usize>> {
    let total = m.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let s = idx % m;
                    idx /= m;
                    s
                })
                .collect()
        })
        .collect()
}

pub fn word_label(word: &[usize]) -> String {
    word.iter()
        .map(|&s| std::char::from_digit(s as u32, 36).expect("symbol below 36"))
        .collect()
}

pub fn segre_config(d: usize, m: usize, reduced: bool) -> Result<PointConfig> {
    check_segre(d, m)?;
    if m > 36 {
        return Err(Error::param("Segre labels support m <= 36"));
    }
    let width = if reduced { m - 1 } else { m };
    let sets = segre_words(d, m)
        .into_iter()
        .map(|w| LabelledSet {
            label: word_label(&w),
            points: vec![segre_point(&w, m, reduced)],
        })
        .collect();
    PointConfig::new(d * width, sets)
}

pub fn segre_veronese_config(factors: &[(usize, usize)]) -> Result<PointConfig> {
    check_factors(factors)?;
    let per_factor: Vec<Vec<Vec<usize>>> = factors
        .iter()
        .map(|&(m, d)| multi_indices(m, d))
        .collect();
    // Colex on the concatenation: last factor slowest.
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for choices in &per_factor {
        let mut next = Vec::with_capacity(combos.len() * choices.len());
        for c in 0..choices.len() {
            for prefix in &combos {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        combos = next;
    }
    let ambient: usize = factors.iter().map(|(m, _)| m).sum();
    let sets = combos
        .into_iter()
        .map(|combo| {
            let parts: Vec<&Vec<usize>> = combo
                .iter()
                .enumerate()
                .map(|(f, &c)| &per_factor[f][c])
                .collect();
            let coords: Vec<usize> = parts.iter().flat_map(|a| a.iter().copied()).collect();
            let label = if parts.len() == 1 {
                tuple_label(parts[0])
            } else {
                let inner: Vec<String> = parts
                    .iter()
                    .map(|a| a.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                format!("({})", inner.join("|"))
            };
            LabelledSet {
                label,
                points: vec![to_point(&coords)],
            }
        })
        .collect();
    PointConfig::new(ambient, sets)
}

/// `d`-subsets of `0..m` in lexicographic order.
pub fn subsets(m: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < d - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, d, &mut Vec::new(), &mut out);
    out
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

pub fn subset_label(subset: &[usize]) -> String {
    let parts: Vec<String> = subset.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn grassmann_config(m: usize, d: usize) -> Result<PointConfig> {
    check_grassmann(m, d)?;
    let perms = permutations(d);
    let sets = subsets(m, d)
        .into_iter()
        .map(|cols| {
            let points = perms
                .iter()
                .map(|sigma| {
                    let mut coords = vec![0usize; d * m];
                    for (row, &p) in sigma.iter().enumerate() {
                        coords[row * m + cols[p]] = 1;
                    }
                    to_point(&coords)
                })
                .collect();
            LabelledSet {
                label: subset_label(&cols),
                points,
            }
        })
        .collect();
    PointConfig::new(d * m, sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singleton_coords(c: &PointConfig) -> Vec<RationalPoint> {
        c.sets().iter().map(|s| s.points[0].clone()).collect()
    }

    #[test]
    fn binary_cubic_order() {
        let c = veronese_config(2, 3).unwrap();
        let want: Vec<RationalPoint> = [[3, 0], [2, 1], [1, 2], [0, 3]]
            .iter()
            .map(|p| RationalPoint::from_ints(p))
            .collect();
        assert_eq!(singleton_coords(&c), want);
        assert_eq!(c.sets()[1].label, "(2,1)");
    }

    #[test]
    fn veronese_counts() {
        let c = veronese_config(3, 1).unwrap();
        assert_eq!(
            singleton_coords(&c),
            (0..3).map(|i| RationalPoint::unit(3, i)).collect::<Vec<_>>()
        );
        assert_eq!(veronese_config(3, 4).unwrap().len(), 15);
        assert!(veronese_config(1, 3).is_err());
        assert!(veronese_config(3, 0).is_err());
    }

    #[test]
    fn segre_shapes() {
        let cube = segre_config(6, 2, true).unwrap();
        assert_eq!(cube.len(), 64);
        assert_eq!(cube.ambient_dim(), 6);
        let set: HashSet<_> = singleton_coords(&cube).into_iter().collect();
        assert_eq!(set.len(), 64);
        assert!(set.iter().all(|p| p.iter().all(|c| *c == int(0) || *c == int(1))));
        // reduced m=2 coordinates coincide with the word bits
        assert_eq!(cube.sets()[6].label, "011000");
        assert_eq!(
            cube.sets()[6].points[0],
            RationalPoint::from_ints(&[0, 1, 1, 0, 0, 0])
        );

        let single = segre_config(1, 4, false).unwrap();
        assert_eq!(
            singleton_coords(&single),
            (0..4).map(|i| RationalPoint::unit(4, i)).collect::<Vec<_>>()
        );
        let small = segre_config(2, 2, false).unwrap();
        assert_eq!(small.len(), 4);
        assert_eq!(small.ambient_dim(), 4);
    }

    #[test]
    fn segre_veronese_degenerations() {
        let sv = segre_veronese_config(&[(3, 2)]).unwrap();
        assert_eq!(sv, veronese_config(3, 2).unwrap());

        let sv = segre_veronese_config(&[(2, 1), (2, 1)]).unwrap();
        let segre = segre_config(2, 2, false).unwrap();
        assert_eq!(singleton_coords(&sv), singleton_coords(&segre));

        let sv = segre_veronese_config(&[(2, 2), (2, 1)]).unwrap();
        assert_eq!(sv.len(), 6);
        assert_eq!(sv.ambient_dim(), 4);
    }

    #[test]
    fn grassmann_shapes() {
        let g = grassmann_config(4, 2).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.sets().iter().all(|s| s.points.len() == 2));
        assert_eq!(g.sets()[0].label, "{1,2}");
        let g = grassmann_config(5, 1).unwrap();
        assert!(g.all_singletons());
        assert_eq!(g.len(), 5);
        let g = grassmann_config(5, 2).unwrap();
        assert_eq!(g.len(), 10);
        let g = grassmann_config(6, 3).unwrap();
        assert!(g.sets().iter().all(|s| s.points.len() == 6));
        assert!(grassmann_config(5, 3).is_err());
    }

    #[test]
    fn descriptor_dims() {
        assert_eq!(model_dims(&ModelDescriptor::segre(6, 2).unwrap()), (7, 64));
        assert_eq!(model_dims(&ModelDescriptor::veronese(3, 4).unwrap()), (3, 15));
        assert_eq!(model_dims(&ModelDescriptor::grassmannian(4, 2).unwrap()), (5, 6));
        assert_eq!(
            model_dims(&ModelDescriptor::segre_veronese(vec![(3, 2), (2, 1)]).unwrap()),
            (4, 12)
        );
        assert_eq!(model_dims(&ModelDescriptor::binary_forms(5).unwrap()), (2, 6));
    }

    #[test]
    fn expected_dims() {
        let s = ModelDescriptor::segre(6, 2).unwrap();
        assert_eq!(expected_secant_dim(&s, 9), 63);
        assert_eq!(expected_secant_dim(&s, 1), 7);
        let v = ModelDescriptor::veronese(3, 2).unwrap();
        assert_eq!(
            (1..=3).map(|k| expected_secant_dim(&v, k)).collect::<Vec<_>>(),
            vec![3, 6, 6]
        );
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = ModelDescriptor::segre_veronese(vec![(2, 2), (2, 1)]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"family":"segre_veronese","factors":[[2,2],[2,1]],"cone_dim":3,"ambient_space_dim":6}"#
        );
        assert_eq!(serde_json::from_str::<ModelDescriptor>(&s).unwrap(), d);
        assert!(serde_json::from_str::<ModelDescriptor>(
            r#"{"family":"segre","d":6,"m":2,"cone_dim":8}"#
        )
        .is_err());
    }

    #[test]
    fn config_validation() {
        let p = RationalPoint::from_ints(&[1, 2]);
        let dup = vec![
            LabelledSet { label: "a".into(), points: vec![p.clone()] },
            LabelledSet { label: "a".into(), points: vec![p.clone()] },
        ];
        assert!(PointConfig::new(2, dup).is_err());
        let empty = vec![LabelledSet { label: "a".into(), points: vec![] }];
        assert!(PointConfig::new(2, empty).is_err());
        let merged = PointConfig::new(
            2,
            vec![LabelledSet { label: "a".into(), points: vec![p.clone(), p.clone()] }],
        )
        .unwrap();
        assert_eq!(merged.sets()[0].points.len(), 1);
        assert!(serde_json::from_str::<PointConfig>(
            r#"{"ambient_dim":2,"sets":[{"label":"x","points":[[1,2,3]]}]}"#
        )
        .is_err());
    }

    #[test]
    fn permutation_order() {
        assert_eq!(
            permutations(3),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}

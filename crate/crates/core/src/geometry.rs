//! Exact linear algebra over the rationals: ranks, affine spans, Gram-form
//! distances and affine-linear maps.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, serde_rational_matrix, Rational, RationalPoint};

fn check_lengths<'a>(rows: impl IntoIterator<Item = &'a RationalPoint>) -> Result<Option<usize>> {
    let mut dim = None;
    for r in rows {
        match dim {
            None => dim = Some(r.dim()),
            Some(d) if d != r.dim() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: r.dim(),
                })
            }
            _ => {}
        }
    }
    Ok(dim)
}

/// Scale a rational row by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

/// Fraction-free (Bareiss) elimination; returns the rank.
pub(crate) fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            if row[c].is_zero() {
                // Still has to be rescaled to keep later divisions exact.
                for j in c + 1..cols {
                    row[j] = &pivot_row[c] * &row[j] / &prev;
                }
                continue;
            }
            for j in c + 1..cols {
                row[j] = (&pivot_row[c] * &row[j] - &row[c] * &pivot_row[j]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Rank over Q of the matrix whose rows are `rows`.
pub fn rank(rows: &[RationalPoint]) -> Result<usize> {
    if check_lengths(rows)?.is_none() {
        return Ok(0);
    }
    Ok(bareiss_rank(rows.iter().map(|r| integer_row(r)).collect()))
}

/// Dimension of the affine span; `-1` for the empty set.
pub fn affine_dim(points: &[RationalPoint]) -> Result<i64> {
    check_lengths(points)?;
    let Some((p0, rest)) = points.split_first() else {
        return Ok(-1);
    };
    let diffs: Vec<RationalPoint> = rest.iter().map(|p| p.sub(p0)).collect();
    Ok(rank(&diffs)? as i64)
}

/// Positive definite symmetric rational matrix defining `(x, y) = x^T G y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GramForm {
    #[serde(with = "serde_rational_matrix")]
    matrix: Vec<Vec<Rational>>,
    #[serde(skip)]
    identity: bool,
}

impl GramForm {
    pub fn standard(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        GramForm {
            matrix,
            identity: true,
        }
    }

    /// Validates symmetry and positive definiteness (leading principal minors).
    pub fn new(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = matrix.len();
        for row in &matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::input(format!(
                        "gram matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        // Elimination without pivoting: the k-th pivot is minor_k / minor_{k-1}.
        let mut a = matrix.clone();
        let mut minor = Rational::one();
        for k in 0..n {
            let pivot = a[k][k].clone();
            minor *= &pivot;
            if !pivot.is_positive() {
                return Err(Error::NotPositiveDefinite {
                    minor: k + 1,
                    value: format_rational(&minor),
                });
            }
            for i in k + 1..n {
                let f = &a[i][k] / &pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        let identity = (0..n).all(|i| {
            (0..n).all(|j| {
                if i == j {
                    matrix[i][j].is_one()
                } else {
                    matrix[i][j].is_zero()
                }
            })
        });
        Ok(GramForm { matrix, identity })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn is_standard(&self) -> bool {
        self.identity
    }

    pub fn inner(&self, u: &RationalPoint, w: &RationalPoint) -> Result<Rational> {
        self.check(u)?;
        self.check(w)?;
        if self.identity {
            return Ok(u.dot(w));
        }
        Ok(self.apply(u).dot(w))
    }

    /// `G u`, the dual vector of `u`.
    pub fn apply(&self, u: &RationalPoint) -> RationalPoint {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(u.iter())
                    .fold(Rational::zero(), |acc, (g, x)| acc + g * x)
            })
            .collect::<Vec<_>>()
            .into()
    }

    fn check(&self, u: &RationalPoint) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for GramForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(with = "serde_rational_matrix")]
            matrix: Vec<Vec<Rational>>,
        }
        let raw = Raw::deserialize(d)?;
        GramForm::new(raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// Squared distance `(u-w)^T G (u-w)`.
pub fn dist_sq(u: &RationalPoint, w: &RationalPoint, g: &GramForm) -> Result<Rational> {
    g.check(u)?;
    g.check(w)?;
    Ok(dist_sq_unchecked(u, w, g))
}

pub(crate) fn dist_sq_unchecked(u: &RationalPoint, w: &RationalPoint, g: &GramForm) -> Rational {
    let diff = u.sub(w);
    if g.identity {
        diff.iter().fold(Rational::zero(), |acc, x| acc + x * x)
    } else {
        g.apply(&diff).dot(&diff)
    }
}

/// An affine-linear map `x -> A x + t` from `Q^m` to `Q^{m'}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "serde_rational_matrix")]
    pub linear: Vec<Vec<Rational>>,
    pub translation: RationalPoint,
}

impl AffineMap {
    pub fn new(linear: Vec<Vec<Rational>>, translation: RationalPoint) -> Result<Self> {
        let source = linear.first().map_or(0, Vec::len);
        if linear.iter().any(|r| r.len() != source) {
            return Err(Error::input("affine map rows have different lengths"));
        }
        if translation.dim() != linear.len() {
            return Err(Error::DimensionMismatch {
                expected: linear.len(),
                found: translation.dim(),
            });
        }
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::select(dim, &(0..dim).collect::<Vec<_>>())
    }

    /// Coordinate projection keeping `keep` (in order).
    pub fn select(source_dim: usize, keep: &[usize]) -> Self {
        let linear = keep
            .iter()
            .map(|&k| {
                (0..source_dim)
                    .map(|j| if j == k { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        AffineMap {
            linear,
            translation: RationalPoint::zeros(keep.len()),
        }
    }

    pub fn source_dim(&self) -> usize {
        self.linear.first().map_or(0, Vec::len)
    }

    pub fn target_dim(&self) -> usize {
        self.linear.len()
    }

    pub fn apply(&self, x: &RationalPoint) -> Result<RationalPoint> {
        if x.dim() != self.source_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim(),
                found: x.dim(),
            });
        }
        Ok(self
            .linear
            .iter()
            .zip(self.translation.iter())
            .map(|(row, t)| {
                row.iter()
                    .zip(x.iter())
                    .fold(t.clone(), |acc, (a, b)| acc + a * b)
            })
            .collect::<Vec<_>>()
            .into())
    }
}

/// Integer square root (floor).
pub(crate) fn isqrt(n: &BigInt) -> BigInt {
    assert!(n.sign() != Sign::Minus);
    n.sqrt()
}

/// Rational enclosure `lo <= 1/sqrt(q) <= hi` with `hi - lo <= 2^-bits`.
pub(crate) fn inv_sqrt_enclosure(q: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(q.is_positive());
    // 1/sqrt(a/b) = sqrt(a*b)/a
    let a = q.numer();
    let b = q.denom();
    let scale = BigInt::one() << (2 * bits as usize);
    let s = isqrt(&(a * b * &scale));
    let den = a * (BigInt::one() << bits as usize);
    let lo = Rational::new(s.clone(), den.clone());
    let hi = Rational::new(s + 1, den);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn pts(rows: &[&[i64]]) -> Vec<RationalPoint> {
        rows.iter().map(|r| RationalPoint::from_ints(r)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[]).unwrap(), 0);
        assert_eq!(rank(&pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap(), 3);
        assert_eq!(rank(&pts(&[&[1, 2], &[2, 4]])).unwrap(), 1);
        assert!(matches!(
            rank(&pts(&[&[1, 2], &[1, 2, 3]])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_with_fractions_and_skipped_columns() {
        let rows = vec![
            RationalPoint::new(vec![int(0), frac(1, 2), int(1), int(0)]),
            RationalPoint::new(vec![int(0), frac(1, 3), frac(2, 3), int(0)]),
            RationalPoint::new(vec![int(0), int(0), int(0), frac(5, 7)]),
            RationalPoint::new(vec![int(0), int(1), int(2), int(1)]),
        ];
        assert_eq!(rank(&rows).unwrap(), 2);
    }

    #[test]
    fn affine_dim_examples() {
        assert_eq!(affine_dim(&[]).unwrap(), -1);
        assert_eq!(affine_dim(&pts(&[&[0, 0]])).unwrap(), 0);
        assert_eq!(affine_dim(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap(), 2);
        assert_eq!(affine_dim(&pts(&[&[0, 0], &[1, 1], &[2, 2]])).unwrap(), 1);
    }

    #[test]
    fn dist_sq_examples() {
        let g = GramForm::standard(6);
        let origin = RationalPoint::zeros(6);
        let centre = RationalPoint::new(vec![frac(1, 2); 6]);
        assert_eq!(dist_sq(&origin, &centre, &g).unwrap(), frac(3, 2));
        assert_eq!(dist_sq(&centre, &centre, &g).unwrap(), int(0));
        assert!(dist_sq(&origin, &RationalPoint::zeros(5), &g).is_err());
    }

    #[test]
    fn gram_validation() {
        assert!(GramForm::new(vec![vec![int(2), int(1)], vec![int(1), int(2)]]).is_ok());
        assert!(matches!(
            GramForm::new(vec![vec![int(1), int(2)], vec![int(2), int(1)]]),
            Err(Error::NotPositiveDefinite { minor: 2, .. })
        ));
        assert!(GramForm::new(vec![vec![int(1), int(0)], vec![int(1), int(1)]]).is_err());
        let g: GramForm = serde_json::from_str(r#"{"matrix":[[1,0],[0,1]]}"#).unwrap();
        assert!(g.is_standard());
        assert!(serde_json::from_str::<GramForm>(r#"{"matrix":[[0,0],[0,1]]}"#).is_err());
    }

    #[test]
    fn non_standard_gram_distance() {
        let g = GramForm::new(vec![vec![int(2), int(1)], vec![int(1), int(2)]]).unwrap();
        let u = RationalPoint::from_ints(&[1, 0]);
        let w = RationalPoint::from_ints(&[0, 1]);
        // (1,-1) G (1,-1)^T = 2 - 1 - 1 + 2
        assert_eq!(dist_sq(&u, &w, &g).unwrap(), int(2));
    }

    #[test]
    fn inv_sqrt_brackets() {
        for q in [frac(2, 1), frac(9, 4), frac(7, 3), frac(1, 1000)] {
            let (lo, hi) = inv_sqrt_enclosure(&q, 20);
            assert!(&lo * &lo * &q <= int(1));
            assert!(&hi * &hi * &q >= int(1));
            assert!(hi - lo <= frac(1, 1 << 20));
        }
    }
}

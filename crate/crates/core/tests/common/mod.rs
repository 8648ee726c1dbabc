#![allow(clippy::needless_range_loop)]

#![allow(dead_code)]

use proptest::prelude::*;
use tropsec::rational::{frac, int};
use tropsec::{Rational, RationalPoint};

pub fn rat() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

pub fn point(dim: usize) -> impl Strategy<Value = RationalPoint> {
    prop::collection::vec(rat(), dim).prop_map(RationalPoint::new)
}

pub fn int_point(dim: usize, lo: i64, hi: i64) -> impl Strategy<Value = RationalPoint> {
    prop::collection::vec(lo..=hi, dim).prop_map(|v| RationalPoint::from_ints(&v))
}

pub fn pt(v: &[i64]) -> RationalPoint {
    RationalPoint::from_ints(v)
}

pub fn half_point(dim: usize) -> RationalPoint {
    RationalPoint::new(vec![frac(1, 2); dim])
}

pub fn rint(v: i64) -> Rational {
    int(v)
}

/// Row-reduction rank over Q, kept separate from the library's elimination.
pub fn naive_rank(rows: &[RationalPoint]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let zero = int(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != zero) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != zero {
                let f = m[i][c].clone() / m[r][c].clone();
                for j in 0..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn naive_affine_dim(points: &[RationalPoint]) -> i64 {
    match points.split_first() {
        None => -1,
        Some((p0, rest)) => naive_rank(&rest.iter().map(|p| p.sub(p0)).collect::<Vec<_>>()) as i64,
    }
}

/// The 3 x 6 binary parity-check matrix of the (P^1)^6 construction.
pub const HEXACODE_CHECK: [[usize; 6]; 3] = [[1, 1, 0, 1, 0, 0], [1, 0, 1, 0, 1, 0], [0, 1, 1, 0, 0, 1]];

pub fn hexacode_check() -> Vec<Vec<usize>> {
    HEXACODE_CHECK.iter().map(|r| r.to_vec()).collect()
}

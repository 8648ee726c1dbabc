//! Block codes, the covering-count lower bounds they induce, and the
//! Voronoi witnesses obtained by placing sites at codewords.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bounds::Witness;
use crate::error::{Error, Result};
use crate::models::{multi_indices, segre_point, subsets, word_label};
use crate::rational::RationalPoint;

/// A q-ary block code stored as a sorted list of distinct words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    q: usize,
    length: usize,
    words: Vec<Vec<usize>>,
    min_distance: usize,
}

pub fn hamming(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= q {
        if q.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

impl CodeSpec {
    pub fn new(q: usize, length: usize, mut words: Vec<Vec<usize>>) -> Result<Self> {
        if !(2..=36).contains(&q) {
            return Err(Error::input(format!("alphabet size must be in 2..=36, got {q}")));
        }
        for w in &words {
            if w.len() != length {
                return Err(Error::DimensionMismatch {
                    expected: length,
                    found: w.len(),
                });
            }
            if let Some(s) = w.iter().find(|&&s| s >= q) {
                return Err(Error::input(format!("symbol {s} outside alphabet of size {q}")));
            }
        }
        words.sort();
        if words.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::input("codewords must be distinct"));
        }
        let mut min_distance = length + 1;
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                min_distance = min_distance.min(hamming(a, b));
            }
        }
        Ok(CodeSpec {
            q,
            length,
            words,
            min_distance,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Minimum pairwise Hamming distance; `length + 1` for fewer than two words.
    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        self.words.binary_search_by(|w| w.as_slice().cmp(word)).is_ok()
    }

    /// Distance from `word` to the nearest codeword.
    pub fn distance_to(&self, word: &[usize]) -> Option<usize> {
        self.words.iter().map(|w| hamming(w, word)).min()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeJson {
    q: usize,
    length: usize,
    words: Vec<String>,
}

impl Serialize for CodeSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodeJson {
            q: self.q,
            length: self.length,
            words: self.words.iter().map(|w| word_label(w)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CodeJson::deserialize(d)?;
        let words = raw
            .words
            .iter()
            .map(|w| {
                w.chars()
                    .map(|c| {
                        c.to_digit(36)
                            .map(|v| v as usize)
                            .ok_or_else(|| D::Error::custom(format!("bad symbol {c:?} in {w:?}")))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CodeSpec::new(raw.q, raw.length, words).map_err(D::Error::custom)
    }
}

fn all_words(q: usize, length: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (q as u64).checked_pow(length as u32).unwrap_or(u64::MAX);
    (0..total).map(move |mut idx| {
        // last symbol fastest, so words come out in lexicographic order
        let mut w = vec![0; length];
        for slot in w.iter_mut().rev() {
            *slot = (idx % q as u64) as usize;
            idx /= q as u64;
        }
        w
    })
}

/// The code `{v : h v = 0 mod q}` for a prime `q`.
pub fn code_from_parity_check(h: &[Vec<usize>], q: usize) -> Result<CodeSpec> {
    if !is_prime(q as u64) {
        return Err(Error::input(format!("parity checks need a prime alphabet, got {q}")));
    }
    let Some(first) = h.first() else {
        return Err(Error::input("parity check matrix has no rows"));
    };
    let length = first.len();
    if let Some(bad) = h.iter().find(|r| r.len() != length) {
        return Err(Error::DimensionMismatch {
            expected: length,
            found: bad.len(),
        });
    }
    if (q as f64).powi(length as i32) > 1e7 {
        return Err(Error::input("code too large to enumerate"));
    }
    let words = all_words(q, length)
        .filter(|w| {
            h.iter()
                .all(|row| row.iter().zip(w).map(|(a, b)| a * b).sum::<usize>() % q == 0)
        })
        .collect();
    CodeSpec::new(q, length, words)
}

/// Size of the union of radius-1 Hamming balls around the code.
pub fn rook_bound(code: &CodeSpec) -> usize {
    let mut covered: HashSet<Vec<usize>> = HashSet::new();
    for w in code.words() {
        covered.insert(w.clone());
        for pos in 0..code.length() {
            for s in 0..code.q() {
                if s != w[pos] {
                    let mut n = w.clone();
                    n[pos] = s;
                    covered.insert(n);
                }
            }
        }
    }
    covered.len()
}

/// Weight-`d` binary words within distance 2 of a constant-weight-`d` code.
pub fn grassmann_code_bound(code: &CodeSpec) -> Result<usize> {
    if code.q() != 2 {
        return Err(Error::input("Grassmannian bound needs a binary code"));
    }
    let weight = |w: &[usize]| w.iter().filter(|&&s| s == 1).count();
    let Some(first) = code.words().first() else {
        return Ok(0);
    };
    let d = weight(first);
    if code.words().iter().any(|w| weight(w) != d) {
        return Err(Error::input("code is not of constant weight"));
    }
    let mut covered: HashSet<Vec<usize>> = HashSet::new();
    for w in code.words() {
        covered.insert(w.clone());
        for i in (0..w.len()).filter(|&i| w[i] == 1) {
            for j in (0..w.len()).filter(|&j| w[j] == 0) {
                let mut n = w.clone();
                n[i] = 0;
                n[j] = 1;
                covered.insert(n);
            }
        }
    }
    Ok(covered.len())
}

/// Number of `alpha in N^m`, `|alpha| = d`, within 1-distance 2 of some
/// corner `d e_i`; `corners` are 1-based.
pub fn veronese_corner_bound(corners: &[usize], m: usize, d: usize) -> Result<usize> {
    if m < 2 || d < 1 {
        return Err(Error::param(format!("need m >= 2 and d >= 1, got m={m}, d={d}")));
    }
    check_corners(corners, m)?;
    Ok(multi_indices(m, d)
        .iter()
        .filter(|alpha| {
            corners.iter().any(|&c| {
                let l1: usize = alpha
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| if j == c - 1 { d - a } else { a })
                    .sum();
                l1 <= 2
            })
        })
        .count())
}

fn check_corners(corners: &[usize], m: usize) -> Result<()> {
    if corners.is_empty() || corners.len() > m {
        return Err(Error::param(format!("need 1..={m} corners, got {}", corners.len())));
    }
    let distinct: HashSet<_> = corners.iter().collect();
    if distinct.len() != corners.len() || corners.iter().any(|&c| c == 0 || c > m) {
        return Err(Error::param(format!("corners must be distinct elements of 1..={m}")));
    }
    Ok(())
}

/// Sites at the corners `d e_i` of the degree-`d` simplex (1-based indices).
pub fn veronese_corner_witness(corners: &[usize], m: usize, d: usize) -> Result<Witness> {
    check_corners(corners, m)?;
    let sites = corners
        .iter()
        .map(|&c| RationalPoint::unit(m, c - 1).scale(&crate::rational::int(d as i64)))
        .collect();
    Witness::sites(sites)
}

/// Sites at the Segre images of the codewords, followed by `extra_sites`.
/// Binary codes map to reduced coordinates, where the image of a word is the
/// word itself; larger alphabets map to unreduced coordinates.
pub fn code_to_segre_witness(code: &CodeSpec, extra_sites: &[RationalPoint]) -> Result<Witness> {
    let reduced = code.q() == 2;
    let mut sites: Vec<RationalPoint> = code
        .words()
        .iter()
        .map(|w| segre_point(w, code.q(), reduced))
        .collect();
    let dim = segre_dim(code);
    for s in extra_sites {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        sites.push(s.clone());
    }
    Witness::sites(sites)
}

fn segre_dim(code: &CodeSpec) -> usize {
    if code.q() == 2 {
        code.length()
    } else {
        code.length() * code.q()
    }
}

/// Lexicographic greedy binary code of constant weight `d` and length `m`.
pub fn greedy_constant_weight_code(m: usize, d: usize, min_dist: usize) -> Result<CodeSpec> {
    if d == 0 || d > m {
        return Err(Error::param(format!("need 1 <= d <= m, got m={m}, d={d}")));
    }
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for subset in subsets(m, d) {
        let mut w = vec![0; m];
        for i in subset {
            w[i] = 1;
        }
        if kept.iter().all(|k| hamming(k, &w) >= min_dist) {
            kept.push(w);
        }
    }
    CodeSpec::new(2, m, kept)
}

/// Greedy code over a seeded shuffle of all `q`-ary words of length `length`:
/// a word is kept when it is at distance at least `min_dist` from every kept
/// word, up to `max_words` words.
pub fn random_distance_code(q: usize, length: usize, min_dist: usize, max_words: usize, seed: u64) -> Result<CodeSpec> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    if (q as f64).powi(length as i32) > 1e6 {
        return Err(Error::input("code too large to enumerate"));
    }
    let mut words: Vec<Vec<usize>> = all_words(q, length).collect();
    words.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for w in words {
        if kept.len() == max_words {
            break;
        }
        if kept.iter().all(|k| hamming(k, &w) >= min_dist) {
            kept.push(w);
        }
    }
    CodeSpec::new(q, length, kept)
}

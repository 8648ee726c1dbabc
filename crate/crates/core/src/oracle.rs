//! Terracini rank oracle: the rank of the stacked Jacobians of the
//! parametrisation at `k` random points over `Z_p` is a lower bound on
//! `dim kC`, attained for generic points in characteristic zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::is_prime;
use crate::error::{Error, Result};
use crate::models::{
    expected_secant_dim, multi_indices, segre_words, subsets, Family,
    ModelDescriptor,
};

/// Default primes just below `2^31`.
pub const DEFAULT_PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

/// Smallest prime accepted by [`terracini_dim`].
pub const PRIME_FLOOR: u64 = 1 << 30;

pub const DEFAULT_TRIALS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub model: ModelDescriptor,
    pub k: usize,
    pub prime: u64,
    pub trials: usize,
    pub rank_per_trial: Vec<usize>,
    pub reported_dim: usize,
    pub matches_expected: bool,
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b, p);
        }
        b = mul(b, b, p);
        e >>= 1;
    }
    acc
}

/// Rank over `Z_p` for a prime `p < 2^32`.
pub fn rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    for x in rows.iter_mut().flatten() {
        *x %= p;
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for x in &mut rows[rank][col..] {
            *x = mul(*x, inv, p);
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            let f = row[col];
            if r == rank || f == 0 {
                continue;
            }
            for c in col..cols {
                row[c] = (row[c] + mul(p - f, pivot[c], p)) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            det = (p - det) % p;
        }
        det = mul(det, m[col][col], p);
        let inv = pow_mod(m[col][col], p - 2, p);
        for r in col + 1..n {
            let f = mul(m[r][col], inv, p);
            if f == 0 {
                continue;
            }
            for c in col..n {
                m[r][c] = (m[r][c] + mul(p - f, m[col][c], p)) % p;
            }
        }
    }
    det
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `|alpha|! / prod alpha_j!` reduced mod `p`; a zero residue is a bad prime.
fn multinomial_mod(alpha: &[usize], p: u64) -> Result<u64> {
    let d: usize = alpha.iter().sum();
    let mut c = factorial(d);
    for &a in alpha {
        c /= factorial(a);
    }
    let r = (c % p as u128) as u64;
    if r == 0 {
        return Err(Error::BadPrime {
            prime: p,
            reason: format!("divides the multinomial coefficient of {alpha:?}"),
        });
    }
    Ok(r)
}

/// Value and gradient of `c t^alpha` at `t`.
fn monomial_with_gradient(coef: u64, alpha: &[usize], t: &[u64], p: u64) -> (u64, Vec<u64>) {
    let value = alpha
        .iter()
        .zip(t)
        .fold(coef, |acc, (&a, &x)| mul(acc, pow_mod(x, a as u64, p), p));
    let grad = (0..alpha.len())
        .map(|j| {
            if alpha[j] == 0 {
                return 0;
            }
            alpha.iter().zip(t).enumerate().fold(
                mul(coef, alpha[j] as u64 % p, p),
                |acc, (i, (&a, &x))| {
                    let e = if i == j { a - 1 } else { a };
                    mul(acc, pow_mod(x, e as u64, p), p)
                },
            )
        })
        .collect();
    (value, grad)
}

/// Jacobian of the coordinate functions at `point`, one row per coordinate
/// of `V` in configuration order and one column per parameter.
pub fn jacobian_at(model: &ModelDescriptor, point: &[u64], p: u64) -> Result<Vec<Vec<u64>>> {
    if point.len() != model.param_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.param_dim(),
            found: point.len(),
        });
    }
    let t: Vec<u64> = point.iter().map(|x| x % p).collect();
    match model.family() {
        Family::Veronese { m, d } => veronese_jacobian(&[(*m, *d)], &t, p),
        Family::BinaryForms { d } => veronese_jacobian(&[(2, *d)], &t, p),
        Family::SegreVeronese { factors } => veronese_jacobian(factors, &t, p),
        Family::Segre { d, m } => Ok(segre_jacobian(*d, *m, &t, p)),
        Family::Grassmannian { m, d } => Ok(grassmann_jacobian(*m, *d, &t, p)),
    }
}

fn veronese_jacobian(factors: &[(usize, usize)], t: &[u64], p: u64) -> Result<Vec<Vec<u64>>> {
    let offsets: Vec<usize> = factors
        .iter()
        .scan(0, |acc, &(m, _)| {
            let o = *acc;
            *acc += m;
            Some(o)
        })
        .collect();
    // per factor: (value, gradient) of every multi-index, colex order
    let per_factor = factors
        .iter()
        .zip(&offsets)
        .map(|(&(m, d), &o)| {
            multi_indices(m, d)
                .iter()
                .map(|alpha| {
                    let c = multinomial_mod(alpha, p)?;
                    Ok(monomial_with_gradient(c, alpha, &t[o..o + m], p))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    // enumerate combinations with the first factor fastest
    let counts: Vec<usize> = per_factor.iter().map(Vec::len).collect();
    let total: usize = counts.iter().product();
    let width = t.len();
    let mut rows = Vec::with_capacity(total);
    for mut idx in 0..total {
        let choice: Vec<usize> = counts
            .iter()
            .map(|&c| {
                let x = idx % c;
                idx /= c;
                x
            })
            .collect();
        let mut row = vec![0u64; width];
        for (f, &ci) in choice.iter().enumerate() {
            let others = choice
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .fold(1u64, |acc, (g, &cg)| mul(acc, per_factor[g][cg].0, p));
            for (j, &gj) in per_factor[f][ci].1.iter().enumerate() {
                row[offsets[f] + j] = mul(gj, others, p);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn segre_jacobian(d: usize, m: usize, t: &[u64], p: u64) -> Vec<Vec<u64>> {
    segre_words(d, m)
        .iter()
        .map(|w| {
            let mut row = vec![0u64; d * m];
            for r in 0..d {
                row[r * m + w[r]] = (0..d)
                    .filter(|&s| s != r)
                    .fold(1u64, |acc, s| mul(acc, t[s * m + w[s]], p));
            }
            row
        })
        .collect()
}

fn grassmann_jacobian(m: usize, d: usize, t: &[u64], p: u64) -> Vec<Vec<u64>> {
    subsets(m, d)
        .iter()
        .map(|cols| {
            let mut row = vec![0u64; d * m];
            for r in 0..d {
                for (pos, &c) in cols.iter().enumerate() {
                    let minor: Vec<Vec<u64>> = (0..d)
                        .filter(|&rr| rr != r)
                        .map(|rr| {
                            cols.iter()
                                .enumerate()
                                .filter(|&(pp, _)| pp != pos)
                                .map(|(_, &cc)| t[rr * m + cc])
                                .collect()
                        })
                        .collect();
                    let cof = det_mod(minor, p);
                    row[r * m + c] = if (r + pos) % 2 == 0 { cof } else { (p - cof) % p };
                }
            }
            row
        })
        .collect()
}

fn check_prime(prime: u64) -> Result<()> {
    if prime <= PRIME_FLOOR || prime >= 1 << 32 || !is_prime(prime) {
        return Err(Error::BadPrime {
            prime,
            reason: "need a prime between 2^30 and 2^32".into(),
        });
    }
    Ok(())
}

/// Max over `trials` of the stacked Jacobian rank at `k` random points.
pub fn terracini_dim(
    model: &ModelDescriptor,
    k: usize,
    prime: u64,
    trials: usize,
    seed: u64,
) -> Result<OracleReport> {
    if k == 0 || trials == 0 {
        return Err(Error::param("k and trials must be positive"));
    }
    check_prime(prime)?;
    let n = model.ambient_space_dim();
    let pd = model.param_dim();
    let rank_per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut stacked = vec![Vec::with_capacity(k * pd); n];
            for _ in 0..k {
                let point: Vec<u64> = (0..pd).map(|_| rng.gen_range(1..prime)).collect();
                let jac = jacobian_at(model, &point, prime)?;
                for (row, j) in stacked.iter_mut().zip(jac) {
                    row.extend(j);
                }
            }
            Ok(rank_mod(stacked, prime))
        })
        .collect::<Result<Vec<usize>>>()?;
    let reported_dim = *rank_per_trial.iter().max().expect("trials >= 1");
    Ok(OracleReport {
        model: model.clone(),
        k,
        prime,
        trials,
        rank_per_trial,
        reported_dim,
        matches_expected: reported_dim == expected_secant_dim(model, k),
    })
}

/// Run on the first two default primes, rotating to the next prime when
/// they disagree or a prime is unusable; the largest rank is kept.
pub fn stable_dim(model: &ModelDescriptor, k: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    let mut best: Option<OracleReport> = None;
    let mut agreeing = 0;
    for &prime in &DEFAULT_PRIMES {
        let report = match terracini_dim(model, k, prime, trials, seed) {
            Ok(r) => r,
            Err(Error::BadPrime { .. }) => continue,
            Err(e) => return Err(e),
        };
        match &best {
            Some(b) if b.reported_dim == report.reported_dim => agreeing += 1,
            Some(b) if b.reported_dim > report.reported_dim => {}
            _ => {
                best = Some(report);
                agreeing = 1;
            }
        }
        if agreeing >= 2 {
            break;
        }
    }
    best.ok_or_else(|| Error::BadPrime {
        prime: DEFAULT_PRIMES[DEFAULT_PRIMES.len() - 1],
        reason: "no default prime usable".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = DEFAULT_PRIMES[0];

    #[test]
    fn binary_form_at_coordinate_point() {
        let model = ModelDescriptor::veronese(2, 5).unwrap();
        let jac = jacobian_at(&model, &[1, 0], P).unwrap();
        let nonzero: Vec<usize> = (0..jac.len())
            .filter(|&r| jac[r].iter().any(|&x| x != 0))
            .collect();
        // rows t1^5 and t1^4 t2 in colex order
        assert_eq!(nonzero, vec![0, 1]);
        assert_eq!(rank_mod(jac, P), 2);
    }

    #[test]
    fn segre_pure_tensor_rank() {
        let model = ModelDescriptor::segre(2, 2).unwrap();
        let jac = jacobian_at(&model, &[1, 0, 1, 0], P).unwrap();
        assert_eq!(rank_mod(jac, P), 3);
    }

    #[test]
    fn defective_veronese_cases() {
        let v32 = ModelDescriptor::veronese(3, 2).unwrap();
        assert_eq!(terracini_dim(&v32, 2, P, 3, 1).unwrap().reported_dim, 5);
        let v34 = ModelDescriptor::veronese(3, 4).unwrap();
        let r = terracini_dim(&v34, 5, P, 3, 1).unwrap();
        assert_eq!(r.reported_dim, 14);
        assert!(!r.matches_expected);
    }

    #[test]
    fn grassmannian_cone_dim() {
        let g = ModelDescriptor::grassmannian(4, 2).unwrap();
        let r = terracini_dim(&g, 1, P, 2, 3).unwrap();
        assert_eq!(r.reported_dim, 5);
        assert!(r.matches_expected);
    }

    #[test]
    fn rejects_small_or_composite_primes() {
        let v = ModelDescriptor::veronese(3, 2).unwrap();
        assert!(matches!(terracini_dim(&v, 1, 101, 1, 0), Err(Error::BadPrime { .. })));
        assert!(matches!(
            terracini_dim(&v, 1, 2_147_483_649, 1, 0),
            Err(Error::BadPrime { .. })
        ));
    }

    #[test]
    fn multinomial_zero_residue() {
        assert!(matches!(multinomial_mod(&[2, 1], 3), Err(Error::BadPrime { .. })));
        assert_eq!(multinomial_mod(&[2, 1], 5).unwrap(), 3);
    }

    #[test]
    fn determinant_mod_p() {
        assert_eq!(det_mod(vec![vec![1, 2], vec![3, 4]], 7), 5);
        assert_eq!(det_mod(vec![], 7), 1);
    }
}

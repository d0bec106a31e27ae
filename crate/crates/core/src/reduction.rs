//! Gauss reduction of binary lattices, integral LLL on Gram matrices,
//! reduced-form enumeration and isometry testing.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enumeration::Budget;
use crate::error::{QfError, Result};
use crate::gram::{GramMatrix, Lattice};
use crate::represent::{self, Embedding};

/// Minkowski-reduced binary Gram matrix [[a,b],[b,c]] with 0 ≤ 2b ≤ a ≤ c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedBinary {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedBinary {
    /// Checks the reduction inequalities without reducing.
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if !(0 <= 2 * b && 2 * b <= a && a <= c && a * c - b * b > 0) {
            return Err(QfError::PreconditionFailed(format!("[[{a},{b}],[{b},{c}]] is not reduced")));
        }
        Ok(Self { a, b, c })
    }

    pub fn gram(&self) -> GramMatrix {
        GramMatrix::from_rows(&[vec![self.a, self.b], vec![self.b, self.c]]).expect("symmetric")
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::from_gram_unchecked(self.gram())
    }

    pub fn disc(&self) -> i64 {
        self.a * self.c - self.b * self.b
    }

    /// Successive minima (a, c).
    pub fn minima(&self) -> (i64, i64) {
        (self.a, self.c)
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.b, self.c]]
    }
}

impl fmt::Display for ReducedBinary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.b, self.c)
    }
}

/// Gauss reduction of [[a,b],[b,c]]; returns the reduced entries and the
/// row-major transform U with Uᵀ·G·U reduced.
pub(crate) fn gauss_reduce(a: i64, b: i64, c: i64) -> ((i64, i64, i64), [i64; 4]) {
    let (mut a, mut b, mut c) = (a as i128, b as i128, c as i128);
    let mut u = [1i64, 0, 0, 1];
    loop {
        let q = Integer::div_floor(&(2 * b + a), &(2 * a));
        if q != 0 {
            c = c - 2 * q * b + q * q * a;
            b -= q * a;
            let q = q as i64;
            u[1] -= q * u[0];
            u[3] -= q * u[2];
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            u = [u[1], u[0], u[3], u[2]];
            continue;
        }
        break;
    }
    if b < 0 {
        b = -b;
        u[1] = -u[1];
        u[3] = -u[3];
    }
    ((a as i64, b as i64, c as i64), u)
}

/// Reduces a rank-2 Gram matrix. The transform is unimodular (det ±1).
pub fn reduce_binary(g: &GramMatrix) -> Result<(ReducedBinary, [[i64; 2]; 2])> {
    if g.dim() != 2 {
        return Err(QfError::DimensionMismatch(format!("expected rank 2, got {}", g.dim())));
    }
    g.check_positive_definite()?;
    let ((a, b, c), u) = gauss_reduce(g.get(0, 0), g.get(0, 1), g.get(1, 1));
    Ok((ReducedBinary { a, b, c }, [[u[0], u[1]], [u[2], u[3]]]))
}

/// Integral LLL (δ = 3/4) on a positive-definite Gram matrix.
///
/// Returns the row-major transform H (columns are the new basis in old
/// coordinates) and Hᵀ·G·H.
pub(crate) fn lll_gram(g: &GramMatrix) -> Result<(Vec<i64>, GramMatrix)> {
    let n = g.dim();
    let mut b: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| BigInt::from(g.get(i, j))).collect()).collect();
    let mut h: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect()).collect();
    if n <= 1 {
        return finish_lll(&h, &b, n);
    }
    // 1-based as in the textbook statement; index 0 of `d` is d_0 = 1.
    let mut d: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut lam: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::from(1);
    d[1] = b[0][0].clone();
    let mut k = 2usize;
    let mut kmax = 1usize;

    fn redi(
        k: usize,
        l: usize,
        b: &mut [Vec<BigInt>],
        h: &mut [Vec<BigInt>],
        d: &[BigInt],
        lam: &mut [Vec<BigInt>],
    ) {
        let two_lam: BigInt = &lam[k][l] * 2;
        if two_lam.abs() <= d[l] {
            return;
        }
        let q = (&two_lam + &d[l]).div_floor(&(&d[l] * 2));
        let n = b.len();
        for row in h.iter_mut() {
            let t = &row[l - 1] * &q;
            row[k - 1] -= t;
        }
        let bkk = &b[k - 1][k - 1] - &b[k - 1][l - 1] * &q * 2 + &b[l - 1][l - 1] * &q * &q;
        for j in 0..n {
            if j != k - 1 {
                let t = &b[l - 1][j] * &q;
                b[k - 1][j] -= t;
            }
        }
        b[k - 1][k - 1] = bkk;
        for j in 0..n {
            b[j][k - 1] = b[k - 1][j].clone();
        }
        lam[k][l] -= &q * &d[l];
        for i in 1..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }

    loop {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = b[k - 1][j - 1].clone();
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(QfError::NotPositiveDefinite { index: k });
                    }
                    d[k] = u;
                }
            }
        }
        redi(k, k - 1, &mut b, &mut h, &d, &mut lam);
        let lhs = &d[k] * &d[k - 2] * 4;
        let rhs = &d[k - 1] * &d[k - 1] * 3 - &lam[k][k - 1] * &lam[k][k - 1] * 4;
        if lhs < rhs {
            // SWAPI(k)
            for row in h.iter_mut() {
                row.swap(k - 1, k - 2);
            }
            b.swap(k - 1, k - 2);
            for row in b.iter_mut() {
                row.swap(k - 1, k - 2);
            }
            for j in 1..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let l = lam[k][k - 1].clone();
            let big_b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                lam[i][k - 1] = (&big_b * &t + &l * &lam[i][k]) / &d[k];
            }
            d[k - 1] = big_b;
            if k > 2 {
                k -= 1;
            }
        } else {
            for l in (1..=k - 2).rev() {
                redi(k, l, &mut b, &mut h, &d, &mut lam);
            }
            k += 1;
            if k > n {
                break;
            }
        }
    }
    finish_lll(&h, &b, n)
}

fn finish_lll(h: &[Vec<BigInt>], b: &[Vec<BigInt>], n: usize) -> Result<(Vec<i64>, GramMatrix)> {
    let conv = |v: &BigInt| v.to_i64().ok_or(QfError::Overflow("LLL"));
    let t = h.iter().flat_map(|r| r.iter().map(conv)).collect::<Result<Vec<_>>>()?;
    let g = b.iter().flat_map(|r| r.iter().map(conv)).collect::<Result<Vec<_>>>()?;
    Ok((t, GramMatrix::from_flat(n, g)?))
}

/// LLL-reduced basis of `l` and the transform (original = T · reduced).
pub fn lll_reduce(l: &Lattice) -> Result<(Lattice, Vec<i64>)> {
    if l.rank() == 0 {
        return Err(QfError::PreconditionFailed("LLL needs rank ≥ 1".into()));
    }
    let (t, g) = lll_gram(&l.gram())?;
    Ok((Lattice::from_gram_unchecked(g), t))
}

/// Reduces any positive-definite form of small rank: Gauss for rank 2, LLL
/// beyond. Returns (U, Uᵀ·G·U).
pub(crate) fn reduce_any(g: &GramMatrix) -> Result<(Vec<i64>, GramMatrix)> {
    match g.dim() {
        0 | 1 => Ok(((0..g.dim()).map(|_| 1).collect(), g.clone())),
        2 => {
            let ((a, b, c), u) = gauss_reduce(g.get(0, 0), g.get(0, 1), g.get(1, 1));
            Ok((u.to_vec(), GramMatrix::from_flat(2, vec![a, b, b, c])?))
        }
        _ => lll_gram(g),
    }
}

/// All reduced binaries with `min_mu1 ≤ a` and `c ≤ max_mu2`, sorted by (a, c, b).
pub fn enumerate_reduced_binaries(max_mu2: i64, min_mu1: i64) -> Result<Vec<ReducedBinary>> {
    if min_mu1 > max_mu2 {
        return Err(QfError::PreconditionFailed(format!("min_mu1 {min_mu1} exceeds max_mu2 {max_mu2}")));
    }
    let mut out = Vec::new();
    for a in min_mu1.max(1)..=max_mu2 {
        for c in a..=max_mu2 {
            for b in 0..=a / 2 {
                out.push(ReducedBinary { a, b, c });
            }
        }
    }
    Ok(out)
}

/// Isometry test with witness: an embedding of `l1` into `l2` that is
/// unimodular.
pub fn is_isometric(l1: &Lattice, l2: &Lattice) -> Result<Option<Embedding>> {
    is_isometric_with_budget(l1, l2, &Budget::default())
}

pub fn is_isometric_with_budget(l1: &Lattice, l2: &Lattice, budget: &Budget) -> Result<Option<Embedding>> {
    if l1.rank() != l2.rank() || l1.disc() != l2.disc() {
        return Ok(None);
    }
    if l1.rank() == 2 {
        let (r1, u1) = reduce_binary(&l1.gram())?;
        let (r2, u2) = reduce_binary(&l2.gram())?;
        if r1 != r2 {
            return Ok(None);
        }
        let u1 = [u1[0][0], u1[0][1], u1[1][0], u1[1][1]];
        let u2 = [u2[0][0], u2[0][1], u2[1][0], u2[1][1]];
        let inv = crate::arith::unimodular_inverse(&u1, 2)?;
        let m = crate::arith::mat_mul(&u2, &inv, 2, 2, 2)?;
        return Ok(Some(Embedding::new(2, 2, m)));
    }
    represent::represents_lattice_with_budget(l2, l1, budget)
}

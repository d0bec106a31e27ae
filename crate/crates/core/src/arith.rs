//! Exact integer linear algebra used throughout the crate.
//!
//! Hot loops run on `i128` with checked operations; every routine that can
//! overflow is written once against [`ExactInt`] and re-run on [`BigInt`]
//! when the fast path reports overflow.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QfError, Result};

/// Marker for arithmetic that left the `i128` fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) trait ExactInt: Clone + Ord + std::fmt::Debug {
    fn lift(v: i64) -> Self;
    fn nil() -> Self;
    fn add(&self, o: &Self) -> std::result::Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> std::result::Result<Self, Overflow>;
    fn mul(&self, o: &Self) -> std::result::Result<Self, Overflow>;
    /// Exact quotient; the caller guarantees divisibility.
    fn div_exact(&self, o: &Self) -> Self;
    fn div_floor(&self, o: &Self) -> Self;
    fn div_ceil(&self, o: &Self) -> Self;
    /// Floor of the square root of a nonnegative value.
    fn isqrt(&self) -> Self;
    fn is_neg(&self) -> bool;
    fn is_zero_val(&self) -> bool;
    fn narrow(&self) -> std::result::Result<i64, Overflow>;
}

impl ExactInt for i128 {
    fn lift(v: i64) -> Self {
        v as i128
    }
    fn nil() -> Self {
        0
    }
    fn add(&self, o: &Self) -> std::result::Result<Self, Overflow> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> std::result::Result<Self, Overflow> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> std::result::Result<Self, Overflow> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert_eq!(self % o, 0);
        self / o
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn div_ceil(&self, o: &Self) -> Self {
        -Integer::div_floor(&-self, o)
    }
    fn isqrt(&self) -> Self {
        Roots::sqrt(self)
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn is_zero_val(&self) -> bool {
        *self == 0
    }
    fn narrow(&self) -> std::result::Result<i64, Overflow> {
        i64::try_from(*self).map_err(|_| Overflow)
    }
}

impl ExactInt for BigInt {
    fn lift(v: i64) -> Self {
        BigInt::from(v)
    }
    fn nil() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> std::result::Result<Self, Overflow> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> std::result::Result<Self, Overflow> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> std::result::Result<Self, Overflow> {
        Ok(self * o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn div_ceil(&self, o: &Self) -> Self {
        -Integer::div_floor(&-self, o)
    }
    fn isqrt(&self) -> Self {
        Roots::sqrt(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_zero_val(&self) -> bool {
        self.is_zero()
    }
    fn narrow(&self) -> std::result::Result<i64, Overflow> {
        ToPrimitive::to_i64(self).ok_or(Overflow)
    }
}

/// Runs `f` on `i128`, falling back to `BigInt` on overflow.
pub(crate) fn with_fallback<R>(
    f128: impl FnOnce() -> std::result::Result<R, Overflow>,
    fbig: impl FnOnce() -> std::result::Result<R, Overflow>,
) -> R {
    match f128() {
        Ok(r) => r,
        Err(Overflow) => fbig().expect("BigInt arithmetic cannot overflow"),
    }
}

/// Fraction-free elimination of a symmetric matrix. Returns the sequence of
/// leading principal minors d_1..d_n, stopping at the first nonpositive one.
fn leading_minors_generic<T: ExactInt>(
    entries: &[i64],
    n: usize,
) -> std::result::Result<(Vec<T>, Option<usize>), Overflow> {
    let mut a: Vec<T> = entries.iter().map(|&v| T::lift(v)).collect();
    let mut prev = T::lift(1);
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a[k * n + k].clone();
        if pivot.is_neg() || pivot.is_zero_val() {
            return Ok((minors, Some(k + 1)));
        }
        minors.push(pivot.clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = pivot
                    .mul(&a[i * n + j])?
                    .sub(&a[i * n + k].mul(&a[k * n + j])?)?;
                a[i * n + j] = v.div_exact(&prev);
            }
        }
        prev = pivot;
    }
    Ok((minors, None))
}

/// Leading principal minors as `BigInt`, or the 1-based index of the first
/// nonpositive minor.
pub(crate) fn leading_minors(entries: &[i64], n: usize) -> std::result::Result<Vec<BigInt>, usize> {
    let (minors, bad) = with_fallback(
        || {
            leading_minors_generic::<i128>(entries, n)
                .map(|(m, b)| (m.into_iter().map(BigInt::from).collect::<Vec<_>>(), b))
        },
        || leading_minors_generic::<BigInt>(entries, n),
    );
    match bad {
        Some(k) => Err(k),
        None => Ok(minors),
    }
}

/// Determinant of an arbitrary square integer matrix by Bareiss elimination
/// with row pivoting.
pub fn determinant(entries: &[i64], n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigInt> = entries.iter().map(|&v| BigInt::from(v)).collect();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n {
        if a[k * n + k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &pivot * &a[i * n + j] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = pivot;
    }
    if sign < 0 {
        -prev
    } else {
        prev
    }
}

fn is_psd_generic<T: ExactInt>(entries: &[i64], n: usize) -> std::result::Result<bool, Overflow> {
    let mut a: Vec<T> = entries.iter().map(|&v| T::lift(v)).collect();
    let mut prev = T::lift(1);
    for k in 0..n {
        let pivot = a[k * n + k].clone();
        if pivot.is_neg() {
            return Ok(false);
        }
        if pivot.is_zero_val() {
            // A zero diagonal entry of a PSD matrix forces a zero row.
            if (k + 1..n).any(|j| !a[k * n + j].is_zero_val()) {
                return Ok(false);
            }
            continue;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = pivot
                    .mul(&a[i * n + j])?
                    .sub(&a[i * n + k].mul(&a[k * n + j])?)?;
                a[i * n + j] = v.div_exact(&prev);
            }
        }
        prev = pivot;
    }
    Ok(true)
}

/// Exact positive-semidefiniteness test of a symmetric integer matrix.
pub fn is_psd(entries: &[i64], n: usize) -> bool {
    with_fallback(
        || is_psd_generic::<i128>(entries, n),
        || is_psd_generic::<BigInt>(entries, n),
    )
}

/// Splits a positive-semidefinite Gram matrix into its nondegenerate part.
///
/// Returns `(rank, u)` where `u` (row-major, n×n) is unimodular and
/// `uᵀ·G·u` is zero outside its leading `rank`×`rank` block.
pub(crate) fn radical_split(entries: &[i64], n: usize) -> Result<(usize, Vec<i64>)> {
    // Column-reduce G with unimodular column operations so that the trailing
    // columns of G·U vanish; those columns of U span the radical.
    let mut g: Vec<BigInt> = entries.iter().map(|&v| BigInt::from(v)).collect();
    let mut u: Vec<BigInt> = (0..n * n)
        .map(|i| if i / n == i % n { BigInt::one() } else { BigInt::zero() })
        .collect();
    let col_op = |m: &mut Vec<BigInt>, p: usize, q: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt| {
        // (col_p, col_q) <- (a*col_p + b*col_q, c*col_p + d*col_q)
        for r in 0..n {
            let x = m[r * n + p].clone();
            let y = m[r * n + q].clone();
            m[r * n + p] = a * &x + b * &y;
            m[r * n + q] = c * &x + d * &y;
        }
    };
    let mut pivot_col = 0usize;
    for row in 0..n {
        if pivot_col >= n {
            break;
        }
        for col in pivot_col + 1..n {
            let x = g[row * n + pivot_col].clone();
            let y = g[row * n + col].clone();
            if y.is_zero() {
                continue;
            }
            let e = x.extended_gcd(&y);
            let (a, b) = (e.x, e.y);
            let (c, d) = (-(&y / &e.gcd), &x / &e.gcd);
            col_op(&mut g, pivot_col, col, &a, &b, &c, &d);
            col_op(&mut u, pivot_col, col, &a, &b, &c, &d);
        }
        if !g[row * n + pivot_col].is_zero() {
            pivot_col += 1;
        }
    }
    let rank = pivot_col;
    let u64s: Vec<i64> = u
        .iter()
        .map(|v| v.to_i64().ok_or(QfError::Overflow("radical transform")))
        .collect::<Result<_>>()?;
    Ok((rank, u64s))
}

/// Congruence transform `uᵀ·G·u` with `u` of shape n×m (row-major).
pub fn congruence(gram: &[i64], n: usize, u: &[i64], m: usize) -> Result<Vec<i64>> {
    let mut gu = vec![0i128; n * m];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0i128;
            for k in 0..n {
                s += gram[i * n + k] as i128 * u[k * m + j] as i128;
            }
            gu[i * m + j] = s;
        }
    }
    let mut out = vec![0i64; m * m];
    for i in 0..m {
        for j in i..m {
            let mut s = 0i128;
            for k in 0..n {
                s = s
                    .checked_add((u[k * m + i] as i128).checked_mul(gu[k * m + j]).ok_or(QfError::Overflow("congruence"))?)
                    .ok_or(QfError::Overflow("congruence"))?;
            }
            let v = i64::try_from(s).map_err(|_| QfError::Overflow("congruence"))?;
            out[i * m + j] = v;
            out[j * m + i] = v;
        }
    }
    Ok(out)
}

/// Product of row-major integer matrices (a: r×k, b: k×c).
pub fn mat_mul(a: &[i64], b: &[i64], r: usize, k: usize, c: usize) -> Result<Vec<i64>> {
    let mut out = vec![0i64; r * c];
    for i in 0..r {
        for j in 0..c {
            let mut s = 0i128;
            for t in 0..k {
                s += a[i * k + t] as i128 * b[t * c + j] as i128;
            }
            out[i * c + j] = i64::try_from(s).map_err(|_| QfError::Overflow("matrix product"))?;
        }
    }
    Ok(out)
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(u: &[i64], n: usize) -> Result<Vec<i64>> {
    let mut a: Vec<BigRational> = u.iter().map(|&v| BigRational::from_integer(v.into())).collect();
    let mut inv: Vec<BigRational> = (0..n * n)
        .map(|i| BigRational::from_integer(if i / n == i % n { 1.into() } else { 0.into() }))
        .collect();
    for k in 0..n {
        let r = (k..n)
            .find(|&r| !a[r * n + k].is_zero())
            .ok_or_else(|| QfError::PreconditionFailed("matrix is singular".into()))?;
        for j in 0..n {
            a.swap(k * n + j, r * n + j);
            inv.swap(k * n + j, r * n + j);
        }
        let p = a[k * n + k].clone();
        for j in 0..n {
            a[k * n + j] = &a[k * n + j] / &p;
            inv[k * n + j] = &inv[k * n + j] / &p;
        }
        for i in 0..n {
            if i == k || a[i * n + k].is_zero() {
                continue;
            }
            let f = a[i * n + k].clone();
            for j in 0..n {
                let t = &f * &a[k * n + j];
                a[i * n + j] -= t;
                let t = &f * &inv[k * n + j];
                inv[i * n + j] -= t;
            }
        }
    }
    inv.iter()
        .map(|v| {
            if !v.is_integer() {
                return Err(QfError::PreconditionFailed("matrix is not unimodular".into()));
            }
            v.to_integer().to_i64().ok_or(QfError::Overflow("inverse"))
        })
        .collect()
}

/// Floor square root for nonnegative `u64` values.
pub fn isqrt_u64(v: u64) -> u64 {
    Roots::sqrt(&v)
}

pub fn is_square(v: i64) -> bool {
    v >= 0 && {
        let r = isqrt_u64(v as u64);
        r * r == v as u64
    }
}

/// Deterministic primality test for 64-bit integers (Miller–Rabin with a
/// witness set that is exact below 2^64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Kronecker symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: i64, p: i64) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let mut b = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as i128 * b as i128) % p as i128) as i64;
        }
        b = ((b as i128 * b as i128) % p as i128) as i64;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn signed(v: &BigInt) -> i64 {
    if v.is_negative() {
        -1
    } else if v.is_zero() {
        0
    } else {
        1
    }
}

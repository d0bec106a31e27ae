//! Complete short-vector enumeration and successive minima.
//!
//! The walk is Fincke–Pohst over the Bareiss (fraction-free) form of the
//! Gram matrix. With `D_i` the leading principal minors, `A_i = D_{i+1}` and
//! `L_i = Σ_{j>i} a⁽ⁱ⁾_{ij} x_j`, the scaled remaining budget
//! `U_i = D_i·(N − Q(π_i x))` is an integer and obeys
//!
//! ```text
//! U_n = D_n·N,   (A_i x_i + L_i)² ≤ D_i·U_{i+1},   U_i = (D_i·U_{i+1} − (A_i x_i + L_i)²) / A_i
//! ```
//!
//! so every interval bound is an integer square root and nothing is rounded.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{ExactInt, Overflow};
use crate::error::{QfError, Result};
use crate::gram::{ComponentCore, GramMatrix, Lattice, Vector};
use crate::reduction;

/// Default node budget for a single query.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

static DEFAULT_LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_BUDGET);

/// Node counter shared by every enumeration performed for one query.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: Cell<u64>,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self { limit, used: Cell::new(0) }
    }

    /// Changes the limit used by `Budget::default()` for the whole process.
    pub fn set_default_limit(limit: u64) {
        DEFAULT_LIMIT.store(limit, Ordering::Relaxed);
    }

    pub fn default_limit() -> u64 {
        DEFAULT_LIMIT.load(Ordering::Relaxed)
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub(crate) fn tick(&self) -> Result<()> {
        self.charge(1)
    }

    pub(crate) fn charge(&self, n: u64) -> Result<()> {
        let u = self.used.get().saturating_add(n);
        self.used.set(u);
        if u > self.limit {
            Err(QfError::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }

    fn rewind(&self, to: u64) {
        self.used.set(to);
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(Self::default_limit())
    }
}

#[derive(Debug, Clone)]
struct Bareiss<T> {
    /// rows[i][j - i] = a⁽ⁱ⁾_{ij} for j ≥ i.
    rows: Vec<Vec<T>>,
    /// minors[i] = D_i, with D_0 = 1.
    minors: Vec<T>,
}

fn bareiss_big(g: &GramMatrix) -> Bareiss<BigInt> {
    let n = g.dim();
    let mut m: Vec<BigInt> = g.as_slice().iter().map(|&v| BigInt::from(v)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut minors = vec![BigInt::from(1)];
    let mut prev = BigInt::from(1);
    for k in 0..n {
        rows.push((k..n).map(|j| m[k * n + j].clone()).collect::<Vec<_>>());
        let pivot = m[k * n + k].clone();
        minors.push(pivot.clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * &m[i * n + j] - &m[i * n + k] * &m[k * n + j]) / &prev;
                m[i * n + j] = v;
            }
        }
        prev = pivot;
    }
    Bareiss { rows, minors }
}

fn narrow(b: &Bareiss<BigInt>) -> Option<Bareiss<i128>> {
    let conv = |v: &Vec<BigInt>| v.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>();
    Some(Bareiss {
        rows: b.rows.iter().map(conv).collect::<Option<Vec<_>>>()?,
        minors: conv(&b.minors)?,
    })
}

/// Per-block enumeration state: reduced basis and elimination data.
#[derive(Debug)]
pub(crate) struct Engine {
    n: usize,
    /// Row-major n×n; original coordinates = transform · reduced coordinates.
    transform: Vec<i64>,
    reduced: GramMatrix,
    small: Option<Bareiss<i128>>,
    big: Bareiss<BigInt>,
}

enum Halt {
    Overflow,
    Error(QfError),
}

impl From<Overflow> for Halt {
    fn from(_: Overflow) -> Self {
        Halt::Overflow
    }
}

struct Walk<'a, T, F> {
    data: &'a Bareiss<T>,
    bound: T,
    exact: bool,
    x: Vec<i64>,
    budget: &'a Budget,
    skip: u64,
    emitted: u64,
    visit: F,
}

impl<'a, T: ExactInt, F: FnMut(&[i64], i64) -> bool> Walk<'a, T, F> {
    fn emit(&mut self, norm: i64) -> bool {
        self.emitted += 1;
        if self.emitted <= self.skip {
            return true;
        }
        (self.visit)(&self.x, norm)
    }

    /// Returns Ok(false) once the visitor asks to stop.
    fn level(&mut self, i: usize, upper: T, zero_above: bool) -> std::result::Result<bool, Halt> {
        let row = &self.data.rows[i];
        let a = row[0].clone();
        let mut l = T::nil();
        for (off, c) in row.iter().enumerate().skip(1) {
            let xj = self.x[i + off];
            if xj != 0 {
                l = l.add(&c.mul(&T::lift(xj))?)?;
            }
        }
        let rhs = self.data.minors[i].mul(&upper)?;
        if rhs.is_neg() {
            return Ok(true);
        }
        if i == 0 && self.exact {
            self.budget.tick().map_err(Halt::Error)?;
            let s = rhs.isqrt();
            if s.mul(&s)? != rhs {
                return Ok(true);
            }
            let neg_l = T::nil().sub(&l)?;
            let mut cands = vec![s.sub(&l)?];
            if !s.is_zero_val() {
                cands.push(neg_l.sub(&s)?);
            }
            for c in cands {
                let q = c.div_floor(&a);
                if q.mul(&a)? != c {
                    continue;
                }
                let v = q.narrow()?;
                if zero_above && v <= 0 {
                    continue;
                }
                self.x[0] = v;
                let norm = self.bound.narrow()?;
                let go_on = self.emit(norm);
                self.x[0] = 0;
                if !go_on {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let r = rhs.isqrt();
        let neg_l = T::nil().sub(&l)?;
        let mut lo = neg_l.sub(&r)?.div_ceil(&a).narrow()?;
        let hi = r.sub(&l)?.div_floor(&a).narrow()?;
        if zero_above {
            lo = lo.max(0);
        }
        if lo > hi {
            return Ok(true);
        }
        // Zig-zag outward from the nearest integer to -L/A.
        let two_a = a.add(&a)?;
        let center = neg_l.add(&neg_l)?.add(&a)?.div_floor(&two_a).narrow()?.clamp(lo, hi);
        let mut step = 0i64;
        loop {
            let (up, down) = (center + step, center - step);
            if up > hi && down < lo {
                break;
            }
            if up <= hi && !self.visit_value(i, up, &a, &l, &rhs, zero_above)? {
                return Ok(false);
            }
            if step > 0 && down >= lo && !self.visit_value(i, down, &a, &l, &rhs, zero_above)? {
                return Ok(false);
            }
            step += 1;
        }
        Ok(true)
    }

    fn visit_value(&mut self, i: usize, v: i64, a: &T, l: &T, rhs: &T, zero_above: bool) -> std::result::Result<bool, Halt> {
        self.budget.tick().map_err(Halt::Error)?;
        let t = a.mul(&T::lift(v))?.add(l)?;
        let rem = rhs.sub(&t.mul(&t)?)?;
        if rem.is_neg() {
            return Ok(true);
        }
        let next = rem.div_exact(a);
        self.x[i] = v;
        let go_on = if i == 0 {
            if zero_above && v == 0 {
                true
            } else {
                let norm = self.bound.sub(&next)?.narrow()?;
                self.emit(norm)
            }
        } else {
            self.level(i - 1, next, zero_above && v == 0)?
        };
        self.x[i] = 0;
        Ok(go_on)
    }
}

impl Engine {
    pub(crate) fn new(gram: &GramMatrix) -> Result<Self> {
        let n = gram.dim();
        let (transform, reduced) = match n {
            0 | 1 => (identity(n), gram.clone()),
            2 => {
                let (red, u) = reduction::gauss_reduce(gram.get(0, 0), gram.get(0, 1), gram.get(1, 1));
                let g = GramMatrix::from_rows(&[vec![red.0, red.1], vec![red.1, red.2]])?;
                (u.to_vec(), g)
            }
            _ => reduction::lll_gram(gram)?,
        };
        let big = bareiss_big(&reduced);
        let small = narrow(&big);
        Ok(Self { n, transform, reduced, small, big })
    }

    pub(crate) fn reduced(&self) -> &GramMatrix {
        &self.reduced
    }

    pub(crate) fn transform(&self) -> &[i64] {
        &self.transform
    }

    fn to_original(&self, x: &[i64]) -> Vec<i64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.transform[i * n + j] as i128 * x[j] as i128).sum::<i128>() as i64)
            .collect()
    }

    /// Visits one of each ±pair of nonzero vectors with norm ≤ bound (or
    /// exactly `bound` when `exact`), in reduced coordinates. Returns false
    /// if the visitor stopped the walk.
    fn walk(
        &self,
        bound: i64,
        exact: bool,
        budget: &Budget,
        mut visit: impl FnMut(&[i64], i64) -> bool,
    ) -> Result<bool> {
        if self.n == 0 || bound <= 0 {
            return Ok(true);
        }
        let start = budget.used();
        let mut emitted = 0u64;
        if let Some(small) = &self.small {
            let r = run_walk(small, self.n, bound, exact, budget, 0, &mut emitted, &mut visit);
            match r {
                Ok(done) => return Ok(done),
                Err(Halt::Error(e)) => return Err(e),
                Err(Halt::Overflow) => budget.rewind(start),
            }
        }
        match run_walk(&self.big, self.n, bound, exact, budget, emitted, &mut 0, &mut visit) {
            Ok(done) => Ok(done),
            Err(Halt::Error(e)) => Err(e),
            Err(Halt::Overflow) => unreachable!("BigInt arithmetic cannot overflow"),
        }
    }

    /// Sign-normalized vectors (original coordinates) with norm ≤ bound.
    pub(crate) fn collect(&self, bound: i64, budget: &Budget) -> Result<Vec<(Vec<i64>, i64)>> {
        let mut out = Vec::new();
        self.walk(bound, false, budget, |x, norm| {
            out.push((normalize_sign(self.to_original(x)), norm));
            true
        })?;
        out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        Ok(out)
    }

    pub(crate) fn collect_exact(&self, norm: i64, budget: &Budget) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.walk(norm, true, budget, |x, _| {
            out.push(normalize_sign(self.to_original(x)));
            true
        })?;
        out.sort();
        Ok(out)
    }

    pub(crate) fn find_exact(&self, norm: i64, budget: &Budget) -> Result<Option<Vec<i64>>> {
        let mut found = None;
        self.walk(norm, true, budget, |x, _| {
            found = Some(normalize_sign(self.to_original(x)));
            false
        })?;
        Ok(found)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_walk<T: ExactInt>(
    data: &Bareiss<T>,
    n: usize,
    bound: i64,
    exact: bool,
    budget: &Budget,
    skip: u64,
    emitted: &mut u64,
    visit: &mut impl FnMut(&[i64], i64) -> bool,
) -> std::result::Result<bool, Halt> {
    let b = T::lift(bound);
    let top = data.minors[n].mul(&b)?;
    let mut w = Walk { data, bound: b, exact, x: vec![0; n], budget, skip, emitted: 0, visit: |x: &[i64], nm| visit(x, nm) };
    let r = w.level(n - 1, top, true);
    *emitted = w.emitted;
    r
}

fn identity(n: usize) -> Vec<i64> {
    (0..n * n).map(|i| i64::from(i / n == i % n)).collect()
}

/// Flips the sign so that the first nonzero coordinate is positive.
pub(crate) fn normalize_sign(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    v
}

/// Lazily built search state attached to each orthogonal block.
#[derive(Debug, Default)]
pub(crate) struct ComponentCache {
    engine: OnceLock<Engine>,
    min: OnceLock<i64>,
    vectors: Mutex<Option<Arc<ShortCache>>>,
    pub(crate) pairs: Mutex<Option<Arc<crate::represent::PairTable>>>,
}

/// Half list of a block's short vectors, sorted by (norm, coords).
#[derive(Debug)]
pub(crate) struct ShortCache {
    pub(crate) bound: i64,
    pub(crate) vectors: Vec<(Vec<i64>, i64)>,
}

impl ShortCache {
    /// Entries with norm ≤ bound.
    pub(crate) fn upto(&self, bound: i64) -> &[(Vec<i64>, i64)] {
        let end = self.vectors.partition_point(|(_, n)| *n <= bound);
        &self.vectors[..end]
    }
}

impl ComponentCore {
    pub(crate) fn engine(&self) -> Result<&Engine> {
        if let Some(e) = self.cache.engine.get() {
            return Ok(e);
        }
        let e = Engine::new(&self.gram)?;
        Ok(self.cache.engine.get_or_init(|| e))
    }

    /// Minimum of the block.
    pub(crate) fn min(&self) -> Result<i64> {
        if let Some(&m) = self.cache.min.get() {
            return Ok(m);
        }
        let e = self.engine()?;
        let g = e.reduced();
        let bound = (0..g.dim()).map(|i| g.get(i, i)).min().unwrap_or(0);
        let list = e.collect(bound, &Budget::unlimited())?;
        let m = list.first().map(|p| p.1).unwrap_or(bound);
        Ok(*self.cache.min.get_or_init(|| m))
    }

    /// Short vectors of the block up to at least `bound`, cached.
    pub(crate) fn vectors(&self, bound: i64, budget: &Budget) -> Result<Arc<ShortCache>> {
        {
            let guard = self.cache.vectors.lock().expect("cache lock");
            if let Some(c) = guard.as_ref() {
                if c.bound >= bound {
                    return Ok(c.clone());
                }
            }
        }
        let vectors = self.engine()?.collect(bound, budget)?;
        let fresh = Arc::new(ShortCache { bound, vectors });
        let mut guard = self.cache.vectors.lock().expect("cache lock");
        match guard.as_ref() {
            Some(c) if c.bound >= bound => Ok(c.clone()),
            _ => {
                *guard = Some(fresh.clone());
                Ok(fresh)
            }
        }
    }

    pub(crate) fn find_norm(&self, n: i64, budget: &Budget) -> Result<Option<Vec<i64>>> {
        if n == 0 {
            return Ok(Some(vec![0; self.gram.dim()]));
        }
        if let Some(c) = self.cache.vectors.lock().expect("cache lock").as_ref() {
            if c.bound >= n {
                return Ok(c.upto(n).iter().find(|(_, m)| *m == n).map(|(v, _)| v.clone()));
            }
        }
        self.engine()?.find_exact(n, budget)
    }
}

/// Vectors of norm at most `bound`, one per ±pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortVectorList {
    pub bound: i64,
    pub entries: Vec<(Vector, i64)>,
}

impl ShortVectorList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    /// Distinct norms occurring in the list.
    pub fn norms(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.entries.iter().map(|e| e.1).collect();
        v.dedup();
        v
    }
}

pub fn short_vectors(l: &Lattice, bound: i64) -> Result<ShortVectorList> {
    short_vectors_with_budget(l, bound, &Budget::default())
}

pub fn short_vectors_with_budget(l: &Lattice, bound: i64, budget: &Budget) -> Result<ShortVectorList> {
    if bound < 0 {
        return Err(QfError::PreconditionFailed(format!("bound {bound} is negative")));
    }
    let entries = all_vectors(l, bound, None, budget)?
        .into_iter()
        .map(|(v, n)| (Vector::new(v), n))
        .collect();
    Ok(ShortVectorList { bound, entries })
}

/// All sign-normalized vectors with norm ≤ bound (or = exact), sorted.
fn all_vectors(l: &Lattice, bound: i64, exact: Option<i64>, budget: &Budget) -> Result<Vec<(Vec<i64>, i64)>> {
    let comps = l.components();
    if comps.len() == 1 {
        let core = &comps[0].core;
        return match exact {
            Some(n) => Ok(core.engine()?.collect_exact(n, budget)?.into_iter().map(|v| (v, n)).collect()),
            None => core.engine()?.collect(bound, budget),
        };
    }
    // Combine full (±) block lists; keep the sign-normalized representative.
    let mut lists: Vec<Vec<(Vec<i64>, i64)>> = Vec::with_capacity(comps.len());
    for c in comps {
        if c.core.min()? > bound {
            lists.push(vec![(vec![0; c.rank()], 0)]);
            continue;
        }
        let half = c.core.vectors(bound, budget)?;
        let mut full = vec![(vec![0; c.rank()], 0)];
        for (v, n) in half.upto(bound) {
            full.push((v.clone(), *n));
            full.push((v.iter().map(|x| -x).collect(), *n));
        }
        lists.push(full);
    }
    let mut out = Vec::new();
    let mut cur = vec![0i64; l.rank()];
    fn rec(
        i: usize,
        rem: i64,
        comps: &[crate::gram::Component],
        lists: &[Vec<(Vec<i64>, i64)>],
        cur: &mut Vec<i64>,
        exact: Option<i64>,
        bound: i64,
        budget: &Budget,
        out: &mut Vec<(Vec<i64>, i64)>,
    ) -> Result<()> {
        if i == comps.len() {
            let norm = bound - rem;
            if norm == 0 || exact.is_some_and(|e| e != norm) {
                return Ok(());
            }
            if cur.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                out.push((cur.clone(), norm));
            }
            return Ok(());
        }
        for (v, n) in &lists[i] {
            if *n > rem {
                continue;
            }
            budget.tick()?;
            for (k, &g) in comps[i].coords.iter().enumerate() {
                cur[g] = v[k];
            }
            rec(i + 1, rem - n, comps, lists, cur, exact, bound, budget, out)?;
        }
        for &g in &comps[i].coords {
            cur[g] = 0;
        }
        Ok(())
    }
    let top = exact.unwrap_or(bound);
    rec(0, top, comps, &lists, &mut cur, exact, top, budget, &mut out)?;
    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    Ok(out)
}

pub fn vectors_of_norm(l: &Lattice, n: i64) -> Result<Vec<Vector>> {
    vectors_of_norm_with_budget(l, n, &Budget::default())
}

pub fn vectors_of_norm_with_budget(l: &Lattice, n: i64, budget: &Budget) -> Result<Vec<Vector>> {
    if n < 0 {
        return Err(QfError::PreconditionFailed(format!("norm {n} is negative")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(all_vectors(l, n, Some(n), budget)?.into_iter().map(|(v, _)| Vector::new(v)).collect())
}

/// Successive minima μ₁ ≤ … ≤ μ_m (linear-independence convention).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimaProfile {
    pub minima: Vec<i64>,
}

impl MinimaProfile {
    pub fn product(&self) -> BigInt {
        self.minima.iter().map(|&m| BigInt::from(m)).product()
    }

    /// `disc ≤ μ₁⋯μ_m`.
    pub fn hermite_lower_holds(&self, disc: &BigInt) -> bool {
        *disc <= self.product()
    }

    /// `μ₁⋯μ_m ≤ γ_m^m · disc` for m ≤ 4; `None` beyond that.
    pub fn hermite_upper_holds(&self, disc: &BigInt) -> Option<bool> {
        // γ_m^m as a fraction num/den.
        let (num, den) = match self.minima.len() {
            1 => (1, 1),
            2 => (4, 3),
            3 => (2, 1),
            4 => (4, 1),
            _ => return None,
        };
        Some(self.product() * den <= disc * num)
    }
}

pub fn successive_minima(l: &Lattice) -> Result<MinimaProfile> {
    if l.rank() == 0 {
        return Err(QfError::PreconditionFailed("successive minima need rank ≥ 1".into()));
    }
    let mut minima = Vec::with_capacity(l.rank());
    for c in l.components() {
        minima.extend(block_minima(&c.core)?);
    }
    minima.sort_unstable();
    Ok(MinimaProfile { minima })
}

fn block_minima(core: &ComponentCore) -> Result<Vec<i64>> {
    let g = &core.gram;
    match g.dim() {
        1 => return Ok(vec![g.get(0, 0)]),
        2 => {
            let ((a, _, c), _) = reduction::gauss_reduce(g.get(0, 0), g.get(0, 1), g.get(1, 1));
            return Ok(vec![a, c]);
        }
        _ => {}
    }
    let e = core.engine()?;
    let n = g.dim();
    let bound = (0..n).map(|i| e.reduced().get(i, i)).max().unwrap_or(0);
    let list = e.collect(bound, &Budget::unlimited())?;
    let mut echelon = RankTracker::new(n);
    let mut minima = Vec::with_capacity(n);
    for (v, norm) in list {
        if echelon.insert(&v) {
            minima.push(norm);
            if minima.len() == n {
                break;
            }
        }
    }
    Ok(minima)
}

/// Incremental rank of a set of integer vectors.
pub(crate) struct RankTracker {
    rows: Vec<(usize, Vec<BigInt>)>,
    n: usize,
}

impl RankTracker {
    pub(crate) fn new(n: usize) -> Self {
        Self { rows: Vec::new(), n }
    }

    /// Adds `v`; returns whether the rank grew.
    pub(crate) fn insert(&mut self, v: &[i64]) -> bool {
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for (p, row) in &self.rows {
            if w[*p] == BigInt::from(0) {
                continue;
            }
            let f = w[*p].clone();
            let g = row[*p].clone();
            for j in 0..self.n {
                w[j] = &w[j] * &g - &row[j] * &f;
            }
        }
        match w.iter().position(|x| *x != BigInt::from(0)) {
            Some(p) => {
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::RootFamily;

    fn brute(l: &Lattice, bound: i64, r: i64) -> Vec<(Vec<i64>, i64)> {
        let n = l.rank();
        let mut out = Vec::new();
        let mut x = vec![-r; n];
        loop {
            let norm = l.norm(&x) as i64;
            if norm > 0 && norm <= bound && x.iter().find(|&&c| c != 0).unwrap() > &0 {
                out.push((x.clone(), norm));
            }
            let mut k = 0;
            loop {
                if k == n {
                    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
                    return out;
                }
                x[k] += 1;
                if x[k] > r {
                    x[k] = -r;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn identity_two() {
        let l = Lattice::identity(2);
        let s = short_vectors(&l, 2).unwrap();
        let got: Vec<(Vec<i64>, i64)> = s.entries.iter().map(|(v, n)| (v.coords.clone(), *n)).collect();
        assert_eq!(got, vec![(vec![0, 1], 1), (vec![1, 0], 1), (vec![1, -1], 2), (vec![1, 1], 2)]);
    }

    #[test]
    fn min_two_lattice_has_no_norm_one() {
        let l = Lattice::diagonal(&[2, 2, 5]).unwrap();
        assert!(short_vectors(&l, 1).unwrap().is_empty());
        assert!(vectors_of_norm(&l, 1).unwrap().is_empty());
    }

    #[test]
    fn norm_shell_examples() {
        let l = Lattice::diagonal(&[1, 16]).unwrap();
        let v = vectors_of_norm(&l, 16).unwrap();
        assert!(v.contains(&Vector::new(vec![0, 1])));
        assert!(v.contains(&Vector::new(vec![4, 0])));
        let a2 = Lattice::root_lattice(RootFamily::A, 2).unwrap();
        assert_eq!(vectors_of_norm(&a2, 2).unwrap().len(), 3);
    }

    #[test]
    fn matches_box_search() {
        let l = Lattice::new(&[vec![3, 1, -1], vec![1, 4, 2], vec![-1, 2, 6]]).unwrap();
        let got: Vec<_> =
            short_vectors(&l, 30).unwrap().entries.into_iter().map(|(v, n)| (v.coords, n)).collect();
        assert_eq!(got, brute(&l, 30, 8));
        let split = Lattice::new(&[vec![2, 0, 1], vec![0, 3, 0], vec![1, 0, 2]]).unwrap();
        let got: Vec<_> =
            short_vectors(&split, 12).unwrap().entries.into_iter().map(|(v, n)| (v.coords, n)).collect();
        assert_eq!(got, brute(&split, 12, 5));
    }

    #[test]
    fn large_exact_shell_on_binary() {
        let l = Lattice::binary(4, 1, 6).unwrap();
        // 4x² + 2xy + 6y² at (x, y) = (5000, 3001).
        let n = 4 * 5000i64 * 5000 + 2 * 5000 * 3001 + 6 * 3001 * 3001;
        let core = &l.components()[0].core;
        let v = core.find_norm(n, &Budget::default()).unwrap().unwrap();
        assert_eq!(l.norm(&v) as i64, n);
        assert!(core.find_norm(4 * 5569 + 2, &Budget::default()).is_ok());
    }

    #[test]
    fn budget_is_reported() {
        let l = Lattice::identity(6);
        let err = short_vectors_with_budget(&l, 40, &Budget::new(100)).unwrap_err();
        assert_eq!(err, QfError::BudgetExceeded { budget: 100 });
    }

    #[test]
    fn minima_and_hermite() {
        assert_eq!(successive_minima(&Lattice::diagonal(&[1, 4]).unwrap()).unwrap().minima, vec![1, 4]);
        let m = successive_minima(&Lattice::binary(2, 1, 13).unwrap()).unwrap();
        assert_eq!(m.minima, vec![2, 13]);
        let d5 = Lattice::root_lattice(RootFamily::D, 5).unwrap();
        let p = successive_minima(&d5).unwrap();
        assert_eq!(p.minima, vec![2; 5]);
        assert!(p.hermite_lower_holds(d5.disc()));
        assert_eq!(p.hermite_upper_holds(d5.disc()), None);
        let a3 = Lattice::root_lattice(RootFamily::A, 3).unwrap();
        let p = successive_minima(&a3).unwrap();
        assert_eq!(p.hermite_upper_holds(a3.disc()), Some(true));
    }

    #[test]
    fn big_entries_fall_back_to_bigint() {
        let k = 3_000_000_000i64;
        let l = Lattice::new(&[vec![k, 1, 0], vec![1, k, 1], vec![0, 1, k]]).unwrap();
        let s = short_vectors(&l, k).unwrap();
        assert_eq!(s.len(), 3);
    }
}

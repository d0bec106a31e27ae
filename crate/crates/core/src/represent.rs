//! Representation of integers and lattices by lattices, and class/genus
//! data for binary forms.
//!
//! A lattice `ℓ` with Gram `S` is represented by `L = C₁ ⊥ … ⊥ C_r` iff
//! `S = G₁ + … + G_r` where each `G_i` is the Gram matrix of a tuple of
//! vectors of `C_i`. The search walks the blocks in order of increasing
//! minimum, subtracting one contribution per block from the residual. The
//! residual is reduced to a canonical positive-definite form at each step
//! (degenerate directions are split off), failures are memoized per residual,
//! and a residual of rank one becomes a norm query answered by a reachability
//! table over block norm sets.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::enumeration::Budget;
use crate::error::{QfError, Result};
use crate::gram::{BinaryFormTriple, Component, ComponentCore, GramMatrix, Lattice, Vector};
use crate::reduction;
use crate::report::{Status, VerificationReport};

/// Columns are images of the source basis in target coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub source_rank: usize,
    pub target_rank: usize,
    /// Row-major target_rank × source_rank.
    pub matrix: Vec<i64>,
}

impl Embedding {
    pub fn new(target_rank: usize, source_rank: usize, matrix: Vec<i64>) -> Self {
        assert_eq!(matrix.len(), target_rank * source_rank);
        Self { source_rank, target_rank, matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, n, (0..n * n).map(|i| i64::from(i / n == i % n)).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.matrix[i * self.source_rank + j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.target_rank).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.target_rank).map(|i| (0..self.source_rank).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Exact check of `matrixᵀ · Gram(target) · matrix = Gram(source)`.
    pub fn verify(&self, target: &Lattice, source: &Lattice) -> bool {
        if self.target_rank != target.rank() || self.source_rank != source.rank() {
            return false;
        }
        let cols: Vec<Vec<i64>> = (0..self.source_rank).map(|j| self.column(j)).collect();
        (0..self.source_rank).all(|a| {
            (a..self.source_rank).all(|b| target.inner_product(&cols[a], &cols[b]) == source.entry(a, b) as i128)
        })
    }

    /// `self ∘ inner`: if inner embeds A in B and self embeds B in C, the
    /// result embeds A in C.
    pub fn compose(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.target_rank != self.source_rank {
            return Err(QfError::DimensionMismatch("embedding ranks do not chain".into()));
        }
        let m = arith::mat_mul(&self.matrix, &inner.matrix, self.target_rank, self.source_rank, inner.source_rank)?;
        Ok(Embedding::new(self.target_rank, inner.source_rank, m))
    }

    /// Square with determinant ±1.
    pub fn is_unimodular(&self) -> bool {
        self.source_rank == self.target_rank
            && arith::determinant(&self.matrix, self.source_rank).magnitude() == &num_bigint::BigUint::from(1u8)
    }
}

impl Serialize for Embedding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Embedding", 3)?;
        st.serialize_field("matrix", &self.rows())?;
        st.serialize_field("source_rank", &self.source_rank)?;
        st.serialize_field("target_rank", &self.target_rank)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Target index: block order, minima and cached norm reachability.

const REACH_CAP: i64 = 4096;
const DENSE_RANK: usize = 8;
const PAIR_TABLE_LIMIT: usize = 2_000_000;

#[derive(Debug)]
pub(crate) struct TargetIndex {
    order: Vec<usize>,
    mins: Vec<i64>,
    suffix_rank: Vec<usize>,
    blocks: HashMap<(i64, i64, i64), Vec<usize>>,
    reach: Mutex<Option<Arc<ReachTable>>>,
}

#[derive(Debug)]
struct ReachTable {
    cap: i64,
    words: usize,
    /// (positions + 1) rows; row p holds the norms ≤ cap of blocks p.. .
    bits: Vec<u64>,
}

impl ReachTable {
    fn row(&self, p: usize) -> &[u64] {
        &self.bits[p * self.words..(p + 1) * self.words]
    }
    fn has(&self, p: usize, t: i64) -> bool {
        let t = t as usize;
        self.row(p)[t / 64] >> (t % 64) & 1 == 1
    }
}

impl TargetIndex {
    fn build(l: &Lattice) -> Result<Self> {
        let comps = l.components();
        let mut keyed = Vec::with_capacity(comps.len());
        for (i, c) in comps.iter().enumerate() {
            keyed.push((c.core.min()?, i));
        }
        keyed.sort_unstable();
        let order: Vec<usize> = keyed.iter().map(|k| k.1).collect();
        let mins: Vec<i64> = keyed.iter().map(|k| k.0).collect();
        let mut suffix_rank = vec![0usize; order.len() + 1];
        for p in (0..order.len()).rev() {
            suffix_rank[p] = suffix_rank[p + 1] + comps[order[p]].rank();
        }
        let mut blocks: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (p, &ci) in order.iter().enumerate() {
            if comps[ci].rank() == 2 {
                let g = comps[ci].core.engine()?.reduced();
                blocks.entry((g.get(0, 0), g.get(0, 1), g.get(1, 1))).or_default().push(p);
            }
        }
        Ok(Self { order, mins, suffix_rank, blocks, reach: Mutex::new(None) })
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    fn core<'a>(&self, l: &'a Lattice, p: usize) -> &'a Arc<ComponentCore> {
        &l.components()[self.order[p]].core
    }

    fn component<'a>(&self, l: &'a Lattice, p: usize) -> &'a Component {
        &l.components()[self.order[p]]
    }

    fn reach(&self, l: &Lattice, t: i64, budget: &Budget) -> Result<Arc<ReachTable>> {
        {
            let g = self.reach.lock().expect("reach lock");
            if let Some(r) = g.as_ref() {
                if r.cap >= t {
                    return Ok(r.clone());
                }
            }
        }
        let cap = ((t.max(63) + 1) as u64).next_power_of_two() as i64 - 1;
        let words = (cap as usize + 1).div_ceil(64);
        let n = self.len();
        let mut bits = vec![0u64; (n + 1) * words];
        bits[n * words] = 1;
        for p in (0..n).rev() {
            let (head, tail) = bits.split_at_mut((p + 1) * words);
            let next = &tail[..words];
            let cur = &mut head[p * words..];
            cur.copy_from_slice(next);
            if self.mins[p] > cap {
                continue;
            }
            let vs = self.core(l, p).vectors(cap, budget)?;
            let mut norms: Vec<i64> = vs.upto(cap).iter().map(|v| v.1).collect();
            norms.dedup();
            for u in norms {
                shift_or(cur, next, u as usize, cap as usize);
            }
        }
        let table = Arc::new(ReachTable { cap, words, bits });
        let mut g = self.reach.lock().expect("reach lock");
        match g.as_ref() {
            Some(r) if r.cap >= cap => Ok(r.clone()),
            _ => {
                *g = Some(table.clone());
                Ok(table)
            }
        }
    }
}

/// cur |= next << shift, truncated to bits 0..=cap.
fn shift_or(cur: &mut [u64], next: &[u64], shift: usize, cap: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    let words = cur.len();
    for i in (ws..words).rev() {
        let src = i - ws;
        let mut v = next[src] << bs;
        if bs != 0 && src > 0 {
            v |= next[src - 1] >> (64 - bs);
        }
        cur[i] |= v;
    }
    let last_bits = (cap + 1) % 64;
    if last_bits != 0 {
        cur[words - 1] &= (1u64 << last_bits) - 1;
    }
}

impl Lattice {
    pub(crate) fn search_index(&self) -> Result<Arc<TargetIndex>> {
        if let Some(i) = self.index_cell().get() {
            return Ok(i.clone());
        }
        let idx = Arc::new(TargetIndex::build(self)?);
        Ok(self.index_cell().get_or_init(|| idx).clone())
    }
}

/// One block contribution: position in the index and a local r_c × k matrix.
type Parts = Vec<(usize, Vec<i64>)>;

/// Vector of norm `t` in the sum of blocks at positions ≥ pos.
fn find_norm_from(l: &Lattice, idx: &TargetIndex, pos: usize, t: i64, budget: &Budget) -> Result<Option<Parts>> {
    if t == 0 {
        return Ok(Some(Vec::new()));
    }
    let end = pos + idx.mins[pos..].partition_point(|&m| m <= t);
    if end == pos {
        return Ok(None);
    }
    if end == pos + 1 {
        return Ok(idx.core(l, pos).find_norm(t, budget)?.map(|v| vec![(pos, v)]));
    }
    let rank: usize = (pos..end).map(|p| idx.component(l, p).rank()).sum();
    if rank <= DENSE_RANK || t > REACH_CAP {
        if rank > 4 * DENSE_RANK {
            return Err(QfError::PreconditionFailed(format!(
                "norm {t} is too large for a search over {} blocks",
                end - pos
            )));
        }
        let blocks: Vec<GramMatrix> = (pos..end).map(|p| idx.core(l, p).gram.clone()).collect();
        let sum = Lattice::from_blocks(blocks);
        let g = sum.gram();
        let engine = crate::enumeration::Engine::new(&g)?;
        return Ok(engine.find_exact(t, budget)?.map(|v| {
            let mut parts = Vec::new();
            let mut off = 0;
            for p in pos..end {
                let r = idx.component(l, p).rank();
                let part = v[off..off + r].to_vec();
                if part.iter().any(|&x| x != 0) {
                    parts.push((p, part));
                }
                off += r;
            }
            parts
        }));
    }
    let table = idx.reach(l, t, budget)?;
    if !table.has(pos, t) {
        return Ok(None);
    }
    let mut parts = Vec::new();
    let mut rem = t;
    let mut p = pos;
    while rem > 0 {
        if table.has(p + 1, rem) {
            p += 1;
            continue;
        }
        let vs = idx.core(l, p).vectors(rem, budget)?;
        let (v, u) = vs
            .upto(rem)
            .iter()
            .find(|(_, u)| table.has(p + 1, rem - u))
            .expect("reachability table is consistent");
        parts.push((p, v.clone()));
        rem -= u;
        p += 1;
    }
    Ok(Some(parts))
}

fn assemble(l: &Lattice, idx: &TargetIndex, parts: &Parts, k: usize) -> Vec<i64> {
    let n = l.rank();
    let mut m = vec![0i64; n * k];
    for (p, t) in parts {
        let comp = idx.component(l, *p);
        for (li, &g) in comp.coords.iter().enumerate() {
            for j in 0..k {
                m[g * k + j] += t[li * k + j];
            }
        }
    }
    m
}

pub fn represents_integer(l: &Lattice, n: i64) -> Result<Option<Vector>> {
    represents_integer_with_budget(l, n, &Budget::default())
}

/// A vector of norm `n`, or `None` after exhaustive search.
pub fn represents_integer_with_budget(l: &Lattice, n: i64, budget: &Budget) -> Result<Option<Vector>> {
    if n < 0 {
        return Err(QfError::PreconditionFailed(format!("{n} is negative")));
    }
    if n == 0 {
        return Ok(Some(Vector::new(vec![0; l.rank()])));
    }
    if l.rank() == 0 {
        return Ok(None);
    }
    let idx = l.search_index()?;
    let found = find_norm_from(l, &idx, 0, n, budget)?;
    Ok(found.map(|parts| {
        let v = assemble(l, &idx, &parts, 1);
        debug_assert_eq!(l.norm(&v), n as i128);
        Vector::new(v)
    }))
}

/// Norms in `1..=bound` represented by `l`.
pub fn represented_norms(l: &Lattice, bound: i64, budget: &Budget) -> Result<Vec<i64>> {
    let list = crate::enumeration::short_vectors_with_budget(l, bound, budget)?;
    Ok(list.norms())
}

// ---------------------------------------------------------------------------
// Lattice representation.

/// Residual in canonical form: `rc` is a reduced positive-definite ρ×ρ Gram
/// matrix and a solution `w` for `rc` yields `y = w·m` for the original.
struct Canon {
    rc: Vec<i64>,
    rho: usize,
    m: Vec<i64>,
}

fn canonicalize(r: &[i64], k: usize) -> Result<Canon> {
    if k == 0 {
        return Ok(Canon { rc: Vec::new(), rho: 0, m: Vec::new() });
    }
    let (rho, uinv, rprime) = if arith::leading_minors(r, k).is_ok() {
        let id: Vec<i64> = (0..k * k).map(|i| i64::from(i / k == i % k)).collect();
        (k, id, r.to_vec())
    } else {
        let (rho, u) = arith::radical_split(r, k)?;
        let full = arith::congruence(r, k, &u, k)?;
        let rp: Vec<i64> = (0..rho * rho).map(|i| full[(i / rho) * k + i % rho]).collect();
        (rho, arith::unimodular_inverse(&u, k)?, rp)
    };
    if rho == 0 {
        return Ok(Canon { rc: Vec::new(), rho: 0, m: Vec::new() });
    }
    let (v, rc) = reduction::reduce_any(&GramMatrix::from_flat(rho, rprime)?)?;
    let vinv = arith::unimodular_inverse(&v, rho)?;
    let top: Vec<i64> = uinv[..rho * k].to_vec();
    let m = arith::mat_mul(&vinv, &top, rho, rho, k)?;
    Ok(Canon { rc: rc.as_slice().to_vec(), rho, m })
}

/// Pairs of block vectors indexed by their Gram matrix.
#[derive(Debug)]
pub(crate) struct PairTable {
    bound: i64,
    /// (Q(x), B(x,y), Q(y)) with one witness pair, largest contributions first.
    entries: Vec<((i64, i64, i64), Vec<i64>, Vec<i64>)>,
}

fn build_pair_table(core: &ComponentCore, bound: i64, budget: &Budget) -> Result<Option<PairTable>> {
    let vs = core.vectors(bound, budget)?;
    let half = vs.upto(bound);
    let r = core.gram.dim();
    if half.len().saturating_mul(2 * half.len() + 1) > PAIR_TABLE_LIMIT {
        return Ok(None);
    }
    let zero = vec![0i64; r];
    let mut full: Vec<(&[i64], i64, bool)> = Vec::with_capacity(2 * half.len() + 1);
    full.push((&zero, 0, false));
    for (v, n) in half {
        full.push((v, *n, false));
        full.push((v, *n, true));
    }
    let mut seen: HashMap<(i64, i64, i64), (usize, usize)> = HashMap::new();
    // x ranges over zero and the half list; y over zero and both signs.
    for xi in 0..=half.len() {
        let (x, qx): (&[i64], i64) = if xi == 0 { (&zero, 0) } else { (&half[xi - 1].0, half[xi - 1].1) };
        let gx: Vec<i64> = (0..r).map(|i| (0..r).map(|j| core.gram.get(i, j) * x[j]).sum()).collect();
        for (yi, &(y, qy, neg)) in full.iter().enumerate() {
            if xi == 0 && neg {
                continue;
            }
            let mut b: i64 = gx.iter().zip(y).map(|(a, c)| a * c).sum();
            if neg {
                b = -b;
            }
            if qx == 0 && qy == 0 {
                continue;
            }
            seen.entry((qx, b, qy)).or_insert((xi, yi));
        }
    }
    let mut entries: Vec<((i64, i64, i64), Vec<i64>, Vec<i64>)> = seen
        .into_iter()
        .map(|(g, (xi, yi))| {
            let x = if xi == 0 { zero.clone() } else { half[xi - 1].0.clone() };
            let (y, _, neg) = full[yi];
            let y: Vec<i64> = if neg { y.iter().map(|c| -c).collect() } else { y.to_vec() };
            (g, x, y)
        })
        .collect();
    entries.sort_by(|a, b| {
        let sa = a.0 .0 + a.0 .2;
        let sb = b.0 .0 + b.0 .2;
        sb.cmp(&sa).then(a.0.cmp(&b.0))
    });
    Ok(Some(PairTable { bound, entries }))
}

impl ComponentCore {
    fn pair_table(&self, bound: i64, budget: &Budget) -> Result<Option<Arc<PairTable>>> {
        {
            let g = self.cache.pairs.lock().expect("pair lock");
            if let Some(t) = g.as_ref() {
                if t.bound >= bound {
                    return Ok(Some(t.clone()));
                }
            }
        }
        let Some(t) = build_pair_table(self, bound, budget)? else {
            return Ok(None);
        };
        let t = Arc::new(t);
        *self.cache.pairs.lock().expect("pair lock") = Some(t.clone());
        Ok(Some(t))
    }
}

struct Search<'a> {
    lat: &'a Lattice,
    idx: &'a TargetIndex,
    budget: &'a Budget,
    failed: HashMap<Vec<i64>, usize>,
}

fn psd2(r00: i64, r01: i64, r11: i64) -> bool {
    r00 >= 0 && r11 >= 0 && (r00 as i128) * (r11 as i128) >= (r01 as i128) * (r01 as i128)
}

impl<'a> Search<'a> {
    /// Solves an arbitrary PSD residual `r` (k×k) from position `pos`.
    fn solve_any(&mut self, r: &[i64], k: usize, pos: usize) -> Result<Option<Parts>> {
        if r.iter().all(|&v| v == 0) {
            return Ok(Some(Vec::new()));
        }
        if pos >= self.idx.len() {
            return Ok(None);
        }
        let c = canonicalize(r, k)?;
        let Some(parts) = self.solve(&c.rc, c.rho, pos)? else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(parts.len());
        for (p, t) in parts {
            let rc = self.idx.component(self.lat, p).rank();
            out.push((p, arith::mat_mul(&t, &c.m, rc, c.rho, k)?));
        }
        Ok(Some(out))
    }

    fn solve(&mut self, rc: &[i64], rho: usize, pos: usize) -> Result<Option<Parts>> {
        self.budget.tick()?;
        if rho == 0 {
            return Ok(Some(Vec::new()));
        }
        if self.failed.get(rc).is_some_and(|&p| p <= pos) {
            return Ok(None);
        }
        let res = if rho == 1 {
            find_norm_from(self.lat, self.idx, pos, rc[0], self.budget)?
        } else {
            self.solve_general(rc, rho, pos)?
        };
        if res.is_none() {
            let e = self.failed.entry(rc.to_vec()).or_insert(pos);
            *e = (*e).min(pos);
        }
        Ok(res)
    }

    fn solve_general(&mut self, rc: &[i64], rho: usize, pos: usize) -> Result<Option<Parts>> {
        let n = self.idx.len();
        let diag_min = (0..rho).map(|j| rc[j * rho + j]).min().expect("rho ≥ 1");
        if !self.norms_reachable(rc, rho, pos)? {
            return Ok(None);
        }
        if rho == 2 {
            if let Some(ps) = self.idx.blocks.get(&(rc[0], rc[1], rc[3])) {
                if let Some(&p) = ps.iter().find(|&&p| p >= pos) {
                    let t = self.idx.core(self.lat, p).engine()?.transform().to_vec();
                    return Ok(Some(vec![(p, t)]));
                }
            }
        }
        for p in pos..n {
            if diag_min < self.idx.mins[p] || self.idx.suffix_rank[p] < rho {
                return Ok(None);
            }
            let next_min = self.idx.mins.get(p + 1).copied().unwrap_or(i64::MAX);
            if let Some(parts) = self.try_block(rc, rho, p, next_min)? {
                return Ok(Some(parts));
            }
            if self.failed.get(rc).is_some_and(|&q| q <= p + 1) {
                return Ok(None);
            }
        }
        Ok(None)
    }

    /// Whether every basis vector and every e_i ± e_j of the residual has a
    /// norm the blocks from `pos` on can reach.
    fn norms_reachable(&self, rc: &[i64], rho: usize, pos: usize) -> Result<bool> {
        let mut norms = Vec::with_capacity(rho * rho);
        for i in 0..rho {
            norms.push(rc[i * rho + i]);
            for j in 0..i {
                let s = rc[i * rho + i] + rc[j * rho + j];
                norms.push(s + 2 * rc[i * rho + j]);
                norms.push(s - 2 * rc[i * rho + j]);
            }
        }
        let top = norms.iter().copied().max().unwrap_or(0);
        if top > REACH_CAP {
            return Ok(true);
        }
        let table = self.idx.reach(self.lat, top, self.budget)?;
        Ok(norms.iter().all(|&t| table.has(pos, t)))
    }

    /// Tries every nonzero contribution of block `p` to the residual.
    fn try_block(&mut self, rc: &[i64], rho: usize, p: usize, next_min: i64) -> Result<Option<Parts>> {
        let allowed = |norm: i64, full: i64| norm == full || norm.checked_add(next_min).is_some_and(|s| s <= full);
        let core = self.idx.core(self.lat, p).clone();
        let bound = (0..rho).map(|j| rc[j * rho + j]).max().expect("rho ≥ 1");
        // The last block needs exact norms, which the tuple search handles directly.
        if rho == 2 && next_min != i64::MAX {
            if let Some(table) = core.pair_table(bound, self.budget)? {
                for (g, x, y) in &table.entries {
                    let (qx, b, qy) = *g;
                    if qx > rc[0] || qy > rc[3] || !allowed(qx, rc[0]) || !allowed(qy, rc[3]) {
                        continue;
                    }
                    let rem = [rc[0] - qx, rc[1] - b, rc[2] - b, rc[3] - qy];
                    if !psd2(rem[0], rem[1], rem[3]) {
                        continue;
                    }
                    self.budget.tick()?;
                    if !self.norms_reachable(&rem, 2, p + 1)? {
                        continue;
                    }
                    if let Some(mut parts) = self.solve_any(&rem, 2, p + 1)? {
                        let r = core.gram.dim();
                        let t: Vec<i64> = (0..r).flat_map(|i| [x[i], y[i]]).collect();
                        parts.push((p, t));
                        return Ok(Some(parts));
                    }
                }
                return Ok(None);
            }
        }
        // Coordinate-by-coordinate tuple search.
        let vs = core.vectors(bound, self.budget)?;
        let r = core.gram.dim();
        let mut cands: Vec<Vec<Vec<i64>>> = Vec::with_capacity(rho);
        for j in 0..rho {
            let full = rc[j * rho + j];
            let mut c: Vec<Vec<i64>> = Vec::new();
            let mut list: Vec<&(Vec<i64>, i64)> = vs.upto(full).iter().filter(|(_, n)| allowed(*n, full)).collect();
            list.sort_by(|a, b| (a.1 != full).cmp(&(b.1 != full)).then(b.1.cmp(&a.1)));
            for (v, _) in list {
                c.push(v.clone());
                c.push(v.iter().map(|x| -x).collect());
            }
            if allowed(0, full) {
                c.push(vec![0; r]);
            }
            cands.push(c);
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(rho);
        self.tuple_rec(rc, rho, p, &core, &cands, &mut chosen)
    }

    fn tuple_rec(
        &mut self,
        rc: &[i64],
        rho: usize,
        p: usize,
        core: &ComponentCore,
        cands: &[Vec<Vec<i64>>],
        chosen: &mut Vec<usize>,
    ) -> Result<Option<Parts>> {
        let j = chosen.len();
        if j == rho {
            let xs: Vec<&Vec<i64>> = (0..rho).map(|i| &cands[i][chosen[i]]).collect();
            if xs.iter().all(|x| x.iter().all(|&c| c == 0)) {
                return Ok(None);
            }
            let mut rem = rc.to_vec();
            for a in 0..rho {
                for b in 0..rho {
                    rem[a * rho + b] -= core.gram.inner(xs[a], xs[b]) as i64;
                }
            }
            if !self.norms_reachable(&rem, rho, p + 1)? {
                return Ok(None);
            }
            if let Some(mut parts) = self.solve_any(&rem, rho, p + 1)? {
                let r = core.gram.dim();
                let t: Vec<i64> = (0..r).flat_map(|i| xs.iter().map(move |x| x[i])).collect();
                parts.push((p, t));
                return Ok(Some(parts));
            }
            return Ok(None);
        }
        for ci in 0..cands[j].len() {
            self.budget.tick()?;
            chosen.push(ci);
            // Leading (j+1)×(j+1) block of the residual must stay PSD.
            let m = j + 1;
            let mut block = vec![0i64; m * m];
            for a in 0..m {
                for b in 0..m {
                    let xa = &cands[a][chosen[a]];
                    let xb = &cands[b][chosen[b]];
                    block[a * m + b] = rc[a * rho + b] - core.gram.inner(xa, xb) as i64;
                }
            }
            if arith::is_psd(&block, m) {
                if let Some(parts) = self.tuple_rec(rc, rho, p, core, cands, chosen)? {
                    return Ok(Some(parts));
                }
            }
            chosen.pop();
        }
        Ok(None)
    }
}

pub fn represents_lattice(target: &Lattice, source: &Lattice) -> Result<Option<Embedding>> {
    represents_lattice_with_budget(target, source, &Budget::default())
}

/// An embedding of `source` into `target`, or `None` after exhaustive search.
pub fn represents_lattice_with_budget(target: &Lattice, source: &Lattice, budget: &Budget) -> Result<Option<Embedding>> {
    let k = source.rank();
    let n = target.rank();
    if k == 0 {
        return Ok(Some(Embedding::new(n, 0, Vec::new())));
    }
    if k > n {
        return Ok(None);
    }
    let idx = target.search_index()?;
    let mut search = Search { lat: target, idx: &idx, budget, failed: HashMap::new() };
    // Search for a reduced basis of the source, then map back.
    let (u, r) = reduction::reduce_any(&source.gram())?;
    let Some(parts) = search.solve_any(r.as_slice(), k, 0)? else {
        return Ok(None);
    };
    let reduced = assemble(target, &idx, &parts, k);
    let uinv = arith::unimodular_inverse(&u, k)?;
    let e = Embedding::new(n, k, arith::mat_mul(&reduced, &uinv, n, k, k)?);
    assert!(e.verify(target, source), "representation witness failed verification");
    Ok(Some(e))
}

/// Vectors of `target` whose Gram matrix is the positive-semidefinite `gram`.
pub fn represents_psd_with_budget(target: &Lattice, gram: &GramMatrix, budget: &Budget) -> Result<Option<Embedding>> {
    let k = gram.dim();
    let n = target.rank();
    if !arith::is_psd(gram.as_slice(), k) {
        return Err(QfError::NotPositiveDefinite { index: k });
    }
    if gram.as_slice().iter().all(|&v| v == 0) {
        return Ok(Some(Embedding::new(n, k, vec![0; n * k])));
    }
    if n == 0 {
        return Ok(None);
    }
    let idx = target.search_index()?;
    let mut search = Search { lat: target, idx: &idx, budget, failed: HashMap::new() };
    let Some(parts) = search.solve_any(gram.as_slice(), k, 0)? else {
        return Ok(None);
    };
    let e = Embedding::new(n, k, assemble(target, &idx, &parts, k));
    let cols: Vec<Vec<i64>> = (0..k).map(|j| e.column(j)).collect();
    for a in 0..k {
        for b in 0..k {
            assert_eq!(target.inner_product(&cols[a], &cols[b]), gram.get(a, b) as i128, "witness failed verification");
        }
    }
    Ok(Some(e))
}

/// Batch check; the report lists every source that is not represented.
pub fn represents_all(target: &Lattice, sources: &[Lattice]) -> Result<VerificationReport> {
    represents_all_with_budget(target, sources, &Budget::default())
}

pub fn represents_all_with_budget(target: &Lattice, sources: &[Lattice], budget: &Budget) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("represents-all");
    rep.budget = Some(budget.limit());
    let mut missing = Vec::new();
    for s in sources {
        match represents_lattice_with_budget(target, s, budget)? {
            Some(e) => rep.witnesses.push(serde_json::json!({ "source": s.gram(), "embedding": e })),
            None => missing.push(s.gram()),
        }
    }
    rep.data.insert("checked".into(), sources.len().into());
    for m in missing {
        rep.counterexamples.push(serde_json::json!({ "source": m }));
    }
    rep.status = if rep.counterexamples.is_empty() { Status::Pass } else { Status::Fail };
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Binary forms: classes and genera.

/// Proper reduction: |b| ≤ a ≤ c, and b ≥ 0 when |b| = a or a = c.
pub fn reduce_form(f: BinaryFormTriple) -> BinaryFormTriple {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        // b into (-a, a]
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            c += k * k * a + k * b;
            b += 2 * k * a;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    if a == c && b < 0 {
        b = -b;
    }
    BinaryFormTriple { a: a as i64, b: b as i64, c: c as i64 }
}

/// Reduced forms of one discriminant grouped into genera.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusClassList {
    pub disc: i64,
    pub classes: Vec<BinaryFormTriple>,
    /// Blocks of indices into `classes`, one per genus.
    pub genus_partition: Vec<Vec<usize>>,
}

impl GenusClassList {
    /// Index of the genus block containing the class of `f`.
    pub fn genus_of(&self, f: BinaryFormTriple) -> Option<usize> {
        let r = reduce_form(f);
        let ci = self.classes.iter().position(|&c| c == r)?;
        self.genus_partition.iter().position(|blk| blk.contains(&ci))
    }

    /// Proper classes in the genus of `f`.
    pub fn genus_classes(&self, f: BinaryFormTriple) -> Vec<BinaryFormTriple> {
        self.genus_of(f)
            .map(|g| self.genus_partition[g].iter().map(|&i| self.classes[i]).collect())
            .unwrap_or_default()
    }

    /// Number of classes in the genus of `f`.
    pub fn class_number(&self, f: BinaryFormTriple) -> usize {
        self.genus_classes(f).len()
    }

    /// Classes modulo (a,b,c) ~ (a,−b,c), keeping b ≥ 0 representatives.
    pub fn improper_classes(forms: &[BinaryFormTriple]) -> Vec<BinaryFormTriple> {
        let mut out: Vec<BinaryFormTriple> = forms
            .iter()
            .map(|f| BinaryFormTriple { a: f.a, b: f.b.abs(), c: f.c })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn reduced_forms_of_disc(d: i64) -> Result<GenusClassList> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(QfError::InvalidDiscriminant(d));
    }
    let mut classes = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            classes.push(BinaryFormTriple { a, b, c });
        }
        a += 1;
    }
    classes.sort_by_key(|f| (f.a, f.c, f.b.abs(), -f.b));
    let mut keyed: BTreeMap<(i64, Vec<i32>), Vec<usize>> = BTreeMap::new();
    for (i, f) in classes.iter().enumerate() {
        keyed.entry(genus_key(*f)?).or_default().push(i);
    }
    let mut genus_partition: Vec<Vec<usize>> = keyed.into_values().collect();
    genus_partition.sort();
    Ok(GenusClassList { disc: d, classes, genus_partition })
}

fn odd_prime_factors(mut n: i64) -> Vec<i64> {
    n = n.abs();
    while n % 2 == 0 && n > 0 {
        n /= 2;
    }
    let mut out = Vec::new();
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// (content, assigned characters of the primitive part).
fn genus_key(f: BinaryFormTriple) -> Result<(i64, Vec<i32>)> {
    let g = f.content();
    let p = BinaryFormTriple { a: f.a / g, b: f.b / g, c: f.c / g };
    let d = p.discriminant();
    let m = represented_unit(p, d).ok_or_else(|| {
        QfError::PreconditionFailed(format!("no small value of {p} coprime to {d}"))
    })?;
    let mut chars: Vec<i32> = odd_prime_factors(d).into_iter().map(|q| arith::legendre(m, q)).collect();
    let delta = if m % 4 == 1 { 1 } else { -1 };
    let eps = if m.rem_euclid(8) == 1 || m.rem_euclid(8) == 7 { 1 } else { -1 };
    if d % 4 == 0 {
        let n = -d / 4;
        match n.rem_euclid(8) {
            1 | 5 | 4 => chars.push(delta),
            2 => chars.push(delta * eps),
            6 => chars.push(eps),
            0 => {
                chars.push(delta);
                chars.push(eps);
            }
            _ => {}
        }
    }
    Ok((g, chars))
}

/// A small odd value of the form coprime to its discriminant.
fn represented_unit(f: BinaryFormTriple, d: i64) -> Option<i64> {
    let mut best: Option<i64> = None;
    for x in -12i64..=12 {
        for y in 0i64..=12 {
            let v = f.eval(x, y) as i64;
            if v > 0 && v % 2 == 1 && arith::gcd(v, d) == 1 && best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    }
    best
}

/// Whether the binary form represents `m` (complete enumeration).
pub fn form_represents(f: BinaryFormTriple, m: i64, budget: &Budget) -> Result<bool> {
    if m == 0 {
        return Ok(true);
    }
    let (lat, kind) = f.lattice();
    let target = match kind {
        crate::gram::GramKind::Unit => m,
        crate::gram::GramKind::Doubled => 2 * m,
    };
    Ok(lat.components().len() == 1 && lat.components()[0].core.find_norm(target, budget)?.is_some()
        || lat.components().len() > 1 && represents_integer_with_budget(&lat, target, budget)?.is_some())
}

/// Whether some class in the genus of `f` represents `m`.
pub fn genus_represents(f: BinaryFormTriple, m: i64) -> Result<bool> {
    genus_represents_with_budget(f, m, &Budget::default())
}

pub fn genus_represents_with_budget(f: BinaryFormTriple, m: i64, budget: &Budget) -> Result<bool> {
    if m < 1 {
        return Err(QfError::PreconditionFailed(format!("{m} is not positive")));
    }
    let list = reduced_forms_of_disc(f.discriminant())?;
    for c in list.genus_classes(f) {
        if form_represents(c, m, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

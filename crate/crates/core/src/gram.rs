//! Core value types: Gram matrices, lattices, binary forms and vectors.
//!
//! A [`Lattice`] is stored as the orthogonal sum of its indecomposable
//! blocks (connected components of the off-diagonal support of its Gram
//! matrix). Enumeration and representation search work block by block, which
//! keeps lattices such as a direct sum of several thousand binaries cheap.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::enumeration::ComponentCache;
use crate::error::{QfError, Result};

/// Symmetric integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl GramMatrix {
    /// Builds a symmetric matrix from rows, checking shape and symmetry only.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(QfError::NotSquare { row: i, len: row.len(), expected: dim });
            }
            entries.extend_from_slice(row);
        }
        Self::from_flat(dim, entries)
    }

    pub fn from_flat(dim: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QfError::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(QfError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = d;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim.max(1)).take(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn determinant(&self) -> BigInt {
        arith::determinant(&self.entries, self.dim)
    }

    /// Sign check of every leading principal minor.
    pub fn check_positive_definite(&self) -> Result<()> {
        arith::leading_minors(&self.entries, self.dim)
            .map(|_| ())
            .map_err(|index| QfError::NotPositiveDefinite { index })
    }

    /// Whether the ideal generated by the entries is the unit ideal.
    pub fn has_unit_scale(&self) -> bool {
        self.entries.iter().fold(0i64, |g, &e| arith::gcd(g, e)) == 1
    }

    /// `x·G·y` evaluated exactly.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> i128 {
        let n = self.dim;
        let mut s = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in 0..n {
                row += self.entries[i * n + j] as i128 * y[j] as i128;
            }
            s += x[i] as i128 * row;
        }
        s
    }

    pub fn norm(&self, x: &[i64]) -> i128 {
        self.inner(x, x)
    }

    pub(crate) fn scaled(&self, a: i64) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|&e| e.checked_mul(a).ok_or(QfError::Overflow("scaling")))
            .collect::<Result<_>>()?;
        Ok(Self { dim: self.dim, entries })
    }

    /// `uᵀ·G·u` for an n×m transform `u`.
    pub fn transform(&self, u: &[i64], m: usize) -> Result<Self> {
        let entries = arith::congruence(&self.entries, self.dim, u, m)?;
        Ok(Self { dim: m, entries })
    }

    /// Text format: rows separated by `;`, entries by whitespace.
    pub fn to_text(&self) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Self::from_rows(&[]);
        }
        let rows = trimmed
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|e| QfError::Parse(format!("{t:?}: {e}"))))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

impl fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_text())
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        GramMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// One indecomposable orthogonal block together with its search caches.
#[derive(Debug)]
pub(crate) struct ComponentCore {
    pub(crate) gram: GramMatrix,
    pub(crate) cache: ComponentCache,
}

#[derive(Debug, Clone)]
pub(crate) struct Component {
    /// Global coordinates of the block, ascending.
    pub(crate) coords: Vec<usize>,
    pub(crate) core: Arc<ComponentCore>,
}

impl Component {
    pub(crate) fn gram(&self) -> &GramMatrix {
        &self.core.gram
    }
    pub(crate) fn rank(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug)]
struct LatticeInner {
    rank: usize,
    components: Vec<Component>,
    /// coordinate -> (component index, local index)
    locate: Vec<(u32, u32)>,
    disc: BigInt,
    index: OnceLock<Arc<crate::represent::TargetIndex>>,
}

/// A positive-definite integral lattice given by its Gram matrix.
///
/// Immutable; clones share structure and search caches.
#[derive(Clone)]
pub struct Lattice {
    inner: Arc<LatticeInner>,
}

impl Lattice {
    /// Validates a square integer matrix and builds the lattice.
    pub fn new(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_gram(GramMatrix::from_rows(rows)?)
    }

    pub fn from_gram(gram: GramMatrix) -> Result<Self> {
        gram.check_positive_definite()?;
        Ok(Self::from_gram_unchecked(gram))
    }

    /// Splits a (known positive-definite) Gram matrix into blocks.
    pub(crate) fn from_gram_unchecked(gram: GramMatrix) -> Self {
        let n = gram.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram.get(i, j) != 0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_group = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if root_group[r] == usize::MAX {
                root_group[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[root_group[r]].push(i);
        }
        let components = groups
            .into_iter()
            .map(|coords| {
                let k = coords.len();
                let mut entries = Vec::with_capacity(k * k);
                for &i in &coords {
                    for &j in &coords {
                        entries.push(gram.get(i, j));
                    }
                }
                let g = GramMatrix { dim: k, entries };
                Component { coords, core: Arc::new(ComponentCore { gram: g, cache: ComponentCache::default() }) }
            })
            .collect();
        Self::from_components(n, components)
    }

    fn from_components(rank: usize, components: Vec<Component>) -> Self {
        let mut locate = vec![(0u32, 0u32); rank];
        let mut disc = BigInt::one();
        for (ci, c) in components.iter().enumerate() {
            for (li, &g) in c.coords.iter().enumerate() {
                locate[g] = (ci as u32, li as u32);
            }
            disc *= c.gram().determinant();
        }
        Self { inner: Arc::new(LatticeInner { rank, components, locate, disc, index: OnceLock::new() }) }
    }

    /// Orthogonal sum of blocks given as separate Gram matrices, placed in order.
    pub(crate) fn from_blocks(blocks: Vec<GramMatrix>) -> Self {
        let mut comps = Vec::new();
        let mut offset = 0;
        for b in blocks {
            let k = b.dim();
            let sub = Lattice::from_gram_unchecked(b);
            for c in &sub.inner.components {
                comps.push(Component {
                    coords: c.coords.iter().map(|&x| x + offset).collect(),
                    core: c.core.clone(),
                });
            }
            offset += k;
        }
        Self::from_components(offset, comps)
    }

    /// The rank-0 lattice.
    pub fn zero() -> Self {
        Self::from_components(0, Vec::new())
    }

    /// Diagonal lattice ⟨d₁,…,d_k⟩.
    pub fn diagonal(diag: &[i64]) -> Result<Self> {
        Self::from_gram(GramMatrix::diagonal(diag))
    }

    /// The cubic lattice I_n.
    pub fn identity(n: usize) -> Self {
        Self::from_gram_unchecked(GramMatrix::diagonal(&vec![1; n]))
    }

    /// Binary lattice with Gram [[a,b],[b,c]].
    pub fn binary(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(&[vec![a, b], vec![b, c]])
    }

    pub fn rank(&self) -> usize {
        self.inner.rank
    }

    pub fn disc(&self) -> &BigInt {
        &self.inner.disc
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let (ci, li) = self.inner.locate[i];
        let (cj, lj) = self.inner.locate[j];
        if ci != cj {
            0
        } else {
            self.inner.components[ci as usize].gram().get(li as usize, lj as usize)
        }
    }

    /// Dense Gram matrix. Allocates rank² entries.
    pub fn gram(&self) -> GramMatrix {
        let n = self.rank();
        let mut entries = vec![0i64; n * n];
        for c in &self.inner.components {
            for (a, &i) in c.coords.iter().enumerate() {
                for (b, &j) in c.coords.iter().enumerate() {
                    entries[i * n + j] = c.gram().get(a, b);
                }
            }
        }
        GramMatrix { dim: n, entries }
    }

    pub(crate) fn index_cell(&self) -> &OnceLock<Arc<crate::represent::TargetIndex>> {
        &self.inner.index
    }

    pub(crate) fn components(&self) -> &[Component] {
        &self.inner.components
    }

    /// Gram matrices of the indecomposable orthogonal blocks.
    pub fn blocks(&self) -> Vec<GramMatrix> {
        self.inner.components.iter().map(|c| c.gram().clone()).collect()
    }

    pub fn has_unit_scale(&self) -> bool {
        self.inner
            .components
            .iter()
            .flat_map(|c| c.gram().as_slice().iter().copied())
            .fold(0i64, arith::gcd)
            == 1
    }

    /// Whether every vector has even norm.
    pub fn is_even(&self) -> bool {
        self.inner.components.iter().all(|c| (0..c.rank()).all(|i| c.gram().get(i, i) % 2 == 0))
    }

    pub fn inner_product(&self, x: &[i64], y: &[i64]) -> i128 {
        self.inner
            .components
            .iter()
            .map(|c| {
                let xs: Vec<i64> = c.coords.iter().map(|&g| x[g]).collect();
                if xs.iter().all(|&v| v == 0) {
                    return 0;
                }
                let ys: Vec<i64> = c.coords.iter().map(|&g| y[g]).collect();
                c.gram().inner(&xs, &ys)
            })
            .sum()
    }

    pub fn norm(&self, x: &[i64]) -> i128 {
        self.inner_product(x, x)
    }

    /// Gram matrix of the vectors given as columns of an n×k matrix.
    pub fn gram_of_columns(&self, columns: &[i64], k: usize) -> Result<GramMatrix> {
        let n = self.rank();
        if columns.len() != n * k {
            return Err(QfError::DimensionMismatch(format!("{} entries for {n}x{k}", columns.len())));
        }
        let cols: Vec<Vec<i64>> = (0..k).map(|j| (0..n).map(|i| columns[i * k + j]).collect()).collect();
        let mut entries = vec![0i64; k * k];
        for a in 0..k {
            for b in a..k {
                let v = i64::try_from(self.inner_product(&cols[a], &cols[b]))
                    .map_err(|_| QfError::Overflow("gram of columns"))?;
                entries[a * k + b] = v;
                entries[b * k + a] = v;
            }
        }
        Ok(GramMatrix { dim: k, entries })
    }

    /// Orthogonal sum `self ⊥ other`.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let off = self.rank();
        let mut comps = self.inner.components.clone();
        comps.extend(other.inner.components.iter().map(|c| Component {
            coords: c.coords.iter().map(|&x| x + off).collect(),
            core: c.core.clone(),
        }));
        Self::from_components(off + other.rank(), comps)
    }

    /// Orthogonal sum of a sequence of lattices.
    pub fn sum_of(parts: &[Lattice]) -> Lattice {
        parts.iter().fold(Lattice::zero(), |acc, l| acc.direct_sum(l))
    }

    /// The scaled lattice L^a (every Gram entry multiplied by `a`).
    pub fn scale(&self, a: i64) -> Result<Lattice> {
        if a < 1 {
            return Err(QfError::PreconditionFailed(format!("scale factor {a} must be positive")));
        }
        if a == 1 {
            return Ok(self.clone());
        }
        let comps = self
            .inner
            .components
            .iter()
            .map(|c| {
                Ok(Component {
                    coords: c.coords.clone(),
                    core: Arc::new(ComponentCore { gram: c.gram().scaled(a)?, cache: ComponentCache::default() }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_components(self.rank(), comps))
    }

    /// Root lattice A_n (n ≥ 1) or D_n (n ≥ 3) in its standard root basis.
    pub fn root_lattice(family: RootFamily, n: usize) -> Result<Lattice> {
        let mut g = vec![vec![0i64; n]; n];
        match family {
            RootFamily::A => {
                if n < 1 {
                    return Err(QfError::UnsupportedFamilyRank { family: 'A', rank: n });
                }
                for i in 0..n {
                    g[i][i] = 2;
                    if i + 1 < n {
                        g[i][i + 1] = -1;
                        g[i + 1][i] = -1;
                    }
                }
            }
            RootFamily::D => {
                if n < 3 {
                    return Err(QfError::UnsupportedFamilyRank { family: 'D', rank: n });
                }
                // Roots e1-e2, ..., e_{n-1}-e_n, e_{n-1}+e_n.
                for i in 0..n {
                    g[i][i] = 2;
                }
                for i in 0..n - 2 {
                    g[i][i + 1] = -1;
                    g[i + 1][i] = -1;
                }
                g[n - 3][n - 1] = -1;
                g[n - 1][n - 3] = -1;
            }
        }
        Lattice::new(&g)
    }

    pub fn to_text(&self) -> String {
        self.gram().to_text()
    }

    /// Parses either the JSON (`{"gram": [[..]]}`) or the text format.
    pub fn parse(s: &str) -> Result<Lattice> {
        let t = s.trim();
        if t.starts_with('{') {
            let file: LatticeFile = serde_json::from_str(t).map_err(|e| QfError::Parse(e.to_string()))?;
            Lattice::from_gram(file.gram)
        } else if t.starts_with('[') {
            let gram: GramMatrix = serde_json::from_str(t).map_err(|e| QfError::Parse(e.to_string()))?;
            Lattice::from_gram(gram)
        } else {
            Lattice::from_gram(GramMatrix::parse_text(t)?)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "gram": self.gram().rows() })
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.rank() == other.rank()
            && self.disc() == other.disc()
            && (0..self.rank()).all(|i| (i..self.rank()).all(|j| self.entry(i, j) == other.entry(i, j)))
    }
}

impl Eq for Lattice {}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() <= 16 {
            write!(f, "Lattice[{}]", self.to_text())
        } else {
            write!(f, "Lattice(rank {}, {} blocks)", self.rank(), self.inner.components.len())
        }
    }
}

/// JSON lattice file: `{"gram": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    pub gram: GramMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootFamily {
    A,
    D,
}

/// Lattice vector in the coordinates of its ambient lattice's basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vector {
    pub coords: Vec<i64>,
}

impl Vector {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Binary quadratic form a·x² + b·xy + c·y².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryFormTriple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// How a Gram matrix produced from a [`BinaryFormTriple`] relates to the form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GramKind {
    /// `[[a, b/2], [b/2, c]]`, only when b is even.
    Unit,
    /// `[[2a, b], [b, 2c]]`, the Gram matrix of the doubled form.
    Doubled,
}

impl BinaryFormTriple {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = Self { a, b, c };
        if a <= 0 || f.discriminant() >= 0 {
            return Err(QfError::PreconditionFailed(format!(
                "({a},{b},{c}) is not positive definite"
            )));
        }
        Ok(f)
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    pub fn content(&self) -> i64 {
        arith::gcd(arith::gcd(self.a, self.b), self.c).abs()
    }

    /// Gram matrix of the form. With `unit_scale` the middle coefficient must
    /// be even; otherwise the doubled Gram matrix is returned.
    pub fn to_gram(&self, unit_scale: bool) -> Result<(GramMatrix, GramKind)> {
        if unit_scale {
            if self.b % 2 != 0 {
                return Err(QfError::OddMiddleCoefficient { b: self.b });
            }
            let g = GramMatrix::from_rows(&[vec![self.a, self.b / 2], vec![self.b / 2, self.c]])?;
            Ok((g, GramKind::Unit))
        } else {
            let g = GramMatrix::from_rows(&[vec![2 * self.a, self.b], vec![self.b, 2 * self.c]])?;
            Ok((g, GramKind::Doubled))
        }
    }

    /// Unit-scale Gram when b is even, doubled Gram otherwise.
    pub fn natural_gram(&self) -> (GramMatrix, GramKind) {
        self.to_gram(self.b % 2 == 0).expect("valid form")
    }

    pub fn from_gram(g: &GramMatrix, kind: GramKind) -> Result<Self> {
        if g.dim() != 2 {
            return Err(QfError::DimensionMismatch(format!("binary form needs rank 2, got {}", g.dim())));
        }
        let (a, h, c) = (g.get(0, 0), g.get(0, 1), g.get(1, 1));
        match kind {
            GramKind::Unit => Self::new(a, 2 * h, c),
            GramKind::Doubled => {
                if a % 2 != 0 || c % 2 != 0 {
                    return Err(QfError::PreconditionFailed("doubled Gram needs even diagonal".into()));
                }
                Self::new(a / 2, h, c / 2)
            }
        }
    }

    /// Lattice on which this form is the norm (up to the doubling flag).
    pub fn lattice(&self) -> (Lattice, GramKind) {
        let (g, k) = self.natural_gram();
        (Lattice::from_gram(g).expect("positive definite"), k)
    }
}

impl fmt::Display for BinaryFormTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;

pub type Rows = Vec<Vec<i64>>;

pub fn norm(g: &Rows, x: &[i64]) -> i64 {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| g[i][j] * x[i] * x[j]).sum::<i64>()).sum()
}

pub fn inner(g: &Rows, x: &[i64], y: &[i64]) -> i64 {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| g[i][j] * x[i] * y[j]).sum::<i64>()).sum()
}

/// Leading principal minors by cofactor expansion.
pub fn det(g: &Rows) -> i128 {
    let n = g.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return g[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Rows = g[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &v)| v).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * g[0][j] as i128 * det(&minor)
        })
        .sum()
}

pub fn is_pd(g: &Rows) -> bool {
    (1..=g.len()).all(|k| det(&g[..k].iter().map(|r| r[..k].to_vec()).collect()) > 0)
}

/// Diagonal of the inverse, in floating point.
fn inverse_diagonal(g: &Rows) -> Vec<f64> {
    let n = g.len();
    let mut a: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    (0..n).map(|i| inv[i][i]).collect()
}

/// Every nonzero vector of norm ≤ bound with first nonzero coordinate
/// positive, by scanning the box |x_i| ≤ √(bound·(G⁻¹)_ii).
pub fn box_vectors(g: &Rows, bound: i64) -> Vec<(Vec<i64>, i64)> {
    let n = g.len();
    let r: Vec<i64> = inverse_diagonal(g).iter().map(|d| (bound as f64 * d).sqrt().floor() as i64 + 1).collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = r.iter().map(|&v| -v).collect();
    if n == 0 {
        return out;
    }
    loop {
        let q = norm(g, &x);
        if q > 0 && q <= bound && x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            out.push((x.clone(), q));
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
                return out;
            }
            x[i] += 1;
            if x[i] <= r[i] {
                break;
            }
            x[i] = -r[i];
            i += 1;
        }
    }
}

pub fn random_pd(rng: &mut impl Rng, n: usize, max_entry: i64) -> Rows {
    loop {
        let mut g = vec![vec![0; n]; n];
        for i in 0..n {
            g[i][i] = rng.gen_range(1..=max_entry);
            for j in 0..i {
                let v = rng.gen_range(-max_entry..=max_entry);
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        if is_pd(&g) {
            return g;
        }
    }
}

/// Random unimodular matrix as a product of elementary moves.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> Rows {
    let mut u: Rows = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return u;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let f = rng.gen_range(-2..=2);
        for row in u.iter_mut() {
            row[j] += f * row[i];
        }
    }
    u
}

/// Uᵀ G U.
pub fn congruent(g: &Rows, u: &Rows) -> Rows {
    let n = g.len();
    let m = u[0].len();
    let col = |j: usize| (0..n).map(|r| u[r][j]).collect::<Vec<_>>();
    (0..m).map(|a| (0..m).map(|b| inner(g, &col(a), &col(b))).collect()).collect()
}

/// Whether a·x² + b·xy + c·y² = m has an integer solution.
pub fn form_takes(a: i64, b: i64, c: i64, m: i64) -> bool {
    let d = 4 * a * c - b * b;
    let ymax = ((4 * a * m) as f64 / d as f64).sqrt() as i64 + 1;
    (-ymax..=ymax).any(|y| {
        let xmax = ((m as f64 / a as f64).sqrt() as i64) + y.abs() * (b.abs() + 1) + 1;
        (-xmax..=xmax).any(|x| a * x * x + b * x * y + c * y * y == m)
    })
}

/// Whether `target` holds vectors u, v with Q(u) = a, Q(v) = c, B(u,v) = b.
pub fn represents_binary(target: &Rows, a: i64, b: i64, c: i64) -> bool {
    let vs = box_vectors(target, c.max(a));
    let full: Vec<&Vec<i64>> = vs.iter().map(|(v, _)| v).collect();
    let us: Vec<&Vec<i64>> = vs.iter().filter(|(_, q)| *q == a).map(|(v, _)| v).collect();
    let ws: Vec<&Vec<i64>> = full.iter().copied().filter(|v| norm(target, v) == c).collect();
    us.iter().any(|u| ws.iter().any(|w| {
        let p = inner(target, u, w);
        p == b || p == -b
    }))
}

/// Reduced (a, b, c) with 0 ≤ 2b ≤ a ≤ c isometric to [[p, q],[q, r]]:
/// a and c are the successive minima, found by scanning short vectors.
pub fn reduced_by_scan(p: i64, q: i64, r: i64) -> (i64, i64, i64) {
    let g = vec![vec![p, q], vec![q, r]];
    let d = p * r - q * q;
    let vs = box_vectors(&g, p.max(r));
    let a = vs[0].1;
    let u = &vs[0].0;
    let c = vs.iter().find(|(w, _)| (u[0] * w[1] - u[1] * w[0]).abs() == 1).unwrap().1;
    let b = ((a * c - d) as f64).sqrt().round() as i64;
    assert_eq!(b * b, a * c - d);
    (a, b, c)
}

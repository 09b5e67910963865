//! Dense integer and rational matrix routines.
//!
//! Everything here is exact. Matrices are row-major `Vec<Vec<_>>`; a vector
//! multiplied on the left (`x · A`) is the convention used for lattice
//! coordinates throughout the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntMatrix = Vec<Vec<Int>>;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn from_i64(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    let cols = a[0].len();
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Int::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `x · A` for a row vector `x`.
pub fn vec_mat(x: &[Int], a: &[Vec<Int>]) -> Vec<Int> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let mut out = vec![Int::zero(); cols];
    for (xi, row) in x.iter().zip(a) {
        if xi.is_zero() {
            continue;
        }
        for (o, aij) in out.iter_mut().zip(row) {
            *o += xi * aij;
        }
    }
    out
}

pub fn dot(x: &[Int], y: &[Int]) -> Int {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Bilinear pairing `x · G · yᵀ`.
pub fn pair(gram: &[Vec<Int>], x: &[Int], y: &[Int]) -> Int {
    dot(&vec_mat(x, gram), y)
}

/// `B · G · Bᵀ`, the Gram matrix of the rows of `b`.
pub fn congruence(gram: &[Vec<Int>], b: &[Vec<Int>]) -> IntMatrix {
    let bg = mat_mul(b, gram);
    mat_mul(&bg, &transpose(b))
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(a: &[Vec<Int>]) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    let mut m: IntMatrix = a.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Result of a row-style Hermite reduction: `transform · A = reduced`.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub reduced: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
}

fn row_sub(rows: &mut [Vec<Int>], target: usize, src: usize, q: &Int) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Row Hermite normal form with unimodular transform. Nonzero rows come
/// first, pivots positive, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite(a: &[Vec<Int>]) -> Hermite {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h: IntMatrix = a.to_vec();
    let mut u = identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = pivot else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_sub(&mut h, i, r, &q);
                row_sub(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -&*x;
            }
            for x in u[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_sub(&mut h, i, r, &q);
            row_sub(&mut u, i, r, &q);
        }
        r += 1;
    }
    Hermite { reduced: h, transform: u, rank: r }
}

/// Basis (as rows) of the row module spanned by `rows`, in Hermite form.
pub fn row_basis(rows: &[Vec<Int>]) -> IntMatrix {
    let h = hermite(rows);
    h.reduced.into_iter().take(h.rank).collect()
}

pub fn rank(a: &[Vec<Int>]) -> usize {
    hermite(a).rank
}

/// Basis of the left kernel `{x ∈ ℤᵐ : x · A = 0}`. The basis is primitive.
pub fn left_kernel(a: &[Vec<Int>]) -> IntMatrix {
    let h = hermite(a);
    h.transform.into_iter().skip(h.rank).collect()
}

/// Basis of `{y ∈ ℤⁿ : A · yᵀ = 0}`.
pub fn right_kernel(a: &[Vec<Int>]) -> IntMatrix {
    left_kernel(&transpose(a))
}

/// Smith form `left · A · right = diag(d₁, d₂, …)` with `d₁ | d₂ | …`, all `dᵢ ≥ 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Int>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

pub fn smith(a: &[Vec<Int>]) -> Smith {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut d: IntMatrix = a.to_vec();
    let mut left = identity(m);
    let mut right = identity(n);

    fn col_sub(mat: &mut [Vec<Int>], target: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for row in mat.iter_mut() {
            if !row[src].is_zero() {
                let v = q * &row[src];
                row[target] -= v;
            }
        }
    }
    fn col_swap(mat: &mut [Vec<Int>], i: usize, j: usize) {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    }

    let k_max = m.min(n);
    for k in 0..k_max {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..m {
                for j in k..n {
                    if d[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_smith(d, left, right, k_max);
            };
            d.swap(k, pi);
            left.swap(k, pi);
            col_swap(&mut d, k, pj);
            col_swap(&mut right, k, pj);

            let mut clean = true;
            for i in k + 1..m {
                if d[i][k].is_zero() {
                    continue;
                }
                let q = d[i][k].div_floor(&d[k][k]);
                row_sub(&mut d, i, k, &q);
                row_sub(&mut left, i, k, &q);
                if !d[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if d[k][j].is_zero() {
                    continue;
                }
                let q = d[k][j].div_floor(&d[k][k]);
                col_sub(&mut d, j, k, &q);
                col_sub(&mut right, j, k, &q);
                if !d[k][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition on the rest of the block
            let bad = (k + 1..m).find(|&i| (k + 1..n).any(|j| !d[i][j].is_multiple_of(&d[k][k])));
            match bad {
                Some(i) => {
                    let one = -Int::one();
                    row_sub(&mut d, k, i, &one);
                    row_sub(&mut left, k, i, &one);
                }
                None => break,
            }
        }
        if d[k][k].is_negative() {
            for x in d[k].iter_mut() {
                *x = -&*x;
            }
            for x in left[k].iter_mut() {
                *x = -&*x;
            }
        }
    }
    finish_smith(d, left, right, k_max)
}

fn finish_smith(d: IntMatrix, left: IntMatrix, right: IntMatrix, k_max: usize) -> Smith {
    let diag = (0..k_max).map(|i| d[i][i].clone()).collect();
    Smith { diag, left, right }
}

pub fn to_rat(a: &[Vec<Int>]) -> RatMatrix {
    a.iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect()
}

/// Inverse over ℚ, `None` when singular.
pub fn inverse_rational(a: &[Vec<Int>]) -> Option<RatMatrix> {
    let n = a.len();
    let mut m = to_rat(a);
    let mut inv: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        inv.swap(c, p);
        let piv = m[c][c].clone();
        for j in 0..n {
            m[c][j] = &m[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..n {
                let a = &f * &m[c][j];
                m[i][j] -= a;
                let b = &f * &inv[c][j];
                inv[i][j] -= b;
            }
        }
    }
    Some(inv)
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(a: &[Vec<Int>]) -> Option<IntMatrix> {
    let inv = inverse_rational(a)?;
    inv.into_iter()
        .map(|r| r.into_iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect())
        .collect()
}

/// Coordinates `c` with `c · basis = v`, if `v` lies in the ℚ-span of the
/// (independent) rows of `basis`.
pub fn solve_rational(basis: &[Vec<Int>], v: &[Rat]) -> Option<Vec<Rat>> {
    let k = basis.len();
    let n = v.len();
    // augmented system Bᵀ c = v : n equations, k unknowns
    let mut rows: Vec<Vec<Rat>> = (0..n)
        .map(|j| {
            let mut r: Vec<Rat> = (0..k).map(|i| Rat::from_integer(basis[i][j].clone())).collect();
            r.push(v[j].clone());
            r
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..n {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=k {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut c = vec![Rat::zero(); k];
    for (i, &pc) in piv_cols.iter().enumerate() {
        c[pc] = rows[i][k].clone();
    }
    Some(c)
}

/// Integer coordinates of `v` with respect to the rows of `basis`, if any.
pub fn solve_integer(basis: &[Vec<Int>], v: &[Int]) -> Option<Vec<Int>> {
    let vr: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
    let c = solve_rational(basis, &vr)?;
    c.into_iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

/// Least common multiple of the denominators of a rational vector.
pub fn common_denominator(v: &[Rat]) -> Int {
    v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), int(-1));
        assert_eq!(determinant(&m(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]])), int(4));
        assert_eq!(determinant(&m(&[&[0, 0], &[0, 3]])), int(0));
        assert_eq!(determinant(&[]), int(1));
    }

    #[test]
    fn hermite_transform_is_consistent() {
        let a = m(&[&[4, 6, 2], &[2, 3, 1], &[1, 0, 5]]);
        let h = hermite(&a);
        assert_eq!(mat_mul(&h.transform, &a), h.reduced);
        assert_eq!(h.rank, 2);
        assert!(determinant(&h.transform).abs().is_one());
    }

    #[test]
    fn kernel_is_primitive() {
        let a = m(&[&[2], &[4], &[6]]);
        let k = left_kernel(&a);
        assert_eq!(k.len(), 2);
        for row in &k {
            assert!(vec_mat(row, &a).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn smith_of_diag_block() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![int(1), int(6)]);
        let d = mat_mul(&mat_mul(&s.left, &a), &s.right);
        assert_eq!(d, m(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn smith_d4_cartan() {
        let a = m(&[&[2, -1, 0, 0], &[-1, 2, -1, -1], &[0, -1, 2, 0], &[0, -1, 0, 2]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![int(1), int(1), int(2), int(2)]);
    }

    #[test]
    fn solve_integer_detects_non_membership() {
        let b = m(&[&[2, 0], &[0, 1]]);
        assert_eq!(solve_integer(&b, &[int(4), int(3)]), Some(vec![int(2), int(3)]));
        assert_eq!(solve_integer(&b, &[int(1), int(0)]), None);
    }
}

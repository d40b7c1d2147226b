//! Dense exact linear algebra over `ℚ` for the small Hecke matrices.
//!
//! Vectors are rows; an operator `A` on a space with basis `b_i` acts by
//! `T(b_i) = Σ_j A[i][j] b_j`.

use num_traits::{One, Zero};

use crate::rat::{q, Q};

pub type Mat = Vec<Vec<Q>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the row space, in reduced echelon form.
pub fn row_space(m: &Mat) -> Mat {
    let mut a = m.clone();
    rref(&mut a);
    a
}

pub fn transpose(m: &Mat) -> Mat {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Basis of `{x : M x = 0}`; `cols` is the length of `x`.
pub fn right_kernel(m: &Mat, cols: usize) -> Mat {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); cols];
            x[f] = Q::one();
            for (row, &p) in a.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Basis of `{x : x M = 0}`.
pub fn left_kernel(m: &Mat) -> Mat {
    right_kernel(&transpose(m), m.len())
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .map(|(x, br)| x * &br[j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn vec_mul(v: &[Q], b: &Mat) -> Vec<Q> {
    mul(&vec![v.to_vec()], b).pop().unwrap_or_default()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn sub_scalar(a: &Mat, lambda: &Q) -> Mat {
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    out
}

/// `x` with `x·B = t`, if it exists (rows of `B` independent or not).
pub fn solve_left(b: &Mat, t: &[Q]) -> Option<Vec<Q>> {
    let n = b.len();
    // [Bᵀ | t] reduced; the last column must not be a pivot
    let mut aug: Mat = transpose(b)
        .into_iter()
        .zip(t)
        .map(|(mut r, x)| {
            r.push(x.clone());
            r
        })
        .collect();
    if b.is_empty() {
        return t.iter().all(Zero::is_zero).then(Vec::new);
    }
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (row, &p) in aug.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// Monic characteristic polynomial `[c_0, …, c_{n-1}, 1]` by Faddeev–LeVerrier.
pub fn charpoly(a: &Mat) -> Vec<Q> {
    let n = a.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1} I
        let mut mk = mul(a, &m);
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        let am = mul(a, &mk);
        let tr: Q = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / q(k as i64);
        m = mk;
    }
    c
}

/// `p(x)` by Horner.
pub fn eval_poly(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// `p(x)/(x - root)` for an exact root.
pub fn deflate(p: &[Q], root: &Q) -> Vec<Q> {
    let n = p.len() - 1;
    let mut out = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + carry * root;
        out[i] = carry.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect()
    }

    #[test]
    fn basics() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = right_kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mul(&a, &transpose(&k)).iter().all(|r| r[0].is_zero()));
        let lk = left_kernel(&a);
        assert_eq!(lk.len(), 1);
        assert!(vec_mul(&lk[0], &a).iter().all(Zero::is_zero));
        let x = solve_left(&a, &[q(2), q(2), q(4)]).unwrap();
        assert_eq!(vec_mul(&x, &a), vec![q(2), q(2), q(4)]);
        assert!(solve_left(&a, &[q(0), q(0), q(1)]).is_none());
    }

    #[test]
    fn charpolys() {
        let a = m(&[&[2, 1], &[1, 2]]);
        assert_eq!(charpoly(&a), vec![q(3), q(-4), q(1)]);
        let p = charpoly(&m(&[&[0, 1, 0], &[0, 0, 1], &[6, -11, 6]]));
        assert_eq!(p, vec![q(-6), q(11), q(-6), q(1)]);
        assert!(eval_poly(&p, &q(2)).is_zero());
        assert_eq!(deflate(&p, &q(1)), vec![q(6), q(-5), q(1)]);
        assert_eq!(charpoly(&identity(2)), vec![q(1), q(-2), q(1)]);
    }
}

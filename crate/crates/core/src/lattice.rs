//! Small dense integer matrices: left kernels, Smith normal form and
//! linear congruences.
//!
//! Entries are `i128` with checked arithmetic; every overflow surfaces as
//! [`Error::Overflow`] instead of wrapping.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("integer matrix"))
}

/// `(g, s, t)` with `g = gcd(a, b) >= 0` and `s a + t b = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    ext_gcd(a, b).0
}

pub fn lcm(a: i128, b: i128) -> Result<i128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    ck((a / gcd(a, b)).checked_mul(b)).map(i128::abs)
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let p = ck(a.checked_mul(other[(k, j)]))?;
                    out[(i, j)] = ck(out[(i, j)].checked_add(p))?;
                }
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: i128) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = ck(self[(src, j)].checked_mul(k))?;
            self[(dst, j)] = ck(self[(dst, j)].checked_add(v))?;
        }
        Ok(())
    }

    /// `col[dst] += k * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: i128) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = ck(self[(i, src)].checked_mul(k))?;
            self[(i, dst)] = ck(self[(i, dst)].checked_add(v))?;
        }
        Ok(())
    }

    /// Replaces rows `(a, b)` by `(s a + t b, u a + v b)`; the 2×2 block must
    /// be unimodular.
    fn combine_rows(&mut self, a: usize, b: usize, s: i128, t: i128, u: i128, v: i128) -> Result<()> {
        for j in 0..self.cols {
            let (x, y) = (self[(a, j)], self[(b, j)]);
            self[(a, j)] = ck(ck(s.checked_mul(x))?.checked_add(ck(t.checked_mul(y))?))?;
            self[(b, j)] = ck(ck(u.checked_mul(x))?.checked_add(ck(v.checked_mul(y))?))?;
        }
        Ok(())
    }

}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Basis of the left kernel `{c ∈ ℤ^n : c A = 0}` as rows.
pub fn left_kernel(a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.rows();
    let m = a.cols();
    // Row-reduce [A | I]; rows whose A-part vanishes span the kernel.
    let mut aug = IntMatrix::zeros(n, m + n);
    for i in 0..n {
        for j in 0..m {
            aug[(i, j)] = a[(i, j)];
        }
        aug[(i, m + i)] = 1;
    }
    let mut pivot_row = 0;
    for col in 0..m {
        if pivot_row == n {
            break;
        }
        // Euclid down the column until a single non-zero entry remains.
        for i in pivot_row + 1..n {
            if aug[(i, col)] == 0 {
                continue;
            }
            let x = aug[(pivot_row, col)];
            let y = aug[(i, col)];
            let (g, s, t) = ext_gcd(x, y);
            let (u, v) = (-y / g, x / g);
            aug.combine_rows(pivot_row, i, s, t, u, v)?;
        }
        if aug[(pivot_row, col)] != 0 {
            pivot_row += 1;
        }
    }
    let rows: Vec<Vec<i128>> = (pivot_row..n).map(|i| aug.row(i)[m..].to_vec()).collect();
    let mut out = IntMatrix::zeros(rows.len(), n);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..n {
            out[(i, j)] = r[j];
        }
    }
    Ok(out)
}

/// Smith normal form `U A V = diag(d)` with `d_1 | d_2 | …`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal entries, `min(rows, cols)` of them, non-negative.
    pub diagonal: Vec<i128>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

pub fn smith(a: &IntMatrix) -> Result<Smith> {
    let (r, c) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);
    let size = r.min(c);
    'outer: for t in 0..size {
        // Move a smallest non-zero entry of the remaining block to (t, t).
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = m[(i, j)];
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < m[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break 'outer;
            };
            m.swap_rows(t, bi);
            u.swap_rows(t, bi);
            m.swap_cols(t, bj);
            v.swap_cols(t, bj);
            v_inv.swap_rows(t, bj);
            let p = m[(t, t)];
            let mut clean = true;
            for i in t + 1..r {
                let q = m[(i, t)] / p;
                m.add_row(i, t, -q)?;
                u.add_row(i, t, -q)?;
                clean &= m[(i, t)] == 0;
            }
            for j in t + 1..c {
                let q = m[(t, j)] / p;
                m.add_col(j, t, -q)?;
                // V ← V E with E = I - q e_t e_jᵀ; V⁻¹ ← E⁻¹ V⁻¹.
                v.add_col(j, t, -q)?;
                v_inv.add_row(t, j, q)?;
                clean &= m[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot back in.
            let mut fixed = true;
            'scan: for i in t + 1..r {
                for j in t + 1..c {
                    if m[(i, j)] % p != 0 {
                        m.add_row(t, i, 1)?;
                        u.add_row(t, i, 1)?;
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if m[(t, t)] < 0 {
            for j in 0..c {
                m[(t, j)] = -m[(t, j)];
            }
            for j in 0..r {
                u[(t, j)] = -u[(t, j)];
            }
        }
    }
    let diagonal = (0..size).map(|i| m[(i, i)]).collect();
    Ok(Smith {
        diagonal,
        u,
        v,
        v_inv,
    })
}

/// One integer solution of `Σ_j a_ij x_j ≡ b_i (mod modulus)`, reduced
/// into `[0, modulus)`.
pub fn solve_congruences(a: &IntMatrix, b: &[i128], modulus: i128) -> Result<Option<Vec<i128>>> {
    assert!(modulus > 0);
    let rows = a.rows();
    let cols = a.cols();
    // A x + N y = b over ℤ, solved through the Smith form of [A | N I].
    let mut ext = IntMatrix::zeros(rows, cols + rows);
    for i in 0..rows {
        for j in 0..cols {
            ext[(i, j)] = a[(i, j)].rem_euclid(modulus);
        }
        ext[(i, cols + i)] = modulus;
    }
    let s = smith(&ext)?;
    let dot = |row: &[i128], x: &[i128]| -> Result<i128> {
        row.iter()
            .zip(x)
            .try_fold(0i128, |acc, (&p, &q)| ck(acc.checked_add(ck(p.checked_mul(q))?)))
    };
    let b: Vec<i128> = b.iter().map(|x| x.rem_euclid(modulus)).collect();
    let mut z = vec![0i128; cols + rows];
    for i in 0..rows {
        let ub = dot(s.u.row(i), &b)?;
        let d = s.diagonal[i];
        if d == 0 {
            if ub != 0 {
                return Ok(None);
            }
        } else if ub % d != 0 {
            return Ok(None);
        } else {
            z[i] = ub / d;
        }
    }
    let mut x = Vec::with_capacity(cols);
    for j in 0..cols {
        x.push(dot(s.v.row(j), &z)?.rem_euclid(modulus));
    }
    Ok(Some(x))
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let mut t = IntMatrix::zeros(a.cols(), a.rows());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            t[(j, i)] = a[(i, j)];
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_dependent_rows() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![1, 2], vec![3, 6]]);
        let k = left_kernel(&a).unwrap();
        assert_eq!(k.rows(), 2);
        let prod = k.mul(&a).unwrap();
        assert!(prod.to_rows().iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a).unwrap();
        assert_eq!(s.diagonal, vec![2, 6, 12]);
        let d = s.u.mul(&a).unwrap().mul(&s.v).unwrap();
        assert_eq!(d, IntMatrix::from_rows(&[vec![2, 0, 0], vec![0, 6, 0], vec![0, 0, 12]]));
        let id = s.v.mul(&s.v_inv).unwrap();
        assert_eq!(id, IntMatrix::identity(3));
    }

    #[test]
    fn smith_transform_diagonalises() {
        let a = IntMatrix::from_rows(&[vec![4, 6], vec![6, 9]]);
        let s = smith(&a).unwrap();
        let av = a.mul(&s.v).unwrap();
        // Columns of A V are multiples of the diagonal entries.
        for (j, &d) in s.diagonal.iter().enumerate() {
            for i in 0..2 {
                if d == 0 {
                    assert_eq!(av[(i, j)], 0);
                } else {
                    assert_eq!(av[(i, j)] % d, 0);
                }
            }
        }
    }

    #[test]
    fn congruences() {
        // 2x ≡ 4 (mod 6), 3x ≡ 3 (mod 6) → x ≡ 5 (mod 6)
        let a = IntMatrix::from_rows(&[vec![2], vec![3]]);
        let x = solve_congruences(&a, &[4, 3], 6).unwrap().unwrap();
        assert_eq!((2 * x[0]).rem_euclid(6), 4);
        assert_eq!((3 * x[0]).rem_euclid(6), 3);
        let bad = solve_congruences(&IntMatrix::from_rows(&[vec![2]]), &[1], 4).unwrap();
        assert!(bad.is_none());
    }
}

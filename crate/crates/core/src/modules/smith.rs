//! Smith normal form over the integers with unimodular transforms.
//!
//! For an `m x n` integer matrix `A`, [`smith`] returns `U`, `U^-1` and `V`
//! with `U * A * V = S` diagonal, each nonzero diagonal entry dividing the
//! next, all nonzero entries first.

pub type Mat = Vec<Vec<i128>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat, inner: usize) -> Mat {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Mat, x: &[i128]) -> Vec<i128> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

#[derive(Clone, Debug)]
pub struct Smith {
    pub rows: usize,
    pub cols: usize,
    /// Diagonal of `S`, length `min(rows, cols)`, nonnegative.
    pub diag: Vec<i128>,
    pub rank: usize,
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
}

struct Work {
    a: Mat,
    u: Mat,
    u_inv: Mat,
    v: Mat,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: i128) {
        if c == 0 {
            return;
        }
        for k in 0..self.a[0].len() {
            let t = self.a[j][k];
            self.a[i][k] += c * t;
        }
        for k in 0..self.u[0].len() {
            let t = self.u[j][k];
            self.u[i][k] += c * t;
        }
        for row in &mut self.u_inv {
            let t = row[i];
            row[j] -= c * t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -*x;
        }
        for x in &mut self.u[i] {
            *x = -*x;
        }
        for row in &mut self.u_inv {
            row[i] = -row[i];
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: i128) {
        if c == 0 {
            return;
        }
        for row in &mut self.a {
            let t = row[j];
            row[i] += c * t;
        }
        for row in &mut self.v {
            let t = row[j];
            row[i] += c * t;
        }
    }
}

pub fn smith(a: &Mat, rows: usize, cols: usize) -> Smith {
    let mut w = Work {
        a: a.clone(),
        u: identity(rows),
        u_inv: identity(rows),
        v: identity(cols),
    };
    if rows == 0 || cols == 0 {
        return Smith {
            rows,
            cols,
            diag: vec![],
            rank: 0,
            u: w.u,
            u_inv: w.u_inv,
            v: w.v,
        };
    }
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut pivot = None;
        for i in t..rows {
            for j in t..cols {
                let x = w.a[i][j].abs();
                if x != 0 && pivot.map_or(true, |(_, _, best)| x < best) {
                    pivot = Some((i, j, x));
                }
            }
        }
        let Some((pi, pj, _)) = pivot else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = w.a[i][t].div_euclid(p);
                w.add_row(i, t, -q);
                if w.a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = w.a[t][j].div_euclid(p);
                w.add_col(j, t, -q);
                if w.a[t][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                let mut best = (t, t, w.a[t][t].abs());
                for i in t..rows {
                    let x = w.a[i][t].abs();
                    if x != 0 && x < best.2 {
                        best = (i, t, x);
                    }
                }
                for j in t..cols {
                    let x = w.a[t][j].abs();
                    if x != 0 && x < best.2 {
                        best = (t, j, x);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            // pivot must divide the trailing block
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if w.a[i][j] % p != 0 {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => w.add_row(t, i, 1),
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.negate_row(t);
        }
        t += 1;
    }
    let diag: Vec<i128> = (0..steps).map(|i| w.a[i][i]).collect();
    let rank = diag.iter().filter(|&&x| x != 0).count();
    Smith {
        rows,
        cols,
        diag,
        rank,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
    }
}

/// A basis (as columns, returned as a list of vectors) of the integer
/// kernel of `a`.
pub fn integer_kernel(a: &Mat, rows: usize, cols: usize) -> Vec<Vec<i128>> {
    let s = smith(a, rows, cols);
    (s.rank..cols)
        .map(|j| (0..cols).map(|i| s.v[i][j]).collect())
        .collect()
}

/// Some integer solution of `a z = b`, if one exists.
pub fn integer_solve(a: &Mat, rows: usize, cols: usize, b: &[i128]) -> Option<Vec<i128>> {
    let s = smith(a, rows, cols);
    let ub = mat_vec(&s.u, b);
    let mut w = vec![0i128; cols];
    for i in 0..rows {
        if i < s.rank {
            if ub[i] % s.diag[i] != 0 {
                return None;
            }
            w[i] = ub[i] / s.diag[i];
        } else if ub[i] != 0 {
            return None;
        }
    }
    Some(mat_vec(&s.v, &w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &Mat, rows: usize, cols: usize) {
        let s = smith(a, rows, cols);
        let prod = mat_mul(&mat_mul(&s.u, a, rows), &s.v, cols);
        for i in 0..rows {
            for j in 0..cols {
                let expected = if i == j { s.diag[i] } else { 0 };
                assert_eq!(prod[i][j], expected, "{a:?}");
            }
        }
        assert_eq!(mat_mul(&s.u, &s.u_inv, rows), identity(rows));
        for k in 1..s.rank {
            assert_eq!(s.diag[k] % s.diag[k - 1], 0);
        }
    }

    #[test]
    fn small_cases() {
        check(&vec![vec![2, 4]], 1, 2);
        check(&vec![vec![2, 0], vec![0, 3]], 2, 2);
        check(&vec![vec![1, 1, -2]], 1, 3);
        let s = smith(&vec![vec![2, 0], vec![0, 3]], 2, 2);
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn kernel_and_solve() {
        let a = vec![vec![1, 1, -2]];
        let k = integer_kernel(&a, 1, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(mat_vec(&a, v), vec![0]);
        }
        assert!(integer_solve(&vec![vec![2, 4]], 1, 2, &[3]).is_none());
        let z = integer_solve(&vec![vec![4, 6]], 1, 2, &[2]).unwrap();
        assert_eq!(mat_vec(&vec![vec![4, 6]], &z), vec![2]);
    }

    proptest! {
        #[test]
        fn transforms_diagonalize(rows in 1usize..4, cols in 1usize..4, seed in prop::collection::vec(-9i128..10, 16)) {
            let a: Mat = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            check(&a, rows, cols);
        }
    }
}

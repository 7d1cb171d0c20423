//! Small dense simplex solver for max cᵗz s.t. Az ≤ b, z ≥ 0 with b ≥ 0
//! (so the origin is a feasible starting vertex). Bland's rule.

pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(f64, Vec<f64>)> {
    let (m, n) = (a.len(), c.len());
    debug_assert!(b.iter().all(|&x| x >= 0.0));
    let width = n + m + 1;
    // rows 0..m constraints, row m objective (reduced costs)
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let eps = 1e-12;
    for _ in 0..10_000 {
        let Some(col) = (0..n + m).find(|&j| t[m][j] < -eps) else {
            let mut z = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    z[bv] = t[i][width - 1];
                }
            }
            return Some((t[m][width - 1], z));
        };
        let mut row = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > eps {
                let ratio = t[i][width - 1] / t[i][col];
                if ratio < best - eps
                    || (ratio <= best + eps && row.is_some_and(|r: usize| basis[i] < basis[r]))
                {
                    best = ratio;
                    row = Some(i);
                }
            }
        }
        let row = row?; // unbounded
        let p = t[row][col];
        for x in t[row].iter_mut() {
            *x /= p;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row && r[col] != 0.0 {
                let f = r[col];
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        basis[row] = col;
    }
    None
}

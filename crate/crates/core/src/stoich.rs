//! Exact stoichiometric algebra: the matrix Γ, its rank, conservation laws.
//!
//! Everything here runs in arbitrary-precision rational arithmetic so that
//! rank and kernel computations never depend on a floating tolerance.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::network::Crn;
use crate::rational::{self, Rational};

/// Rows are species, columns are reactions; entry = product − reactant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoichMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl StoichMatrix {
    pub fn of(net: &Crn) -> Self {
        let rows = net.num_species();
        let cols = net.num_reactions();
        let mut entries = vec![Rational::zero(); rows * cols];
        for (j, r) in net.reactions().iter().enumerate() {
            for (s, c) in r.product.terms() {
                entries[s * cols + j] += c;
            }
            for (s, c) in r.reactant.terms() {
                entries[s * cols + j] -= c;
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Self {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            rational::to_f64(self.get(i, j))
        })
    }

    fn transpose_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// wᵗΓ for a species-indexed row vector `w`.
    pub fn left_multiply(&self, w: &[Rational]) -> Vec<Rational> {
        assert_eq!(w.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                w.iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, wi)| acc + wi * self.get(i, j))
            })
            .collect()
    }

    /// Rank via fraction-free (Bareiss) elimination on an integer-scaled copy.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integer_row(&self.row(i))).collect();
        bareiss_rank(rows, self.cols)
    }

    /// Basis of {w : wᵗΓ = 0}, in reduced row echelon form (so the leading
    /// nonzero entry of every vector is +1).
    pub fn left_kernel(&self) -> Vec<Vec<Rational>> {
        let (reduced, pivots) = rref(self.transpose_rows(), self.rows);
        let free: Vec<usize> = (0..self.rows).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vec<Rational>> = free
            .iter()
            .map(|&f| {
                let mut w = vec![Rational::zero(); self.rows];
                w[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    w[p] = -reduced[row][f].clone();
                }
                w
            })
            .collect();
        if basis.is_empty() {
            return basis;
        }
        let (canonical, _) = rref(basis, self.rows);
        canonical
            .into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect()
    }

    /// Species whose rows of Γ are linearly independent, chosen greedily in
    /// species order (pivot columns of Γᵗ). Its length equals the rank.
    pub fn independent_species(&self) -> Vec<usize> {
        rref(self.transpose_rows(), self.rows).1
    }

    /// Whether the rows listed are linearly independent.
    pub fn rows_independent(&self, rows: &[usize]) -> bool {
        let sub: Vec<Vec<BigInt>> = rows.iter().map(|&i| integer_row(&self.row(i))).collect();
        bareiss_rank(sub, self.cols) == rows.len()
    }
}

/// Scales a rational row by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
}

fn bareiss_rank(mut m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                // exact by Sylvester's identity
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Reduced row echelon form over the rationals. Returns the reduced rows
/// (zero rows dropped to the bottom) and the pivot columns.
pub fn rref(mut m: Vec<Vec<Rational>>, cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (m, pivots)
}

pub fn stoichiometric_matrix(net: &Crn) -> StoichMatrix {
    StoichMatrix::of(net)
}

pub fn network_rank(net: &Crn) -> usize {
    StoichMatrix::of(net).rank()
}

pub fn conservation_laws(net: &Crn) -> Vec<Vec<Rational>> {
    StoichMatrix::of(net).left_kernel()
}

/// Homogeneity, checked both per reaction and as (1,…,1)ᵗΓ = 0.
pub fn is_homogeneous(net: &Crn) -> bool {
    let by_reaction = net.is_homogeneous();
    let ones = vec![Rational::one(); net.num_species()];
    let by_kernel = StoichMatrix::of(net)
        .left_multiply(&ones)
        .iter()
        .all(Zero::is_zero);
    debug_assert_eq!(by_reaction, by_kernel);
    by_reaction && by_kernel
}

/// Whether a vector is the zero vector.
pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Whether every entry is nonnegative.
pub fn is_nonnegative_vector(v: &[Rational]) -> bool {
    !v.iter().any(Signed::is_negative)
}

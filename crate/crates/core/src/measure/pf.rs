//! Perron–Frobenius data for small dense non-negative matrices.

use crate::error::{Error, Result};

pub const PF_TOLERANCE: f64 = 1e-12;
pub const PF_MAX_ITERATIONS: usize = 100_000;

/// Boolean `n × n` matrix stored as row bitsets.
#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    fn from_pattern(matrix: &[Vec<f64>]) -> Self {
        let n = matrix.len();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for (i, row) in matrix.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x > 0.0 {
                    rows[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        BitMatrix { n, words, rows }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = vec![0u64; self.n * self.words];
        for i in 0..self.n {
            let dst = &mut out[i * self.words..(i + 1) * self.words];
            for k in 0..self.n {
                if self.get(i, k) {
                    for (d, s) in dst.iter_mut().zip(other.row(k)) {
                        *d |= s;
                    }
                }
            }
        }
        BitMatrix { n: self.n, words: self.words, rows: out }
    }

    fn is_positive(&self) -> bool {
        let full_tail = if self.n.is_multiple_of(64) { u64::MAX } else { (1u64 << (self.n % 64)) - 1 };
        (0..self.n).all(|i| {
            let r = self.row(i);
            r[..self.words - 1].iter().all(|&w| w == u64::MAX) && r[self.words - 1] == full_tail
        })
    }
}

/// A non-negative matrix is primitive iff `A^k > 0` for `k = (n−1)² + 1`
/// (Wielandt). Positivity persists for larger powers, so squaring until the
/// exponent passes the bound decides it.
pub fn is_primitive(matrix: &[Vec<f64>]) -> bool {
    let n = matrix.len();
    if n == 0 {
        return false;
    }
    let bound = (n - 1) * (n - 1) + 1;
    let mut power = BitMatrix::from_pattern(matrix);
    let mut exp = 1usize;
    loop {
        if power.is_positive() {
            return true;
        }
        if exp >= bound {
            return false;
        }
        power = power.mul(&power);
        exp *= 2;
    }
}

/// Right PF eigenpair by power iteration; the vector is normalised to sum 1.
pub fn perron_right(matrix: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = matrix.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..PF_MAX_ITERATIONS {
        for (i, row) in matrix.iter().enumerate() {
            next[i] = row.iter().zip(&v).map(|(a, x)| a * x).sum();
        }
        let eig: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= eig);
        let diff = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if diff < PF_TOLERANCE {
            // v sums to one, so the growth of its mass is the eigenvalue
            let value = matrix.iter().map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>()).sum();
            return Ok((value, v));
        }
    }
    Err(Error::NotConverged { what: "power iteration", limit: PF_MAX_ITERATIONS })
}

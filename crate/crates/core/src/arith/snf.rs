use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `p · a · q = diag(divisors)` with `p`, `q` unimodular. `p_inv` is kept
/// alongside `p` so callers can map cokernel generators back.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub divisors: Vec<BigInt>,
    pub p: IntMatrix,
    pub p_inv: IntMatrix,
    pub q: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero divisors.
    pub fn rank(&self) -> usize {
        self.divisors.iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Elementary divisors `d_1 | d_2 | …` of `m`, `min(rows, cols)` of them,
/// nonnegative, zeros last.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    reduce(m, false).divisors
}

pub fn smith_decomposition(m: &IntMatrix) -> SmithDecomposition {
    reduce(m, true)
}

struct Work {
    a: IntMatrix,
    track: bool,
    p: IntMatrix,
    p_inv: IntMatrix,
    q: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if self.track {
            self.p.swap_rows(i, j);
            self.p_inv.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if self.track {
            self.q.swap_cols(i, j);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_row_multiple(dst, src, c);
        if self.track {
            self.p.add_row_multiple(dst, src, c);
            self.p_inv.add_col_multiple(src, dst, &-c);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_col_multiple(dst, src, c);
        if self.track {
            self.q.add_col_multiple(dst, src, c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if self.track {
            self.p.negate_row(i);
            self.p_inv.negate_col(i);
        }
    }

    /// Smallest nonzero entry (by absolute value) in the trailing block.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

fn reduce(m: &IntMatrix, track: bool) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.clone(),
        track,
        p: if track { IntMatrix::identity(rows) } else { IntMatrix::zeros(0, 0) },
        p_inv: if track { IntMatrix::identity(rows) } else { IntMatrix::zeros(0, 0) },
        q: if track { IntMatrix::identity(cols) } else { IntMatrix::zeros(0, 0) },
    };

    'diag: for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = w.min_pivot(t) else {
                break 'diag;
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);

            let pivot = w.a[(t, t)].clone();
            let mut cleared = true;
            for i in t + 1..rows {
                if w.a[(i, t)].is_zero() {
                    continue;
                }
                let quo = w.a[(i, t)].div_floor(&pivot);
                w.add_row(i, t, &-quo);
                cleared &= w.a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if w.a[(t, j)].is_zero() {
                    continue;
                }
                let quo = w.a[(t, j)].div_floor(&pivot);
                w.add_col(j, t, &-quo);
                cleared &= w.a[(t, j)].is_zero();
            }
            if !cleared {
                continue;
            }

            // Divisibility chain: fold an offending row into the pivot row.
            let offending = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !w.a[(i, j)].is_multiple_of(&pivot))
            });
            match offending {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }

    let divisors = (0..rows.min(cols)).map(|i| w.a[(i, i)].clone()).collect();
    SmithDecomposition { divisors, p: w.p, p_inv: w.p_inv, q: w.q }
}

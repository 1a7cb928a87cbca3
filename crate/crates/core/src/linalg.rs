//! Fixed-size 5-vectors and 5x5 matrices over an arbitrary ring.
//!
//! The connection matrices of this crate are all 5x5 and must be assembled
//! over exact rationals in the test oracles as well as over complex floats,
//! which rules out an off-the-shelf matrix library for this layer. Only the
//! operations actually used are provided.

use crate::scalar::{cabs, Cx, Real, Ring};

pub const DIM: usize = 5;

/// Column 5-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vec5<T>(pub [T; DIM]);

/// Dense 5x5 matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat5<T>(pub [[T; DIM]; DIM]);

impl<T: Ring> Vec5<T> {
    pub fn zero() -> Self {
        Vec5(std::array::from_fn(|_| T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        Vec5(std::array::from_fn(|i| {
            self.0[i].clone() + other.0[i].clone()
        }))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Vec5(std::array::from_fn(|i| {
            self.0[i].clone() - other.0[i].clone()
        }))
    }

    pub fn scale(&self, s: &T) -> Self {
        Vec5(std::array::from_fn(|i| self.0[i].clone() * s.clone()))
    }
}

impl<T: Ring> Mat5<T> {
    pub fn zero() -> Self {
        Mat5(std::array::from_fn(|_| {
            std::array::from_fn(|_| T::zero())
        }))
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.0[i][i] = T::one();
        }
        m
    }

    /// Rank-one outer product `w * col * row^T`.
    pub fn outer(weight: &T, col: &Vec5<T>, row: &Vec5<T>) -> Self {
        Mat5(std::array::from_fn(|i| {
            std::array::from_fn(|j| weight.clone() * col.0[i].clone() * row.0[j].clone())
        }))
    }

    pub fn add(&self, other: &Self) -> Self {
        Mat5(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].clone() + other.0[i][j].clone())
        }))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Mat5(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].clone() - other.0[i][j].clone())
        }))
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat5(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].clone() * s.clone())
        }))
    }

    pub fn matvec(&self, v: &Vec5<T>) -> Vec5<T> {
        Vec5(std::array::from_fn(|i| {
            let mut acc = T::zero();
            for j in 0..DIM {
                acc += self.0[i][j].clone() * v.0[j].clone();
            }
            acc
        }))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Mat5(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = T::zero();
                for k in 0..DIM {
                    acc += self.0[i][k].clone() * other.0[k][j].clone();
                }
                acc
            })
        }))
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..DIM {
            acc += self.0[i][i].clone();
        }
        acc
    }
}

impl<R: Real> Vec5<Cx<R>> {
    /// Euclidean norm of the complex 5-vector.
    pub fn norm(&self) -> R {
        let mut acc = R::zero();
        for z in &self.0 {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn norm_inf(&self) -> R {
        let mut acc = R::zero();
        for z in &self.0 {
            acc = acc.max(cabs(*z));
        }
        acc
    }
}

impl<R: Real> Mat5<Cx<R>> {
    /// Frobenius norm.
    pub fn norm(&self) -> R {
        let mut acc = R::zero();
        for row in &self.0 {
            for z in row {
                acc += z.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Determinant by partially pivoted LU elimination.
    pub fn det(&self) -> Cx<R> {
        let mut a = self.0.map(|r| r);
        let mut det = Cx::new(R::one(), R::zero());
        for col in 0..DIM {
            let mut piv = col;
            for r in col + 1..DIM {
                if cabs(a[r][col]) > cabs(a[piv][col]) {
                    piv = r;
                }
            }
            if cabs(a[piv][col]) == R::zero() {
                return Cx::new(R::zero(), R::zero());
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..DIM {
                let f = a[r][col] / a[col][col];
                for c in col..DIM {
                    let sub = f * a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Solve `A X = B` for the full 5x5 right-hand side, Gaussian elimination
    /// with partial pivoting. Returns `None` when a pivot vanishes.
    pub fn solve(&self, b: &Mat5<Cx<R>>) -> Option<Mat5<Cx<R>>> {
        let mut a = self.0.map(|r| r);
        let mut x = b.0.map(|r| r);
        for col in 0..DIM {
            let mut piv = col;
            for r in col + 1..DIM {
                if cabs(a[r][col]) > cabs(a[piv][col]) {
                    piv = r;
                }
            }
            if cabs(a[piv][col]) == R::zero() {
                return None;
            }
            a.swap(piv, col);
            x.swap(piv, col);
            for r in col + 1..DIM {
                let f = a[r][col] / a[col][col];
                for c in col..DIM {
                    let sub = f * a[col][c];
                    a[r][c] -= sub;
                }
                for c in 0..DIM {
                    let sub = f * x[col][c];
                    x[r][c] -= sub;
                }
            }
        }
        for col in (0..DIM).rev() {
            for c in 0..DIM {
                let mut acc = x[col][c];
                for k in col + 1..DIM {
                    acc -= a[col][k] * x[k][c];
                }
                x[col][c] = acc / a[col][col];
            }
        }
        Some(Mat5(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn det_and_solve_agree_with_identity() {
        let mut m = Mat5::<Complex64>::identity();
        m.0[0][3] = Complex64::new(2.0, 1.0);
        m.0[4][1] = Complex64::new(-0.5, 0.0);
        m.0[2][2] = Complex64::new(0.0, 3.0);
        let inv = m.solve(&Mat5::identity()).unwrap();
        let prod = m.matmul(&inv);
        let err = prod.sub(&Mat5::identity()).norm();
        assert!(err < 1e-14, "err = {err}");
        // triangular-ish determinant: product of diagonal after the two edits
        let det = m.det();
        assert!((det - Complex64::new(0.0, 3.0)).norm() < 1e-14);
    }
}

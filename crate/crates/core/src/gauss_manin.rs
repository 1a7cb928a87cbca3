//! Connection matrices for period derivatives with respect to individual
//! branch points: the order-5 system 2 ∂J/∂e_k = M_k J.
//!
//! M_k splits into a rank-one part carried by the coefficient row at e_k
//! and a strictly lower-triangular part with powers of e_k on its
//! subdiagonals. The decomposition is stored, and the entries are assembled
//! from it, so tests can confirm the split reproduces the matrix exactly.

use crate::curve::{coefficient_row_from_delta, delta_row};
use crate::linalg::{Mat5, Vec5, DIM};
use crate::scalar::Ring;

/// Which system a connection matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    /// Branch-point system, 0-based index into the branch set.
    M(usize),
    /// Moduli system, derivative in h1.
    U1,
    /// Moduli system, derivative in h2.
    U2,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::M(k) => write!(f, "M{}", k + 1),
            Label::U1 => write!(f, "U1"),
            Label::U2 => write!(f, "U2"),
        }
    }
}

/// One rank-one summand `weight * col * row^T`, with the diagnostic pole
/// prefactor retained separately (the weight is an integer multiple of it).
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1<T> {
    pub weight: T,
    pub pole: T,
    pub col: [T; DIM],
    pub row: [T; DIM],
}

impl<T: Ring> Rank1<T> {
    pub fn matrix(&self) -> Mat5<T> {
        Mat5::outer(
            &self.weight,
            &Vec5(self.col.clone()),
            &Vec5(self.row.clone()),
        )
    }
}

/// A 5x5 connection matrix together with its stored decomposition into
/// rank-one parts plus a strictly lower-triangular addend.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix<T> {
    pub label: Label,
    pub entries: Mat5<T>,
    pub parts: Vec<Rank1<T>>,
    pub lower: Mat5<T>,
}

impl<T: Ring> ConnectionMatrix<T> {
    /// Assemble entries from the stored decomposition, in a fixed order.
    /// `entries` is built by this very routine, so re-running it is an
    /// exact reproduction.
    pub fn assemble(parts: &[Rank1<T>], lower: &Mat5<T>) -> Mat5<T> {
        let mut m = lower.clone();
        for p in parts {
            m = m.add(&p.matrix());
        }
        m
    }

    pub fn new(label: Label, parts: Vec<Rank1<T>>, lower: Mat5<T>) -> Self {
        let entries = Self::assemble(&parts, &lower);
        ConnectionMatrix {
            label,
            entries,
            parts,
            lower,
        }
    }
}

/// Strictly lower-triangular addend of M_k: entry (i, j) = e_k^(i-1-j) for
/// i > j (1-based rows/columns), so the first subdiagonal is all ones and
/// the corner entry is e_k³.
pub fn gm_lower<T: Ring>(ek: &T) -> Mat5<T> {
    let mut l = Mat5::zero();
    for i in 0..DIM {
        for j in 0..i {
            let mut p = T::one();
            for _ in 0..(i - 1 - j) {
                p = p * ek.clone();
            }
            l.0[i][j] = p;
        }
    }
    l
}

/// The matrix M_k of 2 ∂J/∂e_k = M_k J: rank-one part
/// (2/R'(e_k)) * (1, e_k, ..., e_k⁴)^T (G, D, C, B, A) plus the
/// lower-triangular addend.
pub fn gm_matrix<T: Ring>(e: &[T; 6], k: usize) -> ConnectionMatrix<T> {
    let dr = delta_row(e, k);
    let row = coefficient_row_from_delta(&e[k], &dr);
    let ek = e[k].clone();
    let mut col = [T::one(), T::zero(), T::zero(), T::zero(), T::zero()];
    for i in 1..DIM {
        col[i] = col[i - 1].clone() * ek.clone();
    }
    let pole = T::one() / dr.rprime.clone();
    let weight = T::from_int(2) * pole.clone();
    let part = Rank1 {
        weight,
        pole,
        col,
        row: row.as_vec(),
    };
    ConnectionMatrix::new(Label::M(k), vec![part], gm_lower(&ek))
}

/// Right-hand side of the derivative system: ½ M_k J.
pub fn gm_derivative<T: Ring>(e: &[T; 6], k: usize, j: &Vec5<T>) -> Vec5<T> {
    let m = gm_matrix(e, k);
    let v = m.entries.matvec(j);
    Vec5(std::array::from_fn(|i| v.0[i].clone().half()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn lower_template_entries() {
        let l = gm_lower(&c(3.0));
        assert_eq!(l.0[1][0], c(1.0));
        assert_eq!(l.0[4][3], c(1.0));
        assert_eq!(l.0[2][0], c(3.0));
        assert_eq!(l.0[4][1], c(9.0));
        assert_eq!(l.0[4][0], c(27.0));
        assert_eq!(l.0[0][0], c(0.0));
        assert_eq!(l.0[0][4], c(0.0));
    }

    #[test]
    fn decomposition_reassembles_bitwise() {
        let e = [-3.0, 1.0, 2.0, 4.0, 5.0, 6.0].map(c);
        for k in 0..6 {
            let m = gm_matrix(&e, k);
            let again = ConnectionMatrix::assemble(&m.parts, &m.lower);
            assert_eq!(m.entries, again);
        }
    }

    #[test]
    fn rank1_rows_vanish_off_power_pattern() {
        // with e_k = 0 the rank-one part lives in the first row only
        let e = [0.0, 1.0, 2.0, 4.0, 5.0, 6.0].map(c);
        let m = gm_matrix(&e, 0);
        let r1 = m.parts[0].matrix();
        for i in 1..5 {
            for j in 0..5 {
                assert_eq!(r1.0[i][j], c(0.0));
            }
        }
        // and G = 0 there, so the (1,1) entry vanishes too
        assert_eq!(r1.0[0][0], c(0.0));
    }
}

use num_bigint::BigInt;
use num_traits::Zero;

use super::adjugate::adjugate;
use super::exact::det_exact;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Integer polynomial of degree at most two:
/// `Σ_ij quad[i][j] x_i x_j + Σ_i linear[i] x_i + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFormInt {
    n: usize,
    quad: Vec<Vec<BigInt>>,
    linear: Vec<BigInt>,
    constant: BigInt,
}

impl QuadraticFormInt {
    pub fn new(quad: Vec<Vec<BigInt>>, linear: Vec<BigInt>, constant: BigInt) -> Result<Self> {
        let n = linear.len();
        if quad.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: quad.len(),
            });
        }
        if let Some(r) = quad.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Ok(Self {
            n,
            quad,
            linear,
            constant,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn quad(&self, i: usize, j: usize) -> &BigInt {
        &self.quad[i][j]
    }

    pub fn linear(&self, i: usize) -> &BigInt {
        &self.linear[i]
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn evaluate(&self, x: &[i64]) -> Result<BigInt> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut acc = self.constant.clone();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0 {
                    row += &self.quad[i][j] * xj;
                }
            }
            acc += (row + &self.linear[i]) * xi;
        }
        Ok(acc)
    }

    /// Moves each linear coefficient onto the matching square term.
    /// Agrees with `self` wherever every coordinate is 0 or 1.
    pub fn squared_linear_terms(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let l = std::mem::take(&mut out.linear[i]);
            out.quad[i][i] += l;
        }
        out
    }
}

/// The determinant of `augment(A, (u, x))` as a polynomial in
/// `(u_1, .., u_n, x)`: `det(A) x - Σ_ij adj(A)_ij u_i u_j`.
pub fn augmented_det_form(a: &SymMatrix) -> QuadraticFormInt {
    let n = a.n();
    let adj = adjugate(a);
    let mut quad = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            quad[i][j] = -adj[i][j].clone();
        }
    }
    let mut linear = vec![BigInt::zero(); n + 1];
    linear[n] = det_exact(a);
    QuadraticFormInt {
        n: n + 1,
        quad,
        linear,
        constant: BigInt::zero(),
    }
}

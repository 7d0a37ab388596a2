//! Symmetric integer matrices, augmentation, and sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::EntryDistribution;
use crate::error::{Error, Result};
use crate::seed::{unit_rng, Domain};

/// Dense row-major integer matrix of arbitrary shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// The submatrix with `row` removed.
    pub fn without_row(&self, row: usize) -> Self {
        let data = (0..self.rows)
            .filter(|&i| i != row)
            .flat_map(|i| self.row(i).iter().copied())
            .collect();
        Self {
            rows: self.rows - 1,
            cols: self.cols,
            data,
        }
    }

    /// Rows `idx` in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Square integer matrix with `a[i][j] == a[j][i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymMatrix {
    n: usize,
    #[serde(rename = "rows", serialize_with = "ser_rows")]
    entries: Vec<i64>,
}

fn ser_rows<S: serde::Serializer>(entries: &[i64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    let rows: Vec<&[i64]> = (0..n).map(|i| &entries[i * n..(i + 1) * n]).collect();
    rows.serialize(s)
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            rows: Vec<Vec<i64>>,
        }
        let raw = Raw::deserialize(d)?;
        let m = SymMatrix::from_rows(&raw.rows).map_err(serde::de::Error::custom)?;
        if m.n != raw.n {
            return Err(serde::de::Error::custom("n does not match row count"));
        }
        Ok(m)
    }
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Builds from explicit rows; fails unless the rows form a symmetric square.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        let m = Self { n, entries };
        if let Some((i, j)) = m.first_asymmetry() {
            return Err(Error::ContractViolation(format!(
                "entry ({i},{j}) differs from ({j},{i})"
            )));
        }
        Ok(m)
    }

    /// Builds from the upper triangle listed row by row (`i <= j`).
    pub fn from_upper(n: usize, upper: &[i64]) -> Result<Self> {
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * (n + 1) / 2,
                found: upper.len(),
            });
        }
        let mut m = Self::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                m.entries[i * n + j] = upper[k];
                m.entries[j * n + i] = upper[k];
                k += 1;
            }
        }
        Ok(m)
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    /// Full scan of the symmetry invariant.
    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_int_matrix(&self) -> IntMatrix {
        IntMatrix {
            rows: self.n,
            cols: self.n,
            data: self.entries.clone(),
        }
    }

    /// Leading principal `k x k` block.
    pub fn leading_block(&self, k: usize) -> SymMatrix {
        assert!(k <= self.n);
        let mut m = SymMatrix::zeros(k);
        for i in 0..k {
            m.entries[i * k..(i + 1) * k].copy_from_slice(&self.row(i)[..k]);
        }
        m
    }
}

/// New last column (and row) `border` plus the new diagonal entry `corner`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationVector {
    pub border: Vec<i64>,
    pub corner: i64,
}

impl AugmentationVector {
    pub fn new(border: Vec<i64>, corner: i64) -> Self {
        Self { border, corner }
    }

    /// The `n + 1` coordinates `(border, corner)` as one vector.
    pub fn coordinates(&self) -> Vec<i64> {
        let mut v = self.border.clone();
        v.push(self.corner);
        v
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, model: &MatrixModel, rng: &mut R) -> Self {
        let border = (0..n).map(|_| model.off_diagonal.sample(rng)).collect();
        let corner = model.diagonal.sample(rng);
        Self { border, corner }
    }
}

/// Borders `a` with `v`: the result has `a` as its leading block.
pub fn augment(a: &SymMatrix, v: &AugmentationVector) -> Result<SymMatrix> {
    let n = a.n;
    if v.border.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.border.len(),
        });
    }
    let m = n + 1;
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..n {
        entries.extend_from_slice(a.row(i));
        entries.push(v.border[i]);
    }
    entries.extend_from_slice(&v.border);
    entries.push(v.corner);
    Ok(SymMatrix { n: m, entries })
}

/// Entry laws for the off-diagonal and diagonal positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixModel {
    pub off_diagonal: EntryDistribution,
    pub diagonal: EntryDistribution,
}

impl MatrixModel {
    /// Same law on and off the diagonal.
    pub fn iid(dist: EntryDistribution) -> Self {
        Self {
            off_diagonal: dist.clone(),
            diagonal: dist,
        }
    }

    /// Draws the upper triangle row by row and mirrors it.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> SymMatrix {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let d = if i == j { &self.diagonal } else { &self.off_diagonal };
                let x = d.sample(rng);
                m.entries[i * n + j] = x;
                m.entries[j * n + i] = x;
            }
        }
        m
    }
}

/// A random symmetric matrix with i.i.d. upper-triangle entries from `dist`.
pub fn sample_symmetric(n: usize, dist: &EntryDistribution, seed: u64) -> SymMatrix {
    sample_symmetric_model(n, &MatrixModel::iid(dist.clone()), seed)
}

pub fn sample_symmetric_model(n: usize, model: &MatrixModel, seed: u64) -> SymMatrix {
    let mut rng = unit_rng(seed, Domain::Matrix, n as u64);
    model.sample_with(n, &mut rng)
}

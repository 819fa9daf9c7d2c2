use crate::FemError;

/// Symmetric matrix in row-oriented profile storage: row `i` keeps the lower
/// entries from column `first[i]` to the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SkylineMatrix {
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineMatrix {
    pub fn new(first: Vec<usize>) -> Result<Self, FemError> {
        let mut offset = Vec::with_capacity(first.len() + 1);
        offset.push(0);
        for (i, &f) in first.iter().enumerate() {
            if f > i {
                return Err(FemError::InvalidSpec(format!("profile row {i} starts at column {f}")));
            }
            offset.push(offset[i] + i + 1 - f);
        }
        let nnz = offset[first.len()];
        Ok(SkylineMatrix { first, offset, values: vec![0.0; nnz] })
    }

    pub fn n(&self) -> usize {
        self.first.len()
    }

    /// Stored entries of the lower triangle.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn clear(&mut self) {
        self.values.fill(0.0);
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.offset[i]..self.offset[i + 1]]
    }

    /// Add `v` at `(i, j)`. Upper-triangle positions (`j > i`) are ignored so
    /// that a full symmetric element matrix can be scattered entry by entry.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if j > i {
            return;
        }
        debug_assert!(j >= self.first[i], "({i}, {j}) outside the profile");
        self.values[self.offset[i] + j - self.first[i]] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if j < self.first[i] {
            0.0
        } else {
            self.values[self.offset[i] + j - self.first[i]]
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        for i in 0..self.n() {
            let f = self.first[i];
            let row = self.row(i);
            let (off, diag) = row.split_at(row.len() - 1);
            y[i] += diag[0] * x[i];
            for (k, &a) in off.iter().enumerate() {
                y[i] += a * x[f + k];
                y[f + k] += a * x[i];
            }
        }
        y
    }

    /// In-place Cholesky factorization `A = L Lᵀ` within the profile.
    pub fn factorize(mut self) -> Result<SkylineCholesky, FemError> {
        let n = self.n();
        for i in 0..n {
            let fi = self.first[i];
            let oi = self.offset[i];
            for j in fi..=i {
                let fj = self.first[j];
                let k0 = fi.max(fj);
                let oj = self.offset[j];
                let dot: f64 = if j == i {
                    let r = &self.values[oi + k0 - fi..oi + i - fi];
                    r.iter().map(|v| v * v).sum()
                } else {
                    let (head, tail) = self.values.split_at(oi);
                    let a = &tail[k0 - fi..j - fi];
                    let b = &head[oj + k0 - fj..oj + j - fj];
                    a.iter().zip(b).map(|(x, y)| x * y).sum()
                };
                let s = self.values[oi + j - fi] - dot;
                if j == i {
                    if !(s > 0.0) {
                        return Err(FemError::NotPositiveDefinite(i));
                    }
                    self.values[oi + j - fi] = s.sqrt();
                } else {
                    let djj = self.values[self.offset[j + 1] - 1];
                    self.values[oi + j - fi] = s / djj;
                }
            }
        }
        Ok(SkylineCholesky { factor: self })
    }
}

/// Cholesky factor in the profile of the original matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkylineCholesky {
    factor: SkylineMatrix,
}

impl SkylineCholesky {
    pub fn n(&self) -> usize {
        self.factor.n()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let l = &self.factor;
        let n = l.n();
        for i in 0..n {
            let row = l.row(i);
            let f = l.first[i];
            let (off, diag) = row.split_at(row.len() - 1);
            let s: f64 = off.iter().zip(&x[f..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / diag[0];
        }
        for i in (0..n).rev() {
            let row = l.row(i);
            let f = l.first[i];
            let (off, diag) = row.split_at(row.len() - 1);
            x[i] /= diag[0];
            let xi = x[i];
            for (k, &a) in off.iter().enumerate() {
                x[f + k] -= a * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

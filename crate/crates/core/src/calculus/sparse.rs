use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetric sparse matrix in compressed row storage (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    /// The caller supplies both `(i, j)` and `(j, i)` for off-diagonal entries.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry") += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Entrywise `-A`.
    pub fn negated(mut self) -> Self {
        self.vals.iter_mut().for_each(|v| *v = -*v);
        self
    }

    /// Principal submatrix on `keep` (in that order).
    pub fn restrict(&self, keep: &[usize]) -> SparseSym {
        let mut index = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            index[i] = k;
        }
        let mut triplets = Vec::new();
        for (k, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if index[j] != usize::MAX {
                    triplets.push((k, index[j], v));
                }
            }
        }
        SparseSym::from_triplets(keep.len(), triplets)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }
}

/// Controls which path [`solve_spd`] takes.
#[derive(Debug, Clone, Copy)]
pub struct SpdOptions {
    /// Systems with at most this many unknowns use a dense Cholesky
    /// factorization; larger ones use preconditioned conjugate gradients.
    pub dense_limit: usize,
    /// Relative residual `‖r‖₂ / ‖b‖₂` at which CG stops.
    pub cg_tolerance: f64,
    pub cg_max_iterations: Option<usize>,
}

impl Default for SpdOptions {
    fn default() -> Self {
        SpdOptions {
            dense_limit: 2000,
            cg_tolerance: 1e-12,
            cg_max_iterations: None,
        }
    }
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &SparseSym, b: &[f64], opts: &SpdOptions) -> Result<Vec<f64>> {
    assert_eq!(a.dim(), b.len(), "dimension mismatch");
    if a.dim() == 0 {
        return Ok(Vec::new());
    }
    if a.diagonal().iter().any(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    if a.dim() <= opts.dense_limit {
        solve_dense(a, b)
    } else {
        solve_cg(a, b, opts)
    }
}

fn solve_dense(a: &SparseSym, b: &[f64]) -> Result<Vec<f64>> {
    let chol = a.to_dense().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let rhs = DVector::from_column_slice(b);
    let mut x = chol.solve(&rhs);
    let target = 1e-10 * (1.0 + norm_inf(b));
    // a couple of refinement sweeps
    for _ in 0..3 {
        let ax = a.apply(x.as_slice());
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        if norm_inf(&r) <= target {
            return Ok(x.as_slice().to_vec());
        }
        x += chol.solve(&DVector::from_vec(r));
    }
    let ax = a.apply(x.as_slice());
    let res = b.iter().zip(&ax).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    if res <= target {
        Ok(x.as_slice().to_vec())
    } else {
        Err(Error::NoConvergence(3))
    }
}

fn solve_cg(a: &SparseSym, b: &[f64], opts: &SpdOptions) -> Result<Vec<f64>> {
    let n = a.dim();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let max_iter = opts.cg_max_iterations.unwrap_or(20 * n + 1000);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        let ap = a.apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // refresh the recursive residual now and then
        if it % 50 == 49 {
            let ax = a.apply(&x);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
        }
        if dot(&r, &r).sqrt() <= opts.cg_tolerance * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence(max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_solve() {
        let b = vec![1.0, -2.0, 3.5];
        let x = solve_spd(&SparseSym::identity(3), &b, &SpdOptions::default()).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn path_with_one_anchor() {
        // D - Δ on the path 0-1-2 with D = diag(1, 0, 0)
        let t = vec![
            (0, 0, 2.0),
            (0, 1, -1.0),
            (1, 0, -1.0),
            (1, 1, 2.0),
            (1, 2, -1.0),
            (2, 1, -1.0),
            (2, 2, 1.0),
        ];
        let a = SparseSym::from_triplets(3, t);
        let x = solve_spd(&a, &[1.0, 0.0, 0.0], &SpdOptions::default()).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let cg = SpdOptions {
            dense_limit: 0,
            ..SpdOptions::default()
        };
        let x = solve_spd(&a, &[1.0, 0.0, 0.0], &cg).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_row_is_not_pd() {
        let a = SparseSym::from_triplets(2, vec![(0, 0, 1.0)]);
        assert!(matches!(
            solve_spd(&a, &[1.0, 1.0], &SpdOptions::default()),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = SparseSym::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(
            solve_spd(&a, &[1.0, 0.0], &SpdOptions::default()),
            Err(Error::NotPositiveDefinite)
        ));
        let cg = SpdOptions {
            dense_limit: 0,
            ..SpdOptions::default()
        };
        assert!(matches!(solve_spd(&a, &[1.0, 0.0], &cg), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn random_grounded_laplacians_recover_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta_min = (0.2f64 / 4.0).sin();
        for trial in 0..20 {
            let n = rng.gen_range(5..60);
            // random connected graph: a spanning path plus extra edges
            let mut t = Vec::new();
            let add = |t: &mut Vec<(usize, usize, f64)>, i: usize, j: usize, w: f64| {
                t.push((i, j, -w));
                t.push((j, i, -w));
                t.push((i, i, w));
                t.push((j, j, w));
            };
            for i in 1..n {
                let w = rng.gen_range(eta_min..2.0);
                add(&mut t, i - 1, i, w);
            }
            for _ in 0..n {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if i != j {
                    let w = rng.gen_range(eta_min..2.0);
                    add(&mut t, i, j, w);
                }
            }
            // nonzero nonnegative diagonal on a few vertices
            for _ in 0..3 {
                let i = rng.gen_range(0..n);
                t.push((i, i, rng.gen_range(0.1..1.0)));
            }
            let a = SparseSym::from_triplets(n, t);
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = a.apply(&x0);
            for dense_limit in [usize::MAX, 0] {
                let opts = SpdOptions {
                    dense_limit,
                    ..SpdOptions::default()
                };
                let x = solve_spd(&a, &b, &opts).unwrap();
                let err = x.iter().zip(&x0).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                let scale = norm_inf(&x0);
                assert!(err <= 1e-8 * scale, "trial {trial} limit {dense_limit}: {err}");
            }
        }
    }

    #[test]
    fn restrict_and_negate() {
        let a = SparseSym::from_triplets(3, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (0, 2, 4.0), (2, 0, 4.0)]);
        let r = a.restrict(&[2, 0]);
        assert_eq!(r.get(0, 0), 3.0);
        assert_eq!(r.get(0, 1), 4.0);
        assert_eq!(r.negated().get(1, 1), -1.0);
        assert_eq!(a.asymmetry(), 0.0);
    }
}

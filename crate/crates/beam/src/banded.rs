//! Banded matrix storage and factorizations.
//!
//! Hermite cubic elements on a uniform 1-D mesh couple each degree of
//! freedom to at most three neighbors on each side, so every matrix this
//! crate assembles (mass, bending and axial stiffness, Sobolev Grams,
//! effective time-stepping operators) is banded with half-bandwidth 3.
//! Two factorizations cover all solves:
//!
//! * [`SymBanded`] with a banded Cholesky factorization for the symmetric
//!   positive definite matrices (mass, Gram, symmetric stiffness);
//! * [`Banded`] with a partially pivoted banded LU for the nonsymmetric
//!   effective operators that include the axial form ⟨b·u″, v⟩.
//!
//! Both are cross-checked against dense factorizations in the test suite.

use std::fmt;

/// Error raised by factorizations.
#[derive(Debug, Clone, PartialEq)]
pub enum BandedError {
    /// Cholesky hit a nonpositive pivot: the matrix is not positive definite.
    NotPositiveDefinite { pivot_index: usize, pivot: f64 },
    /// LU hit an exactly zero pivot column: the matrix is singular.
    Singular { column: usize },
}

impl fmt::Display for BandedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandedError::NotPositiveDefinite { pivot_index, pivot } => write!(
                f,
                "matrix is not positive definite (pivot {pivot:e} at index {pivot_index})"
            ),
            BandedError::Singular { column } => {
                write!(f, "matrix is singular (zero pivot in column {column})")
            }
        }
    }
}

impl std::error::Error for BandedError {}

/// Symmetric banded matrix, stored by its lower bands.
///
/// `data[d][j] = A[j + d][j]` for diagonals `d = 0..=bw`.
#[derive(Debug, Clone)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBanded {
    /// Creates the zero matrix of dimension `n` with half-bandwidth `bw`.
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBanded {
            n,
            bw,
            data: vec![0.0; (bw + 1) * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bw || hi >= self.n {
            None
        } else {
            Some(d * self.n + lo)
        }
    }

    /// Returns `A[i][j]`, which is zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.slot(i, j) {
            Some(s) => self.data[s],
            None => 0.0,
        }
    }

    /// Adds `v` to `A[i][j]` (and by symmetry to `A[j][i]`).
    ///
    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band bw={}", self.bw));
        self.data[s] += v;
    }

    /// Matrix–vector product `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            // Diagonal.
            y[j] += self.data[j] * x[j];
            // Off-diagonals d >= 1: A[j+d][j] contributes to rows j+d and j.
            for d in 1..=self.bw.min(self.n - 1 - j) {
                let a = self.data[d * self.n + j];
                y[j + d] += a * x[j];
                y[j] += a * x[j + d];
            }
        }
        y
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for j in 0..self.n {
            acc += self.data[j] * x[j] * x[j];
            for d in 1..=self.bw.min(self.n - 1 - j) {
                acc += 2.0 * self.data[d * self.n + j] * x[j] * x[j + d];
            }
        }
        acc
    }

    /// Returns `self + other` (bandwidths must agree in dimension; the
    /// result takes the larger bandwidth).
    pub fn add_matrix(&self, other: &SymBanded) -> SymBanded {
        assert_eq!(self.n, other.n);
        let bw = self.bw.max(other.bw);
        let mut out = SymBanded::zeros(self.n, bw);
        for m in [self, other] {
            for d in 0..=m.bw {
                for j in 0..m.n.saturating_sub(d) {
                    out.data[d * out.n + j] += m.data[d * m.n + j];
                }
            }
        }
        out
    }

    /// Returns `self` scaled by `s`.
    pub fn scaled(&self, s: f64) -> SymBanded {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    /// Banded Cholesky factorization `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<BandedCholesky, BandedError> {
        let n = self.n;
        let bw = self.bw;
        let mut l = vec![0.0; (bw + 1) * n];
        for j in 0..n {
            // L[j][j]
            let mut s = self.data[j]; // A[j][j]
            let k0 = j.saturating_sub(bw);
            for k in k0..j {
                let ljk = l[(j - k) * n + k];
                s -= ljk * ljk;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(BandedError::NotPositiveDefinite {
                    pivot_index: j,
                    pivot: s,
                });
            }
            let ljj = s.sqrt();
            l[j] = ljj;
            // L[i][j] for i in (j, j+bw]
            for i in (j + 1)..=(j + bw).min(n - 1) {
                let mut s = self.get(i, j);
                let k0 = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= l[(i - k) * n + k] * l[(j - k) * n + k];
                }
                l[(i - j) * n + j] = s / ljj;
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }
}

/// Cholesky factor of a [`SymBanded`] matrix.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// Lower-band storage of L, same layout as [`SymBanded`].
    l: Vec<f64>,
}

impl BandedCholesky {
    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let bw = self.bw;
        let mut x = b.to_vec();
        // Forward: L y = b.
        for j in 0..n {
            x[j] /= self.l[j];
            let xj = x[j];
            for i in (j + 1)..=(j + bw).min(n - 1) {
                x[i] -= self.l[(i - j) * n + j] * xj;
            }
        }
        // Backward: Lᵀ x = y.
        for j in (0..n).rev() {
            let mut s = x[j];
            for i in (j + 1)..=(j + bw).min(n - 1) {
                s -= self.l[(i - j) * n + j] * x[i];
            }
            x[j] = s / self.l[j];
        }
        x
    }
}

/// General banded matrix with `kl` subdiagonals and `ku` superdiagonals.
///
/// Stored LAPACK-style with `kl` extra rows of fill space for pivoting:
/// entry `A[i][j]` lives at storage row `kl + ku + i - j`, column `j`.
#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    /// `(2 kl + ku + 1) × n`, row-major.
    ab: Vec<f64>,
}

impl Banded {
    /// Creates the zero matrix of dimension `n`.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            ab: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n {
            return None;
        }
        let (i, j) = (i as isize, j as isize);
        let d = i - j;
        if d > self.kl as isize || -d > self.ku as isize {
            None
        } else {
            let r = (self.kl + self.ku) as isize + d;
            Some(r as usize * self.n + j as usize)
        }
    }

    /// Returns `A[i][j]`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.slot(i, j) {
            Some(s) => self.ab[s],
            None => 0.0,
        }
    }

    /// Adds `v` to `A[i][j]`. Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).unwrap_or_else(|| {
            panic!(
                "entry ({i}, {j}) outside band kl={} ku={}",
                self.kl, self.ku
            )
        });
        self.ab[s] += v;
    }

    /// Adds `s · B` for a symmetric banded `B` (bandwidths must fit).
    pub fn add_sym_scaled(&mut self, b: &SymBanded, s: f64) {
        assert_eq!(self.n, b.dim());
        assert!(b.bandwidth() <= self.kl && b.bandwidth() <= self.ku);
        for j in 0..self.n {
            self.add(j, j, s * b.get(j, j));
            for d in 1..=b.bandwidth().min(self.n - 1 - j) {
                let v = s * b.get(j + d, j);
                if v != 0.0 {
                    self.add(j + d, j, v);
                    self.add(j, j + d, v);
                }
            }
        }
    }

    /// Adds `s · B` for a general banded `B`.
    pub fn add_banded_scaled(&mut self, b: &Banded, s: f64) {
        assert_eq!(self.n, b.n);
        assert!(b.kl <= self.kl && b.ku <= self.ku);
        for j in 0..self.n {
            let i0 = j.saturating_sub(b.ku);
            let i1 = (j + b.kl).min(self.n - 1);
            for i in i0..=i1 {
                let v = s * b.get(i, j);
                if v != 0.0 {
                    self.add(i, j, v);
                }
            }
        }
    }

    /// Matrix–vector product `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let i0 = j.saturating_sub(self.ku);
            let i1 = (j + self.kl).min(self.n - 1);
            let xj = x[j];
            for i in i0..=i1 {
                y[i] += self.get(i, j) * xj;
            }
        }
        y
    }

    /// Banded LU factorization with partial pivoting (in place).
    pub fn lu(mut self) -> Result<BandedLu, BandedError> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let kv = kl + ku; // effective upper bandwidth of U
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            // Pivot search among rows j..=j+kl (within the matrix).
            let km = kl.min(n - 1 - j);
            let mut p = 0usize;
            let mut pmax = self.raw(kv, j).abs();
            for q in 1..=km {
                let v = self.raw(kv + q, j).abs();
                if v > pmax {
                    pmax = v;
                    p = q;
                }
            }
            if pmax == 0.0 {
                return Err(BandedError::Singular { column: j });
            }
            ipiv[j] = j + p;
            // Swap rows j and j+p over columns j..=min(n-1, j+kv).
            if p > 0 {
                for c in j..=(j + kv).min(n - 1) {
                    let r1 = kv + j - c;
                    let r2 = kv + j + p - c;
                    let s1 = r1 * n + c;
                    let s2 = r2 * n + c;
                    self.ab.swap(s1, s2);
                }
            }
            // Eliminate below the pivot.
            let piv = self.raw(kv, j);
            for q in 1..=km {
                let m = self.raw(kv + q, j) / piv;
                *self.raw_mut(kv + q, j) = m;
                if m != 0.0 {
                    for c in (j + 1)..=(j + kv).min(n - 1) {
                        let upper = self.raw(kv + j - c, c);
                        if upper != 0.0 {
                            *self.raw_mut(kv + j + q - c, c) -= m * upper;
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ab: self.ab,
            ipiv,
        })
    }

    #[inline]
    fn raw(&self, r: usize, c: usize) -> f64 {
        self.ab[r * self.n + c]
    }

    #[inline]
    fn raw_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.ab[r * self.n + c]
    }
}

/// LU factors of a [`Banded`] matrix with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kv = self.kl + self.ku;
        let mut x = b.to_vec();
        // Apply permutation and forward-substitute with unit lower factor.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
            let xj = x[j];
            if xj != 0.0 {
                let km = self.kl.min(n - 1 - j);
                for q in 1..=km {
                    x[j + q] -= self.ab[(kv + q) * n + j] * xj;
                }
            }
        }
        // Back-substitute with U (upper bandwidth kv).
        for j in (0..n).rev() {
            let mut s = x[j];
            for c in (j + 1)..=(j + kv).min(n - 1) {
                s -= self.ab[(kv + j - c) * n + c] * x[c];
            }
            x[j] = s / self.ab[kv * n + j];
        }
        x
    }
}

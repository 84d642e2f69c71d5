/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds a 2x2 element block coupling nodes `i` and `i + 1`.
    pub fn add_block(&mut self, i: usize, block: [[f64; 2]; 2]) {
        self.diag[i] += block[0][0];
        self.diag[i + 1] += block[1][1];
        self.off[i] += 0.5 * (block[0][1] + block[1][0]);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// `|A| |x|` entrywise, used for componentwise backward errors.
    pub fn abs_matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = (self.diag[i] * x[i]).abs();
            if i > 0 {
                acc += (self.off[i - 1] * x[i - 1]).abs();
            }
            if i + 1 < n {
                acc += (self.off[i] * x[i + 1]).abs();
            }
            y[i] = acc;
        }
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.bilinear(x, x)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &SymTridiag, s: f64) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + s * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().map(|a| a * s).collect(),
            off: self.off.iter().map(|a| a * s).collect(),
        }
    }

    /// Leading `n x n` block.
    pub fn leading(&self, n: usize) -> SymTridiag {
        SymTridiag {
            diag: self.diag[..n].to_vec(),
            off: self.off[..n.saturating_sub(1)].to_vec(),
        }
    }

    /// Row sums `A 1`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.len()])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }

    /// Pivots of `A = L D L^T`; zero pivots are nudged to a tiny value so the
    /// count stays defined.
    pub fn ldl_pivots(&self) -> Vec<f64> {
        let n = self.len();
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut p = self.diag[i];
            if i > 0 {
                p -= self.off[i - 1] * self.off[i - 1] / d[i - 1];
            }
            if p == 0.0 {
                p = -f64::MIN_POSITIVE;
            }
            d[i] = p;
        }
        d
    }

    /// Number of negative eigenvalues (Sylvester inertia of the LDL^T pivots).
    pub fn negative_count(&self) -> usize {
        self.ldl_pivots().iter().filter(|p| **p < 0.0).count()
    }

    /// Solves `A x = b` by LDL^T without pivoting. Returns `None` on a zero pivot.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.len();
        assert_eq!(b.len(), n);
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut p = self.diag[i];
            let mut yi = b[i];
            if i > 0 {
                p -= l[i - 1] * self.off[i - 1];
                yi -= l[i - 1] * y[i - 1];
            }
            if p == 0.0 || !p.is_finite() {
                return None;
            }
            d[i] = p;
            y[i] = yi;
            if i + 1 < n {
                l[i] = self.off[i] / p;
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut xi = y[i] / d[i];
            if i + 1 < n {
                xi -= l[i] * x[i + 1];
            }
            x[i] = xi;
        }
        Some(x)
    }
}

/// `sum_c k_c (u_{c+1} - u_c)(v_{c+1} - v_c)`: a P1 radial stiffness kept in
/// difference form so that constants are annihilated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLaplacian {
    pub k: Vec<f64>,
}

impl CellLaplacian {
    pub fn len(&self) -> usize {
        self.k.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (c, k) in self.k.iter().enumerate() {
            if c + 1 >= x.len() {
                break;
            }
            let flux = k * (x[c] - x[c + 1]);
            y[c] += flux;
            y[c + 1] -= flux;
        }
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.k
            .iter()
            .enumerate()
            .filter(|(c, _)| c + 1 < x.len())
            .map(|(c, k)| k * (x[c + 1] - x[c]).powi(2))
            .sum()
    }

    pub fn to_tridiag(&self) -> SymTridiag {
        let mut t = SymTridiag::zeros(self.len());
        for (c, k) in self.k.iter().enumerate() {
            t.add_block(c, [[*k, -*k], [-*k, *k]]);
        }
        t
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

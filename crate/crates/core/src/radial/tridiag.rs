use num_complex::Complex64;

use crate::error::{LabError, Result};

/// LU factorization of a complex tridiagonal matrix with partial pivoting.
///
/// Row interchanges create a second superdiagonal, stored in `du2`; the layout follows
/// the classic banded `gttrf` scheme.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<Complex64>,
    /// Reciprocals of the pivots of `U`.
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factors the matrix with sub-diagonal `lower`, diagonal `diag` and super-diagonal `upper`.
    pub fn factor(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(LabError::InvalidInput(format!(
                "tridiagonal bands of lengths {}, {}, {} do not fit together",
                lower.len(),
                n,
                upper.len()
            )));
        }
        let mut dl = lower.to_vec();
        let mut d = diag.to_vec();
        let mut du = upper.to_vec();
        let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm_sqr() >= dl[i].norm_sqr() {
                if d[i].norm_sqr() == 0.0 {
                    return Err(LabError::Singular(i));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].norm_sqr() == 0.0 || !d.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LabError::Singular(n - 1));
        }
        let d = d.iter().map(|z| z.inv()).collect();
        Ok(Self {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Overwrites `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.d.len();
        assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let bi = b[i];
                b[i + 1] -= self.dl[i] * bi;
            }
        }
        b[n - 1] *= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) * self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) * self.d[i];
        }
    }

    /// Overwrites `b` with `A^{-T} b` (plain transpose, no conjugation).
    pub fn solve_transpose_in_place(&self, b: &mut [Complex64]) {
        let n = self.d.len();
        assert_eq!(b.len(), n);
        b[0] *= self.d[0];
        if n > 1 {
            b[1] = (b[1] - self.du[0] * b[0]) * self.d[1];
        }
        for i in 2..n {
            b[i] = (b[i] - self.du[i - 1] * b[i - 1] - self.du2[i - 2] * b[i - 2]) * self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            if self.swapped[i] {
                let temp = b[i + 1];
                b[i + 1] = b[i] - self.dl[i] * temp;
                b[i] = temp;
            } else {
                let bi1 = b[i + 1];
                b[i] -= self.dl[i] * bi1;
            }
        }
    }

    /// Overwrites `b` with `A^{-H} b`.
    pub fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        for z in b.iter_mut() {
            *z = z.conj();
        }
        self.solve_transpose_in_place(b);
        for z in b.iter_mut() {
            *z = z.conj();
        }
    }
}

/// `y = A x` for the tridiagonal matrix given by its bands.
pub fn tridiag_mul(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    x: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut acc = diag[i] * x[i];
            if i > 0 {
                acc += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += upper[i] * x[i + 1];
            }
            acc
        })
        .collect()
}

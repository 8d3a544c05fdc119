//! Dense symmetric eigensolves: Householder tridiagonalization followed by
//! implicit-shift QL, plus Cholesky congruence reduction for generalized
//! problems A x = λ G x with a Gram matrix G.

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest |A - Aᵀ| entry; zero for exactly symmetric matrices.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues in ascending order; `vectors` (if requested) holds the
/// corresponding eigenvectors as columns.
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Mat>,
}

/// Householder reduction of a symmetric matrix to tridiagonal form
/// (EISPACK tred2). On exit `a` holds the accumulated orthogonal transform
/// when `accumulate` is set, `d` the diagonal, `e` the subdiagonal in
/// e[1..n] (e[0] = 0).
fn tridiagonalize(a: &mut Mat, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = a.rows;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut fsum = 0.0;
                for j in 0..=l {
                    if accumulate {
                        a[(j, i)] = a[(i, j)] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    fsum += e[j] * a[(i, j)];
                }
                let hh = fsum / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[(j, k)] -= f * e[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if accumulate {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[(i, k)] * a[(k, j)];
                    }
                    for k in 0..i {
                        a[(k, j)] -= g * a[(k, i)];
                    }
                }
            }
            d[i] = a[(i, i)];
            a[(i, i)] = 1.0;
            for j in 0..i {
                a[(j, i)] = 0.0;
                a[(i, j)] = 0.0;
            }
        } else {
            d[i] = a[(i, i)];
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (EISPACK tql2).
/// `e[0]` is ignored on input. When `z` is given its columns are rotated
/// into the eigenvectors of the original dense matrix.
pub fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Mat>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    // Absolute deflation floor: a subdiagonal below eps·‖T‖ perturbs the
    // spectrum by at most that much, and a purely relative test can lock up
    // on blocks whose diagonal is itself round-off noise.
    let floor = {
        let mut anorm = 0.0f64;
        for i in 0..n {
            let mut row = d[i].abs() + e[i].abs();
            if i > 0 {
                row += e[i - 1].abs();
            }
            anorm = anorm.max(row);
        }
        f64::EPSILON * anorm
    };
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::numerical(format!(
                    "QL iteration failed to converge at row {l} of {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for k in 0..zm.rows {
                        f = zm[(k, i + 1)];
                        zm[(k, i + 1)] = s * zm[(k, i)] + c * f;
                        zm[(k, i)] = c * zm[(k, i)] - s * f;
                    }
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    d.copy_from_slice(&sorted_d);
    if let Some(zm) = z {
        let old = zm.clone();
        for (new_col, &src) in order.iter().enumerate() {
            for k in 0..zm.rows {
                zm[(k, new_col)] = old[(k, src)];
            }
        }
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric matrix. The input is symmetrized
/// ((A+Aᵀ)/2) to absorb assembly round-off; pass exactly symmetric data
/// when that matters.
pub fn symmetric_eigen(a: &Mat, want_vectors: bool) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::invalid("symmetric_eigen requires a square matrix"));
    }
    let n = a.rows;
    let mut work = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (work[(i, j)] + work[(j, i)]);
            work[(i, j)] = avg;
            work[(j, i)] = avg;
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut work, &mut d, &mut e, want_vectors);
    if want_vectors {
        tridiagonal_eigen(&mut d, &mut e, Some(&mut work))?;
        Ok(SymEigen {
            values: d,
            vectors: Some(work),
        })
    } else {
        tridiagonal_eigen(&mut d, &mut e, None)?;
        Ok(SymEigen {
            values: d,
            vectors: None,
        })
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky_lower(a: &Mat) -> Result<Mat> {
    if !a.is_square() {
        return Err(Error::invalid("cholesky requires a square matrix"));
    }
    let n = a.rows;
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::numerical(format!(
                "matrix not positive definite (pivot {diag:.3e} at column {j})"
            )));
        }
        l[(j, j)] = diag.sqrt();
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    Ok(l)
}

fn forward_substitute(l: &Mat, b: &mut [f64]) {
    let n = l.rows;
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

fn back_substitute_transpose(l: &Mat, b: &mut [f64]) {
    // Solves Lᵀ x = b.
    let n = l.rows;
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Generalized symmetric eigenproblem A x = λ G x with G positive definite,
/// reduced by congruence with the Cholesky factor of G to an ordinary
/// symmetric problem L⁻¹ A L⁻ᵀ y = λ y, x = L⁻ᵀ y.
pub fn generalized_symmetric_eigen(a: &Mat, g: &Mat, want_vectors: bool) -> Result<SymEigen> {
    if a.rows != g.rows || a.cols != g.cols || !a.is_square() {
        return Err(Error::invalid("dimension mismatch in generalized eigenproblem"));
    }
    let n = a.rows;
    let l = cholesky_lower(g)?;
    // W = L⁻¹ A, column by column.
    let mut w = Mat::zeros(n, n);
    for j in 0..n {
        let mut col = a.column(j);
        forward_substitute(&l, &mut col);
        for i in 0..n {
            w[(i, j)] = col[i];
        }
    }
    // B = L⁻¹ A L⁻ᵀ = (L⁻¹ Wᵀ)ᵀ.
    let mut b = Mat::zeros(n, n);
    for j in 0..n {
        let mut row: Vec<f64> = (0..n).map(|k| w[(j, k)]).collect();
        forward_substitute(&l, &mut row);
        for i in 0..n {
            b[(j, i)] = row[i];
        }
    }
    let mut eig = symmetric_eigen(&b, want_vectors)?;
    if let Some(vecs) = eig.vectors.as_mut() {
        for j in 0..n {
            let mut col = vecs.column(j);
            back_substitute_transpose(&l, &mut col);
            for i in 0..n {
                vecs[(i, j)] = col[i];
            }
        }
    }
    Ok(eig)
}

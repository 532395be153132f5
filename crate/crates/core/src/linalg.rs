//! Dense symmetric eigen-solver and the matrix helpers built on it.

use nalgebra::DMatrix;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// stored as columns. A partial decomposition holds only the requested pairs.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Which eigenpairs to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    All,
    /// Eigenvalues in the half-open interval `(lo, hi]`.
    Values(f64, f64),
    /// Zero-based, inclusive index range into the ascending spectrum.
    Indices(usize, usize),
}

/// Full eigendecomposition of a symmetric matrix (only the lower triangle is
/// read).
pub fn sym_eigen(a: &DMatrix<f64>) -> SymEigen {
    sym_eigen_part(a, Spectrum::All)
}

/// Selected eigenpairs of a symmetric matrix via LAPACK `dsyevr`.
pub fn sym_eigen_part(a: &DMatrix<f64>, which: Spectrum) -> SymEigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    if n == 0 {
        return SymEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    match dsyevr(a, which) {
        Some(e) => e,
        None => {
            // MRRR occasionally fails on tight clusters; divide and conquer does not
            log::debug!("dsyevr failed on a {n}x{n} matrix, retrying with dsyevd");
            select(dsyevd(a), which)
        }
    }
}

fn dsyevr(a: &DMatrix<f64>, which: Spectrum) -> Option<SymEigen> {
    let n = a.nrows();
    let mut work_a = a.clone();
    let ni = n as i32;
    let (range, vl, vu, il, iu) = match which {
        Spectrum::All => (b'A', 0.0, 0.0, 1, ni),
        Spectrum::Values(lo, hi) => (b'V', lo, hi, 1, ni),
        Spectrum::Indices(lo, hi) => {
            assert!(lo <= hi && hi < n, "index range out of bounds");
            (b'I', 0.0, 0.0, lo as i32 + 1, hi as i32 + 1)
        }
    };
    let jobz = b'V' as std::ffi::c_char;
    let range = range as std::ffi::c_char;
    let uplo = b'L' as std::ffi::c_char;
    let abstol = 0.0;
    let mut found = 0i32;
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n * n];
    let mut isuppz = vec![0i32; 2 * n];
    let mut info = 0i32;
    let mut lwork = -1i32;
    let mut liwork = -1i32;
    let mut work = vec![0.0f64; 1];
    let mut iwork = vec![0i32; 1];
    for pass in 0..2 {
        // SAFETY: every buffer is sized per the dsyevr documentation (the first
        // pass is a workspace query) and outlives the call.
        unsafe {
            lapack_sys::dsyevr_(
                &jobz,
                &range,
                &uplo,
                &ni,
                work_a.as_mut_slice().as_mut_ptr(),
                &ni,
                &vl,
                &vu,
                &il,
                &iu,
                &abstol,
                &mut found,
                w.as_mut_ptr(),
                z.as_mut_ptr(),
                &ni,
                isuppz.as_mut_ptr(),
                work.as_mut_ptr(),
                &lwork,
                iwork.as_mut_ptr(),
                &liwork,
                &mut info,
            );
        }
        assert!(info >= 0, "dsyevr rejected argument {}", -info);
        if info > 0 {
            return None;
        }
        if pass == 0 {
            lwork = work[0] as i32;
            liwork = iwork[0];
            work = vec![0.0; lwork.max(1) as usize];
            iwork = vec![0; liwork.max(1) as usize];
        }
    }
    let found = found as usize;
    w.truncate(found);
    z.truncate(n * found);
    Some(SymEigen {
        values: w,
        vectors: DMatrix::from_vec(n, found, z),
    })
}

fn dsyevd(a: &DMatrix<f64>) -> SymEigen {
    let n = a.nrows();
    let ni = n as i32;
    let mut v = a.clone();
    let jobz = b'V' as std::ffi::c_char;
    let uplo = b'L' as std::ffi::c_char;
    let mut w = vec![0.0; n];
    let mut info = 0i32;
    let mut lwork = -1i32;
    let mut liwork = -1i32;
    let mut work = vec![0.0f64; 1];
    let mut iwork = vec![0i32; 1];
    for pass in 0..2 {
        // SAFETY: as for dsyevr; the first pass is a workspace query.
        unsafe {
            lapack_sys::dsyevd_(
                &jobz,
                &uplo,
                &ni,
                v.as_mut_slice().as_mut_ptr(),
                &ni,
                w.as_mut_ptr(),
                work.as_mut_ptr(),
                &lwork,
                iwork.as_mut_ptr(),
                &liwork,
                &mut info,
            );
        }
        assert_eq!(info, 0, "dsyevd failed with info = {info}");
        if pass == 0 {
            lwork = work[0] as i32;
            liwork = iwork[0];
            work = vec![0.0; lwork.max(1) as usize];
            iwork = vec![0; liwork.max(1) as usize];
        }
    }
    SymEigen {
        values: w,
        vectors: v,
    }
}

/// Restricts a full decomposition to the requested pairs.
fn select(full: SymEigen, which: Spectrum) -> SymEigen {
    let keep: Vec<usize> = match which {
        Spectrum::All => return full,
        Spectrum::Values(lo, hi) => (0..full.values.len())
            .filter(|&i| full.values[i] > lo && full.values[i] <= hi)
            .collect(),
        Spectrum::Indices(lo, hi) => (lo..=hi).collect(),
    };
    SymEigen {
        values: keep.iter().map(|&i| full.values[i]).collect(),
        vectors: full.vectors.select_columns(&keep),
    }
}

impl SymEigen {
    /// `sum_i f(lambda_i) v_i v_i^T` over the selected eigenpairs.
    pub fn reassemble(&self, idx: &[usize], f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.vectors.nrows();
        if idx.is_empty() {
            return DMatrix::zeros(n, n);
        }
        let v = self.vectors.select_columns(idx);
        let mut scaled = v.clone();
        for (c, &i) in idx.iter().enumerate() {
            let f = f(self.values[i]);
            scaled.column_mut(c).scale_mut(f);
        }
        let mut out = &scaled * v.transpose();
        symmetrize(&mut out);
        out
    }

    /// `sum_i lambda_i v_i v_i^T` over every stored pair.
    pub fn assemble(&self) -> DMatrix<f64> {
        let all: Vec<usize> = (0..self.values.len()).collect();
        self.reassemble(&all, |l| l)
    }

    /// Residual norms `||A q_i - lambda_i q_i||` of every stored pair.
    pub fn residuals(&self, a: &DMatrix<f64>) -> Vec<f64> {
        let aq = a * &self.vectors;
        (0..self.values.len())
            .map(|i| {
                let lam = self.values[i];
                aq.column(i)
                    .iter()
                    .zip(self.vectors.column(i).iter())
                    .map(|(x, q)| (x - lam * q).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Splits a symmetric matrix into its positive and negative semidefinite
/// parts, `a = pos + neg`. Only the negative eigenpairs are computed, which is
/// the cheap side for the relaxation iterates.
pub fn psd_split(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let eig = sym_eigen_part(a, Spectrum::Values(f64::NEG_INFINITY, 0.0));
    let neg = eig.assemble();
    let mut pos = a - &neg;
    symmetrize(&mut pos);
    (pos, neg)
}

/// Projection onto the positive semidefinite cone.
pub fn project_psd(a: &DMatrix<f64>) -> DMatrix<f64> {
    psd_split(a).0
}

/// Best rank-`r` approximation in Frobenius norm of a symmetric PSD matrix,
/// keeping the `r` largest eigenvalues (negative ones clipped to zero).
pub fn truncate_rank(a: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    let n = a.nrows();
    if r == 0 || n == 0 {
        return DMatrix::zeros(n, n);
    }
    let r = r.min(n);
    let eig = sym_eigen_part(a, Spectrum::Indices(n - r, n - 1));
    let all: Vec<usize> = (0..eig.values.len()).collect();
    eig.reassemble(&all, |l| l.max(0.0))
}

/// Overwrites `a` with `(a + a^T) / 2`.
pub fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Frobenius inner product.
pub fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn lambda_max(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    sym_eigen_part(a, Spectrum::Indices(n - 1, n - 1)).values[0]
}

pub fn lambda_min(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    sym_eigen_part(a, Spectrum::Indices(0, 0)).values[0]
}

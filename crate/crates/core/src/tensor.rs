//! Dense N-way complex tensors sized for short coded blocks.
//!
//! Storage is flat with the first index varying fastest, so the vectorization
//! of an outer product `s_1 o ... o s_N` equals the Kronecker product
//! `s_N (x) ... (x) s_1` with no permutation. Unfoldings enumerate the
//! remaining indices with the lowest mode varying fastest; the mode Gramians
//! consumed by the detector are invariant to that column convention.
//!
//! Modes are 1-based throughout, matching the usual tensor notation.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix in column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r + self.rows * c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r + self.rows * c] = v;
    }

    /// One column as a slice (column-major payoff).
    pub fn column(&self, c: usize) -> &[Complex64] {
        &self.data[self.rows * c..self.rows * (c + 1)]
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for (c, &xc) in x.iter().enumerate() {
            let col = self.column(c);
            for (yi, &a) in y.iter_mut().zip(col.iter()) {
                *yi += a * xc;
            }
        }
        y
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }
}

/// N-way complex tensor, flat storage, first index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidArgument("tensor shape must be nonempty with positive extents".into()));
        }
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch {
                expected: len,
                got: data.len(),
            });
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Element access by multi-index (0-based).
    pub fn get(&self, index: &[usize]) -> Complex64 {
        debug_assert_eq!(index.len(), self.shape.len());
        let mut flat = 0usize;
        let mut stride = 1usize;
        for (i, &l) in index.iter().zip(self.shape.iter()) {
            debug_assert!(*i < l);
            flat += i * stride;
            stride *= l;
        }
        self.data[flat]
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Kronecker product of the given vectors in order: the first vector's index
/// varies slowest, the last varies fastest.
pub fn kron_vec<V: AsRef<[Complex64]>>(vectors: &[V]) -> Result<Vec<Complex64>> {
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("kron_vec of an empty list".into()));
    }
    let mut acc: Vec<Complex64> = vectors[0].as_ref().to_vec();
    for v in &vectors[1..] {
        let v = v.as_ref();
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for &a in &acc {
            for &b in v {
                next.push(a * b);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Reshapes a vector into a tensor (first index fastest), so that
/// `tensorize(kron_vec([s_N, ..., s_1]), shape)` is the outer product
/// `s_1 o ... o s_N`.
pub fn tensorize(v: &[Complex64], shape: &[usize]) -> Result<DenseTensor> {
    DenseTensor::new(shape.to_vec(), v.to_vec())
}

/// Inverse of [`tensorize`] under the same layout convention.
pub fn vectorize(t: &DenseTensor) -> Vec<Complex64> {
    t.data.clone()
}

/// Rank-one outer product: `t[l_1, ..., l_N] = prod_n s_n[l_n]`.
pub fn outer_rank_one<V: AsRef<[Complex64]>>(vectors: &[V]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("outer product of an empty list".into()));
    }
    let shape: Vec<usize> = vectors.iter().map(|v| v.as_ref().len()).collect();
    let len: usize = shape.iter().product();
    let mut data = Vec::with_capacity(len);
    for flat in 0..len {
        let mut rem = flat;
        let mut prod = Complex64::new(1.0, 0.0);
        for v in vectors {
            let v = v.as_ref();
            prod *= v[rem % v.len()];
            rem /= v.len();
        }
        data.push(prod);
    }
    DenseTensor::new(shape, data)
}

fn check_mode(t: &DenseTensor, mode: usize) -> Result<usize> {
    if mode == 0 || mode > t.order() {
        return Err(Error::ModeOutOfRange {
            mode,
            order: t.order(),
        });
    }
    Ok(mode - 1)
}

/// `n`-mode unfolding: `L_n x (L / L_n)` matrix whose rows are indexed by the
/// mode-`n` index and whose columns enumerate the remaining indices, lowest
/// mode fastest.
pub fn unfold(t: &DenseTensor, mode: usize) -> Result<ComplexMatrix> {
    let n = check_mode(t, mode)?;
    let ln = t.shape[n];
    let cols = t.len() / ln;
    let stride_n: usize = t.shape[..n].iter().product();
    let mut m = ComplexMatrix::zeros(ln, cols);
    for (flat, &z) in t.data.iter().enumerate() {
        let row = (flat / stride_n) % ln;
        let mut col = 0usize;
        let mut col_stride = 1usize;
        let mut rem = flat;
        for (i, &l) in t.shape.iter().enumerate() {
            let idx = rem % l;
            rem /= l;
            if i != n {
                col += idx * col_stride;
                col_stride *= l;
            }
        }
        m.set(row, col, z);
    }
    Ok(m)
}

/// Inverse of [`unfold`] for the same column convention.
pub fn refold(m: &ComplexMatrix, shape: &[usize], mode: usize) -> Result<DenseTensor> {
    if mode == 0 || mode > shape.len() {
        return Err(Error::ModeOutOfRange {
            mode,
            order: shape.len(),
        });
    }
    let n = mode - 1;
    let len: usize = shape.iter().product();
    if m.rows() != shape[n] || m.rows() * m.cols() != len {
        return Err(Error::ShapeMismatch {
            expected: len,
            got: m.rows() * m.cols(),
        });
    }
    let stride_n: usize = shape[..n].iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    for (flat, slot) in data.iter_mut().enumerate() {
        let row = (flat / stride_n) % shape[n];
        let mut col = 0usize;
        let mut col_stride = 1usize;
        let mut rem = flat;
        for (i, &l) in shape.iter().enumerate() {
            let idx = rem % l;
            rem /= l;
            if i != n {
                col += idx * col_stride;
                col_stride *= l;
            }
        }
        *slot = m.get(row, col);
    }
    DenseTensor::new(shape.to_vec(), data)
}

/// Mode Gramian `A_n = Y_(n) Y_(n)^H`, Hermitian PSD of size `L_n x L_n` and
/// independent of the unfolding column order.
pub fn mode_gramian(t: &DenseTensor, mode: usize) -> Result<ComplexMatrix> {
    let u = unfold(t, mode)?;
    let ln = u.rows();
    let mut a = ComplexMatrix::zeros(ln, ln);
    for c in 0..u.cols() {
        let col = u.column(c);
        for j in 0..ln {
            let cj = col[j].conj();
            for i in 0..ln {
                let v = a.get(i, j) + col[i] * cj;
                a.set(i, j, v);
            }
        }
    }
    Ok(a)
}

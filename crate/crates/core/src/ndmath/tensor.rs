//! Dense 64-bit vectors and row-major matrices, plus the small linear kit
//! the recurrent cells are built on.
//!
//! Shape agreement is a programming invariant here, not an input condition:
//! kit operations panic on mismatched shapes. Fallible boundaries (parsing,
//! optimizer updates, losses) reject non-finite values with errors; the kit
//! itself guards finiteness with debug assertions.

use crate::error::{Error, Result};
use crate::ndmath::rng::{det_rng, uniform_symmetric};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor1 {
    data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl Tensor1 {
    pub fn zeros(len: usize) -> Self {
        Tensor1 { data: vec![0.0; len] }
    }

    /// Rejects non-finite elements.
    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tensor construction".into()));
        }
        Ok(Tensor1 { data })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    pub fn dot(&self, other: &Tensor1) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Concatenate `[self ; other]`.
    pub fn concat(&self, other: &Tensor1) -> Tensor1 {
        let mut data = Vec::with_capacity(self.len() + other.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Tensor1 { data }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Tensor1 {
        Tensor1 { data: self.data[range].to_vec() }
    }
}

impl std::ops::Index<usize> for Tensor1 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for Tensor1 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

impl Tensor2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor2 { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Domain(format!(
                "tensor data length {} does not match shape {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tensor construction".into()));
        }
        Ok(Tensor2 { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// `W x` — matrix-vector product.
pub fn matvec(w: &Tensor2, x: &Tensor1) -> Tensor1 {
    assert_eq!(w.cols, x.len(), "matvec: shape mismatch");
    let mut out = Tensor1::zeros(w.rows);
    for r in 0..w.rows {
        out.data[r] = w.row(r).iter().zip(&x.data).map(|(a, b)| a * b).sum();
    }
    debug_assert!(out.data.iter().all(|v| v.is_finite()));
    out
}

/// `Wᵀ y` — transposed product, the workhorse of the backward passes.
pub fn matvec_t(w: &Tensor2, y: &Tensor1) -> Tensor1 {
    assert_eq!(w.rows, y.len(), "matvec_t: shape mismatch");
    let mut out = Tensor1::zeros(w.cols);
    for r in 0..w.rows {
        let yr = y.data[r];
        for (o, wv) in out.data.iter_mut().zip(w.row(r)) {
            *o += yr * wv;
        }
    }
    debug_assert!(out.data.iter().all(|v| v.is_finite()));
    out
}

/// `W x + b`.
pub fn affine(w: &Tensor2, x: &Tensor1, b: &Tensor1) -> Tensor1 {
    assert_eq!(w.rows, b.len(), "affine: bias shape mismatch");
    let mut out = matvec(w, x);
    for (o, bv) in out.data.iter_mut().zip(&b.data) {
        *o += bv;
    }
    out
}

pub fn add(a: &Tensor1, b: &Tensor1) -> Tensor1 {
    assert_eq!(a.len(), b.len(), "add: length mismatch");
    let mut out = a.clone();
    for (o, bv) in out.data.iter_mut().zip(&b.data) {
        *o += bv;
    }
    out
}

/// `acc += a`.
pub fn add_assign(acc: &mut Tensor1, a: &Tensor1) {
    assert_eq!(acc.len(), a.len(), "add_assign: length mismatch");
    for (o, v) in acc.data.iter_mut().zip(&a.data) {
        *o += v;
    }
}

/// Elementwise product.
pub fn hadamard(a: &Tensor1, b: &Tensor1) -> Tensor1 {
    assert_eq!(a.len(), b.len(), "hadamard: length mismatch");
    let mut out = a.clone();
    for (o, bv) in out.data.iter_mut().zip(&b.data) {
        *o *= bv;
    }
    out
}

/// Rank-1 accumulation `acc += a bᵀ`.
pub fn outer_add(acc: &mut Tensor2, a: &Tensor1, b: &Tensor1) {
    assert_eq!(acc.rows, a.len(), "outer_add: row mismatch");
    assert_eq!(acc.cols, b.len(), "outer_add: col mismatch");
    for r in 0..acc.rows {
        let ar = a.data[r];
        for (o, bv) in acc.row_mut(r).iter_mut().zip(&b.data) {
            *o += ar * bv;
        }
    }
}

pub fn scale(x: &mut Tensor1, s: f64) {
    for v in &mut x.data {
        *v *= s;
    }
}

/// Seeded uniform init on [-scale, scale); `scale` must be positive.
pub fn seeded_init(rows: usize, cols: usize, scale: f64, seed: u64) -> Result<Tensor2> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Domain(format!("init scale must be positive, got {scale}")));
    }
    let mut rng = det_rng(seed);
    let mut t = Tensor2::zeros(rows, cols);
    for v in &mut t.data {
        *v = uniform_symmetric(&mut rng, scale);
    }
    Ok(t)
}

/// Same draw sequence as [`seeded_init`], continuing an existing stream.
pub fn init_from_stream(rows: usize, cols: usize, scale: f64, rng: &mut crate::ndmath::rng::DetRng) -> Result<Tensor2> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Domain(format!("init scale must be positive, got {scale}")));
    }
    let mut t = Tensor2::zeros(rows, cols);
    for v in &mut t.data {
        *v = uniform_symmetric(rng, scale);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn identity_matvec_returns_input() {
        let mut eye = Tensor2::zeros(4, 4);
        for i in 0..4 {
            *eye.at_mut(i, i) = 1.0;
        }
        let x = Tensor1::from_vec(vec![1.5, -2.0, 0.25, 9.0]).unwrap();
        assert_eq!(matvec(&eye, &x).as_slice(), x.as_slice());
    }

    #[test]
    fn zero_matvec_returns_zero() {
        let z = Tensor2::zeros(3, 5);
        let x = Tensor1::from_vec(vec![1.0; 5]).unwrap();
        assert!(matvec(&z, &x).as_slice().iter().all(|&v| v == 0.0));
    }

    // Independent scalar triple-loop transcription of every kit op, checked
    // on random instances.
    #[test]
    fn kit_matches_scalar_reimplementation() {
        let mut rng = det_rng(99);
        for trial in 0..5 {
            let n = 50;
            let w = init_from_stream(n, n, 1.0, &mut rng).unwrap();
            let x = init_from_stream(1, n, 1.0, &mut rng).unwrap();
            let y = init_from_stream(1, n, 1.0, &mut rng).unwrap();
            let x = Tensor1::from_vec(x.as_slice().to_vec()).unwrap();
            let y = Tensor1::from_vec(y.as_slice().to_vec()).unwrap();

            let got = matvec(&w, &x);
            for r in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    acc += w.at(r, c) * x[c];
                }
                assert!(close(got[r], acc, 1e-14), "matvec trial {trial} row {r}");
            }

            let got_t = matvec_t(&w, &y);
            for c in 0..n {
                let mut acc = 0.0;
                for r in 0..n {
                    acc += w.at(r, c) * y[r];
                }
                assert!(close(got_t[c], acc, 1e-14), "matvec_t trial {trial} col {c}");
            }

            let had = hadamard(&x, &y);
            for i in 0..n {
                assert_eq!(had[i], x[i] * y[i]);
            }

            let mut outer = Tensor2::zeros(n, n);
            outer_add(&mut outer, &x, &y);
            for r in 0..n {
                for c in 0..n {
                    assert_eq!(outer.at(r, c), x[r] * y[c]);
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "matvec: shape mismatch")]
    fn matvec_rejects_bad_shapes() {
        let w = Tensor2::zeros(2, 3);
        let x = Tensor1::zeros(4);
        let _ = matvec(&w, &x);
    }

    #[test]
    fn seeded_init_rejects_zero_scale() {
        assert!(seeded_init(2, 2, 0.0, 1).is_err());
        assert!(seeded_init(2, 2, -0.5, 1).is_err());
    }

    #[test]
    fn seeded_init_respects_bound() {
        let t = seeded_init(10, 10, 1e-9, 3).unwrap();
        assert!(t.as_slice().iter().all(|v| v.abs() <= 1e-9));
    }

    #[test]
    fn seeded_init_is_bitwise_repeatable() {
        let a = seeded_init(17, 23, 0.1, 1234).unwrap();
        let b = seeded_init(17, 23, 0.1, 1234).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seeded_init_mean_is_near_zero() {
        let t = seeded_init(1000, 1000, 0.1, 5).unwrap();
        let mean: f64 = t.as_slice().iter().sum::<f64>() / 1e6;
        assert!(mean.abs() < 1e-3, "mean {mean}");
    }

    #[test]
    fn from_vec_rejects_non_finite() {
        assert!(Tensor1::from_vec(vec![1.0, f64::NAN]).is_err());
        assert!(Tensor2::from_vec(1, 2, vec![f64::INFINITY, 0.0]).is_err());
    }
}

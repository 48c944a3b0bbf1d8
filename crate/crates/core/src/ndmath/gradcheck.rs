//! Central finite differences — the independent oracle the hand-derived
//! backward passes are checked against.

use crate::error::{Error, Result};
use crate::ndmath::tensor::Tensor1;

/// Central-difference gradient of a scalar field: one (f(x+h e_i) - f(x-h e_i)) / 2h
/// per coordinate. Errors if `h <= 0` or the field produces a non-finite value.
pub fn finite_diff_grad<F>(mut f: F, x: &Tensor1, h: f64) -> Result<Tensor1>
where
    F: FnMut(&Tensor1) -> f64,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("finite difference step must be positive, got {h}")));
    }
    let mut grad = Tensor1::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f(&probe);
        probe[i] = orig - h;
        let fm = f(&probe);
        probe[i] = orig;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFinite("finite-difference oracle sample".into()));
        }
        grad[i] = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

/// Relative disagreement used by all gradient checks:
/// |a - b| / max(|a|, |b|, 1e-8).
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

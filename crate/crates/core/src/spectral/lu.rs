use crate::matrix::{CMat, C64, ONE, ZERO};

/// Running product of squared moduli, kept as `mantissa * exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SquaredModulusProduct {
    mantissa: f64,
    log_scale: f64,
}

impl SquaredModulusProduct {
    const HI: f64 = 1e200;
    const LO: f64 = 1e-200;

    pub(crate) fn new() -> Self {
        Self {
            mantissa: 1.0,
            log_scale: 0.0,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, modulus_sq: f64) {
        self.mantissa *= modulus_sq;
        if !(Self::LO..=Self::HI).contains(&self.mantissa) && self.mantissa != 0.0 {
            self.log_scale += self.mantissa.ln();
            self.mantissa = 1.0;
        }
    }

    /// `log` of the product of the moduli (not squared).
    pub(crate) fn log_modulus(&self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            0.5 * (self.log_scale + self.mantissa.ln())
        }
    }
}

/// Gaussian elimination with partial pivoting. Returns the pivots and whether
/// an odd number of row swaps happened. A column with no nonzero candidate
/// yields a zero pivot and is skipped.
fn lu_pivots(m: &CMat) -> (Vec<C64>, bool) {
    let n = m.nrows();
    assert!(m.is_square(), "LU needs a square matrix");
    let mut a = m.data().to_vec();
    let mut pivots = Vec::with_capacity(n);
    let mut odd = false;
    for k in 0..n {
        let (mut best, mut best_abs) = (k, a[k * n + k].norm_sqr());
        for r in k + 1..n {
            let v = a[r * n + k].norm_sqr();
            if v > best_abs {
                best = r;
                best_abs = v;
            }
        }
        if best_abs == 0.0 {
            pivots.push(ZERO);
            continue;
        }
        if best != k {
            for j in 0..n {
                a.swap(k * n + j, best * n + j);
            }
            odd = !odd;
        }
        let p = a[k * n + k];
        pivots.push(p);
        let inv = ONE / p;
        for r in k + 1..n {
            let l = a[r * n + k] * inv;
            if l == ZERO {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                a[r * n + j] -= l * u;
            }
        }
    }
    (pivots, odd)
}

/// `log|det M|` as the sum of log pivot moduli; `-inf` for singular input.
pub fn log_abs_det(m: &CMat) -> f64 {
    let (pivots, _) = lu_pivots(m);
    let mut acc = SquaredModulusProduct::new();
    for p in pivots {
        acc.push(p.norm_sqr());
    }
    acc.log_modulus()
}

pub fn determinant(m: &CMat) -> C64 {
    let (pivots, odd) = lu_pivots(m);
    let prod: C64 = pivots.into_iter().product();
    if odd {
        -prod
    } else {
        prod
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) integrator for matrix-valued ODEs dY/dt = f(t, Y).

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug)]
pub(crate) struct DormandPrince {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl DormandPrince {
    /// Integrates from `t0` to `t1`, updating `y` in place. `h0` is the
    /// first trial step. Returns the number of accepted steps.
    pub fn integrate<F>(&self, mut f: F, t0: f64, t1: f64, y: &mut Matrix, h0: f64) -> Result<usize>
    where
        F: FnMut(f64, &Matrix) -> Matrix,
    {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(0);
        }
        let mut t = t0;
        let mut h = h0.min(span).max(span * 1e-12);
        let mut k1 = f(t, y);
        let mut accepted = 0usize;
        let mut attempts = 0usize;
        while t < t1 {
            attempts += 1;
            if attempts > self.max_steps {
                return Err(Error::ToleranceNotAchieved {
                    rel_tol: self.rel_tol,
                    max_steps: self.max_steps,
                });
            }
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            let y2 = combo(Some(y), h, &[(A21, &k1)]);
            let k2 = f(t + C2 * h, &y2);
            let y3 = combo(Some(y), h, &[(A31, &k1), (A32, &k2)]);
            let k3 = f(t + C3 * h, &y3);
            let y4 = combo(Some(y), h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = f(t + C4 * h, &y4);
            let y5 = combo(
                Some(y),
                h,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            );
            let k5 = f(t + C5 * h, &y5);
            let y6 = combo(
                Some(y),
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = f(t + h, &y6);
            let y_new = combo(
                Some(y),
                h,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let k7 = f(t + h, &y_new);
            let err = combo(
                None,
                h,
                &[
                    (E1, &k1),
                    (E3, &k3),
                    (E4, &k4),
                    (E5, &k5),
                    (E6, &k6),
                    (E7, &k7),
                ],
            );

            let mut ratio = 0.0_f64;
            for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
                let scale = self.abs_tol + self.rel_tol * a.norm().max(b.norm());
                ratio = ratio.max(e.norm() / scale);
            }

            if ratio <= 1.0 {
                t = if last { t1 } else { t + h };
                *y = y_new;
                k1 = k7;
                accepted += 1;
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= if ratio <= 1.0 {
                factor
            } else {
                factor.min(1.0)
            };
            if h <= span * 1e-14 {
                return Err(Error::ToleranceNotAchieved {
                    rel_tol: self.rel_tol,
                    max_steps: self.max_steps,
                });
            }
        }
        Ok(accepted)
    }
}

/// `base + h·Σ c_k·k_k`, or just the sum when `base` is `None`.
fn combo(base: Option<&Matrix>, h: f64, terms: &[(f64, &Matrix)]) -> Matrix {
    let mut out = match base {
        Some(b) => b.clone(),
        None => Matrix::zeros(terms[0].1.nrows(), terms[0].1.ncols()),
    };
    for &(c, k) in terms {
        out += k * C64::from(h * c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn exponential_growth_and_rotation() {
        // dy/dt = λ y for a 1×1 complex "matrix".
        let lam = C64::new(-0.3, 2.0);
        let mut y = Matrix::from_element(1, 1, C64::new(1.0, 0.0));
        let dp = DormandPrince {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_steps: 100_000,
        };
        dp.integrate(|_, y| y * lam, 0.0, 3.0, &mut y, 1e-3)
            .unwrap();
        let exact = (lam * 3.0).exp();
        assert!((y[(0, 0)] - exact).norm() < 1e-9);
    }

    #[test]
    fn step_budget_exhausted() {
        let mut y = Matrix::from_element(1, 1, C64::new(1.0, 0.0));
        let dp = DormandPrince {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 5,
        };
        let r = dp.integrate(|_, y| y * C64::new(0.0, 50.0), 0.0, 10.0, &mut y, 1e-3);
        assert!(matches!(r, Err(Error::ToleranceNotAchieved { .. })));
    }
}

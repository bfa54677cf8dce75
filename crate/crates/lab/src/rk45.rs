//! Adaptive Dormand-Prince 5(4) integrator on complex state vectors.

use num_traits::Float;

use crate::{cast, LabError, Result, C};

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub hmin: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const CN: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy<T: Float>(y: &[C<T>], ks: &[Vec<C<T>>], w: &[f64], h: T) -> Vec<C<T>> {
    let mut out = y.to_vec();
    for (k, &wi) in ks.iter().zip(w) {
        if wi != 0.0 {
            let c = h * cast::<T>(wi);
            for (o, ki) in out.iter_mut().zip(k) {
                *o = *o + ki * c;
            }
        }
    }
    out
}

/// Integrates `dy/dv = f(v, y)` from `v0` to `v1 > v0`.
pub fn integrate<T, F>(mut f: F, v0: T, v1: T, y0: Vec<C<T>>, tol: Tolerances, stats: &mut Stats) -> Result<Vec<C<T>>>
where
    T: Float,
    F: FnMut(T, &[C<T>]) -> Result<Vec<C<T>>>,
{
    let rtol = cast::<T>(tol.rtol);
    let atol = cast::<T>(tol.atol);
    let hmin = cast::<T>(tol.hmin);
    let mut v = v0;
    let mut y = y0;
    let mut h = (v1 - v0) * cast(0.01);
    let mut k0 = f(v, &y)?;
    while v < v1 {
        if v + h > v1 {
            h = v1 - v;
        }
        let mut ks = vec![k0.clone()];
        for s in 0..6 {
            let ys = axpy(&y, &ks, &A[s], h);
            ks.push(f(v + h * cast(CN[s + 1]), &ys)?);
        }
        let y5 = axpy(&y, &ks[..6], &A[5], h);
        let err_vec = axpy(&vec![C::new(T::zero(), T::zero()); y.len()], &ks, &E, h);
        let scale = y.iter().chain(&y5).map(|z| z.norm()).fold(T::zero(), T::max);
        let err = err_vec.iter().map(|z| z.norm()).fold(T::zero(), T::max) / (atol + rtol * scale);
        let fac = if err.is_zero() {
            cast(5.0)
        } else {
            (cast::<T>(0.9) * err.powf(cast(-0.2))).max(cast(0.2)).min(cast(5.0))
        };
        if err <= T::one() {
            v = v + h;
            y = y5;
            k0 = ks.pop().unwrap();
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        if !err.is_finite() {
            h = h * cast(0.2);
        } else {
            h = h * fac;
        }
        if h < hmin && v < v1 && v1 - v > hmin {
            return Err(LabError::StepCollapse { v: v.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_rotation() {
        let tol = Tolerances { rtol: 1e-10, atol: 1e-14, hmin: 1e-14 };
        let mut st = Stats::default();
        let y = integrate(|_, y: &[C<f64>]| Ok(vec![y[0], y[1] * C::new(0.0, 1.0)]), 0.0, 1.0, vec![C::new(1.0, 0.0); 2], tol, &mut st)
            .unwrap();
        assert!((y[0].re - 1f64.exp()).abs() < 1e-8);
        assert!((y[1] - C::new(1f64.cos(), 1f64.sin())).norm() < 1e-9);
        assert!(st.accepted > 0);
    }

    #[test]
    fn collapse_is_reported() {
        let tol = Tolerances { rtol: 1e-10, atol: 1e-14, hmin: 1e-6 };
        let mut st = Stats::default();
        // y' = 1 / (0.5 - v) blows up inside the interval
        let r = integrate(|v: f64, _: &[C<f64>]| Ok(vec![C::new(1.0 / (0.5 - v), 0.0)]), 0.0, 1.0, vec![C::new(0.0, 0.0)], tol, &mut st);
        assert!(matches!(r, Err(LabError::StepCollapse { .. })));
    }
}

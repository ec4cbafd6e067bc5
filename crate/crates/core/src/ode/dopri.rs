//! Dormand-Prince 5(4) with PI step-size control and cubic Hermite dense output.

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One accepted step, enough to interpolate anywhere inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dense<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Dense<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = h00 * self.y0[i] + h * h10 * self.f0[i] + h01 * self.y1[i] + h * h11 * self.f1[i];
        }
        out
    }

    pub fn deriv(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = d00 * self.y0[i] + d10 * self.f0[i] + d01 * self.y1[i] + d11 * self.f1[i];
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_min: f64,
}

pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Finish {
    /// reached t_end
    Reached,
    /// callback asked to stop
    Stopped,
    /// derivative undefined or step size underflow at this t
    Failed(f64),
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// A single Dormand-Prince step from `(t, y)` with derivative `f0`.
/// Returns the 5th order solution and the embedded error estimate.
pub fn step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    h: f64,
) -> Option<([f64; N], [f64; N], [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
{
    let k1 = *f0;
    let k2 = rhs(t + C2 * h, &axpy(y, h, &[(A21, &k1)]))?;
    let k3 = rhs(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
    let k4 = rhs(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = rhs(
        t + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = rhs(
        t + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y1 = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = rhs(t + h, &y1)?;
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Some((y1, k7, err))
}

fn err_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: &Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Adaptive integration from `t0` towards `t_end`. Every accepted step is handed to
/// `on_step`; returns how the run ended, the last accepted step size and the final state.
pub fn solve<const N: usize, F, C>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    h_init: f64,
    tol: &Tolerances,
    mut on_step: C,
) -> (Finish, f64, f64, [f64; N])
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
    C: FnMut(&Dense<N>) -> Flow,
{
    const SAFETY: f64 = 0.9;
    const BETA: f64 = 0.04;
    let expo = 0.2 - 0.75 * BETA;

    let mut t = t0;
    let mut y = y0;
    let mut f = match rhs(t, &y) {
        Some(f) => f,
        None => return (Finish::Failed(t), h_init, t, y),
    };
    let mut h = h_init.min(tol.h_max).min(t_end - t);
    let mut err_old: f64 = 1e-4;
    let mut last_reject = false;

    while t < t_end {
        if h < tol.h_min {
            return (Finish::Failed(t), h, t, y);
        }
        let h_try = h.min(t_end - t);
        let Some((y1, f1, err)) = step(&mut rhs, t, &y, &f, h_try) else {
            h = h_try * 0.25;
            last_reject = true;
            continue;
        };
        let e = err_norm(&err, &y, &y1, tol);
        if !e.is_finite() {
            h = h_try * 0.25;
            last_reject = true;
            continue;
        }
        if e <= 1.0 {
            let fac = (e.max(1e-10).powf(expo) / err_old.powf(BETA)) / SAFETY;
            let mut h_new = h_try / fac.clamp(0.2, 10.0);
            if last_reject {
                h_new = h_new.min(h_try);
            }
            err_old = e.max(1e-4);
            let t1 = if t_end - (t + h_try) <= 1e-14 * t_end.abs().max(1.0) { t_end } else { t + h_try };
            let dense = Dense { t0: t, t1, y0: y, y1, f0: f, f1 };
            t = t1;
            y = y1;
            f = f1;
            h = h_new.min(tol.h_max);
            last_reject = false;
            if let Flow::Stop = on_step(&dense) {
                return (Finish::Stopped, h, t, y);
            }
        } else {
            let fac = (e.powf(expo) / SAFETY).min(5.0);
            h = h_try / fac;
            last_reject = true;
        }
    }
    (Finish::Reached, h, t, y)
}

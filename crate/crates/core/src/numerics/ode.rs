//! Adaptive Dormand–Prince 5(4) integrator with event location.

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, h_init: 1e-3, h_min: 1e-14, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Reached,
    Event(usize),
    StepUnderflow,
    MaxSteps,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const D: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; D]>,
    pub termination: Termination,
}

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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], terms: &[(f64, &[f64; D])], h: f64) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// One Dormand–Prince step: returns (y_new, error_norm, f(y_new)).
fn step<const D: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; D],
    k1: &[f64; D],
    h: f64,
    opts: &OdeOptions,
) -> ([f64; D], f64, [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k2 = f(t + C2 * h, &axpy(y, &[(A21, k1)], h));
    let k3 = f(t + C3 * h, &axpy(y, &[(A31, k1), (A32, &k2)], h));
    let k4 = f(t + C4 * h, &axpy(y, &[(A41, k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(t + C5 * h, &axpy(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
    let k6 = f(
        t + h,
        &axpy(y, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
    );
    let y_new = axpy(y, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
    let k7 = f(t + h, &y_new);
    let mut err = 0.0;
    for i in 0..D {
        let e = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        err += (e / sc) * (e / sc);
    }
    (y_new, (err / D as f64).sqrt(), k7)
}

/// Integrates y' = f(t, y) from t0 to t_end. Each event function g_j(y) stops
/// the integration when it changes sign; the crossing is located by bisection
/// on the step length.
pub fn dopri5<const D: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &OdeOptions,
    events: &[&dyn Fn(&[f64; D]) -> f64],
) -> OdeSolution<D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = opts.h_init.min(t_end - t0);
    let mut sol = OdeSolution { t: vec![t], y: vec![y], termination: Termination::Reached };
    let mut steps = 0;
    while t < t_end {
        if steps >= opts.max_steps {
            sol.termination = Termination::MaxSteps;
            return sol;
        }
        steps += 1;
        h = h.min(t_end - t);
        let (y_new, err, k7) = step(&f, t, &y, &k1, h, opts);
        let finite = y_new.iter().all(|v| v.is_finite()) && err.is_finite();
        if !finite || err > 1.0 {
            let fac = if finite { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.25 };
            h *= fac;
            if h < opts.h_min {
                sol.termination =
                    if finite { Termination::StepUnderflow } else { Termination::NonFinite };
                return sol;
            }
            continue;
        }
        if let Some(j) = events.iter().position(|g| g(&y).signum() != g(&y_new).signum()) {
            let g = events[j];
            let s0 = g(&y).signum();
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                let (ym, _, _) = step(&f, t, &y, &k1, m, opts);
                if g(&ym).signum() == s0 {
                    lo = m;
                } else {
                    hi = m;
                }
                if hi - lo < 1e-15 * (1.0 + t.abs()) {
                    break;
                }
            }
            let (y_lo, _, _) = step(&f, t, &y, &k1, lo, opts);
            if lo > 0.0 {
                sol.t.push(t + lo);
                sol.y.push(y_lo);
            }
            sol.termination = Termination::Event(j);
            return sol;
        }
        t += h;
        y = y_new;
        k1 = k7;
        sol.t.push(t);
        sol.y.push(y);
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    sol
}

//! Traveling-wave analysis for the modified Buckley-Leverett flux.
//!
//! A traveling wave u(x - st) connecting an upper state b to a lower state a
//! satisfies, after one integration and the rescaling
//! zeta = (x - st) / (eps sqrt(s tau)), W = eps sqrt(s tau) u', the
//! planar system
//!
//! ```text
//! u' = W,    W' = s (u - a) - (F(u) - F(a)) + W / sqrt(s tau),
//! ```
//!
//! which is independent of eps. Both endpoints are saddles when
//! s - F'(endpoint) > 0, so a connection exists only at isolated states.
//! The connecting state is found by shooting from the upper saddle along
//! its unstable manifold and bisecting on the topological dichotomy
//! "trajectory crosses u = a with W < 0" versus "W turns back first".
//! The plateau height solves for the upper state with a fixed lower state;
//! the basin height solves for the lower state with a fixed upper one
//! (time-reversed wave, which flips the damping sign).

use crate::error::{Error, Result};
use crate::problem::FluxFunction;
use std::fmt;

pub const DEFAULT_EPSILON: f64 = 1e-3;
const SHOOT_SPAN: f64 = 200.0;
const SHOOT_DELTA: f64 = 1e-6;
const SCAN_POINTS: usize = 200;
const BISECT_TOL: f64 = 1e-7;

/// Bifurcation regions of the block initial-value problem: A1/A2 form a
/// plateau-topped profile (classical/with overshoot), B an overshoot
/// plateau above the block level, C a classical profile with no overshoot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    A1,
    A2,
    B,
    C,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::A1 => "A1",
            Region::A2 => "A2",
            Region::B => "B",
            Region::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TwQuery {
    pub tau: f64,
    pub u0: f64,
    pub u_b: f64,
    pub epsilon: f64,
}

impl TwQuery {
    pub fn new(tau: f64, u0: f64, u_b: f64) -> Self {
        TwQuery {
            tau,
            u0,
            u_b,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) {
            return Err(Error::config("tau must be >= 0"));
        }
        if !(self.u_b > self.u0) {
            return Err(Error::config("block state must exceed background state"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TwResult {
    pub region: Region,
    pub u_alpha: f64,
    pub ubar: Option<f64>,
    pub u_lower: Option<f64>,
    /// Labeled wave speeds of the predicted profile, left to right.
    pub speeds: Vec<(&'static str, f64)>,
}

/// Rankine-Hugoniot speed of the jump between two states.
pub fn rh_speed(u_minus: f64, u_plus: f64, flux: &FluxFunction) -> Result<f64> {
    if u_minus == u_plus {
        return Err(Error::config("degenerate jump: equal states"));
    }
    Ok((flux.value(u_plus) - flux.value(u_minus)) / (u_plus - u_minus))
}

/// Tangency state: the root of F'(u) (u - u0) = F(u) - F(u0) in (u0, 1],
/// where the chord from u0 touches the flux graph.
pub fn u_alpha(u0: f64, flux: &FluxFunction) -> Result<f64> {
    let g = |u: f64| flux.derivative(u) * (u - u0) - (flux.value(u) - flux.value(u0));
    let lo0 = u0 + 1e-6;
    let n = 1000;
    let mut lo = lo0;
    let mut glo = g(lo);
    let mut hi = lo;
    let mut found = false;
    for i in 1..=n {
        hi = lo0 + (1.0 - lo0) * i as f64 / n as f64;
        let ghi = g(hi);
        if glo * ghi <= 0.0 && glo != ghi {
            found = true;
            break;
        }
        lo = hi;
        glo = ghi;
    }
    if !found {
        return Err(Error::solver("no tangency root bracketed in (u0, 1]"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of the chord equality (F(u)-F(u0))/(u-u0) = (F(ubar)-F(u0))/(ubar-u0)
/// strictly between u0 and ubar.
pub fn chord_lower_bound(u0: f64, ubar: f64, flux: &FluxFunction) -> Result<f64> {
    let s = rh_speed(u0, ubar, flux)?;
    let g = |u: f64| flux.value(u) - flux.value(u0) - s * (u - u0);
    let mut lo = u0 + 1e-9;
    let mut hi = ubar - 1e-9;
    // g vanishes at both endpoints of the chord; the interior root is
    // bracketed by scanning for the sign change.
    let n = 2000;
    let mut found = false;
    let mut glo = g(lo);
    for i in 1..=n {
        let u = u0 + 1e-9 + (ubar - u0 - 2e-9) * i as f64 / n as f64;
        let gu = g(u);
        if glo * gu < 0.0 {
            hi = u;
            found = true;
            break;
        }
        lo = u;
        glo = gu;
    }
    if !found {
        return Err(Error::solver("no chord-equality root between u0 and ubar"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// Trajectory crossed u = a with W still negative.
    Cross,
    /// W returned to zero before reaching u = a.
    Turn,
    /// No saddle at the upper state, nonpositive speed, or no event.
    Undecided,
}

/// One adaptive Dormand-Prince step; returns (error_norm, y_new).
fn dopri_step(
    f: impl Fn(f64, [f64; 2]) -> [f64; 2] + Copy,
    t: f64,
    y: [f64; 2],
    h: f64,
) -> (f64, [f64; 2]) {
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];
    let mut k = [[0.0f64; 2]; 7];
    k[0] = f(t, y);
    for i in 0..6 {
        let mut yi = y;
        for j in 0..=i {
            yi[0] += h * A[i][j] * k[j][0];
            yi[1] += h * A[i][j] * k[j][1];
        }
        k[i + 1] = f(t + C[i] * h, yi);
    }
    // Fifth-order solution uses the last A row (FSAL layout).
    let mut y5 = y;
    for j in 0..6 {
        y5[0] += h * A[5][j] * k[j][0];
        y5[1] += h * A[5][j] * k[j][1];
    }
    let mut err = [0.0f64; 2];
    for j in 0..7 {
        err[0] += h * E[j] * k[j][0];
        err[1] += h * E[j] * k[j][1];
    }
    let rtol = 1e-10;
    let atol = 1e-12;
    let mut norm = 0.0f64;
    for i in 0..2 {
        let scale = atol + rtol * y[i].abs().max(y5[i].abs());
        norm = norm.max((err[i] / scale).abs());
    }
    (norm, y5)
}

/// Shoot from the saddle at the upper state `b` along the descending branch
/// of its unstable manifold; `sign` = +1 integrates the wave profile toward
/// the lower state at +infinity, -1 the time-reversed profile.
fn shoot(a: f64, b: f64, tau: f64, sign: f64, delta: f64, flux: &FluxFunction) -> Outcome {
    let s = match rh_speed(a, b, flux) {
        Ok(s) if s > 0.0 => s,
        _ => return Outcome::Undecided,
    };
    let q = s - flux.derivative(b);
    if q <= 0.0 || tau <= 0.0 {
        return Outcome::Undecided;
    }
    let damp = sign / (s * tau).sqrt();
    let lam_p = 0.5 * (damp + (damp * damp + 4.0 * q).sqrt());
    let norm = (1.0 + lam_p * lam_p).sqrt();
    let mut y = [b - delta / norm, -delta * lam_p / norm];
    let fa = flux.value(a);
    let f = move |_t: f64, y: [f64; 2]| -> [f64; 2] {
        [y[1], s * (y[0] - a) - (flux.value(y[0]) - fa) + damp * y[1]]
    };

    let mut t = 0.0;
    let mut h = 1e-3f64;
    let h_max = 1.0;
    let h_min = 1e-12;
    while t < SHOOT_SPAN {
        h = h.min(SHOOT_SPAN - t).min(h_max);
        let (err, y_new) = dopri_step(f, t, y, h);
        if err <= 1.0 {
            // Event checks on the accepted step, earliest first.
            let cross_frac = if y[0] > a && y_new[0] <= a {
                Some((y[0] - a) / (y[0] - y_new[0]))
            } else {
                None
            };
            let turn_frac = if y[1] < 0.0 && y_new[1] >= 0.0 {
                Some(y[1] / (y[1] - y_new[1]))
            } else {
                None
            };
            match (cross_frac, turn_frac) {
                (Some(c), Some(w)) => {
                    return if c <= w { Outcome::Cross } else { Outcome::Turn }
                }
                (Some(_), None) => return Outcome::Cross,
                (None, Some(_)) => return Outcome::Turn,
                (None, None) => {}
            }
            t += h;
            y = y_new;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < h_min {
            return Outcome::Undecided;
        }
    }
    Outcome::Undecided
}

/// Scan `eval` over [lo, hi] for the first adjacent pair with opposite
/// decided outcomes, then bisect the dichotomy down to `BISECT_TOL`.
fn scan_bisect(lo: f64, hi: f64, eval: impl Fn(f64) -> Outcome) -> Result<f64> {
    let mut prev = lo;
    let mut prev_out = eval(lo);
    let mut bracket = None;
    for i in 1..=SCAN_POINTS {
        let x = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let out = eval(x);
        if out != prev_out
            && out != Outcome::Undecided
            && prev_out != Outcome::Undecided
        {
            bracket = Some((prev, prev_out, x));
            break;
        }
        prev = x;
        prev_out = out;
    }
    let (mut lo, lo_out, mut hi) =
        bracket.ok_or_else(|| Error::solver("no traveling-wave connection in bracket"))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let out = eval(mid);
        if out == lo_out {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < BISECT_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn plateau_ubar_with_delta(
    tau: f64,
    u0: f64,
    delta: f64,
    flux: &FluxFunction,
) -> Result<f64> {
    let ua = u_alpha(u0, flux)?;
    scan_bisect(ua + 1e-4, 1.0 - 1e-6, |b| {
        shoot(u0, b, tau, 1.0, delta, flux)
    })
}

/// Plateau height: the upper state admitting a wave down to the background
/// state u0. The epsilon argument is validated but does not influence the
/// result; the rescaled shooting system is epsilon-free.
pub fn plateau_ubar(tau: f64, u0: f64, epsilon: f64, flux: &FluxFunction) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::config("epsilon must be > 0"));
    }
    if !(tau > 0.0) {
        return Err(Error::solver("no traveling-wave connection for tau = 0"));
    }
    plateau_ubar_with_delta(tau, u0, SHOOT_DELTA, flux)
}

/// Basin height: the lower state whose wave up to the fixed upper state
/// exists, found on the time-reversed profile (flipped damping).
pub fn u_lower(tau: f64, u0: f64, u_upper: f64, flux: &FluxFunction) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::solver("no traveling-wave connection for tau = 0"));
    }
    scan_bisect(u0 + 1e-6, u_upper - 1e-4, |a| {
        shoot(a, u_upper, tau, -1.0, SHOOT_DELTA, flux)
    })
}

/// Threshold tau below which no plateau connection exists, bisected to 1e-3.
pub fn tau_star(u0: f64, epsilon: f64, flux: &FluxFunction) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::config("epsilon must be > 0"));
    }
    let ua = u_alpha(u0, flux)?;
    let has_plateau = |tau: f64| -> bool {
        matches!(plateau_ubar_with_delta(tau, u0, SHOOT_DELTA, flux),
                 Ok(ub) if ub > ua + 1e-4)
    };
    let mut lo = 1e-4;
    let mut hi = 20.0;
    if has_plateau(lo) || !has_plateau(hi) {
        return Err(Error::solver("plateau predicate constant over tau bracket"));
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if has_plateau(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Predict the wave structure for a block of height u_b over background u0.
pub fn classify_region(u_b: f64, tau: f64, u0: f64, flux: &FluxFunction) -> Result<TwResult> {
    TwQuery::new(tau, u0, u_b).validate()?;
    let ua = u_alpha(u0, flux)?;
    let ubar = if tau > 0.0 {
        plateau_ubar_with_delta(tau, u0, SHOOT_DELTA, flux).ok()
    } else {
        None
    };
    let mut speeds: Vec<(&'static str, f64)> = Vec::new();
    let result = match ubar {
        None => {
            // No overshoot plateau: classical Buckley-Leverett profile.
            if u_b > ua {
                speeds.push(("leading_lax", rh_speed(ua, u0, flux)?));
                (Region::A1, None)
            } else {
                speeds.push(("leading_lax", rh_speed(u_b, u0, flux)?));
                (Region::C, None)
            }
        }
        Some(ub) => {
            if u_b > ub {
                let low = u_lower(tau, u0, u_b, flux).ok();
                push_trailing(&mut speeds, low, u0, u_b, flux)?;
                speeds.push(("leading_undercompressive", rh_speed(ub, u0, flux)?));
                (Region::A2, low)
            } else {
                let chord = chord_lower_bound(u0, ub, flux)?;
                if u_b > chord {
                    let low = u_lower(tau, u0, u_b, flux).ok();
                    push_trailing(&mut speeds, low, u0, u_b, flux)?;
                    if u_b < ub {
                        speeds.push(("leading_lax", rh_speed(u_b, ub, flux)?));
                    }
                    speeds.push(("leading_undercompressive", rh_speed(ub, u0, flux)?));
                    (Region::B, low)
                } else {
                    speeds.push(("leading_lax", rh_speed(u_b, u0, flux)?));
                    (Region::C, None)
                }
            }
        }
    };
    Ok(TwResult {
        region: result.0,
        u_alpha: ua,
        ubar,
        u_lower: result.1,
        speeds,
    })
}

fn push_trailing(
    speeds: &mut Vec<(&'static str, f64)>,
    low: Option<f64>,
    u0: f64,
    u_b: f64,
    flux: &FluxFunction,
) -> Result<()> {
    match low {
        Some(lv) => {
            speeds.push(("rarefaction_edge", flux.derivative(lv)));
            speeds.push(("trailing_undercompressive", rh_speed(lv, u_b, flux)?));
        }
        None => speeds.push(("trailing_lax", rh_speed(u0, u_b, flux)?)),
    }
    Ok(())
}

//! Confluent hypergeometric U(a, b, z) and the Whittaker function W_{κ,μ}(z)
//! for real parameters and z > 0.
//!
//! Evaluation routes, tried in order:
//! - terminating 2F0 when a or a − b + 1 is a nonpositive integer;
//! - Miller backward recurrence on U(a + n, b, z) for z ≥ 0.5;
//! - the small-z log series for integer b, or the M-combination otherwise;
//! - the Laplace integral when b is within `NEAR_INTEGER` of an integer.
//!
//! Internally everything is carried as (ln |U|, sign) so Whittaker values
//! stay representable when U itself would overflow.

use super::gamma::{digamma, ln_gamma, ln_gamma_signed};
use super::SpecFunResult;
use crate::error::{Error, Result};
use crate::quad::{integrate_half_line, QuadOptions};

const EPS: f64 = 1e-16;
const MILLER_MIN_Z: f64 = 0.5;
const NEAR_INTEGER: f64 = 1e-3;
const SERIES_MAX_TERMS: usize = 10_000;
const MILLER_MAX_DEPTH: usize = 1 << 22;
/// Rounding jitter of the long recurrence is a few parts in 1e15.
const MILLER_TOL: f64 = 1e-13;
/// Largest Σ|g_n| / |Σ g_n| the Miller normalisation may carry.
const MILLER_MAX_CANCEL: f64 = 16.0;

#[derive(Debug, Clone, Copy)]
struct LogValue {
    ln_abs: f64,
    sign: f64,
    converged: bool,
    terms: usize,
}

impl LogValue {
    fn from_value(v: f64, converged: bool, terms: usize) -> Self {
        LogValue {
            ln_abs: v.abs().ln(),
            sign: if v < 0.0 { -1.0 } else { 1.0 },
            converged,
            terms,
        }
    }

    fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Tricomi's confluent hypergeometric function U(a, b, z), z > 0.
pub fn hypergeometric_u(a: f64, b: f64, z: f64) -> Result<SpecFunResult> {
    let u = ln_u(a, b, z)?;
    Ok(SpecFunResult::new(u.value(), u.converged, u.terms))
}

/// Whittaker W_{κ,μ}(z) = e^{−z/2} z^{μ+1/2} U(μ − κ + 1/2, 1 + 2μ, z).
pub fn whittaker_w(kappa: f64, mu: f64, z: f64) -> Result<SpecFunResult> {
    let w = ln_w_scaled(kappa, mu, z)?;
    let v = w.sign * (w.ln_abs - 0.5 * z).exp();
    Ok(SpecFunResult::new(v, w.converged, w.terms))
}

/// ln( e^{z/2} W_{κ,μ}(z) ). Errors when W is not positive.
pub fn ln_whittaker_w_scaled(kappa: f64, mu: f64, z: f64) -> Result<SpecFunResult> {
    let w = ln_w_scaled(kappa, mu, z)?;
    if w.sign < 0.0 || w.ln_abs == f64::NEG_INFINITY {
        return Err(Error::domain(
            "ln_whittaker_w_scaled",
            format!("W_{{{kappa},{mu}}}({z}) is not positive"),
        ));
    }
    Ok(SpecFunResult::new(w.ln_abs, w.converged, w.terms))
}

fn ln_w_scaled(kappa: f64, mu: f64, z: f64) -> Result<LogValue> {
    check_args("whittaker_w", &[kappa, mu], z)?;
    // W is even in μ
    let mu = mu.abs();
    let mut u = ln_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, z)?;
    u.ln_abs += (mu + 0.5) * z.ln();
    Ok(u)
}

fn check_args(function: &'static str, params: &[f64], z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(function, format!("z = {z} must be finite and > 0")));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain(function, format!("parameters {params:?} must be finite")));
    }
    Ok(())
}

fn nonpositive_integer(x: f64) -> Option<u64> {
    (x <= 0.0 && x == x.round()).then(|| (-x) as u64)
}

fn ln_u(a: f64, b: f64, z: f64) -> Result<LogValue> {
    check_args("hypergeometric_u", &[a, b], z)?;
    let c = a - b + 1.0;
    if let Some(n) = nonpositive_integer(a).or(nonpositive_integer(c)) {
        return Ok(terminating(a, c, z, n));
    }
    if z >= MILLER_MIN_Z {
        return miller(a, b, z);
    }
    // Kummer: U(a, b, z) = z^{1−b} U(c, 2 − b, z), so b ≥ 1 below.
    if b < 1.0 {
        let mut u = ln_u(c, 2.0 - b, z)?;
        u.ln_abs += (1.0 - b) * z.ln();
        return Ok(u);
    }
    let n = b.round();
    if b == n {
        Ok(integer_b_series(a, n as u64 - 1, z))
    } else if (b - n).abs() < NEAR_INTEGER {
        laplace_integral(a, b, z)
    } else {
        Ok(m_combination(a, b, z))
    }
}

/// U = z^{−a} Σ_{k≤n} (a)_k (c)_k / k! (−1/z)^k, exact when a or c is −n.
fn terminating(a: f64, c: f64, z: f64, n: u64) -> LogValue {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= -(a + kf) * (c + kf) / ((kf + 1.0) * z);
        sum += term;
    }
    let mut v = LogValue::from_value(sum, true, n as usize + 1);
    v.ln_abs -= a * z.ln();
    v
}

/// Backward recurrence for g_n = (a)_n (c)_n / n! · U(a + n, b, z), the
/// minimal solution, normalised by Σ g_n = z^{−a}.
fn miller(a: f64, b: f64, z: f64) -> Result<LogValue> {
    let c = a - b + 1.0;
    let mut depth = 64 + (400.0 / z) as usize;
    let mut previous: Option<f64> = None;
    while depth <= MILLER_MAX_DEPTH {
        let (ratio, cond) = miller_ratio(a, b, c, z, depth);
        // sign changes in (c)_n make Σ g_n cancel; the integral has none
        if cond > MILLER_MAX_CANCEL && a > 0.0 {
            return laplace_integral(a, b, z);
        }
        let tol = MILLER_TOL.max(64.0 * f64::EPSILON * cond);
        if let Some(p) = previous {
            if ((ratio - p) / ratio).abs() < tol {
                let mut v = LogValue::from_value(ratio, ratio.is_finite(), depth);
                v.ln_abs -= a * z.ln();
                return Ok(v);
            }
        }
        previous = Some(ratio);
        depth *= 2;
    }
    let ratio = previous.unwrap_or(f64::NAN);
    let mut v = LogValue::from_value(ratio, false, depth);
    v.ln_abs -= a * z.ln();
    Ok(v)
}

/// g_0 / Σ g_n and the cancellation factor Σ|g_n| / |Σ g_n|.
fn miller_ratio(a: f64, b: f64, c: f64, z: f64, depth: usize) -> (f64, f64) {
    const RESCALE: f64 = 1e200;
    let mut g_next = 0.0;
    let mut g = 1e-200;
    let mut sum = g;
    let mut abs_sum = g;
    for n in (1..=depth).rev() {
        let nf = n as f64;
        let g_prev = nf * ((2.0 * a + 2.0 * nf + z - b) * g - (nf + 1.0) * g_next)
            / ((a + nf - 1.0) * (c + nf - 1.0));
        g_next = g;
        g = g_prev;
        sum += g;
        abs_sum += g.abs();
        if g.abs() > RESCALE {
            g /= RESCALE;
            g_next /= RESCALE;
            sum /= RESCALE;
            abs_sum /= RESCALE;
        }
    }
    (g / sum, abs_sum / sum.abs())
}

/// Logarithmic series for b = n + 1, carried as z^n U to avoid the pole.
fn integer_b_series(a: f64, n: u64, z: f64) -> LogValue {
    let nf = n as f64;
    let ln_z = z.ln();
    let (lg_an, sign_an) = ln_gamma_signed(a - nf);
    let ln_fact_n = ln_gamma(nf + 1.0);
    // leading coefficient (−1)^{n+1} / (n! Γ(a − n))
    let lead = if n % 2 == 0 { -1.0 } else { 1.0 } * sign_an * (-(lg_an + ln_fact_n)).exp();

    let mut psi_a = digamma(a);
    let mut psi_1 = digamma(1.0);
    let mut psi_n = digamma(nf + 1.0);
    let mut coef = 1.0;
    let mut zk = z.powi(n as i32);
    let mut series = 0.0;
    let mut terms = 0;
    let mut converged = false;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        let t = coef * zk * (ln_z + psi_a - psi_1 - psi_n);
        series += t;
        terms = k + 1;
        if k > 0 && t.abs() <= EPS * series.abs() {
            converged = true;
            break;
        }
        coef *= (a + kf) / ((nf + 1.0 + kf) * (kf + 1.0));
        zk *= z;
        psi_a += 1.0 / (a + kf);
        psi_1 += 1.0 / (kf + 1.0);
        psi_n += 1.0 / (nf + 1.0 + kf);
    }
    let mut finite = 0.0;
    if n > 0 {
        let (lg_a, sign_a) = ln_gamma_signed(a);
        let inv_gamma_a = sign_a * (-lg_a).exp();
        for k in 1..=n {
            let kf = k as f64;
            // (k−1)! (1 − a + k)_{n−k} / (n − k)! · z^{n−k}
            let mut poch = 1.0;
            for j in 0..(n - k) {
                poch *= 1.0 - a + kf + j as f64;
            }
            let mag = (ln_gamma(kf) - ln_gamma(nf - kf + 1.0) + (nf - kf) * ln_z).exp();
            finite += poch * mag;
        }
        finite *= inv_gamma_a;
    }
    let mut v = LogValue::from_value(lead * series + finite, converged, terms + n as usize);
    v.ln_abs -= nf * ln_z;
    v
}

/// Non-integer b ≥ 1:
/// U = Γ(1−b)/Γ(c) M(a, b, z) + Γ(b−1)/Γ(a) z^{1−b} M(c, 2−b, z),
/// carried as z^{b−1} U.
fn m_combination(a: f64, b: f64, z: f64) -> LogValue {
    let c = a - b + 1.0;
    let ln_z = z.ln();
    let (m1, ok1, n1) = kummer_m(a, b, z);
    let (m2, ok2, n2) = kummer_m(c, 2.0 - b, z);
    let (lg1b, s1b) = ln_gamma_signed(1.0 - b);
    let (lgc, sc) = ln_gamma_signed(c);
    let (lgb1, sb1) = ln_gamma_signed(b - 1.0);
    let (lga, sa) = ln_gamma_signed(a);
    let t1 = s1b * sc * (lg1b - lgc + (b - 1.0) * ln_z).exp() * m1;
    let t2 = sb1 * sa * (lgb1 - lga).exp() * m2;
    let mut v = LogValue::from_value(t1 + t2, ok1 && ok2, n1 + n2);
    v.ln_abs -= (b - 1.0) * ln_z;
    v
}

/// Kummer M(a, b, z) by direct summation; intended for z < 0.5.
fn kummer_m(a: f64, b: f64, z: f64) -> (f64, bool, usize) {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * z / ((b + kf) * (kf + 1.0));
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            return (sum, true, k + 1);
        }
    }
    (sum, false, SERIES_MAX_TERMS)
}

/// U = 1/Γ(a) ∫_0^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt, a > 0.
fn laplace_integral(a: f64, b: f64, z: f64) -> Result<LogValue> {
    if a <= 0.0 {
        return Err(Error::Unsupported(format!(
            "U({a}, {b}, {z}): near-integer b with a ≤ 0 at small z"
        )));
    }
    // factor out the peak of the integrand in log space
    let log_f = |t: f64| -z * t + (a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p();
    // stationary point of log_f: −z t² + (b − 2 − z) t + (a − 1) = 0
    let peak_t = if a > 1.0 {
        let p = b - 2.0 - z;
        let t = (p + (p * p + 4.0 * z * (a - 1.0)).sqrt()) / (2.0 * z);
        t.max(1e-3)
    } else {
        1.0
    };
    let shift = log_f(peak_t);
    let f = |t: f64| if t <= 0.0 { 0.0 } else { (log_f(t) - shift).exp() };
    let mut breaks = [peak_t / 4.0, peak_t, peak_t * 4.0, 1.0];
    breaks.sort_by(f64::total_cmp);
    let opts = QuadOptions { rel_tol: 1e-13, ..QuadOptions::default() };
    let r = integrate_half_line(f, 0.0, &breaks, opts);
    let mut v = LogValue::from_value(r.value, r.converged, r.subdivisions);
    v.ln_abs += shift - ln_gamma(a);
    Ok(v)
}

//! Numerical ground truth by adaptive quadrature.
//!
//! Nothing here touches the term expansion: integrands are built only from
//! regularized incomplete gammas, Gamma densities and their products. The
//! density of the largest shadowing power is the order-statistics form
//! f_max(u) = Σ_j f_j(u) ∏_{ℓ≠j} F_ℓ(u), which has no cancellation.
//!
//! Two model readings are provided. The `*_links` outage and SEP functions
//! follow the analysis: the selected index is weighted by P_r and the
//! fading of link r is applied to the unconditioned α_max. The `*_joint`
//! functions integrate the actual selection event, P(α_r is largest and
//! α_r β_r < x); they coincide with the former whenever the shadowing
//! powers are identically distributed.

use crate::closed_form::Modulation;
use crate::config::{ChannelConfig, Link};
use crate::quad::{integrate, integrate_half_line, QuadOptions, QuadratureReport};
use crate::specfun::{ln_gamma, regularized_pair};
use std::f64::consts::PI;

/// Segment budget per piece; oracles may be slow but must converge.
const MAX_SEGMENTS: usize = 4000;

fn opts(tol: f64) -> QuadOptions {
    QuadOptions { abs_tol: 0.0, rel_tol: tol.max(1e-13), max_segments: MAX_SEGMENTS }
}

/// Regularized lower incomplete gamma P(a, x) for valid a > 0, x ≥ 0.
fn p_lower(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        regularized_pair(a, x).0
    }
}

/// CDF of one link's shadowing power.
pub fn shadow_cdf(link: &Link, x: f64) -> f64 {
    p_lower(link.m_alpha as f64, link.rate() * x)
}

/// Density of one link's shadowing power.
pub fn shadow_pdf(link: &Link, x: f64) -> f64 {
    if x <= 0.0 {
        return if link.m_alpha == 1 { link.rate() } else { 0.0 };
    }
    let m = link.m_alpha as f64;
    let c = link.rate();
    (m * c.ln() + (m - 1.0) * x.ln() - c * x - ln_gamma(m)).exp()
}

/// ∏_ℓ F_ℓ(x).
pub fn cdf_alpha_max_product(links: &[Link], x: f64) -> f64 {
    links.iter().map(|l| shadow_cdf(l, x)).product()
}

/// f_j(x) ∏_{ℓ≠j} F_ℓ(x): density of α_j at x jointly with α_j being largest.
pub fn joint_selected_pdf(links: &[Link], j: usize, x: f64) -> f64 {
    let others: f64 = links.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, l)| shadow_cdf(l, x)).product();
    shadow_pdf(&links[j], x) * others
}

/// Order-statistics density of max_ℓ α_ℓ.
pub fn pdf_alpha_max_product(links: &[Link], x: f64) -> f64 {
    (0..links.len()).map(|j| joint_selected_pdf(links, j, x)).sum()
}

/// Breakpoints around every characteristic scale in `scales`.
fn breaks_around(scales: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = scales
        .iter()
        .filter(|s| s.is_finite() && **s > 0.0)
        .flat_map(|&s| [s / 16.0, s, 16.0 * s])
        .collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn shadow_scales(links: &[Link]) -> Vec<f64> {
    links.iter().map(|l| l.mean_snr).collect()
}

/// Σ_r w_r P(m_{β,r}, x m_{β,r}/u): fading CDF mixture at shadow power u.
fn fading_cdf_mix(links: &[Link], weights: &[f64], x: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return weights.iter().sum();
    }
    links.iter().zip(weights).map(|(l, &w)| w * p_lower(l.m_beta, x * l.m_beta / u)).sum()
}

/// ∫ F_{β,r}(x/u) f_max(u) du.
pub fn quad_cdf_conditional_links(links: &[Link], r: usize, x: f64, tol: f64) -> QuadratureReport {
    let mut w = vec![0.0; links.len()];
    w[r] = 1.0;
    quad_outage_links(links, &w, x, tol)
}

/// Σ_r w_r ∫ F_{β,r}(x/u) f_max(u) du.
pub fn quad_outage_links(links: &[Link], weights: &[f64], x: f64, tol: f64) -> QuadratureReport {
    if x <= 0.0 {
        return exact(0.0);
    }
    let mut scales = shadow_scales(links);
    scales.push(x);
    let f = |u: f64| fading_cdf_mix(links, weights, x, u) * pdf_alpha_max_product(links, u);
    integrate_half_line(f, 0.0, &breaks_around(&scales), opts(tol))
}

/// P(α_R β_R < x) under exact selection R = argmax α.
pub fn quad_outage_joint(links: &[Link], x: f64, tol: f64) -> QuadratureReport {
    if x <= 0.0 {
        return exact(0.0);
    }
    let mut scales = shadow_scales(links);
    scales.push(x);
    let f = |u: f64| {
        (0..links.len())
            .map(|j| p_lower(links[j].m_beta, x * links[j].m_beta / u) * joint_selected_pdf(links, j, u))
            .sum::<f64>()
    };
    integrate_half_line(f, 0.0, &breaks_around(&scales), opts(tol))
}

/// P(α_R β_R < x) with R uniform, independent of the channel.
pub fn quad_outage_random(links: &[Link], x: f64, tol: f64) -> QuadratureReport {
    if x <= 0.0 {
        return exact(0.0);
    }
    let mut scales = shadow_scales(links);
    scales.push(x);
    let inv_l = 1.0 / links.len() as f64;
    let f = |u: f64| {
        links.iter().map(|l| inv_l * p_lower(l.m_beta, x * l.m_beta / u) * shadow_pdf(l, u)).sum::<f64>()
    };
    integrate_half_line(f, 0.0, &breaks_around(&scales), opts(tol))
}

/// P_r = ∫ ∏_{ℓ≠r} F_ℓ(x) f_r(x) dx.
pub fn quad_selection_probability_links(links: &[Link], r: usize, tol: f64) -> QuadratureReport {
    if links.len() == 1 {
        return exact(1.0);
    }
    let f = |x: f64| joint_selected_pdf(links, r, x);
    integrate_half_line(f, 0.0, &breaks_around(&shadow_scales(links)), opts(tol))
}

/// E[α_max^p]; p may be negative down to (not including) −Σ m_α.
pub fn quad_alpha_max_moment(links: &[Link], p: f64, tol: f64) -> QuadratureReport {
    let f = |x: f64| if x <= 0.0 { 0.0 } else { x.powf(p) * pdf_alpha_max_product(links, x) };
    let breaks = breaks_around(&shadow_scales(links));
    let x0 = breaks[0];
    // x^p f_max(x) ~ x^{q−1} near 0 with q = p + Σ m_α; y = x^q makes it smooth
    let q = p + links.iter().map(|l| l.m_alpha as f64).sum::<f64>();
    let head = integrate(
        |y: f64| if y <= 0.0 { 0.0 } else { f(y.powf(1.0 / q)) * y.powf(1.0 / q - 1.0) / q },
        0.0,
        x0.powf(q),
        opts(tol),
    );
    let mut tail = integrate_half_line(f, x0, &breaks[1..], opts(tol));
    tail.value += head.value;
    tail.abs_err_est += head.abs_err_est;
    tail.subdivisions += head.subdivisions;
    tail.converged &= head.converged;
    tail
}

/// Outer integral of a CDF against `kernel` with every inner evaluation a
/// nested quadrature; the weakest convergence flag wins.
fn outer_integral<K, F>(kernel: K, inner: F, breaks: &[f64], tol: f64) -> QuadratureReport
where
    K: Fn(f64) -> f64,
    F: Fn(f64) -> QuadratureReport,
{
    let inner_ok = std::cell::Cell::new(true);
    let f = |x: f64| {
        let k = kernel(x);
        if k == 0.0 {
            return 0.0;
        }
        let r = inner(x);
        if !r.converged {
            inner_ok.set(false);
        }
        k * r.value
    };
    let mut report = integrate_half_line(f, 0.0, breaks, opts(tol));
    report.converged &= inner_ok.get();
    report
}

/// M(s) = s ∫ e^{−sx} F(x) dx with F = Σ_r w_r F_r from nested quadrature.
pub fn quad_mgf_links(links: &[Link], weights: &[f64], s: f64, tol: f64) -> QuadratureReport {
    if s <= 0.0 {
        return exact(1.0);
    }
    let mut scales = shadow_scales(links);
    scales.push(1.0 / s);
    outer_integral(
        |x| s * (-s * x).exp(),
        |x| quad_outage_links(links, weights, x, tol * 0.1),
        &breaks_around(&scales),
        tol,
    )
}

/// SEP integral with x = t², shared by both model readings.
fn sep_integral<F>(links: &[Link], modulation: &Modulation, tol: f64, cdf: F) -> QuadratureReport
where
    F: Fn(f64) -> QuadratureReport,
{
    let (a, b) = (modulation.a(), modulation.b());
    let d = links.iter().map(|l| l.m_alpha as f64).sum::<f64>().min(
        links.iter().map(|l| l.m_beta).fold(f64::INFINITY, f64::min),
    );
    let mut scales: Vec<f64> = shadow_scales(links).iter().map(|g| g.sqrt()).collect();
    scales.push((1.0 / b).sqrt());
    scales.push(((d + 0.5) / b).sqrt());
    // (a√b/(2√π)) ∫ e^{−bx} x^{−1/2} F(x) dx = (a√b/√π) ∫ e^{−bt²} F(t²) dt
    let c = a * b.sqrt() / PI.sqrt();
    outer_integral(|t| c * (-b * t * t).exp(), |t| cdf(t * t), &breaks_around(&scales), tol)
}

/// (a√b/(2√π)) ∫ e^{−bx} x^{−1/2} F(x) dx with F = Σ_r w_r F_r.
pub fn quad_sep_links(links: &[Link], weights: &[f64], modulation: &Modulation, tol: f64) -> QuadratureReport {
    sep_integral(links, modulation, tol, |x| quad_outage_links(links, weights, x, tol * 0.1))
}

/// SEP under exact selection R = argmax α.
pub fn quad_sep_joint(links: &[Link], modulation: &Modulation, tol: f64) -> QuadratureReport {
    sep_integral(links, modulation, tol, |x| quad_outage_joint(links, x, tol * 0.1))
}

/// SEP with the transmit antenna drawn uniformly.
pub fn quad_sep_random(links: &[Link], modulation: &Modulation, tol: f64) -> QuadratureReport {
    sep_integral(links, modulation, tol, |x| quad_outage_random(links, x, tol * 0.1))
}

fn exact(value: f64) -> QuadratureReport {
    QuadratureReport { value, abs_err_est: 0.0, subdivisions: 0, converged: true }
}

/// Selection probabilities, each by its own quadrature.
pub fn quad_selection_probabilities_links(links: &[Link], tol: f64) -> Vec<QuadratureReport> {
    (0..links.len()).map(|r| quad_selection_probability_links(links, r, tol)).collect()
}

fn weights_of(reports: &[QuadratureReport]) -> (Vec<f64>, bool) {
    (reports.iter().map(|r| r.value).collect(), reports.iter().all(|r| r.converged))
}

/// Conditional CDF at the reference SNR; `r` is 0-based.
pub fn quad_cdf_conditional(cfg: &ChannelConfig, r: usize, x: f64, tol: f64) -> QuadratureReport {
    quad_cdf_conditional_links(&cfg.links(), r, x, tol)
}

pub fn quad_selection_probability(cfg: &ChannelConfig, r: usize, tol: f64) -> QuadratureReport {
    quad_selection_probability_links(&cfg.links(), r, tol)
}

/// Outage with quadrature selection weights.
pub fn quad_outage(cfg: &ChannelConfig, gamma_th: f64, tol: f64) -> QuadratureReport {
    let links = cfg.links();
    let (w, ok) = weights_of(&quad_selection_probabilities_links(&links, tol));
    let mut r = quad_outage_links(&links, &w, gamma_th, tol);
    r.converged &= ok;
    r
}

pub fn quad_mgf(cfg: &ChannelConfig, s: f64, tol: f64) -> QuadratureReport {
    let links = cfg.links();
    let (w, ok) = weights_of(&quad_selection_probabilities_links(&links, tol));
    let mut r = quad_mgf_links(&links, &w, s, tol);
    r.converged &= ok;
    r
}

pub fn quad_sep(cfg: &ChannelConfig, modulation: &Modulation, tol: f64) -> QuadratureReport {
    let links = cfg.links();
    let (w, ok) = weights_of(&quad_selection_probabilities_links(&links, tol));
    let mut r = quad_sep_links(&links, &w, modulation, tol);
    r.converged &= ok;
    r
}

/// E[γ^p] = Σ_r P_r E[α_max^p] Γ(m_{β,r}+p)/(Γ(m_{β,r}) m_{β,r}^p), with
/// P_r and E[α_max^p] by quadrature.
pub fn moment_factorized(cfg: &ChannelConfig, p: f64, tol: f64) -> QuadratureReport {
    let links = cfg.links();
    let sel = quad_selection_probabilities_links(&links, tol);
    let alpha = quad_alpha_max_moment(&links, p, tol);
    let beta: f64 = links
        .iter()
        .zip(&sel)
        .map(|(l, pr)| pr.value * (ln_gamma(l.m_beta + p) - ln_gamma(l.m_beta) - p * l.m_beta.ln()).exp())
        .sum();
    QuadratureReport {
        value: alpha.value * beta,
        abs_err_est: alpha.abs_err_est * beta,
        subdivisions: alpha.subdivisions + sel.iter().map(|r| r.subdivisions).sum::<usize>(),
        converged: alpha.converged && sel.iter().all(|r| r.converged),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn links(m_alpha: &[u32], m_beta: &[f64], g: &[f64]) -> Vec<Link> {
        m_alpha
            .iter()
            .zip(m_beta)
            .zip(g)
            .map(|((&m_alpha, &m_beta), &mean_snr)| Link { m_alpha, m_beta, mean_snr })
            .collect()
    }

    #[test]
    fn single_branch_cdf_matches_k_distribution() {
        let l = links(&[1], &[1.0], &[1.0]);
        let r = quad_cdf_conditional_links(&l, 0, 1.0, 1e-12);
        assert!(r.converged);
        // 1 − 2 K_1(2)
        assert!((r.value - 0.720_268_236_366_955).abs() < 1e-11, "{r:?}");
        assert_eq!(quad_cdf_conditional_links(&l, 0, 0.0, 1e-12).value, 0.0);
    }

    #[test]
    fn selection_probability_cases() {
        let one = links(&[2], &[1.0], &[3.0]);
        assert_eq!(quad_selection_probability_links(&one, 0, 1e-12).value, 1.0);
        let iid = links(&[2, 2, 2], &[1.0; 3], &[5.0; 3]);
        for r in 0..3 {
            assert!((quad_selection_probability_links(&iid, r, 1e-12).value - 1.0 / 3.0).abs() < 1e-11);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let l = links(&[2, 1, 3], &[1.0; 3], &[0.5, 2.0, 1.3]);
        let r = quad_alpha_max_moment(&l, 0.0, 1e-12);
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn joint_equals_analysis_reading_for_identical_shadowing() {
        let l = links(&[2, 2], &[1.0, 3.0], &[4.0, 4.0]);
        let w = [0.5, 0.5];
        for &x in &[0.3, 2.0, 9.0] {
            let a = quad_outage_links(&l, &w, x, 1e-11).value;
            let b = quad_outage_joint(&l, x, 1e-11).value;
            assert!(((a - b) / a).abs() < 1e-9, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn mgf_single_branch() {
        let l = links(&[1], &[1.0], &[1.0]);
        let r = quad_mgf_links(&l, &[1.0], 1.0, 1e-10);
        let expect = 1f64.exp() * 0.219_383_934_395_520_27;
        assert!(((r.value - expect) / expect).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn halving_tolerance_is_self_consistent() {
        let cfg = ChannelConfig::at_point(vec![2, 1], vec![1.5, 2.0], vec![1.0, 3.0], 3.0).unwrap();
        let coarse = quad_cdf_conditional(&cfg, 1, 2.0, 1e-8);
        let fine = quad_cdf_conditional(&cfg, 1, 2.0, 5e-9);
        assert!((coarse.value - fine.value).abs() <= coarse.abs_err_est.max(1e-15));
    }
}

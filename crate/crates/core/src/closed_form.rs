//! Closed-form metrics: conditional and unconditional CDF, moments, amount of
//! fading, MGF and SEP.
//!
//! Every metric is a constant plus a signed sum over the merged expansion
//! terms. Each term is evaluated in log domain; the sum is compensated. When
//! the terms largely cancel (high SNR, where the result is tiny against O(1)
//! terms) the achievable accuracy is bounded by
//! `(ε_term Σ|t| + ε |constant|) / |value|`, reported as `rel_err_bound`.
//! [`Model::routed`] falls back to the quadrature oracle when that bound is
//! too loose.

use crate::config::{ChannelConfig, Link};
use crate::error::{Error, Result};
use crate::expansion::{link_selection_probabilities, TermSet, DEFAULT_TERM_CAP};
use crate::oracle;
use crate::specfun::{ln_bessel_k, ln_gamma, ln_whittaker_w_scaled};
use crate::sum::compensated_sum;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// Per-term relative accuracy of a Bessel-K term.
const EPS_K_TERM: f64 = 1e-13;
/// Per-term relative accuracy of a Whittaker-W term.
const EPS_W_TERM: f64 = 1e-12;
/// Results outside the valid range by more than this are failures.
const RANGE_SLACK: f64 = 1e-6;
/// Results within this of a bound are clamped onto it.
const CLAMP_SLACK: f64 = 1e-9;
/// Closed forms whose error bound exceeds this are failures.
const MAX_REL_ERR: f64 = 1e-2;
/// The router keeps the closed form only below this bound.
pub const ROUTE_REL_ERR: f64 = 1e-9;
/// Relative tolerance of the router's quadrature fallback.
pub const ROUTE_QUAD_TOL: f64 = 1e-10;

/// Modulation families with conditional SEP a·Q(√(2bγ)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Bpsk,
    /// Orthogonal binary FSK.
    Bfsk,
    Pam,
    Psk,
    /// Rectangular QAM.
    Qam,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Bpsk => "bpsk",
            Family::Bfsk => "bfsk",
            Family::Pam => "pam",
            Family::Psk => "psk",
            Family::Qam => "qam",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Some(Family::Bpsk),
            "bfsk" => Some(Family::Bfsk),
            "pam" => Some(Family::Pam),
            "psk" => Some(Family::Psk),
            "qam" => Some(Family::Qam),
            _ => None,
        }
    }

    /// Whether the constellation size enters the constants.
    pub fn uses_order(self) -> bool {
        !matches!(self, Family::Bpsk | Family::Bfsk)
    }
}

/// A modulation with its SEP constants (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    family: Family,
    order: u32,
    a: f64,
    b: f64,
}

impl Modulation {
    /// `order` must be a power of two ≥ 2; binary families ignore it.
    pub fn new(family: Family, order: u32) -> Result<Self> {
        let order = if family.uses_order() { order } else { 2 };
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::validation("modulation.M", format!("{order} must be a power of two ≥ 2")));
        }
        let m = order as f64;
        let (a, b) = match family {
            Family::Bpsk => (1.0, 1.0),
            Family::Bfsk => (1.0, 0.5),
            Family::Pam => (2.0 * (m - 1.0) / m, 3.0 / (m * m - 1.0)),
            Family::Psk => (2.0, (PI / m).sin().powi(2)),
            Family::Qam => (4.0 - 4.0 / m.sqrt(), 1.5 / (m - 1.0)),
        };
        Ok(Modulation { family, order, a, b })
    }

    pub fn bpsk() -> Self {
        Modulation::new(Family::Bpsk, 2).expect("valid")
    }

    /// Parses `bpsk`, `bfsk`, `pam:M`, `psk:M` or `qam:M`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, order) = match text.split_once(':') {
            Some((n, m)) => {
                let m = m.trim().parse::<u32>().map_err(|_| Error::Parse {
                    key: "modulation".into(),
                    message: format!("bad constellation size in {text:?}"),
                })?;
                (n, Some(m))
            }
            None => (text, None),
        };
        let family = Family::from_name(name.trim()).ok_or_else(|| Error::Parse {
            key: "modulation".into(),
            message: format!("unknown modulation {text:?}"),
        })?;
        if family.uses_order() && order.is_none() {
            return Err(Error::Parse { key: "modulation".into(), message: format!("{text:?} needs :M") });
        }
        Modulation::new(family, order.unwrap_or(2))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// M-PSK and M-QAM constants give an approximation, not the exact SEP.
    pub fn is_approximate(&self) -> bool {
        matches!(self.family, Family::Psk | Family::Qam)
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family.uses_order() {
            write!(f, "{}:{}", self.family.name(), self.order)
        } else {
            f.write_str(self.family.name())
        }
    }
}

/// How a metric value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Closed,
    Asymptotic,
    Oracle,
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Asymptotic => "asymptotic",
            Method::Oracle => "oracle",
            Method::MonteCarlo => "mc",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "closed" => Some(Method::Closed),
            "asymptotic" => Some(Method::Asymptotic),
            "oracle" => Some(Method::Oracle),
            "mc" => Some(Method::MonteCarlo),
            _ => None,
        }
    }
}

/// A metric value with provenance and free-form diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    pub meta: BTreeMap<String, String>,
}

impl MetricResult {
    pub fn new(value: f64, method: Method) -> Self {
        MetricResult { value, method, meta: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }
}

/// A compensated term sum with its rounding-error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEval {
    pub value: f64,
    /// Σ|t| over the non-constant terms.
    pub abs_sum: f64,
    pub constant: f64,
    pub rel_err_bound: f64,
    pub terms: usize,
}

impl TermEval {
    fn from_terms(mut terms: Vec<f64>, constant: f64, eps_term: f64) -> Self {
        let n = terms.len();
        let (partial, abs_sum) = compensated_sum(&mut terms);
        let value = partial + constant;
        let abs_err = eps_term * abs_sum + f64::EPSILON * constant.abs();
        let rel_err_bound = if value != 0.0 { abs_err / value.abs() } else if abs_err == 0.0 { 0.0 } else { f64::INFINITY };
        TermEval { value, abs_sum, constant, rel_err_bound, terms: n }
    }

    fn exact(value: f64) -> Self {
        TermEval { value, abs_sum: 0.0, constant: value, rel_err_bound: 0.0, terms: 0 }
    }

    /// Range and accuracy checks shared by every probability-like metric.
    fn checked(self, metric: &'static str, upper: f64) -> Result<f64> {
        let v = self.value;
        if !v.is_finite() || v < -RANGE_SLACK || v > upper + RANGE_SLACK {
            return Err(Error::NumericalFailure {
                metric,
                detail: format!("value {v} outside [0, {upper}] after {} terms", self.terms),
            });
        }
        if self.rel_err_bound > MAX_REL_ERR {
            return Err(Error::NumericalFailure {
                metric,
                detail: format!("cancellation leaves relative error up to {:.1e}", self.rel_err_bound),
            });
        }
        if v < 0.0 && v >= -CLAMP_SLACK {
            Ok(0.0)
        } else if v > upper && v <= upper + CLAMP_SLACK {
            Ok(upper)
        } else {
            Ok(v)
        }
    }
}

/// Link parameters with their expansion and selection probabilities, built
/// once per SNR point.
#[derive(Debug, Clone)]
pub struct Model {
    links: Vec<Link>,
    terms: TermSet,
    selection: Vec<f64>,
}

impl Model {
    pub fn new(cfg: &ChannelConfig) -> Result<Self> {
        Model::from_links(cfg.links())
    }

    pub fn from_links(links: Vec<Link>) -> Result<Self> {
        let terms = TermSet::new(&links, DEFAULT_TERM_CAP)?;
        let selection = link_selection_probabilities(&links, DEFAULT_TERM_CAP)?;
        Ok(Model { links, terms, selection })
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn terms(&self) -> &TermSet {
        &self.terms
    }

    pub fn selection_probabilities(&self) -> &[f64] {
        &self.selection
    }

    /// Negative-control hook: flips the sign of one merged κ.
    #[doc(hidden)]
    pub fn corrupt_kappa_sign(&mut self, index: usize) {
        if let Some(t) = self.terms.terms.get_mut(index) {
            t.sign_kappa = -t.sign_kappa;
        }
    }

    fn link(&self, r: usize) -> Result<&Link> {
        self.links.get(r).ok_or(Error::IndexOutOfRange { index: r, links: self.links.len() })
    }

    /// ln|t| of the conditional-CDF term, without the sign of κ.
    fn ln_cdf_term(m: f64, ln_abs_kappa: f64, b: f64, a: f64, x: f64) -> Result<f64> {
        let z = 2.0 * (x * b * m).sqrt();
        Ok(2f64.ln() - ln_gamma(m)
            + ln_abs_kappa
            + 0.5 * (m + a) * (x * m).ln()
            + 0.5 * (m - a) * b.ln()
            + ln_bessel_k(m - a, z)?)
    }

    fn cdf_terms(&self, r: usize, x: f64, weight: f64, out: &mut Vec<f64>) -> Result<()> {
        let m = self.link(r)?.m_beta;
        for t in &self.terms.terms {
            let ln_t = Model::ln_cdf_term(m, t.log_abs_kappa, t.b, t.a as f64, x)?;
            out.push(t.sign_kappa * weight * ln_t.exp());
        }
        Ok(())
    }

    /// Conditional CDF of the received SNR given link `r` transmits.
    pub fn cdf_conditional_eval(&self, r: usize, x: f64) -> Result<TermEval> {
        self.link(r)?;
        if !(x >= 0.0) {
            return Err(Error::domain("cdf_conditional", format!("x = {x} must be ≥ 0")));
        }
        if x == 0.0 {
            return Ok(TermEval::exact(0.0));
        }
        let mut t = Vec::with_capacity(self.terms.terms.len());
        self.cdf_terms(r, x, 1.0, &mut t)?;
        Ok(TermEval::from_terms(t, 1.0, EPS_K_TERM))
    }

    pub fn cdf_conditional(&self, r: usize, x: f64) -> Result<f64> {
        self.cdf_conditional_eval(r, x)?.checked("cdf_conditional", 1.0)
    }

    /// Outage probability Σ_r P_r F_r(γ_th).
    pub fn outage_eval(&self, gamma_th: f64) -> Result<TermEval> {
        if !(gamma_th >= 0.0) {
            return Err(Error::domain("outage", format!("gamma_th = {gamma_th} must be ≥ 0")));
        }
        if gamma_th == 0.0 {
            return Ok(TermEval::exact(0.0));
        }
        let mut t = Vec::with_capacity(self.terms.terms.len() * self.links.len());
        for (r, &p) in self.selection.iter().enumerate() {
            self.cdf_terms(r, gamma_th, p, &mut t)?;
        }
        Ok(TermEval::from_terms(t, 1.0, EPS_K_TERM))
    }

    pub fn outage(&self, gamma_th: f64) -> Result<f64> {
        self.outage_eval(gamma_th)?.checked("outage", 1.0)
    }

    /// E[α_max^p] = −p Σ κ Γ(p + A)/B^{p+A}.
    pub fn alpha_max_moment(&self, p: f64) -> f64 {
        let mut t: Vec<f64> = self
            .terms
            .terms
            .iter()
            .map(|k| {
                let a = k.a as f64;
                -p * k.sign_kappa * (k.log_abs_kappa + ln_gamma(p + a) - (p + a) * k.b.ln()).exp()
            })
            .collect();
        compensated_sum(&mut t).0
    }

    /// E[γ^p] from the independence of α_max and β_r.
    pub fn moment_factorized(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::domain("moment", format!("order p = {p} must be > 0")));
        }
        let alpha = self.alpha_max_moment(p);
        let mut t: Vec<f64> = self
            .links
            .iter()
            .zip(&self.selection)
            .map(|(l, &pr)| {
                let m = l.m_beta;
                pr * (ln_gamma(m + p) - ln_gamma(m) - p * m.ln()).exp()
            })
            .collect();
        Ok(alpha * compensated_sum(&mut t).0)
    }

    /// The moment series with the exponent grouping of the published
    /// expression; kept only as a diagnostic against the factorized value.
    pub fn moment_printed(&self, p: f64) -> f64 {
        let mut t = Vec::new();
        for (l, &pr) in self.links.iter().zip(&self.selection) {
            let m = l.m_beta;
            for k in &self.terms.terms {
                let a = k.a as f64;
                let ln_t = pr.ln() + k.log_abs_kappa + ln_gamma(p + m + a / 2.0) + ln_gamma(p + a + m / 2.0)
                    - ln_gamma(m)
                    - 0.5 * ((a + m + 2.0 * p) * m.ln() + (2.0 * a + m + 2.0 * p) * k.b.ln());
                t.push(-p * k.sign_kappa * ln_t.exp());
            }
        }
        compensated_sum(&mut t).0
    }

    /// p-th moment of the received SNR. Ships the factorized value; the
    /// printed-series value and their discrepancy go into `meta`.
    pub fn moment(&self, p: f64) -> Result<MetricResult> {
        let value = self.moment_factorized(p)?;
        let printed = self.moment_printed(p);
        let discrepancy = ((printed - value) / value).abs();
        let mut res = MetricResult::new(value, Method::Closed).with("form", "factorized");
        if !(discrepancy <= 1e-6) {
            log::debug!("moment p={p}: printed series gives {printed:e}, factorized {value:e}; shipping factorized");
            res = res.with("printed_value", printed).with("printed_rel_discrepancy", discrepancy);
        }
        Ok(res)
    }

    /// (E[γ²] − E[γ]²)/E[γ]².
    pub fn amount_of_fading(&self) -> Result<f64> {
        let m1 = self.moment_factorized(1.0)?;
        let m2 = self.moment_factorized(2.0)?;
        Ok((m2 - m1 * m1) / (m1 * m1))
    }

    /// M(s) = s ∫ e^{−sx} F(x) dx.
    pub fn mgf_eval(&self, s: f64) -> Result<TermEval> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain("mgf", format!("s = {s} must be finite and ≥ 0")));
        }
        if s == 0.0 {
            return Ok(TermEval::exact(1.0));
        }
        let ln_s = s.ln();
        let mut t = Vec::with_capacity(self.terms.terms.len() * self.links.len());
        for (l, &pr) in self.links.iter().zip(&self.selection) {
            let m = l.m_beta;
            for k in &self.terms.terms {
                let a = k.a as f64;
                let mu = k.b * m / s;
                let w = ln_whittaker_w_scaled(-(m + a + 1.0) / 2.0, (m - a) / 2.0, mu)?;
                if !w.converged {
                    return Err(Error::NumericalFailure { metric: "mgf", detail: format!("Whittaker W at μ = {mu}") });
                }
                let ln_t = pr.ln() + ln_s + k.log_abs_kappa - ln_gamma(m)
                    + 0.5 * (m + a) * m.ln()
                    + 0.5 * (m - a) * k.b.ln()
                    + ln_gamma(m + 1.0)
                    + ln_gamma(a + 1.0)
                    - 0.5 * (k.b * m).ln()
                    - 0.5 * (m + a + 1.0) * ln_s
                    + w.value;
                t.push(k.sign_kappa * ln_t.exp());
            }
        }
        Ok(TermEval::from_terms(t, 1.0, EPS_W_TERM))
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.mgf_eval(s)?.checked("mgf", 1.0)
    }

    /// Average SEP E[a Q(√(2bγ))].
    pub fn sep_eval(&self, modulation: &Modulation) -> Result<TermEval> {
        let (am, bm) = (modulation.a(), modulation.b());
        let mut t = Vec::with_capacity(self.terms.terms.len() * self.links.len());
        for (l, &pr) in self.links.iter().zip(&self.selection) {
            let m = l.m_beta;
            for k in &self.terms.terms {
                let a = k.a as f64;
                let xi = k.b * m / bm;
                let w = ln_whittaker_w_scaled(-(m + a) / 2.0, (m - a) / 2.0, xi)?;
                if !w.converged {
                    return Err(Error::NumericalFailure { metric: "sep", detail: format!("Whittaker W at ξ = {xi}") });
                }
                let ln_t = pr.ln() + am.ln() + 0.5 * bm.ln() - 0.5 * PI.ln() - ln_gamma(m)
                    + k.log_abs_kappa
                    + 0.5 * (m + a) * m.ln()
                    + 0.5 * (m - a) * k.b.ln()
                    + ln_gamma(m + 0.5)
                    + ln_gamma(a + 0.5)
                    - 2f64.ln()
                    - 0.5 * (k.b * m).ln()
                    - 0.5 * (m + a) * bm.ln()
                    + w.value;
                t.push(k.sign_kappa * ln_t.exp());
            }
        }
        Ok(TermEval::from_terms(t, am / 2.0, EPS_W_TERM))
    }

    pub fn sep(&self, modulation: &Modulation) -> Result<f64> {
        self.sep_eval(modulation)?.checked("sep", modulation.a() / 2.0)
    }

    /// Closed form when its error bound is within [`ROUTE_REL_ERR`], the
    /// quadrature oracle otherwise.
    pub fn routed(&self, metric: RoutedMetric) -> Result<MetricResult> {
        let (eval, upper, name) = match metric {
            RoutedMetric::Outage(x) => (self.outage_eval(x), 1.0, "outage"),
            RoutedMetric::Sep(m) => (self.sep_eval(&m), m.a() / 2.0, "sep"),
            RoutedMetric::Mgf(s) => (self.mgf_eval(s), 1.0, "mgf"),
        };
        if let Ok(e) = eval {
            if e.rel_err_bound <= ROUTE_REL_ERR {
                let v = e.checked(name, upper)?;
                return Ok(MetricResult::new(v, Method::Closed)
                    .with("terms", e.terms)
                    .with("rel_err_bound", format!("{:.1e}", e.rel_err_bound)));
            }
        }
        let weights = &self.selection;
        let report = match metric {
            RoutedMetric::Outage(x) => oracle::quad_outage_links(&self.links, weights, x, ROUTE_QUAD_TOL),
            RoutedMetric::Sep(m) => oracle::quad_sep_links(&self.links, weights, &m, ROUTE_QUAD_TOL),
            RoutedMetric::Mgf(s) => oracle::quad_mgf_links(&self.links, weights, s, ROUTE_QUAD_TOL),
        };
        if !report.converged {
            return Err(Error::NumericalFailure {
                metric: name,
                detail: format!("quadrature fallback did not converge (err {:e})", report.abs_err_est),
            });
        }
        Ok(MetricResult::new(report.value, Method::Oracle)
            .with("route", "quadrature")
            .with("abs_err", format!("{:.1e}", report.abs_err_est)))
    }
}

/// Metrics that [`Model::routed`] can evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoutedMetric {
    Outage(f64),
    Sep(Modulation),
    Mgf(f64),
}

/// Conditional CDF at the config's reference SNR; `r` is 0-based.
pub fn cdf_conditional(cfg: &ChannelConfig, r: usize, x: f64) -> Result<f64> {
    Model::new(cfg)?.cdf_conditional(r, x)
}

pub fn outage(cfg: &ChannelConfig, gamma_th: f64) -> Result<f64> {
    Model::new(cfg)?.outage(gamma_th)
}

/// p-th moment; `p` ≥ 1 and integral by convention, any p > 0 is accepted.
pub fn moment(cfg: &ChannelConfig, p: f64) -> Result<MetricResult> {
    Model::new(cfg)?.moment(p)
}

pub fn amount_of_fading(cfg: &ChannelConfig) -> Result<f64> {
    Model::new(cfg)?.amount_of_fading()
}

pub fn mgf(cfg: &ChannelConfig, s: f64) -> Result<f64> {
    Model::new(cfg)?.mgf(s)
}

pub fn sep(cfg: &ChannelConfig, modulation: &Modulation) -> Result<f64> {
    Model::new(cfg)?.sep(modulation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    fn single(snr_db: f64) -> Model {
        Model::new(&ChannelConfig::at_point(vec![1], vec![1.0], vec![1.0], snr_db).unwrap()).unwrap()
    }

    #[test]
    fn modulation_table() {
        let pam = Modulation::parse("pam:4").unwrap();
        assert_eq!((pam.a(), pam.b()), (1.5, 0.2));
        let qam = Modulation::parse("qam:16").unwrap();
        assert_eq!((qam.a(), qam.b()), (3.0, 0.1));
        let psk = Modulation::parse("psk:4").unwrap();
        assert!((psk.b() - 0.5).abs() < 1e-15 && psk.is_approximate());
        assert_eq!(Modulation::parse("bfsk").unwrap().b(), 0.5);
        assert!(Modulation::parse("pam:3").is_err());
        assert!(Modulation::parse("pam").is_err());
        assert!(Modulation::parse("ook").is_err());
        assert_eq!(Modulation::parse("psk:8").unwrap().to_string(), "psk:8");
    }

    #[test]
    fn single_branch_k_distribution() {
        let m = single(0.0);
        let expect = 1.0 - 2.0 * bessel_k(1.0, 2.0).unwrap();
        assert!((m.cdf_conditional(0, 1.0).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 0.720_268_236_366_955).abs() < 1e-14);
        assert_eq!(m.cdf_conditional(0, 0.0).unwrap(), 0.0);
        assert_eq!(m.outage(0.0).unwrap(), 0.0);
    }

    #[test]
    fn single_branch_moments() {
        let m = single(0.0);
        assert!((m.moment(1.0).unwrap().value - 1.0).abs() < 1e-14);
        assert!((m.moment(2.0).unwrap().value - 4.0).abs() < 1e-13);
        assert!((m.amount_of_fading().unwrap() - 3.0).abs() < 1e-12);
        assert!(m.moment(0.0).is_err());
    }

    #[test]
    fn mgf_and_sep_limits() {
        let m = single(0.0);
        assert_eq!(m.mgf(0.0).unwrap(), 1.0);
        // E[e^{−sγ}] for γ = αβ, both unit exponentials, s = 1: e·E1(1)
        let expect = 1f64.exp() * 0.219_383_934_395_520_27;
        assert!((m.mgf(1.0).unwrap() - expect).abs() < 1e-12, "{}", m.mgf(1.0).unwrap());
        let low = single(-60.0);
        assert!((low.sep(&Modulation::bpsk()).unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn cancellation_is_reported() {
        let cfg = ChannelConfig::at_point(vec![2, 2], vec![2.0, 2.0], vec![1.0, 1.0], 70.0).unwrap();
        let m = Model::new(&cfg).unwrap();
        let e = m.outage_eval(1.0).unwrap();
        assert!(e.rel_err_bound > 1e-6, "{e:?}");
        let routed = m.routed(RoutedMetric::Outage(1.0)).unwrap();
        assert_eq!(routed.method, Method::Oracle);
        let fine = Model::new(&cfg.at_snr_db(0.0).unwrap()).unwrap().routed(RoutedMetric::Outage(1.0)).unwrap();
        assert_eq!(fine.method, Method::Closed);
    }
}

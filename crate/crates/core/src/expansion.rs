//! Exponential-polynomial expansion of the CDF of the maximum of independent
//! Gamma variates with integer shapes, and the antenna-selection
//! probabilities derived from it.
//!
//! With rate c_ℓ = m_ℓ/γ̃_ℓ each factor is
//! P(m_ℓ, c_ℓ x) = 1 − e^{−c_ℓ x} Σ_{k<m_ℓ} (c_ℓ x)^k/k!, so the product over
//! links expands into 1 + Σ_S Σ_k κ e^{−B x} x^A with one term per nonempty
//! link subset S and per k_ℓ ∈ [0, m_ℓ) on S:
//!
//! κ = (−1)^{|S|} ∏_{ℓ∈S} c_ℓ^{k_ℓ}/k_ℓ!,  B = Σ_{ℓ∈S} c_ℓ,  A = Σ_{ℓ∈S} k_ℓ.
//!
//! Links outside S contribute a factor of exactly 1.

use crate::config::{ChannelConfig, Link};
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;
use crate::sum::compensated_sum;
use std::collections::BTreeMap;

/// Default ceiling on the number of enumerated terms.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// One (n, k) multi-index of the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTerm {
    /// Inclusion vector over the enumerated links.
    pub n: Vec<bool>,
    /// k_ℓ < m_ℓ on included links, 0 elsewhere.
    pub k: Vec<u32>,
    pub log_abs_kappa: f64,
    pub sign_kappa: f64,
    pub b: f64,
    pub a: u32,
}

impl ExpansionTerm {
    pub fn kappa(&self) -> f64 {
        self.sign_kappa * self.log_abs_kappa.exp()
    }
}

/// A term after merging all multi-indices with equal (A, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergedTerm {
    pub log_abs_kappa: f64,
    pub sign_kappa: f64,
    pub b: f64,
    pub a: u32,
}

impl MergedTerm {
    pub fn kappa(&self) -> f64 {
        self.sign_kappa * self.log_abs_kappa.exp()
    }
}

/// ∏(1 + m_ℓ) − 1, saturating.
pub fn term_count(links: &[Link]) -> u128 {
    links.iter().fold(1u128, |acc, l| acc.saturating_mul(1 + l.m_alpha as u128)) - 1
}

fn check_capacity(links: &[Link], cap: usize) -> Result<()> {
    let terms = term_count(links);
    if terms > cap as u128 {
        return Err(Error::Capacity { terms, cap });
    }
    Ok(())
}

/// Enumerates every nonempty-subset term for `links`.
pub fn enumerate_link_terms(links: &[Link], cap: usize) -> Result<Vec<ExpansionTerm>> {
    check_capacity(links, cap)?;
    let l = links.len();
    let rates: Vec<f64> = links.iter().map(Link::rate).collect();
    let ln_rates: Vec<f64> = rates.iter().map(|r| r.ln()).collect();
    let mut out = Vec::with_capacity(term_count(links) as usize);
    let mut k = vec![0u32; l];
    for mask in 1u64..(1u64 << l) {
        let members: Vec<usize> = (0..l).filter(|&i| mask >> i & 1 == 1).collect();
        let mut sorted: Vec<f64> = members.iter().map(|&i| rates[i]).collect();
        // a fixed summation order keeps equal-B terms bit-identical
        sorted.sort_by(f64::total_cmp);
        let b: f64 = sorted.iter().sum();
        let sign = if members.len() % 2 == 1 { -1.0 } else { 1.0 };
        k.iter_mut().for_each(|x| *x = 0);
        loop {
            let mut log_abs = 0.0;
            let mut a = 0;
            for &i in &members {
                let ki = k[i];
                log_abs += ki as f64 * ln_rates[i] - ln_gamma(ki as f64 + 1.0);
                a += ki;
            }
            out.push(ExpansionTerm {
                n: (0..l).map(|i| mask >> i & 1 == 1).collect(),
                k: k.clone(),
                log_abs_kappa: log_abs,
                sign_kappa: sign,
                b,
                a,
            });
            // odometer over k on the member links
            let mut advanced = false;
            for &i in &members {
                if k[i] + 1 < links[i].m_alpha {
                    k[i] += 1;
                    advanced = true;
                    break;
                }
                k[i] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(out)
}

/// Terms for all links of `cfg`, or for the 0-based `subset` of them.
pub fn enumerate_terms(cfg: &ChannelConfig, subset: Option<&[usize]>) -> Result<Vec<ExpansionTerm>> {
    let links = select_links(cfg, subset)?;
    enumerate_link_terms(&links, DEFAULT_TERM_CAP)
}

fn select_links(cfg: &ChannelConfig, subset: Option<&[usize]>) -> Result<Vec<Link>> {
    let all = cfg.links();
    match subset {
        None => Ok(all),
        Some(idx) => idx
            .iter()
            .map(|&i| all.get(i).copied().ok_or(Error::IndexOutOfRange { index: i, links: all.len() }))
            .collect(),
    }
}

/// Merges terms sharing (A, B); exact cancellations are dropped.
pub fn merge_terms(terms: &[ExpansionTerm]) -> Vec<MergedTerm> {
    let mut groups: BTreeMap<(u32, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for t in terms {
        groups.entry((t.a, t.b.to_bits())).or_default().push((t.log_abs_kappa, t.sign_kappa));
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((a, b_bits), parts) in groups {
        let peak = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let mut scaled: Vec<f64> = parts.iter().map(|&(la, s)| s * (la - peak).exp()).collect();
        let (sum, _) = compensated_sum(&mut scaled);
        if sum == 0.0 {
            continue;
        }
        out.push(MergedTerm {
            log_abs_kappa: peak + sum.abs().ln(),
            sign_kappa: sum.signum(),
            b: f64::from_bits(b_bits),
            a,
        });
    }
    out
}

/// Merged expansion for a link set, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct TermSet {
    pub terms: Vec<MergedTerm>,
    /// Number of (n, k) multi-indices before merging.
    pub raw_count: usize,
}

impl TermSet {
    pub fn new(links: &[Link], cap: usize) -> Result<Self> {
        let raw = enumerate_link_terms(links, cap)?;
        Ok(TermSet { raw_count: raw.len(), terms: merge_terms(&raw) })
    }

    /// F_max(x) = 1 + Σ κ e^{−xB} x^A; also returns Σ|term| for error bounds.
    pub fn cdf_parts(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 0.0);
        }
        let ln_x = x.ln();
        let mut t: Vec<f64> = self
            .terms
            .iter()
            .map(|m| m.sign_kappa * (m.log_abs_kappa - x * m.b + m.a as f64 * ln_x).exp())
            .collect();
        t.push(1.0);
        compensated_sum(&mut t)
    }

    /// f_max(x) = Σ κ e^{−xB} x^{A−1} (A − xB).
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln_x = x.ln();
        let mut t: Vec<f64> = self
            .terms
            .iter()
            .map(|m| {
                let w = m.a as f64 - x * m.b;
                m.sign_kappa * w * (m.log_abs_kappa - x * m.b + (m.a as f64 - 1.0) * ln_x).exp()
            })
            .collect();
        compensated_sum(&mut t).0
    }
}

/// CDF of the largest shadowing power at `x`.
pub fn cdf_alpha_max(cfg: &ChannelConfig, x: f64) -> Result<f64> {
    let set = TermSet::new(&cfg.links(), DEFAULT_TERM_CAP)?;
    Ok(set.cdf_parts(x).0)
}

/// Density of the largest shadowing power at `x` > 0.
pub fn pdf_alpha_max(cfg: &ChannelConfig, x: f64) -> Result<f64> {
    let set = TermSet::new(&cfg.links(), DEFAULT_TERM_CAP)?;
    Ok(set.pdf(x))
}

/// P_r = (c_r^{m_r}/Γ(m_r)) Σ κ Γ(A + m_r)/(B + c_r)^{A + m_r}, where the sum
/// runs over the other links' terms plus the empty subset (κ = 1, B = A = 0).
pub fn link_selection_probabilities(links: &[Link], cap: usize) -> Result<Vec<f64>> {
    if links.len() == 1 {
        return Ok(vec![1.0]);
    }
    (0..links.len())
        .map(|r| {
            let others: Vec<Link> =
                links.iter().enumerate().filter(|&(i, _)| i != r).map(|(_, l)| *l).collect();
            let set = TermSet::new(&others, cap)?;
            let m = links[r].m_alpha as f64;
            let c = links[r].rate();
            let lead = m * c.ln() - ln_gamma(m);
            let term = |log_abs_kappa: f64, b: f64, a: f64| {
                (lead + log_abs_kappa + ln_gamma(a + m) - (a + m) * (b + c).ln()).exp()
            };
            let mut t: Vec<f64> =
                set.terms.iter().map(|k| k.sign_kappa * term(k.log_abs_kappa, k.b, k.a as f64)).collect();
            t.push(term(0.0, 0.0, 0.0));
            Ok(compensated_sum(&mut t).0)
        })
        .collect()
}

/// Probability that each link carries the largest shadowing power.
pub fn selection_probabilities(cfg: &ChannelConfig) -> Result<Vec<f64>> {
    link_selection_probabilities(&cfg.links(), DEFAULT_TERM_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: Vec<u32>, g: Vec<f64>) -> ChannelConfig {
        let l = m.len();
        ChannelConfig::at_point(m, vec![1.0; l], g, 0.0).unwrap()
    }

    #[test]
    fn single_exponential_link() {
        let t = enumerate_terms(&cfg(vec![1], vec![1.0]), None).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].sign_kappa, t[0].kappa(), t[0].b, t[0].a), (-1.0, -1.0, 1.0, 0));
    }

    #[test]
    fn two_exponential_links() {
        let t = enumerate_terms(&cfg(vec![1, 1], vec![1.0, 1.0]), None).unwrap();
        let mut summary: Vec<(f64, f64, u32)> = t.iter().map(|t| (t.kappa(), t.b, t.a)).collect();
        summary.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
        assert_eq!(summary, vec![(-1.0, 1.0, 0), (-1.0, 1.0, 0), (1.0, 2.0, 0)]);
        let merged = merge_terms(&t);
        assert_eq!(merged.len(), 2);
        assert!((merged[0].kappa() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn five_terms_match_direct_product() {
        // (1 − e^{−2x}(1 + 2x)) (1 − e^{−x/2})
        let c = cfg(vec![2, 1], vec![1.0, 2.0]);
        let t = enumerate_terms(&c, None).unwrap();
        assert_eq!(t.len(), 5);
        let set = TermSet::new(&c.links(), DEFAULT_TERM_CAP).unwrap();
        for i in 0..=40 {
            let x = i as f64 * 0.25;
            let direct = (1.0 - (-2.0 * x).exp() * (1.0 + 2.0 * x)) * (1.0 - (-x / 2.0).exp());
            assert!((set.cdf_parts(x).0 - direct).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn cdf_examples() {
        let c = cfg(vec![1, 1], vec![1.0, 1.0]);
        assert_eq!(cdf_alpha_max(&c, 0.0).unwrap(), 0.0);
        assert!((cdf_alpha_max(&c, 1.0).unwrap() - 0.399_576_400_893_728).abs() < 1e-14);
        let e = cfg(vec![1], vec![1.0]);
        for &x in &[0.1, 1.0, 7.0] {
            assert!((pdf_alpha_max(&e, x).unwrap() - (-x as f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn pdf_matches_central_difference() {
        let c = cfg(vec![2, 1, 3], vec![0.5, 2.0, 1.3]);
        let h = 1e-5;
        let x = 1.3;
        let fd = (cdf_alpha_max(&c, x + h).unwrap() - cdf_alpha_max(&c, x - h).unwrap()) / (2.0 * h);
        assert!((pdf_alpha_max(&c, x).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn iid_selection_is_uniform() {
        for l in 1..=4 {
            let p = selection_probabilities(&cfg(vec![2; l], vec![3.0; l])).unwrap();
            for v in &p {
                assert!((v - 1.0 / l as f64).abs() < 1e-9, "{p:?}");
            }
        }
    }

    #[test]
    fn capacity_error() {
        let links = vec![Link { m_alpha: 9, m_beta: 1.0, mean_snr: 1.0 }; 7];
        assert!(matches!(TermSet::new(&links, 1000), Err(Error::Capacity { .. })));
    }

    #[test]
    fn subset_enumeration() {
        let c = cfg(vec![2, 1, 3], vec![0.5, 2.0, 1.3]);
        let t = enumerate_terms(&c, Some(&[0, 2])).unwrap();
        // (1+2)(1+3) − 1
        assert_eq!(t.len(), 11);
        assert!(enumerate_terms(&c, Some(&[3])).is_err());
    }
}

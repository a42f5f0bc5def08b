use tasim_core::closed_form::{Model, Modulation};
use tasim_core::config::{ChannelConfig, Link};
use tasim_core::simulator::{
    correlated_shadow_draw, estimate_moments, estimate_outage, estimate_selection, estimate_sep, feedback_bits,
    feedback_corrupt, sample_gamma, SimulationEstimate, Policy, SimulationOptions, Streams,
};
use tasim_core::specfun::reg_lower_gamma;

fn within(x: f64, target: f64, sigma: f64, k: f64) -> bool {
    (x - target).abs() <= k * sigma
}

#[test]
fn gamma_variates_pass_kolmogorov_smirnov() {
    let mut s = Streams::new(11, 0);
    let n = 100_000;
    let (shape, scale) = (2.5, 1.3);
    let mut x: Vec<f64> = (0..n).map(|_| sample_gamma(shape, scale, &mut s.channel)).collect();
    x.sort_by(f64::total_cmp);
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = reg_lower_gamma(shape, v / scale).unwrap();
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    // critical value at α = 0.01
    assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
}

#[test]
fn gamma_variate_moments() {
    let mut s = Streams::new(12, 0);
    let n = 1_000_000;
    let x: Vec<f64> = (0..n).map(|_| sample_gamma(3.0, 2.0, &mut s.channel)).collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(within(mean, 6.0, (12.0 / n as f64).sqrt(), 4.0), "{mean}");
    // Var(s²) ≈ (μ₄ − σ⁴)/n = θ⁴(3k(k+2) − k²)/n
    assert!(within(var, 12.0, (16.0 * 36.0 / n as f64).sqrt(), 4.0), "{var}");
}

/// P(index unchanged) by enumerating every bit-error pattern.
fn correct_rate(l: usize, pe: f64) -> f64 {
    let k = feedback_bits(l);
    let mut total = 0.0;
    for r in 0..l {
        for e in 0..(1usize << k) {
            let flips = e.count_ones() as i32;
            let p = pe.powi(flips) * (1.0 - pe).powi(k as i32 - flips);
            if (r ^ e) % l == r {
                total += p;
            }
        }
    }
    total / l as f64
}

#[test]
fn feedback_error_rates() {
    assert!((correct_rate(4, 0.1) - 0.81).abs() < 1e-15);
    for (l, seed) in [(4usize, 21u64), (3, 22)] {
        let mut s = Streams::new(seed, 0);
        let n = 1_000_000;
        let hits = (0..n).filter(|i| feedback_corrupt(i % l, l, 0.1, &mut s.feedback) == i % l).count();
        let p = correct_rate(l, 0.1);
        let rate = hits as f64 / n as f64;
        assert!(within(rate, p, (p * (1.0 - p) / n as f64).sqrt(), 4.0), "L={l}: {rate} vs {p}");
    }
}

#[test]
fn correlated_shadowing_marginals_and_correlation() {
    let links = vec![Link { m_alpha: 2, m_beta: 1.0, mean_snr: 1.5 }, Link { m_alpha: 2, m_beta: 1.0, mean_snr: 0.5 }];
    let rho = 0.6;
    let n = 1_000_000;
    let mut s = Streams::new(31, 0);
    let draws: Vec<Vec<f64>> = (0..n).map(|_| correlated_shadow_draw(&links, rho, &mut s.channel).unwrap()).collect();
    let mean = |j: usize| draws.iter().map(|d| d[j]).sum::<f64>() / n as f64;
    let (m0, m1) = (mean(0), mean(1));
    // Gamma(2, γ̃/2): mean γ̃, variance γ̃²/2
    assert!(within(m0, 1.5, (1.5f64.powi(2) / 2.0 / n as f64).sqrt(), 4.0), "{m0}");
    assert!(within(m1, 0.5, (0.5f64.powi(2) / 2.0 / n as f64).sqrt(), 4.0), "{m1}");
    let cov = draws.iter().map(|d| (d[0] - m0) * (d[1] - m1)).sum::<f64>() / n as f64;
    let v0 = draws.iter().map(|d| (d[0] - m0).powi(2)).sum::<f64>() / n as f64;
    let v1 = draws.iter().map(|d| (d[1] - m1).powi(2)).sum::<f64>() / n as f64;
    let r = cov / (v0 * v1).sqrt();
    // the sample correlation's stderr is about (1 − ρ²)/√n
    assert!(within(r, rho, (1.0 - rho * rho) / (n as f64).sqrt(), 4.0), "{r}");
}

#[test]
fn iid_selection_frequencies_are_uniform() {
    let cfg = ChannelConfig::at_point(vec![2; 3], vec![1.0; 3], vec![1.0; 3], 0.0).unwrap();
    let opts = SimulationOptions { trials: 1_000_000, seed: 41, ..Default::default() };
    for e in estimate_selection(&cfg, &opts).unwrap() {
        assert!(within(e.value, 1.0 / 3.0, e.stderr, 4.0), "{e:?}");
    }
}

#[test]
fn single_branch_moments() {
    let cfg = ChannelConfig::at_point(vec![1], vec![1.0], vec![1.0], 0.0).unwrap();
    let opts = SimulationOptions { trials: 1_000_000, seed: 51, ..Default::default() };
    let m1 = estimate_moments(&cfg, &opts, 1).unwrap();
    let m2 = estimate_moments(&cfg, &opts, 2).unwrap();
    assert!(within(m1.value, 1.0, m1.stderr, 4.0), "{m1:?}");
    assert!(within(m2.value, 4.0, m2.stderr, 4.0), "{m2:?}");
    let af = (m2.value - m1.value.powi(2)) / m1.value.powi(2);
    assert!((af - 3.0).abs() < 0.2, "{af}");
}

#[test]
fn moments_match_closed_form_on_ind_links() {
    // distinct fading, identical shadowing: the mixture over P_r is exact here
    let opts = SimulationOptions { trials: 2_000_000, seed: 61, ..Default::default() };
    let iid = ChannelConfig::at_point(vec![2; 3], vec![1.5, 2.0, 4.0], vec![1.0; 3], 3.0).unwrap();
    let m = Model::new(&iid).unwrap();
    for p in [1u32, 2] {
        let e = estimate_moments(&iid, &opts, p).unwrap();
        let c = m.moment_factorized(p as f64).unwrap();
        assert!(within(e.value, c, e.stderr, 3.0), "p={p}: {} ± {} vs {c}", e.value, e.stderr);
    }
}

#[test]
fn zero_threshold_and_policy_ordering() {
    let cfg = ChannelConfig::at_point(vec![1; 3], vec![2.0; 3], vec![1.0; 3], 10.0).unwrap();
    let opts = SimulationOptions { trials: 200_000, seed: 71, ..Default::default() };
    assert_eq!(estimate_outage(&cfg, &opts, 0.0).unwrap().value, 0.0);
    let ssi = estimate_outage(&cfg, &opts, 1.0).unwrap();
    let random = estimate_outage(&cfg, &SimulationOptions { policy: Policy::Random, ..opts }, 1.0).unwrap();
    assert!(ssi.value <= random.value + 3.0 * (ssi.stderr.powi(2) + random.stderr.powi(2)).sqrt());
}

#[test]
fn single_link_always_uses_it() {
    let cfg = ChannelConfig::at_point(vec![1], vec![1.0], vec![1.0], 0.0).unwrap();
    let opts = SimulationOptions { trials: 10_000, seed: 81, pe: 0.3, ..Default::default() };
    let sel = estimate_selection(&cfg, &opts).unwrap();
    assert_eq!(sel[0].value, 1.0);
}

/// Counts how often value ± 3·stderr covers `truth` over independent seeds,
/// and compares the mean reported stderr with the spread of the estimates.
fn coverage(truth: f64, run: impl Fn(u64) -> SimulationEstimate) -> (usize, f64) {
    let est: Vec<SimulationEstimate> = (0..200).map(|k| run(1000 + k)).collect();
    let hits = est.iter().filter(|e| within(e.value, truth, e.stderr, 3.0)).count();
    let n = est.len() as f64;
    let mean = est.iter().map(|e| e.value).sum::<f64>() / n;
    let spread = (est.iter().map(|e| (e.value - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let reported = est.iter().map(|e| e.stderr).sum::<f64>() / n;
    (hits, reported / spread)
}

#[test]
fn stderr_intervals_cover_closed_forms() {
    let cfg = ChannelConfig::at_point(vec![1; 2], vec![2.0; 2], vec![1.0; 2], 10.0).unwrap();
    let m = Model::new(&cfg).unwrap();
    let bpsk = Modulation::bpsk();
    let opts = |seed| SimulationOptions { trials: 20_000, seed, partitions: 4, ..Default::default() };
    let cases: [(&str, f64, Box<dyn Fn(u64) -> SimulationEstimate>); 3] = [
        ("outage", m.outage_eval(1.0).unwrap().value, Box::new(|s| estimate_outage(&cfg, &opts(s), 1.0).unwrap())),
        ("sep", m.sep_eval(&bpsk).unwrap().value, Box::new(|s| estimate_sep(&cfg, &opts(s), &bpsk).unwrap())),
        ("moment", m.moment_factorized(1.0).unwrap(), Box::new(|s| estimate_moments(&cfg, &opts(s), 1).unwrap())),
    ];
    for (name, truth, run) in cases {
        let (hits, ratio) = coverage(truth, run);
        assert!(hits >= 198, "{name}: {hits}/200 intervals cover {truth}");
        // the stderr of a 200-sample standard deviation is about 5%
        assert!((ratio - 1.0).abs() < 0.2, "{name}: reported/empirical stderr = {ratio}");
    }
}

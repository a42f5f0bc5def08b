use crate::error::{Error, Result};
use std::f64::consts::PI;

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) for any real x that is not a pole. Negative arguments go through the
/// reflection formula inside `tgamma`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma", "NaN argument"));
    }
    if is_pole(x) {
        return Err(Error::Pole {
            function: "gamma",
            at: x,
            hint: "non-positive integer argument",
        });
    }
    Ok(libm::tgamma(x))
}

/// ln Γ(x) for x > 0. For negative non-integer x this is ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// (ln|Γ(x)|, sign Γ(x)).
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

/// 1/Γ(x), which is entire: zero at the poles of Γ.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else if x > 170.0 {
        (-ln_gamma(x)).exp()
    } else {
        1.0 / libm::tgamma(x)
    }
}

/// Digamma ψ(x) = Γ'(x)/Γ(x). NaN at the poles.
pub fn digamma(x: f64) -> f64 {
    if is_pole(x) || x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 20.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    acc + x.ln() - 0.5 / x - tail
}

/// Taylor coefficients of 1/Γ(1+x) about 0.
const RECIP_GAMMA_1P: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
];

/// Temme's auxiliary functions for |mu| <= 1/2:
/// gam1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / (2μ), gam2 = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2,
/// plus 1/Γ(1+μ) and 1/Γ(1−μ). Evaluated from the even/odd parts of the
/// Taylor series so that gam1 has no cancellation near μ = 0.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in (0..RECIP_GAMMA_1P.len()).rev() {
        if k % 2 == 0 {
            even = even * mu2 + RECIP_GAMMA_1P[k];
        } else {
            odd = odd * mu2 + RECIP_GAMMA_1P[k];
        }
    }
    // 1/Γ(1+μ) = even + μ·odd, 1/Γ(1−μ) = even − μ·odd
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, even + mu * odd, even - mu * odd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!((gamma_fn(0.5).unwrap() - 1.772_453_850_905_516).abs() < 1e-15);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        // reflection: Γ(−1.5) = 4√π/3
        let expect = 4.0 * PI.sqrt() / 3.0;
        assert!((gamma_fn(-1.5).unwrap() - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn gamma_poles_are_errors() {
        assert!(matches!(gamma_fn(0.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma_fn(-3.0), Err(Error::Pole { .. })));
        assert_eq!(reciprocal_gamma(-2.0), 0.0);
    }

    #[test]
    fn ln_gamma_large_argument() {
        // Stirling with three correction terms at x = 1000
        let x: f64 = 1000.0;
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        assert!((ln_gamma(x) - stirling).abs() < 1e-10);
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-15);
        // ψ(1/2) = −γ − 2 ln 2
        assert!((digamma(0.5) + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
        // ψ(x+1) = ψ(x) + 1/x
        for &x in &[0.3, 2.7, 11.5, -0.4] {
            assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-12);
        }
    }

    #[test]
    fn temme_gammas_match_direct_evaluation() {
        for &mu in &[0.5, 0.4, 0.25, -0.3, 0.1] {
            let (g1, g2, gp, gm) = temme_gammas(mu);
            let rp = 1.0 / libm::tgamma(1.0 + mu);
            let rm = 1.0 / libm::tgamma(1.0 - mu);
            assert!((gp - rp).abs() < 1e-15, "mu={mu}");
            assert!((gm - rm).abs() < 1e-15, "mu={mu}");
            assert!((g1 - (rm - rp) / (2.0 * mu)).abs() < 1e-13, "mu={mu}");
            assert!((g2 - (rm + rp) / 2.0).abs() < 1e-15, "mu={mu}");
        }
        // limit μ → 0: gam1 → −c₁ = −γ
        let (g1, g2, _, _) = temme_gammas(0.0);
        assert!((g1 + 0.577_215_664_901_532_9).abs() < 1e-16);
        assert_eq!(g2, 1.0);
    }
}

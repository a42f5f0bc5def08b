//! Scenario parameters, validation, and the JSON scenario format.
//!
//! Link indices are 0-based throughout the library.

use crate::closed_form::{Family, Modulation};
use crate::error::{Error, Result};
use crate::simulator::{Policy, SimulationOptions};
use serde::{Deserialize, Serialize};

/// dB → linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio → dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl SweepSpec {
    pub fn new(start_db: f64, stop_db: f64, step_db: f64) -> Result<Self> {
        if !(start_db.is_finite() && stop_db.is_finite()) {
            return Err(Error::validation("snr_db", "start and stop must be finite"));
        }
        if !(step_db > 0.0) || !step_db.is_finite() {
            return Err(Error::validation("snr_db.step", "must be > 0"));
        }
        if start_db > stop_db {
            return Err(Error::validation("snr_db.start", "must not exceed stop"));
        }
        Ok(SweepSpec { start_db, stop_db, step_db })
    }

    /// Grid points `start + i·step`, never beyond `stop` (with a 1e-9 step
    /// allowance for accumulated rounding in the caller's decimal steps).
    pub fn grid(&self) -> Vec<f64> {
        let span = (self.stop_db - self.start_db) / self.step_db;
        let n = (span + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }

    /// Parses `start:stop:step`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::Parse {
            key: "snr-db".into(),
            message: format!("expected start:stop:step, got {text:?}"),
        };
        if parts.len() != 3 {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        SweepSpec::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

/// A single transmit SNR or a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrSpec {
    Point(f64),
    Sweep(SweepSpec),
}

impl SnrSpec {
    /// The point value, or the first grid point of a sweep.
    pub fn reference_db(&self) -> f64 {
        match self {
            SnrSpec::Point(x) => *x,
            SnrSpec::Sweep(s) => s.start_db,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        match self {
            SnrSpec::Point(x) => vec![*x],
            SnrSpec::Sweep(s) => s.grid(),
        }
    }
}

/// Per-link parameters at one SNR point, the unit consumed by the analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub m_alpha: u32,
    pub m_beta: f64,
    /// γ̃ = Ω · E_s/N_0, linear.
    pub mean_snr: f64,
}

impl Link {
    /// m_α/γ̃, the exponential rate of the shadowing density.
    pub fn rate(&self) -> f64 {
        self.m_alpha as f64 / self.mean_snr
    }
}

/// Validated channel scenario. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    m_alpha: Vec<u32>,
    m_beta: Vec<f64>,
    omega: Vec<f64>,
    snr_db: SnrSpec,
}

impl ChannelConfig {
    pub fn new(m_alpha: Vec<u32>, m_beta: Vec<f64>, omega: Vec<f64>, snr_db: SnrSpec) -> Result<Self> {
        let l = m_alpha.len();
        validate_links(l, &m_alpha.iter().map(|&m| m as f64).collect::<Vec<_>>(), &m_beta, &omega)?;
        let cfg = ChannelConfig { m_alpha, m_beta, omega, snr_db };
        for db in cfg.snr_db.grid() {
            for ell in 0..l {
                let g = cfg.omega[ell] * db_to_linear(db);
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::validation(
                        format!("omega[{ell}]"),
                        format!("mean branch SNR at {db} dB is {g}, must be finite and > 0"),
                    ));
                }
            }
        }
        Ok(cfg)
    }

    /// Shorthand for a single-point configuration.
    pub fn at_point(m_alpha: Vec<u32>, m_beta: Vec<f64>, omega: Vec<f64>, snr_db: f64) -> Result<Self> {
        ChannelConfig::new(m_alpha, m_beta, omega, SnrSpec::Point(snr_db))
    }

    /// Number of transmit antennas L.
    pub fn links_count(&self) -> usize {
        self.m_alpha.len()
    }

    pub fn m_alpha(&self) -> &[u32] {
        &self.m_alpha
    }

    pub fn m_beta(&self) -> &[f64] {
        &self.m_beta
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn snr_db(&self) -> SnrSpec {
        self.snr_db
    }

    /// Same links at a different SNR point.
    pub fn at_snr_db(&self, db: f64) -> Result<Self> {
        ChannelConfig::new(self.m_alpha.clone(), self.m_beta.clone(), self.omega.clone(), SnrSpec::Point(db))
    }

    /// Same links with the SNR replaced by `spec`.
    pub fn with_snr(&self, spec: SnrSpec) -> Result<Self> {
        ChannelConfig::new(self.m_alpha.clone(), self.m_beta.clone(), self.omega.clone(), spec)
    }

    /// γ̃_ℓ = Ω_ℓ · E_s/N_0 at the reference SNR, linear.
    pub fn mean_branch_snr(&self, ell: usize) -> Result<f64> {
        if ell >= self.links_count() {
            return Err(Error::IndexOutOfRange { index: ell, links: self.links_count() });
        }
        Ok(self.omega[ell] * db_to_linear(self.snr_db.reference_db()))
    }

    /// All links at the reference SNR.
    pub fn links(&self) -> Vec<Link> {
        let snr = db_to_linear(self.snr_db.reference_db());
        (0..self.links_count())
            .map(|i| Link { m_alpha: self.m_alpha[i], m_beta: self.m_beta[i], mean_snr: self.omega[i] * snr })
            .collect()
    }
}

fn validate_links(l: usize, m_alpha: &[f64], m_beta: &[f64], omega: &[f64]) -> Result<()> {
    if l == 0 {
        return Err(Error::validation("L", "must be ≥ 1"));
    }
    for (name, len) in [("m_alpha", m_alpha.len()), ("m_beta", m_beta.len()), ("omega", omega.len())] {
        if len != l {
            return Err(Error::validation(name, format!("length {len} differs from L = {l}")));
        }
    }
    for (i, &m) in m_alpha.iter().enumerate() {
        if !(m >= 1.0 && m == m.trunc() && m <= u32::MAX as f64) {
            return Err(Error::validation(format!("m_alpha[{i}]"), format!("{m} must be a positive integer")));
        }
    }
    for (i, &m) in m_beta.iter().enumerate() {
        if !(m >= 0.5 && m.is_finite()) {
            return Err(Error::validation(format!("m_beta[{i}]"), format!("{m} must be finite and ≥ 0.5")));
        }
    }
    for (i, &w) in omega.iter().enumerate() {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::validation(format!("omega[{i}]"), format!("{w} must be finite and > 0")));
        }
    }
    Ok(())
}

/// Constants tying the per-link mean SNRs to one reference SNR:
/// γ̄ = κ_ℓ γ̃_ℓ for every ℓ.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticConfig {
    pub kappa: Vec<f64>,
    pub gamma_bar: f64,
}

impl AsymptoticConfig {
    /// Checks positivity and the common-γ̄ constraint against `cfg`.
    pub fn new(cfg: &ChannelConfig, kappa: Vec<f64>, gamma_bar: f64) -> Result<Self> {
        if kappa.len() != cfg.links_count() {
            return Err(Error::validation("kappa", "length differs from L"));
        }
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return Err(Error::validation("gamma_bar", "must be finite and > 0"));
        }
        for (i, link) in cfg.links().iter().enumerate() {
            if !(kappa[i] > 0.0 && kappa[i].is_finite()) {
                return Err(Error::validation(format!("kappa[{i}]"), "must be finite and > 0"));
            }
            let implied = kappa[i] * link.mean_snr;
            if ((implied - gamma_bar) / gamma_bar).abs() > 1e-12 {
                return Err(Error::validation(
                    format!("kappa[{i}]"),
                    format!("κ·γ̃ = {implied} differs from γ̄ = {gamma_bar}"),
                ));
            }
        }
        Ok(AsymptoticConfig { kappa, gamma_bar })
    }

    /// γ̄ = E_s/N_0 at the reference SNR, hence κ_ℓ = 1/Ω_ℓ.
    pub fn from_config(cfg: &ChannelConfig) -> Self {
        let gamma_bar = db_to_linear(cfg.snr_db().reference_db());
        let kappa = cfg.links().iter().map(|l| gamma_bar / l.mean_snr).collect();
        AsymptoticConfig { kappa, gamma_bar }
    }
}

/// Everything a scenario file can carry.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: ChannelConfig,
    pub modulation: Option<Modulation>,
    pub sim: Option<SimulationOptions>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(rename = "L")]
    l: u64,
    m_alpha: Vec<f64>,
    m_beta: Vec<f64>,
    omega: Vec<f64>,
    snr_db: RawSnr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulation: Option<RawModulation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sim: Option<RawSim>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawSnr {
    Point(f64),
    Sweep(RawSweep),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModulation {
    family: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    partitions: Option<usize>,
}

/// Parses and validates a scenario's channel block.
pub fn parse_config(text: &str) -> Result<ChannelConfig> {
    parse_scenario(text).map(|s| s.channel)
}

/// Parses and validates a full scenario document (strict: unknown keys fail).
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse { key: if path == "." { "<document>".into() } else { path }, message: e.inner().to_string() }
    })?;
    let l = raw.l as usize;
    validate_links(l, &raw.m_alpha, &raw.m_beta, &raw.omega)?;
    let snr = match raw.snr_db {
        RawSnr::Point(x) => SnrSpec::Point(x),
        RawSnr::Sweep(s) => SnrSpec::Sweep(SweepSpec::new(s.start, s.stop, s.step)?),
    };
    let channel = ChannelConfig::new(raw.m_alpha.iter().map(|&m| m as u32).collect(), raw.m_beta, raw.omega, snr)?;
    let modulation = raw
        .modulation
        .map(|m| {
            let family = Family::from_name(&m.family)
                .ok_or_else(|| Error::validation("modulation.family", format!("unknown family {:?}", m.family)))?;
            Modulation::new(family, m.m.unwrap_or(2))
        })
        .transpose()?;
    let sim = raw
        .sim
        .map(|s| {
            let mut opts = SimulationOptions::default();
            if let Some(t) = s.trials {
                opts.trials = t;
            }
            if let Some(seed) = s.seed {
                opts.seed = seed;
            }
            if let Some(rho) = s.rho {
                opts.rho = rho;
            }
            if let Some(pe) = s.pe {
                opts.pe = pe;
            }
            if let Some(p) = s.partitions {
                opts.partitions = p;
            }
            if let Some(p) = s.policy {
                opts.policy = Policy::from_name(&p)
                    .ok_or_else(|| Error::validation("sim.policy", format!("unknown policy {p:?}")))?;
            }
            opts.validate()?;
            Ok::<_, Error>(opts)
        })
        .transpose()?;
    Ok(Scenario { channel, modulation, sim })
}

/// Serializes a scenario; `parse_scenario` inverts this exactly.
pub fn serialize_scenario(s: &Scenario) -> String {
    let c = &s.channel;
    let raw = RawScenario {
        l: c.links_count() as u64,
        m_alpha: c.m_alpha.iter().map(|&m| m as f64).collect(),
        m_beta: c.m_beta.clone(),
        omega: c.omega.clone(),
        snr_db: match c.snr_db {
            SnrSpec::Point(x) => RawSnr::Point(x),
            SnrSpec::Sweep(w) => RawSnr::Sweep(RawSweep { start: w.start_db, stop: w.stop_db, step: w.step_db }),
        },
        modulation: s.modulation.map(|m| RawModulation {
            family: m.family().name().to_string(),
            m: m.family().uses_order().then_some(m.order()),
        }),
        sim: s.sim.map(|o| RawSim {
            trials: Some(o.trials),
            seed: Some(o.seed),
            rho: Some(o.rho),
            pe: Some(o.pe),
            policy: Some(o.policy.name().to_string()),
            partitions: Some(o.partitions),
        }),
    };
    serde_json::to_string_pretty(&raw).expect("scenario serialization cannot fail")
}

/// Serializes the channel block alone.
pub fn serialize_config(cfg: &ChannelConfig) -> String {
    serialize_scenario(&Scenario { channel: cfg.clone(), modulation: None, sim: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_case() {
        let cfg = parse_config(r#"{"L":1,"m_alpha":[1],"m_beta":[1],"omega":[1],"snr_db":0}"#).unwrap();
        assert_eq!(cfg.mean_branch_snr(0).unwrap(), 1.0);
    }

    #[test]
    fn non_integer_m_alpha_names_the_entry() {
        let err = parse_config(r#"{"L":2,"m_alpha":[1.5,1],"m_beta":[1,1],"omega":[1,1],"snr_db":0}"#).unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "m_alpha[0]"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn three_link_scenario() {
        let cfg =
            parse_config(r#"{"L":3,"m_alpha":[1,1,1],"m_beta":[2,3,1],"omega":[1,1,1],"snr_db":20}"#).unwrap();
        assert_eq!(cfg.links_count(), 3);
        assert!((cfg.mean_branch_snr(2).unwrap() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn mean_branch_snr_examples() {
        let at = |w: f64, db: f64| ChannelConfig::at_point(vec![1], vec![1.0], vec![w], db).unwrap();
        assert_eq!(at(1.0, 0.0).mean_branch_snr(0).unwrap(), 1.0);
        assert_eq!(at(2.0, 10.0).mean_branch_snr(0).unwrap(), 20.0);
        assert!((at(1.0, 30.0).mean_branch_snr(0).unwrap() - 1000.0).abs() < 1e-9);
        assert!(matches!(at(1.0, 0.0).mean_branch_snr(1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let err = parse_config(r#"{"L":1,"m_alpha":[1],"m_beta":[1],"omega":[1],"snr_db":0,"extra":1}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err:?}");
        let err = parse_config(r#"{"L":1,"m_alpha":[1],"m_beta":["x"],"omega":[1],"snr_db":0}"#).unwrap_err();
        match err {
            Error::Parse { key, .. } => assert!(key.starts_with("m_beta"), "{key}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn length_and_range_checks() {
        let e = parse_config(r#"{"L":2,"m_alpha":[1],"m_beta":[1,1],"omega":[1,1],"snr_db":0}"#).unwrap_err();
        assert!(matches!(e, Error::Validation { ref field, .. } if field == "m_alpha"));
        let e = parse_config(r#"{"L":1,"m_alpha":[1],"m_beta":[0.4],"omega":[1],"snr_db":0}"#).unwrap_err();
        assert!(matches!(e, Error::Validation { ref field, .. } if field == "m_beta[0]"));
        let e = parse_config(r#"{"L":1,"m_alpha":[1],"m_beta":[1],"omega":[0],"snr_db":0}"#).unwrap_err();
        assert!(matches!(e, Error::Validation { ref field, .. } if field == "omega[0]"));
    }

    #[test]
    fn sweep_grid_is_inclusive() {
        let s = SweepSpec::new(0.0, 1.0, 0.1).unwrap();
        let g = s.grid();
        assert_eq!(g.len(), 11);
        assert!(*g.last().unwrap() <= 1.0 + 1e-12);
        assert_eq!(SweepSpec::new(5.0, 5.0, 1.0).unwrap().grid(), vec![5.0]);
        assert_eq!(SweepSpec::new(0.0, 2.5, 1.0).unwrap().grid(), vec![0.0, 1.0, 2.0]);
        assert!(SweepSpec::new(1.0, 0.0, 1.0).is_err());
        assert!(SweepSpec::parse("0:40:5").is_ok());
        assert!(SweepSpec::parse("0:40").is_err());
    }

    #[test]
    fn asymptotic_config_constraint() {
        let cfg = ChannelConfig::at_point(vec![1, 2], vec![1.0, 2.0], vec![1.0, 4.0], 10.0).unwrap();
        let a = AsymptoticConfig::from_config(&cfg);
        assert!((a.kappa[1] - 0.25).abs() < 1e-15);
        assert!(AsymptoticConfig::new(&cfg, a.kappa.clone(), a.gamma_bar).is_ok());
        assert!(AsymptoticConfig::new(&cfg, vec![1.0, 1.0], 10.0).is_err());
    }
}

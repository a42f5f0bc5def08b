//! Cross-check of every closed form against its quadrature oracle.

use crate::closed_form::{Model, Modulation};
use crate::config::ChannelConfig;
use crate::error::Result;
use crate::oracle;
use crate::quad::QuadratureReport;
use std::fmt;

/// Required agreement per check family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    /// Absolute, expansion against direct product.
    pub expansion: f64,
    /// Relative, conditional CDF and outage.
    pub cdf: f64,
    /// Absolute, selection probabilities.
    pub selection: f64,
    pub mgf: f64,
    pub sep: f64,
    pub moment: f64,
    /// Requested oracle tolerance.
    pub quad_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            expansion: 1e-10,
            cdf: 1e-6,
            selection: 1e-8,
            mgf: 1e-6,
            sep: 1e-6,
            moment: 1e-8,
            quad_tol: 1e-11,
        }
    }
}

/// Deliberate faults for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the merged κ at this index.
    KappaSign(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub achieved: f64,
    pub required: f64,
    /// The oracle itself reported convergence.
    pub converged: bool,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.converged && self.achieved <= self.required
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    /// Failing row with the largest achieved/required ratio.
    pub fn worst(&self) -> Option<&CheckRow> {
        self.rows
            .iter()
            .filter(|r| !r.passed())
            .max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }
}

fn ratio(r: &CheckRow) -> f64 {
    if r.achieved.is_nan() {
        f64::INFINITY
    } else {
        r.achieved / r.required
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<36} {:>12} {:>12}  result", "check", "achieved", "required")?;
        for r in &self.rows {
            let verdict = match (r.passed(), r.converged) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "FAIL (oracle not converged)",
            };
            writeln!(f, "{:<36} {:>12.3e} {:>12.3e}  {verdict}", r.check, r.achieved, r.required)?;
        }
        Ok(())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

struct Table {
    rows: Vec<CheckRow>,
}

impl Table {
    /// Adds the worst case of a family as one row.
    fn push(&mut self, check: impl Into<String>, required: f64, cases: impl IntoIterator<Item = (f64, bool)>) {
        let mut achieved: f64 = 0.0;
        let mut converged = true;
        for (e, ok) in cases {
            // NaN must fail, so it is carried explicitly
            achieved = if e.is_nan() || achieved.is_nan() { f64::NAN } else { achieved.max(e) };
            converged &= ok;
        }
        self.rows.push(CheckRow { check: check.into(), achieved, required, converged });
    }
}

fn closed_or_nan(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// Runs the full cross-check suite at the config's reference SNR.
pub fn validate(
    cfg: &ChannelConfig,
    modulation: &Modulation,
    profile: &ToleranceProfile,
    fault: Option<Fault>,
) -> Result<ValidationReport> {
    let mut model = Model::new(cfg)?;
    if let Some(Fault::KappaSign(i)) = fault {
        model.corrupt_kappa_sign(i);
    }
    let links = cfg.links();
    let tol = profile.quad_tol;
    let mut table = Table { rows: Vec::new() };

    let mean_alpha: f64 = links.iter().map(|l| l.mean_snr).sum::<f64>() / links.len() as f64;
    let grid: Vec<f64> = (0..50).map(|i| mean_alpha * 10f64.powf(-3.0 + 5.0 * i as f64 / 49.0)).collect();
    table.push(
        "expansion vs product of gammas",
        profile.expansion,
        grid.iter().map(|&x| {
            let e = model.terms().cdf_parts(x).0;
            ((e - oracle::cdf_alpha_max_product(&links, x)).abs(), true)
        }),
    );

    let sel = oracle::quad_selection_probabilities_links(&links, tol);
    let p = model.selection_probabilities();
    table.push(
        "selection probabilities",
        profile.selection,
        p.iter().zip(&sel).map(|(&c, q)| ((c - q.value).abs(), q.converged)),
    );
    table.push("selection probabilities sum", 1e-9, [((p.iter().sum::<f64>() - 1.0).abs(), true)]);

    let m1 = oracle::moment_factorized(cfg, 1.0, tol);
    let x_points: Vec<f64> = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0].iter().map(|f| f * m1.value).collect();
    for r in 0..links.len() {
        table.push(
            format!("conditional cdf, link {r}"),
            profile.cdf,
            x_points.iter().map(|&x| {
                let q = oracle::quad_cdf_conditional_links(&links, r, x, tol);
                let c = closed_or_nan(model.cdf_conditional(r, x));
                if c.abs() < 1e-12 && q.value.abs() < 1e-12 {
                    (0.0, q.converged)
                } else {
                    (rel(c, q.value), q.converged)
                }
            }),
        );
    }
    let w: Vec<f64> = sel.iter().map(|q| q.value).collect();
    table.push(
        "outage",
        profile.cdf,
        x_points.iter().map(|&x| {
            let q = oracle::quad_outage_links(&links, &w, x, tol);
            (rel(closed_or_nan(model.outage(x)), q.value), q.converged)
        }),
    );

    table.push(
        "mgf",
        profile.mgf,
        [0.1, 1.0, 10.0].iter().map(|&s0| {
            let s = s0 / m1.value;
            let q = oracle::quad_mgf_links(&links, &w, s, tol);
            (rel(closed_or_nan(model.mgf(s)), q.value), q.converged)
        }),
    );

    let q = oracle::quad_sep_links(&links, &w, modulation, tol);
    table.push(format!("sep, {modulation}"), profile.sep, [(rel(closed_or_nan(model.sep(modulation)), q.value), q.converged)]);

    let m2 = oracle::moment_factorized(cfg, 2.0, tol);
    let moments: [(f64, &QuadratureReport); 2] = [(1.0, &m1), (2.0, &m2)];
    table.push(
        "moments p=1,2",
        profile.moment,
        moments.iter().map(|&(p, q)| (rel(closed_or_nan(model.moment_factorized(p)), q.value), q.converged)),
    );

    Ok(ValidationReport { rows: table.rows })
}

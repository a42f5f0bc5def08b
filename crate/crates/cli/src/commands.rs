use crate::rows::{order_rows, write_rows, SweepRow};
use crate::{CliError, Common};
use rayon::prelude::*;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use tasim_core::asymptotics::{asymptotic_outage, asymptotic_sep, zeta_coefficient};
use tasim_core::config::{db_to_linear, parse_scenario, SweepSpec};
use tasim_core::simulator::{self, SimulationEstimate};
use tasim_core::validate::{Fault, ToleranceProfile};
use tasim_core::{
    oracle, AsymptoticConfig, ChannelConfig, Method, Model, Modulation, Policy, RoutedMetric, Scenario,
    SimulationOptions, SnrSpec,
};

/// Requested oracle tolerance for `--method oracle` rows.
const ORACLE_TOL: f64 = 1e-10;

/// A scenario with the command-line overrides applied.
struct Context {
    channel: ChannelConfig,
    modulation: Modulation,
    sim: SimulationOptions,
    methods: Vec<Method>,
    grid: Vec<f64>,
    gamma_th: f64,
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

fn load(c: &Common) -> Result<Context, CliError> {
    let text = std::fs::read_to_string(&c.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", c.config.display())))?;
    let Scenario { channel, modulation, sim } = parse_scenario(&text)?;
    let channel = match &c.snr_db {
        Some(s) if s.contains(':') => channel.with_snr(SnrSpec::Sweep(SweepSpec::parse(s)?))?,
        Some(s) => {
            let x: f64 = s.parse().map_err(|_| CliError::Config(format!("--snr-db {s:?} is not a number or sweep")))?;
            channel.with_snr(SnrSpec::Point(x))?
        }
        None => channel,
    };
    let modulation = match &c.modulation {
        Some(m) => Modulation::parse(m)?,
        None => modulation.unwrap_or_else(Modulation::bpsk),
    };
    let mut opts = sim.unwrap_or_default();
    if let Some(t) = c.trials {
        opts.trials = t;
    }
    if let Some(s) = c.seed {
        opts.seed = s;
    }
    if let Some(p) = c.pe {
        opts.pe = p;
    }
    if let Some(r) = c.rho {
        opts.rho = r;
    }
    if let Some(p) = c.partitions {
        opts.partitions = p;
    }
    if let Some(p) = &c.policy {
        opts.policy = Policy::from_name(p).ok_or_else(|| CliError::Config(format!("unknown policy {p:?}")))?;
    }
    let methods = c
        .method
        .iter()
        .map(|m| Method::from_tag(m.trim()).ok_or_else(|| CliError::Config(format!("unknown method {m:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if methods.contains(&Method::MonteCarlo) {
        opts.validate()?;
    }
    let grid = channel.snr_db().grid();
    Ok(Context { channel, modulation, sim: opts, methods, grid, gamma_th: db_to_linear(c.gamma_th_db) })
}

fn emit(c: &Common, mut rows: Vec<SweepRow>, mc: Option<&SimulationOptions>, notes: &[&str]) -> Result<(), CliError> {
    order_rows(&mut rows);
    let io_err = |e: io::Error| CliError::Config(format!("cannot write output: {e}"));
    match &c.out {
        Some(p) => {
            write_rows(File::create(p).map_err(io_err)?, &rows).map_err(config_err)?;
            if mc.is_some() || !notes.is_empty() {
                write_metadata(p, mc, notes)?;
            }
        }
        None => {
            write_rows(io::stdout().lock(), &rows).map_err(config_err)?;
            if let Some(opts) = mc {
                eprintln!("# {}", provenance(opts));
            }
            for n in notes {
                eprintln!("# {n}");
            }
        }
    }
    let failed: Vec<String> = rows.iter().filter(|r| r.is_failed()).map(|r| format!("{}@{}dB", r.metric, r.snr_db)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{} row(s) failed: {}", failed.len(), failed.join(", "))))
    }
}

fn provenance(opts: &SimulationOptions) -> String {
    let e = SimulationEstimate {
        value: 0.0,
        stderr: 0.0,
        trials: opts.trials,
        seed: opts.seed,
        partitions: opts.partitions,
        policy: opts.policy,
    };
    format!("{} trials={} pe={} rho={}", e.provenance(), opts.trials, opts.pe, opts.rho)
}

/// Run metadata next to the CSV as `<out>.meta.json`.
fn write_metadata(out: &Path, mc: Option<&SimulationOptions>, notes: &[&str]) -> Result<(), CliError> {
    let mut meta = serde_json::Map::new();
    if let Some(opts) = mc {
        meta.insert("seed".into(), opts.seed.into());
        meta.insert("trials".into(), opts.trials.into());
        meta.insert("partitions".into(), opts.partitions.into());
        meta.insert("policy".into(), opts.policy.name().into());
        meta.insert("pe".into(), opts.pe.into());
        meta.insert("rho".into(), opts.rho.into());
        meta.insert("sub_seed".into(), "splitmix64(seed + (i+1) * 0x9E3779B97F4A7C15) for chunk i".into());
        meta.insert("streams".into(), serde_json::json!({"channel": 0, "feedback": 1, "policy": 2}));
        meta.insert(
            "interpretations".into(),
            serde_json::json!({
                "feedback_index": "k-bit index with independent flips, mapped modulo L",
                "correlation": "shared Gaussian component with normal correlation sqrt(rho) per degree of freedom",
            }),
        );
    }
    if !notes.is_empty() {
        meta.insert("notes".into(), notes.iter().map(|n| serde_json::Value::from(*n)).collect());
    }
    let mut path = out.as_os_str().to_owned();
    path.push(".meta.json");
    let mut f = File::create(&path).map_err(|e| CliError::Config(format!("cannot write metadata: {e}")))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&meta).expect("plain JSON values")).map_err(config_err)
}

fn mc_rows(grid: &[f64], metric: &str, est: Vec<SimulationEstimate>) -> Vec<SweepRow> {
    grid.iter()
        .zip(est)
        .map(|(&s, e)| SweepRow {
            stderr: Some(e.stderr),
            trials: Some(e.trials),
            ..SweepRow::point(s, metric, Method::MonteCarlo, e.value)
        })
        .collect()
}

/// Row from a fallible evaluation; configuration errors abort, numerical
/// ones become failed rows.
fn row_or_failed(
    snr: f64,
    metric: &str,
    method: Method,
    r: tasim_core::Result<(f64, Method)>,
) -> Result<SweepRow, CliError> {
    match r {
        Ok((v, m)) => Ok(SweepRow::point(snr, metric, m, v)),
        Err(e @ (tasim_core::Error::NumericalFailure { .. } | tasim_core::Error::Pole { .. })) => {
            log::error!("{metric} at {snr} dB ({}): {e}", method.tag());
            Ok(SweepRow::failed(snr, metric, method))
        }
        Err(e) => Err(e.into()),
    }
}

fn quad(r: tasim_core::QuadratureReport, metric: &'static str) -> tasim_core::Result<(f64, Method)> {
    if r.converged {
        Ok((r.value, Method::Oracle))
    } else {
        Err(tasim_core::Error::NumericalFailure { metric, detail: format!("quadrature error {:e}", r.abs_err_est) })
    }
}

/// Evaluates the deterministic methods at every grid point in parallel.
fn analytic_rows<F>(ctx: &Context, f: F) -> Result<Vec<SweepRow>, CliError>
where
    F: Fn(&ChannelConfig, f64, Method) -> Result<Vec<SweepRow>, CliError> + Sync,
{
    let methods: Vec<Method> = ctx.methods.iter().copied().filter(|m| *m != Method::MonteCarlo).collect();
    let per_point: Vec<Result<Vec<SweepRow>, CliError>> = ctx
        .grid
        .par_iter()
        .map(|&s| {
            let cfg = ctx.channel.at_snr_db(s)?;
            let mut out = Vec::new();
            for &m in &methods {
                out.extend(f(&cfg, s, m)?);
            }
            Ok(out)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}

fn wants_mc(ctx: &Context) -> bool {
    ctx.methods.contains(&Method::MonteCarlo)
}

fn random_suffix(ctx: &Context, metric: &str) -> String {
    match ctx.sim.policy {
        Policy::Ssi => metric.to_string(),
        Policy::Random => format!("{metric}_random"),
    }
}

pub fn outage(c: &Common) -> Result<(), CliError> {
    let ctx = load(c)?;
    let g = ctx.gamma_th;
    let mut rows = analytic_rows(&ctx, |cfg, s, m| {
        let mut out = Vec::new();
        let r = match m {
            Method::Closed => Model::new(cfg).and_then(|model| model.routed(RoutedMetric::Outage(g))).map(|r| (r.value, r.method)),
            Method::Asymptotic => zeta_coefficient(cfg, &AsymptoticConfig::from_config(cfg), g)
                .map(|p| (asymptotic_outage(&p, g), Method::Asymptotic)),
            Method::Oracle => quad(oracle::quad_outage(cfg, g, ORACLE_TOL), "outage"),
            Method::MonteCarlo => unreachable!(),
        };
        out.push(row_or_failed(s, "outage", m, r)?);
        if ctx.sim.policy == Policy::Random && m != Method::Asymptotic {
            let r = quad(oracle::quad_outage_random(&cfg.links(), g, ORACLE_TOL), "outage");
            out.push(row_or_failed(s, "outage_random", Method::Oracle, r)?);
        }
        Ok(out)
    })?;
    if wants_mc(&ctx) {
        let est = simulator::estimate_outage_sweep(&ctx.channel, &ctx.sim, g, &ctx.grid)?;
        rows.extend(mc_rows(&ctx.grid, &random_suffix(&ctx, "outage"), est));
    }
    emit(c, rows, wants_mc(&ctx).then_some(&ctx.sim), &[])
}

/// The PSK and QAM error expressions are approximations, not exact SEPs.
fn approximate_note(md: &Modulation) -> Vec<&'static str> {
    if md.is_approximate() {
        vec!["sep: the modulation's error expression is approximate"]
    } else {
        Vec::new()
    }
}

pub fn sep(c: &Common) -> Result<(), CliError> {
    let ctx = load(c)?;
    let md = ctx.modulation;
    let mut rows = analytic_rows(&ctx, |cfg, s, m| {
        let mut out = Vec::new();
        let r = match m {
            Method::Closed => Model::new(cfg).and_then(|model| model.routed(RoutedMetric::Sep(md))).map(|r| (r.value, r.method)),
            Method::Asymptotic => zeta_coefficient(cfg, &AsymptoticConfig::from_config(cfg), 1.0)
                .map(|p| (asymptotic_sep(&p, &md), Method::Asymptotic)),
            Method::Oracle => quad(oracle::quad_sep(cfg, &md, ORACLE_TOL), "sep"),
            Method::MonteCarlo => unreachable!(),
        };
        out.push(row_or_failed(s, "sep", m, r)?);
        if ctx.sim.policy == Policy::Random && m != Method::Asymptotic {
            let r = quad(oracle::quad_sep_random(&cfg.links(), &md, ORACLE_TOL), "sep");
            out.push(row_or_failed(s, "sep_random", Method::Oracle, r)?);
        }
        Ok(out)
    })?;
    if wants_mc(&ctx) {
        let est = simulator::estimate_sep_sweep(&ctx.channel, &ctx.sim, &md, &ctx.grid)?;
        rows.extend(mc_rows(&ctx.grid, &random_suffix(&ctx, "sep"), est));
    }
    emit(c, rows, wants_mc(&ctx).then_some(&ctx.sim), &approximate_note(&md))
}

fn reject(ctx: &Context, method: Method, command: &str) -> Result<(), CliError> {
    if ctx.methods.contains(&method) {
        Err(CliError::Config(format!("method {} is not available for {command}", method.tag())))
    } else {
        Ok(())
    }
}

pub fn moments(c: &Common, orders: &[u32]) -> Result<(), CliError> {
    let ctx = load(c)?;
    reject(&ctx, Method::Asymptotic, "moments")?;
    if orders.iter().any(|&p| p == 0) {
        return Err(CliError::Config("moment orders must be ≥ 1".into()));
    }
    let has_af = orders.contains(&1) && orders.contains(&2);
    let mut rows = analytic_rows(&ctx, |cfg, s, m| {
        let value = |p: f64| -> tasim_core::Result<(f64, Method)> {
            match m {
                Method::Closed => Model::new(cfg)?.moment(p).map(|r| (r.value, Method::Closed)),
                _ => quad(oracle::moment_factorized(cfg, p, 1e-12), "moment"),
            }
        };
        let mut out = Vec::new();
        for &p in orders {
            out.push(row_or_failed(s, &format!("moment_p{p}"), m, value(p as f64))?);
        }
        if has_af {
            let af = value(1.0).and_then(|(m1, t)| value(2.0).map(|(m2, _)| ((m2 - m1 * m1) / (m1 * m1), t)));
            out.push(row_or_failed(s, "af", m, af)?);
        }
        Ok(out)
    })?;
    if wants_mc(&ctx) {
        for &p in orders {
            let est = simulator::estimate_moments_sweep(&ctx.channel, &ctx.sim, p, &ctx.grid)?;
            rows.extend(mc_rows(&ctx.grid, &format!("moment_p{p}"), est));
        }
    }
    emit(c, rows, wants_mc(&ctx).then_some(&ctx.sim), &[])
}

pub fn mgf(c: &Common, s_grid: &[f64]) -> Result<(), CliError> {
    let ctx = load(c)?;
    reject(&ctx, Method::Asymptotic, "mgf")?;
    reject(&ctx, Method::MonteCarlo, "mgf")?;
    if s_grid.iter().any(|&s| !(s >= 0.0)) {
        return Err(CliError::Config("mgf arguments must be ≥ 0".into()));
    }
    let rows = analytic_rows(&ctx, |cfg, snr, m| {
        let model = Model::new(cfg)?;
        s_grid
            .iter()
            .map(|&s| {
                let r = match m {
                    Method::Closed => model.routed(RoutedMetric::Mgf(s)).map(|r| (r.value, r.method)),
                    _ => quad(oracle::quad_mgf(cfg, s, ORACLE_TOL), "mgf"),
                };
                row_or_failed(snr, &format!("mgf_s{s}"), m, r)
            })
            .collect()
    })?;
    emit(c, rows, None, &[])
}

pub fn selprob(c: &Common) -> Result<(), CliError> {
    let ctx = load(c)?;
    reject(&ctx, Method::Asymptotic, "selprob")?;
    let l = ctx.channel.links_count();
    let mut rows = analytic_rows(&ctx, |cfg, s, m| {
        let closed = Model::new(cfg)?.selection_probabilities().to_vec();
        (0..l)
            .map(|r| {
                let v = match m {
                    Method::Closed => Ok((closed[r], Method::Closed)),
                    _ => quad(oracle::quad_selection_probability(cfg, r, 1e-12), "selprob"),
                };
                row_or_failed(s, &format!("p_select_{r}"), m, v)
            })
            .collect()
    })?;
    if wants_mc(&ctx) {
        for &s in &ctx.grid {
            let est = simulator::estimate_selection(&ctx.channel.at_snr_db(s)?, &ctx.sim)?;
            for (r, e) in est.into_iter().enumerate() {
                rows.extend(mc_rows(&[s], &format!("p_select_{r}"), vec![e]));
            }
        }
    }
    emit(c, rows, wants_mc(&ctx).then_some(&ctx.sim), &[])
}

pub fn simulate(c: &Common) -> Result<(), CliError> {
    let ctx = load(c)?;
    ctx.sim.validate()?;
    let out = simulator::estimate_outage_sweep(&ctx.channel, &ctx.sim, ctx.gamma_th, &ctx.grid)?;
    let sep = simulator::estimate_sep_sweep(&ctx.channel, &ctx.sim, &ctx.modulation, &ctx.grid)?;
    let mut rows = mc_rows(&ctx.grid, &random_suffix(&ctx, "outage"), out);
    rows.extend(mc_rows(&ctx.grid, &random_suffix(&ctx, "sep"), sep));
    emit(c, rows, Some(&ctx.sim), &approximate_note(&ctx.modulation))
}

pub fn validate(c: &Common, corrupt: Option<usize>) -> Result<(), CliError> {
    let ctx = load(c)?;
    let cfg = ctx.channel.at_snr_db(ctx.channel.snr_db().reference_db())?;
    let report = tasim_core::validate::validate(
        &cfg,
        &ctx.modulation,
        &ToleranceProfile::default(),
        corrupt.map(Fault::KappaSign),
    )?;
    let text = report.to_string();
    match &c.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| CliError::Config(format!("cannot write output: {e}")))?,
        None => print!("{text}"),
    }
    match report.worst() {
        None => Ok(()),
        Some(w) => Err(CliError::Validation(format!(
            "validation failed; worst offender `{}`: achieved {:.3e}, required {:.3e}",
            w.check, w.achieved, w.required
        ))),
    }
}

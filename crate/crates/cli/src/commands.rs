use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use permris::metrics::{
    beta_curve, default_delta, pattern_slice, selectivity_tau, split_check, sym_check, tau_cdf,
    BallConstraint, Ensemble, MonteCarloEstimate,
};
use permris::ris::{beam_split_config, gain, optimal_config, symmetric_pair_config};
use permris::selectivity::{certify_by_grid, certify_separable, solve_full_gain_direction, GridOracle};
use permris::{Direction, Hardware, PhaseConfig, RisModel, SelectivityCertificate, SplitWeights};

use crate::args::{CertifyMethod, Command, ConfigKind, Format, Surface};
use crate::error::{CliError, CliResult};
use crate::output::Sink;

/// One row of `beta.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub delta: f64,
    pub beta: f64,
    pub perm_id: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
}

/// One row of `tau_cdf.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauCdfRow {
    pub tau: f64,
    pub cdf: f64,
    pub perm_id: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub delta: f64,
    pub seed: u64,
}

/// One row of `pattern.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub rho_x: f64,
    pub rho_y: f64,
    pub value: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub perm_id: String,
}

#[derive(Debug, Serialize)]
struct GainRecord {
    #[serde(rename = "M")]
    m: usize,
    perm_id: String,
    gain: f64,
    normalized: f64,
    db: f64,
}

#[derive(Debug, Serialize)]
struct SolutionRow {
    z_x: f64,
    z_y: f64,
    p1: i64,
    p2: i64,
}

#[derive(Debug, Serialize)]
struct TauRecord {
    tau: f64,
    delta: f64,
    perm_id: String,
    #[serde(rename = "M")]
    m: usize,
    seed: u64,
    n_starts: usize,
    converged_starts: usize,
    arg_delta_x: f64,
    arg_delta_y: f64,
    arg_delta_tilde_x: f64,
    arg_delta_tilde_y: f64,
}

#[derive(Debug, Serialize)]
struct CertificateRecord<'a> {
    perm_id: String,
    #[serde(flatten)]
    certificate: &'a SelectivityCertificate,
}

fn radius(m: usize, delta: Option<f64>) -> CliResult<BallConstraint> {
    let d = delta
        .or_else(|| default_delta(m))
        .ok_or_else(|| CliError::Input(format!("no default radius for M = {m}; pass --delta")))?;
    Ok(BallConstraint::new(d)?)
}

fn visible(d: Direction, flag: &str) -> CliResult<Direction> {
    if d.is_visible() {
        Ok(d)
    } else {
        Err(CliError::Input(format!("--{flag} {d} is outside the visible disk")))
    }
}

fn surface_model(s: &Surface, hardware: Hardware) -> CliResult<(RisModel, String)> {
    let perm = s.perm.load(s.m as usize, s.seed)?;
    Ok((RisModel::new(perm, hardware)?, s.perm.id(s.seed)))
}

fn monte_carlo(sink: &Sink, est: &MonteCarloEstimate) -> CliResult {
    match sink.format_or(Format::Text) {
        Format::Json => sink.json(est),
        Format::Csv => sink.csv(&[est]),
        Format::Text => sink.text(&format!(
            "mean = {}\nstd_err = {}\nmean_db = {}\ndistance_from_limit = {}\nmax_reciprocity_gap = {}\nsamples = {}\n",
            est.mean, est.std_err, est.mean_db, est.distance_from_limit, est.max_reciprocity_gap, est.samples
        )),
    }
}

pub fn run(command: Command, sink: &Sink) -> CliResult {
    match command {
        Command::Gain { surface, incoming, outgoing, config, k, ktilde, alpha } => {
            let incoming = visible(incoming, "in")?;
            let outgoing = visible(outgoing, "to")?;
            let k = visible(k.unwrap_or(incoming), "k")?;
            let kt = visible(ktilde.unwrap_or(outgoing), "ktilde")?;
            let hardware =
                if config == ConfigKind::Pair { Hardware::SharedPair } else { Hardware::PerElement };
            let (model, perm_id) = surface_model(&surface, hardware)?;
            let c = match config {
                ConfigKind::Optimal => optimal_config(&model, kt, k)?,
                ConfigKind::Split => beam_split_config(&model, k, kt, SplitWeights::new(alpha)?)?,
                ConfigKind::Pair => symmetric_pair_config(&model, k, kt)?,
                ConfigKind::Zero => PhaseConfig::unit(model.elements()),
            };
            let g = gain(&model, incoming, outgoing, &c)?;
            let normalized = g / model.full_gain();
            let rec =
                GainRecord { m: model.m_side(), perm_id, gain: g, normalized, db: 10.0 * normalized.log10() };
            match sink.format_or(Format::Text) {
                Format::Json => sink.json(&rec),
                Format::Csv => sink.csv(&[rec]),
                Format::Text => sink.text(&format!(
                    "gain = {}\nnormalized = {}\ndb = {:.4}\n",
                    rec.gain, rec.normalized, rec.db
                )),
            }
        }

        Command::SolveDirection { t, r } => {
            let rows: Vec<SolutionRow> = solve_full_gain_direction(t, r)?
                .into_iter()
                .map(|s| SolutionRow { z_x: s.z.kx, z_y: s.z.ky, p1: s.wrap.0, p2: s.wrap.1 })
                .collect();
            match sink.format_or(Format::Text) {
                Format::Json => sink.json(&rows),
                Format::Csv => sink.csv(&rows),
                Format::Text if rows.is_empty() => sink.text("none\n"),
                Format::Text => {
                    let mut body = String::new();
                    for s in &rows {
                        let _ = writeln!(body, "({}, {}) wrap ({}, {})", s.z_x, s.z_y, s.p1, s.p2);
                    }
                    sink.text(&body)
                }
            }
        }

        Command::Certify { surface, rows, cols, method, exclusion, step, budget } => {
            let m = surface.m as usize;
            let (perm, perm_id) = match (rows, cols) {
                (Some(r), Some(c)) => {
                    let p = permris::Permutation::separable(&r, &c)?;
                    if p.m_side() != m {
                        return Err(CliError::Input(format!(
                            "factors have length {}, --m is {m}",
                            p.m_side()
                        )));
                    }
                    let id = format!("separable:{}x{}", join(&r), join(&c));
                    (p, id)
                }
                _ => (surface.perm.load(m, surface.seed)?, surface.perm.id(surface.seed)),
            };
            let cert = match method {
                CertifyMethod::Exact => {
                    let (r, c) = perm.separable_factors().ok_or_else(|| {
                        CliError::Input(
                            "the exact certifier needs a separable permutation; use --method grid".into(),
                        )
                    })?;
                    let one = |v: Vec<usize>| v.into_iter().map(|x| x + 1).collect::<Vec<_>>();
                    certify_separable(&one(r), &one(c))?
                }
                CertifyMethod::Grid => {
                    let oracle = GridOracle { step, budget, ..GridOracle::default() };
                    certify_by_grid(&RisModel::per_element(perm), exclusion, &oracle)?
                }
            };
            match sink.format_or(Format::Text) {
                Format::Json | Format::Csv => sink.json(&CertificateRecord { perm_id, certificate: &cert }),
                Format::Text => {
                    let mut body =
                        String::from(if cert.selective { "SELECTIVE\n" } else { "NOT SELECTIVE\n" });
                    if let Some(w) = cert.witness {
                        let _ =
                            writeln!(body, "witness: delta = {}, delta_tilde = {}", w.delta, w.delta_tilde);
                    }
                    if let Some(g) = cert.grid {
                        let _ = writeln!(
                            body,
                            "grid peak = {} (step {}, exclusion {})",
                            g.peak, g.step, g.exclusion_radius
                        );
                    }
                    sink.text(&body)
                }
            }
        }

        Command::Beta { surface, delta, n_starts } => {
            let m = surface.m as usize;
            let grid = if delta.is_empty() { vec![radius(m, None)?.delta()] } else { delta };
            let (model, perm_id) = surface_model(&surface, Hardware::PerElement)?;
            let curve = beta_curve(&model, &grid, n_starts, surface.seed)?;
            if sink.format_or(Format::Csv) == Format::Json {
                #[derive(Serialize)]
                struct Point<'a> {
                    delta: f64,
                    perm_id: &'a str,
                    #[serde(rename = "M")]
                    m: usize,
                    report: permris::MetricReport,
                }
                let pts: Vec<Point> = curve
                    .iter()
                    .map(|&(delta, report)| Point { delta, perm_id: &perm_id, m, report })
                    .collect();
                return sink.json(&pts);
            }
            let rows: Vec<BetaRow> = curve
                .iter()
                .map(|(d, r)| BetaRow {
                    delta: *d,
                    beta: r.value,
                    perm_id: perm_id.clone(),
                    m,
                    seed: surface.seed,
                })
                .collect();
            sink.csv(&rows)
        }

        Command::Tau { surface, delta, n_starts } => {
            let m = surface.m as usize;
            let c = radius(m, delta)?;
            let (model, perm_id) = surface_model(&surface, Hardware::PerElement)?;
            let r = selectivity_tau(&model, c, n_starts, surface.seed)?;
            let rec = TauRecord {
                tau: r.value,
                delta: c.delta(),
                perm_id,
                m,
                seed: r.seed,
                n_starts: r.n_starts,
                converged_starts: r.converged_starts,
                arg_delta_x: r.delta.kx,
                arg_delta_y: r.delta.ky,
                arg_delta_tilde_x: r.delta_tilde.kx,
                arg_delta_tilde_y: r.delta_tilde.ky,
            };
            match sink.format_or(Format::Text) {
                Format::Json => sink.json(&rec),
                Format::Csv => sink.csv(&[rec]),
                Format::Text => sink.text(&format!(
                    "tau = {}\nargmax: delta = {}, delta_tilde = {}\n",
                    rec.tau, r.delta, r.delta_tilde
                )),
            }
        }

        Command::TauCdf { m, delta, n_perms, n_starts, seed, ensemble } => {
            let m = m as usize;
            let c = radius(m, delta)?;
            let ensemble = Ensemble::from(ensemble);
            let tag = match ensemble {
                Ensemble::General => "random",
                Ensemble::Separable => "separable",
            };
            let rows: Vec<TauCdfRow> = tau_cdf(m, c, n_perms, n_starts, seed, ensemble)?
                .into_iter()
                .map(|p| TauCdfRow {
                    tau: p.tau,
                    cdf: p.cdf,
                    perm_id: format!("{tag}:{seed}:{}", p.perm_index),
                    m,
                    delta: c.delta(),
                    seed,
                })
                .collect();
            sink.table(&rows)
        }

        Command::Pattern { surface, rho_min, rho_max, rho_steps } => {
            if rho_steps < 1 || rho_min.is_nan() || rho_max.is_nan() || rho_min > rho_max {
                return Err(CliError::Input("need rho_min <= rho_max and at least one step".into()));
            }
            let grid: Vec<f64> = if rho_steps == 1 {
                vec![rho_min]
            } else {
                (0..rho_steps)
                    .map(|i| rho_min + (rho_max - rho_min) * i as f64 / (rho_steps - 1) as f64)
                    .collect()
            };
            let (model, perm_id) = surface_model(&surface, Hardware::PerElement)?;
            let slice = pattern_slice(&model, &grid, &grid)?;
            if sink.format_or(Format::Csv) == Format::Json {
                #[derive(Serialize)]
                struct Record<'a> {
                    #[serde(rename = "M")]
                    m: usize,
                    perm_id: &'a str,
                    #[serde(flatten)]
                    slice: &'a permris::PatternSlice,
                }
                return sink.json(&Record { m: model.m_side(), perm_id: &perm_id, slice: &slice });
            }
            let mut rows = Vec::with_capacity(grid.len() * grid.len());
            for (i, &x) in slice.rho_x_grid.iter().enumerate() {
                for (j, &y) in slice.rho_y_grid.iter().enumerate() {
                    rows.push(PatternRow {
                        rho_x: x,
                        rho_y: y,
                        value: slice.values[i][j],
                        m: model.m_side(),
                        perm_id: perm_id.clone(),
                    });
                }
            }
            sink.csv(&rows)
        }

        Command::SplitCheck { m, alpha, samples, seed } => {
            monte_carlo(sink, &split_check(m as usize, alpha, samples, seed)?)
        }

        Command::SymCheck { m, samples, seed } => monte_carlo(sink, &sym_check(m as usize, samples, seed)?),
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

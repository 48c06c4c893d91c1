//! Scenario dispatch: run the requested computation and emit the outputs.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use qcounter::correlate::g2_curve;
use qcounter::fock::FockBasis;
use qcounter::mcsim::{run_shots, sweep_with_occupations, CountRecord, ShotPlan, SweepRow};
use qcounter::network::{run_network, NetworkInput, NetworkReport};
use qcounter::opalg::{
    antinormal_order, expectation, normal_order, parse_expr, StateSpec,
};
use qcounter::spectral::{
    gamma_closed_form, gamma_experiment_chain, gamma_general_4d, gamma_reduced_2d,
    GammaIntermediates, JointAmplitude, SpectralProfile,
};

use crate::manifest::{scenario_hash, RunManifest};
use crate::scenario::{
    FilterShape, G2Scenario, GammaMode, GammaScenario, McScenario, ModeStateSpec,
    NetworkScenario, OrderScenario, Scenario,
};
use crate::{CliError, OutputFormat};

pub struct ExecConfig {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub seed_override: Option<u64>,
}

impl ExecConfig {
    fn wants_json(&self) -> bool {
        matches!(self.format, OutputFormat::Json | OutputFormat::Both)
    }

    fn wants_csv(&self) -> bool {
        matches!(self.format, OutputFormat::Csv | OutputFormat::Both)
    }
}

/// Run a validated scenario, write the requested outputs plus the manifest,
/// and return the manifest.
pub fn execute(
    scenario: &Scenario,
    raw: &serde_json::Value,
    cfg: &ExecConfig,
) -> Result<RunManifest, CliError> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let hash = scenario_hash(raw);
    let mut manifest = RunManifest::new(scenario.kind(), &hash, scenario.to_value());
    match scenario {
        Scenario::Gamma(s) => exec_gamma(s, cfg, &mut manifest)?,
        Scenario::G2(s) => exec_g2(s, cfg, &mut manifest)?,
        Scenario::Network(s) => exec_network(s, cfg, &mut manifest)?,
        Scenario::Mc(s) => exec_mc(s, cfg, &mut manifest)?,
        Scenario::Order(s) => exec_order(s, cfg, &mut manifest)?,
    }
    let path = manifest.write(&cfg.out_dir)?;
    manifest.outputs.push(path);
    Ok(manifest)
}

fn write_json<T: Serialize>(
    cfg: &ExecConfig,
    manifest: &mut RunManifest,
    name: &str,
    payload: &T,
) -> Result<(), CliError> {
    if !cfg.wants_json() {
        return Ok(());
    }
    let path = cfg.out_dir.join(name);
    let body = serde_json::to_string_pretty(payload).expect("output serializes");
    std::fs::write(&path, body)?;
    manifest.outputs.push(path);
    Ok(())
}

/// RFC-4180 CSV with a provenance comment line above the header row.
fn write_csv(
    cfg: &ExecConfig,
    manifest: &mut RunManifest,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    if !cfg.wants_csv() {
        return Ok(());
    }
    let path = cfg.out_dir.join(name);
    let mut file = std::fs::File::create(&path)?;
    writeln!(file, "# qcounter manifest {}", manifest.scenario_hash)?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(row).map_err(csv_err)?;
    }
    writer.flush()?;
    manifest.outputs.push(path);
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

// ---------- gamma ----------

#[derive(Serialize)]
struct GammaOutput {
    manifest_hash: String,
    gamma_numeric: Option<f64>,
    gamma_closed: Option<f64>,
    error_estimate: Option<f64>,
    tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intermediates: Option<GammaIntermediates<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i_diag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i_cross: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_chained: Option<f64>,
    params: serde_json::Value,
}

fn exec_gamma(
    s: &GammaScenario,
    cfg: &ExecConfig,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let conv = s.conversions();
    manifest.conversions = Some(serde_json::to_value(conv).expect("conversions serialize"));
    let quad = s.quadrature();
    let center = conv.center_angular_frequency_rad_s;

    let filter = match s.filter_shape() {
        FilterShape::Gaussian => SpectralProfile::gaussian(center, conv.filter_variance_rad2_s2),
        FilterShape::Lorentzian => {
            SpectralProfile::lorentzian(center, conv.filter_lorentzian_half_width_rad_s)
        }
    }?;
    let pump = SpectralProfile::gaussian(2.0 * center, conv.pump_variance_rad2_s2)?;

    let closed = if s.filter_shape() == FilterShape::Gaussian {
        Some(gamma_closed_form(conv.filter_variance_rad2_s2, conv.pump_variance_rad2_s2)?)
    } else {
        None
    };

    let mode = s.mode();
    let reduced = if matches!(mode, GammaMode::Reduced2d | GammaMode::All)
        && s.filter_shape() == FilterShape::Gaussian
    {
        Some(gamma_reduced_2d(&filter, &pump, &quad)?)
    } else {
        None
    };
    let general = if matches!(mode, GammaMode::General4d | GammaMode::All) {
        Some(gamma_general_4d(&filter, &JointAmplitude::new(pump), &quad)?)
    } else {
        None
    };

    let numeric_result = general.as_ref().or(reduced.as_ref());
    let gamma_numeric = numeric_result.map(|r| r.gamma_numeric);
    let gamma_spectral = gamma_numeric.or(closed.as_ref().map(|(g, _)| *g));
    let gamma_chained = match (s.shape_correction, s.spatial_coupling) {
        (None, None) => None,
        (shape, spatial) => Some(gamma_experiment_chain(
            gamma_spectral.expect("some gamma available"),
            shape.unwrap_or(1.0),
            spatial.unwrap_or(1.0),
        )?),
    };

    let output = GammaOutput {
        manifest_hash: manifest.scenario_hash.clone(),
        gamma_numeric,
        gamma_closed: closed.as_ref().map(|(g, _)| *g),
        error_estimate: numeric_result.map(|r| r.abs_error_estimate),
        tail_bound: numeric_result.map(|r| r.tail_bound),
        intermediates: closed.map(|(_, i)| i),
        i_diag: general.as_ref().and_then(|r| r.i_diag),
        i_cross: general.as_ref().and_then(|r| r.i_cross),
        gamma_chained,
        params: serde_json::json!({
            "scenario": manifest.scenario,
            "conversions": conv,
            "quadrature": quad,
        }),
    };
    write_json(cfg, manifest, "gamma.json", &output)?;

    if let Some(grid) = &s.ratio_grid {
        let rows: Result<Vec<Vec<String>>, CliError> = grid
            .iter()
            .map(|&ratio| {
                let (g, _) = gamma_closed_form(ratio, 1.0)?;
                Ok(vec![fmt_f64(ratio), fmt_f64(g)])
            })
            .collect();
        write_csv(cfg, manifest, "gamma_curve.csv", &["variance_ratio", "gamma_closed"], &rows?)?;
    }

    println!(
        "gamma: closed = {}, numeric = {}{}",
        output.gamma_closed.map_or("n/a".into(), |g| format!("{g:.7}")),
        output.gamma_numeric.map_or("n/a".into(), |g| format!("{g:.7}")),
        output
            .gamma_chained
            .map_or(String::new(), |g| format!(", chained = {g:.4}")),
    );
    Ok(())
}

// ---------- g2 ----------

#[derive(Serialize)]
struct G2Output {
    manifest_hash: String,
    gamma_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectral_integrals: Option<serde_json::Value>,
    rows: Vec<G2Row>,
}

#[derive(Serialize)]
struct G2Row {
    n_bar: f64,
    gamma: f64,
    g2: f64,
}

fn exec_g2(s: &G2Scenario, cfg: &ExecConfig, manifest: &mut RunManifest) -> Result<(), CliError> {
    let (gamma, integrals) = match s.gamma {
        Some(g) => (g, None),
        None => {
            let gamma_scenario = GammaScenario {
                filter_fwhm_nm: s.filter_fwhm_nm.expect("validated"),
                pump_fwhm_nm: s.pump_fwhm_nm.expect("validated"),
                center_nm: s.center_nm.unwrap_or(790.0),
                filter_shape: None,
                mode: None,
                shape_correction: None,
                spatial_coupling: None,
                ratio_grid: None,
                quadrature: None,
            };
            let conv = gamma_scenario.conversions();
            manifest.conversions =
                Some(serde_json::to_value(conv).expect("conversions serialize"));
            let center = conv.center_angular_frequency_rad_s;
            let filter = SpectralProfile::gaussian(center, conv.filter_variance_rad2_s2)?;
            let pump = SpectralProfile::gaussian(2.0 * center, conv.pump_variance_rad2_s2)?;
            let result =
                gamma_general_4d(&filter, &JointAmplitude::new(pump), &Default::default())?;
            let integrals = serde_json::json!({
                "i_diag": result.i_diag,
                "i_cross": result.i_cross,
            });
            (result.gamma_numeric, Some(integrals))
        }
    };

    let rows = g2_curve(gamma, &s.n_bar_grid)?;
    let output = G2Output {
        manifest_hash: manifest.scenario_hash.clone(),
        gamma_used: gamma,
        spectral_integrals: integrals,
        rows: rows.iter().map(|&(n_bar, g2)| G2Row { n_bar, gamma, g2 }).collect(),
    };
    write_json(cfg, manifest, "g2.json", &output)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|&(n, g)| vec![fmt_f64(n), fmt_f64(gamma), fmt_f64(g)])
        .collect();
    write_csv(cfg, manifest, "g2.csv", &["n_bar", "gamma", "g2"], &csv_rows)?;
    println!("g2 curve over {} occupations at gamma = {gamma:.6}", rows.len());
    Ok(())
}

// ---------- network ----------

#[derive(Serialize)]
struct NetworkOutput {
    manifest_hash: String,
    report: NetworkReport<f64>,
    params: serde_json::Value,
}

fn exec_network(
    s: &NetworkScenario,
    cfg: &ExecConfig,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let spec = s.to_spec()?;
    let basis = FockBasis::new(3, s.cutoff()).map_err(|e| CliError::validation(e.to_string()))?;
    let report = run_network(&spec, basis)?;
    println!("network report");
    println!("  <n_d1>        = {:.9e}", report.n1);
    println!("  <n_d2>        = {:.9e}", report.n2);
    println!("  <n_d1 n_d2>   = {:.9e}", report.n12);
    println!("  g2            = {:.6}", report.g2);
    if let Some(m) = report.implied_antinormal_second_moment {
        println!("  implied <a adag>        = {m:.6}");
    }
    if let Some(m) = report.implied_antinormal_fourth_moment {
        println!("  implied <a a adag adag> = {m:.6}");
    }
    for w in &report.warnings {
        println!("  warning: {w}");
    }
    let csv_rows = vec![vec![
        fmt_f64(report.n1),
        fmt_f64(report.n2),
        fmt_f64(report.n12),
        fmt_f64(report.g2),
        fmt_f64(report.truncation_leak),
    ]];
    let output = NetworkOutput {
        manifest_hash: manifest.scenario_hash.clone(),
        report,
        params: manifest.scenario.clone(),
    };
    write_json(cfg, manifest, "network.json", &output)?;
    write_csv(
        cfg,
        manifest,
        "network.csv",
        &["n_d1", "n_d2", "n_d1_d2", "g2", "truncation_leak"],
        &csv_rows,
    )?;
    Ok(())
}

// ---------- mc ----------

#[derive(Serialize)]
struct McOutput {
    manifest_hash: String,
    record: CountRecord<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<SweepRow<f64>>>,
}

fn exec_mc(s: &McScenario, cfg: &ExecConfig, manifest: &mut RunManifest) -> Result<(), CliError> {
    let seed = cfg
        .seed_override
        .or(s.seed)
        .ok_or_else(|| CliError::validation("a seed is required: set 'seed' or pass --seed"))?;
    let basis = FockBasis::new(3, s.network.cutoff())
        .map_err(|e| CliError::validation(e.to_string()))?;
    let base_plan =
        ShotPlan { pulses: s.pulses, seed, network: s.network.to_spec()?, basis };
    manifest.seeds.push(seed);
    let record = run_shots(&base_plan)?;
    println!(
        "mc: {} pulses, singles ({}, {}), coincidences {}, g2 = {}",
        record.pulses,
        record.singles_1,
        record.singles_2,
        record.coincidences,
        record
            .g2_estimate
            .map_or("n/a (zero singles)".into(), |g| format!(
                "{g:.4} +- {:.4}",
                record.std_error.unwrap_or(f64::NAN)
            )),
    );

    let sweep_rows = match &s.sweep_n_bar {
        None => None,
        Some(grid) => {
            let plans: Result<Vec<ShotPlan<f64>>, CliError> = grid
                .iter()
                .enumerate()
                .map(|(i, &n_bar)| {
                    if n_bar > s.network.cutoff() as f64 / 4.0 {
                        return Err(CliError::validation(format!(
                            "sweep_n_bar entry {n_bar} too large for cutoff {}",
                            s.network.cutoff()
                        )));
                    }
                    let mut network = s.network.to_spec()?;
                    network.input = if n_bar == 0.0 {
                        NetworkInput::Vacuum
                    } else {
                        NetworkInput::Coherent {
                            alpha: num_complex::Complex64::new(n_bar.sqrt(), 0.0),
                        }
                    };
                    let row_seed = seed.wrapping_add(i as u64);
                    manifest.seeds.push(row_seed);
                    Ok(ShotPlan { pulses: s.pulses, seed: row_seed, network, basis })
                })
                .collect();
            Some(sweep_with_occupations(&plans?, grid)?)
        }
    };

    if let Some(rows) = &sweep_rows {
        let csv_rows: Vec<Vec<String>> = rows
            .iter()
            .map(|row| {
                vec![
                    fmt_f64(row.n_bar),
                    row.record.pulses.to_string(),
                    row.record.singles_1.to_string(),
                    row.record.singles_2.to_string(),
                    row.record.coincidences.to_string(),
                    row.record.g2_estimate.map_or(String::new(), fmt_f64),
                    row.record.std_error.map_or(String::new(), fmt_f64),
                    fmt_f64(row.g2_analytic),
                ]
            })
            .collect();
        write_csv(
            cfg,
            manifest,
            "mc_sweep.csv",
            &[
                "n_bar",
                "pulses",
                "singles_1",
                "singles_2",
                "coincidences",
                "g2_estimate",
                "std_error",
                "g2_analytic",
            ],
            &csv_rows,
        )?;
    }
    let output = McOutput {
        manifest_hash: manifest.scenario_hash.clone(),
        record,
        sweep: sweep_rows,
    };
    write_json(cfg, manifest, "mc.json", &output)?;
    Ok(())
}

// ---------- order ----------

#[derive(Serialize)]
struct OrderOutput {
    manifest_hash: String,
    expression: String,
    normal: String,
    antinormal: String,
    expectations: Vec<ExpectationOutput>,
}

#[derive(Serialize)]
struct ExpectationOutput {
    modes: serde_json::Value,
    result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<(f64, f64)>,
}

fn exec_order(
    s: &OrderScenario,
    cfg: &ExecConfig,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let expr = parse_expr(&s.expression).map_err(|e| CliError::validation(e.to_string()))?;
    let normal = normal_order(&expr).to_string();
    let antinormal = antinormal_order(&expr).to_string();
    println!("expression: {}", s.expression);
    println!("normal:     {normal}");
    println!("antinormal: {antinormal}");

    let mut results = Vec::new();
    for request in s.expectations.iter().flatten() {
        let mut state = StateSpec::new();
        for (mode, mode_state) in &request.modes {
            state = match mode_state {
                ModeStateSpec::Vacuum => state.vacuum(mode),
                ModeStateSpec::Coherent { n_bar, phase_rad } => state.coherent(
                    mode,
                    num_complex::Complex64::from_polar(n_bar.sqrt(), phase_rad.unwrap_or(0.0)),
                ),
                ModeStateSpec::CoherentSymbolic { symbol } => {
                    state.coherent_symbolic(mode, symbol)
                }
            };
        }
        let value = expectation(&expr, &state).map_err(|e| CliError::validation(e.to_string()))?;
        let rendered = value.to_string();
        let constant = value.as_constant().map(|c| {
            let z = c.to_c64();
            (z.re, z.im)
        });
        println!("expectation {:?}: {rendered}", request.modes.keys().collect::<Vec<_>>());
        results.push(ExpectationOutput {
            modes: serde_json::to_value(&request.modes).expect("modes serialize"),
            result: rendered,
            constant,
        });
    }

    let output = OrderOutput {
        manifest_hash: manifest.scenario_hash.clone(),
        expression: s.expression.clone(),
        normal: normal.clone(),
        antinormal,
        expectations: results,
    };
    write_json(cfg, manifest, "order.json", &output)?;
    Ok(())
}

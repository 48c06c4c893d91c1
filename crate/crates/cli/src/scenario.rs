//! Scenario files: strict JSON schemas, validation, and unit conversion.
//!
//! Every physical quantity carries its unit in the field name
//! (`filter_fwhm_nm`, `crystal_length_m`, `theta_rad`). Unknown keys are
//! rejected. Wavelength FWHMs convert to angular-frequency variances via
//! the small-bandwidth linearization `dw = 2 pi c dl / l^2` and, for
//! Gaussians, `variance = fwhm^2 / (8 ln 2)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qcounter::network::{NetworkInput, NetworkSpec, SqueezerSpec};
use qcounter::spectral::{
    angular_fwhm_from_wavelength, gaussian_variance_from_fwhm, lorentzian_half_width_from_fwhm,
    QuadratureRule, QuadratureSpec,
};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Gamma(GammaScenario),
    G2(G2Scenario),
    Network(NetworkScenario),
    Mc(McScenario),
    Order(OrderScenario),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Gamma(_) => "gamma",
            Scenario::G2(_) => "g2",
            Scenario::Network(_) => "network",
            Scenario::Mc(_) => "mc",
            Scenario::Order(_) => "order",
        }
    }

    /// Serialize back to the on-disk form (used for the round-trip
    /// invariant and the manifest).
    pub fn to_value(&self) -> serde_json::Value {
        let mut value = match self {
            Scenario::Gamma(s) => serde_json::to_value(s),
            Scenario::G2(s) => serde_json::to_value(s),
            Scenario::Network(s) => serde_json::to_value(s),
            Scenario::Mc(s) => serde_json::to_value(s),
            Scenario::Order(s) => serde_json::to_value(s),
        }
        .expect("scenario serializes");
        value
            .as_object_mut()
            .expect("scenario is an object")
            .insert("kind".to_string(), serde_json::Value::String(self.kind().to_string()));
        value
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterShape {
    Gaussian,
    Lorentzian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMode {
    Closed,
    Reduced2d,
    General4d,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<QuadratureRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_sigmas: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_abs_tol: Option<f64>,
}

impl QuadSettings {
    pub fn resolve(&self) -> QuadratureSpec<f64> {
        let defaults = QuadratureSpec::default();
        QuadratureSpec {
            rule: self.rule.unwrap_or(defaults.rule),
            points_per_axis: self.points_per_axis.unwrap_or(defaults.points_per_axis),
            support_sigmas: self.support_sigmas.unwrap_or(defaults.support_sigmas),
            target_abs_tol: self.target_abs_tol.unwrap_or(defaults.target_abs_tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaScenario {
    pub filter_fwhm_nm: f64,
    pub pump_fwhm_nm: f64,
    pub center_nm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter_shape: Option<FilterShape>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<GammaMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_correction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spatial_coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadSettings>,
}

impl GammaScenario {
    pub fn filter_shape(&self) -> FilterShape {
        self.filter_shape.unwrap_or(FilterShape::Gaussian)
    }

    pub fn mode(&self) -> GammaMode {
        self.mode.unwrap_or(GammaMode::All)
    }

    pub fn quadrature(&self) -> QuadratureSpec<f64> {
        self.quadrature.clone().unwrap_or(QuadSettings {
            rule: None,
            points_per_axis: None,
            support_sigmas: None,
            target_abs_tol: None,
        })
        .resolve()
    }

    fn validate(&self) -> Result<(), CliError> {
        check_nm("filter_fwhm_nm", self.filter_fwhm_nm)?;
        check_nm("pump_fwhm_nm", self.pump_fwhm_nm)?;
        check_nm("center_nm", self.center_nm)?;
        for (name, v) in
            [("shape_correction", self.shape_correction), ("spatial_coupling", self.spatial_coupling)]
        {
            if let Some(v) = v {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(CliError::validation(format!("{name} must lie in (0, 1], got {v}")));
                }
            }
        }
        if let Some(grid) = &self.ratio_grid {
            if grid.iter().any(|r| *r <= 0.0) {
                return Err(CliError::validation("ratio_grid entries must be positive"));
            }
        }
        if self.filter_shape() == FilterShape::Lorentzian && self.mode() == GammaMode::Reduced2d {
            return Err(CliError::validation(
                "mode 'reduced-2d' requires a gaussian filter_shape",
            ));
        }
        Ok(())
    }

    /// Angular-frequency conversions, also surfaced in the manifest.
    pub fn conversions(&self) -> UnitConversions {
        let center_m = self.center_nm * 1e-9;
        let filter_fwhm = angular_fwhm_from_wavelength(center_m, self.filter_fwhm_nm * 1e-9);
        let pump_fwhm = angular_fwhm_from_wavelength(center_m, self.pump_fwhm_nm * 1e-9);
        UnitConversions {
            center_angular_frequency_rad_s: 2.0 * std::f64::consts::PI
                * qcounter::network::LIGHT_SPEED
                / center_m,
            filter_fwhm_rad_s: filter_fwhm,
            pump_fwhm_rad_s: pump_fwhm,
            filter_variance_rad2_s2: gaussian_variance_from_fwhm(filter_fwhm),
            pump_variance_rad2_s2: gaussian_variance_from_fwhm(pump_fwhm),
            filter_lorentzian_half_width_rad_s: lorentzian_half_width_from_fwhm(filter_fwhm),
        }
    }
}

/// Resolved unit conversions, printed in the manifest for audit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnitConversions {
    pub center_angular_frequency_rad_s: f64,
    pub filter_fwhm_rad_s: f64,
    pub pump_fwhm_rad_s: f64,
    pub filter_variance_rad2_s2: f64,
    pub pump_variance_rad2_s2: f64,
    pub filter_lorentzian_half_width_rad_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G2Scenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter_fwhm_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_fwhm_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_nm: Option<f64>,
    pub n_bar_grid: Vec<f64>,
}

impl G2Scenario {
    fn validate(&self) -> Result<(), CliError> {
        match (self.gamma, self.filter_fwhm_nm, self.pump_fwhm_nm) {
            (Some(g), None, None) => {
                if !(0.0..=1.0).contains(&g) {
                    return Err(CliError::validation(format!("gamma must lie in [0, 1], got {g}")));
                }
            }
            (None, Some(f), Some(p)) => {
                check_nm("filter_fwhm_nm", f)?;
                check_nm("pump_fwhm_nm", p)?;
                check_nm("center_nm", self.center_nm.unwrap_or(790.0))?;
            }
            _ => {
                return Err(CliError::validation(
                    "provide either 'gamma' or both 'filter_fwhm_nm' and 'pump_fwhm_nm'",
                ))
            }
        }
        if self.n_bar_grid.is_empty() {
            return Err(CliError::validation("n_bar_grid must be nonempty"));
        }
        if self.n_bar_grid[0] < 0.0 {
            return Err(CliError::validation(format!(
                "n_bar_grid entries must be nonnegative, got {}",
                self.n_bar_grid[0]
            )));
        }
        if self.n_bar_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::validation("n_bar_grid must be strictly ascending"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum InputSpec {
    Vacuum,
    Coherent { n_bar: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkScenario {
    pub input: InputSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_mag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crystal_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_rad: Option<f64>,
    /// Transmission magnitude |T|; the reflection is `i sqrt(1 - |T|^2)`.
    pub splitter_t_mag: f64,
    pub eta_1: f64,
    pub eta_2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

impl NetworkScenario {
    pub fn cutoff(&self) -> usize {
        self.cutoff.unwrap_or(12)
    }

    fn validate(&self) -> Result<(), CliError> {
        match (self.zeta_mag, self.s_per_m, self.crystal_length_m) {
            (Some(z), None, None) => {
                if z < 0.0 {
                    return Err(CliError::validation(format!("zeta_mag must be >= 0, got {z}")));
                }
            }
            (None, Some(s), Some(l)) => {
                if s < 0.0 || l <= 0.0 {
                    return Err(CliError::validation(
                        "s_per_m must be >= 0 and crystal_length_m > 0",
                    ));
                }
            }
            _ => {
                return Err(CliError::validation(
                    "provide either 'zeta_mag' or both 's_per_m' and 'crystal_length_m'",
                ))
            }
        }
        if !(0.0 < self.splitter_t_mag && self.splitter_t_mag < 1.0) {
            return Err(CliError::validation(format!(
                "splitter_t_mag must lie in (0, 1), got {}",
                self.splitter_t_mag
            )));
        }
        for (name, eta) in [("eta_1", self.eta_1), ("eta_2", self.eta_2)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(CliError::validation(format!("{name} must lie in [0, 1], got {eta}")));
            }
        }
        if let InputSpec::Coherent { n_bar } = self.input {
            if n_bar < 0.0 {
                return Err(CliError::validation(format!("input.n_bar must be >= 0, got {n_bar}")));
            }
            if n_bar > self.cutoff() as f64 / 4.0 {
                return Err(CliError::validation(format!(
                    "input.n_bar = {n_bar} too large for cutoff {} (need n_bar <= cutoff/4)",
                    self.cutoff()
                )));
            }
        }
        if !(2..=64).contains(&self.cutoff()) {
            return Err(CliError::validation("cutoff must lie in [2, 64]"));
        }
        Ok(())
    }

    pub fn to_spec(&self) -> Result<NetworkSpec<f64>, CliError> {
        self.validate()?;
        let theta = self.theta_rad.unwrap_or(0.0);
        let squeezer = match (self.zeta_mag, self.s_per_m, self.crystal_length_m) {
            (Some(z), _, _) => SqueezerSpec::from_zeta_mag(z, theta),
            (None, Some(s), Some(l)) => SqueezerSpec::new(s, l, theta),
            _ => unreachable!("validated"),
        }
        .map_err(|e| CliError::validation(e.to_string()))?;
        let t = self.splitter_t_mag;
        let input = match self.input {
            InputSpec::Vacuum => NetworkInput::Vacuum,
            InputSpec::Coherent { n_bar } => {
                NetworkInput::Coherent { alpha: Complex64::new(n_bar.sqrt(), 0.0) }
            }
        };
        Ok(NetworkSpec {
            input,
            squeezer,
            splitter: (
                Complex64::new(t, 0.0),
                Complex64::new(0.0, (1.0 - t * t).sqrt()),
            ),
            losses: (self.eta_1, self.eta_2),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McScenario {
    pub network: NetworkScenario,
    pub pulses: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_n_bar: Option<Vec<f64>>,
}

impl McScenario {
    fn validate(&self) -> Result<(), CliError> {
        if self.pulses == 0 {
            return Err(CliError::validation("pulses must be >= 1"));
        }
        self.network.validate()?;
        if let Some(grid) = &self.sweep_n_bar {
            if grid.is_empty() || grid.iter().any(|n| *n < 0.0) {
                return Err(CliError::validation("sweep_n_bar must be nonempty and nonnegative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum ModeStateSpec {
    Vacuum,
    Coherent {
        n_bar: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        phase_rad: Option<f64>,
    },
    CoherentSymbolic {
        symbol: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationRequest {
    pub modes: BTreeMap<String, ModeStateSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderScenario {
    pub expression: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectations: Option<Vec<ExpectationRequest>>,
}

impl OrderScenario {
    fn validate(&self) -> Result<(), CliError> {
        if self.expression.trim().is_empty() {
            return Err(CliError::validation("expression must be nonempty"));
        }
        if let Some(reqs) = &self.expectations {
            for req in reqs {
                for (mode, state) in &req.modes {
                    if let ModeStateSpec::Coherent { n_bar, .. } = state {
                        if *n_bar < 0.0 {
                            return Err(CliError::validation(format!(
                                "modes.{mode}.n_bar must be >= 0, got {n_bar}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_nm(name: &str, value: f64) -> Result<(), CliError> {
    if !(value > 0.0 && value < 1e5) {
        return Err(CliError::validation(format!(
            "{name} must be a positive wavelength quantity in nm, got {value}"
        )));
    }
    Ok(())
}

/// Load and validate a scenario file. Returns the scenario and the parsed
/// raw value (used for the content hash).
pub fn load_scenario(path: &Path) -> Result<(Scenario, serde_json::Value), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::validation(format!("cannot read scenario {}: {e}", path.display()))
    })?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("scenario is not valid JSON: {e}")))?;
    let scenario = scenario_from_value(&raw)?;
    Ok((scenario, raw))
}

pub fn scenario_from_value(raw: &serde_json::Value) -> Result<Scenario, CliError> {
    let obj = raw
        .as_object()
        .ok_or_else(|| CliError::validation("scenario must be a JSON object"))?;
    let kind = obj
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| CliError::validation("scenario needs a string 'kind' field"))?;
    let mut rest = obj.clone();
    rest.remove("kind");
    let rest = serde_json::Value::Object(rest);
    let fail = |e: serde_json::Error| CliError::validation(format!("schema violation: {e}"));
    let scenario = match kind {
        "gamma" => Scenario::Gamma(serde_json::from_value(rest).map_err(fail)?),
        "g2" => Scenario::G2(serde_json::from_value(rest).map_err(fail)?),
        "network" => Scenario::Network(serde_json::from_value(rest).map_err(fail)?),
        "mc" => Scenario::Mc(serde_json::from_value(rest).map_err(fail)?),
        "order" => Scenario::Order(serde_json::from_value(rest).map_err(fail)?),
        other => {
            return Err(CliError::validation(format!(
                "unknown scenario kind '{other}' (expected gamma | g2 | network | mc | order)"
            )))
        }
    };
    match &scenario {
        Scenario::Gamma(s) => s.validate()?,
        Scenario::G2(s) => s.validate()?,
        Scenario::Network(s) => s.validate()?,
        Scenario::Mc(s) => s.validate()?,
        Scenario::Order(s) => s.validate()?,
    }
    Ok(scenario)
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} scenario", self.kind())
    }
}

//! TOML experiment configs. Every physical key carries its unit in the name.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atom::{Geometry, Preset7p12};
use crate::dynamics::{IntegratorConfig, Method};
use crate::error::{Error, Result};
use crate::model::{ControlModel, GateModel, PresetSpec};
use crate::units::{khz, mhz, us};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    RamanScan,
    EitSpectrum,
    CnotTable,
    Bell,
    Parity,
    Ghz,
    Darkstate,
    Shifts,
}

impl Protocol {
    pub const ALL: [Protocol; 8] = [
        Protocol::RamanScan,
        Protocol::EitSpectrum,
        Protocol::CnotTable,
        Protocol::Bell,
        Protocol::Parity,
        Protocol::Ghz,
        Protocol::Darkstate,
        Protocol::Shifts,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Protocol::RamanScan => "raman_scan",
            Protocol::EitSpectrum => "eit_spectrum",
            Protocol::CnotTable => "cnot_table",
            Protocol::Bell => "bell",
            Protocol::Parity => "parity",
            Protocol::Ghz => "ghz",
            Protocol::Darkstate => "darkstate",
            Protocol::Shifts => "shifts",
        }
    }

    pub fn parse(s: &str) -> Option<Protocol> {
        Protocol::ALL.into_iter().find(|p| p.id() == s)
    }

    /// The scan axis a protocol sweeps, if any.
    pub fn scan_axis(self) -> Option<&'static str> {
        match self {
            Protocol::RamanScan => Some("raman_detuning_mhz"),
            Protocol::EitSpectrum => Some("coupling_detuning_mhz"),
            Protocol::Parity => Some("phase_rad"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub preset: String,
    /// 6P3/2 intensity scales relative to the reference powers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raman_power_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_power_scale: Option<f64>,
    /// 7P1/2 beam settings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_power_uw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_power_mw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intermediate_detuning_mhz: Option<f64>,
    /// Beam waist. Sets the 7P1/2 intensities and the cross-talk bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raman_detuning_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_detuning_mhz: Option<f64>,
    /// Omitted: the area-π duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_us: Option<f64>,
    #[serde(default = "reduced")]
    pub control: ControlModel,
    #[serde(default)]
    pub coupling_on_control: bool,
    #[serde(default)]
    pub gap_us: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation_um: Option<f64>,
    #[serde(default)]
    pub rydberg_dephasing_khz: f64,
    #[serde(default)]
    pub control_scattering_khz: f64,
}

fn reduced() -> ControlModel {
    ControlModel::Reduced
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Targets on +x, −x, +y, −y; k = 2 is a straight line.
    Cross,
    /// k = 2 only.
    RightAngle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub k: usize,
    #[serde(default = "cross")]
    pub layout: Layout,
    /// Control-target spacing; defaults to the model separation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_um: Option<f64>,
    #[serde(default)]
    pub target_pairs: bool,
}

fn cross() -> Layout {
    Layout::Cross
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ScanAxis {
    /// Evenly spaced points, stop included. For `phase_rad` the stop is
    /// excluded so the grid stays in [0, 2π).
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points.max(1);
        let last = if self.name == "phase_rad" { n } else { n.saturating_sub(1).max(1) };
        let step = (self.stop - self.start) / last as f64;
        (0..n).map(|i| self.start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "adaptive")]
    pub method: Method,
    #[serde(default = "rtol")]
    pub rtol: f64,
    #[serde(default = "atol")]
    pub atol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_step_us: Option<f64>,
    #[serde(default = "trajectories")]
    pub trajectories: usize,
}

fn adaptive() -> Method {
    Method::AdaptiveRk
}
fn rtol() -> f64 {
    IntegratorConfig::default().rtol
}
fn atol() -> f64 {
    IntegratorConfig::default().atol
}
fn trajectories() -> usize {
    IntegratorConfig::default().trajectories
}

impl Default for IntegratorSection {
    fn default() -> Self {
        IntegratorSection {
            method: adaptive(),
            rtol: rtol(),
            atol: atol(),
            max_step_us: None,
            fixed_step_us: None,
            trajectories: trajectories(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// File stem; defaults to the protocol id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// Protocol-specific knobs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Nominal shots per truth-table entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    /// Pulse length of an EIT spectrum; defaults to the model τ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eit_tau_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_rabi_mhz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: String,
    #[serde(default = "one")]
    pub seed: u64,
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanAxis>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub output: OutputSection,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Dotted key path, e.g. `model.waist_um`.
    pub path: String,
    pub message: String,
    pub severity: Severity,
    /// 1-based line in the source, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

impl Diagnostic {
    fn error(path: &str, message: impl Into<String>) -> Self {
        Diagnostic { path: path.into(), message: message.into(), severity: Severity::Error, line: None }
    }

    fn warning(path: &str, message: impl Into<String>) -> Self {
        Diagnostic { path: path.into(), message: message.into(), severity: Severity::Warning, line: None }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.line {
            Some(l) => write!(f, "{sev}: line {l}: `{}`: {}", self.path, self.message),
            None => write!(f, "{sev}: `{}`: {}", self.path, self.message),
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

/// Line of a byte offset, 1-based.
fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    /// Parses TOML. Syntax and schema errors come back as a single error
    /// diagnostic with the source line.
    pub fn from_toml_str(src: &str) -> std::result::Result<Self, Diagnostic> {
        toml::from_str(src).map_err(|e: toml::de::Error| {
            let line = e.span().map(|s| line_of(src, s.start));
            let path = e
                .span()
                .and_then(|s| src.get(s.clone()))
                .map(|t| t.split(['=', '\n']).next().unwrap_or("").trim().trim_matches(['[', ']']).to_string())
                .filter(|p| !p.is_empty())
                .unwrap_or_else(|| "<document>".into());
            Diagnostic { path, message: e.message().to_string(), severity: Severity::Error, line }
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config types serialize to TOML")
    }

    pub fn protocol(&self) -> Result<Protocol> {
        Protocol::parse(&self.protocol).ok_or_else(|| Error::Config {
            path: "protocol".into(),
            message: format!("unknown protocol `{}`", self.protocol),
        })
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.protocol.clone())
    }

    /// Empty of errors iff [`crate::runner::run`] would start.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let protocol = if self.protocol.trim().is_empty() {
            out.push(Diagnostic::error("protocol", "protocol is empty; expected one of the protocol ids"));
            None
        } else {
            let p = Protocol::parse(&self.protocol);
            if p.is_none() {
                let ids: Vec<_> = Protocol::ALL.iter().map(|p| p.id()).collect();
                out.push(Diagnostic::error(
                    "protocol",
                    format!("unknown protocol `{}`; expected one of {}", self.protocol, ids.join(", ")),
                ));
            }
            p
        };
        self.validate_model(&mut out);
        if let Some(p) = protocol {
            self.validate_protocol(p, &mut out);
        }
        self.validate_integrator(&mut out);
        out
    }

    fn validate_model(&self, out: &mut Vec<Diagnostic>) {
        let m = &self.model;
        let positive = |out: &mut Vec<Diagnostic>, key: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    out.push(Diagnostic::error(&format!("model.{key}"), format!("must be positive, got {v}")));
                }
            }
        };
        let non_negative = |out: &mut Vec<Diagnostic>, key: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    out.push(Diagnostic::error(&format!("model.{key}"), format!("must be non-negative, got {v}")));
                }
            }
        };
        positive(out, "waist_um", m.waist_um);
        positive(out, "tau_us", m.tau_us);
        positive(out, "separation_um", m.separation_um);
        non_negative(out, "gap_us", Some(m.gap_us));
        non_negative(out, "rydberg_dephasing_khz", Some(m.rydberg_dephasing_khz));
        non_negative(out, "control_scattering_khz", Some(m.control_scattering_khz));
        for (k, v) in [("raman_detuning_mhz", m.raman_detuning_mhz), ("coupling_detuning_mhz", m.coupling_detuning_mhz)] {
            if v.is_some_and(|v| !v.is_finite()) {
                out.push(Diagnostic::error(&format!("model.{k}"), "must be finite"));
            }
        }
        let six = ["raman_power_scale", "coupling_power_scale"];
        let seven = ["probe_power_uw", "coupling_power_mw", "intermediate_detuning_mhz"];
        let set = |k: &str| match k {
            "raman_power_scale" => m.raman_power_scale.is_some(),
            "coupling_power_scale" => m.coupling_power_scale.is_some(),
            "probe_power_uw" => m.probe_power_uw.is_some(),
            "coupling_power_mw" => m.coupling_power_mw.is_some(),
            _ => m.intermediate_detuning_mhz.is_some(),
        };
        match m.preset.as_str() {
            "6p32_table1" => {
                non_negative(out, "raman_power_scale", m.raman_power_scale);
                non_negative(out, "coupling_power_scale", m.coupling_power_scale);
                for k in seven.into_iter().filter(|k| set(k)) {
                    out.push(Diagnostic::error(&format!("model.{k}"), "only applies to the 7p12_figS2 preset"));
                }
            }
            "7p12_figS2" => {
                non_negative(out, "probe_power_uw", m.probe_power_uw);
                non_negative(out, "coupling_power_mw", m.coupling_power_mw);
                if m.intermediate_detuning_mhz.is_some_and(|d| d == 0.0 || !d.is_finite()) {
                    out.push(Diagnostic::error("model.intermediate_detuning_mhz", "must be finite and nonzero"));
                }
                for k in six.into_iter().filter(|k| set(k)) {
                    out.push(Diagnostic::error(&format!("model.{k}"), "only applies to the 6p32_table1 preset"));
                }
            }
            other => {
                out.push(Diagnostic::error("model.preset", format!("unknown preset `{other}`")));
                return;
            }
        }
        if m.coupling_on_control && m.control == ControlModel::Reduced {
            out.push(Diagnostic::error(
                "model.coupling_on_control",
                "coupling light on the control needs `control = \"full_ladder\"`",
            ));
        }
        if out.iter().any(|d| d.severity == Severity::Error) {
            return;
        }
        // τ against the area-π value.
        if let (Some(tau), Ok(model)) = (m.tau_us, self.gate_model()) {
            let area_pi = GateModel { tau: None, ..model }.tau();
            match area_pi {
                Ok(t) if (tau * 1e-6 - t).abs() > 0.01 * t => out.push(Diagnostic::warning(
                    "model.tau_us",
                    format!("τ = {tau} µs differs from the area-π value {:.4} µs by more than 1%", t * 1e6),
                )),
                Err(e) => out.push(Diagnostic::error("model", e.to_string())),
                _ => {}
            }
        }
    }

    fn validate_protocol(&self, p: Protocol, out: &mut Vec<Diagnostic>) {
        match (p.scan_axis(), &self.scan) {
            (Some(axis), Some(s)) => {
                if s.name != axis {
                    out.push(Diagnostic::error(
                        "scan.name",
                        format!("protocol `{}` scans `{axis}`, not `{}`", p.id(), s.name),
                    ));
                }
                if s.points < 2 {
                    out.push(Diagnostic::error("scan.points", "a scan needs at least 2 points"));
                }
                if !(s.start.is_finite() && s.stop.is_finite()) || s.start == s.stop {
                    out.push(Diagnostic::error("scan", "start and stop must be finite and distinct"));
                }
                if s.name == "phase_rad" && !(s.start >= 0.0 && s.stop <= 2.0 * std::f64::consts::PI + 1e-12 && s.stop > s.start) {
                    out.push(Diagnostic::error("scan", "phase scans must cover a subrange of [0, 2π]"));
                }
            }
            (Some(axis), None) => {
                out.push(Diagnostic::error("scan", format!("protocol `{}` needs a `{axis}` scan", p.id())));
            }
            (None, Some(_)) => {
                out.push(Diagnostic::error("scan", format!("protocol `{}` takes no scan axis", p.id())));
            }
            (None, None) => {}
        }
        match (p, &self.geometry) {
            (Protocol::Ghz, None) => out.push(Diagnostic::error("geometry", "ghz needs a [geometry] section")),
            (Protocol::Ghz, Some(g)) => {
                if !(1..=4).contains(&g.k) {
                    out.push(Diagnostic::error("geometry.k", format!("k = {} is outside the supported 1..=4", g.k)));
                }
                if g.layout == Layout::RightAngle && g.k != 2 {
                    out.push(Diagnostic::error("geometry.layout", "right_angle needs k = 2"));
                }
                if g.spacing_um.is_some_and(|s| !(s > 0.0)) {
                    out.push(Diagnostic::error("geometry.spacing_um", "must be positive"));
                }
            }
            (_, Some(_)) => out.push(Diagnostic::warning("geometry", "ignored by this protocol")),
            _ => {}
        }
        let o = &self.options;
        if o.shots == Some(0) {
            out.push(Diagnostic::error("options.shots", "must be at least 1"));
        }
        if o.eit_tau_us.is_some_and(|t| !(t > 0.0)) {
            out.push(Diagnostic::error("options.eit_tau_us", "must be positive"));
        }
        if p == Protocol::Darkstate {
            match o.coupling_rabi_mhz {
                Some(c) if c > 0.0 => {}
                Some(_) => out.push(Diagnostic::error("options.coupling_rabi_mhz", "must be positive")),
                None => out.push(Diagnostic::error("options.coupling_rabi_mhz", "darkstate needs Ω_c")),
            }
            if o.probe_rabi_mhz.is_some_and(|p| !(p >= 0.0)) {
                out.push(Diagnostic::error("options.probe_rabi_mhz", "must be non-negative"));
            }
        }
    }

    fn validate_integrator(&self, out: &mut Vec<Diagnostic>) {
        let i = &self.integrator;
        if !(i.rtol > 0.0) {
            out.push(Diagnostic::error("integrator.rtol", "must be positive"));
        }
        if !(i.atol > 0.0) {
            out.push(Diagnostic::error("integrator.atol", "must be positive"));
        }
        for (k, v) in [("max_step_us", i.max_step_us), ("fixed_step_us", i.fixed_step_us)] {
            if v.is_some_and(|v| !(v > 0.0)) {
                out.push(Diagnostic::error(&format!("integrator.{k}"), "must be positive"));
            }
        }
        if i.trajectories == 0 {
            out.push(Diagnostic::error("integrator.trajectories", "must be at least 1"));
        }
    }

    pub fn gate_model(&self) -> Result<GateModel> {
        let m = &self.model;
        let (base, preset) = match m.preset.as_str() {
            "6p32_table1" => (
                GateModel::table_i(),
                PresetSpec::P6p32 {
                    raman_power_scale: m.raman_power_scale.unwrap_or(1.0),
                    coupling_power_scale: m.coupling_power_scale.unwrap_or(1.0),
                },
            ),
            "7p12_figS2" => {
                let d = Preset7p12::default();
                let p = Preset7p12 {
                    probe_power_uw: m.probe_power_uw.unwrap_or(d.probe_power_uw),
                    coupling_power_mw: m.coupling_power_mw.unwrap_or(d.coupling_power_mw),
                    waist_um: m.waist_um.unwrap_or(d.waist_um),
                    detuning_mhz: m.intermediate_detuning_mhz.unwrap_or(d.detuning_mhz),
                };
                (GateModel::p7(), PresetSpec::P7p12(p))
            }
            other => {
                return Err(Error::Config { path: "model.preset".into(), message: format!("unknown preset `{other}`") })
            }
        };
        Ok(GateModel {
            preset,
            raman_detuning: m.raman_detuning_mhz.map_or(base.raman_detuning, mhz),
            coupling_detuning: m.coupling_detuning_mhz.map_or(base.coupling_detuning, mhz),
            tau: m.tau_us.map(us),
            control: m.control,
            coupling_on_control: m.coupling_on_control,
            gap: us(m.gap_us),
            separation: m.separation_um.unwrap_or(base.separation),
            rydberg_dephasing: khz(m.rydberg_dephasing_khz),
            control_scattering: khz(m.control_scattering_khz),
        })
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        let i = &self.integrator;
        let d = IntegratorConfig::default();
        IntegratorConfig {
            method: i.method,
            rtol: i.rtol,
            atol: i.atol,
            max_step: i.max_step_us.map_or(d.max_step, us),
            fixed_step: i.fixed_step_us.map_or(d.fixed_step, us),
            trajectories: i.trajectories,
            seed: self.seed,
        }
    }

    pub fn geometry(&self, model: &GateModel) -> Option<(Geometry, bool)> {
        let g = self.geometry.as_ref()?;
        let r = g.spacing_um.unwrap_or(model.separation);
        let geom = match g.layout {
            Layout::Cross => Geometry::cross(g.k, r),
            Layout::RightAngle => Geometry::right_angle(r),
        };
        Some((geom, g.target_pairs))
    }
}

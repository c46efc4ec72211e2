//! Run configuration: a flat document of dotted `section.key = value` lines.
//!
//! The text format is TOML restricted to dotted keys, so `#` comments, quoted
//! strings and `inf` all work. Unknown keys are rejected.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abc::{source_omega, AbcPair};
use crate::error::{Error, Result};
use crate::lattice::{SpatialGrid, TimeGrid, WaveFunction};
use crate::physics::{HeightRule, PacketSpec, PotentialKind, PotentialSpec};
use crate::propagator::{BoundaryMode, Ramp, SourceSpec, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_sites: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub mode: BoundaryMode,
}

/// Interpolation energies of the absorbing boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbcConfig {
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialChoice {
    Free,
    Barrier,
    Well,
}

/// Square potential centred on the origin. `v0` is the magnitude; when
/// absent it is matched to the drive energy `p0^2 / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialChoice,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub v0: Option<f64>,
}

/// Point source `(s0 + i s0_im) S(t) exp(-i omega t)` at the site nearest `x`.
/// `omega` defaults to the frequency the right boundary assigns to `p0`;
/// no `ramp_dt` means constant amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub s0: f64,
    #[serde(default)]
    pub s0_im: f64,
    pub p0: f64,
    #[serde(default)]
    pub omega: Option<f64>,
    pub x: f64,
    #[serde(default)]
    pub ramp_dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_stride")]
    pub frame_stride: usize,
    #[serde(default)]
    pub path: Option<String>,
}

fn default_stride() -> usize {
    100
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            frame_stride: default_stride(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Probability in `[a, b]` recorded at every frame.
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    /// Region compared against the free-space stationary solution at the end.
    #[serde(default)]
    pub steady_region: Option<[f64; 2]>,
    #[serde(default)]
    pub transmission: bool,
    #[serde(default)]
    pub monitor_x: Option<f64>,
}

/// One scalar swept over `count` evenly spaced values, addressed by its
/// dotted key (for example `potential.v0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + i as f64 * step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub strategy: Strategy,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub abc: Option<AbcConfig>,
    #[serde(default)]
    pub packet: Option<PacketConfig>,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub source: Option<SourceConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// One `dotted.key = value` line per scalar, in declaration order.
    pub fn to_toml_string(&self) -> Result<String> {
        let value = toml::Value::try_from(self).map_err(|e| invalid(e.to_string()))?;
        let mut out = String::new();
        flatten(&value, "", &mut out);
        Ok(out)
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.grid.x_min, self.grid.x_max, self.grid.n_sites)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.time.t0, self.time.dt, self.time.n_steps)
    }

    pub fn abc_pair(&self) -> Result<Option<AbcPair>> {
        match (self.boundary.mode, &self.abc) {
            (BoundaryMode::Dirichlet, _) => Ok(None),
            (BoundaryMode::Abc, Some(a)) => AbcPair::new(a.alpha1, a.alpha2).map(Some),
            (BoundaryMode::Abc, None) => Err(invalid(
                "boundary.mode = \"abc\" needs abc.alpha1 and abc.alpha2",
            )),
        }
    }

    /// Momentum that sets a matched potential height: the packet's if there
    /// is one, otherwise the source's.
    pub fn drive_momentum(&self) -> Option<f64> {
        self.packet
            .as_ref()
            .map(|p| p.p0)
            .or_else(|| self.source.as_ref().map(|s| s.p0))
    }

    pub fn packet_spec(&self) -> Option<PacketSpec> {
        self.packet.as_ref().map(|p| PacketSpec {
            x0: p.x0,
            p0: p.p0,
            sigma0: p.sigma0,
        })
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        let p = &self.potential;
        let height = match p.v0 {
            Some(v) => HeightRule::Explicit(v),
            None => HeightRule::MatchedToP0,
        };
        let half_width = || {
            p.half_width
                .ok_or_else(|| invalid("square potentials need potential.half_width"))
        };
        Ok(match p.kind {
            PotentialChoice::Free => PotentialSpec::free(),
            PotentialChoice::Barrier => PotentialSpec::barrier(height, half_width()?),
            PotentialChoice::Well => PotentialSpec::well(height, half_width()?),
        })
    }

    /// Source spec with `omega` taken from the config or derived from the
    /// right-boundary chord.
    pub fn source_spec(&self) -> Result<Option<SourceSpec>> {
        let Some(s) = &self.source else {
            return Ok(None);
        };
        let grid = self.spatial_grid()?;
        let omega = match s.omega {
            Some(w) => w,
            None => match self.abc_pair()? {
                Some(pair) => source_omega(s.p0, &pair.right)?,
                None => {
                    return Err(invalid(
                        "source.omega is required with Dirichlet boundaries",
                    ))
                }
            },
        };
        let ramp = match s.ramp_dt {
            None => Ramp::Constant,
            Some(t) if t.is_infinite() && t > 0.0 => Ramp::Constant,
            Some(t) => Ramp::Exponential { time_constant: t },
        };
        Ok(Some(SourceSpec {
            s0: Complex64::new(s.s0, s.s0_im),
            ramp,
            omega,
            site: grid.nearest_site(s.x),
        }))
    }

    /// Far edge of the barrier as seen from the source.
    pub fn barrier_edge(&self) -> Result<f64> {
        let s = self
            .source
            .as_ref()
            .ok_or_else(|| invalid("transmission analysis needs a source"))?;
        let w = match (self.potential.kind, self.potential.half_width) {
            (PotentialChoice::Barrier | PotentialChoice::Well, Some(w)) => w,
            _ => {
                return Err(invalid(
                    "transmission analysis needs a square potential with a half-width",
                ))
            }
        };
        if s.x.abs() < w {
            return Err(invalid("the source sits inside the potential"));
        }
        Ok(if s.x < 0.0 { w } else { -w })
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.spatial_grid()?;
        if grid.n_sites() < 3 {
            return Err(invalid("grid.n_sites must be at least 3"));
        }
        self.time_grid()?;
        self.abc_pair()?;
        if self.packet.is_none() && self.source.is_none() {
            return Err(invalid("a run needs a packet, a source, or both"));
        }
        if self.output.frame_stride == 0 {
            return Err(invalid("output.frame_stride must be at least 1"));
        }
        let spec = self.potential_spec()?;
        if !matches!(spec.kind, PotentialKind::Free) && !(spec.half_width > 0.0) {
            return Err(invalid("potential.half_width must be positive"));
        }
        if spec.height == HeightRule::MatchedToP0
            && !matches!(spec.kind, PotentialKind::Free)
            && self.drive_momentum().is_none()
        {
            return Err(invalid(
                "potential.v0 is needed when there is no p0 to match",
            ));
        }
        if let Some(p) = &self.packet {
            if !(p.sigma0 > 0.0) {
                return Err(invalid("packet.sigma0 must be positive"));
            }
        }
        if let Some(s) = &self.source {
            if !(grid.x_min()..=grid.x_max()).contains(&s.x) {
                return Err(invalid(format!("source.x = {} lies outside the grid", s.x)));
            }
            if let Some(t) = s.ramp_dt {
                if !(t > 0.0) {
                    return Err(invalid("source.ramp_dt must be positive"));
                }
            }
            let spec = self.source_spec()?.expect("source present");
            if !(spec.omega > 0.0) {
                return Err(Error::NonpositiveOmega(spec.omega));
            }
        }
        for (name, region) in [
            ("interval", self.analysis.interval),
            ("steady_region", self.analysis.steady_region),
        ] {
            if let Some([a, b]) = region {
                if !(a < b) {
                    return Err(invalid(format!("analysis.{name} must be increasing")));
                }
                if grid.sites_in(a, b).is_none() {
                    return Err(invalid(format!("analysis.{name} holds no sites")));
                }
            }
        }
        if self.analysis.steady_region.is_some() && self.source.is_none() {
            return Err(invalid("analysis.steady_region needs a source"));
        }
        if self.analysis.transmission {
            let edge = self.barrier_edge()?;
            if let Some(m) = self.analysis.monitor_x {
                if !(grid.x_min()..=grid.x_max()).contains(&m) {
                    return Err(invalid("analysis.monitor_x lies outside the grid"));
                }
                let src = self.source.as_ref().expect("checked by barrier_edge").x;
                if (m - edge).signum() != (edge - src).signum() {
                    return Err(invalid(
                        "analysis.monitor_x must lie beyond the barrier, away from the source",
                    ));
                }
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.count == 0 {
                return Err(invalid("sweep.count must be at least 1"));
            }
            if !self.analysis.transmission {
                return Err(invalid(
                    "a sweep reports transmission; set analysis.transmission = true",
                ));
            }
            if sw.name.starts_with("sweep.") {
                return Err(invalid("a sweep cannot sweep itself"));
            }
            for v in [sw.start, sw.stop] {
                self.with_value(&sw.name, v)?;
            }
        }
        Ok(())
    }

    /// Validated copy with every derived default written out: matched
    /// potential heights, the source frequency and the monitor point.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut out = self.clone();
        if out.potential.kind != PotentialChoice::Free && out.potential.v0.is_none() {
            let p0 = out.drive_momentum().expect("validated");
            out.potential.v0 = Some(0.5 * p0 * p0);
        }
        if let Some(spec) = self.source_spec()? {
            out.source.as_mut().expect("source present").omega = Some(spec.omega);
            if out.analysis.transmission && out.analysis.monitor_x.is_none() {
                let grid = self.spatial_grid()?;
                let edge = self.barrier_edge()?;
                out.analysis.monitor_x = Some(crate::analysis::default_monitor(
                    &WaveFunction::zeros(grid),
                    &spec,
                    edge,
                ));
            }
        }
        Ok(out)
    }

    /// Copy with the scalar at dotted key `name` replaced by `value`.
    pub fn with_value(&self, name: &str, value: f64) -> Result<Self> {
        let mut doc = toml::Value::try_from(self).map_err(|e| invalid(e.to_string()))?;
        let mut slot = &mut doc;
        for part in name.split('.') {
            let table = slot
                .as_table_mut()
                .ok_or_else(|| invalid(format!("`{name}` does not name a scalar")))?;
            slot = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        *slot = match slot {
            toml::Value::Integer(_) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
            toml::Value::Table(t) if !t.is_empty() => {
                return Err(invalid(format!("`{name}` names a section, not a scalar")))
            }
            _ => toml::Value::Float(value),
        };
        doc.try_into()
            .map_err(|e: toml::de::Error| invalid(format!("setting `{name}`: {e}")))
    }
}

fn flatten(value: &toml::Value, prefix: &str, out: &mut String) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(v, &key, out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push_str(" = ");
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
}

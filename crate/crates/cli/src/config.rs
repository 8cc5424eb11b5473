use std::path::Path;

use cat_tomo::circuit::{CatNormalization, CatSign};
use cat_tomo::experiment::{NoiseSpec, SearchMode, SearchRegion, TomographySetup};
use cat_tomo::grid::AxisSpec;
use cat_tomo::tomography::{FitModel, PhaseExtension};
use cat_tomo::wigner::Convention;
use cat_tomo::{BellState, CatSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One experiment, read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    pub cat: CatConfig,
    #[serde(default)]
    pub tomography: TomographyConfig,
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_grid: Option<AxesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghz: Option<GhzConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatConfig {
    /// |β|² of each branch.
    pub mean_photons: f64,
    /// Half-angle between the branches, radians.
    pub theta: f64,
    #[serde(default = "plus")]
    pub sign: CatSign,
    #[serde(default)]
    pub normalization: CatNormalization,
}

fn plus() -> CatSign {
    CatSign::Plus
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_kc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_extension: Option<PhaseExtension>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_model: Option<FitModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub re: [f64; 2],
    pub im: [f64; 2],
    #[serde(default = "default_search_step")]
    pub step: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub local: Vec<LocalSearch>,
}

fn default_search_step() -> f64 {
    0.01
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSearch {
    pub point: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub magnitude: f64,
    pub runs: usize,
    pub seed: u64,
    #[serde(default)]
    pub renormalize: bool,
    /// Evaluation point; defaults to the exact minimum found by the search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxesConfig {
    pub re: AxisSpec,
    pub im: AxisSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhzConfig {
    pub bell: BellState,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1));
            let msg = e.message().trim().replace('\n', " ");
            CliError::Config(match line {
                Some(l) => format!("line {l}: {msg}"),
                None => msg,
            })
        })?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.cat.mean_photons.is_nan() || self.cat.mean_photons <= 0.0 {
            return bad(format!("cat.mean_photons = {} must be > 0", self.cat.mean_photons));
        }
        self.cat_spec().map_err(|e| CliError::Config(e.to_string()))?;
        if self.search.step.is_nan() || self.search.step <= 0.0 {
            return bad(format!("search.step = {} must be > 0", self.search.step));
        }
        if self.search.re[0] >= self.search.re[1] || self.search.im[0] > self.search.im[1] {
            return bad("search.re / search.im must be increasing ranges".into());
        }
        if let Some(count) = self.tomography.phase_count {
            if count < 2 {
                return bad(format!("tomography.phase_count = {count} must be at least 2"));
            }
        }
        let setup = self.setup();
        setup.x_axis.count().map_err(|e| CliError::Config(format!("tomography.x: {e}")))?;
        setup.recon.validate().map_err(|e| CliError::Config(format!("tomography: {e}")))?;
        if let Some(axes) = &self.wigner_grid {
            axes.re.count().map_err(|e| CliError::Config(format!("wigner_grid.re: {e}")))?;
            axes.im.count().map_err(|e| CliError::Config(format!("wigner_grid.im: {e}")))?;
        }
        if let Some(noise) = &self.noise {
            self.noise_spec_from(noise).map_err(|e| CliError::Config(format!("noise: {e}")))?;
        }
        Ok(())
    }

    pub fn cat_spec(&self) -> cat_tomo::Result<CatSpec> {
        Ok(CatSpec::new(self.cat.mean_photons.sqrt(), self.cat.theta, self.cat.sign)?
            .with_normalization(self.cat.normalization))
    }

    /// Library defaults for the cat, overridden field by field.
    pub fn setup(&self) -> TomographySetup {
        let nbar = self.cat.mean_photons;
        let mut setup = match self.cat_spec() {
            Ok(spec) => TomographySetup::for_cat(&spec),
            Err(_) => TomographySetup {
                n_max: cat_tomo::fock::default_n_max(nbar),
                phase_count: cat_tomo::quadrature::DEFAULT_PHASE_COUNT,
                x_axis: cat_tomo::quadrature::default_x_axis(nbar),
                recon: cat_tomo::ReconstructionConfig::for_mean_photons(nbar),
            },
        };
        let t = &self.tomography;
        if let Some(n) = t.n_max {
            setup.n_max = n;
        }
        if let Some(n) = t.phase_count {
            setup.phase_count = n;
        }
        if let Some(x) = t.x {
            setup.x_axis = x;
        }
        if let Some(kc) = t.cutoff_kc {
            setup.recon.cutoff_kc = kc;
        }
        if let Some(ext) = t.phase_extension {
            setup.recon.phase_extension = ext;
        }
        if let Some(fit) = t.fit_model {
            setup.recon.fit_model = fit;
            if fit == FitModel::None && t.refine.is_none() {
                setup.recon.refine = 1;
            }
        }
        if let Some(r) = t.refine {
            setup.recon.refine = r;
        }
        setup
    }

    pub fn search_region(&self) -> SearchRegion {
        SearchRegion {
            re: (self.search.re[0], self.search.re[1]),
            im: (self.search.im[0], self.search.im[1]),
            step: self.search.step,
        }
    }

    pub fn local_modes(&self) -> Vec<SearchMode> {
        self.search
            .local
            .iter()
            .map(|l| SearchMode::LocalNear { point: (l.point[0], l.point[1]), radius: l.radius })
            .collect()
    }

    /// Grid for CSV output: the configured axes, or the largest square (to
    /// 0.1) inside the disc |α| ≤ max|x| that back-projection can reach.
    pub fn wigner_axes(&self) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let axes = match self.wigner_grid {
            Some(a) => a,
            None => {
                let half = (self.setup().x_axis.max / std::f64::consts::SQRT_2 * 10.0).floor() / 10.0;
                let axis = AxisSpec::symmetric(half, 0.02)?;
                AxesConfig { re: axis, im: axis }
            }
        };
        Ok((axes.re.points()?, axes.im.points()?))
    }

    fn noise_spec_from(&self, noise: &NoiseConfig) -> cat_tomo::Result<NoiseSpec> {
        let mut spec = NoiseSpec::new(noise.magnitude, noise.runs, noise.seed)?;
        spec.renormalize = noise.renormalize;
        Ok(spec)
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec, CliError> {
        let noise = self
            .noise
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("{}: no [noise] section", self.name)))?;
        Ok(self.noise_spec_from(noise)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
[cat]
mean_photons = 5.0
theta = 1.0
[search]
re = [0.0, 1.0]
im = [-0.2, 0.2]
"#;

    #[test]
    fn minimal_config_uses_library_defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        let setup = c.setup();
        assert_eq!(setup.n_max, 50);
        assert_eq!(setup.phase_count, 11);
        assert_eq!(c.search.step, 0.01);
        assert_eq!(c.cat.normalization, CatNormalization::Exact);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("theta = 1.0", "theta = 1.0\ntheeta = 2.0");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("line")), "{err}");
    }

    #[test]
    fn out_of_range_angle_is_a_config_error() {
        let text = MINIMAL.replace("theta = 1.0", "theta = 2.0");
        assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn raw_fit_defaults_to_no_refinement() {
        let text = format!("{MINIMAL}[tomography]\nfit_model = \"none\"\n");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.setup().recon.refine, 1);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        let back = ExperimentConfig::parse(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}

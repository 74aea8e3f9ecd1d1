//! Declarative experiment configuration.
//!
//! The format is flat `key = value` lines with dotted section prefixes —
//! trivially parseable, diff-friendly, and with no nesting to get wrong:
//!
//! ```text
//! # refractive-index recovery
//! model.kind   = stekloff
//! model.target = 0.62
//! prior.lower  = 0
//! prior.upper  = 6
//! sampler.K    = 10000
//! data.values  = 0.62
//! ```
//!
//! `#` starts a comment, blank lines are skipped, unknown keys are errors,
//! and validation reports every violation at once rather than stopping at
//! the first.

use crate::estimators::Region;
use crate::models::{
    ForwardModel, GaussianMixtureModel, MixtureComponent, NoiseKind, PointSourceModel, SourceMode,
    SourceSpec, StekloffModel, WaveMediumModel,
};
use crate::sampler::{BoxPrior, ResidualExponent};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Every violation found in a config, in file order where that makes sense.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} config violation{}:",
            self.violations.len(),
            if self.violations.len() == 1 { "" } else { "s" }
        )?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Model section, resolved but not yet constructed (construction cannot
/// fail once validation has passed).
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Stekloff { wavenumber: f64, target: f64, max_order: u32, dirichlet_guard: f64 },
    WaveMedium { sensors: Vec<f64>, time: f64, truncation: u32, source: SourceSpec },
    PointSource { receiver: [f64; 2], wavenumber: f64 },
    GaussianMixture { components: Vec<MixtureComponent> },
}

impl ModelConfig {
    pub fn parameter_dim(&self) -> usize {
        match self {
            ModelConfig::PointSource { .. } => 2,
            _ => 1,
        }
    }

    pub fn observable_len(&self) -> usize {
        match self {
            ModelConfig::WaveMedium { sensors, .. } => sensors.len(),
            ModelConfig::PointSource { .. } => 2,
            _ => 1,
        }
    }

    pub fn build(&self) -> Box<dyn ForwardModel> {
        match self {
            ModelConfig::Stekloff { wavenumber, target, max_order, dirichlet_guard } => {
                let mut m = StekloffModel::new(*wavenumber, *target);
                m.max_order = *max_order;
                m.dirichlet_guard = *dirichlet_guard;
                Box::new(m)
            }
            ModelConfig::WaveMedium { sensors, time, truncation, source } => {
                Box::new(WaveMediumModel::new(sensors.clone(), *time, *truncation, source.clone()))
            }
            ModelConfig::PointSource { receiver, wavenumber } => {
                Box::new(PointSourceModel::new(*receiver, *wavenumber))
            }
            ModelConfig::GaussianMixture { components } => {
                Box::new(GaussianMixtureModel::new(components.clone()))
            }
        }
    }
}

/// Where the observed data comes from; a config names exactly one.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Inline(Vec<f64>),
    /// Whitespace-separated floats, resolved against the config's directory.
    File(PathBuf),
    Synthesize {
        true_param: Vec<f64>,
        noise_kind: NoiseKind,
        noise_level: f64,
        data_seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub prior_lower: Vec<f64>,
    pub prior_upper: Vec<f64>,
    /// `None` means derive at run time: 0.05 × max |data value|.
    pub sigma: Option<f64>,
    pub exponent: ResidualExponent,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// `None` means the box center.
    pub initial: Option<Vec<f64>>,
    pub bins: Vec<usize>,
    pub epsilon: f64,
    pub min_separation: usize,
    /// Manual report regions; 1-D runs without them fall back to the
    /// automatic basin partition.
    pub regions: Option<Vec<Region>>,
    pub data: DataSource,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn prior(&self) -> BoxPrior {
        BoxPrior::new(self.prior_lower.clone(), self.prior_upper.clone())
    }
}

const DEFAULT_EPSILON: f64 = 0.2;
const DEFAULT_MIN_SEPARATION: usize = 3;
const DEFAULT_BINS_1D: usize = 60;
const DEFAULT_BINS_2D: usize = 40;

/// Raw `key = value` entries plus the violation accumulator.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
    violations: Vec<String>,
}

impl Entries {
    fn scan(text: &str) -> Self {
        let mut map = BTreeMap::new();
        let mut violations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if stripped.is_empty() {
                continue;
            }
            let Some((key, value)) = stripped.split_once('=') else {
                violations.push(format!("line {line}: expected `key = value`, got `{stripped}`"));
                continue;
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                violations.push(format!("line {line}: empty key"));
            } else if let Some((first, _)) = map.insert(key.clone(), (line, value)) {
                violations.push(format!(
                    "line {line}: duplicate key `{key}` (first set on line {first})"
                ));
            }
        }
        Entries { map, violations }
    }

    fn bad(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn take_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn take_str(&mut self, key: &str) -> Option<String> {
        self.take_raw(key).map(|(_, v)| v)
    }

    fn take_f64(&mut self, key: &str) -> Option<f64> {
        let (line, v) = self.take_raw(key)?;
        match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.bad(format!("line {line}: `{key}` expects a number, got `{v}`"));
                None
            }
        }
    }

    fn take_u64(&mut self, key: &str) -> Option<u64> {
        let (line, v) = self.take_raw(key)?;
        match v.parse::<u64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.bad(format!("line {line}: `{key}` expects a nonneg integer, got `{v}`"));
                None
            }
        }
    }

    fn take_usize(&mut self, key: &str) -> Option<usize> {
        self.take_u64(key).map(|x| x as usize)
    }

    fn take_u32(&mut self, key: &str) -> Option<u32> {
        let (line, v) = self.take_raw(key)?;
        match v.parse::<u32>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.bad(format!("line {line}: `{key}` expects a small integer, got `{v}`"));
                None
            }
        }
    }

    /// Comma-separated floats.
    fn take_vec_f64(&mut self, key: &str) -> Option<Vec<f64>> {
        let (line, v) = self.take_raw(key)?;
        let mut out = Vec::new();
        for part in v.split(',') {
            match part.trim().parse::<f64>() {
                Ok(x) => out.push(x),
                Err(_) => {
                    self.bad(format!(
                        "line {line}: `{key}` expects comma-separated numbers, got `{part}`"
                    ));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn take_vec_usize(&mut self, key: &str) -> Option<Vec<usize>> {
        let (line, v) = self.take_raw(key)?;
        let mut out = Vec::new();
        for part in v.split(',') {
            match part.trim().parse::<usize>() {
                Ok(x) => out.push(x),
                Err(_) => {
                    self.bad(format!(
                        "line {line}: `{key}` expects comma-separated integers, got `{part}`"
                    ));
                    return None;
                }
            }
        }
        Some(out)
    }

    /// Semicolon-separated rows of exactly `arity` comma-separated floats.
    fn take_rows(&mut self, key: &str, arity: usize) -> Option<Vec<Vec<f64>>> {
        let (line, v) = self.take_raw(key)?;
        let mut rows = Vec::new();
        for row in v.split(';') {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != arity {
                self.bad(format!(
                    "line {line}: `{key}` expects `;`-separated groups of {arity} numbers, \
                     got `{row}`"
                ));
                return None;
            }
            let mut parsed = Vec::with_capacity(arity);
            for f in fields {
                match f.parse::<f64>() {
                    Ok(x) => parsed.push(x),
                    Err(_) => {
                        self.bad(format!("line {line}: `{key}`: `{f}` is not a number"));
                        return None;
                    }
                }
            }
            rows.push(parsed);
        }
        Some(rows)
    }

    /// `lo..hi` ranges, one per axis comma-separated, regions `;`-separated:
    /// `0..3; 3..6` or `-2..0, -2..0; 0..2, 0..2`.
    fn take_regions(&mut self, key: &str) -> Option<Vec<(Vec<f64>, Vec<f64>)>> {
        let (line, v) = self.take_raw(key)?;
        let mut regions = Vec::new();
        for region in v.split(';') {
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for axis in region.split(',') {
                let Some((lo, hi)) = axis.split_once("..") else {
                    self.bad(format!(
                        "line {line}: `{key}`: expected `lo..hi` per axis, got `{axis}`"
                    ));
                    return None;
                };
                match (lo.trim().parse::<f64>(), hi.trim().parse::<f64>()) {
                    (Ok(a), Ok(b)) => {
                        lower.push(a);
                        upper.push(b);
                    }
                    _ => {
                        self.bad(format!("line {line}: `{key}`: `{axis}` is not a range"));
                        return None;
                    }
                }
            }
            regions.push((lower, upper));
        }
        Some(regions)
    }

    /// Remaining keys are unknown.
    fn finish(mut self) -> Vec<String> {
        for (key, (line, _)) in std::mem::take(&mut self.map) {
            self.violations.push(format!("line {line}: unknown key `{key}`"));
        }
        self.violations
    }

    /// Drop all keys with the given prefix without reporting them; used to
    /// avoid an unknown-key cascade after a bad `model.kind`.
    fn discard_prefix(&mut self, prefix: &str) {
        self.map.retain(|k, _| !k.starts_with(prefix));
    }
}

fn parse_model(e: &mut Entries) -> Option<ModelConfig> {
    let kind = match e.take_str("model.kind") {
        Some(k) => k,
        None => {
            e.bad("`model.kind` is required (stekloff | wave-medium | point-source | gaussian-mixture)");
            e.discard_prefix("model.");
            return None;
        }
    };
    match kind.as_str() {
        "stekloff" => {
            let wavenumber = e.take_f64("model.wavenumber").unwrap_or(f64::NAN);
            let target = e.take_f64("model.target").unwrap_or(f64::NAN);
            let max_order =
                e.take_u32("model.max_order").unwrap_or(StekloffModel::DEFAULT_MAX_ORDER);
            let dirichlet_guard = e
                .take_f64("model.dirichlet_guard")
                .unwrap_or(StekloffModel::DEFAULT_DIRICHLET_GUARD);
            let mut ok = true;
            if !(wavenumber > 0.0 && wavenumber.is_finite()) {
                e.bad("`model.wavenumber` must be a positive number (required for stekloff)");
                ok = false;
            }
            if !target.is_finite() {
                e.bad("`model.target` must be a finite number (required for stekloff)");
                ok = false;
            }
            if max_order < 1 {
                e.bad("`model.max_order` must be at least 1");
                ok = false;
            }
            if !(dirichlet_guard > 0.0 && dirichlet_guard.is_finite()) {
                e.bad("`model.dirichlet_guard` must be positive");
                ok = false;
            }
            ok.then_some(ModelConfig::Stekloff { wavenumber, target, max_order, dirichlet_guard })
        }
        "wave-medium" => {
            let sensors =
                e.take_vec_f64("model.sensors").unwrap_or_else(WaveMediumModel::default_sensors);
            let time = e.take_f64("model.time").unwrap_or(1.0);
            let truncation =
                e.take_u32("model.truncation").unwrap_or(WaveMediumModel::DEFAULT_TRUNCATION);
            let preset = e.take_str("model.source.preset");
            let modes = e.take_rows("model.source.modes", 3);
            let mut ok = true;
            if sensors.is_empty() || sensors.iter().any(|&x| !(0.0 < x && x < std::f64::consts::PI))
            {
                e.bad("`model.sensors` must be nonempty and lie strictly inside (0, pi)");
                ok = false;
            }
            if !(time > 0.0 && time.is_finite()) {
                e.bad("`model.time` must be positive");
                ok = false;
            }
            if truncation < 1 {
                e.bad("`model.truncation` must be at least 1");
                ok = false;
            }
            let source = match (preset.as_deref(), modes) {
                (Some(_), Some(_)) => {
                    e.bad("give `model.source.preset` or `model.source.modes`, not both");
                    ok = false;
                    SourceSpec::default()
                }
                (Some("aliasing"), None) => SourceSpec::aliasing_preset(),
                (Some(other), None) => {
                    e.bad(format!("`model.source.preset` must be `aliasing`, got `{other}`"));
                    ok = false;
                    SourceSpec::default()
                }
                (None, Some(rows)) => {
                    let mut parsed = Vec::with_capacity(rows.len());
                    for r in &rows {
                        if r[0] < 0.0 || r[0].fract() != 0.0 || r[1] < 0.0 || r[1].fract() != 0.0 {
                            e.bad("`model.source.modes` rows are `m1, m2, amplitude` with nonneg integer indices");
                            ok = false;
                            break;
                        }
                        parsed.push(SourceMode {
                            m1: r[0] as u32,
                            m2: r[1] as u32,
                            amplitude: r[2],
                        });
                    }
                    SourceSpec::new(parsed)
                }
                (None, None) => SourceSpec::default(),
            };
            ok.then_some(ModelConfig::WaveMedium { sensors, time, truncation, source })
        }
        "point-source" => {
            let receiver = e.take_vec_f64("model.receiver");
            let wavenumber = e.take_f64("model.wavenumber").unwrap_or(f64::NAN);
            let mut ok = true;
            let receiver = match receiver {
                Some(r) if r.len() == 2 && r.iter().all(|v| v.is_finite()) => [r[0], r[1]],
                Some(_) => {
                    e.bad("`model.receiver` must be two finite numbers `x, y`");
                    ok = false;
                    [0.0, 0.0]
                }
                None => {
                    e.bad("`model.receiver` is required for point-source");
                    ok = false;
                    [0.0, 0.0]
                }
            };
            if !(wavenumber > 0.0 && wavenumber.is_finite()) {
                e.bad("`model.wavenumber` must be a positive number (required for point-source)");
                ok = false;
            }
            ok.then_some(ModelConfig::PointSource { receiver, wavenumber })
        }
        "gaussian-mixture" => {
            let had_components = e.has("model.components");
            let rows = e.take_rows("model.components", 3);
            let mut ok = true;
            let components = match rows {
                Some(rows) => {
                    let mut comps = Vec::with_capacity(rows.len());
                    for r in &rows {
                        if !(r[0] > 0.0 && r[0].is_finite())
                            || !r[1].is_finite()
                            || !(r[2] > 0.0 && r[2].is_finite())
                        {
                            e.bad("`model.components` rows are `weight, mean, sd` with weight > 0 and sd > 0");
                            ok = false;
                            break;
                        }
                        comps.push(MixtureComponent { weight: r[0], mean: r[1], sd: r[2] });
                    }
                    comps
                }
                None => {
                    if !had_components {
                        e.bad("`model.components` is required for gaussian-mixture");
                    }
                    ok = false;
                    Vec::new()
                }
            };
            (ok && !components.is_empty()).then_some(ModelConfig::GaussianMixture { components })
        }
        other => {
            e.bad(format!(
                "`model.kind` must be one of stekloff | wave-medium | point-source | \
                 gaussian-mixture, got `{other}`"
            ));
            e.discard_prefix("model.");
            None
        }
    }
}

/// Parse and validate config text. Relative `data.path` entries resolve
/// against `base_dir`; path resolvability is checked here, at parse time.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig, ConfigError> {
    let mut e = Entries::scan(text);

    let model = parse_model(&mut e);

    // Prior box.
    let prior_lower = e.take_vec_f64("prior.lower");
    let prior_upper = e.take_vec_f64("prior.upper");
    if prior_lower.is_none() {
        e.bad("`prior.lower` is required");
    }
    if prior_upper.is_none() {
        e.bad("`prior.upper` is required");
    }
    let mut dim = None;
    if let (Some(lo), Some(hi)) = (&prior_lower, &prior_upper) {
        if lo.len() != hi.len() || lo.is_empty() {
            e.bad("`prior.lower` and `prior.upper` must have the same nonzero length");
        } else if lo.iter().zip(hi).any(|(a, b)| !a.is_finite() || !b.is_finite() || a >= b) {
            e.bad("`prior.lower` must be strictly below `prior.upper` on every axis");
        } else {
            dim = Some(lo.len());
        }
    }
    if let (Some(d), Some(m)) = (dim, &model) {
        if d != m.parameter_dim() {
            e.bad(format!(
                "prior box is {d}-dimensional but the model has {} parameter(s)",
                m.parameter_dim()
            ));
            dim = None;
        }
    }

    // Likelihood.
    let sigma = e.take_f64("likelihood.sigma");
    if let Some(s) = sigma {
        if !(s > 0.0 && s.is_finite()) {
            e.bad("`likelihood.sigma` must be positive");
        }
    }
    let exponent = match e.take_str("likelihood.exponent").as_deref() {
        None | Some("squared") => ResidualExponent::Squared,
        Some("absolute") => ResidualExponent::Absolute,
        Some(other) => {
            e.bad(format!("`likelihood.exponent` must be `squared` or `absolute`, got `{other}`"));
            ResidualExponent::Squared
        }
    };

    // Sampler.
    let k_present = e.has("sampler.K");
    let iterations = match e.take_usize("sampler.K") {
        Some(0) => {
            e.bad("`sampler.K` must be at least 1");
            0
        }
        Some(k) => k,
        None => {
            if !k_present {
                e.bad("`sampler.K` is required");
            }
            0
        }
    };
    let burn_in = e.take_usize("sampler.burn_in").unwrap_or(iterations / 10);
    if iterations > 0 && burn_in >= iterations {
        e.bad(format!("`sampler.K` ({iterations}) must exceed `sampler.burn_in` ({burn_in})"));
    }
    let seed = e.take_u64("sampler.seed").unwrap_or(0);
    let initial = e.take_vec_f64("sampler.initial");
    if let (Some(init), Some(d)) = (&initial, dim) {
        if init.len() != d {
            e.bad(format!(
                "`sampler.initial` has {} component(s) but the box is {d}-dimensional",
                init.len()
            ));
        } else if let (Some(lo), Some(hi)) = (&prior_lower, &prior_upper) {
            if init.iter().zip(lo.iter().zip(hi)).any(|(x, (a, b))| !(a <= x && x < b)) {
                e.bad("`sampler.initial` must lie inside the prior box");
            }
        }
    }

    // Estimators.
    let bins = e.take_vec_usize("estimators.bins");
    let bins = match (bins, dim) {
        (Some(b), Some(d)) => {
            if b.len() != d || b.contains(&0) {
                e.bad(format!(
                    "`estimators.bins` needs {d} positive value(s) for a {d}-dimensional box"
                ));
            }
            b
        }
        (Some(b), None) => b,
        (None, Some(2)) => vec![DEFAULT_BINS_2D; 2],
        (None, _) => vec![DEFAULT_BINS_1D],
    };
    let epsilon = e.take_f64("estimators.epsilon").unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        e.bad("`estimators.epsilon` must lie strictly between 0 and 1");
    }
    let min_separation =
        e.take_usize("estimators.min_separation").unwrap_or(DEFAULT_MIN_SEPARATION);
    if min_separation == 0 {
        e.bad("`estimators.min_separation` must be at least 1");
    }
    let regions = e.take_regions("estimators.regions").map(|raw| {
        let mut out = Vec::with_capacity(raw.len());
        for (i, (lo, hi)) in raw.into_iter().enumerate() {
            if let Some(d) = dim {
                if lo.len() != d {
                    e.bad(format!(
                        "`estimators.regions` region {i} has {} axis range(s), expected {d}",
                        lo.len()
                    ));
                    continue;
                }
            }
            if lo.iter().zip(&hi).any(|(a, b)| a.partial_cmp(b) != Some(std::cmp::Ordering::Less)) {
                e.bad(format!("`estimators.regions` region {i} needs lo < hi on every axis"));
                continue;
            }
            out.push(Region::new(lo, hi));
        }
        out
    });

    // Data: exactly one source.
    let inline = e.take_vec_f64("data.values");
    let path = e.take_str("data.path");
    let true_param = e.take_vec_f64("data.synthesize.true_param");
    let noise_kind = match e.take_str("data.synthesize.noise_kind").as_deref() {
        None | Some("gaussian-relative") => NoiseKind::GaussianRelative,
        Some("uniform-relative") => NoiseKind::UniformRelative,
        Some("gaussian-absolute") => NoiseKind::GaussianAbsolute,
        Some(other) => {
            e.bad(format!(
                "`data.synthesize.noise_kind` must be gaussian-relative | uniform-relative | \
                 gaussian-absolute, got `{other}`"
            ));
            NoiseKind::GaussianRelative
        }
    };
    let noise_level = e.take_f64("data.synthesize.noise_level").unwrap_or(0.0);
    if !(noise_level >= 0.0 && noise_level.is_finite()) {
        e.bad("`data.synthesize.noise_level` must be >= 0");
    }
    let data_seed = e.take_u64("data.synthesize.data_seed").unwrap_or(0);

    let sources = inline.is_some() as u8 + path.is_some() as u8 + true_param.is_some() as u8;
    let data = if sources != 1 {
        e.bad(format!(
            "exactly one data source required (`data.values`, `data.path`, or \
             `data.synthesize.true_param`); found {sources}"
        ));
        DataSource::Inline(Vec::new())
    } else if let Some(values) = inline {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            e.bad("`data.values` must be nonempty finite numbers");
        } else if let Some(m) = &model {
            if values.len() != m.observable_len() {
                e.bad(format!(
                    "`data.values` has {} value(s) but the model observes {}",
                    values.len(),
                    m.observable_len()
                ));
            }
        }
        DataSource::Inline(values)
    } else if let Some(p) = path {
        let resolved = base_dir.join(&p);
        if !resolved.is_file() {
            e.bad(format!("`data.path`: `{}` is not a readable file", resolved.display()));
        }
        DataSource::File(resolved)
    } else {
        let tp = true_param.unwrap();
        if let Some(m) = &model {
            if tp.len() != m.parameter_dim() {
                e.bad(format!(
                    "`data.synthesize.true_param` has {} component(s) but the model has {}",
                    tp.len(),
                    m.parameter_dim()
                ));
            }
        }
        if tp.iter().any(|v| !v.is_finite()) {
            e.bad("`data.synthesize.true_param` must be finite");
        }
        DataSource::Synthesize { true_param: tp, noise_kind, noise_level, data_seed }
    };

    let output_dir = e.take_str("output.dir").map(PathBuf::from);

    let violations = e.finish();
    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    Ok(ExperimentConfig {
        model: model.expect("validated"),
        prior_lower: prior_lower.expect("validated"),
        prior_upper: prior_upper.expect("validated"),
        sigma,
        exponent,
        iterations,
        burn_in,
        seed,
        initial,
        bins,
        epsilon,
        min_separation,
        regions,
        data,
        output_dir,
    })
}

/// Read and validate a config file; all violations are collected into the
/// error, including an unreadable file itself.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|err| ConfigError {
        violations: vec![format!("cannot read `{}`: {err}", path.display())],
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        parse_config(text, Path::new("."))
    }

    const MINIMAL: &str = "\
        model.kind = stekloff\n\
        model.wavenumber = 1\n\
        model.target = 0.62\n\
        prior.lower = 0\n\
        prior.upper = 6\n\
        sampler.K = 10000\n\
        data.values = 0.62\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse(MINIMAL).unwrap();
        assert_eq!(cfg.iterations, 10000);
        assert_eq!(cfg.burn_in, 1000); // K/10
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.bins, vec![60]);
        assert_eq!(cfg.epsilon, 0.2);
        assert_eq!(cfg.min_separation, 3);
        assert_eq!(cfg.exponent, ResidualExponent::Squared);
        assert_eq!(cfg.sigma, None);
        assert_eq!(cfg.initial, None);
        assert_eq!(cfg.regions, None);
        assert!(matches!(cfg.data, DataSource::Inline(ref v) if v == &[0.62]));
        assert!(matches!(cfg.model, ModelConfig::Stekloff { max_order: 25, .. }));
    }

    #[test]
    fn comments_blanks_and_spacing_are_tolerated() {
        let text = "# header\n\n  model.kind = stekloff  # trailing\n\
                    model.wavenumber=1\nmodel.target =0.62\n\
                    prior.lower = 0\nprior.upper = 6\n\
                    sampler.K = 100\ndata.values = 0.62\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn all_violations_are_collected() {
        let text = "model.kind = stekloff\n\
                    model.wavenumber = 1\n\
                    model.target = 0.62\n\
                    prior.lower = 6\n\
                    prior.upper = 0\n\
                    sampler.K = 100\n\
                    sampler.burn_in = 100\n\
                    data.values = 0.62\n\
                    nonsense.key = 1\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.violations.len(), 3, "{err}");
        assert!(err.violations.iter().any(|v| v.contains("prior.lower")));
        assert!(err.violations.iter().any(|v| v.contains("must exceed")));
        assert!(err.violations.iter().any(|v| v.contains("unknown key `nonsense.key`")));
    }

    #[test]
    fn exactly_one_data_source() {
        let text = format!("{MINIMAL}data.synthesize.true_param = 1.0\n");
        let err = parse(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("exactly one data source")), "{err}");
        let none = MINIMAL.replace("data.values = 0.62\n", "");
        let err = parse(&none).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("exactly one data source")));
    }

    #[test]
    fn unknown_model_kind_does_not_cascade() {
        let text = "model.kind = warp-drive\nmodel.wavenumber = 1\n\
                    prior.lower = 0\nprior.upper = 6\n\
                    sampler.K = 100\ndata.values = 1\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.violations.len(), 1, "{err}");
        assert!(err.violations[0].contains("model.kind"));
    }

    #[test]
    fn wave_preset_and_defaults() {
        let text = "model.kind = wave-medium\n\
                    model.source.preset = aliasing\n\
                    prior.lower = 0\nprior.upper = 3\n\
                    sampler.K = 5000\n\
                    data.synthesize.true_param = 1\n\
                    data.synthesize.noise_level = 0.05\n";
        let cfg = parse(text).unwrap();
        match &cfg.model {
            ModelConfig::WaveMedium { sensors, time, truncation, source } => {
                assert_eq!(sensors.len(), 10);
                assert_eq!(*time, 1.0);
                assert_eq!(*truncation, 16);
                assert_eq!(source, &SourceSpec::aliasing_preset());
            }
            other => panic!("wrong model {other:?}"),
        }
        match cfg.data {
            DataSource::Synthesize { noise_kind, noise_level, data_seed, .. } => {
                assert_eq!(noise_kind, NoiseKind::GaussianRelative);
                assert_eq!(noise_level, 0.05);
                assert_eq!(data_seed, 0);
            }
            other => panic!("wrong data {other:?}"),
        }
    }

    #[test]
    fn wave_explicit_modes_and_preset_conflict() {
        let ok = "model.kind = wave-medium\n\
                  model.source.modes = 0, 2, 1.5; 1, 1, -0.25\n\
                  prior.lower = 0\nprior.upper = 3\n\
                  sampler.K = 100\ndata.synthesize.true_param = 1\n";
        let cfg = parse(ok).unwrap();
        match &cfg.model {
            ModelConfig::WaveMedium { source, .. } => {
                assert_eq!(source.modes.len(), 2);
                assert_eq!(source.modes[0].m2, 2);
                assert_eq!(source.modes[1].amplitude, -0.25);
            }
            other => panic!("wrong model {other:?}"),
        }
        let both = format!("{ok}model.source.preset = aliasing\n");
        let err = parse(&both).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("not both")), "{err}");
    }

    #[test]
    fn point_source_two_dimensional() {
        let text = "model.kind = point-source\n\
                    model.receiver = 0, 3\n\
                    model.wavenumber = 1\n\
                    prior.lower = -2, -2\n\
                    prior.upper = 2, 2\n\
                    sampler.K = 1000\n\
                    sampler.initial = 0.5, -0.5\n\
                    estimators.regions = -2..0, -2..2; 0..2, -2..2\n\
                    data.synthesize.true_param = 2, 0\n";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.bins, vec![40, 40]);
        assert_eq!(cfg.initial, Some(vec![0.5, -0.5]));
        let regions = cfg.regions.unwrap();
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].lower, vec![-2.0, -2.0]);
        assert_eq!(regions[1].upper, vec![2.0, 2.0]);
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let text = "model.kind = point-source\n\
                    model.receiver = 0, 3\n\
                    model.wavenumber = 1\n\
                    prior.lower = 0\n\
                    prior.upper = 6\n\
                    sampler.K = 1000\n\
                    data.synthesize.true_param = 2, 0\n";
        let err = parse(text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("2 parameter(s)")), "{err}");
    }

    #[test]
    fn mixture_components_parse() {
        let text = "model.kind = gaussian-mixture\n\
                    model.components = 0.6, 1, 0.05; 0.4, 5, 0.05\n\
                    prior.lower = 0\nprior.upper = 6\n\
                    likelihood.sigma = 0.7071067811865476\n\
                    likelihood.exponent = absolute\n\
                    sampler.K = 1000\ndata.values = 0\n";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.exponent, ResidualExponent::Absolute);
        match &cfg.model {
            ModelConfig::GaussianMixture { components } => {
                assert_eq!(components.len(), 2);
                assert_eq!(components[1].mean, 5.0);
            }
            other => panic!("wrong model {other:?}"),
        }
        let bad = text.replace("0.4, 5, 0.05", "0.4, 5");
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn initial_outside_box_is_a_violation() {
        let text = format!("{MINIMAL}sampler.initial = 7\n");
        let err = parse(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("inside the prior box")));
    }

    #[test]
    fn data_values_length_must_match_observable() {
        let text = MINIMAL.replace("data.values = 0.62", "data.values = 0.62, 0.7");
        let err = parse(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("observes 1")), "{err}");
    }

    #[test]
    fn missing_data_path_is_caught_at_parse_time() {
        let text = MINIMAL.replace("data.values = 0.62", "data.path = no/such/file.txt");
        let err = parse(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("not a readable file")));
    }

    #[test]
    fn data_path_resolves_against_base_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("obs.txt"), "0.62\n").unwrap();
        let text = MINIMAL.replace("data.values = 0.62", "data.path = obs.txt");
        let cfg = parse_config(&text, dir.path()).unwrap();
        match cfg.data {
            DataSource::File(p) => assert_eq!(p, dir.path().join("obs.txt")),
            other => panic!("wrong data {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_malformed_lines() {
        let text = format!("{MINIMAL}sampler.K = 20\njust words\n");
        let err = parse(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("duplicate key `sampler.K`")));
        assert!(err.violations.iter().any(|v| v.contains("expected `key = value`")));
    }

    #[test]
    fn built_models_report_dimensions() {
        let cfg = parse(MINIMAL).unwrap();
        let model = cfg.model.build();
        assert_eq!(model.parameter_dim(), 1);
        assert_eq!(model.observable_len(), 1);
        assert_eq!(cfg.model.observable_len(), 1);
        assert_eq!(cfg.prior().dim(), 1);
    }
}

//! Command-line front end: configuration parsing with file/flag precedence,
//! experiment orchestration, and deterministic CSV/JSON emission.
//!
//! Every run produces a [`ResultEnvelope`] echoing the fully resolved
//! configuration; identical configurations yield byte-identical payloads
//! regardless of the parallelism degree.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::correlations::{
    self, default_thermal_pair, Dispersion, EnergyRegulator, WeightFn,
};
use crate::error::{Error, Result};
use crate::medium;
use crate::packets::{compute_moments, covering_grid, sample_packet, PacketSpec};
use crate::scattering1d::{
    self, barrier_amplitudes, step_amplitudes, BarrierPotential, KGrid, PotentialKind,
    StepPotential,
};
use crate::transforms::{self, InterfaceSpec, WidthState};
use crate::units::UnitSystem;

/// Environment variable holding the default config-file path.
pub const CONFIG_ENV: &str = "WAVEPACKET_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone)]
pub struct CommonOpts {
    /// Unit system: natural (hbar = c = kB = 1) or si.
    #[arg(long, global = true)]
    pub units: Option<UnitSystemArg>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// Worker threads for sweeps; results are ordered by index and
    /// byte-identical for any value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat key = value config file with one [section] per subcommand;
    /// command-line flags win over file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitSystemArg {
    Natural,
    Si,
}

impl From<UnitSystemArg> for UnitSystem {
    fn from(u: UnitSystemArg) -> Self {
        match u {
            UnitSystemArg::Natural => UnitSystem::Natural,
            UnitSystemArg::Si => UnitSystem::Si,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wavepacket", version, about = "Wave packets of finite coherence: packets, 1D scattering, width transformations, and momentum correlations")]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments of a (possibly Hermite-modulated) Gaussian packet.
    Packet(PacketArgs),
    /// Step amplitudes at one incident wavenumber.
    Step(StepArgs),
    /// Barrier amplitudes at one energy.
    Barrier(BarrierArgs),
    /// Step-depth sweep of branch uncertainty products.
    SweepCliff(SweepCliffArgs),
    /// Barrier-width sweep of branch uncertainty products.
    SweepWell(SweepWellArgs),
    /// Mean free paths and the coherence parameters they induce.
    Mfp(MfpArgs),
    /// Width-state transformations (boost, potential, scale, interface).
    Transform(TransformArgs),
    /// Momentum correlation curves (decay, collision, thermal).
    Correlate(CorrelateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Packet(_) => "packet",
            Command::Step(_) => "step",
            Command::Barrier(_) => "barrier",
            Command::SweepCliff(_) => "sweep-cliff",
            Command::SweepWell(_) => "sweep-well",
            Command::Mfp(_) => "mfp",
            Command::Transform(_) => "transform",
            Command::Correlate(_) => "correlate",
        }
    }
}

#[derive(Debug, Args)]
pub struct PacketArgs {
    /// Spatial width parameter gamma.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Central momentum.
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    /// Center position.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    /// Hermite modulation order (0 = minimum packet).
    #[arg(long, allow_negative_numbers = true)]
    pub m_order: Option<u32>,
    /// Particle mass.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Evaluation time.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StepArgs {
    /// Incident wavenumber.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Potential offset of the incident region.
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Particle mass.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BarrierArgs {
    /// Total energy of the incident wave.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Well depth (positive digs a well, negative raises a barrier).
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Barrier width.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Particle mass.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepCliffArgs {
    /// Smallest depth ratio v0/E0.
    #[arg(long, allow_negative_numbers = true)]
    pub ratio_min: Option<f64>,
    /// Largest depth ratio v0/E0.
    #[arg(long, allow_negative_numbers = true)]
    pub ratio_max: Option<f64>,
    /// Number of sweep points (log-spaced).
    #[arg(long, allow_negative_numbers = true)]
    pub points: Option<usize>,
    /// Central wavenumber of the packet grid.
    #[arg(long, allow_negative_numbers = true)]
    pub k0: Option<f64>,
    /// Momentum width of the packet grid.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_k: Option<f64>,
    /// Momentum quadrature points.
    #[arg(long, allow_negative_numbers = true)]
    pub n_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepWellArgs {
    /// Well depth in units of the packet's central energy E0.
    #[arg(long, allow_negative_numbers = true)]
    pub v0_factor: Option<f64>,
    /// Largest width in units of the incident packet size dx1.
    #[arg(long, allow_negative_numbers = true)]
    pub a_max_dx1: Option<f64>,
    /// Number of sweep points (linear).
    #[arg(long, allow_negative_numbers = true)]
    pub points: Option<usize>,
    /// Physical incident packet size dx1 in meters, used to label widths.
    #[arg(long, allow_negative_numbers = true)]
    pub dx1_m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub n_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MfpArgs {
    /// Temperature in kelvin.
    #[arg(long = "T", visible_alias = "temperature", allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    /// Coulomb logarithm for the Rutherford cross section.
    #[arg(long, allow_negative_numbers = true)]
    pub log_lambda: Option<f64>,
    /// Charged-particle density in 1/m^3.
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<f64>,
    /// Photon density in 1/m^3 (defaults to 1e9 n).
    #[arg(long, allow_negative_numbers = true)]
    pub n_gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// One of: boost, potential, potential-rel, scale, electron-metal,
    /// light, light-absorbing.
    #[arg(long, allow_negative_numbers = true)]
    pub op: Option<String>,
    /// Central longitudinal momentum.
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    /// Longitudinal momentum width.
    #[arg(long, allow_negative_numbers = true)]
    pub dp_l: Option<f64>,
    /// Transverse momentum width.
    #[arg(long, allow_negative_numbers = true)]
    pub dp_t: Option<f64>,
    /// Particle mass (0 for light).
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Boost velocity in units of c.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Potential offset for the potential ops.
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Scale factor for the massless scale transformation.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Work function (electron-metal).
    #[arg(long, allow_negative_numbers = true)]
    pub e0: Option<f64>,
    /// Band effective mass (electron-metal).
    #[arg(long, allow_negative_numbers = true)]
    pub m_eff: Option<f64>,
    /// Relative permeability (light cases).
    #[arg(long, allow_negative_numbers = true)]
    pub mu_r: Option<f64>,
    /// Relative dielectric constant (light cases).
    #[arg(long, allow_negative_numbers = true)]
    pub eps_r: Option<f64>,
    /// Resistivity in ohm-m (light-absorbing).
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// One of: decay2, decay3, collision, thermal.
    #[arg(long, allow_negative_numbers = true)]
    pub mode: Option<String>,
    /// Source momentum width (decay/collision modes).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Second source width (collision mode).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_b: Option<f64>,
    /// Energy regulator width for decay2; 0 disables it.
    #[arg(long, allow_negative_numbers = true)]
    pub eps_e: Option<f64>,
    /// Temperature in kelvin (thermal mode).
    #[arg(long = "T", visible_alias = "temperature", allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    /// Largest sampled |delta| (units: sigma for decays, k_B T thermal).
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    /// Number of curve samples.
    #[arg(long, allow_negative_numbers = true)]
    pub points: Option<usize>,
    /// Radial cutoff of the thermal kernel in k_B T.
    #[arg(long, allow_negative_numbers = true)]
    pub cutoff: Option<f64>,
}

/// Fully resolved run configuration: defaults materialized, file and flag
/// values merged, everything validated.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub units: UnitSystem,
    pub format: OutputFormat,
    pub threads: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Resolved numeric/string parameters, in deterministic key order.
    pub params: BTreeMap<String, Value>,
}

/// Envelope around every result payload.
#[derive(Debug, serde::Serialize)]
pub struct ResultEnvelope {
    pub version: String,
    pub units: String,
    pub config: RunConfig,
    pub data: DataPayload,
    pub diagnostics: BTreeMap<String, Value>,
}

#[derive(Debug, serde::Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataPayload {
    Record { fields: Vec<(String, Value)> },
    Table { columns: Vec<String>, rows: Vec<Vec<Value>> },
}

/// 12-significant-digit, locale-free float rendering for CSV.
pub fn fmt_sig(v: &Value) -> String {
    match v {
        Value::Number(n) => {
            let x = n.as_f64().unwrap();
            if x == 0.0 {
                "0".into()
            } else {
                format!("{x:.11e}")
            }
        }
        Value::String(s) => s.clone(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

impl ResultEnvelope {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.data {
            DataPayload::Record { fields } => {
                let header: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
                out.push_str(&header.join(","));
                out.push('\n');
                let row: Vec<String> = fields.iter().map(|(_, v)| fmt_sig(v)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            DataPayload::Table { columns, rows } => {
                out.push_str(&columns.join(","));
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(fmt_sig).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        match self.config.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Section-scoped `key = value` config file with `#` comments.
fn parse_config_file(path: &PathBuf) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::invalid("config", format!("cannot read {}: {e}", path.display()))
    })?;
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            current = line[1..line.len() - 1].trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::invalid(
                "config",
                format!("{}:{}: expected `key = value`, got `{raw}`", path.display(), lineno + 1),
            ));
        };
        sections
            .entry(current.clone())
            .or_default()
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(sections)
}

/// One subcommand's merged parameter source: file section overlaid by flags.
struct ParamSource {
    file: BTreeMap<String, String>,
    used: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl ParamSource {
    fn get<T: std::str::FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        self.used.borrow_mut().insert(key.to_string());
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(raw) => raw.parse::<T>().map_err(|_| {
                Error::invalid("config", format!("key `{key}`: cannot parse `{raw}`"))
            }),
            None => Ok(default),
        }
    }

    fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for key in self.file.keys() {
            if !used.contains(key) {
                return Err(Error::invalid("config", format!("unknown key `{key}`")));
            }
        }
        Ok(())
    }
}

fn require_positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

fn insert_num(params: &mut BTreeMap<String, Value>, key: &str, v: f64) {
    params.insert(key.into(), json!(v));
}

/// Parse argv (flags win) plus the optional config file into a validated
/// [`RunConfig`]. The `WAVEPACKET_CONFIG` environment variable supplies a
/// default config path.
pub fn parse_config(args: CliArgs) -> Result<RunConfig> {
    let config_path = args.common.config.clone().or_else(|| {
        std::env::var_os(CONFIG_ENV).map(PathBuf::from).filter(|p| p.exists())
    });
    let mut sections = match &config_path {
        Some(p) => parse_config_file(p)?,
        None => BTreeMap::new(),
    };
    let name = args.command.name().to_string();
    let top = sections.remove("").unwrap_or_default();
    let mut file = sections.remove(&name).unwrap_or_default();
    for (k, v) in top {
        file.entry(k).or_insert(v);
    }
    // remaining sections belong to other subcommands; ignore them
    let src = ParamSource { file, used: Default::default() };

    let units: UnitSystem = {
        src.used.borrow_mut().insert("units".into());
        match args.common.units {
            Some(u) => u.into(),
            None => match src.file.get("units") {
                Some(raw) => raw.parse().map_err(|e| Error::invalid("units", e))?,
                None => UnitSystem::Natural,
            },
        }
    };
    let format = {
        src.used.borrow_mut().insert("format".into());
        match args.common.format {
            Some(f) => f,
            None => match src.file.get("format").map(String::as_str) {
                Some("csv") => OutputFormat::Csv,
                Some("json") => OutputFormat::Json,
                Some(other) => {
                    return Err(Error::invalid("format", format!("unknown format `{other}`")))
                }
                None => OutputFormat::Csv,
            },
        }
    };
    let threads = src.get("threads", args.common.threads, 0usize)?;

    let mut params = BTreeMap::new();
    let hbar = units.hbar();
    match &args.command {
        Command::Packet(a) => {
            let gamma = require_positive("gamma", src.get("gamma", a.gamma, 1.0)?)?;
            let p0 = src.get("p0", a.p0, 0.0)?;
            let x0 = src.get("x0", a.x0, 0.0)?;
            let m_order = src.get("m_order", a.m_order, 0u32)?;
            let mass = require_positive("mass", src.get("mass", a.mass, default_mass(units))?)?;
            let t = src.get("t", a.t, 0.0)?;
            if m_order > 8 {
                return Err(Error::invalid("m_order", "must be <= 8"));
            }
            insert_num(&mut params, "gamma", gamma);
            insert_num(&mut params, "p0", p0);
            insert_num(&mut params, "x0", x0);
            params.insert("m_order".into(), json!(m_order));
            insert_num(&mut params, "mass", mass);
            insert_num(&mut params, "t", t);
            insert_num(&mut params, "hbar", hbar);
        }
        Command::Step(a) => {
            let k = require_positive("k", src.get("k", a.k, 1.0)?)?;
            let v0 = src.get("v0", a.v0, 0.0)?;
            let mass = require_positive("mass", src.get("mass", a.mass, default_mass(units))?)?;
            insert_num(&mut params, "k", k);
            insert_num(&mut params, "v0", v0);
            insert_num(&mut params, "mass", mass);
            insert_num(&mut params, "hbar", hbar);
        }
        Command::Barrier(a) => {
            let energy = require_positive("energy", src.get("energy", a.energy, 1.0)?)?;
            let v0 = src.get("v0", a.v0, 1.0)?;
            let width = src.get("a", a.a, 1.0)?;
            let mass = require_positive("mass", src.get("mass", a.mass, default_mass(units))?)?;
            if width < 0.0 {
                return Err(Error::invalid("a", "width must be >= 0"));
            }
            insert_num(&mut params, "energy", energy);
            insert_num(&mut params, "v0", v0);
            insert_num(&mut params, "a", width);
            insert_num(&mut params, "mass", mass);
            insert_num(&mut params, "hbar", hbar);
        }
        Command::SweepCliff(a) => {
            let ratio_min = require_positive("ratio_min", src.get("ratio_min", a.ratio_min, 0.02)?)?;
            let ratio_max = require_positive("ratio_max", src.get("ratio_max", a.ratio_max, 50.0)?)?;
            let points = src.get("points", a.points, 40usize)?;
            let k0 = require_positive("k0", src.get("k0", a.k0, 10.0)?)?;
            let sigma_k = require_positive("sigma_k", src.get("sigma_k", a.sigma_k, 1.0)?)?;
            let n_k = src.get("n_k", a.n_k, 768usize)?;
            if ratio_max <= ratio_min {
                return Err(Error::invalid("ratio_max", "must exceed ratio_min"));
            }
            if points < 2 {
                return Err(Error::invalid("points", "need at least 2"));
            }
            insert_num(&mut params, "ratio_min", ratio_min);
            insert_num(&mut params, "ratio_max", ratio_max);
            params.insert("points".into(), json!(points));
            insert_num(&mut params, "k0", k0);
            insert_num(&mut params, "sigma_k", sigma_k);
            params.insert("n_k".into(), json!(n_k));
        }
        Command::SweepWell(a) => {
            let v0_factor = src.get("v0_factor", a.v0_factor, 1.0)?;
            let a_max = require_positive("a_max_dx1", src.get("a_max_dx1", a.a_max_dx1, 1.5)?)?;
            let points = src.get("points", a.points, 40usize)?;
            let dx1_m = require_positive("dx1_m", src.get("dx1_m", a.dx1_m, 8.0e-10)?)?;
            let k0 = require_positive("k0", src.get("k0", a.k0, 10.0)?)?;
            let sigma_k = require_positive("sigma_k", src.get("sigma_k", a.sigma_k, 1.0)?)?;
            let n_k = src.get("n_k", a.n_k, 768usize)?;
            if points < 2 {
                return Err(Error::invalid("points", "need at least 2"));
            }
            insert_num(&mut params, "v0_factor", v0_factor);
            insert_num(&mut params, "a_max_dx1", a_max);
            params.insert("points".into(), json!(points));
            insert_num(&mut params, "dx1_m", dx1_m);
            insert_num(&mut params, "k0", k0);
            insert_num(&mut params, "sigma_k", sigma_k);
            params.insert("n_k".into(), json!(n_k));
        }
        Command::Mfp(a) => {
            let t = require_positive("T", src.get("T", a.temperature, 3000.0)?)?;
            let log_lambda = src.get("log_lambda", a.log_lambda, 10.0)?;
            let n = require_positive("n", src.get("n", a.n, 4.0e17)?)?;
            let n_gamma = require_positive("n_gamma", src.get("n_gamma", a.n_gamma, 1.0e9 * n)?)?;
            if log_lambda < 0.0 {
                return Err(Error::invalid("log_lambda", "must be >= 0"));
            }
            insert_num(&mut params, "T", t);
            insert_num(&mut params, "log_lambda", log_lambda);
            insert_num(&mut params, "n", n);
            insert_num(&mut params, "n_gamma", n_gamma);
        }
        Command::Transform(a) => {
            let op = {
                src.used.borrow_mut().insert("op".into());
                match &a.op {
                    Some(o) => o.clone(),
                    None => src.file.get("op").cloned().unwrap_or_else(|| "boost".into()),
                }
            };
            let known = [
                "boost",
                "potential",
                "potential-rel",
                "scale",
                "electron-metal",
                "light",
                "light-absorbing",
            ];
            if !known.contains(&op.as_str()) {
                return Err(Error::invalid("op", format!("unknown op `{op}`")));
            }
            let p0 = src.get("p0", a.p0, 1.0)?;
            let dp_l = require_positive("dp_l", src.get("dp_l", a.dp_l, 0.1)?)?;
            let dp_t = require_positive("dp_t", src.get("dp_t", a.dp_t, 0.1)?)?;
            let is_light = op.starts_with("light") || op == "scale";
            let mass_default = if is_light { 0.0 } else { default_mass(units) };
            let mass = src.get("mass", a.mass, mass_default)?;
            if mass < 0.0 {
                return Err(Error::invalid("mass", "must be >= 0"));
            }
            params.insert("op".into(), json!(op));
            insert_num(&mut params, "p0", p0);
            insert_num(&mut params, "dp_l", dp_l);
            insert_num(&mut params, "dp_t", dp_t);
            insert_num(&mut params, "mass", mass);
            insert_num(&mut params, "beta", src.get("beta", a.beta, 0.0)?);
            insert_num(&mut params, "v0", src.get("v0", a.v0, 0.0)?);
            insert_num(&mut params, "lambda", src.get("lambda", a.lambda, 1.0)?);
            insert_num(&mut params, "e0", src.get("e0", a.e0, 0.0)?);
            insert_num(&mut params, "m_eff", src.get("m_eff", a.m_eff, default_mass(units))?);
            insert_num(&mut params, "mu_r", src.get("mu_r", a.mu_r, 1.0)?);
            insert_num(&mut params, "eps_r", src.get("eps_r", a.eps_r, 1.0)?);
            insert_num(&mut params, "rho", src.get("rho", a.rho, 1.0)?);
        }
        Command::Correlate(a) => {
            let mode = {
                src.used.borrow_mut().insert("mode".into());
                match &a.mode {
                    Some(m) => m.clone(),
                    None => src.file.get("mode").cloned().unwrap_or_else(|| "thermal".into()),
                }
            };
            if !["decay2", "decay3", "collision", "thermal"].contains(&mode.as_str()) {
                return Err(Error::invalid("mode", format!("unknown mode `{mode}`")));
            }
            let sigma = require_positive("sigma", src.get("sigma", a.sigma, 1.0)?)?;
            let sigma_b = require_positive("sigma_b", src.get("sigma_b", a.sigma_b, sigma)?)?;
            let eps_e = src.get("eps_e", a.eps_e, 0.01 * sigma)?;
            let temperature = require_positive("T", src.get("T", a.temperature, 3500.0)?)?;
            let delta_max =
                require_positive("delta_max", src.get("delta_max", a.delta_max, default_delta_max(&mode))?)?;
            let points = src.get("points", a.points, 33usize)?;
            let cutoff = require_positive("cutoff", src.get("cutoff", a.cutoff, 20.0)?)?;
            if eps_e < 0.0 {
                return Err(Error::invalid("eps_e", "must be >= 0 (0 disables)"));
            }
            if points < 4 {
                return Err(Error::invalid("points", "need at least 4"));
            }
            params.insert("mode".into(), json!(mode));
            insert_num(&mut params, "sigma", sigma);
            insert_num(&mut params, "sigma_b", sigma_b);
            insert_num(&mut params, "eps_e", eps_e);
            insert_num(&mut params, "T", temperature);
            insert_num(&mut params, "delta_max", delta_max);
            params.insert("points".into(), json!(points));
            insert_num(&mut params, "cutoff", cutoff);
        }
    }
    src.finish()?;

    Ok(RunConfig {
        subcommand: name,
        units,
        format,
        threads,
        out: args.common.out.clone(),
        params,
    })
}

fn default_mass(units: UnitSystem) -> f64 {
    match units {
        UnitSystem::Natural => 1.0,
        UnitSystem::Si => crate::units::M_ELECTRON_SI,
    }
}

fn default_delta_max(mode: &str) -> f64 {
    match mode {
        "thermal" => 8.0,
        _ => 5.0,
    }
}

fn p(config: &RunConfig, key: &str) -> f64 {
    config.params[key].as_f64().unwrap()
}

fn p_usize(config: &RunConfig, key: &str) -> usize {
    config.params[key].as_u64().unwrap() as usize
}

fn p_str<'a>(config: &'a RunConfig, key: &str) -> &'a str {
    config.params[key].as_str().unwrap()
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Execute a resolved configuration. Sweep points run on a dedicated
/// thread pool of `config.threads` workers (0 = rayon default); outputs are
/// index-ordered, so the payload does not depend on the degree.
pub fn run(config: &RunConfig) -> Result<ResultEnvelope> {
    let compute = || dispatch(config);
    let (data, diagnostics) = if config.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
        pool.install(compute)?
    } else {
        compute()?
    };
    Ok(ResultEnvelope {
        version: env!("CARGO_PKG_VERSION").to_string(),
        units: config.units.to_string(),
        config: config.clone(),
        data,
        diagnostics,
    })
}

type Dispatched = (DataPayload, BTreeMap<String, Value>);

fn dispatch(config: &RunConfig) -> Result<Dispatched> {
    match config.subcommand.as_str() {
        "packet" => run_packet(config),
        "step" => run_step(config),
        "barrier" => run_barrier(config),
        "sweep-cliff" => run_sweep_cliff(config),
        "sweep-well" => run_sweep_well(config),
        "mfp" => run_mfp(config),
        "transform" => run_transform(config),
        "correlate" => run_correlate(config),
        other => Err(Error::invalid("subcommand", format!("unknown `{other}`"))),
    }
}

fn run_packet(config: &RunConfig) -> Result<Dispatched> {
    let spec = PacketSpec {
        x0: p(config, "x0"),
        p0: p(config, "p0"),
        gamma: p(config, "gamma"),
        m_order: p_usize(config, "m_order") as u32,
        mass: p(config, "mass"),
        hbar: p(config, "hbar"),
    };
    let t = p(config, "t");
    let (lo, hi, n) = covering_grid(&spec, t, 9.0, 4096);
    let wave = sample_packet(&spec, lo, hi, n, t)?;
    let rep = compute_moments(&wave, None, spec.hbar)?;

    // grid-refinement diagnostic: same moments at half resolution
    let coarse = sample_packet(&spec, lo, hi, n / 2, t)?;
    let rep2 = compute_moments(&coarse, None, spec.hbar)?;
    let refine = ((rep.product - rep2.product) / rep.product).abs();

    let fields = vec![
        ("mean_x".to_string(), num(rep.mean_x)),
        ("mean_p".to_string(), num(rep.mean_p)),
        ("delta_x".to_string(), num(rep.delta_x)),
        ("delta_p".to_string(), num(rep.delta_p)),
        ("product".to_string(), num(rep.product)),
        ("product_over_half_hbar".to_string(), num(rep.product / (0.5 * spec.hbar))),
        ("norm".to_string(), num(rep.norm)),
    ];
    let mut diag = BTreeMap::new();
    diag.insert("grid_points".into(), json!(n + 1));
    diag.insert("grid_refinement_delta".into(), num(refine));
    Ok((DataPayload::Record { fields }, diag))
}

fn run_step(config: &RunConfig) -> Result<Dispatched> {
    let pot = StepPotential { v0: p(config, "v0") };
    let sol = step_amplitudes(p(config, "k"), &pot, p(config, "mass"), p(config, "hbar"))?;
    let fields = vec![
        ("k".to_string(), num(sol.k)),
        ("k_prime_re".to_string(), num(sol.k_prime.re)),
        ("k_prime_im".to_string(), num(sol.k_prime.im)),
        ("b_minus_re".to_string(), num(sol.b_minus.re)),
        ("b_minus_im".to_string(), num(sol.b_minus.im)),
        ("c_plus_re".to_string(), num(sol.c_plus.re)),
        ("c_plus_im".to_string(), num(sol.c_plus.im)),
        ("reflectance".to_string(), num(sol.b_minus.norm_sqr())),
        ("flux_defect".to_string(), num(sol.flux_defect(&PotentialKind::Step(pot)))),
        ("boundary_residual".to_string(), num(sol.boundary_residual)),
    ];
    Ok((DataPayload::Record { fields }, BTreeMap::new()))
}

fn run_barrier(config: &RunConfig) -> Result<Dispatched> {
    let pot = BarrierPotential { v0: p(config, "v0"), a: p(config, "a") };
    let sol = barrier_amplitudes(p(config, "energy"), &pot, p(config, "mass"), p(config, "hbar"))?;
    let fields = vec![
        ("k".to_string(), num(sol.k)),
        ("k_prime_re".to_string(), num(sol.k_prime.re)),
        ("k_prime_im".to_string(), num(sol.k_prime.im)),
        ("b_minus_re".to_string(), num(sol.b_minus.re)),
        ("b_minus_im".to_string(), num(sol.b_minus.im)),
        ("a_plus_re".to_string(), num(sol.a_plus.re)),
        ("a_plus_im".to_string(), num(sol.a_plus.im)),
        ("a_minus_re".to_string(), num(sol.a_minus.re)),
        ("a_minus_im".to_string(), num(sol.a_minus.im)),
        ("c_plus_re".to_string(), num(sol.c_plus.re)),
        ("c_plus_im".to_string(), num(sol.c_plus.im)),
        ("transmittance".to_string(), num(sol.c_plus.norm_sqr())),
        ("flux_defect".to_string(), num(sol.flux_defect(&PotentialKind::Barrier(pot)))),
        ("boundary_residual".to_string(), num(sol.boundary_residual)),
    ];
    Ok((DataPayload::Record { fields }, BTreeMap::new()))
}

fn cliff_grid(config: &RunConfig) -> KGrid {
    KGrid {
        k0: p(config, "k0"),
        sigma_k: p(config, "sigma_k"),
        n_points: p_usize(config, "n_k"),
        cutoff_sigmas: 6.0,
    }
}

fn run_sweep_cliff(config: &RunConfig) -> Result<Dispatched> {
    let grid = cliff_grid(config);
    let (lo, hi) = (p(config, "ratio_min"), p(config, "ratio_max"));
    let n = p_usize(config, "points");
    let ratios: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let mass = default_mass(config.units);
    let rows = scattering1d::sweep_step_depth(&grid, &ratios, mass, config.units.hbar())?;
    let table = DataPayload::Table {
        columns: vec![
            "v0_over_e0".into(),
            "product_reflected".into(),
            "product_transmitted".into(),
        ],
        rows: rows
            .iter()
            .map(|r| vec![num(r.v0_over_e0), num(r.product_reflected), num(r.product_transmitted)])
            .collect(),
    };
    let mut diag = BTreeMap::new();
    diag.insert("e0".into(), num(config.units.hbar().powi(2) * grid.k0 * grid.k0 / (2.0 * mass)));
    diag.insert("gamma".into(), num(grid.gamma()));
    Ok((table, diag))
}

fn run_sweep_well(config: &RunConfig) -> Result<Dispatched> {
    let grid = cliff_grid(config);
    let mass = default_mass(config.units);
    let hbar = config.units.hbar();
    let e0 = hbar * hbar * grid.k0 * grid.k0 / (2.0 * mass);
    let v0 = p(config, "v0_factor") * e0;
    let dx1 = grid.gamma() / std::f64::consts::SQRT_2;
    let n = p_usize(config, "points");
    let a_list: Vec<f64> = (0..n)
        .map(|i| p(config, "a_max_dx1") * dx1 * i as f64 / (n - 1) as f64)
        .collect();
    let rows = scattering1d::sweep_barrier_width(&grid, v0, &a_list, mass, hbar)?;
    let dx1_m = p(config, "dx1_m");
    let table = DataPayload::Table {
        columns: vec!["a_m".into(), "product_reflected".into(), "product_transmitted".into()],
        rows: rows
            .iter()
            .map(|r| vec![num(r.a / dx1 * dx1_m), num(r.product_reflected), num(r.product_transmitted)])
            .collect(),
    };
    let mut diag = BTreeMap::new();
    diag.insert("e0".into(), num(e0));
    diag.insert("v0".into(), num(v0));
    diag.insert("dx1_grid_units".into(), num(dx1));
    Ok((table, diag))
}

fn run_mfp(config: &RunConfig) -> Result<Dispatched> {
    let spec = medium::MediumSpec {
        n_e: p(config, "n"),
        n_p: p(config, "n"),
        n_gamma: p(config, "n_gamma"),
        temperature: p(config, "T"),
        coulomb_log: p(config, "log_lambda"),
    };
    spec.validate()?;
    let t = spec.temperature;
    let n = spec.n_p;
    let n_gamma = spec.n_gamma;
    let sigma_ru = medium::sigma_rutherford(t, spec.coulomb_log)?;
    let sigma_th = medium::sigma_thomson();
    let l_ru = medium::mean_free_path(sigma_ru, n)?;
    let l_th = medium::mean_free_path(sigma_th, n_gamma)?;
    let v = medium::thermal_speed(t, crate::units::M_ELECTRON_SI);
    let hbar = crate::units::HBAR_SI;
    let ru = medium::coherence_from_path(l_ru, v, hbar)?;
    let th = medium::coherence_from_path(l_th, v, hbar)?;

    let row = |name: &str, sigma: f64, dens: f64, rep: &medium::CoherenceReport| {
        vec![
            Value::String(name.into()),
            num(sigma),
            num(dens),
            num(rep.l),
            num(rep.gamma_packet),
            num(rep.delta_p),
            num(rep.delta_e),
            num(rep.tau),
        ]
    };
    let table = DataPayload::Table {
        columns: vec![
            "process".into(),
            "sigma_m2".into(),
            "n_m3".into(),
            "l_m".into(),
            "gamma_packet_m".into(),
            "delta_p_kgms".into(),
            "delta_e_j".into(),
            "tau_s".into(),
        ],
        rows: vec![
            row("rutherford", sigma_ru, n, &ru),
            row("thomson", sigma_th, n_gamma, &th),
        ],
    };
    let mut diag = BTreeMap::new();
    diag.insert("n_t_collision_ratio".into(), num(medium::collision_ratio(l_th, l_ru)?));
    diag.insert("thermal_speed_ms".into(), num(v));
    Ok((table, diag))
}

fn run_transform(config: &RunConfig) -> Result<Dispatched> {
    let c = config.units.c();
    let hbar = config.units.hbar();
    let state = WidthState::on_shell(
        p(config, "p0"),
        p(config, "dp_l"),
        p(config, "dp_t"),
        p(config, "mass"),
        c,
        hbar,
    );
    let op = p_str(config, "op");
    let (out, extra) = match op {
        "boost" => (transforms::lorentz_boost(&state, p(config, "beta"), c, hbar)?, None),
        "potential" => (transforms::add_potential_nonrel(&state, p(config, "v0"), c)?, None),
        "potential-rel" => (transforms::add_potential_rel(&state, p(config, "v0"), c)?, None),
        "scale" => (transforms::scale_transform(&state, p(config, "lambda"), c)?, None),
        "electron-metal" => {
            let spec = InterfaceSpec::ElectronMetal {
                e0: p(config, "e0"),
                m_eff: p(config, "m_eff"),
                m0: p(config, "mass"),
            };
            let (s, r) = transforms::cross_interface(&state, &spec, c, hbar, config.units.eps0())?;
            (s, r)
        }
        "light" => {
            let spec = InterfaceSpec::LightDielectric {
                mu_r: p(config, "mu_r"),
                eps_r: p(config, "eps_r"),
            };
            let (s, r) = transforms::cross_interface(&state, &spec, c, hbar, config.units.eps0())?;
            (s, r)
        }
        "light-absorbing" => {
            let spec = InterfaceSpec::LightAbsorbing {
                mu_r: p(config, "mu_r"),
                eps_r: p(config, "eps_r"),
                rho: p(config, "rho"),
            };
            let (s, r) = transforms::cross_interface(&state, &spec, c, hbar, config.units.eps0())?;
            (s, r)
        }
        other => return Err(Error::invalid("op", format!("unknown op `{other}`"))),
    };

    let mut fields = vec![
        ("p0_l".to_string(), num(out.p0_l)),
        ("delta_p_l".to_string(), num(out.delta_p_l)),
        ("delta_p_t".to_string(), num(out.delta_p_t)),
        ("delta_x_l".to_string(), num(out.delta_x_l)),
        ("delta_x_t".to_string(), num(out.delta_x_t)),
        ("mass".to_string(), num(out.mass)),
        ("energy".to_string(), num(out.energy)),
        (
            "product_l".to_string(),
            num(out.delta_x_l * out.delta_p_l),
        ),
    ];
    if let Some(report) = extra {
        fields.push(("lifetime_s".to_string(), num(report.lifetime)));
        fields.push(("energy_width".to_string(), num(report.energy_width)));
    }
    Ok((DataPayload::Record { fields }, BTreeMap::new()))
}

fn run_correlate(config: &RunConfig) -> Result<Dispatched> {
    use rayon::prelude::*;

    let mode = p_str(config, "mode");
    let n = p_usize(config, "points");
    let delta_max = p(config, "delta_max");
    let deltas: Vec<f64> = (0..n).map(|i| delta_max * i as f64 / (n - 1) as f64).collect();

    let curve = match mode {
        "thermal" => {
            let (ph, el) = default_thermal_pair(p(config, "T"));
            correlations::photon_correlation_curve(
                &ph,
                &el,
                [0.0; 3],
                &deltas,
                p(config, "cutoff"),
            )?
        }
        _ => {
            let sigma = p(config, "sigma");
            let weight = WeightFn::isotropic(3, sigma)?;
            let values: Vec<f64> = match mode {
                "decay2" => {
                    let eps = p(config, "eps_e");
                    let reg = if eps == 0.0 {
                        EnergyRegulator::Off
                    } else {
                        EnergyRegulator::Width(eps)
                    };
                    deltas
                        .par_iter()
                        .map(|&d| {
                            correlations::decay_correlation_2body(
                                &weight,
                                [0.0, 0.0, d],
                                reg,
                                Dispersion::Massless,
                            )
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                "decay3" => deltas
                    .par_iter()
                    .map(|&d| correlations::decay_correlation_3body(&weight, [0.0, 0.0, d]))
                    .collect(),
                "collision" => {
                    let weight_b = WeightFn::isotropic(3, p(config, "sigma_b"))?;
                    deltas
                        .par_iter()
                        .map(|&d| {
                            correlations::collision_correlation(&weight, &weight_b, [0.0, 0.0, d])
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                other => return Err(Error::invalid("mode", format!("unknown mode `{other}`"))),
            };
            let peak = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(peak > 0.0) {
                return Err(Error::Numerical("correlation vanished on all samples".into()));
            }
            let c_values: Vec<f64> = values.iter().map(|v| v / peak).collect();
            correlations::fit_gaussian_curve(deltas.clone(), c_values)?
        }
    };

    let table = DataPayload::Table {
        columns: vec!["delta".into(), "c_value".into()],
        rows: curve
            .delta_values
            .iter()
            .zip(&curve.c_values)
            .map(|(&d, &c)| vec![num(d), num(c)])
            .collect(),
    };
    let mut diag = BTreeMap::new();
    diag.insert("fitted_width".into(), num(curve.fitted_width));
    diag.insert("fitted_width_log".into(), num(curve.fitted_width_log));
    diag.insert("fit_residual".into(), num(curve.fit_residual));
    diag.insert("fit_warning".into(), json!(curve.fit_warning));
    diag.insert("settings".into(), json!(config.params));
    Ok((table, diag))
}

/// Write the rendered envelope to the configured sink. For CSV correlate
/// runs the fit summary goes to stderr so the data stream stays clean.
pub fn emit(envelope: &ResultEnvelope) -> Result<()> {
    let rendered = envelope.render();
    match &envelope.config.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| {
            Error::invalid("out", format!("cannot write {}: {e}", path.display()))
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .map_err(|e| Error::Numerical(format!("stdout: {e}")))?;
        }
    }
    if envelope.config.format == OutputFormat::Csv && !envelope.diagnostics.is_empty() {
        eprintln!(
            "{}",
            serde_json::to_string(&envelope.diagnostics).expect("diagnostics serialize")
        );
    }
    Ok(())
}

/// Map an error to the documented process exit code: 2 for validation
/// problems, 3 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument { .. } | Error::Domain(_) => 2,
        Error::EmptyBranch(_) | Error::Coverage(_) | Error::Numerical(_) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        parse_config(CliArgs::try_parse_from(args).expect("clap parse"))
    }

    #[test]
    fn packet_defaults_resolve() {
        let cfg = parse(&["wavepacket", "packet", "--gamma", "1", "--p0", "0"]).unwrap();
        assert_eq!(cfg.subcommand, "packet");
        assert_eq!(cfg.units, UnitSystem::Natural);
        assert_eq!(cfg.params["gamma"], serde_json::json!(1.0));
        assert_eq!(cfg.params["mass"], serde_json::json!(1.0));
    }

    #[test]
    fn negative_gamma_names_the_key() {
        let err = parse(&["wavepacket", "packet", "--gamma", "-1"]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(err.to_string().contains("gamma"), "message: {err}");
    }

    #[test]
    fn flag_overrides_file_value() {
        let dir = std::env::temp_dir().join(format!("wp-cli-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("conf.ini");
        std::fs::write(&path, "[packet]\ngamma = 2.5\np0 = 4 # comment\n").unwrap();
        let cfg = parse(&[
            "wavepacket",
            "packet",
            "--gamma",
            "1.25",
            "--config",
            path.to_str().unwrap(),
        ])
        .unwrap();
        assert_eq!(cfg.params["gamma"], serde_json::json!(1.25));
        assert_eq!(cfg.params["p0"], serde_json::json!(4.0));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = std::env::temp_dir().join(format!("wp-cli-test2-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("conf.ini");
        std::fs::write(&path, "[packet]\ngamm = 2.5\n").unwrap();
        let err = parse(&["wavepacket", "packet", "--config", path.to_str().unwrap()])
            .unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(err.to_string().contains("gamm"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn run_packet_record() {
        let cfg = parse(&["wavepacket", "packet", "--gamma", "1"]).unwrap();
        let env = run(&cfg).unwrap();
        match &env.data {
            DataPayload::Record { fields } => {
                let product = fields.iter().find(|(k, _)| k == "product").unwrap();
                let v = product.1.as_f64().unwrap();
                assert!((v - 0.5).abs() < 1e-9, "product {v}");
            }
            _ => panic!("expected record"),
        }
        let csv = env.to_csv();
        assert!(csv.starts_with("mean_x,mean_p,delta_x,delta_p,product"));
    }

    #[test]
    fn csv_uses_twelve_significant_digits() {
        assert_eq!(fmt_sig(&serde_json::json!(0.5)), "5.00000000000e-1");
        assert_eq!(fmt_sig(&serde_json::json!(0.0)), "0");
        assert_eq!(fmt_sig(&Value::Null), "nan");
    }

    #[test]
    fn mfp_reference_row() {
        let cfg = parse(&["wavepacket", "mfp", "--T", "3000", "--log-lambda", "10", "--n", "4e17"])
            .unwrap();
        let env = run(&cfg).unwrap();
        match &env.data {
            DataPayload::Table { columns, rows } => {
                assert_eq!(columns[0], "process");
                let l_ru = rows[0][3].as_f64().unwrap();
                assert!((l_ru - 5.7e-3).abs() / 5.7e-3 < 0.02, "l_ru = {l_ru}");
            }
            _ => panic!("expected table"),
        }
    }

    #[test]
    fn transform_substitution() {
        let cfg = parse(&[
            "wavepacket",
            "transform",
            "--op",
            "potential",
            "--p0",
            "1",
            "--dp-l",
            "0.1",
            "--v0",
            "1.5",
        ])
        .unwrap();
        let env = run(&cfg).unwrap();
        match &env.data {
            DataPayload::Record { fields } => {
                let get = |k: &str| {
                    fields.iter().find(|(n, _)| n == k).unwrap().1.as_f64().unwrap()
                };
                assert!((get("p0_l") - 2.0).abs() < 1e-12);
                assert!((get("delta_p_l") - 0.05).abs() < 1e-12);
            }
            _ => panic!("expected record"),
        }
    }
}

//! Command-line surface: config schemas, command runners, and exit-code
//! policy for the `ristrack` binary.
//!
//! Every command reads one JSON config (angles in degrees, unknown keys
//! rejected), writes its outputs under `--out`, and prints a short summary.
//! Exit codes are a stable contract: 0 success, 1 usage or config error,
//! 2 runtime or domain error.

use crate::codebook::{generate_codebook, Codebook, IncidentModel};
use crate::controlplane::{decode_frame, encode_frame, Opcode};
use crate::geometry::{Direction, RisGeometry, SPEED_OF_LIGHT};
use crate::simulator::{
    breakdown_sweep, compare, run, trace_to_csv, ArcTrajectory, CaseKind, PolicyKind, Scenario,
};
use crate::tracking::{SweepConfig, VisionConfig};
use crate::vision::StereoRig;
use crate::wavefield::{main_lobe, pattern_cut, ElementPattern, LinkBudget};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Error split that drives the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or config: exit 1.
    Usage(String),
    /// Domain or runtime failure: exit 2.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ristrack",
    about = "Beam-tracking toolkit: codebooks, patterns, scenario replay, control frames",
    version
)]
pub struct Cli {
    /// JSON config file for the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a codebook file from a geometry, incident model, and grid.
    Codebook,
    /// Export azimuth pattern cuts of codebook entries as CSV.
    Pattern,
    /// Run one scenario and write the per-tick trace CSV.
    Simulate,
    /// Run several policies on the identical seed and write a report.
    Compare,
    /// Sweep angular speeds with the vision policy and report lock loss.
    Breakdown,
    /// Encode or decode control frames as hex.
    Frame {
        #[command(subcommand)]
        action: FrameAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum FrameAction {
    /// Build a frame from an opcode (index|dynamic|download) and payload hex.
    Encode {
        opcode: String,
        payload_hex: Option<String>,
    },
    /// Parse frame hex and dump its fields.
    Decode { hex: String },
}

// ---- config schemas ---------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing_over_lambda: f64,
    pub freq_hz: f64,
}

impl GeometryConfig {
    fn build(&self) -> Result<RisGeometry, CliError> {
        if !(self.freq_hz > 0.0) {
            return Err(CliError::Usage(format!(
                "geometry.freq_hz must be positive, got {}",
                self.freq_hz
            )));
        }
        let wavelength = SPEED_OF_LIGHT / self.freq_hz;
        RisGeometry::new(
            self.rows,
            self.cols,
            self.spacing_over_lambda * wavelength,
            wavelength,
        )
        .map_err(|e| CliError::Usage(format!("geometry: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum IncidentConfig {
    #[serde(rename = "near")]
    Near {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_feed_m: Option<f64>,
        /// Alternative to `d_feed_m`: feed distance in wavelengths.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_feed_over_lambda: Option<f64>,
    },
    #[serde(rename = "far")]
    Far { theta_tx_deg: f64, phi_tx_deg: f64 },
}

impl IncidentConfig {
    fn build(&self, geom: &RisGeometry) -> Result<IncidentModel, CliError> {
        match self {
            IncidentConfig::Near {
                d_feed_m,
                d_feed_over_lambda,
            } => {
                let feed_distance = match (d_feed_m, d_feed_over_lambda) {
                    (Some(m), None) => *m,
                    (None, Some(l)) => l * geom.wavelength,
                    (Some(_), Some(_)) => {
                        return Err(CliError::Usage(
                            "incident: give d_feed_m or d_feed_over_lambda, not both".into(),
                        ))
                    }
                    (None, None) => {
                        return Err(CliError::Usage(
                            "incident: near model needs d_feed_m or d_feed_over_lambda".into(),
                        ))
                    }
                };
                if !(feed_distance > 0.0) {
                    return Err(CliError::Usage(format!(
                        "incident: feed distance must be positive, got {feed_distance}"
                    )));
                }
                Ok(IncidentModel::NearFieldFeed { feed_distance })
            }
            IncidentConfig::Far {
                theta_tx_deg,
                phi_tx_deg,
            } => Ok(IncidentModel::FarFieldPlane {
                tx_direction: Direction::from_degrees(*theta_tx_deg, *phi_tx_deg),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub theta_deg: Vec<f64>,
    pub phi_start_deg: f64,
    pub phi_end_deg: f64,
    pub phi_step_deg: f64,
}

impl GridConfig {
    fn phi_values(&self) -> Result<Vec<f64>, CliError> {
        expand_axis(self.phi_start_deg, self.phi_end_deg, self.phi_step_deg)
            .map_err(|e| CliError::Usage(format!("grid: {e}")))
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.theta_deg.is_empty() {
            return Err(CliError::Usage("grid: theta_deg must be nonempty".into()));
        }
        self.phi_values().map(|_| ())
    }
}

fn expand_axis(start: f64, end: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) {
        return Err(format!("step must be positive, got {step}"));
    }
    if end < start {
        return Err(format!("end {end} is below start {start}"));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookCmdConfig {
    pub geometry: GeometryConfig,
    pub incident: IncidentConfig,
    pub grid: GridConfig,
    #[serde(default = "default_codebook_file")]
    pub file_name: String,
}

fn default_codebook_file() -> String {
    "codebook.json".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternCmdConfig {
    /// Path of the codebook file to cut.
    pub codebook: PathBuf,
    #[serde(default = "default_cut_theta")]
    pub theta_deg: f64,
    #[serde(default = "default_cut_start")]
    pub phi_start_deg: f64,
    #[serde(default = "default_cut_end")]
    pub phi_end_deg: f64,
    #[serde(default = "default_cut_step")]
    pub phi_step_deg: f64,
    /// Entry indices to cut; omit for every entry.
    #[serde(default)]
    pub entries: Option<Vec<usize>>,
    #[serde(default = "default_cut_prefix")]
    pub file_prefix: String,
    /// Print a peak/width line per cut.
    #[serde(default = "default_true")]
    pub lobe_summary: bool,
    /// Broadside-cosine exponent of the per-element pattern; 0 = isotropic.
    #[serde(default)]
    pub element_exponent: f64,
}

fn default_cut_theta() -> f64 {
    90.0
}
fn default_cut_start() -> f64 {
    -90.0
}
fn default_cut_end() -> f64 {
    90.0
}
fn default_cut_step() -> f64 {
    0.5
}
fn default_cut_prefix() -> String {
    "cut".into()
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub radius_m: f64,
    #[serde(default = "default_cut_theta")]
    pub theta_deg: f64,
    pub phi_start_deg: f64,
    pub phi_end_deg: f64,
    pub angular_speed_deg_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub tx_power_dbm: f64,
    pub tx_antenna_gain_db: f64,
    pub rx_antenna_gain_db: f64,
    pub tx_link_gain_db: f64,
    pub rx_link_gain_db: f64,
    pub noise_power_dbm: f64,
    pub subcarriers: usize,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        let b = LinkBudget::bench_default();
        Self {
            tx_power_dbm: b.tx_power_dbm,
            tx_antenna_gain_db: b.tx_antenna_gain_db,
            rx_antenna_gain_db: b.rx_antenna_gain_db,
            tx_link_gain_db: b.tx_link_gain_db,
            rx_link_gain_db: b.rx_link_gain_db,
            noise_power_dbm: b.noise_power_dbm,
            subcarriers: b.subcarriers,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCmdConfig {
    #[serde(default = "default_dwell")]
    pub dwell_ticks: u32,
    #[serde(default = "default_trigger")]
    pub trigger_drop_db: f64,
    #[serde(default = "default_window")]
    pub local_window: usize,
}

fn default_dwell() -> u32 {
    1
}
fn default_trigger() -> f64 {
    6.0
}
fn default_window() -> usize {
    5
}

impl Default for SweepCmdConfig {
    fn default() -> Self {
        Self {
            dwell_ticks: 1,
            trigger_drop_db: 6.0,
            local_window: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisionCmdConfig {
    #[serde(default = "default_latency")]
    pub latency_s: f64,
    #[serde(default = "default_refresh")]
    pub refresh_s: f64,
    #[serde(default)]
    pub pixel_noise_sigma: f64,
    #[serde(default)]
    pub miss_probability: f64,
}

fn default_latency() -> f64 {
    0.085
}
fn default_refresh() -> f64 {
    0.01
}

impl Default for VisionCmdConfig {
    fn default() -> Self {
        Self {
            latency_s: 0.085,
            refresh_s: 0.01,
            pixel_noise_sigma: 0.0,
            miss_probability: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub case: CaseKind,
    pub geometry: GeometryConfig,
    pub incident: IncidentConfig,
    pub codebook_grid: GridConfig,
    pub policy: PolicyKind,
    #[serde(default)]
    pub sweep: SweepCmdConfig,
    #[serde(default)]
    pub vision: VisionCmdConfig,
    pub trajectory: TrajectoryConfig,
    #[serde(default)]
    pub budget: BudgetConfig,
    pub ris_ue_distance_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bs_ris_distance_m: Option<f64>,
    pub snr_target_db: f64,
    #[serde(default = "default_jitter")]
    pub snr_jitter_db: f64,
    /// Broadside-cosine exponent of the per-element pattern; 0 = isotropic.
    #[serde(default)]
    pub element_exponent: f64,
    #[serde(default = "default_tick")]
    pub tick_period_s: f64,
    pub duration_ticks: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trace_file")]
    pub trace_file: String,
}

fn default_jitter() -> f64 {
    0.5
}
fn default_tick() -> f64 {
    0.01
}
fn default_trace_file() -> String {
    "trace.csv".into()
}

impl ScenarioConfig {
    pub fn build(&self, seed_override: Option<u64>) -> Result<Scenario, CliError> {
        let geometry = self.geometry.build()?;
        let incident = self.incident.build(&geometry)?;
        self.codebook_grid.validate()?;
        Ok(Scenario {
            case_kind: self.case,
            geometry,
            incident,
            codebook_theta_deg: self.codebook_grid.theta_deg.clone(),
            codebook_phi_deg: self.codebook_grid.phi_values()?,
            policy: self.policy,
            sweep: SweepConfig {
                dwell_ticks: self.sweep.dwell_ticks,
                trigger_drop_db: self.sweep.trigger_drop_db,
                local_window: self.sweep.local_window,
            },
            vision: VisionConfig {
                latency_s: self.vision.latency_s,
                refresh_s: self.vision.refresh_s,
                pixel_noise_sigma: self.vision.pixel_noise_sigma,
                miss_probability: self.vision.miss_probability,
            },
            rig: StereoRig::default(),
            trajectory: ArcTrajectory {
                radius_m: self.trajectory.radius_m,
                theta: self.trajectory.theta_deg.to_radians(),
                phi_start: self.trajectory.phi_start_deg.to_radians(),
                phi_end: self.trajectory.phi_end_deg.to_radians(),
                angular_speed: self.trajectory.angular_speed_deg_s.to_radians(),
            },
            budget: LinkBudget {
                tx_power_dbm: self.budget.tx_power_dbm,
                tx_antenna_gain_db: self.budget.tx_antenna_gain_db,
                rx_antenna_gain_db: self.budget.rx_antenna_gain_db,
                tx_link_gain_db: self.budget.tx_link_gain_db,
                rx_link_gain_db: self.budget.rx_link_gain_db,
                noise_power_dbm: self.budget.noise_power_dbm,
                subcarriers: self.budget.subcarriers,
                snr_calibration_db: 0.0,
            },
            ris_ue_distance_m: self.ris_ue_distance_m,
            bs_ris_distance_m: self.bs_ris_distance_m,
            snr_target_db: self.snr_target_db,
            snr_jitter_db: self.snr_jitter_db,
            element_exponent: self.element_exponent,
            tick_period_s: self.tick_period_s,
            duration_ticks: self.duration_ticks,
            seed: seed_override.unwrap_or(self.seed),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareCmdConfig {
    pub scenario: ScenarioConfig,
    pub policies: Vec<PolicyKind>,
    #[serde(default = "default_compare_file")]
    pub report_file: String,
}

fn default_compare_file() -> String {
    "comparison.json".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakdownCmdConfig {
    pub scenario: ScenarioConfig,
    pub speeds_deg_s: Vec<f64>,
    #[serde(default = "default_breakdown_file")]
    pub report_file: String,
}

fn default_breakdown_file() -> String {
    "breakdown.json".into()
}

// ---- command runners --------------------------------------------------------

fn load_config<T: serde::de::DeserializeOwned>(path: &Option<PathBuf>) -> Result<T, CliError> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --config <path>".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_codebook(cli: &Cli) -> Result<String, CliError> {
    let config: CodebookCmdConfig = load_config(&cli.config)?;
    let geometry = config.geometry.build()?;
    let incident = config.incident.build(&geometry)?;
    config.grid.validate()?;
    let phi = config.grid.phi_values()?;
    let book = generate_codebook(&geometry, &incident, &config.grid.theta_deg, &phi)
        .map_err(|e| CliError::Usage(format!("grid: {e}")))?;
    ensure_out_dir(&cli.out)?;
    let path = cli.out.join(&config.file_name);
    write_output(&path, &book.to_json())?;
    Ok(format!(
        "codebook: {} entries, {}x{} panel, d/lambda {:.3}, written to {}",
        book.len(),
        geometry.rows,
        geometry.cols,
        geometry.spacing / geometry.wavelength,
        path.display()
    ))
}

pub fn cmd_pattern(cli: &Cli) -> Result<String, CliError> {
    let config: PatternCmdConfig = load_config(&cli.config)?;
    let book = Codebook::load(&config.codebook)
        .map_err(|e| CliError::Usage(format!("codebook {}: {e}", config.codebook.display())))?;
    let axis_deg = expand_axis(
        config.phi_start_deg,
        config.phi_end_deg,
        config.phi_step_deg,
    )
    .map_err(|e| CliError::Usage(format!("phi axis: {e}")))?;
    if !(config.element_exponent >= 0.0) {
        return Err(CliError::Usage(format!(
            "element_exponent must be >= 0, got {}",
            config.element_exponent
        )));
    }
    let element_pattern = ElementPattern::new(config.element_exponent);
    let axis: Vec<f64> = axis_deg.iter().map(|d| d.to_radians()).collect();
    let indices: Vec<usize> = match &config.entries {
        Some(list) => {
            for &i in list {
                if i >= book.len() {
                    return Err(CliError::Usage(format!(
                        "entries: index {i} outside the {}-entry codebook",
                        book.len()
                    )));
                }
            }
            list.clone()
        }
        None => (0..book.len()).collect(),
    };
    ensure_out_dir(&cli.out)?;
    let mut summary = String::new();
    for &i in &indices {
        let entry = &book.entries[i];
        let states = entry
            .element_states(&book.geometry)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let cut = pattern_cut(
            &book.geometry,
            &states,
            &element_pattern,
            config.theta_deg.to_radians(),
            &axis,
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        let path = cli.out.join(format!("{}_{:03}.csv", config.file_prefix, i));
        write_output(&path, &cut.to_csv())?;
        if config.lobe_summary {
            let lobe = main_lobe(&cut);
            let width = lobe.half_power_width.map_or("censored".to_string(), |w| {
                format!("{:.2} deg", w.to_degrees())
            });
            let _ = writeln!(
                summary,
                "entry {:3}: desired phi {:+.1} deg, peak {:+.2} deg, -3 dB width {}",
                i,
                entry.desired.phi.to_degrees(),
                lobe.peak_direction.to_degrees(),
                width
            );
        }
    }
    let _ = write!(
        summary,
        "{} cut(s) written to {}",
        indices.len(),
        cli.out.display()
    );
    Ok(summary)
}

pub fn cmd_simulate(cli: &Cli) -> Result<String, CliError> {
    let config: ScenarioConfig = load_config(&cli.config)?;
    let scenario = config.build(cli.seed)?;
    let trace = run(&scenario).map_err(map_sim_error)?;
    ensure_out_dir(&cli.out)?;
    let path = cli.out.join(&config.trace_file);
    write_output(&path, &trace_to_csv(&trace))?;
    let n = trace.len() as f64;
    let mean = trace.iter().map(|s| s.snr_db).sum::<f64>() / n;
    let min = trace.iter().map(|s| s.snr_db).fold(f64::INFINITY, f64::min);
    let max = trace
        .iter()
        .map(|s| s.snr_db)
        .fold(f64::NEG_INFINITY, f64::max);
    let overhead = trace.iter().filter(|s| s.overhead).count() as f64 / n;
    Ok(format!(
        "simulate: {} ticks, policy {}, SNR mean {:.2} dB (min {:.2}, max {:.2}), overhead {:.1}%, trace {}",
        trace.len(),
        scenario.policy.name(),
        mean,
        min,
        max,
        overhead * 100.0,
        path.display()
    ))
}

pub fn cmd_compare(cli: &Cli) -> Result<String, CliError> {
    let config: CompareCmdConfig = load_config(&cli.config)?;
    if config.policies.is_empty() {
        return Err(CliError::Usage(
            "policies: must list at least one policy".into(),
        ));
    }
    let scenario = config.scenario.build(cli.seed)?;
    let report = compare(&scenario, &config.policies).map_err(map_sim_error)?;
    ensure_out_dir(&cli.out)?;
    let path = cli.out.join(&config.report_file);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(format!("report serialization: {e}")))?;
    write_output(&path, &json)?;
    let mut summary = String::new();
    for p in &report.policies {
        let _ = writeln!(
            summary,
            "{:>7}: p5 {:.2} dB, p50 {:.2} dB, overhead {:.1}%, within 3 dB of genie {:.1}%",
            p.policy,
            p.snr_p5_db,
            p.snr_p50_db,
            p.overhead_fraction * 100.0,
            p.within_3db_of_genie_fraction * 100.0
        );
    }
    let _ = write!(summary, "report written to {}", path.display());
    Ok(summary)
}

pub fn cmd_breakdown(cli: &Cli) -> Result<String, CliError> {
    let config: BreakdownCmdConfig = load_config(&cli.config)?;
    if config.speeds_deg_s.is_empty() {
        return Err(CliError::Usage(
            "speeds_deg_s: must list at least one speed".into(),
        ));
    }
    let scenario = config.scenario.build(cli.seed)?;
    let report = breakdown_sweep(&scenario, &config.speeds_deg_s).map_err(map_sim_error)?;
    ensure_out_dir(&cli.out)?;
    let path = cli.out.join(&config.report_file);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(format!("report serialization: {e}")))?;
    write_output(&path, &json)?;
    let mut summary = String::new();
    for p in &report.points {
        let _ = writeln!(
            summary,
            "{:7.1} deg/s: deficit fraction {:.3} -> lock {}",
            p.speed_deg_s,
            p.deficit_fraction,
            if p.lock_held { "held" } else { "lost" }
        );
    }
    match report.transition_estimate_deg_s {
        Some(t) => {
            let _ = writeln!(summary, "transition estimate: {t:.1} deg/s");
        }
        None => {
            let _ = writeln!(summary, "no lock-loss transition inside the tested speeds");
        }
    }
    let _ = write!(summary, "report written to {}", path.display());
    Ok(summary)
}

fn map_sim_error(e: crate::simulator::SimulationError) -> CliError {
    match e {
        crate::simulator::SimulationError::InvalidScenario(msg) => {
            CliError::Usage(format!("scenario: {msg}"))
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn parse_hex(text: &str) -> Result<Vec<u8>, CliError> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if !cleaned.len().is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "hex string has odd length {}",
            cleaned.len()
        )));
    }
    (0..cleaned.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&cleaned[i..i + 2], 16)
                .map_err(|e| CliError::Usage(format!("bad hex byte {:?}: {e}", &cleaned[i..i + 2])))
        })
        .collect()
}

fn to_hex(bytes: &[u8]) -> String {
    bytes
        .iter()
        .map(|b| format!("{b:02X}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn cmd_frame(action: &FrameAction) -> Result<String, CliError> {
    match action {
        FrameAction::Encode {
            opcode,
            payload_hex,
        } => {
            let opcode = match opcode.to_ascii_lowercase().as_str() {
                "index" => Opcode::Index,
                "dynamic" => Opcode::Dynamic,
                "download" => Opcode::Download,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown opcode {other:?}; use index, dynamic, or download"
                    )))
                }
            };
            let payload = match payload_hex {
                Some(hex) => parse_hex(hex)?,
                None => Vec::new(),
            };
            let frame = encode_frame(opcode, &payload)
                .map_err(|e| CliError::Runtime(format!("encode: {e}")))?;
            Ok(to_hex(&frame))
        }
        FrameAction::Decode { hex } => {
            let bytes = parse_hex(hex)?;
            let frame =
                decode_frame(&bytes).map_err(|e| CliError::Runtime(format!("decode: {e}")))?;
            let mut out = String::new();
            let name = match frame.opcode {
                Opcode::Index => "index",
                Opcode::Dynamic => "dynamic",
                Opcode::Download => "download",
            };
            let _ = writeln!(out, "opcode: {} (0x{:02X})", name, frame.opcode as u8);
            let _ = writeln!(out, "length: {}", frame.payload.len());
            let _ = writeln!(out, "payload: {}", to_hex(&frame.payload));
            if frame.opcode == Opcode::Index && frame.payload.len() == 2 {
                let idx = u16::from_be_bytes([frame.payload[0], frame.payload[1]]);
                let _ = writeln!(out, "index: {idx}");
            }
            let _ = write!(out, "crc: ok");
            Ok(out)
        }
    }
}

/// Dispatch a parsed invocation; the returned string is the summary printed
/// to stdout.
pub fn dispatch(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Codebook => cmd_codebook(cli),
        Command::Pattern => cmd_pattern(cli),
        Command::Simulate => cmd_simulate(cli),
        Command::Compare => cmd_compare(cli),
        Command::Breakdown => cmd_breakdown(cli),
        Command::Frame { action } => cmd_frame(action),
    }
}

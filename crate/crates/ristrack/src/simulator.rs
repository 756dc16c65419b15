//! Time-stepped scenario engine: user trajectory, per-tick SNR through the
//! wavefield model, policy-in-the-loop tracking with the control board
//! emulator applying every switch, overhead accounting, and trace emission.
//!
//! Two bench layouts are modeled. In the near-field case the panel is fed
//! by a boresight horn and the path loss covers only the panel-to-user
//! leg; in the far-field relay case a plane wave arrives from the base
//! station, the direct path is blocked, and both legs contribute path
//! loss. Absolute SNR levels are pinned by a per-scenario calibration
//! offset chosen so the genie policy at boresight hits the configured
//! target; every comparison is relative.

use crate::codebook::{generate_codebook, Codebook, CodebookError, IncidentModel};
use crate::controlplane::{
    decode_frame, download_payload, encode_frame, index_payload, BoardState, Opcode, TimingModel,
    CODEWORD_BITS, PANEL_COLS, PANEL_ROWS,
};
use crate::geometry::{position_from_direction, Direction, RisGeometry};
use crate::tracking::{
    static_policy_step, sweep_policy_step, vision_policy_step, SweepConfig, SweepState,
    VisionConfig, VisionState,
};
use crate::vision::{observe_position, DetectorOracle, StereoRig, VisionError};
use crate::wavefield::{
    capacity_bps_hz, db_to_linear, fspl_db, received_snr_db, ElementPattern, LinkBudget,
};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Codebook(#[from] CodebookError),
    #[error(transparent)]
    Pattern(#[from] crate::wavefield::PatternError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("control board rejected a frame: {0}")]
    Board(#[from] crate::controlplane::FrameError),
}

/// Bench layout selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// Panel driven by a close-in feed; path loss is panel-to-user only.
    NearFieldFeed,
    /// Plane-wave illumination with the direct path blocked; path loss is
    /// station-to-panel plus panel-to-user.
    FarFieldRelay,
}

/// Tracking policy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Vision,
    Sweep,
    Genie,
    Static,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Vision => "vision",
            PolicyKind::Sweep => "sweep",
            PolicyKind::Genie => "genie",
            PolicyKind::Static => "static",
        }
    }
}

/// Constant-angular-speed arc swept back and forth at fixed pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcTrajectory {
    pub radius_m: f64,
    /// Pitch of the arc in radians.
    pub theta: f64,
    pub phi_start: f64,
    pub phi_end: f64,
    /// Angular speed magnitude in radians per second.
    pub angular_speed: f64,
}

/// Complete experiment description. Deterministic given the seed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub case_kind: CaseKind,
    pub geometry: RisGeometry,
    pub incident: IncidentModel,
    pub codebook_theta_deg: Vec<f64>,
    pub codebook_phi_deg: Vec<f64>,
    pub policy: PolicyKind,
    pub sweep: SweepConfig,
    pub vision: VisionConfig,
    pub rig: StereoRig,
    pub trajectory: ArcTrajectory,
    pub budget: LinkBudget,
    pub ris_ue_distance_m: f64,
    /// Station-to-panel distance; required for the far-field relay case.
    pub bs_ris_distance_m: Option<f64>,
    /// Genie-at-boresight SNR the calibration pins, dB.
    pub snr_target_db: f64,
    /// Measurement jitter sigma on the reported SNR, dB.
    pub snr_jitter_db: f64,
    /// Broadside-cosine exponent of the per-element pattern (0 = isotropic).
    pub element_exponent: f64,
    pub tick_period_s: f64,
    pub duration_ticks: u64,
    pub seed: u64,
}

/// One per-tick output record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub time_ms: f64,
    pub true_phi_deg: f64,
    pub est_phi_deg: Option<f64>,
    pub codeword_index: usize,
    pub snr_db: f64,
    pub overhead: bool,
    pub capacity_bps_hz: f64,
}

/// Render a trace in the export CSV layout.
pub fn trace_to_csv(samples: &[TraceSample]) -> String {
    let mut out = String::from(
        "time_ms,true_phi_deg,est_phi_deg,codeword_index,snr_db,overhead,capacity_bps_hz\n",
    );
    for s in samples {
        let est = s.est_phi_deg.map_or(String::new(), |v| format!("{v:.4}"));
        out.push_str(&format!(
            "{:.3},{:.4},{},{},{:.4},{},{:.4}\n",
            s.time_ms,
            s.true_phi_deg,
            est,
            s.codeword_index,
            s.snr_db,
            u8::from(s.overhead),
            s.capacity_bps_hz
        ));
    }
    out
}

fn validate(scenario: &Scenario) -> Result<(), SimulationError> {
    let err = |msg: String| Err(SimulationError::InvalidScenario(msg));
    if !(scenario.tick_period_s > 0.0) {
        return err(format!(
            "tick_period_s must be positive, got {}",
            scenario.tick_period_s
        ));
    }
    if scenario.duration_ticks == 0 {
        return err("duration_ticks must be at least 1".into());
    }
    if !(scenario.ris_ue_distance_m > 0.0) {
        return err(format!(
            "ris_ue_distance_m must be positive, got {}",
            scenario.ris_ue_distance_m
        ));
    }
    match (scenario.case_kind, scenario.bs_ris_distance_m) {
        (CaseKind::FarFieldRelay, None) => {
            return err("far_field_relay requires bs_ris_distance_m".into())
        }
        (_, Some(d)) if !(d > 0.0) => {
            return err(format!("bs_ris_distance_m must be positive, got {d}"))
        }
        _ => {}
    }
    let t = &scenario.trajectory;
    if !(t.phi_end > t.phi_start) {
        return err("trajectory needs phi_start < phi_end".into());
    }
    if !(t.angular_speed > 0.0) {
        return err(format!(
            "angular_speed must be positive, got {}",
            t.angular_speed
        ));
    }
    if !(t.radius_m > 0.0) {
        return err(format!(
            "trajectory radius must be positive, got {}",
            t.radius_m
        ));
    }
    if t.angular_speed * scenario.tick_period_s > (t.phi_end - t.phi_start) {
        return err("one tick would cross the whole arc; reduce speed or tick period".into());
    }
    if !(scenario.vision.refresh_s > 0.0) {
        return err(format!(
            "vision refresh_s must be positive, got {}",
            scenario.vision.refresh_s
        ));
    }
    if scenario.vision.latency_s < 0.0 {
        return err(format!(
            "vision latency_s must be >= 0, got {}",
            scenario.vision.latency_s
        ));
    }
    if !(0.0..=1.0).contains(&scenario.vision.miss_probability) {
        return err(format!(
            "miss_probability must be in [0, 1], got {}",
            scenario.vision.miss_probability
        ));
    }
    if scenario.sweep.dwell_ticks < 1 {
        return err("sweep dwell_ticks must be at least 1".into());
    }
    if !(scenario.sweep.trigger_drop_db > 0.0) {
        return err(format!(
            "sweep trigger_drop_db must be positive, got {}",
            scenario.sweep.trigger_drop_db
        ));
    }
    if scenario.sweep.local_window < 1 {
        return err("sweep local_window must be at least 1".into());
    }
    if scenario.budget.subcarriers < 1 {
        return err("budget needs at least one subcarrier".into());
    }
    if !(scenario.element_exponent >= 0.0) {
        return err(format!(
            "element_exponent must be >= 0, got {}",
            scenario.element_exponent
        ));
    }
    if !scenario.budget.noise_power_dbm.is_finite() {
        return err("budget noise power must be finite".into());
    }
    Ok(())
}

/// Triangle-wave arc walker: constant |delta phi| per tick with reflection
/// at the ends.
struct ArcWalker {
    phi: f64,
    forward: bool,
    start: f64,
    end: f64,
    step: f64,
}

impl ArcWalker {
    fn new(t: &ArcTrajectory, tick_period_s: f64) -> Self {
        Self {
            phi: t.phi_start,
            forward: true,
            start: t.phi_start,
            end: t.phi_end,
            step: t.angular_speed * tick_period_s,
        }
    }

    fn advance(&mut self) {
        if self.forward {
            self.phi += self.step;
            if self.phi > self.end {
                self.phi = self.end - (self.phi - self.end);
                self.forward = false;
            }
        } else {
            self.phi -= self.step;
            if self.phi < self.start {
                self.phi = self.start + (self.start - self.phi);
                self.forward = true;
            }
        }
    }
}

/// Gain evaluator with per-entry element coefficients collapsed once, so
/// the genie's sweep over every entry costs one multiply per element.
struct GainTable {
    geometry: RisGeometry,
    pattern: ElementPattern,
    entry_phasors: Vec<Vec<num_complex::Complex64>>,
    /// Continuous-compensation coherent maximum, the 0 dB reference.
    reference: f64,
}

impl GainTable {
    fn new(book: &Codebook, pattern: ElementPattern) -> Result<Self, CodebookError> {
        let entry_phasors = book
            .entries
            .iter()
            .map(|cw| {
                Ok(crate::wavefield::element_phasors(
                    &cw.element_states(&book.geometry)?,
                ))
            })
            .collect::<Result<Vec<_>, CodebookError>>()?;
        Ok(Self {
            geometry: book.geometry,
            pattern,
            entry_phasors,
            reference: book.geometry.element_count() as f64,
        })
    }

    fn magnitude_prepared(&self, entry: usize, phases: &crate::wavefield::DirectionPhases) -> f64 {
        phases
            .field(&self.geometry, &self.entry_phasors[entry])
            .norm()
    }

    /// Panel gain of an entry toward `dir`, dB relative to the coherent max.
    fn gain_db(&self, entry: usize, dir: &Direction) -> f64 {
        let phases = crate::wavefield::DirectionPhases::new(&self.geometry, &self.pattern, dir);
        let mag = self.magnitude_prepared(entry, &phases);
        20.0 * (mag.max(1e-300) / self.reference).log10()
    }

    /// Entry with the strongest pattern toward `dir` (ties keep the lower
    /// index) and its gain.
    fn best_entry(&self, dir: &Direction) -> (usize, f64) {
        let phases = crate::wavefield::DirectionPhases::new(&self.geometry, &self.pattern, dir);
        let mut best = 0;
        let mut best_mag = f64::NEG_INFINITY;
        for i in 0..self.entry_phasors.len() {
            let mag = self.magnitude_prepared(i, &phases);
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        (best, 20.0 * (best_mag.max(1e-300) / self.reference).log10())
    }
}

/// Control-board leg of the loop. Only the 20x20 layout has a board; any
/// other geometry applies codewords directly with zero switch latency.
enum BoardPath {
    Emulated {
        board: Box<BoardState>,
        timing: TimingModel,
        pending: Option<(u64, usize)>,
    },
    Direct,
}

impl BoardPath {
    fn new(book: &Codebook) -> Result<Self, SimulationError> {
        if book.geometry.rows != PANEL_ROWS || book.geometry.cols != PANEL_COLS {
            return Ok(BoardPath::Direct);
        }
        let mut board = BoardState {
            flash_capacity: book.len().max(256),
            ..BoardState::default()
        };
        let timing = TimingModel::default();
        let codewords: Vec<[bool; CODEWORD_BITS]> = book
            .entries
            .iter()
            .map(|cw| {
                let mut bits = [false; CODEWORD_BITS];
                bits.copy_from_slice(&cw.bits);
                bits
            })
            .collect();
        // download the whole codebook through the wire codec, as the bench
        // does once at power-on
        let frame = decode_frame(&encode_frame(
            Opcode::Download,
            &download_payload(&codewords),
        )?)?;
        board.apply_frame(&frame, &timing)?;
        Ok(BoardPath::Emulated {
            board: Box::new(board),
            timing,
            pending: None,
        })
    }

    /// Ask the board to switch; the new codeword becomes visible this tick
    /// only when the refresh fits inside one tick period.
    fn select(
        &mut self,
        index: usize,
        now_tick: u64,
        tick_period_s: f64,
    ) -> Result<(), SimulationError> {
        match self {
            BoardPath::Direct => Ok(()),
            BoardPath::Emulated {
                board,
                timing,
                pending,
            } => {
                let frame =
                    decode_frame(&encode_frame(Opcode::Index, &index_payload(index as u16))?)?;
                let latency = board.apply_frame(&frame, timing)?;
                if latency > tick_period_s {
                    let delay = (latency / tick_period_s).ceil() as u64;
                    *pending = Some((now_tick + delay, index));
                } else {
                    *pending = None;
                }
                Ok(())
            }
        }
    }

    /// Entry whose bits are physically on the panel this tick.
    fn effective_index(&mut self, requested: usize, now_tick: u64, previous: usize) -> usize {
        match self {
            BoardPath::Direct => requested,
            BoardPath::Emulated { pending, .. } => match pending {
                Some((ready, index)) => {
                    if now_tick >= *ready {
                        let idx = *index;
                        *pending = None;
                        idx
                    } else {
                        previous
                    }
                }
                None => requested,
            },
        }
    }
}

enum PolicyRunner {
    Vision {
        state: VisionState,
        latency_ticks: u64,
        refresh_ticks: u64,
        oracle: DetectorOracle,
    },
    Sweep {
        state: SweepState,
    },
    Genie,
    Static,
}

/// Run a scenario and emit one sample per tick.
pub fn run(scenario: &Scenario) -> Result<Vec<TraceSample>, SimulationError> {
    validate(scenario)?;
    let book = generate_codebook(
        &scenario.geometry,
        &scenario.incident,
        &scenario.codebook_theta_deg,
        &scenario.codebook_phi_deg,
    )?;
    run_with_codebook(scenario, &book)
}

/// [`run`] against a pre-built codebook (shared across policy comparisons).
pub fn run_with_codebook(
    scenario: &Scenario,
    book: &Codebook,
) -> Result<Vec<TraceSample>, SimulationError> {
    validate(scenario)?;
    let gains = GainTable::new(book, ElementPattern::new(scenario.element_exponent))?;
    let boresight = Direction::new(std::f64::consts::FRAC_PI_2, 0.0);

    let path_loss_db = match scenario.case_kind {
        CaseKind::NearFieldFeed => {
            fspl_db(scenario.geometry.wavelength, scenario.ris_ue_distance_m)?
        }
        CaseKind::FarFieldRelay => {
            let bs = scenario.bs_ris_distance_m.expect("validated above");
            fspl_db(scenario.geometry.wavelength, bs)?
                + fspl_db(scenario.geometry.wavelength, scenario.ris_ue_distance_m)?
        }
    };

    // pin the absolute level: genie at boresight must read the target
    let (_, genie_boresight_gain) = gains.best_entry(&boresight);
    let mut budget = scenario.budget;
    budget.snr_calibration_db = 0.0;
    let uncalibrated = received_snr_db(&budget, genie_boresight_gain, path_loss_db);
    budget.snr_calibration_db = scenario.snr_target_db - uncalibrated;

    let initial_index = book.boresight_index();
    let mut runner = match scenario.policy {
        PolicyKind::Vision => PolicyRunner::Vision {
            state: VisionState::new(initial_index),
            latency_ticks: (scenario.vision.latency_s / scenario.tick_period_s).ceil() as u64,
            refresh_ticks: ((scenario.vision.refresh_s / scenario.tick_period_s).ceil() as u64)
                .max(1),
            oracle: DetectorOracle {
                pixel_noise_sigma: scenario.vision.pixel_noise_sigma,
                miss_probability: scenario.vision.miss_probability,
                latency_s: scenario.vision.latency_s,
                seed: scenario.seed,
            },
        },
        PolicyKind::Sweep => PolicyRunner::Sweep {
            state: SweepState::new(initial_index),
        },
        PolicyKind::Genie => PolicyRunner::Genie,
        PolicyKind::Static => PolicyRunner::Static,
    };

    let mut board = BoardPath::new(book)?;
    let mut walker = ArcWalker::new(&scenario.trajectory, scenario.tick_period_s);
    let jitter_dist = if scenario.snr_jitter_db > 0.0 {
        Some(Normal::new(0.0, scenario.snr_jitter_db).expect("sigma > 0"))
    } else {
        None
    };

    let mut samples = Vec::with_capacity(scenario.duration_ticks as usize);
    let mut active_index = initial_index;
    let mut previous_snr_db = f64::NEG_INFINITY;

    for tick in 0..scenario.duration_ticks {
        let true_dir = Direction::new(scenario.trajectory.theta, walker.phi);
        let true_pos = position_from_direction(&true_dir, scenario.trajectory.radius_m)?;

        let (requested_index, overhead, est_phi) = match &mut runner {
            PolicyRunner::Vision {
                state,
                latency_ticks,
                refresh_ticks,
                oracle,
            } => {
                let capture = if tick.is_multiple_of(*refresh_ticks) {
                    match observe_position(oracle, &scenario.rig, &true_pos, tick) {
                        Ok(Some((dir, _))) => Some(dir),
                        Ok(None) => None,
                        // a target outside the camera view is a miss
                        Err(VisionError::OutOfView { .. }) => None,
                        Err(VisionError::NoDepth(_)) => None,
                        Err(e) => return Err(SimulationError::InvalidScenario(e.to_string())),
                    }
                } else {
                    None
                };
                let (idx, overhead) =
                    vision_policy_step(state, book, capture, tick, *latency_ticks);
                (
                    idx,
                    overhead,
                    state.applied_estimate.map(|d| d.phi.to_degrees()),
                )
            }
            PolicyRunner::Sweep { state } => {
                let (idx, overhead) =
                    sweep_policy_step(state, book, previous_snr_db, &scenario.sweep);
                (idx, overhead, None)
            }
            PolicyRunner::Genie => (genie_best(&gains, &true_dir), false, None),
            PolicyRunner::Static => (static_policy_step(book), false, None),
        };

        if requested_index != active_index {
            board.select(requested_index, tick, scenario.tick_period_s)?;
        }
        let effective = board.effective_index(requested_index, tick, active_index);
        active_index = effective;

        let g_ris_db = gains.gain_db(effective, &true_dir);
        let clean_snr = received_snr_db(&budget, g_ris_db, path_loss_db);
        let jitter = match &jitter_dist {
            Some(dist) => {
                let mut rng = crate::rngstream::derive(
                    scenario.seed,
                    crate::rngstream::STREAM_SNR_JITTER,
                    tick,
                );
                dist.sample(&mut rng)
            }
            None => 0.0,
        };
        let snr_db = clean_snr + jitter;
        let capacity = if overhead {
            0.0
        } else {
            capacity_bps_hz(db_to_linear(snr_db), budget.subcarriers)
        };

        samples.push(TraceSample {
            time_ms: tick as f64 * scenario.tick_period_s * 1000.0,
            true_phi_deg: walker.phi.to_degrees(),
            est_phi_deg: est_phi,
            codeword_index: effective,
            snr_db,
            overhead,
            capacity_bps_hz: capacity,
        });

        previous_snr_db = snr_db;
        walker.advance();
    }
    Ok(samples)
}

fn genie_best(gains: &GainTable, dir: &Direction) -> usize {
    gains.best_entry(dir).0
}

// ---- policy comparison ------------------------------------------------------

/// Per-policy summary over a shared-seed run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub snr_p5_db: f64,
    pub snr_p50_db: f64,
    pub snr_p95_db: f64,
    pub mean_snr_db: f64,
    pub overhead_fraction: f64,
    /// Fraction of ticks below `threshold_db`.
    pub below_threshold_fraction: f64,
    /// Fraction of ticks within 3 dB of the genie trace.
    pub within_3db_of_genie_fraction: f64,
    pub mean_capacity_bps_hz: f64,
}

/// Report of [`compare`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub threshold_db: f64,
    pub tick_period_s: f64,
    pub duration_ticks: u64,
    pub seed: u64,
    pub policies: Vec<PolicySummary>,
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (p * (sorted.len() as f64 - 1.0)).round() as usize;
    sorted[rank.min(sorted.len() - 1)]
}

/// Run each policy on the identical seed and trajectory and summarize.
///
/// The genie trace is always computed as the reference for the
/// within-3-dB statistic, whether or not it is in `policies`.
pub fn compare(
    scenario: &Scenario,
    policies: &[PolicyKind],
) -> Result<ComparisonReport, SimulationError> {
    validate(scenario)?;
    let book = generate_codebook(
        &scenario.geometry,
        &scenario.incident,
        &scenario.codebook_theta_deg,
        &scenario.codebook_phi_deg,
    )?;
    let genie_trace = {
        let mut s = scenario.clone();
        s.policy = PolicyKind::Genie;
        run_with_codebook(&s, &book)?
    };
    let threshold_db = scenario.snr_target_db - 3.0;
    let mut summaries = Vec::new();
    for &policy in policies {
        let trace = if policy == PolicyKind::Genie {
            genie_trace.clone()
        } else {
            let mut s = scenario.clone();
            s.policy = policy;
            run_with_codebook(&s, &book)?
        };
        let mut snrs: Vec<f64> = trace.iter().map(|s| s.snr_db).collect();
        let n = snrs.len() as f64;
        let mean_snr = snrs.iter().sum::<f64>() / n;
        let overhead = trace.iter().filter(|s| s.overhead).count() as f64 / n;
        let below = snrs.iter().filter(|&&v| v < threshold_db).count() as f64 / n;
        let within = trace
            .iter()
            .zip(genie_trace.iter())
            .filter(|(s, g)| g.snr_db - s.snr_db < 3.0)
            .count() as f64
            / n;
        let mean_capacity = trace.iter().map(|s| s.capacity_bps_hz).sum::<f64>() / n;
        snrs.sort_by(|a, b| a.partial_cmp(b).expect("SNR values are finite"));
        summaries.push(PolicySummary {
            policy: policy.name().to_string(),
            snr_p5_db: percentile(&snrs, 0.05),
            snr_p50_db: percentile(&snrs, 0.50),
            snr_p95_db: percentile(&snrs, 0.95),
            mean_snr_db: mean_snr,
            overhead_fraction: overhead,
            below_threshold_fraction: below,
            within_3db_of_genie_fraction: within,
            mean_capacity_bps_hz: mean_capacity,
        });
    }
    Ok(ComparisonReport {
        threshold_db,
        tick_period_s: scenario.tick_period_s,
        duration_ticks: scenario.duration_ticks,
        seed: scenario.seed,
        policies: summaries,
    })
}

// ---- velocity breakdown -----------------------------------------------------

/// Lock statistics of the vision policy at one angular speed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedPoint {
    pub speed_deg_s: f64,
    /// Fraction of ticks at least 3 dB below the genie trace.
    pub deficit_fraction: f64,
    /// Lock is held while the deficit fraction stays under 10%.
    pub lock_held: bool,
}

/// Report of [`breakdown_sweep`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub points: Vec<SpeedPoint>,
    /// Lowest tested speed whose deficit fraction exceeds 10%.
    pub lowest_lock_loss_speed_deg_s: Option<f64>,
    /// Fastest tested speed that still held lock below the first loss.
    pub last_held_speed_deg_s: Option<f64>,
    /// Midpoint of the (last held, first lost) bracket.
    pub transition_estimate_deg_s: Option<f64>,
}

/// Deficit threshold for the breakdown statistic, dB below genie.
pub const BREAKDOWN_DEFICIT_DB: f64 = 3.0;
/// Deficit-tick fraction above which lock counts as lost.
pub const BREAKDOWN_LOSS_FRACTION: f64 = 0.10;

/// Sweep the vision policy across angular speeds and report where tracking
/// falls apart: the lowest speed whose 3 dB-deficit fraction exceeds 10%.
pub fn breakdown_sweep(
    scenario: &Scenario,
    speeds_deg_s: &[f64],
) -> Result<BreakdownReport, SimulationError> {
    validate(scenario)?;
    let book = generate_codebook(
        &scenario.geometry,
        &scenario.incident,
        &scenario.codebook_theta_deg,
        &scenario.codebook_phi_deg,
    )?;
    let mut speeds = speeds_deg_s.to_vec();
    speeds.sort_by(|a, b| a.partial_cmp(b).expect("speeds are finite"));
    let mut points = Vec::new();
    for &speed in &speeds {
        let mut vision = scenario.clone();
        vision.policy = PolicyKind::Vision;
        vision.trajectory.angular_speed = speed.to_radians();
        let mut genie = vision.clone();
        genie.policy = PolicyKind::Genie;
        let vision_trace = run_with_codebook(&vision, &book)?;
        let genie_trace = run_with_codebook(&genie, &book)?;
        let deficit_fraction = vision_trace
            .iter()
            .zip(genie_trace.iter())
            .filter(|(v, g)| g.snr_db - v.snr_db >= BREAKDOWN_DEFICIT_DB)
            .count() as f64
            / vision_trace.len() as f64;
        points.push(SpeedPoint {
            speed_deg_s: speed,
            deficit_fraction,
            lock_held: deficit_fraction < BREAKDOWN_LOSS_FRACTION,
        });
    }
    let first_lost = points.iter().position(|p| !p.lock_held);
    let lowest_lock_loss = first_lost.map(|i| points[i].speed_deg_s);
    let last_held = match first_lost {
        Some(0) | None => None,
        Some(i) => Some(points[i - 1].speed_deg_s),
    };
    let transition = match (last_held, lowest_lock_loss) {
        (Some(a), Some(b)) => Some((a + b) / 2.0),
        _ => None,
    };
    Ok(BreakdownReport {
        points,
        lowest_lock_loss_speed_deg_s: lowest_lock_loss,
        last_held_speed_deg_s: last_held,
        transition_estimate_deg_s: transition,
    })
}

//! Beam-tracking policies: vision-aided selection, the sweeping baseline
//! (initial full sweep plus drop-triggered local re-sweeps), the genie
//! upper bound, and the static boresight reference.
//!
//! Policies are single-threaded state machines advanced once per simulator
//! tick. The sweeping policy consumes the user's SNR feedback for the
//! codeword that was active on the previous tick; the vision policy
//! consumes direction estimates that mature after the acquisition latency
//! and never raises the overhead flag.

use crate::codebook::Codebook;
use crate::geometry::Direction;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Knobs of the sweeping baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Ticks each candidate codeword stays up during a sweep.
    pub dwell_ticks: u32,
    /// Re-sweep trigger: measured SNR this far below the best seen, in dB.
    pub trigger_drop_db: f64,
    /// Local sweep half-width in codebook entries.
    pub local_window: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dwell_ticks: 1,
            trigger_drop_db: 6.0,
            local_window: 5,
        }
    }
}

/// Vision acquisition timing and noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisionConfig {
    /// Capture-to-estimate latency in seconds.
    pub latency_s: f64,
    /// Interval between captures in seconds. Captures are pipelined: a new
    /// frame may start before the previous estimate matures.
    pub refresh_s: f64,
    /// Detection pixel noise (standard deviation, pixels).
    pub pixel_noise_sigma: f64,
    /// Per-capture miss probability.
    pub miss_probability: f64,
}

impl Default for VisionConfig {
    fn default() -> Self {
        Self {
            latency_s: 0.085,
            refresh_s: 0.01,
            pixel_noise_sigma: 0.0,
            miss_probability: 0.0,
        }
    }
}

/// Vision policy state: the active entry and the in-flight estimates.
#[derive(Debug, Clone)]
pub struct VisionState {
    pub active_index: usize,
    /// Estimates waiting out the acquisition latency: (ready_tick, direction).
    pub pending: VecDeque<(u64, Direction)>,
    /// Most recent estimate that was applied, if any.
    pub applied_estimate: Option<Direction>,
}

impl VisionState {
    pub fn new(initial_index: usize) -> Self {
        Self {
            active_index: initial_index,
            pending: VecDeque::new(),
            applied_estimate: None,
        }
    }
}

/// Advance the vision policy by one tick.
///
/// `capture` is the direction estimated from a frame captured *now*; it
/// matures `latency_ticks` later. Matured estimates switch the active
/// entry to the nearest codeword. Misses hold the current entry. Never
/// flags overhead.
pub fn vision_policy_step(
    state: &mut VisionState,
    book: &Codebook,
    capture: Option<Direction>,
    now_tick: u64,
    latency_ticks: u64,
) -> (usize, bool) {
    if let Some(dir) = capture {
        state.pending.push_back((now_tick + latency_ticks, dir));
    }
    let mut matured = None;
    while state
        .pending
        .front()
        .is_some_and(|&(ready, _)| ready <= now_tick)
    {
        matured = state.pending.pop_front();
    }
    if let Some((_, dir)) = matured {
        state.active_index = book.nearest_codeword(&dir).0;
        state.applied_estimate = Some(dir);
    }
    (state.active_index, false)
}

/// Sweep phase of the baseline policy.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepMode {
    Tracking,
    FullSweep {
        cursor: usize,
        dwell_done: u32,
    },
    LocalSweep {
        lo: usize,
        hi: usize,
        cursor: usize,
        dwell_done: u32,
    },
}

/// Sweeping-baseline state.
#[derive(Debug, Clone)]
pub struct SweepState {
    pub active_index: usize,
    pub mode: SweepMode,
    /// Best SNR seen while tracking; only updated in tracking mode.
    pub max_observed_snr_db: f64,
    /// Best (snr, index) measured during the current sweep episode.
    best_candidate: Option<(f64, usize)>,
    /// Index whose feedback arrives next tick, when it was sweep-emitted.
    pending_measure: Option<usize>,
    /// Skip the trigger right after locking: the in-flight feedback still
    /// belongs to the last sweep candidate.
    just_locked: bool,
}

impl SweepState {
    /// Start in a full-range sweep.
    pub fn new(initial_index: usize) -> Self {
        Self {
            active_index: initial_index,
            mode: SweepMode::FullSweep {
                cursor: 0,
                dwell_done: 0,
            },
            max_observed_snr_db: f64::NEG_INFINITY,
            best_candidate: None,
            pending_measure: None,
            just_locked: false,
        }
    }
}

fn record_candidate(state: &mut SweepState, measured_snr_db: f64) {
    if let Some(idx) = state.pending_measure.take() {
        if state
            .best_candidate
            .is_none_or(|(best, _)| measured_snr_db > best)
        {
            state.best_candidate = Some((measured_snr_db, idx));
        }
    }
}

fn lock_best(state: &mut SweepState) {
    if let Some((snr, idx)) = state.best_candidate.take() {
        state.active_index = idx;
        state.max_observed_snr_db = state.max_observed_snr_db.max(snr);
    }
    state.mode = SweepMode::Tracking;
    state.pending_measure = None;
    state.just_locked = true;
}

/// Advance the sweeping baseline by one tick.
///
/// `measured_snr_db` is the user's feedback for the codeword emitted on
/// the previous tick. Returns the entry to apply now and whether this tick
/// is training overhead (link down).
pub fn sweep_policy_step(
    state: &mut SweepState,
    book: &Codebook,
    measured_snr_db: f64,
    cfg: &SweepConfig,
) -> (usize, bool) {
    record_candidate(state, measured_snr_db);
    loop {
        match state.mode {
            SweepMode::FullSweep { cursor, dwell_done } => {
                if cursor >= book.len() {
                    lock_best(state);
                    continue;
                }
                state.active_index = cursor;
                state.pending_measure = Some(cursor);
                state.mode = if dwell_done + 1 >= cfg.dwell_ticks {
                    SweepMode::FullSweep {
                        cursor: cursor + 1,
                        dwell_done: 0,
                    }
                } else {
                    SweepMode::FullSweep {
                        cursor,
                        dwell_done: dwell_done + 1,
                    }
                };
                return (cursor, true);
            }
            SweepMode::LocalSweep {
                lo,
                hi,
                cursor,
                dwell_done,
            } => {
                if cursor > hi {
                    lock_best(state);
                    continue;
                }
                state.active_index = cursor;
                state.pending_measure = Some(cursor);
                state.mode = if dwell_done + 1 >= cfg.dwell_ticks {
                    SweepMode::LocalSweep {
                        lo,
                        hi,
                        cursor: cursor + 1,
                        dwell_done: 0,
                    }
                } else {
                    SweepMode::LocalSweep {
                        lo,
                        hi,
                        cursor,
                        dwell_done: dwell_done + 1,
                    }
                };
                return (cursor, true);
            }
            SweepMode::Tracking => {
                if state.just_locked {
                    // feedback in flight still belongs to the sweep tail
                    state.just_locked = false;
                    return (state.active_index, false);
                }
                state.max_observed_snr_db = state.max_observed_snr_db.max(measured_snr_db);
                if measured_snr_db < state.max_observed_snr_db - cfg.trigger_drop_db {
                    let lo = state.active_index.saturating_sub(cfg.local_window);
                    let hi = (state.active_index + cfg.local_window).min(book.len() - 1);
                    state.best_candidate = None;
                    state.mode = SweepMode::LocalSweep {
                        lo,
                        hi,
                        cursor: lo,
                        dwell_done: 0,
                    };
                    continue;
                }
                return (state.active_index, false);
            }
        }
    }
}

/// Upper-bound reference: the entry whose pattern is strongest toward the
/// true direction, found by evaluating every entry (ties keep the lower
/// index).
pub fn genie_policy_step(book: &Codebook, true_direction: &Direction) -> usize {
    let mut best = 0;
    let mut best_mag = f64::NEG_INFINITY;
    for (i, entry) in book.entries.iter().enumerate() {
        let mag = entry
            .field_magnitude(&book.geometry, true_direction)
            .expect("codebook entries match their geometry");
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    best
}

/// Fixed reference: always the boresight entry.
pub fn static_policy_step(book: &Codebook) -> usize {
    book.boresight_index()
}

//! C ABI for the ristrack toolkit.
//!
//! The surface is handle-based: codebooks live behind the opaque
//! `RtCodebook` pointer, every call returns an [`RtStatus`] code, and the
//! last failure message is retrievable per thread via [`rt_last_error`].
//! Buffers are always caller-owned; functions that fill one take its
//! capacity and report the written length.
//!
//! The header `include/ristrack.h` is generated by cbindgen at build time.

// validation deliberately uses `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use ristrack::cli::ScenarioConfig;
use ristrack::codebook::{Codebook, CodebookError};
use ristrack::controlplane::{decode_frame, encode_frame, Opcode};
use ristrack::geometry::{Direction, RisGeometry, SPEED_OF_LIGHT};
use ristrack::simulator::{run, trace_to_csv};
use ristrack::wavefield::{pattern_cut, ElementPattern};
use ristrack::IncidentModel;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtStatus {
    RtOk = 0,
    /// A required pointer argument was null.
    RtNullArgument = 1,
    /// Arguments failed validation (ranges, sizes, unknown names).
    RtInvalidArgument = 2,
    /// The computation rejected the inputs (domain error).
    RtDomainError = 3,
    /// A file or frame failed to parse.
    RtParseError = 4,
    /// Filesystem failure.
    RtIoError = 5,
    /// The caller buffer is too small; nothing was written.
    RtBufferTooSmall = 6,
}

/// Incident-model selector for [`rt_codebook_generate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtIncidentKind {
    /// Boresight feed at `d_feed_m`; spherical wavefront.
    RtIncidentNear = 0,
    /// Plane wave from (`theta_tx_deg`, `phi_tx_deg`).
    RtIncidentFar = 1,
}

/// Incident-wave description; the fields not selected by `kind` are ignored.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtIncident {
    pub kind: RtIncidentKind,
    pub d_feed_m: f64,
    pub theta_tx_deg: f64,
    pub phi_tx_deg: f64,
}

/// Opaque codebook handle; create with `rt_codebook_generate` or
/// `rt_codebook_load`, release with `rt_codebook_free`.
pub struct RtCodebook {
    _private: core::marker::PhantomData<u8>,
}

struct Handle {
    book: Codebook,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes stripped");
    });
}

fn fail(status: RtStatus, message: &str) -> RtStatus {
    set_error(message);
    status
}

/// Copy the last error message of this thread into `buf` (NUL-terminated).
/// Returns the number of bytes written including the terminator, or the
/// required size when `buf` is null or too small.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn rt_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if buf.is_null() || cap < bytes.len() {
            return bytes.len();
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), bytes.len());
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn handle_ref<'a>(book: *const RtCodebook) -> Option<&'a Handle> {
    (book as *const Handle).as_ref()
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, RtStatus> {
    if ptr.is_null() {
        return Err(fail(RtStatus::RtNullArgument, "string argument is null"));
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        fail(
            RtStatus::RtInvalidArgument,
            &format!("string is not UTF-8: {e}"),
        )
    })
}

fn map_codebook_error(e: &CodebookError) -> RtStatus {
    match e {
        CodebookError::Parse(_) | CodebookError::Format { .. } => RtStatus::RtParseError,
        CodebookError::Io(_) => RtStatus::RtIoError,
        _ => RtStatus::RtDomainError,
    }
}

/// Synthesize a codebook over a pitch/azimuth lattice (degrees).
///
/// # Safety
/// `incident`, the two axis arrays, and `out` must be valid for the given
/// lengths; `out` receives an owned handle on success.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_generate(
    rows: u32,
    cols: u32,
    spacing_over_lambda: f64,
    freq_hz: f64,
    incident: *const RtIncident,
    theta_deg: *const f64,
    theta_len: usize,
    phi_deg: *const f64,
    phi_len: usize,
    out: *mut *mut RtCodebook,
) -> RtStatus {
    if out.is_null() {
        return fail(RtStatus::RtNullArgument, "out handle pointer is null");
    }
    let Some(incident) = incident.as_ref() else {
        return fail(RtStatus::RtNullArgument, "incident pointer is null");
    };
    let (Some(theta), Some(phi)) = (slice_arg(theta_deg, theta_len), slice_arg(phi_deg, phi_len))
    else {
        return fail(RtStatus::RtNullArgument, "axis pointer is null");
    };
    if !(freq_hz > 0.0) {
        return fail(RtStatus::RtInvalidArgument, "freq_hz must be positive");
    }
    let wavelength = SPEED_OF_LIGHT / freq_hz;
    let geom = match RisGeometry::new(
        rows as usize,
        cols as usize,
        spacing_over_lambda * wavelength,
        wavelength,
    ) {
        Ok(g) => g,
        Err(e) => return fail(RtStatus::RtInvalidArgument, &e.to_string()),
    };
    let model = match incident.kind {
        RtIncidentKind::RtIncidentNear => {
            if !(incident.d_feed_m > 0.0) {
                return fail(RtStatus::RtInvalidArgument, "d_feed_m must be positive");
            }
            IncidentModel::NearFieldFeed {
                feed_distance: incident.d_feed_m,
            }
        }
        RtIncidentKind::RtIncidentFar => IncidentModel::FarFieldPlane {
            tx_direction: Direction::from_degrees(incident.theta_tx_deg, incident.phi_tx_deg),
        },
    };
    match ristrack::codebook::generate_codebook(&geom, &model, theta, phi) {
        Ok(book) => {
            *out = Box::into_raw(Box::new(Handle { book })).cast::<RtCodebook>();
            RtStatus::RtOk
        }
        Err(e) => fail(map_codebook_error(&e), &e.to_string()),
    }
}

/// Load a codebook file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_load(
    path: *const c_char,
    out: *mut *mut RtCodebook,
) -> RtStatus {
    if out.is_null() {
        return fail(RtStatus::RtNullArgument, "out handle pointer is null");
    }
    let path = match cstr_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match Codebook::load(Path::new(path)) {
        Ok(book) => {
            *out = Box::into_raw(Box::new(Handle { book })).cast::<RtCodebook>();
            RtStatus::RtOk
        }
        Err(e) => fail(map_codebook_error(&e), &e.to_string()),
    }
}

/// Write a codebook file.
///
/// # Safety
/// `book` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_save(
    book: *const RtCodebook,
    path: *const c_char,
) -> RtStatus {
    let Some(handle) = handle_ref(book) else {
        return fail(RtStatus::RtNullArgument, "codebook handle is null");
    };
    let path = match cstr_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match handle.book.save(Path::new(path)) {
        Ok(()) => RtStatus::RtOk,
        Err(e) => fail(map_codebook_error(&e), &e.to_string()),
    }
}

/// Number of entries, or 0 for a null handle.
///
/// # Safety
/// `book` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_len(book: *const RtCodebook) -> usize {
    handle_ref(book).map_or(0, |h| h.book.len())
}

/// Panel dimensions of the codebook.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_dims(
    book: *const RtCodebook,
    out_rows: *mut usize,
    out_cols: *mut usize,
) -> RtStatus {
    let Some(handle) = handle_ref(book) else {
        return fail(RtStatus::RtNullArgument, "codebook handle is null");
    };
    if out_rows.is_null() || out_cols.is_null() {
        return fail(RtStatus::RtNullArgument, "output pointer is null");
    }
    *out_rows = handle.book.geometry.rows;
    *out_cols = handle.book.geometry.cols;
    RtStatus::RtOk
}

/// Index of the entry nearest to a direction (degrees), great-circle
/// metric, ties to the lower index.
///
/// # Safety
/// `book` and `out_index` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_nearest(
    book: *const RtCodebook,
    theta_deg: f64,
    phi_deg: f64,
    out_index: *mut usize,
) -> RtStatus {
    let Some(handle) = handle_ref(book) else {
        return fail(RtStatus::RtNullArgument, "codebook handle is null");
    };
    if out_index.is_null() {
        return fail(RtStatus::RtNullArgument, "out_index is null");
    }
    let estimate = Direction::from_degrees(theta_deg, phi_deg);
    *out_index = handle.book.nearest_codeword(&estimate).0;
    RtStatus::RtOk
}

/// Desired direction of an entry, in degrees.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_entry_desired(
    book: *const RtCodebook,
    index: usize,
    out_theta_deg: *mut f64,
    out_phi_deg: *mut f64,
) -> RtStatus {
    let Some(handle) = handle_ref(book) else {
        return fail(RtStatus::RtNullArgument, "codebook handle is null");
    };
    if out_theta_deg.is_null() || out_phi_deg.is_null() {
        return fail(RtStatus::RtNullArgument, "output pointer is null");
    }
    let Some(entry) = handle.book.entries.get(index) else {
        return fail(
            RtStatus::RtInvalidArgument,
            &format!(
                "entry {index} outside the {}-entry codebook",
                handle.book.len()
            ),
        );
    };
    *out_theta_deg = entry.desired.theta.to_degrees();
    *out_phi_deg = entry.desired.phi.to_degrees();
    RtStatus::RtOk
}

/// Copy an entry's bits row-major into `out_bits` as 0/1 bytes.
/// `out_written` receives rows*cols.
///
/// # Safety
/// `out_bits` must be valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_entry_bits(
    book: *const RtCodebook,
    index: usize,
    out_bits: *mut u8,
    cap: usize,
    out_written: *mut usize,
) -> RtStatus {
    let Some(handle) = handle_ref(book) else {
        return fail(RtStatus::RtNullArgument, "codebook handle is null");
    };
    if out_bits.is_null() || out_written.is_null() {
        return fail(RtStatus::RtNullArgument, "output pointer is null");
    }
    let Some(entry) = handle.book.entries.get(index) else {
        return fail(
            RtStatus::RtInvalidArgument,
            &format!(
                "entry {index} outside the {}-entry codebook",
                handle.book.len()
            ),
        );
    };
    if cap < entry.bits.len() {
        return fail(
            RtStatus::RtBufferTooSmall,
            &format!("need {} bytes, buffer holds {cap}", entry.bits.len()),
        );
    }
    for (i, &bit) in entry.bits.iter().enumerate() {
        *out_bits.add(i) = u8::from(bit);
    }
    *out_written = entry.bits.len();
    RtStatus::RtOk
}

/// Release a codebook handle; a null pointer is a no-op.
///
/// # Safety
/// `book` must be null or a handle obtained from this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn rt_codebook_free(book: *mut RtCodebook) {
    if !book.is_null() {
        drop(Box::from_raw(book as *mut Handle));
    }
}

/// Peak-normalized azimuth cut of one entry at fixed pitch: fills
/// `out_gain_db` (one value per `phi_deg` sample, 0 dB at the cut peak).
///
/// # Safety
/// `phi_deg` and `out_gain_db` must be valid for `len` values.
#[no_mangle]
pub unsafe extern "C" fn rt_pattern_gain_db(
    book: *const RtCodebook,
    index: usize,
    theta_deg: f64,
    phi_deg: *const f64,
    len: usize,
    out_gain_db: *mut f64,
) -> RtStatus {
    let Some(handle) = handle_ref(book) else {
        return fail(RtStatus::RtNullArgument, "codebook handle is null");
    };
    let Some(axis_deg) = slice_arg(phi_deg, len) else {
        return fail(RtStatus::RtNullArgument, "phi axis pointer is null");
    };
    if out_gain_db.is_null() {
        return fail(RtStatus::RtNullArgument, "out_gain_db is null");
    }
    let Some(entry) = handle.book.entries.get(index) else {
        return fail(
            RtStatus::RtInvalidArgument,
            &format!(
                "entry {index} outside the {}-entry codebook",
                handle.book.len()
            ),
        );
    };
    let states = match entry.element_states(&handle.book.geometry) {
        Ok(s) => s,
        Err(e) => return fail(RtStatus::RtDomainError, &e.to_string()),
    };
    let axis: Vec<f64> = axis_deg.iter().map(|d| d.to_radians()).collect();
    match pattern_cut(
        &handle.book.geometry,
        &states,
        &ElementPattern::ISOTROPIC,
        theta_deg.to_radians(),
        &axis,
    ) {
        Ok(cut) => {
            for (i, g) in cut.gain_db.iter().enumerate() {
                *out_gain_db.add(i) = *g;
            }
            RtStatus::RtOk
        }
        Err(e) => fail(RtStatus::RtDomainError, &e.to_string()),
    }
}

/// Encode a control frame. Opcodes: 1 index, 2 dynamic, 3 download.
///
/// # Safety
/// `payload` must be valid for `payload_len` bytes, `out` for `cap`.
#[no_mangle]
pub unsafe extern "C" fn rt_frame_encode(
    opcode: u8,
    payload: *const u8,
    payload_len: usize,
    out: *mut u8,
    cap: usize,
    out_written: *mut usize,
) -> RtStatus {
    let Some(payload) = slice_arg(payload, payload_len) else {
        return fail(RtStatus::RtNullArgument, "payload pointer is null");
    };
    if out.is_null() || out_written.is_null() {
        return fail(RtStatus::RtNullArgument, "output pointer is null");
    }
    let opcode = match Opcode::from_byte(opcode) {
        Ok(op) => op,
        Err(e) => return fail(RtStatus::RtInvalidArgument, &e.to_string()),
    };
    match encode_frame(opcode, payload) {
        Ok(frame) => {
            if cap < frame.len() {
                return fail(
                    RtStatus::RtBufferTooSmall,
                    &format!("need {} bytes, buffer holds {cap}", frame.len()),
                );
            }
            std::ptr::copy_nonoverlapping(frame.as_ptr(), out, frame.len());
            *out_written = frame.len();
            RtStatus::RtOk
        }
        Err(e) => fail(RtStatus::RtInvalidArgument, &e.to_string()),
    }
}

/// Decode and verify a control frame; fills the opcode byte and copies the
/// payload.
///
/// # Safety
/// `bytes` must be valid for `len`, `out_payload` for `cap`.
#[no_mangle]
pub unsafe extern "C" fn rt_frame_decode(
    bytes: *const u8,
    len: usize,
    out_opcode: *mut u8,
    out_payload: *mut u8,
    cap: usize,
    out_written: *mut usize,
) -> RtStatus {
    let Some(bytes) = slice_arg(bytes, len) else {
        return fail(RtStatus::RtNullArgument, "frame pointer is null");
    };
    if out_opcode.is_null() || out_payload.is_null() || out_written.is_null() {
        return fail(RtStatus::RtNullArgument, "output pointer is null");
    }
    match decode_frame(bytes) {
        Ok(frame) => {
            if cap < frame.payload.len() {
                return fail(
                    RtStatus::RtBufferTooSmall,
                    &format!("need {} bytes, buffer holds {cap}", frame.payload.len()),
                );
            }
            *out_opcode = frame.opcode as u8;
            std::ptr::copy_nonoverlapping(frame.payload.as_ptr(), out_payload, frame.payload.len());
            *out_written = frame.payload.len();
            RtStatus::RtOk
        }
        Err(e) => fail(RtStatus::RtParseError, &e.to_string()),
    }
}

/// Run a scenario described by the JSON config schema of the CLI and write
/// the per-tick trace CSV to `csv_path`.
///
/// # Safety
/// Both strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rt_simulate_csv(
    config_json: *const c_char,
    csv_path: *const c_char,
) -> RtStatus {
    let config = match cstr_arg(config_json) {
        Ok(c) => c,
        Err(status) => return status,
    };
    let csv_path = match cstr_arg(csv_path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let parsed: ScenarioConfig = match serde_json::from_str(config) {
        Ok(p) => p,
        Err(e) => return fail(RtStatus::RtParseError, &format!("scenario config: {e}")),
    };
    let scenario = match parsed.build(None) {
        Ok(s) => s,
        Err(e) => return fail(RtStatus::RtInvalidArgument, e.message()),
    };
    let trace = match run(&scenario) {
        Ok(t) => t,
        Err(e) => return fail(RtStatus::RtDomainError, &e.to_string()),
    };
    match std::fs::write(csv_path, trace_to_csv(&trace)) {
        Ok(()) => RtStatus::RtOk,
        Err(e) => fail(
            RtStatus::RtIoError,
            &format!("cannot write {csv_path}: {e}"),
        ),
    }
}

//! Byte-level emulator of the panel control board: frame codec, the three
//! operating modes, the master/slave codeword split, and refresh-latency
//! accounting.
//!
//! Wire format (normative for this toolkit):
//!
//! ```text
//! ,------+--------+--------------+---------+-----,
//! | SOF  | OPCODE | LENGTH (u16) | PAYLOAD | CRC |
//! | 0xA5 | 1 byte | big-endian   | ...     | 1 B |
//! '------+--------+--------------+---------+-----'
//! ```
//!
//! The CRC is CRC-8 (polynomial 0x07, init 0, no reflection) over opcode,
//! length, and payload. Opcodes: 0x01 selects a flash codeword by index,
//! 0x02 loads one codeword directly, 0x03 rewrites the flash codebook.
//!
//! The board drives a fixed 20x20 panel: 400 bits per codeword, packed
//! row-major (row 1 first, column 1 leftmost, most significant bit first),
//! 50 bytes per codeword. The master chip owns rows 1-10, the slave chip
//! rows 11-20.

use thiserror::Error;

/// Start-of-frame marker.
pub const SOF: u8 = 0xA5;

/// Panel rows driven by the board.
pub const PANEL_ROWS: usize = 20;
/// Panel columns driven by the board.
pub const PANEL_COLS: usize = 20;
/// Bits per codeword (one per element).
pub const CODEWORD_BITS: usize = PANEL_ROWS * PANEL_COLS;
/// Bytes per packed codeword.
pub const CODEWORD_BYTES: usize = CODEWORD_BITS / 8;
/// Bits shipped to the slave chip on a refresh (rows 11-20).
pub const SLAVE_BITS: usize = CODEWORD_BITS / 2;

#[derive(Debug, Error, PartialEq)]
pub enum FrameError {
    #[error("bad start-of-frame byte 0x{got:02X}")]
    BadSof { got: u8 },
    #[error("length field says {declared} payload bytes, frame carries {actual}")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("crc mismatch: computed 0x{computed:02X}, frame carries 0x{carried:02X}")]
    CrcMismatch { computed: u8, carried: u8 },
    #[error("unknown opcode 0x{0:02X}")]
    UnknownOpcode(u8),
    #[error("{mode} payload must be {want} bytes, got {got}")]
    PayloadSize {
        mode: &'static str,
        want: usize,
        got: usize,
    },
    #[error("codeword index {index} outside flash of {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("download of {count} codewords exceeds flash capacity {capacity}")]
    FlashOverflow { count: usize, capacity: usize },
    #[error("payload of {0} bytes does not fit the 16-bit length field")]
    PayloadTooLarge(usize),
}

/// Operating-mode opcodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Opcode {
    /// Switch to a pre-downloaded codeword by index.
    Index = 0x01,
    /// Load one codeword directly into the active register.
    Dynamic = 0x02,
    /// Rewrite the flash codebook.
    Download = 0x03,
}

impl Opcode {
    pub fn from_byte(b: u8) -> Result<Self, FrameError> {
        match b {
            0x01 => Ok(Opcode::Index),
            0x02 => Ok(Opcode::Dynamic),
            0x03 => Ok(Opcode::Download),
            other => Err(FrameError::UnknownOpcode(other)),
        }
    }
}

/// Decoded control message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlFrame {
    pub opcode: Opcode,
    pub payload: Vec<u8>,
}

/// CRC-8, polynomial 0x07, init 0x00, no reflection, no final xor.
pub fn crc8(data: &[u8]) -> u8 {
    let mut crc: u8 = 0;
    for &byte in data {
        crc ^= byte;
        for _ in 0..8 {
            crc = if crc & 0x80 != 0 {
                (crc << 1) ^ 0x07
            } else {
                crc << 1
            };
        }
    }
    crc
}

/// Serialize a frame.
pub fn encode_frame(opcode: Opcode, payload: &[u8]) -> Result<Vec<u8>, FrameError> {
    if payload.len() > u16::MAX as usize {
        return Err(FrameError::PayloadTooLarge(payload.len()));
    }
    let mut out = Vec::with_capacity(payload.len() + 5);
    out.push(SOF);
    out.push(opcode as u8);
    out.extend_from_slice(&(payload.len() as u16).to_be_bytes());
    out.extend_from_slice(payload);
    out.push(crc8(&out[1..]));
    Ok(out)
}

/// Parse and verify a frame. Structural checks run first (SOF, length),
/// then the CRC, then the opcode, so every error stays distinguishable.
pub fn decode_frame(bytes: &[u8]) -> Result<ControlFrame, FrameError> {
    if bytes.is_empty() || bytes[0] != SOF {
        return Err(FrameError::BadSof {
            got: bytes.first().copied().unwrap_or(0),
        });
    }
    if bytes.len() < 5 {
        return Err(FrameError::LengthMismatch {
            declared: 0,
            actual: bytes.len(),
        });
    }
    let declared = u16::from_be_bytes([bytes[2], bytes[3]]) as usize;
    let actual = bytes.len() - 5;
    if declared != actual {
        return Err(FrameError::LengthMismatch { declared, actual });
    }
    let carried = bytes[bytes.len() - 1];
    let computed = crc8(&bytes[1..bytes.len() - 1]);
    if computed != carried {
        return Err(FrameError::CrcMismatch { computed, carried });
    }
    let opcode = Opcode::from_byte(bytes[1])?;
    Ok(ControlFrame {
        opcode,
        payload: bytes[4..bytes.len() - 1].to_vec(),
    })
}

/// Transfer-speed constants of the emulated board.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel {
    /// External serial link speed in bits/s.
    pub serial_baud: f64,
    /// Wire bits per payload byte on the serial link (8N1 framing).
    pub wire_bits_per_byte: f64,
    /// Parallel bus width between the two chips.
    pub interchip_bits_per_clock: u32,
    /// Parallel bus clock in Hz.
    pub interchip_clock_hz: f64,
    /// Settle time from the last transfer to a refreshed panel, seconds.
    pub refresh_settle_s: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self {
            serial_baud: 115_200.0,
            wire_bits_per_byte: 10.0,
            interchip_bits_per_clock: 16,
            interchip_clock_hz: 1e8,
            refresh_settle_s: 85e-6,
        }
    }
}

impl TimingModel {
    /// Peak inter-chip throughput in bits/s.
    pub fn interchip_peak_bps(&self) -> f64 {
        self.interchip_bits_per_clock as f64 * self.interchip_clock_hz
    }

    /// End-to-end refresh latency for a frame of `frame_bytes`: serial
    /// transfer of the whole frame, slave-half transfer over the parallel
    /// bus, then the settle time.
    pub fn refresh_latency_s(&self, frame_bytes: usize) -> f64 {
        let serial = frame_bytes as f64 * self.wire_bits_per_byte / self.serial_baud;
        let interchip =
            SLAVE_BITS as f64 / self.interchip_bits_per_clock as f64 / self.interchip_clock_hz;
        serial + interchip + self.refresh_settle_s
    }
}

/// Board registers: the flash codebook and the live 400-bit register.
#[derive(Debug, Clone, PartialEq)]
pub struct BoardState {
    pub flash: Vec<[bool; CODEWORD_BITS]>,
    pub active_bits: [bool; CODEWORD_BITS],
    pub flash_capacity: usize,
    pub last_refresh_latency_s: f64,
}

impl Default for BoardState {
    fn default() -> Self {
        Self {
            flash: Vec::new(),
            active_bits: [false; CODEWORD_BITS],
            flash_capacity: 256,
            last_refresh_latency_s: 0.0,
        }
    }
}

/// Pack 400 row-major bits into 50 bytes, most significant bit first.
pub fn pack_bits(bits: &[bool; CODEWORD_BITS]) -> [u8; CODEWORD_BYTES] {
    let mut out = [0u8; CODEWORD_BYTES];
    for (k, &bit) in bits.iter().enumerate() {
        if bit {
            out[k / 8] |= 1 << (7 - (k % 8));
        }
    }
    out
}

/// Inverse of [`pack_bits`].
pub fn unpack_bits(bytes: &[u8]) -> [bool; CODEWORD_BITS] {
    let mut out = [false; CODEWORD_BITS];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = bytes[k / 8] & (1 << (7 - (k % 8))) != 0;
    }
    out
}

/// Master half (rows 1-10) and slave half (rows 11-20) of a codeword.
pub fn split_master_slave(
    bits: &[bool; CODEWORD_BITS],
) -> ([bool; SLAVE_BITS], [bool; SLAVE_BITS]) {
    let mut master = [false; SLAVE_BITS];
    let mut slave = [false; SLAVE_BITS];
    master.copy_from_slice(&bits[..SLAVE_BITS]);
    slave.copy_from_slice(&bits[SLAVE_BITS..]);
    (master, slave)
}

/// Concatenate the two halves back into a full codeword.
pub fn join_master_slave(
    master: &[bool; SLAVE_BITS],
    slave: &[bool; SLAVE_BITS],
) -> [bool; CODEWORD_BITS] {
    let mut out = [false; CODEWORD_BITS];
    out[..SLAVE_BITS].copy_from_slice(master);
    out[SLAVE_BITS..].copy_from_slice(slave);
    out
}

impl BoardState {
    /// Apply a decoded frame: mutate the registers and account the refresh
    /// latency of its wire image.
    pub fn apply_frame(
        &mut self,
        frame: &ControlFrame,
        timing: &TimingModel,
    ) -> Result<f64, FrameError> {
        match frame.opcode {
            Opcode::Index => {
                if frame.payload.len() != 2 {
                    return Err(FrameError::PayloadSize {
                        mode: "index",
                        want: 2,
                        got: frame.payload.len(),
                    });
                }
                let index = u16::from_be_bytes([frame.payload[0], frame.payload[1]]) as usize;
                if index >= self.flash.len() {
                    return Err(FrameError::IndexOutOfRange {
                        index,
                        len: self.flash.len(),
                    });
                }
                self.active_bits = self.flash[index];
            }
            Opcode::Dynamic => {
                if frame.payload.len() != CODEWORD_BYTES {
                    return Err(FrameError::PayloadSize {
                        mode: "dynamic",
                        want: CODEWORD_BYTES,
                        got: frame.payload.len(),
                    });
                }
                self.active_bits = unpack_bits(&frame.payload);
            }
            Opcode::Download => {
                if frame.payload.len() < 2 {
                    return Err(FrameError::PayloadSize {
                        mode: "download",
                        want: 2,
                        got: frame.payload.len(),
                    });
                }
                let count = u16::from_be_bytes([frame.payload[0], frame.payload[1]]) as usize;
                let want = 2 + count * CODEWORD_BYTES;
                if frame.payload.len() != want {
                    return Err(FrameError::PayloadSize {
                        mode: "download",
                        want,
                        got: frame.payload.len(),
                    });
                }
                if count > self.flash_capacity {
                    return Err(FrameError::FlashOverflow {
                        count,
                        capacity: self.flash_capacity,
                    });
                }
                self.flash = (0..count)
                    .map(|i| {
                        let start = 2 + i * CODEWORD_BYTES;
                        unpack_bits(&frame.payload[start..start + CODEWORD_BYTES])
                    })
                    .collect();
            }
        }
        let wire_len = frame.payload.len() + 5;
        let latency = timing.refresh_latency_s(wire_len);
        self.last_refresh_latency_s = latency;
        Ok(latency)
    }
}

/// Payload for an index-select frame.
pub fn index_payload(index: u16) -> Vec<u8> {
    index.to_be_bytes().to_vec()
}

/// Payload carrying a whole codebook for the download mode.
pub fn download_payload(codewords: &[[bool; CODEWORD_BITS]]) -> Vec<u8> {
    let mut payload = Vec::with_capacity(2 + codewords.len() * CODEWORD_BYTES);
    payload.extend_from_slice(&(codewords.len() as u16).to_be_bytes());
    for cw in codewords {
        payload.extend_from_slice(&pack_bits(cw));
    }
    payload
}

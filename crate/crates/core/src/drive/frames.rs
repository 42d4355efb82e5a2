use std::fmt::Write as _;

use super::{DriveConfig, DriveError, DriveFrame};
use crate::trajectory::sig9;

pub const MAGIC: [u8; 4] = *b"HXG1";
pub const HEADER_BYTES: usize = 16;
pub const FRAME_BYTES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameHeader {
    pub dac_bits: u16,
    /// Hz
    pub sample_rate: f64,
}

/// Binary frame stream, all little-endian.
///
/// Header: magic `HXG1`, `u16` DAC bits, `u16` reserved (zero), `f64` sample
/// rate. Then per frame: `f64` time followed by six `u16` DAC codes.
pub fn write_frame_file(frames: &[DriveFrame], header: &FrameHeader) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + FRAME_BYTES * frames.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&header.dac_bits.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&header.sample_rate.to_le_bytes());
    for f in frames {
        out.extend_from_slice(&f.t.to_le_bytes());
        for c in f.dac_code {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

pub fn read_frame_file(bytes: &[u8], cfg: &DriveConfig) -> Result<(FrameHeader, Vec<DriveFrame>), DriveError> {
    let bad = |m: String| DriveError::Format(m);
    if bytes.len() < HEADER_BYTES || bytes[..4] != MAGIC {
        return Err(bad("missing HXG1 header".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let header = FrameHeader {
        dac_bits: u16_at(4),
        sample_rate: f64_at(8),
    };
    if u32::from(header.dac_bits) != cfg.dac_bits {
        return Err(bad(format!(
            "file holds {}-bit codes, configuration expects {}",
            header.dac_bits, cfg.dac_bits
        )));
    }
    let body = &bytes[HEADER_BYTES..];
    if !body.len().is_multiple_of(FRAME_BYTES) {
        return Err(bad(format!("{} trailing bytes", body.len() % FRAME_BYTES)));
    }
    let mut frames = Vec::with_capacity(body.len() / FRAME_BYTES);
    for k in 0..body.len() / FRAME_BYTES {
        let start = HEADER_BYTES + k * FRAME_BYTES;
        let t = f64_at(start);
        let codes: [u16; 6] = std::array::from_fn(|i| u16_at(start + 8 + 2 * i));
        if let Some(c) = codes.iter().find(|c| **c > cfg.max_code()) {
            return Err(bad(format!("frame {k}: code {c} exceeds {} bits", cfg.dac_bits)));
        }
        frames.push(DriveFrame::from_codes(t, codes, cfg));
    }
    Ok((header, frames))
}

/// Readable twin of the binary stream: time, the six codes and the six
/// driver voltages per row.
pub fn write_frame_csv(frames: &[DriveFrame]) -> String {
    let mut out = String::from("t,code1,code2,code3,code4,code5,code6,volt1,volt2,volt3,volt4,volt5,volt6\n");
    for f in frames {
        out.push_str(&sig9(f.t));
        for c in f.dac_code {
            let _ = write!(out, ",{c}");
        }
        for v in f.driver_voltage {
            let v = if v == 0.0 { 0.0 } else { v };
            let _ = write!(out, ",{v:.6}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_bit_exact() {
        let cfg = DriveConfig::default();
        let frames = [
            DriveFrame::from_codes(0.0, [2048, 0, 4095, 1, 2, 3], &cfg),
            DriveFrame::from_codes(0.001, [2048; 6], &cfg),
        ];
        let bytes = write_frame_file(
            &frames,
            &FrameHeader {
                dac_bits: 12,
                sample_rate: 1000.0,
            },
        );
        assert_eq!(bytes.len(), HEADER_BYTES + 2 * FRAME_BYTES);
        assert_eq!(&bytes[..16], &[b'H', b'X', b'G', b'1', 12, 0, 0, 0, 0, 0, 0, 0, 0, 0x40, 0x8f, 0x40]);
        assert_eq!(&bytes[16..24], &[0; 8]);
        assert_eq!(&bytes[24..36], &[0x00, 0x08, 0, 0, 0xff, 0x0f, 1, 0, 2, 0, 3, 0]);
        let (header, back) = read_frame_file(&bytes, &cfg).unwrap();
        assert_eq!(header.sample_rate, 1000.0);
        assert_eq!(back, frames);
    }

    #[test]
    fn rejects_foreign_or_truncated_files() {
        let cfg = DriveConfig::default();
        assert!(read_frame_file(b"nope", &cfg).is_err());
        let header = FrameHeader {
            dac_bits: 12,
            sample_rate: 1000.0,
        };
        let mut bytes = write_frame_file(&[DriveFrame::from_codes(0.0, [1; 6], &cfg)], &header);
        bytes.pop();
        assert!(read_frame_file(&bytes, &cfg).is_err());
        let wide = write_frame_file(&[DriveFrame::from_codes(0.0, [5000; 6], &cfg)], &header);
        assert!(read_frame_file(&wide, &cfg).is_err());
        let other_bits = DriveConfig {
            dac_bits: 16,
            ..cfg
        };
        assert!(read_frame_file(&wide, &other_bits).is_err());
    }

    #[test]
    fn csv_twin() {
        let cfg = DriveConfig::default();
        let text = write_frame_csv(&[DriveFrame::from_codes(0.5, [4095, 0, 2048, 2048, 2048, 2048], &cfg)]);
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("5.00000000e-1,4095,0,2048,2048,2048,2048,10.000000,-10.000000,0.002442,"));
    }
}

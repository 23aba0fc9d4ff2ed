//! Bit-exact binary formats: `.srt` sparse radar tensors and `.rt4` raw
//! dense dumps.
//!
//! Both formats are little-endian fixed layouts so files are deterministic
//! byte-for-byte and cheap to load.
//!
//! `.srt` layout (80-byte header, then 10-byte records):
//!
//! ```text
//! offset  size  field
//! 0       6     magic "4DSRT\0"
//! 6       2     version (u16, = 1)
//! 8       24    roi min x,y,z (3 x f64, meters)
//! 32      24    roi max x,y,z (3 x f64, meters)
//! 56      8     voxel edge (f64, meters)
//! 64      8     density percent (f64)
//! 72      8     source valid voxel count (u64)
//! 80      10n   records: ix, iy, iz (u16 each), power (f32)
//! ```
//!
//! The record count is fixed by the header: `min(ceil(density/100 * valid),
//! valid)`, so total size is exactly `80 + 10 * element_count`. Records are
//! sorted ascending by linear voxel index.
//!
//! `.rt4` layout: magic "4DRT\0\0", version u16, then for each of the four
//! axes (doppler, range, azimuth, elevation) a `count: u64, start: f64,
//! step: f64` triple, then `product(counts)` row-major f32 power values.

use std::io::{Read, Write};

use crate::error::{Error, FormatError, Result};
use crate::grid::{AxisSpec, CartesianRoi, DenseTensor, PolarGrid4D};
use crate::pool::{element_count_for, SparseRadarTensor, SrtElement};

pub const SRT_MAGIC: &[u8; 6] = b"4DSRT\0";
pub const SRT_VERSION: u16 = 1;
pub const SRT_HEADER_LEN: u64 = 80;
pub const SRT_RECORD_LEN: u64 = 10;

pub const RT4_MAGIC: &[u8; 6] = b"4DRT\0\0";
pub const RT4_VERSION: u16 = 1;
pub const RT4_HEADER_LEN: u64 = 104;

/// Serialized size of a sparse tensor with `element_count` records.
pub fn srt_file_size(element_count: u64) -> u64 {
    SRT_HEADER_LEN + SRT_RECORD_LEN * element_count
}

/// Write a sparse radar tensor; returns the byte count.
pub fn write_srt<W: Write>(t: &SparseRadarTensor, sink: &mut W) -> Result<u64> {
    let counts = t.roi().voxel_count();
    for &count in &counts {
        if count > u16::MAX as usize {
            return Err(FormatError::AxisOverflow { count }.into());
        }
    }
    sink.write_all(SRT_MAGIC)?;
    sink.write_all(&SRT_VERSION.to_le_bytes())?;
    for v in t.roi().min() {
        sink.write_all(&v.to_le_bytes())?;
    }
    for v in t.roi().max() {
        sink.write_all(&v.to_le_bytes())?;
    }
    sink.write_all(&t.roi().voxel().to_le_bytes())?;
    sink.write_all(&t.density_percent().to_le_bytes())?;
    sink.write_all(&t.source_valid_count().to_le_bytes())?;
    for el in t.elements() {
        sink.write_all(&(el.ix as u16).to_le_bytes())?;
        sink.write_all(&(el.iy as u16).to_le_bytes())?;
        sink.write_all(&(el.iz as u16).to_le_bytes())?;
        sink.write_all(&el.power.to_le_bytes())?;
    }
    Ok(srt_file_size(t.elements().len() as u64))
}

/// Read until `buf` is full; on EOF report how many more bytes were needed.
fn read_exact_or_truncated<R: Read>(source: &mut R, buf: &mut [u8]) -> Result<()> {
    let mut filled = 0usize;
    while filled < buf.len() {
        match source.read(&mut buf[filled..]) {
            Ok(0) => {
                return Err(FormatError::Truncated {
                    expected: (buf.len() - filled) as u64,
                    actual: filled as u64,
                }
                .into())
            }
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn f64_at(buf: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(buf[offset..offset + 8].try_into().unwrap())
}

/// Parse a sparse radar tensor. Malformed input yields structured errors,
/// never a panic, and allocations are bounded by bytes actually read.
pub fn read_srt<R: Read>(source: &mut R) -> Result<SparseRadarTensor> {
    let mut header = [0u8; SRT_HEADER_LEN as usize];
    read_exact_or_truncated(source, &mut header)?;
    if &header[0..6] != SRT_MAGIC {
        return Err(FormatError::BadMagic { expected: ".srt" }.into());
    }
    let version = u16::from_le_bytes(header[6..8].try_into().unwrap());
    if version != SRT_VERSION {
        return Err(FormatError::UnsupportedVersion {
            found: version,
            expected: SRT_VERSION,
        }
        .into());
    }
    let min = [f64_at(&header, 8), f64_at(&header, 16), f64_at(&header, 24)];
    let max = [f64_at(&header, 32), f64_at(&header, 40), f64_at(&header, 48)];
    let voxel = f64_at(&header, 56);
    let density = f64_at(&header, 64);
    let valid_count = u64::from_le_bytes(header[72..80].try_into().unwrap());

    let roi = CartesianRoi::new(min, max, voxel)
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    let counts = roi.voxel_count();
    for &count in &counts {
        if count > u16::MAX as usize {
            return Err(FormatError::AxisOverflow { count }.into());
        }
    }
    if !(density.is_finite() && density > 0.0 && density <= 100.0) {
        return Err(FormatError::InvalidHeader(format!(
            "density {density} not in (0, 100]"
        ))
        .into());
    }
    if valid_count == 0 {
        return Err(FormatError::InvalidHeader("source valid count is zero".into()).into());
    }

    let element_count = element_count_for(density, valid_count);
    // Grow as records actually arrive; a lying header cannot force a huge
    // up-front allocation.
    let mut elements: Vec<SrtElement> =
        Vec::with_capacity((element_count as usize).min(1 << 16));
    let mut prev: Option<usize> = None;
    let mut record = [0u8; SRT_RECORD_LEN as usize];
    for n in 0..element_count {
        read_exact_or_truncated(source, &mut record).map_err(|e| match e {
            Error::Format(FormatError::Truncated { expected, actual }) => {
                // Saturating: a lying header can claim astronomically many
                // records, and the error must still report a sane total.
                Error::Format(FormatError::Truncated {
                    expected: (element_count - n - 1)
                        .saturating_mul(SRT_RECORD_LEN)
                        .saturating_add(expected),
                    actual: SRT_HEADER_LEN + n * SRT_RECORD_LEN + actual,
                })
            }
            other => other,
        })?;
        let ix = u16::from_le_bytes(record[0..2].try_into().unwrap()) as u32;
        let iy = u16::from_le_bytes(record[2..4].try_into().unwrap()) as u32;
        let iz = u16::from_le_bytes(record[4..6].try_into().unwrap()) as u32;
        let power = f32::from_le_bytes(record[6..10].try_into().unwrap());
        let idx = [ix as usize, iy as usize, iz as usize];
        if idx.iter().zip(&counts).any(|(i, c)| i >= c) {
            return Err(FormatError::RecordOutOfRange {
                record: n,
                index: [ix, iy, iz],
                counts,
            }
            .into());
        }
        if !(power.is_finite() && power >= 0.0) {
            return Err(FormatError::InvalidPower { record: n }.into());
        }
        let linear = roi.linear_index(idx);
        if let Some(p) = prev {
            if linear <= p {
                return Err(FormatError::UnsortedRecords { record: n }.into());
            }
        }
        prev = Some(linear);
        elements.push(SrtElement { ix, iy, iz, power });
    }
    SparseRadarTensor::new(roi, density, valid_count, elements)
}

fn write_axis<W: Write>(axis: &AxisSpec, sink: &mut W) -> Result<()> {
    sink.write_all(&(axis.count() as u64).to_le_bytes())?;
    sink.write_all(&axis.start().to_le_bytes())?;
    sink.write_all(&axis.step().to_le_bytes())?;
    Ok(())
}

/// Write a dense 4D tensor with its grid metadata; returns the byte count.
pub fn write_raw_dense<W: Write>(
    t: &DenseTensor,
    grid: &PolarGrid4D,
    sink: &mut W,
) -> Result<u64> {
    let expected = grid.shape();
    if t.shape() != expected {
        return Err(Error::Invalid {
            what: "raw dense dump",
            why: format!("tensor shape {:?} != grid shape {:?}", t.shape(), expected),
        });
    }
    sink.write_all(RT4_MAGIC)?;
    sink.write_all(&RT4_VERSION.to_le_bytes())?;
    for axis in [&grid.doppler, &grid.range, &grid.azimuth, &grid.elevation] {
        write_axis(axis, sink)?;
    }
    let mut buf = Vec::with_capacity(4 << 12);
    for chunk in t.values().chunks(1 << 12) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        sink.write_all(&buf)?;
    }
    Ok(RT4_HEADER_LEN + 4 * t.len() as u64)
}

/// Parse a dense 4D tensor and its grid metadata.
pub fn read_raw_dense<R: Read>(source: &mut R) -> Result<(PolarGrid4D, DenseTensor)> {
    let mut header = [0u8; RT4_HEADER_LEN as usize];
    read_exact_or_truncated(source, &mut header)?;
    if &header[0..6] != RT4_MAGIC {
        return Err(FormatError::BadMagic { expected: ".rt4" }.into());
    }
    let version = u16::from_le_bytes(header[6..8].try_into().unwrap());
    if version != RT4_VERSION {
        return Err(FormatError::UnsupportedVersion {
            found: version,
            expected: RT4_VERSION,
        }
        .into());
    }
    let mut axes = Vec::with_capacity(4);
    for slot in 0..4 {
        let off = 8 + slot * 24;
        let count = u64::from_le_bytes(header[off..off + 8].try_into().unwrap());
        if count == 0 || count > (1u64 << 32) {
            return Err(FormatError::InvalidHeader(format!("axis count {count} out of range")).into());
        }
        let start = f64_at(&header, off + 8);
        let step = f64_at(&header, off + 16);
        let axis = AxisSpec::new(count as usize, start, step)
            .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
        axes.push(axis);
    }
    let grid = PolarGrid4D::new(axes[0], axes[1], axes[2], axes[3])
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;

    let total = grid
        .shape()
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .ok_or_else(|| FormatError::InvalidHeader("tensor size overflows".into()))?;

    let mut values: Vec<f32> = Vec::with_capacity(total.min(1 << 20));
    let mut chunk = [0u8; 4 << 10];
    let mut remaining = total;
    while remaining > 0 {
        let take = (remaining * 4).min(chunk.len());
        read_exact_or_truncated(source, &mut chunk[..take]).map_err(|e| match e {
            Error::Format(FormatError::Truncated { expected, actual }) => {
                Error::Format(FormatError::Truncated {
                    expected: expected + (remaining as u64 * 4 - take as u64),
                    actual: RT4_HEADER_LEN + (total - remaining) as u64 * 4 + actual,
                })
            }
            other => other,
        })?;
        for bytes in chunk[..take].chunks_exact(4) {
            let v = f32::from_le_bytes(bytes.try_into().unwrap());
            if !(v.is_finite() && v >= 0.0) {
                return Err(FormatError::InvalidPower {
                    record: (total - remaining) as u64,
                }
                .into());
            }
            values.push(v);
        }
        remaining -= take / 4;
    }
    let tensor = DenseTensor::new(grid.shape().to_vec(), values)?;
    Ok((grid, tensor))
}

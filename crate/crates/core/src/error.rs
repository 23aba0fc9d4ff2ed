//! Error types shared across the pipeline.

use thiserror::Error;

/// Top-level error for all pipeline operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A tensor axis does not match the grid it is paired with.
    #[error("axis `{axis}`: expected {expected} bins, got {actual}")]
    AxisMismatch {
        axis: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A constructor argument violates an invariant.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// RoI with zero voxels along an axis (voxel edge larger than the extent).
    #[error("degenerate RoI: axis {axis} has zero voxels")]
    DegenerateRoi { axis: char },

    /// Voxel or bin index outside the grid.
    #[error("index {index:?} out of range for counts {counts:?}")]
    IndexOutOfRange { index: [usize; 3], counts: [usize; 3] },

    /// Pooling density outside (0, 100].
    #[error("density must be in (0, 100], got {0}")]
    InvalidDensity(f64),

    /// Pooling over a field with no polar-covered voxels.
    #[error("field has no valid voxels to pool")]
    NoValidVoxels,

    /// A target lies outside the unambiguous range/velocity/angle span.
    #[error("target {index} out of bounds: {why}")]
    TargetOutOfBounds { index: usize, why: String },

    /// Malformed `.srt` / `.rt4` stream.
    #[error("format error: {0}")]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Structured parse failures for the binary formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic (not a {expected} file)")]
    BadMagic { expected: &'static str },

    #[error("unsupported version {found} (expected {expected})")]
    UnsupportedVersion { found: u16, expected: u16 },

    #[error("truncated stream: expected {expected} more bytes, got {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("records not sorted by linear voxel index at record {record}")]
    UnsortedRecords { record: u64 },

    #[error("record {record} index {index:?} out of range for counts {counts:?}")]
    RecordOutOfRange {
        record: u64,
        index: [u32; 3],
        counts: [usize; 3],
    },

    #[error("record {record} power is not a finite non-negative value")]
    InvalidPower { record: u64 },

    #[error("per-axis voxel count {count} exceeds the 16-bit index limit (65535)")]
    AxisOverflow { count: usize },

    #[error("invalid header: {0}")]
    InvalidHeader(String),
}

pub type Result<T> = std::result::Result<T, Error>;

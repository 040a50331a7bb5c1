//! Binary snapshot files.
//!
//! Little-endian layout: magic `DMNLS1\0` (7 bytes), version `u8`, dim `u8`, n `u32`,
//! box_length `f64`, t `f64`, then `n^dim` interleaved `(re, im)` `f64` pairs, row-major.

use std::io::{Read, Write};
use std::path::Path;

use dmnls_core::{Field, Grid};
use num_complex::Complex64;

pub const MAGIC: &[u8; 7] = b"DMNLS1\0";
pub const VERSION: u8 = 1;
const HEADER: usize = 7 + 1 + 1 + 4 + 8 + 8;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("not a snapshot file (bad magic)")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    Version(u8),
    #[error("snapshot truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("invalid snapshot contents: {0}")]
    Contents(#[from] dmnls_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn encode(field: &Field, t: f64) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(g.dim() as u8);
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&g.box_length().to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    for z in field.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

/// Field (stamped with its time) and `t`.
pub fn decode(bytes: &[u8]) -> Result<(Field, f64), SnapshotError> {
    if bytes.len() < 7 || &bytes[..7] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    if bytes.len() < HEADER {
        return Err(SnapshotError::Truncated {
            expected: HEADER,
            got: bytes.len(),
        });
    }
    if bytes[7] != VERSION {
        return Err(SnapshotError::Version(bytes[7]));
    }
    let dim = bytes[8] as usize;
    let n = u32::from_le_bytes(bytes[9..13].try_into().expect("4 bytes")) as usize;
    let box_length = f64_at(bytes, 13);
    let t = f64_at(bytes, 21);
    let grid = Grid::new(dim, n, box_length)?;
    let expected = HEADER + 16 * grid.len();
    if bytes.len() != expected {
        return Err(SnapshotError::Truncated {
            expected,
            got: bytes.len(),
        });
    }
    let values = bytes[HEADER..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    let field = Field::new(grid, values)?.with_time(t);
    Ok((field, t))
}

pub fn write(path: &Path, field: &Field, t: f64) -> Result<(), SnapshotError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode(field, t))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(Field, f64), SnapshotError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = Grid::new(1, 16, 2.5).unwrap();
        let f = Field::plane_wave(g, [1, 0], Complex64::new(0.5, -0.25));
        let bytes = encode(&f, 0.75);
        assert_eq!(&bytes[..7], b"DMNLS1\0");
        assert_eq!(bytes[7], 1);
        assert_eq!(bytes[8], 1);
        assert_eq!(&bytes[9..13], &16u32.to_le_bytes());
        assert_eq!(&bytes[13..21], &2.5f64.to_le_bytes());
        assert_eq!(&bytes[21..29], &0.75f64.to_le_bytes());
        assert_eq!(bytes.len(), 29 + 16 * 16);
    }

    #[test]
    fn rejects_bad_input() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let mut bytes = encode(&Field::zeros(g), 0.0);
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(SnapshotError::Truncated { .. })
        ));
        bytes[7] = 2;
        assert!(matches!(decode(&bytes), Err(SnapshotError::Version(2))));
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(SnapshotError::BadMagic)));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            dim in 1usize..=2,
            t in -1e3..1e3f64,
            l in 0.1..1e3f64,
            vals in proptest::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 256),
        ) {
            let g = Grid::new(dim, 16, l).unwrap();
            let values: Vec<Complex64> = vals.iter().cycle().take(g.len()).map(|(a, b)| Complex64::new(*a, *b)).collect();
            let f = Field::new(g, values).unwrap();
            let (back, tb) = decode(&encode(&f, t)).unwrap();
            prop_assert_eq!(tb.to_bits(), t.to_bits());
            prop_assert_eq!(back.grid(), f.grid());
            for (a, b) in back.values().iter().zip(f.values()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}

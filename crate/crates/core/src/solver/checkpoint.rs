//! Binary checkpoint of the physical-space velocity.
//!
//! Little-endian layout:
//!
//! | bytes | content                       |
//! |-------|-------------------------------|
//! | 4     | magic `GDPB`                  |
//! | 4     | format version, `u32`         |
//! | 4     | dim, `u32`                    |
//! | 4     | n, `u32`                      |
//! | 8     | box_length, `f64`             |
//! | 8     | t, `f64`                      |
//! | 8     | nu, `f64`                     |
//! | 8     | gamma, `f64`                  |
//! | ...   | dim components, each `n^dim` row-major `f64` (axis 0 slowest) |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FlowParams;
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, PhysicalField};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"GDPB";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub params: FlowParams,
    pub state: PhysicalField,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.state.grid();
        let mut out = Vec::with_capacity(48 + 8 * g.dim * g.len());
        out.extend_from_slice(&CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(g.dim as u32).to_le_bytes());
        out.extend_from_slice(&(g.n as u32).to_le_bytes());
        for v in [g.box_length, self.t, self.params.nu, self.params.gamma] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for comp in self.state.components() {
            for v in comp {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses a checkpoint; `dealias_fraction` is not stored and is taken
    /// from the caller.
    pub fn from_bytes(bytes: &[u8], dealias_fraction: f64) -> Result<Self> {
        let mut r = Cursor { bytes, pos: 0 };
        if r.take(4)? != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let dim = r.u32()? as usize;
        let n = r.u32()? as usize;
        let box_length = r.f64()?;
        let t = r.f64()?;
        let nu = r.f64()?;
        let gamma = r.f64()?;
        let grid = GridSpec::new(dim, n, box_length)
            .and_then(|g| g.with_dealias_fraction(dealias_fraction))
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        let comps = (0..dim)
            .map(|_| (0..grid.len()).map(|_| r.f64()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        Ok(Checkpoint {
            t,
            params: FlowParams { nu, gamma },
            state: PhysicalField::from_components(grid, comps)?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(&self.to_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path, dealias_fraction: f64) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut bytes = Vec::new();
        BufReader::new(file)
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, dealias_fraction)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(Error::Checkpoint("truncated file".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_and_round_trip() {
        let g = GridSpec::new(2, 4, 3.0).unwrap();
        let state = PhysicalField::from_fn(g, 2, |x| [x[0] - 0.1, x[1] * x[0], 0.0]);
        let ck = Checkpoint {
            t: 1.25,
            params: FlowParams {
                nu: 0.01,
                gamma: 2.0,
            },
            state,
        };
        let bytes = ck.to_bytes();
        assert_eq!(&bytes[..4], b"GDPB");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 3.0);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 1.25);
        assert_eq!(bytes.len(), 48 + 8 * 2 * 16);
        // First payload value is component 0 at the origin.
        assert_eq!(f64::from_le_bytes(bytes[48..56].try_into().unwrap()), -0.1);
        let back = Checkpoint::from_bytes(&bytes, g.dealias_fraction).unwrap();
        assert_eq!(back, ck);
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = GridSpec::new(2, 4, 1.0).unwrap();
        let ck = Checkpoint {
            t: 0.0,
            params: FlowParams {
                nu: 1.0,
                gamma: 0.0,
            },
            state: PhysicalField::zeros(g, 2),
        };
        let mut bytes = ck.to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1], 2.0 / 3.0).is_err());
        bytes[0] = b'X';
        assert!(Checkpoint::from_bytes(&bytes, 2.0 / 3.0).is_err());
    }
}

//! Binary checkpoint container for [`PurifiedMps`].
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! magic      8 bytes  "TLPMPS\0\0"
//! version    u32      1
//! n          u32      number of sites
//! max_bond   u32      bond dimension cap
//! center     i64      canonical center, -1 if none
//! beta       f64
//! trunc_err  f64      accumulated truncation error
//! shapes     n × (u32 dl, u32 dr)
//! payload    for each site, dl·4·dr × (f64 re, f64 im), row-major (l, p, r)
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::state::{PurifiedMps, SiteTensor, LOCAL_DIM};
use crate::c64;
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: [u8; 8] = *b"TLPMPS\0\0";
pub const CHECKPOINT_VERSION: u32 = 1;
/// Refuse to allocate tensors beyond this bond dimension when reading.
const MAX_READ_BOND: usize = 1 << 16;

fn io_err(e: std::io::Error) -> Error {
    Error::Checkpoint(e.to_string())
}

impl PurifiedMps {
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&CHECKPOINT_MAGIC);
        buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n() as u32).to_le_bytes());
        buf.extend_from_slice(&(self.max_bond as u32).to_le_bytes());
        let center = self.center.map(|c| c as i64).unwrap_or(-1);
        buf.extend_from_slice(&center.to_le_bytes());
        buf.extend_from_slice(&self.beta.to_le_bytes());
        buf.extend_from_slice(&self.truncation_error.to_le_bytes());
        for t in &self.tensors {
            buf.extend_from_slice(&(t.dl as u32).to_le_bytes());
            buf.extend_from_slice(&(t.dr as u32).to_le_bytes());
        }
        for t in &self.tensors {
            for z in &t.data {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        w.write_all(&buf).map_err(io_err)?;
        w.flush().map_err(io_err)
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io_err)?;
        if magic != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("not a purified MPS checkpoint".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
        }
        let n = read_u32(&mut r)? as usize;
        let max_bond = read_u32(&mut r)? as usize;
        let center = read_i64(&mut r)?;
        let beta = read_f64(&mut r)?;
        let truncation_error = read_f64(&mut r)?;
        if n < 2 {
            return Err(Error::Checkpoint(format!("invalid site count {n}")));
        }
        let mut shapes = Vec::with_capacity(n);
        for _ in 0..n {
            let dl = read_u32(&mut r)? as usize;
            let dr = read_u32(&mut r)? as usize;
            if dl == 0 || dr == 0 || dl > MAX_READ_BOND || dr > MAX_READ_BOND {
                return Err(Error::Checkpoint(format!("invalid tensor shape ({dl}, {dr})")));
            }
            shapes.push((dl, dr));
        }
        let mut tensors = Vec::with_capacity(n);
        for (dl, dr) in shapes {
            let mut t = SiteTensor::zeros(dl, dr);
            for z in t.data.iter_mut() {
                *z = c64::new(read_f64(&mut r)?, read_f64(&mut r)?);
            }
            debug_assert_eq!(t.data.len(), dl * LOCAL_DIM * dr);
            tensors.push(t);
        }
        let mut state = PurifiedMps::from_tensors(tensors, beta).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if center >= n as i64 {
            return Err(Error::Checkpoint(format!("center {center} outside chain")));
        }
        state.center = (center >= 0).then_some(center as usize);
        state.max_bond = max_bond;
        state.truncation_error = truncation_error;
        Ok(state)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path).map_err(io_err)?;
        self.write_checkpoint(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(io_err)?;
        Self::read_checkpoint(std::io::BufReader::new(file))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u32::from_le_bytes(b))
}

fn read_i64<R: Read>(r: &mut R) -> Result<i64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(i64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(f64::from_le_bytes(b))
}

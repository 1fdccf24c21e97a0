//! Binary state persistence with bit-exact round trips.
//!
//! Layout (little-endian):
//!   magic "OLDB" | version u32 | dims u32 | m u32 | t f64
//!   | reynolds, epsilon, omega, slip f64 | regime tag u32 | delta f64
//!   | u coefficients (dims * m^dims complex, component-major)
//!   | tau coefficients (nc * m^dims complex, component-major)
//!
//! Forcing is not persisted; a resumed run is unforced unless the caller
//! re-attaches one.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::constitutive::{FlowState, FluidParams, Forcing, Regime};
use crate::error::{Error, Result};
use crate::spectral::{Grid, Rank, SpectralField};

const MAGIC: &[u8; 4] = b"OLDB";
const VERSION: u32 = 1;

fn corrupt(path: &Path, reason: impl Into<String>) -> Error {
    Error::Checkpoint { path: path.to_path_buf(), reason: reason.into() }
}

/// Serialize a state and its parameters.
pub fn save_checkpoint(
    state: &FlowState,
    params: &FluidParams,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let grid = state.grid();
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dims() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.m() as u32).to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    for v in [params.reynolds, params.epsilon, params.omega, params.slip] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let (tag, delta) = match params.regime {
        Regime::Sobolev { delta } => (0u32, delta),
        Regime::Besov => (1u32, 0.0),
    };
    buf.extend_from_slice(&tag.to_le_bytes());
    buf.extend_from_slice(&delta.to_le_bytes());
    for field in [&state.u_hat, &state.tau_hat] {
        for z in field.data() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(corrupt(self.path, "truncated file"));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Load a state and its parameters.
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(FlowState, FluidParams)> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .map_err(|e| Error::io(path, e))?
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    let mut r = Reader { bytes: &bytes, pos: 0, path };

    if r.take(4)? != MAGIC {
        return Err(corrupt(path, "bad magic (not an OLDB checkpoint)"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(corrupt(path, format!("unsupported version {version} (expected {VERSION})")));
    }
    let dims = r.u32()? as usize;
    let m = r.u32()? as usize;
    let grid = Grid::new(dims, m)?;
    let t = r.f64()?;
    let reynolds = r.f64()?;
    let epsilon = r.f64()?;
    let omega = r.f64()?;
    let slip = r.f64()?;
    let regime = match r.u32()? {
        0 => Regime::Sobolev { delta: r.f64()? },
        1 => {
            r.f64()?;
            Regime::Besov
        }
        tag => return Err(corrupt(path, format!("unknown regime tag {tag}"))),
    };
    let params = FluidParams { reynolds, epsilon, omega, slip, regime, forcing: Forcing::Zero };

    let n = grid.n();
    let mut read_field = |rank: Rank| -> Result<SpectralField> {
        let comps = rank.components(dims);
        let mut data = Vec::with_capacity(comps * n);
        for _ in 0..comps * n {
            let re = r.f64()?;
            let im = r.f64()?;
            data.push(Complex64::new(re, im));
        }
        SpectralField::from_data(grid, rank, data)
    };
    let u_hat = read_field(Rank::Vector)?;
    let tau_hat = read_field(Rank::SymTensor)?;
    if r.pos != bytes.len() {
        return Err(corrupt(path, "trailing bytes after payload"));
    }
    let state = FlowState::new(t, u_hat, tau_hat)?;
    Ok((state, params))
}

//! Weight file format (little-endian):
//!
//! ```text
//! "FSTW" | version u32 = 1 | tensor count u32 = 8 |
//!   per tensor: name length u16 | name (ASCII) | rank u8 | extents u32 x rank | f32 values
//! ```

use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{ModelWeights, PARAM_SPECS};
use crate::error::{Error, Result};
use crate::tensor::{NamedTensors, Tensor};

pub const MAGIC: [u8; 4] = *b"FSTW";
pub const VERSION: u32 = 1;

pub fn encode_weights(weights: &ModelWeights) -> Vec<u8> {
    let mut buf = Vec::with_capacity(12 + 4 * weights.tensors().numel() + 256);
    buf.extend_from_slice(&MAGIC);
    buf.write_u32::<LittleEndian>(VERSION).unwrap();
    buf.write_u32::<LittleEndian>(weights.tensors().len() as u32).unwrap();
    for (name, t) in weights.tensors().iter() {
        buf.write_u16::<LittleEndian>(name.len() as u16).unwrap();
        buf.extend_from_slice(name.as_bytes());
        buf.write_u8(t.rank() as u8).unwrap();
        for &d in t.shape() {
            buf.write_u32::<LittleEndian>(d as u32).unwrap();
        }
        for &v in t.data() {
            buf.write_f32::<LittleEndian>(v).unwrap();
        }
    }
    buf
}

fn truncated(what: impl Into<String>) -> impl FnOnce(std::io::Error) -> Error {
    let what = what.into();
    move |_| Error::Truncated(what)
}

pub fn decode_weights(bytes: &[u8]) -> Result<ModelWeights> {
    let mut r = Cursor::new(bytes);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated("magic"))?;
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = r.read_u32::<LittleEndian>().map_err(truncated("version"))?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let count = r.read_u32::<LittleEndian>().map_err(truncated("tensor count"))? as usize;
    if count != PARAM_SPECS.len() {
        return Err(Error::InvalidArgument(format!(
            "weight file holds {count} tensors, the architecture has {}",
            PARAM_SPECS.len()
        )));
    }
    let mut tensors = NamedTensors::new();
    for (index, (want, shape)) in PARAM_SPECS.iter().enumerate() {
        let ctx = format!("tensor {index}");
        let len = r.read_u16::<LittleEndian>().map_err(truncated(ctx.clone()))? as usize;
        let mut name = vec![0u8; len];
        r.read_exact(&mut name).map_err(truncated(ctx.clone()))?;
        let name = String::from_utf8_lossy(&name).into_owned();
        if name != *want {
            return Err(Error::UnexpectedTensor {
                index,
                expected: want.to_string(),
                found: name,
            });
        }
        let rank = r.read_u8().map_err(truncated(name.clone()))? as usize;
        let mut extents = Vec::with_capacity(rank);
        for _ in 0..rank {
            extents.push(r.read_u32::<LittleEndian>().map_err(truncated(name.clone()))? as usize);
        }
        if extents != *shape {
            return Err(Error::WeightShape {
                name,
                expected: shape.to_vec(),
                found: extents,
            });
        }
        let n: usize = extents.iter().product();
        let mut values = vec![0f32; n];
        r.read_f32_into::<LittleEndian>(&mut values)
            .map_err(truncated(name.clone()))?;
        tensors.push(name, Tensor::new(extents, values)?);
    }
    let rest = bytes.len() - r.position() as usize;
    if rest != 0 {
        return Err(Error::TrailingBytes(rest));
    }
    ModelWeights::from_tensors(tensors)
}

pub fn save_weights(weights: &ModelWeights, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, encode_weights(weights)).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<ModelWeights> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::WeightFileMissing(path.to_path_buf()),
        _ => Error::io(format!("reading {}", path.display()), e),
    })?;
    decode_weights(&bytes)
}

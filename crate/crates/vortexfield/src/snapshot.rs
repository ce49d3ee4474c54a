use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{VortexConfig, VortexError};

#[derive(Serialize)]
struct Sidecar<'a> {
    n: usize,
    modulus: [f64; 2],
    area: f64,
    holonomies: &'a [[f64; 2]],
    component: usize,
    time: f64,
}

/// Writes each component of `Φ` as little-endian `(re, im)` float64 pairs, row-major,
/// next to a JSON sidecar. Returns the paths of the binary files.
pub fn write_snapshot(dir: &Path, stem: &str, cfg: &VortexConfig, time: f64) -> Result<Vec<PathBuf>, VortexError> {
    let io = |e: std::io::Error| VortexError::Io(e.to_string());
    fs::create_dir_all(dir).map_err(io)?;
    let mut out = Vec::new();
    for (k, field) in cfg.phi.iter().enumerate() {
        let bin = dir.join(format!("{stem}_phi{k}.bin"));
        let mut bytes = Vec::with_capacity(16 * field.len());
        for z in field {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        fs::write(&bin, bytes).map_err(io)?;
        let m = cfg.curve.modulus();
        let side = Sidecar {
            n: cfg.curve.n(),
            modulus: [m.re, m.im],
            area: cfg.curve.area(),
            holonomies: &cfg.holonomies,
            component: k,
            time,
        };
        let json = serde_json::to_string_pretty(&side).map_err(|e| VortexError::Io(e.to_string()))?;
        fs::write(dir.join(format!("{stem}_phi{k}.json")), json).map_err(io)?;
        out.push(bin);
    }
    Ok(out)
}

/// Reads a binary component written by [`write_snapshot`].
pub fn read_component(path: &Path) -> Result<Vec<num_complex::Complex64>, VortexError> {
    let bytes = fs::read(path).map_err(|e| VortexError::Io(e.to_string()))?;
    if bytes.len() % 16 != 0 {
        return Err(VortexError::Io(format!("{} is not a sequence of float64 pairs", path.display())));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            num_complex::Complex64::new(re, im)
        })
        .collect())
}

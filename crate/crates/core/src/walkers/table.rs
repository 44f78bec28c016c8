use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{euler_run, SphereDomain};
use crate::bessel_hitting::{invert_cdf, InversionSettings, SpectralSeriesCache};
use crate::error::{domain, Error, Result};
use crate::samplers::RngStream;
use crate::specfun::BesselIndex;

pub const TABLE_MAGIC: &[u8; 8] = b"EXWTAU01";
pub const TABLE_VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

/// How a table of `τ₁` draws was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableProvenance {
    Inversion,
    Euler,
}

impl TableProvenance {
    pub fn tag(self) -> u8 {
        match self {
            Self::Inversion => 0,
            Self::Euler => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Self::Inversion),
            1 => Ok(Self::Euler),
            t => Err(Error::Format(format!("unknown provenance tag {t}"))),
        }
    }
}

/// Generator used by [`precompute_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableMethod {
    Inversion,
    Euler { h: f64 },
}

/// Draws of the exit time `τ₁` of the unit ball started at its centre.
#[derive(Debug, Clone, PartialEq)]
pub struct Tau1Table {
    delta: u32,
    provenance: TableProvenance,
    samples: Vec<f64>,
}

impl Tau1Table {
    pub fn new(delta: u32, provenance: TableProvenance, samples: Vec<f64>) -> Result<Self> {
        if delta < 2 {
            return domain(format!("table dimension must be >= 2, got {delta}"));
        }
        if samples.is_empty() {
            return domain("table needs at least one sample");
        }
        if let Some(bad) = samples.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return domain(format!("table samples must be finite and > 0, found {bad}"));
        }
        Ok(Self { delta, provenance, samples })
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn provenance(&self) -> TableProvenance {
        self.provenance
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Uniform pick with replacement.
    #[inline]
    pub fn pick(&self, rng: &mut RngStream) -> f64 {
        self.samples[rng.index(self.samples.len())]
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut header = [0u8; HEADER_LEN];
        header[..8].copy_from_slice(TABLE_MAGIC);
        header[8..12].copy_from_slice(&TABLE_VERSION.to_le_bytes());
        header[12..16].copy_from_slice(&self.delta.to_le_bytes());
        header[16] = self.provenance.tag();
        header[24..32].copy_from_slice(&(self.samples.len() as u64).to_le_bytes());
        w.write_all(&header)?;
        for s in &self.samples {
            w.write_all(&s.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header).map_err(|e| truncated(e, "header"))?;
        if &header[..8] != TABLE_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
        if version != TABLE_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let delta = u32::from_le_bytes(header[12..16].try_into().unwrap());
        let provenance = TableProvenance::from_tag(header[16])?;
        if header[17..24].iter().any(|&b| b != 0) {
            return Err(Error::Format("nonzero padding".into()));
        }
        let count = u64::from_le_bytes(header[24..32].try_into().unwrap());
        let count = usize::try_from(count).map_err(|_| Error::Format(format!("count {count} too large")))?;
        let mut samples = Vec::with_capacity(count.min(1 << 24));
        let mut buf = [0u8; 8];
        for _ in 0..count {
            r.read_exact(&mut buf).map_err(|e| truncated(e, "samples"))?;
            samples.push(f64::from_le_bytes(buf));
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after samples".into()));
        }
        Self::new(delta, provenance, samples).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn truncated(e: std::io::Error, what: &str) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format(format!("file truncated in {what}"))
    } else {
        Error::Io(e)
    }
}

/// `count` independent draws of `τ₁` for the unit ball in dimension `delta`.
pub fn precompute_table(count: usize, delta: u32, method: TableMethod, rng: &mut RngStream) -> Result<Tau1Table> {
    if count == 0 {
        return domain("table count must be >= 1");
    }
    let index = BesselIndex::from_dimension(delta)?;
    let samples = match method {
        TableMethod::Inversion => {
            let cache = SpectralSeriesCache::new(index, 1.0)?;
            let settings = InversionSettings::default();
            (0..count).map(|_| invert_cdf(rng.uniform_open(), &cache, &settings)).collect::<Result<Vec<_>>>()?
        }
        TableMethod::Euler { h } => {
            let dom = SphereDomain::new(1.0, delta)?;
            let origin = vec![0.0; delta as usize];
            (0..count).map(|_| euler_run(&origin, &dom, h, rng).map(|s| s.exit_time)).collect::<Result<Vec<_>>>()?
        }
    };
    let provenance = match method {
        TableMethod::Inversion => TableProvenance::Inversion,
        TableMethod::Euler { .. } => TableProvenance::Euler,
    };
    Tau1Table::new(delta, provenance, samples)
}

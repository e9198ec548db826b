//! On-disk JSON formats. Indices are 1-based; floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use realizer_core::funcgraph::{FuncMap, FuncPair};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

/// A single map (`g` absent) or a nearest/farthest pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub f: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Single(FuncMap),
    Pair(FuncPair),
}

impl InstanceFile {
    pub fn from_pair(p: &FuncPair) -> Self {
        Self { n: p.n(), f: p.f.to_one_based(), g: Some(p.g.to_one_based()), metadata: BTreeMap::new() }
    }

    pub fn from_map(f: &FuncMap) -> Self {
        Self { n: f.n(), f: f.to_one_based(), g: None, metadata: BTreeMap::new() }
    }

    fn check_len(&self, name: &str, v: &[usize]) -> Result<(), String> {
        if v.len() != self.n {
            return Err(format!("'{name}' has {} entries but n = {}", v.len(), self.n));
        }
        Ok(())
    }

    /// Structural validation: lengths, ranges, fixed points, pointwise distinctness.
    pub fn instance(&self) -> Result<Instance, String> {
        self.check_len("f", &self.f)?;
        let f = FuncMap::from_one_based(&self.f).map_err(|e| format!("f: {e}"))?;
        match &self.g {
            None => Ok(Instance::Single(f)),
            Some(g) => {
                self.check_len("g", g)?;
                let g = FuncMap::from_one_based(g).map_err(|e| format!("g: {e}"))?;
                Ok(Instance::Pair(FuncPair::new(f, g).map_err(|e| e.to_string())?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    pub n: usize,
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub seed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub d: Vec<Vec<f64>>,
}

/// Compact JSON with every float printed as `{:.16e}`.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).map_err(|e| e.to_string())?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| e.to_string())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    fs::write(path, to_json(value)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

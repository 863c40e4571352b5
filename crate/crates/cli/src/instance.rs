//! Instance sources: a file on disk or an inline generator spec such as
//! `square:L=4,periodic` or `er:n=10,p=0.2,seed=7`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use qmcbound_core::graph::{self, apply_disorder};
use qmcbound_core::{Error, Graph, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    Square,
    Kagome,
    /// Shastry-Sutherland.
    Ss,
    /// Erdős–Rényi G(n, p).
    Er,
}

impl Lattice {
    fn name(self) -> &'static str {
        match self {
            Lattice::Square => "square",
            Lattice::Kagome => "kagome",
            Lattice::Ss => "ss",
            Lattice::Er => "er",
        }
    }
}

/// Generator parameters. Unused fields are ignored by the chosen lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub lattice: Lattice,
    pub l: usize,
    pub periodic: bool,
    pub cx: usize,
    pub cy: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub j: f64,
    pub jd: f64,
    /// Relative Gaussian disorder on every weight, seeded by `seed`.
    pub sigma: f64,
}

impl GenSpec {
    pub fn new(lattice: Lattice) -> Self {
        Self {
            lattice,
            l: 4,
            periodic: false,
            cx: 2,
            cy: 3,
            n: 10,
            p: 0.5,
            seed: 0,
            j: 1.0,
            jd: 1.0,
            sigma: 0.0,
        }
    }

    pub fn build(&self) -> Result<Graph> {
        let g = match self.lattice {
            Lattice::Square => graph::gen_square(self.l, self.periodic)?,
            Lattice::Kagome => graph::gen_kagome(self.cx, self.cy, self.periodic)?,
            Lattice::Ss => graph::gen_shastry_sutherland(self.l, self.j, self.jd)?,
            Lattice::Er => graph::gen_erdos_renyi(self.n, self.p, self.seed)?,
        };
        if self.sigma > 0.0 {
            apply_disorder(&g, self.sigma, self.seed)
        } else {
            Ok(g)
        }
    }
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(format!("generator spec '{s}': {msg}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let lattice = Lattice::from_str(kind.trim(), true).map_err(|_| bad(format!("unknown lattice '{kind}'")))?;
        let mut spec = GenSpec::new(lattice);
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, val) = match item.split_once('=') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (item, None),
            };
            let num = |v: Option<&str>| -> Result<f64> {
                v.ok_or_else(|| bad(format!("'{key}' needs a value")))?
                    .parse::<f64>()
                    .map_err(|e| bad(format!("'{key}': {e}")))
            };
            let int = |v: Option<&str>| -> Result<u64> {
                v.ok_or_else(|| bad(format!("'{key}' needs a value")))?
                    .parse::<u64>()
                    .map_err(|e| bad(format!("'{key}': {e}")))
            };
            match key {
                "L" | "l" => spec.l = int(val)? as usize,
                "cx" => spec.cx = int(val)? as usize,
                "cy" => spec.cy = int(val)? as usize,
                "n" => spec.n = int(val)? as usize,
                "p" => spec.p = num(val)?,
                "seed" => spec.seed = int(val)?,
                "j" | "J" => spec.j = num(val)?,
                "jd" | "J_D" => spec.jd = num(val)?,
                "sigma" => spec.sigma = num(val)?,
                "periodic" => {
                    spec.periodic = match val {
                        None | Some("true") | Some("1") => true,
                        Some("false") | Some("0") => false,
                        Some(v) => return Err(bad(format!("periodic={v}"))),
                    }
                }
                "open" => spec.periodic = false,
                _ => return Err(bad(format!("unknown key '{key}'"))),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.lattice.name())?;
        match self.lattice {
            Lattice::Square => write!(f, "L={}", self.l)?,
            Lattice::Kagome => write!(f, "cx={},cy={}", self.cx, self.cy)?,
            Lattice::Ss => write!(f, "L={},j={},jd={}", self.l, self.j, self.jd)?,
            Lattice::Er => write!(f, "n={},p={},seed={}", self.n, self.p, self.seed)?,
        }
        if self.periodic && matches!(self.lattice, Lattice::Square | Lattice::Kagome) {
            write!(f, ",periodic")?;
        }
        if self.sigma > 0.0 {
            write!(f, ",sigma={}", self.sigma)?;
            if self.lattice != Lattice::Er {
                write!(f, ",seed={}", self.seed)?;
            }
        }
        Ok(())
    }
}

/// Resolve an instance argument. Existing paths win over generator specs.
pub fn resolve(source: &str) -> Result<Graph> {
    if Path::new(source).exists() {
        return graph::load_instance(source);
    }
    match source.parse::<GenSpec>() {
        Ok(spec) => spec.build(),
        Err(e) if source.contains(':') => Err(e),
        Err(_) => Err(Error::InvalidParameter(format!(
            "'{source}' is neither a file nor a generator spec"
        ))),
    }
}

/// Instance summary embedded in result files.
pub fn describe(g: &Graph, source: &str) -> serde_json::Value {
    serde_json::json!({
        "source": source,
        "name": g.name,
        "n": g.n,
        "num_edges": g.num_edges(),
        "total_weight": g.total_weight(),
    })
}

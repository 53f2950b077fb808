//! Degrees of the Perazzo families as Segre-class integrals over flag-bundle
//! towers, with an on-disk content-addressed cache.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chow::{integral_integer, Sheaf, Tower};
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "PERAZZO_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeFamily {
    Min,
    Max,
    MinCones,
    MaxCones,
}

impl DegreeFamily {
    pub const ALL: [DegreeFamily; 4] = [
        DegreeFamily::Min,
        DegreeFamily::Max,
        DegreeFamily::MinCones,
        DegreeFamily::MaxCones,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DegreeFamily::Min => "min",
            DegreeFamily::Max => "max",
            DegreeFamily::MinCones => "min-cones",
            DegreeFamily::MaxCones => "max-cones",
        }
    }

    /// Name of the integer parameter: `N` for minimal families, `k` for
    /// maximal ones.
    pub fn param_name(self) -> &'static str {
        match self {
            DegreeFamily::Min | DegreeFamily::MinCones => "N",
            DegreeFamily::Max | DegreeFamily::MaxCones => "k",
        }
    }
}

impl FromStr for DegreeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "min" | "minimal" => Ok(DegreeFamily::Min),
            "max" | "maximal" => Ok(DegreeFamily::Max),
            "min-cones" | "min-cone" => Ok(DegreeFamily::MinCones),
            "max-cones" | "max-cone" => Ok(DegreeFamily::MaxCones),
            _ => Err(Error::InvalidFamily(s.to_string())),
        }
    }
}

impl std::fmt::Display for DegreeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One degree computation. `degree` serializes as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub family: DegreeFamily,
    pub param: u32,
    pub dim: usize,
    #[serde(with = "bigint_string")]
    pub degree: BigInt,
    /// Rank of the (virtual) bundle whose Segre class is integrated.
    pub bundle_rank: i64,
    /// Dimension of the flag-bundle tower.
    pub tower_dim: usize,
    pub tool_version: String,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Checks the parameter range: `N >= 5` for minimal families (the
/// `N = 4` flag `{0, 2}` is degenerate) and `k >= 2` for maximal ones.
pub fn validate(family: DegreeFamily, param: u32) -> Result<()> {
    let ok = match family {
        DegreeFamily::Min | DegreeFamily::MinCones => param >= 5,
        DegreeFamily::Max | DegreeFamily::MaxCones => param >= 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "{} requires {} >= {}, got {param}",
            family,
            family.param_name(),
            if family.param_name() == "N" { 5 } else { 2 }
        )))
    }
}

struct Setup {
    tower: Tower,
    bundle: Sheaf,
    dim: usize,
}

fn min_setup(n: usize) -> Result<Setup> {
    let pt = Tower::point();
    let (g1, q1, tau1) = pt.flag_bundle(3, n - 2, &pt.trivial(n + 1))?;
    let (f, _q2, tau2) = g1.flag_bundle(n - 4, 2, &tau1)?;
    let q1 = f.pull(&q1)?;
    let tau1 = f.pull(&tau1)?;
    let e1 = tau2.sym2().tensor(&q1)?;
    let e2 = tau1.sym3();
    let bundle = e1.sum(&e2)?;
    let dim = 5 * n - 15 + bundle.rank() as usize;
    Ok(Setup { tower: f, bundle, dim })
}

fn min_cones_setup(n: usize) -> Result<Setup> {
    let pt = Tower::point();
    let (g0, _s0, q0) = pt.flag_bundle(1, n, &pt.trivial(n + 1))?;
    let (f1, s1, q1) = g0.flag_bundle(2, n - 2, &q0)?;
    let (f2, _s2, q2) = f1.flag_bundle(n - 4, 2, &q1)?;
    let s1 = f2.pull(&s1)?;
    let q1 = f2.pull(&q1)?;
    let e1 = q2.sym2().tensor(&s1)?;
    let e2 = q1.sym3();
    let bundle = e1.sum(&e2)?;
    let dim = 5 * n - 13 + bundle.rank() as usize;
    Ok(Setup { tower: f2, bundle, dim })
}

fn max_setup(k: usize) -> Result<Setup> {
    let pt = Tower::point();
    let (g, _s, q) = pt.flag_bundle(k + 1, k, &pt.trivial(2 * k + 1))?;
    let r = q.dual();
    let b = r.sym2().scale_multiplicity(2 * k as i64 + 1);
    let c = r.wedge2().tensor(&r)?;
    let d = r.wedge3();
    let bundle = b.sum(&d)?.difference(&c)?;
    let dim = k * (k + 1) - 1 + bundle.rank() as usize;
    Ok(Setup { tower: g, bundle, dim })
}

fn max_cones_setup(k: usize) -> Result<Setup> {
    let pt = Tower::point();
    let (g0, _q0, tau0) = pt.flag_bundle(1, 2 * k, &pt.trivial(2 * k + 1))?;
    let (g, _q, tau1) = g0.flag_bundle(k, k, &tau0)?;
    let tau0 = g.pull(&tau0)?;
    let r = tau1;
    let b = r.sym2().tensor(&tau0)?;
    let c = r.wedge2().tensor(&r)?;
    let d = r.wedge3();
    let bundle = b.sum(&d)?.difference(&c)?;
    let dim = 2 * k + k * k - 1 + bundle.rank() as usize;
    Ok(Setup { tower: g, bundle, dim })
}

/// Computes the degree without consulting the cache.
pub fn compute(family: DegreeFamily, param: u32) -> Result<DegreeResult> {
    validate(family, param)?;
    let p = param as usize;
    let setup = match family {
        DegreeFamily::Min => min_setup(p)?,
        DegreeFamily::MinCones => min_cones_setup(p)?,
        DegreeFamily::Max => max_setup(p)?,
        DegreeFamily::MaxCones => max_cones_setup(p)?,
    };
    let top = setup.tower.dim();
    let s = setup.bundle.segre(top)?;
    let degree = integral_integer(&setup.tower, &s)?;
    Ok(DegreeResult {
        family,
        param,
        dim: setup.dim,
        degree,
        bundle_rank: setup.bundle.rank(),
        tower_dim: top,
        tool_version: TOOL_VERSION.to_string(),
    })
}

pub fn degree_min(n: u32) -> Result<DegreeResult> {
    compute(DegreeFamily::Min, n)
}

pub fn degree_min_cones(n: u32) -> Result<DegreeResult> {
    compute(DegreeFamily::MinCones, n)
}

pub fn degree_max(k: u32) -> Result<DegreeResult> {
    compute(DegreeFamily::Max, k)
}

pub fn degree_max_cones(k: u32) -> Result<DegreeResult> {
    compute(DegreeFamily::MaxCones, k)
}

/// Content-addressed store of degree results, one JSON file per key.
#[derive(Clone, Debug)]
pub struct DegreeCache {
    dir: PathBuf,
}

impl DegreeCache {
    pub fn new(dir: impl Into<PathBuf>) -> DegreeCache {
        DegreeCache { dir: dir.into() }
    }

    /// `$PERAZZO_CACHE_DIR`, else `$XDG_CACHE_HOME/perazzo`, else
    /// `$HOME/.cache/perazzo`, else a directory under the system temp dir.
    pub fn from_env() -> DegreeCache {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return DegreeCache::new(d);
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return DegreeCache::new(Path::new(&d).join("perazzo"));
        }
        if let Some(d) = std::env::var_os("HOME") {
            return DegreeCache::new(Path::new(&d).join(".cache").join("perazzo"));
        }
        DegreeCache::new(std::env::temp_dir().join("perazzo-cache"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(family: DegreeFamily, param: u32) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}\0{}\0{}", family.name(), param, TOOL_VERSION).as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, family: DegreeFamily, param: u32) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(family, param)))
    }

    pub fn get(&self, family: DegreeFamily, param: u32) -> Option<DegreeResult> {
        let text = std::fs::read_to_string(self.path(family, param)).ok()?;
        let r: DegreeResult = serde_json::from_str(&text).ok()?;
        (r.family == family && r.param == param && r.tool_version == TOOL_VERSION).then_some(r)
    }

    pub fn put(&self, r: &DegreeResult) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::Io(e.to_string()))?;
        let path = self.path(r.family, r.param);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let text = serde_json::to_string_pretty(r).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&tmp, text).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::Io(e.to_string()))
    }

    /// Cached result if present, else computes and stores it. Returns the
    /// result and whether it came from the cache.
    pub fn get_or_compute(&self, family: DegreeFamily, param: u32) -> Result<(DegreeResult, bool)> {
        validate(family, param)?;
        if let Some(r) = self.get(family, param) {
            return Ok((r, true));
        }
        let r = compute(family, param)?;
        // a read-only cache location is not fatal
        let _ = self.put(&r);
        Ok((r, false))
    }
}

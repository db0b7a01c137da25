//! Parameter sets and the name-keyed registry.
//!
//! `r` and `s` are stored as the coefficient standard deviations listed in
//! the published tables. Samplers take widths, obtained with
//! [`ParamSet::r_width`] and [`ParamSet::s_width`].
//!
//! The registry can be extended or overridden through the
//! `GADGETFORGE_PARAMDIR` environment variable, which names either a TOML file
//! or a directory holding `params.toml`. Each table is one parameter set:
//!
//! ```toml
//! [robin-701]
//! s = 452.0
//!
//! [robin-mini]
//! scheme = "robin"
//! id = 200
//! n = 61
//! modulus = 4096
//! p = 512
//! q = 8
//! a = 16
//! b = 15
//! alpha = 1.7
//! r = 9.8
//! s = 140.0
//! ```
//!
//! Overrides of an existing name may list any subset of fields; new names
//! must give every field without a default.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gadget::GadgetParams;
use crate::ring::{RingCtx, RingKind};

pub const PARAMDIR_ENV: &str = "GADGETFORGE_PARAMDIR";
pub const OVERRIDE_FILE: &str = "params.toml";
/// Full keygen redraws allowed before giving up.
pub const DEFAULT_RESTART_GUARD: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Robin,
    Eagle,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 2] = [SchemeKind::Robin, SchemeKind::Eagle];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Robin => "robin",
            SchemeKind::Eagle => "eagle",
        }
    }

    pub fn ring_kind(self) -> RingKind {
        match self {
            SchemeKind::Robin => RingKind::Convolution,
            SchemeKind::Eagle => RingKind::Cyclotomic,
        }
    }

    /// Number of `n`-blocks in a preimage.
    pub fn preimage_blocks(self) -> usize {
        match self {
            SchemeKind::Robin => 2,
            SchemeKind::Eagle => 3,
        }
    }

    /// Number of `n`-blocks carried in a signature.
    pub fn signature_blocks(self) -> usize {
        self.preimage_blocks() - 1
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

/// Published reference values, kept only for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableValues {
    pub gamma: f64,
    pub beta: f64,
    pub pk_bytes: usize,
    pub sig_bytes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub name: String,
    pub id: u8,
    pub scheme: SchemeKind,
    pub n: usize,
    pub modulus: i64,
    pub p: i64,
    pub q: i64,
    pub a: usize,
    pub b: usize,
    pub alpha: f64,
    /// Standard deviation of the gadget coset sampler.
    pub r: f64,
    /// Standard deviation of preimage coefficients.
    pub s: f64,
    pub eps_exponent: i32,
    pub candidates: usize,
    pub salt_bytes: usize,
    pub seed_bytes: usize,
    pub restart_guard: usize,
    pub table: Option<TableValues>,
}

#[allow(clippy::too_many_arguments)]
fn builtin_set(
    name: &str,
    id: u8,
    scheme: SchemeKind,
    n: usize,
    modulus: i64,
    p: i64,
    q: i64,
    (a, b): (usize, usize),
    alpha: f64,
    r: f64,
    s: f64,
    table: TableValues,
) -> ParamSet {
    ParamSet {
        name: name.to_string(),
        id,
        scheme,
        n,
        modulus,
        p,
        q,
        a,
        b,
        alpha,
        r,
        s,
        eps_exponent: -36,
        candidates: 5,
        salt_bytes: 40,
        seed_bytes: 32,
        restart_guard: DEFAULT_RESTART_GUARD,
        table: Some(table),
    }
}

fn tv(gamma: f64, beta: f64, pk_bytes: usize, sig_bytes: usize) -> TableValues {
    TableValues { gamma, beta, pk_bytes, sig_bytes }
}

/// The five published parameter sets.
pub fn builtin() -> Vec<ParamSet> {
    use SchemeKind::*;
    vec![
        builtin_set("robin-701", 1, Robin, 701, 16384, 2048, 8, (176, 175), 1.65, 10.22, 449.8, tv(1.65, 28928.7, 1227, 992)),
        builtin_set("robin-1061", 2, Robin, 1061, 32768, 4096, 8, (266, 265), 1.7, 10.28, 573.8, tv(2.29, 62965.5, 1990, 1527)),
        builtin_set("robin-1279", 3, Robin, 1279, 32768, 4096, 8, (320, 319), 1.75, 10.31, 650.4, tv(2.07, 70983.7, 2399, 1862)),
        builtin_set("eagle-512", 4, Eagle, 512, 16000, 2000, 8, (128, 128), 1.7, 10.17, 394.2, tv(1.36, 28493.5, 928, 1406)),
        builtin_set("eagle-1024", 5, Eagle, 1024, 32400, 2700, 12, (256, 256), 1.7, 15.42, 841.5, tv(1.19, 66118.5, 1952, 3052)),
    ]
}

impl ParamSet {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("{}: {m}", self.name)));
        RingCtx::new(self.n, self.scheme.ring_kind(), self.modulus)?;
        if self.p < 2 || self.q < 1 || self.p.checked_mul(self.q) != Some(self.modulus) {
            return bad(format!("p*q = {}*{} must equal Q = {}", self.p, self.q, self.modulus));
        }
        if self.modulus > 1 << 16 {
            return bad(format!("Q = {} exceeds 2^16", self.modulus));
        }
        if self.scheme == SchemeKind::Robin && self.modulus & (self.modulus - 1) != 0 {
            return bad("Robin needs a power-of-two Q".into());
        }
        if self.a + self.b > self.n || self.a + self.b == 0 {
            return bad(format!("ternary weights ({}, {}) for n = {}", self.a, self.b, self.n));
        }
        for (what, v) in [("alpha", self.alpha), ("r", self.r), ("s", self.s)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{what} = {v}"));
            }
        }
        if self.candidates == 0 || self.restart_guard == 0 {
            return bad("candidates and restart_guard must be positive".into());
        }
        if self.salt_bytes == 0 || self.seed_bytes != 32 {
            return bad("salt must be non-empty and seeds 32 bytes".into());
        }
        Ok(())
    }

    pub fn ring(&self) -> Result<RingCtx> {
        RingCtx::new(self.n, self.scheme.ring_kind(), self.modulus)
    }

    pub fn r_width(&self) -> f64 {
        self.r * (2.0 * PI).sqrt()
    }

    pub fn s_width(&self) -> f64 {
        self.s * (2.0 * PI).sqrt()
    }

    /// Online rounding width `r / q`.
    pub fn rbar_width(&self) -> f64 {
        self.r_width() / self.q as f64
    }

    pub fn gadget(&self) -> Result<GadgetParams> {
        GadgetParams::new(self.p, self.q, self.modulus, self.r_width())
    }

    /// Variance of the decoding error, uniform over `Z_p`.
    pub fn error_variance(&self) -> f64 {
        ((self.p * self.p - 1) as f64) / 12.0
    }

    /// `gamma = sqrt(s^2 + (p^2 - 1)/12) / s`.
    pub fn gamma(&self) -> f64 {
        (self.s * self.s + self.error_variance()).sqrt() / self.s
    }

    /// `beta = 1.04 * sqrt(k n (s^2 + (p^2 - 1)/12))` with `k` preimage blocks.
    pub fn beta(&self) -> f64 {
        let k = self.scheme.preimage_blocks() as f64;
        1.04 * (k * self.n as f64 * (self.s * self.s + self.error_variance())).sqrt()
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta() * self.beta()
    }

    /// Keygen acceptance threshold `alpha * sqrt(2(a + b))`.
    pub fn quality_threshold(&self) -> f64 {
        self.alpha * (2.0 * (self.a + self.b) as f64).sqrt()
    }

    /// `(sqrt(1 + q^2)/q) * r * alpha * sqrt(2(a + b))`.
    pub fn s_lower_bound(&self) -> f64 {
        let q = self.q as f64;
        (1.0 + q * q).sqrt() / q * self.r * self.quality_threshold()
    }

    /// Smoothing-based `r = q * sqrt(ln(2n(1 + 1/eps)) / pi)`, as a standard deviation.
    pub fn smoothing_r(&self) -> f64 {
        let inv_eps = 2f64.powi(-self.eps_exponent);
        let eta = ((2.0 * self.n as f64 * (1.0 + inv_eps)).ln() / PI).sqrt();
        self.q as f64 * eta / (2.0 * PI).sqrt()
    }

    /// Per-coefficient bound enforced when decoding and verifying.
    pub fn coeff_bound(&self) -> i64 {
        (10.0 * self.s).floor() as i64
    }

    /// `ceil(k_sig n log2(s sqrt(2 pi e)) / 8) + salt`.
    pub fn entropy_estimate(&self) -> usize {
        let k = self.scheme.signature_blocks() as f64;
        let bits = k * self.n as f64 * (self.s * (2.0 * PI * E).sqrt()).log2();
        (bits / 8.0).ceil() as usize + self.salt_bytes
    }

    pub fn modulus_bits(&self) -> u32 {
        64 - (self.modulus as u64 - 1).leading_zeros()
    }

    pub fn public_key_bytes(&self) -> usize {
        let packed = (self.n * self.modulus_bits() as usize).div_ceil(8);
        match self.scheme {
            SchemeKind::Robin => packed,
            SchemeKind::Eagle => packed + self.seed_bytes,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Override {
    scheme: Option<String>,
    id: Option<u8>,
    n: Option<usize>,
    modulus: Option<i64>,
    p: Option<i64>,
    q: Option<i64>,
    a: Option<usize>,
    b: Option<usize>,
    alpha: Option<f64>,
    r: Option<f64>,
    s: Option<f64>,
    eps_exponent: Option<i32>,
    candidates: Option<usize>,
    salt_bytes: Option<usize>,
    restart_guard: Option<usize>,
}

impl Override {
    fn apply(self, mut p: ParamSet) -> Result<ParamSet> {
        if let Some(s) = self.scheme {
            p.scheme = s.parse()?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        set!(id, n, modulus, p, q, a, b, alpha, r, s, eps_exponent, candidates, salt_bytes, restart_guard);
        // published comparisons no longer describe a modified set
        p.table = None;
        Ok(p)
    }

    fn into_new(self, name: &str) -> Result<ParamSet> {
        let missing = |f: &str| Error::InvalidParameter(format!("{name}: new parameter set needs `{f}`"));
        let scheme: SchemeKind = self.scheme.as_deref().ok_or_else(|| missing("scheme"))?.parse()?;
        let base = ParamSet {
            name: name.to_string(),
            id: self.id.ok_or_else(|| missing("id"))?,
            scheme,
            n: self.n.ok_or_else(|| missing("n"))?,
            modulus: self.modulus.ok_or_else(|| missing("modulus"))?,
            p: self.p.ok_or_else(|| missing("p"))?,
            q: self.q.ok_or_else(|| missing("q"))?,
            a: self.a.ok_or_else(|| missing("a"))?,
            b: self.b.ok_or_else(|| missing("b"))?,
            alpha: self.alpha.ok_or_else(|| missing("alpha"))?,
            r: self.r.ok_or_else(|| missing("r"))?,
            s: self.s.ok_or_else(|| missing("s"))?,
            eps_exponent: -36,
            candidates: 5,
            salt_bytes: 40,
            seed_bytes: 32,
            restart_guard: DEFAULT_RESTART_GUARD,
            table: None,
        };
        Override { scheme: None, ..self }.apply(base)
    }
}

/// Name-keyed collection of parameter sets.
#[derive(Debug, Clone)]
pub struct Registry {
    sets: BTreeMap<String, ParamSet>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Registry {
    pub fn builtin() -> Self {
        Self { sets: builtin().into_iter().map(|p| (p.name.clone(), p)).collect() }
    }

    /// Built-in sets, then any overrides named by `GADGETFORGE_PARAMDIR`.
    pub fn from_env() -> Result<Self> {
        let mut reg = Self::builtin();
        if let Some(dir) = std::env::var_os(PARAMDIR_ENV) {
            reg.load_overrides(Path::new(&dir))?;
        }
        Ok(reg)
    }

    pub fn load_overrides(&mut self, path: &Path) -> Result<()> {
        let file: PathBuf = if path.is_dir() { path.join(OVERRIDE_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&file)
            .map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
        self.apply_overrides(&text)
    }

    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        let table: BTreeMap<String, Override> =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("parameter file: {e}")))?;
        for (name, ov) in table {
            let set = match self.sets.remove(&name) {
                Some(existing) => ov.apply(existing)?,
                None => ov.into_new(&name)?,
            };
            set.validate()?;
            if let Some(clash) = self.sets.values().find(|p| p.id == set.id) {
                return Err(Error::InvalidParameter(format!("{name}: id {} already used by {}", set.id, clash.name)));
            }
            self.sets.insert(name, set);
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&ParamSet> {
        self.sets.get(&name.to_ascii_lowercase()).ok_or_else(|| Error::UnknownParamSet(name.to_string()))
    }

    pub fn by_id(&self, id: u8) -> Result<&ParamSet> {
        self.sets.values().find(|p| p.id == id).ok_or_else(|| Error::UnknownParamSet(format!("id {id}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sets.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ParamSet> {
        self.sets.values()
    }
}

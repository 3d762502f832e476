//! Problem-spec file format, parsing, and exhaustive validation of the
//! ingested mathematical claims.
//!
//! The format is line-oriented `key = value` grouped in sections.  All
//! numbers are base-10 integer strings; rationals are `num/den`; polynomials
//! and coordinate vectors are comma-separated, lowest degree first.

use crate::exactalg::{FieldAutomorphism, NFElement, NumberField, QPoly, Q};
use crate::galoisdata::{zeta, Character, GroupTable, Mat2, RepModel};
use crate::padics::{PadicContext, PadicEmbedding, PrimeSplitting, Unramified};
use crate::quadclass::{class_of_prime, enumerate_reduced_forms, kronecker, PrimeClass};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("section [{0}]: unknown key `{1}`")]
    UnknownKey(String, String),
    #[error("missing required key `{0}` in section [{1}]")]
    MissingKey(String, String),
    #[error("bad value for `{0}`: {1}")]
    BadValue(String, String),
}

/// Splitting type of a rational prime in the quadratic field K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitType {
    Split,
    Inert,
}

impl FromStr for SplitType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "split" => Ok(SplitType::Split),
            "inert" => Ok(SplitType::Inert),
            _ => Err(format!("bad split type `{s}`")),
        }
    }
}

/// Quadratic base field flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    Cm,
    Rm,
}

/// Gaussian integer a + b i, the coefficient ring of all shipped
/// q-expansions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn zero() -> Self {
        GaussianInt {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn realize(&self, ctx: &Arc<PadicContext>) -> Unramified {
        let re = Unramified::from_rational(ctx, &Q::from_integer(self.re.clone()));
        if self.im.is_zero() {
            return re;
        }
        let i = zeta(ctx, 4).expect("context admits i");
        let im = Unramified::from_rational(ctx, &Q::from_integer(self.im.clone()));
        re.add(&i.mul(&im))
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        // forms: "3", "-2i", "1+2i", "-1-i", "i", "-i", "0"
        let s = s.trim().replace(' ', "");
        let mk = |v: &str| -> Result<BigInt, String> {
            match v {
                "" | "+" => Ok(BigInt::from(1)),
                "-" => Ok(BigInt::from(-1)),
                _ => BigInt::from_str(v).map_err(|e| e.to_string()),
            }
        };
        if let Some(stripped) = s.strip_suffix('i') {
            // find split point between real and imaginary parts
            let bytes = stripped.as_bytes();
            for pos in (1..bytes.len()).rev() {
                if bytes[pos] == b'+' || bytes[pos] == b'-' {
                    let re = BigInt::from_str(&stripped[..pos]).map_err(|e| e.to_string())?;
                    let im = mk(&stripped[pos..])?;
                    return Ok(GaussianInt { re, im });
                }
            }
            return Ok(GaussianInt {
                re: BigInt::zero(),
                im: mk(stripped)?,
            });
        }
        Ok(GaussianInt {
            re: BigInt::from_str(&s).map_err(|e| e.to_string())?,
            im: BigInt::zero(),
        })
    }
}

impl std::fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_positive() {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

/// Explicit 2x2 representation matrix given as zeta-exponents ('-' = zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoEntries {
    pub entries: [Option<i64>; 4], // row major; exponent of zeta_m
}

impl RhoEntries {
    pub fn realize(&self, zeta_m: &Unramified) -> Mat2 {
        let ctx = &zeta_m.ctx;
        let v = |o: &Option<i64>| match o {
            None => Unramified::zero(ctx),
            Some(k) => zeta_m.pow_i64(*k).expect("root of unity power"),
        };
        Mat2::new(
            v(&self.entries[0]),
            v(&self.entries[1]),
            v(&self.entries[2]),
            v(&self.entries[3]),
        )
    }
}

/// Per-prime frobenius packet.
#[derive(Debug, Clone)]
pub struct PrimePacket {
    pub ell: u64,
    pub split_type: SplitType,
    /// the shipped ell-unit (element of H)
    pub unit: NFElement,
    /// rational exponent e with ord_lambda(unit^e) = 1 at the designated prime
    pub unit_exp: Q,
    /// group index of the evaluation element tau-hat
    pub frob: usize,
    /// explicit rho(tau-hat) when the full representation does not factor
    /// through Gal(H/Q)
    pub rho: Option<RhoEntries>,
    /// nebentypus value at ell as a zeta_m exponent (needed with `rho`)
    pub chi_exp: Option<i64>,
}

/// Complete ingested description of a weight-one form's Galois data, units
/// and per-prime packets.
#[derive(Debug)]
pub struct ProblemSpec {
    pub name: String,
    pub level: u64,
    pub p: u64,
    pub precision: u32,
    pub kind: QuadKind,
    pub regular: bool,
    pub f: usize,
    pub modulus: Vec<BigInt>,
    pub zeta_order: u64,
    pub field: Arc<NumberField>,
    pub quad_disc: i64,
    pub sqrt_disc: NFElement,
    pub autos: Vec<FieldAutomorphism>,
    pub z_indices: Vec<usize>,
    /// ring class character psi on Z (exponents modulo psi_order)
    pub psi_order: u64,
    pub psi_exps: Vec<i64>,
    /// psi_g on Z when the full representation factors through G
    pub psi_g: Option<(u64, Vec<i64>)>,
    pub stabilization: i32,
    pub a_p: GaussianInt,
    pub chi_p: GaussianInt,
    pub unit: NFElement,
    pub qexp: BTreeMap<u64, GaussianInt>,
    pub packets: BTreeMap<u64, PrimePacket>,
}

impl ProblemSpec {
    /// Override the working precision (CLI flag / environment).
    pub fn with_precision(mut self, n: u32) -> Self {
        self.precision = n;
        self
    }
}

fn parse_q(s: &str) -> Result<Q, String> {
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| e.to_string())?;
        let d = BigInt::from_str(d.trim()).map_err(|e| e.to_string())?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Q::new(n, d))
    } else {
        Ok(Q::from_integer(
            BigInt::from_str(s.trim()).map_err(|e| e.to_string())?,
        ))
    }
}

fn parse_qvec(s: &str) -> Result<Vec<Q>, String> {
    s.split(',').map(|t| parse_q(t.trim())).collect()
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, ParseError> {
    let mut sections: BTreeMap<String, Vec<(usize, String, String)>> = BTreeMap::new();
    let mut cur = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(ParseError::Syntax(lineno + 1, "unterminated section".into()));
            }
            cur = line[1..line.len() - 1].to_string();
            sections.entry(cur.clone()).or_default();
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ParseError::Syntax(lineno + 1, "expected `key = value`".into())
        })?;
        if cur.is_empty() {
            return Err(ParseError::Syntax(lineno + 1, "key outside a section".into()));
        }
        sections
            .get_mut(&cur)
            .unwrap()
            .push((lineno + 1, k.trim().to_string(), v.trim().to_string()));
    }

    let get = |sec: &str, key: &str| -> Result<String, ParseError> {
        sections
            .get(sec)
            .and_then(|kvs| kvs.iter().find(|(_, k, _)| k == key))
            .map(|(_, _, v)| v.clone())
            .ok_or_else(|| ParseError::MissingKey(key.into(), sec.into()))
    };
    let get_opt = |sec: &str, key: &str| -> Option<String> {
        sections
            .get(sec)
            .and_then(|kvs| kvs.iter().find(|(_, k, _)| k == key))
            .map(|(_, _, v)| v.clone())
    };

    // ---- [form] ----
    let name = get("form", "name")?;
    let level: u64 = get("form", "level")?
        .parse()
        .map_err(|e| ParseError::BadValue("level".into(), format!("{e}")))?;
    let p: u64 = get("form", "p")?
        .parse()
        .map_err(|e| ParseError::BadValue("p".into(), format!("{e}")))?;
    let kind = match get("form", "kind")?.as_str() {
        "cm" => QuadKind::Cm,
        "rm" => QuadKind::Rm,
        other => return Err(ParseError::BadValue("kind".into(), other.into())),
    };
    let regular = match get("form", "regular")?.as_str() {
        "true" => true,
        "false" => false,
        other => return Err(ParseError::BadValue("regular".into(), other.into())),
    };
    let a_p = GaussianInt::parse(&get("form", "a_p")?)
        .map_err(|e| ParseError::BadValue("a_p".into(), e))?;
    let chi_p = GaussianInt::parse(&get("form", "chi_p")?)
        .map_err(|e| ParseError::BadValue("chi_p".into(), e))?;
    let stabilization: i32 = get("form", "stabilization")?
        .parse()
        .map_err(|e| ParseError::BadValue("stabilization".into(), format!("{e}")))?;
    if stabilization != 1 && stabilization != -1 {
        return Err(ParseError::BadValue(
            "stabilization".into(),
            "must be 1 or -1".into(),
        ));
    }
    let mut qexp = BTreeMap::new();
    for (ln, k, v) in sections.get("form").into_iter().flatten() {
        if let Some(nstr) = k.strip_prefix("a.") {
            let n: u64 = nstr
                .parse()
                .map_err(|_| ParseError::Syntax(*ln, format!("bad coefficient index `{k}`")))?;
            let g = GaussianInt::parse(v).map_err(|e| ParseError::BadValue(k.clone(), e))?;
            qexp.insert(n, g);
        } else if ![
            "name",
            "level",
            "p",
            "kind",
            "regular",
            "a_p",
            "chi_p",
            "stabilization",
        ]
        .contains(&k.as_str())
        {
            return Err(ParseError::UnknownKey("form".into(), k.clone()));
        }
    }

    // ---- [padic] ----
    let f: usize = get("padic", "f")?
        .parse()
        .map_err(|e| ParseError::BadValue("f".into(), format!("{e}")))?;
    let precision: u32 = get("padic", "n")?
        .parse()
        .map_err(|e| ParseError::BadValue("n".into(), format!("{e}")))?;
    let modulus: Vec<BigInt> = get("padic", "modulus")?
        .split(',')
        .map(|t| BigInt::from_str(t.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| ParseError::BadValue("modulus".into(), e.to_string()))?;
    let zeta_order: u64 = get("padic", "zeta_order")?
        .parse()
        .map_err(|e| ParseError::BadValue("zeta_order".into(), format!("{e}")))?;
    for (_, k, _) in sections.get("padic").into_iter().flatten() {
        if !["f", "n", "modulus", "zeta_order"].contains(&k.as_str()) {
            return Err(ParseError::UnknownKey("padic".into(), k.clone()));
        }
    }

    // ---- [field] ----
    let poly_coeffs =
        parse_qvec(&get("field", "poly")?).map_err(|e| ParseError::BadValue("poly".into(), e))?;
    let poly = QPoly::new(poly_coeffs);
    if !poly.is_monic() {
        return Err(ParseError::BadValue(
            "poly".into(),
            "defining polynomial must be monic".into(),
        ));
    }
    let field = NumberField::new(poly);
    let quad_disc: i64 = get("field", "quad_disc")?
        .parse()
        .map_err(|e| ParseError::BadValue("quad_disc".into(), format!("{e}")))?;
    let sqrt_disc = field.element(
        parse_qvec(&get("field", "sqrt_disc")?)
            .map_err(|e| ParseError::BadValue("sqrt_disc".into(), e))?,
    );
    for (_, k, _) in sections.get("field").into_iter().flatten() {
        if !["poly", "quad_disc", "sqrt_disc"].contains(&k.as_str()) {
            return Err(ParseError::UnknownKey("field".into(), k.clone()));
        }
    }

    // ---- [group] ----
    let mut autos_raw: Vec<(usize, Vec<Q>, usize)> = Vec::new();
    let mut z_indices = Vec::new();
    for (ln, k, v) in sections.get("group").into_iter().flatten() {
        if let Some(is) = k.strip_prefix("auto.") {
            let i: usize = is
                .parse()
                .map_err(|_| ParseError::Syntax(*ln, format!("bad automorphism index `{k}`")))?;
            let (ord_str, coords_str) = v
                .split_once(':')
                .ok_or_else(|| ParseError::Syntax(*ln, "expected `order: coords`".into()))?;
            let order: usize = ord_str
                .trim()
                .parse()
                .map_err(|e| ParseError::BadValue(k.clone(), format!("{e}")))?;
            let coords =
                parse_qvec(coords_str).map_err(|e| ParseError::BadValue(k.clone(), e))?;
            autos_raw.push((i, coords, order));
        } else if k == "z" {
            z_indices = v
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| ParseError::BadValue("z".into(), e.to_string()))?;
        } else {
            return Err(ParseError::UnknownKey("group".into(), k.clone()));
        }
    }
    autos_raw.sort_by_key(|(i, _, _)| *i);
    let autos: Vec<FieldAutomorphism> = autos_raw
        .iter()
        .enumerate()
        .map(|(want, (i, coords, order))| {
            if want != *i {
                return Err(ParseError::BadValue(
                    "auto".into(),
                    format!("automorphism indices must be contiguous, missing {want}"),
                ));
            }
            Ok(FieldAutomorphism::new(
                &field,
                field.element(coords.clone()),
                *order,
            ))
        })
        .collect::<Result<_, _>>()?;

    // ---- [characters] ----
    let psi_order: u64 = get("characters", "psi_order")?
        .parse()
        .map_err(|e| ParseError::BadValue("psi_order".into(), format!("{e}")))?;
    let mut psi_exps = vec![0i64; autos.len()];
    let psi_g_order: u64 = get_opt("characters", "psi_g_order")
        .map(|v| v.parse::<u64>())
        .transpose()
        .map_err(|e| ParseError::BadValue("psi_g_order".into(), format!("{e}")))?
        .unwrap_or(0);
    let mut psi_g_exps = vec![0i64; autos.len()];
    for (ln, k, v) in sections.get("characters").into_iter().flatten() {
        if let Some(is) = k.strip_prefix("psi_exp.") {
            let i: usize = is
                .parse()
                .map_err(|_| ParseError::Syntax(*ln, format!("bad index `{k}`")))?;
            psi_exps[i] = v
                .parse()
                .map_err(|e| ParseError::BadValue(k.clone(), format!("{e}")))?;
        } else if let Some(is) = k.strip_prefix("psi_g_exp.") {
            let i: usize = is
                .parse()
                .map_err(|_| ParseError::Syntax(*ln, format!("bad index `{k}`")))?;
            psi_g_exps[i] = v
                .parse()
                .map_err(|e| ParseError::BadValue(k.clone(), format!("{e}")))?;
        } else if k != "psi_order" && k != "psi_g_order" {
            return Err(ParseError::UnknownKey("characters".into(), k.clone()));
        }
    }
    let psi_g = if psi_g_order > 0 {
        Some((psi_g_order, psi_g_exps))
    } else {
        None
    };

    // ---- [units] ----
    let unit = field.element(
        parse_qvec(&get("units", "u")?).map_err(|e| ParseError::BadValue("u".into(), e))?,
    );
    for (_, k, _) in sections.get("units").into_iter().flatten() {
        if k != "u" {
            return Err(ParseError::UnknownKey("units".into(), k.clone()));
        }
    }

    // ---- [primes.*] ----
    let mut packets = BTreeMap::new();
    for (sec, kvs) in &sections {
        if let Some(ellstr) = sec.strip_prefix("primes.") {
            let ell: u64 = ellstr
                .parse()
                .map_err(|_| ParseError::BadValue("primes".into(), format!("bad prime `{ellstr}`")))?;
            let gv = |key: &str| -> Result<String, ParseError> {
                kvs.iter()
                    .find(|(_, k, _)| k == key)
                    .map(|(_, _, v)| v.clone())
                    .ok_or_else(|| ParseError::MissingKey(key.into(), sec.clone()))
            };
            let split_type: SplitType = gv("type")?
                .parse()
                .map_err(|e: String| ParseError::BadValue("type".into(), e))?;
            let unit_p = field.element(
                parse_qvec(&gv("unit")?).map_err(|e| ParseError::BadValue("unit".into(), e))?,
            );
            let unit_exp =
                parse_q(&gv("unit_exp")?).map_err(|e| ParseError::BadValue("unit_exp".into(), e))?;
            let frob: usize = gv("frob")?
                .parse()
                .map_err(|e| ParseError::BadValue("frob".into(), format!("{e}")))?;
            let rho = kvs.iter().find(|(_, k, _)| k == "rho").map(|(_, _, v)| {
                let parts: Vec<Option<i64>> = v
                    .split(',')
                    .map(|t| {
                        let t = t.trim();
                        if t == "-" {
                            None
                        } else {
                            Some(t.parse::<i64>().unwrap_or(0))
                        }
                    })
                    .collect();
                RhoEntries {
                    entries: [parts[0], parts[1], parts[2], parts[3]],
                }
            });
            let chi_exp = kvs
                .iter()
                .find(|(_, k, _)| k == "chi")
                .map(|(_, _, v)| v.trim().parse::<i64>().unwrap_or(0));
            for (_, k, _) in kvs {
                if !["type", "unit", "unit_exp", "frob", "rho", "chi"].contains(&k.as_str()) {
                    return Err(ParseError::UnknownKey(sec.clone(), k.clone()));
                }
            }
            packets.insert(
                ell,
                PrimePacket {
                    ell,
                    split_type,
                    unit: unit_p,
                    unit_exp,
                    frob,
                    rho,
                    chi_exp,
                },
            );
        } else if !["form", "padic", "field", "group", "characters", "units"]
            .contains(&sec.as_str())
        {
            return Err(ParseError::UnknownKey(sec.clone(), "(section)".into()));
        }
    }

    Ok(ProblemSpec {
        name,
        level,
        p,
        precision,
        kind,
        regular,
        f,
        modulus,
        zeta_order,
        field,
        quad_disc,
        sqrt_disc,
        autos,
        z_indices,
        psi_order,
        psi_exps,
        psi_g,
        stabilization,
        a_p,
        chi_p,
        unit,
        qexp,
        packets,
    })
}

/// Serialize back to the file format (round-trip support).
pub fn write_spec(spec: &ProblemSpec) -> String {
    let mut s = String::new();
    let qv = |v: &[Q]| -> String {
        v.iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    writeln!(s, "[form]").unwrap();
    writeln!(s, "name = {}", spec.name).unwrap();
    writeln!(s, "level = {}", spec.level).unwrap();
    writeln!(s, "p = {}", spec.p).unwrap();
    writeln!(
        s,
        "kind = {}",
        match spec.kind {
            QuadKind::Cm => "cm",
            QuadKind::Rm => "rm",
        }
    )
    .unwrap();
    writeln!(s, "regular = {}", spec.regular).unwrap();
    writeln!(s, "a_p = {}", spec.a_p).unwrap();
    writeln!(s, "chi_p = {}", spec.chi_p).unwrap();
    writeln!(s, "stabilization = {}", spec.stabilization).unwrap();
    for (n, a) in &spec.qexp {
        writeln!(s, "a.{n} = {a}").unwrap();
    }
    writeln!(s, "\n[padic]").unwrap();
    writeln!(s, "f = {}", spec.f).unwrap();
    writeln!(s, "n = {}", spec.precision).unwrap();
    writeln!(
        s,
        "modulus = {}",
        spec.modulus
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
    .unwrap();
    writeln!(s, "zeta_order = {}", spec.zeta_order).unwrap();
    writeln!(s, "\n[field]").unwrap();
    writeln!(s, "poly = {}", qv(&spec.field.poly.coeffs)).unwrap();
    writeln!(s, "quad_disc = {}", spec.quad_disc).unwrap();
    writeln!(s, "sqrt_disc = {}", qv(&spec.sqrt_disc.coords)).unwrap();
    writeln!(s, "\n[group]").unwrap();
    for (i, a) in spec.autos.iter().enumerate() {
        writeln!(s, "auto.{i} = {}: {}", a.order, qv(&a.image.coords)).unwrap();
    }
    writeln!(
        s,
        "z = {}",
        spec.z_indices
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
    .unwrap();
    writeln!(s, "\n[characters]").unwrap();
    writeln!(s, "psi_order = {}", spec.psi_order).unwrap();
    for (i, e) in spec.psi_exps.iter().enumerate() {
        if *e != 0 {
            writeln!(s, "psi_exp.{i} = {e}").unwrap();
        }
    }
    if let Some((m, exps)) = &spec.psi_g {
        writeln!(s, "psi_g_order = {m}").unwrap();
        for (i, e) in exps.iter().enumerate() {
            if *e != 0 {
                writeln!(s, "psi_g_exp.{i} = {e}").unwrap();
            }
        }
    }
    writeln!(s, "\n[units]").unwrap();
    writeln!(s, "u = {}", qv(&spec.unit.coords)).unwrap();
    for (ell, pk) in &spec.packets {
        writeln!(s, "\n[primes.{ell}]").unwrap();
        writeln!(
            s,
            "type = {}",
            match pk.split_type {
                SplitType::Split => "split",
                SplitType::Inert => "inert",
            }
        )
        .unwrap();
        writeln!(s, "unit = {}", qv(&pk.unit.coords)).unwrap();
        writeln!(s, "unit_exp = {}", pk.unit_exp).unwrap();
        writeln!(s, "frob = {}", pk.frob).unwrap();
        if let Some(r) = &pk.rho {
            writeln!(
                s,
                "rho = {}",
                r.entries
                    .iter()
                    .map(|e| e.map(|k| k.to_string()).unwrap_or_else(|| "-".into()))
                    .collect::<Vec<_>>()
                    .join(",")
            )
            .unwrap();
        }
        if let Some(c) = pk.chi_exp {
            writeln!(s, "chi = {c}").unwrap();
        }
    }
    s
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub diagnostic: String,
}

#[derive(Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn push(&mut self, name: &str, passed: bool, diagnostic: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            diagnostic,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// A spec whose validation report had no failures; engines only accept this.
pub struct ValidatedSpec {
    pub spec: ProblemSpec,
    pub report: ValidationReport,
}

/// Run every validation check; never aborts early.
pub fn validate_spec(spec: ProblemSpec) -> Result<ValidatedSpec, (ProblemSpec, ValidationReport)> {
    let mut rep = ValidationReport::default();
    let field = &spec.field;

    // defining polynomial
    rep.push(
        "poly_monic",
        field.poly.is_monic(),
        String::new(),
    );
    rep.push(
        "poly_squarefree",
        field.poly.is_squarefree(),
        String::new(),
    );

    // automorphisms individually valid
    let mut autos_ok = true;
    for (i, a) in spec.autos.iter().enumerate() {
        if let Err(e) = a.validate() {
            autos_ok = false;
            rep.push("automorphism_valid", false, format!("auto {i}: {e}"));
        }
    }
    if autos_ok {
        rep.push("automorphism_valid", true, format!("{} maps", spec.autos.len()));
    }
    rep.push(
        "automorphism_count",
        spec.autos.len() == field.degree,
        format!("{} of {}", spec.autos.len(), field.degree),
    );

    // group table and Z
    let table = match GroupTable::build(&spec.autos, spec.z_indices.clone(), Some(&spec.sqrt_disc))
    {
        Ok(t) => {
            rep.push("group_closed", true, String::new());
            Some(t)
        }
        Err(e) => {
            rep.push("group_closed", false, e.to_string());
            None
        }
    };
    // sqrt_disc really is a square root of the discriminant
    let sq = spec.sqrt_disc.mul(&spec.sqrt_disc).map(|s| {
        let mut want = vec![Q::zero(); field.degree];
        want[0] = Q::from_integer(BigInt::from(spec.quad_disc));
        s.coords == want
    });
    rep.push(
        "sqrt_disc",
        sq.unwrap_or(false),
        format!("disc {}", spec.quad_disc),
    );

    // p-adic context
    let ctx = PadicContext::new(spec.p, spec.f, spec.precision, spec.modulus.clone());
    let zeta_m = match zeta(&ctx, spec.zeta_order) {
        Ok(z) => {
            rep.push("zeta_realization", true, format!("order {}", spec.zeta_order));
            Some(z)
        }
        Err(e) => {
            rep.push("zeta_realization", false, e.to_string());
            None
        }
    };

    // characters are homomorphisms on Z
    if let (Some(table), Some(zm)) = (&table, &zeta_m) {
        let psi = Character {
            order: spec.zeta_order,
            exponents: spec
                .psi_exps
                .iter()
                .map(|e| e * (spec.zeta_order / spec.psi_order) as i64)
                .collect(),
            zeta: zm.clone(),
        };
        rep.push(
            "psi_homomorphism",
            psi.validate(table, &table.z).is_ok(),
            String::new(),
        );
        if let Some((m, exps)) = &spec.psi_g {
            let psi_g = Character {
                order: spec.zeta_order,
                exponents: exps
                    .iter()
                    .map(|e| e * (spec.zeta_order / m) as i64)
                    .collect(),
                zeta: zm.clone(),
            };
            let hom_ok = psi_g.validate(table, &table.z).is_ok();
            // psi = psi_g / psi_g' = psi_g^2 on the class-character cases
            let ratio_ok = table.z.iter().all(|&zi| {
                let lhs = (2 * exps[zi] * (spec.zeta_order / m) as i64)
                    .rem_euclid(spec.zeta_order as i64);
                let rhs = (spec.psi_exps[zi] * (spec.zeta_order / spec.psi_order) as i64)
                    .rem_euclid(spec.zeta_order as i64);
                lhs == rhs
            });
            rep.push("psi_g_homomorphism", hom_ok, String::new());
            rep.push("psi_is_psi_g_squared", ratio_ok, String::new());
        }
    }

    // Hecke roots: alpha,beta are roots of x^2 - a_p x + chi(p); regularity
    {
        let ap = spec.a_p.realize(&ctx);
        let chp = spec.chi_p.realize(&ctx);
        let disc = ap.mul(&ap).sub(&chp.mul(&Unramified::from_i64(&ctx, 4)));
        // regular iff disc != 0
        let nonzero = !disc.is_zero() && disc.val < spec.precision as i64;
        rep.push(
            "hecke_regularity",
            nonzero == spec.regular,
            format!("disc val {:?}", disc.val),
        );
    }

    // p splits in H as declared: count roots of f_H in the working context
    match PadicEmbedding::all(&ctx, field) {
        Ok(embs) => {
            rep.push("p_splitting", true, format!("{} embeddings", embs.len()));
            if !spec.regular {
                // irregular at p forces p split completely: f = 1 suffices
                let base = PadicContext::base(spec.p, 8);
                let full = PadicEmbedding::all(&base, field).is_ok();
                rep.push("irregular_p_splits_completely", full, String::new());
            }
        }
        Err(e) => rep.push("p_splitting", false, e.to_string()),
    }

    // unit has norm +-1
    {
        let n = spec.unit.norm();
        rep.push(
            "unit_norm",
            n == Q::from_integer(BigInt::from(1)) || n == Q::from_integer(BigInt::from(-1)),
            format!("norm {n}"),
        );
    }

    // quadratic class group data for CM fields
    let form_group = if spec.kind == QuadKind::Cm {
        enumerate_reduced_forms(spec.quad_disc).ok()
    } else {
        None
    };

    // per-prime packets
    for (ell, pk) in &spec.packets {
        let tag = format!("ell={ell}");
        // splitting type matches the Kronecker symbol
        let symbol = kronecker(spec.quad_disc, *ell);
        let want = match pk.split_type {
            SplitType::Split => 1,
            SplitType::Inert => -1,
        };
        rep.push(
            "packet_split_type",
            symbol == want,
            format!("{tag}: kronecker {symbol}"),
        );

        // norm of the shipped unit is +-ell^k
        let n = pk.unit.norm();
        let ok_norm = n.denom() == &BigInt::from(1) && {
            let mut v = n.numer().abs();
            let lb = BigInt::from(*ell);
            let mut pow_ok = true;
            while v > BigInt::from(1) {
                if (&v % &lb).is_zero() {
                    v /= &lb;
                } else {
                    pow_ok = false;
                    break;
                }
            }
            pow_ok
        };
        rep.push("packet_unit_norm", ok_norm, format!("{tag}: norm {n}"));

        // ell-adic valuations: ord at the designated prime is 1 after the
        // exponent, 0 at the others in the same K-side orbit structure
        let degrees: Vec<usize> = divisor_degrees(&table, field.degree);
        match PrimeSplitting::analyze(*ell, field, &degrees, 24) {
            Ok(ps) => {
                let vals = ps.valuations(&pk.unit);
                let e = &pk.unit_exp;
                let v0 = Q::from_integer(BigInt::from(vals[0])) * e;
                let ord_ok = v0 == Q::from_integer(BigInt::from(1));
                rep.push(
                    "packet_valuation",
                    ord_ok,
                    format!("{tag}: ord profile {vals:?} exp {e}"),
                );
                // frobenius: packet frob is the inverse of the matched
                // arithmetic frobenius at the designated (first-orbit) prime
                if let Some(tb) = &table {
                    let fr = ps.embeddings[ps.orbits[0][0]].root.frobenius();
                    let matched = spec
                        .autos
                        .iter()
                        .enumerate()
                        .max_by_key(|(_, a)| {
                            ps.embeddings[ps.orbits[0][0]]
                                .embed(&a.image)
                                .diff_val(&fr)
                        })
                        .map(|(i, _)| i);
                    match matched {
                        Some(m) => {
                            let expect = tb.inv[m];
                            rep.push(
                                "packet_frobenius",
                                pk.frob == expect,
                                format!("{tag}: matched {m}, inverse {expect}, packet {}", pk.frob),
                            );
                        }
                        None => rep.push("packet_frobenius", false, format!("{tag}: no match")),
                    }
                }
            }
            Err(e) => {
                rep.push("packet_valuation", false, format!("{tag}: {e}"));
            }
        }

        // quadclass cross-validation for CM split primes
        if let (Some(fg), SplitType::Split, Some(tb)) = (&form_group, pk.split_type, &table) {
            match class_of_prime(*ell, fg) {
                Ok(PrimeClass::Split { class, .. }) => {
                    let class_order = fg.order_of(class);
                    let frob_order = tb.orders[pk.frob];
                    rep.push(
                        "packet_class_order",
                        class_order == frob_order,
                        format!("{tag}: class order {class_order}, frobenius order {frob_order}"),
                    );
                }
                _ => rep.push("packet_class_order", false, format!("{tag}: not split")),
            }
        }

        // q-expansion trace: Tr rho(tau-hat) = a_ell(g)
        if let (Some(tb), Some(zm)) = (&table, &zeta_m) {
            if let Some(a_ell) = spec.qexp.get(ell) {
                let rho = packet_rho(&spec, tb, zm, pk, &ctx);
                match rho {
                    Some(PacketRho::Unique(m)) => {
                        let tr = m.trace();
                        let want = a_ell.realize(&ctx);
                        rep.push(
                            "packet_trace",
                            tr.eq_to(&want, spec.precision as i64 - 2),
                            format!("{tag}"),
                        );
                    }
                    Some(PacketRho::Ambiguous(m1, _)) => {
                        let want = a_ell.realize(&ctx);
                        let z = want.is_zero() || want.val >= spec.precision as i64 - 2;
                        rep.push(
                            "packet_trace",
                            z && (m1.trace().is_zero() || m1.trace().val >= spec.precision as i64 - 2),
                            format!("{tag}: ambiguous"),
                        );
                    }
                    None => rep.push("packet_trace", false, format!("{tag}: no rho")),
                }
            }
        }
    }

    let spec_and_rep = (spec, rep);
    if spec_and_rep.1.all_passed() {
        Ok(ValidatedSpec {
            spec: spec_and_rep.0,
            report: spec_and_rep.1,
        })
    } else {
        Err(spec_and_rep)
    }
}

fn divisor_degrees(table: &Option<GroupTable>, degree: usize) -> Vec<usize> {
    let mut ds: Vec<usize> = match table {
        Some(t) => {
            let mut o: Vec<usize> = t.orders.clone();
            o.sort();
            o.dedup();
            o
        }
        None => (1..=degree).collect(),
    };
    if !ds.contains(&1) {
        ds.insert(0, 1);
    }
    ds
}

/// The honest rho(tau-hat) for a packet.
pub enum PacketRho {
    Unique(Mat2),
    Ambiguous(Mat2, Mat2),
}

/// Build the honest representation matrix of a packet's evaluation element.
pub fn packet_rho(
    spec: &ProblemSpec,
    table: &GroupTable,
    zeta_m: &Unramified,
    pk: &PrimePacket,
    ctx: &Arc<PadicContext>,
) -> Option<PacketRho> {
    if let Some(r) = &pk.rho {
        return Some(PacketRho::Unique(r.realize(zeta_m)));
    }
    // dihedral model: the representation factors through G
    let model = dihedral_model(spec, table, zeta_m, ctx)?;
    Some(PacketRho::Unique(model.matrices[pk.frob].clone()))
}

/// The dihedral representation model used for both conjugation and honest
/// packet matrices when the representation factors through G.
pub fn dihedral_model(
    spec: &ProblemSpec,
    table: &GroupTable,
    zeta_m: &Unramified,
    ctx: &Arc<PadicContext>,
) -> Option<RepModel> {
    let (m, exps) = spec.psi_g.as_ref()?;
    let psi_g = Character {
        order: spec.zeta_order,
        exponents: exps
            .iter()
            .map(|e| e * (spec.zeta_order / m) as i64)
            .collect(),
        zeta: zeta_m.clone(),
    };
    // distinguished reflection: the matched p-frobenius inverse when it is a
    // reflection (and then the basis is normalised so that its matrix is
    // antidiagonal with equal entries squaring to -chi(p)), else the least
    // non-Z element with a trivially normalised seed
    let (tau0, from_frobenius) = distinguished_reflection(spec, table, ctx)?;
    let z = if from_frobenius {
        let zeta0 = sqrt_of_minus_chi_p(spec, zeta_m, ctx)?;
        if spec.stabilization == 1 {
            zeta0
        } else {
            zeta0.neg()
        }
    } else {
        Unramified::one(ctx)
    };
    Some(RepModel::dihedral(table, &psi_g, tau0, &z))
}

pub fn distinguished_reflection(
    spec: &ProblemSpec,
    table: &GroupTable,
    ctx: &Arc<PadicContext>,
) -> Option<(usize, bool)> {
    // matched arithmetic frobenius at the first p-adic root
    let embs = PadicEmbedding::all(ctx, &spec.field).ok()?;
    let fr = embs[0].root.frobenius();
    let m = spec
        .autos
        .iter()
        .enumerate()
        .max_by_key(|(_, a)| embs[0].embed(&a.image).diff_val(&fr))
        .map(|(i, _)| i)?;
    let tau_hat = table.inv[m];
    if !table.in_z(tau_hat) {
        return Some((tau_hat, true));
    }
    // p splits in K (or is irregular): pick the least reflection
    (0..table.n).find(|i| !table.in_z(*i)).map(|i| (i, false))
}

pub fn sqrt_of_minus_chi_p(
    spec: &ProblemSpec,
    zeta_m: &Unramified,
    ctx: &Arc<PadicContext>,
) -> Option<Unramified> {
    let target = spec.chi_p.realize(ctx).neg();
    let n = ctx.n as i64;
    for k in 0..spec.zeta_order {
        let cand = zeta_m.pow_i64(k as i64).ok()?;
        if cand.mul(&cand).eq_to(&target, n - 1) {
            return Some(cand);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
# minimal valid spec: Q(i), trivial character
[form]
name = toy
level = 4
p = 5
kind = cm
regular = true
a_p = 2
chi_p = 1
stabilization = 1

[padic]
f = 1
n = 12
modulus = 0,1
zeta_order = 4

[field]
poly = 1,0,1
quad_disc = -4
sqrt_disc = 0,2

[group]
auto.0 = 1: 0,1
auto.1 = 2: 0,-1
z = 0

[characters]
psi_order = 1
psi_g_order = 1

[units]
u = 1,0
"#;

    #[test]
    fn minimal_spec_parses() {
        let s = parse_spec(MINIMAL).unwrap();
        assert_eq!(s.level, 4);
        assert_eq!(s.autos.len(), 2);
        assert_eq!(s.field.degree, 2);
    }

    #[test]
    fn round_trip() {
        let s = parse_spec(MINIMAL).unwrap();
        let txt = write_spec(&s);
        let s2 = parse_spec(&txt).unwrap();
        assert_eq!(s2.name, s.name);
        assert_eq!(s2.field.poly, s.field.poly);
        assert_eq!(s2.autos.len(), s.autos.len());
    }

    #[test]
    fn non_monic_poly_rejected() {
        let bad = MINIMAL.replace("poly = 1,0,1", "poly = 1,0,2");
        assert!(parse_spec(&bad).is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        let bad = MINIMAL.replace("level = 4", "level = 4\nbogus = 1");
        match parse_spec(&bad) {
            Err(ParseError::UnknownKey(sec, key)) => {
                assert_eq!(sec, "form");
                assert_eq!(key, "bogus");
            }
            other => panic!("expected unknown key error, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_parse_display() {
        for s in ["3", "-2", "i", "-i", "1+2i", "-1-i", "0"] {
            let g = GaussianInt::parse(s).unwrap();
            let h = GaussianInt::parse(&g.to_string()).unwrap();
            assert_eq!(g, h);
        }
    }
}

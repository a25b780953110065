//! Closed-form entanglement tables over ranges of `d`, `n` and `m`.

use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use quhyper::entanglement::{alpha_elementary, ElementarySpec};
use quhyper::modarith::{gcd, lpf};
use quhyper::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::fmt_sig;

pub const CSV_HEADER: &str = "d,n,m,alpha_exact,E_exact,E_float";

pub const D_LIMITS: RangeInclusive<u64> = 2..=16;
pub const N_LIMITS: RangeInclusive<u64> = 2..=12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplicities {
    All,
    Coprime,
    /// `d / lpf(d)`.
    Minimal,
    List(Vec<u64>),
}

impl FromStr for Multiplicities {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Self::All),
            "coprime" => Ok(Self::Coprime),
            "minimal" | "d/lpf(d)" => Ok(Self::Minimal),
            other => crate::parse_list(other).map(Self::List),
        }
    }
}

impl Multiplicities {
    fn select(&self, d: u64) -> Vec<u64> {
        match self {
            Self::All => (1..d).collect(),
            Self::Coprime => (1..d).filter(|&m| gcd(m, d) == 1).collect(),
            Self::Minimal => vec![d / lpf(d).expect("d >= 2")],
            Self::List(ms) => ms.iter().copied().filter(|&m| m % d != 0).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRequest {
    pub d: RangeInclusive<u64>,
    pub n: RangeInclusive<u64>,
    pub m: Multiplicities,
}

impl TableRequest {
    pub fn new(
        d: RangeInclusive<u64>,
        n: RangeInclusive<u64>,
        m: Multiplicities,
    ) -> quhyper::Result<Self> {
        let inside = |r: &RangeInclusive<u64>, lim: &RangeInclusive<u64>| {
            lim.contains(r.start()) && lim.contains(r.end())
        };
        if !inside(&d, &D_LIMITS) {
            return Err(Error::InvalidInput(format!(
                "d range must lie in {D_LIMITS:?}"
            )));
        }
        if !inside(&n, &N_LIMITS) {
            return Err(Error::InvalidInput(format!(
                "n range must lie in {N_LIMITS:?}"
            )));
        }
        Ok(Self { d, n, m })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub d: u64,
    pub n: u64,
    pub m: u64,
    pub alpha: BigRational,
}

impl Row {
    pub fn entanglement(&self) -> BigRational {
        BigRational::from_integer(1.into()) - &self.alpha
    }
}

/// Rows ordered by `d`, then `n`, then `m`.
pub fn rows(req: &TableRequest) -> quhyper::Result<Vec<Row>> {
    let cells: Vec<(u64, u64, u64)> = req
        .d
        .clone()
        .flat_map(|d| {
            let ms = req.m.select(d);
            req.n
                .clone()
                .flat_map(move |n| ms.clone().into_iter().map(move |m| (d, n, m)))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(d, n, m)| {
            let spec = ElementarySpec::new(d, n as u32, m)?;
            Ok(Row {
                d,
                n,
                m,
                alpha: alpha_elementary(&spec),
            })
        })
        .collect()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let e = r.entanglement();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.d,
            r.n,
            r.m,
            r.alpha,
            e,
            fmt_sig(e.to_f64().unwrap_or(f64::NAN))
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonRow {
    d: u64,
    n: u64,
    m: u64,
    alpha_exact: String,
    #[serde(rename = "E_exact")]
    e_exact: String,
    #[serde(rename = "E_float")]
    e_float: f64,
}

pub fn to_json(rows: &[Row]) -> String {
    let out: Vec<JsonRow> = rows
        .iter()
        .map(|r| {
            let e = r.entanglement();
            JsonRow {
                d: r.d,
                n: r.n,
                m: r.m,
                alpha_exact: r.alpha.to_string(),
                e_exact: e.to_string(),
                e_float: fmt_sig(e.to_f64().unwrap_or(f64::NAN))
                    .parse()
                    .unwrap_or(f64::NAN),
            }
        })
        .collect();
    serde_json::to_string_pretty(&out).expect("plain data serializes")
}

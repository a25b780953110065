//! Library half of the `quhyper` command: argument parsing helpers, the
//! closed-form table emitters, and the verification suites run by
//! `quhyper verify`.

use std::ops::RangeInclusive;

use quhyper::Error;

pub mod suites;
pub mod table;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::PolicyExhausted(_) => EXIT_VERIFY,
        Error::InvalidInput(_)
        | Error::UnknownVertex { .. }
        | Error::Disconnected
        | Error::NoCrossingEdge => EXIT_PRECONDITION,
    }
}

/// Accepts `a`, `a..b` or `a..=b`; both range forms include `b`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("{t:?} is not a non-negative integer"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

/// Comma-separated unsigned integers, e.g. a bipartition side `1,2,3`.
pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("{t:?} is not a non-negative integer"))
        })
        .collect()
}

/// Shortest decimal that round-trips the value rounded to 15 significant
/// digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.14e}")
        .parse()
        .expect("scientific notation parses");
    format!("{rounded}")
}

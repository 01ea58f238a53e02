use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use iwalambda::arith::IntMatrix;

/// Keys accepted both as `--key` flags and in config files.
pub const KEYS: &[&str] = &[
    "ell", "conductor", "subgroup", "primes", "S", "T", "parity", "rho", "poly", "mu", "n", "k",
    "h", "ram", "deg", "unit-index", "orders", "sigma", "order-n", "verify", "format",
];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(iwalambda::Error),
    OracleMismatch(String),
}

impl From<iwalambda::Error> for CliError {
    fn from(e: iwalambda::Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::OracleMismatch(msg) => write!(f, "oracle disagrees: {msg}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

/// Flag values layered over config-file values.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(flags: BTreeMap<String, String>, config: Option<&Path>) -> CliResult<Self> {
        let mut values = match config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        values.extend(flags);
        Ok(Settings { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn format(&self) -> CliResult<Format> {
        match self.raw("format") {
            None | Some("json") => Ok(Format::Json),
            Some("table") => Ok(Format::Table),
            Some(other) => usage(format!("unknown format {other:?} (expected json or table)")),
        }
    }

    pub fn verify(&self) -> CliResult<bool> {
        match self.raw("verify") {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => usage(format!("verify must be true or false, got {other:?}")),
        }
    }

    pub fn int<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.raw(key).map(|v| parse_scalar(key, v)).transpose()
    }

    pub fn required<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        match self.int(key)? {
            Some(v) => Ok(v),
            None => usage(format!("missing --{key}")),
        }
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> CliResult<Vec<T>> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) => parse_list(key, v),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }
}

fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!("config line {}: expected key = value", lineno + 1));
        };
        let key = key.trim().trim_start_matches("--");
        if !KEYS.contains(&key) {
            return usage(format!("config line {}: unknown key {key:?}", lineno + 1));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse_scalar<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--{key}: cannot parse {v:?}")))
}

/// Comma-separated list; the empty string is the empty list.
pub fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(key, s))
        .collect()
}

/// Integer polynomial in `T`, e.g. `T^2+3T-6` or `T^2 + 3*T`. Constant term first.
pub fn parse_poly(src: &str) -> CliResult<Vec<i64>> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return usage("empty polynomial");
    }
    let bad = || CliError::Usage(format!("cannot parse polynomial {src:?}"));
    let mut coeffs: Vec<i64> = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ if coeffs.is_empty() => (1, rest),
            _ => return Err(bad()),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let end = body[1..].find(['+', '-']).map_or(body.len(), |i| i + 1);
        let term = &body[..end];
        rest = &body[end..];
        let (c, deg) = match term.find('T') {
            None => (term.parse::<i64>().map_err(|_| bad())?, 0),
            Some(pos) => {
                let head = term[..pos].trim_end_matches('*');
                let c = if head.is_empty() { 1 } else { head.parse().map_err(|_| bad())? };
                let tail = &term[pos + 1..];
                let deg = match tail.strip_prefix('^') {
                    Some(d) => d.parse::<usize>().map_err(|_| bad())?,
                    None if tail.is_empty() => 1,
                    None => return Err(bad()),
                };
                (c, deg)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] += sign * c;
    }
    while coeffs.len() > 1 && coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_matrix(src: &str) -> CliResult<IntMatrix> {
    let rows: Vec<Vec<i64>> = src
        .split(';')
        .map(|r| parse_list("sigma", r))
        .collect::<CliResult<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return usage(format!("--sigma: ragged or empty matrix {src:?}"));
    }
    Ok(IntMatrix::from_rows(&rows))
}

//! Parsers for Cayley tables, scalar literals, parameter grids and pair files.

use std::path::Path;

use kannappan_core::solutions::GridConfig;
use kannappan_core::{Cyclotomic, Scalar, SemigroupDomain, SolutionPair};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> InputError {
    InputError::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

pub fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A parsed table before domain validation. `z0` is `None` when the file
/// does not name one.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyFile {
    pub rows: Vec<Vec<usize>>,
    pub z0: Option<usize>,
    pub labels: Option<Vec<String>>,
}

impl CayleyFile {
    /// Validate associativity and apply `z0` (override, then file, then 0).
    pub fn into_domain(self, z0_override: Option<usize>) -> Result<SemigroupDomain, InputError> {
        let z0 = z0_override.or(self.z0).unwrap_or(0);
        let mut d = SemigroupDomain::finite(self.rows, 0).map_err(|e| InputError::Invalid(e.to_string()))?;
        d = d.with_z0(z0).map_err(|e| InputError::Invalid(e.to_string()))?;
        if let Some(labels) = self.labels {
            d = d.with_labels(labels).map_err(|e| InputError::Invalid(e.to_string()))?;
        }
        Ok(d)
    }
}

/// Text or JSON, chosen by the first non-blank character.
pub fn parse_cayley(path: &str, text: &str) -> Result<CayleyFile, InputError> {
    if text.trim_start().starts_with('{') {
        parse_cayley_json(path, text)
    } else {
        parse_cayley_text(path, text)
    }
}

/// `n`, then `n` rows of indices, then optional `z0 = k` and
/// `labels = a b c` lines. Blank lines and `#` comments are skipped.
pub fn parse_cayley_text(path: &str, text: &str) -> Result<CayleyFile, InputError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, head) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let n: usize = head
        .parse()
        .map_err(|_| parse_err(path, first, format!("expected the element count, found `{head}`")))?;
    if n == 0 {
        return Err(parse_err(path, first, "element count must be positive"));
    }

    let mut rows = Vec::with_capacity(n);
    let mut last = first;
    for r in 0..n {
        let (line, body) = lines
            .next()
            .ok_or_else(|| parse_err(path, last + 1, format!("expected {n} table rows, found {r}")))?;
        last = line;
        let row = body
            .split_whitespace()
            .map(|tok| match tok.parse::<usize>() {
                Ok(v) if v < n => Ok(v),
                Ok(v) => Err(parse_err(path, line, format!("entry {v} is not below {n}"))),
                Err(_) => Err(parse_err(path, line, format!("`{tok}` is not an element index"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(parse_err(path, line, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }

    let mut z0 = None;
    let mut labels = None;
    for (line, body) in lines {
        let Some((key, value)) = body.split_once('=') else {
            return Err(parse_err(path, line, format!("unexpected line `{body}`")));
        };
        match key.trim() {
            "z0" if z0.is_none() => {
                let v = value.trim();
                let k: usize = v
                    .parse()
                    .map_err(|_| parse_err(path, line, format!("`{v}` is not an element index")))?;
                if k >= n {
                    return Err(parse_err(path, line, format!("z0 = {k} is not below {n}")));
                }
                z0 = Some(k);
            }
            "labels" if labels.is_none() => {
                let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                if names.len() != n {
                    return Err(parse_err(path, line, format!("{} labels for {n} elements", names.len())));
                }
                labels = Some(names);
            }
            other => return Err(parse_err(path, line, format!("unexpected or repeated key `{other}`"))),
        }
    }
    Ok(CayleyFile { rows, z0, labels })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CayleyJson {
    n: usize,
    table: Vec<Vec<usize>>,
    #[serde(default)]
    z0: Option<usize>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

fn json_err(path: &str, e: serde_json::Error) -> InputError {
    parse_err(path, e.line(), e.to_string())
}

pub fn parse_cayley_json(path: &str, text: &str) -> Result<CayleyFile, InputError> {
    let raw: CayleyJson = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    let n = raw.n;
    let bad = |m: String| InputError::Invalid(format!("{path}: {m}"));
    if n == 0 || raw.table.len() != n {
        return Err(bad(format!("table has {} rows, n = {n}", raw.table.len())));
    }
    for (r, row) in raw.table.iter().enumerate() {
        if row.len() != n {
            return Err(bad(format!("row {r} has {} entries, expected {n}", row.len())));
        }
        if let Some(v) = row.iter().find(|&&v| v >= n) {
            return Err(bad(format!("row {r} has entry {v}, not below {n}")));
        }
    }
    if let Some(z) = raw.z0.filter(|&z| z >= n) {
        return Err(bad(format!("z0 = {z} is not below {n}")));
    }
    if let Some(l) = raw.labels.as_ref().filter(|l| l.len() != n) {
        return Err(bad(format!("{} labels for {n} elements", l.len())));
    }
    Ok(CayleyFile {
        rows: raw.table,
        z0: raw.z0,
        labels: raw.labels,
    })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int = int.trim_start_matches(['+', '-']);
        let whole: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().ok()? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().ok()?;
        let q = BigRational::new(whole * &scale + frac, scale);
        return Some(if negative { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Exact Gaussian-rational literal: `2`, `-1/2`, `0.25`, `i`, `-3i`,
/// `1+i`, `1/2-3/4i`.
pub fn parse_scalar(s: &str) -> Result<Scalar, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty value".into());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (k, ch) in t.char_indices() {
        if k > start && (ch == '+' || ch == '-') {
            terms.push(&t[start..k]);
            start = k;
        }
    }
    terms.push(&t[start..]);

    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    for term in terms {
        let bad = || format!("`{s}` is not a Gaussian rational");
        if let Some(coef) = term.strip_suffix('i') {
            let c = match coef {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                c => parse_rational(c.strip_suffix('*').unwrap_or(c)).ok_or_else(bad)?,
            };
            im += c;
        } else {
            re += parse_rational(term).ok_or_else(bad)?;
        }
    }
    let value = Cyclotomic::from_rational(re).add(&Cyclotomic::i().mul(&Cyclotomic::from_rational(im)));
    Ok(Scalar::Exact(value))
}

pub fn parse_scalar_list(s: &str) -> Result<Vec<Scalar>, String> {
    s.split(',').map(parse_scalar).collect()
}

/// Apply `--grid` arguments: `name=v1,v2,...` replaces one parameter;
/// a bare list replaces all of them.
pub fn apply_grid(config: &mut GridConfig, specs: &[String]) -> Result<(), String> {
    for spec in specs {
        match spec.split_once('=') {
            Some((name, values)) => {
                let values = parse_scalar_list(values)?;
                config.set(name.trim(), values).map_err(|e| e.to_string())?;
            }
            None => {
                let seed = config.seed;
                *config = GridConfig::uniform(parse_scalar_list(spec)?);
                config.seed = seed;
            }
        }
    }
    Ok(())
}

/// Scalar cells in pair files: the library encoding, a plain number, or a
/// literal string such as `"1+i"`.
#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    Number(f64),
    Literal(String),
    Encoded(Scalar),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    f: Vec<Cell>,
    g: Vec<Cell>,
}

pub fn parse_pair(path: &str, text: &str, n: usize) -> Result<SolutionPair, InputError> {
    let raw: PairJson = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    let convert = |cells: Vec<Cell>, name: &str| -> Result<Vec<Scalar>, InputError> {
        if cells.len() != n {
            return Err(InputError::Invalid(format!(
                "{path}: `{name}` has {} values, the domain has {n} elements",
                cells.len()
            )));
        }
        cells
            .into_iter()
            .enumerate()
            .map(|(k, c)| match c {
                Cell::Number(v) => Ok(Scalar::float(v, 0.0)),
                Cell::Encoded(s) => Ok(s),
                Cell::Literal(l) => {
                    parse_scalar(&l).map_err(|m| InputError::Invalid(format!("{path}: {name}[{k}]: {m}")))
                }
            })
            .collect()
    };
    Ok(SolutionPair::new(convert(raw.f, "f")?, convert(raw.g, "g")?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_table_with_z0_and_labels() {
        let f = parse_cayley_text("t", "3\n0 1 2\n1 2 2\n2 2 2\nz0 = 1\nlabels = e a 0\n").unwrap();
        assert_eq!(f.rows[1], vec![1, 2, 2]);
        assert_eq!(f.z0, Some(1));
        assert_eq!(f.labels.unwrap()[2], "0");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("x\n", 1),
            ("2\n0 1\n1\n", 3),
            ("2\n0 1\n1 5\n", 3),
            ("2\n\n# comment\n0 1\n", 5),
            ("2\n0 1\n1 0\nz0 = 7\n", 4),
            ("2\n0 1\n1 0\nfoo\n", 4),
        ];
        for (text, line) in cases {
            match parse_cayley_text("t", text) {
                Err(InputError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn json_tables_are_equivalent() {
        let a = parse_cayley("t", "2\n0 1\n1 0\nz0 = 1\n").unwrap();
        let b = parse_cayley("t", r#"{"n": 2, "table": [[0, 1], [1, 0]], "z0": 1}"#).unwrap();
        assert_eq!(a, b);
        match parse_cayley("t", "{\n  \"n\": 2,\n  \"table\": oops\n}") {
            Err(InputError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_literals() {
        assert_eq!(parse_scalar("2").unwrap(), Scalar::from_i64(2));
        assert_eq!(parse_scalar("-1/2").unwrap(), Scalar::from_ratio(-1, 2));
        assert_eq!(parse_scalar("0.25").unwrap(), Scalar::from_ratio(1, 4));
        assert_eq!(parse_scalar("-.5").unwrap(), Scalar::from_ratio(-1, 2));
        assert_eq!(parse_scalar("i").unwrap(), Scalar::i());
        assert_eq!(parse_scalar("-i").unwrap(), -Scalar::i());
        assert_eq!(parse_scalar("1+i").unwrap(), Scalar::gaussian((1, 1), (1, 1)));
        assert_eq!(parse_scalar("1/2 - 3/4i").unwrap(), Scalar::gaussian((1, 2), (-3, 4)));
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn grid_arguments() {
        let mut g = GridConfig::default();
        apply_grid(&mut g, &["d=0,2".into()]).unwrap();
        assert_eq!(g.d, vec![Scalar::zero(), Scalar::from_i64(2)]);
        assert_eq!(g.c, GridConfig::default_values());
        apply_grid(&mut g, &["1,i".into()]).unwrap();
        assert_eq!(g.alpha, vec![Scalar::one(), Scalar::i()]);
        assert!(apply_grid(&mut g, &["zeta=1".into()]).is_err());
    }

    #[test]
    fn pair_cells_in_every_encoding() {
        let p = parse_pair("p", r#"{"f": [0, "i"], "g": [{"re": 1.0, "im": 0.0}, {"L": 1, "coeffs": [[3, 2]]}]}"#, 2)
            .unwrap();
        assert_eq!(p.f[1], Scalar::i());
        assert_eq!(p.g[1], Scalar::from_ratio(3, 2));
        assert!(parse_pair("p", r#"{"f": [0], "g": [0]}"#, 2).is_err());
    }
}

//! File formats. Every file starts with a `#` header line carrying the
//! tool version, the configuration hash and the seed.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{AbcError, Result};
use crate::samplers::AbcDraw;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# abcreg <version> config=<hash> seed=<seed>`
pub fn header_line(config_hash: &str, seed: u64) -> String {
    format!("# abcreg {VERSION} config={config_hash} seed={seed}")
}

/// Header fields `(version, config hash, seed)` of a file.
pub fn read_header(path: &Path) -> Result<(String, String, u64)> {
    let file = File::open(path).map_err(|e| AbcError::io(path, e))?;
    let mut line = String::new();
    BufReader::new(file)
        .read_line(&mut line)
        .map_err(|e| AbcError::io(path, e))?;
    let bad = || AbcError::Config(format!("{}: missing or malformed header", path.display()));
    let mut parts = line.split_whitespace();
    if parts.next() != Some("#") || parts.next() != Some("abcreg") {
        return Err(bad());
    }
    let version = parts.next().ok_or_else(bad)?.to_string();
    let hash = parts
        .next()
        .and_then(|s| s.strip_prefix("config="))
        .ok_or_else(bad)?
        .to_string();
    let seed = parts
        .next()
        .and_then(|s| s.strip_prefix("seed="))
        .and_then(|s| s.parse().ok())
        .ok_or_else(bad)?;
    Ok((version, hash, seed))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| AbcError::io(dir, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AbcError::io(path, e))
}

/// Writes a headed CSV table.
pub fn write_table<R, I>(path: &Path, header: &str, columns: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut out = create(path)?;
    writeln!(out, "{header}").map_err(|e| AbcError::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| AbcError::io(path, e))?;
    Ok(())
}

/// Column names and rows of a headed CSV table.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = File::open(path).map_err(|e| AbcError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((columns, rows))
}

/// One observation per line after the header.
pub fn write_dataset(path: &Path, header: &str, data: &[f64]) -> Result<()> {
    let mut out = create(path)?;
    let mut text = String::with_capacity(24 * data.len() + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for x in data {
        text.push_str(&format!("{x:?}\n"));
    }
    out.write_all(text.as_bytes())
        .map_err(|e| AbcError::io(path, e))
}

/// Reads a dataset; blank lines and `#` lines are skipped.
pub fn read_dataset(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| AbcError::io(path, e))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|_| AbcError::Config(format!("{}: '{l}' is not a number", path.display())))
        })
        .collect()
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:?}")
    }
}

/// Per-proposal table `idx,theta_*,s_*,distance,kernel_value,weight,accepted`
/// with `theta_star_*` columns appended when `adjusted` is given. The
/// adjusted values are keyed by proposal index; other rows get `NA`.
pub fn write_draws(
    path: &Path,
    header: &str,
    draws: &[AbcDraw],
    p: usize,
    d: usize,
    adjusted: Option<(&[usize], &[Vec<f64>])>,
) -> Result<()> {
    let mut columns: Vec<String> = vec!["idx".into()];
    columns.extend((1..=p).map(|j| format!("theta_{j}")));
    columns.extend((1..=d).map(|k| format!("s_{k}")));
    columns.extend(["distance", "kernel_value", "weight", "accepted"].map(String::from));
    let star = adjusted.map(|(idx, th)| {
        let mut map = std::collections::HashMap::with_capacity(idx.len());
        for (i, t) in idx.iter().zip(th) {
            map.insert(*i, t);
        }
        map
    });
    if star.is_some() {
        columns.extend((1..=p).map(|j| format!("theta_star_{j}")));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows = draws.iter().map(|dr| {
        let mut r = Vec::with_capacity(cols.len());
        r.push(dr.index.to_string());
        r.extend(dr.theta.iter().map(|&x| num(x)));
        r.extend(dr.s.iter().map(|&x| num(x)));
        r.push(num(dr.distance));
        r.push(num(dr.kernel_value));
        r.push(num(dr.weight));
        r.push(u8::from(dr.accepted).to_string());
        if let Some(map) = &star {
            match map.get(&dr.index) {
                Some(t) => r.extend(t.iter().map(|&x| num(x))),
                None => r.extend(std::iter::repeat_n("NA".to_string(), p)),
            }
        }
        r
    });
    write_table(path, header, &cols, rows)
}

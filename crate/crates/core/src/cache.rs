//! Versioned on-disk cache of L-polynomial coefficient vectors, one CSV file
//! per (q, g, shard).
//!
//! ```text
//! # ffmoment-lpoly v1 q=5 g=2 shard=0/4
//! code,c0,c1,c2,c3,c4
//! 3126,1,0,...
//! # complete 625
//! ```
//!
//! A file without the trailing `complete` line is treated as absent, so an
//! interrupted sweep recomputes only the unfinished shards.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ffpoly::Poly;
use crate::lfun::LPolynomial;

pub const CACHE_MAGIC: &str = "ffmoment-lpoly";
pub const CACHE_VERSION: u32 = 1;

pub fn shard_path(dir: &Path, q: u32, g: usize, shard: usize, shards: usize) -> PathBuf {
    dir.join(format!("lpoly-q{q}-g{g}-s{shard}of{shards}.csv"))
}

fn header(q: u32, g: usize, shard: usize, shards: usize) -> String {
    format!("# {CACHE_MAGIC} v{CACHE_VERSION} q={q} g={g} shard={shard}/{shards}")
}

pub fn write_shard(path: &Path, q: u32, g: usize, shard: usize, shards: usize, ls: &[LPolynomial]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    // write to a temporary name, then rename: a crash never leaves a
    // complete-looking partial file
    let tmp = path.with_extension("csv.partial");
    {
        let mut w = std::io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "{}", header(q, g, shard, shards))?;
        let cols: Vec<String> = (0..=2 * g).map(|n| format!("c{n}")).collect();
        writeln!(w, "code,{}", cols.join(","))?;
        for l in ls {
            let cs: Vec<String> = l.coeffs.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{}", l.d.code(), cs.join(","))?;
        }
        writeln!(w, "# complete {}", ls.len())?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `Ok(None)` when the file is missing or incomplete; `Err(Cache)` when it
/// belongs to another format version or parameter set.
pub fn read_shard(path: &Path, q: u32, g: usize, shard: usize, shards: usize) -> Result<Option<Vec<LPolynomial>>> {
    let f = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(f).lines();
    let first = lines.next().transpose()?.unwrap_or_default();
    if !first.starts_with(&format!("# {CACHE_MAGIC} ")) {
        return Err(Error::Cache(format!("{}: not an L-polynomial cache", path.display())));
    }
    if first != header(q, g, shard, shards) {
        return Err(Error::Cache(format!(
            "{}: header {first:?} does not match expected {:?}",
            path.display(),
            header(q, g, shard, shards)
        )));
    }
    let _cols = lines.next().transpose()?;
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# complete ") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::Cache(format!("{}: bad footer", path.display())))?;
            if n != out.len() {
                return Err(Error::Cache(format!(
                    "{}: footer count {n} but {} rows",
                    path.display(),
                    out.len()
                )));
            }
            return Ok(Some(out));
        }
        let mut it = line.split(',');
        let bad = || Error::Cache(format!("{}: malformed row {line:?}", path.display()));
        let code: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let coeffs: Vec<i64> = it.map(|s| s.parse::<i64>().map_err(|_| bad())).collect::<Result<_>>()?;
        if coeffs.len() != 2 * g + 1 {
            return Err(bad());
        }
        out.push(LPolynomial {
            d: Poly::from_code(q, code),
            g,
            coeffs,
        });
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfun::compute_l;

    #[test]
    fn round_trip_and_incomplete_files() {
        let dir = std::env::temp_dir().join(format!("ffmoment-cache-test-{}", std::process::id()));
        let q = 5;
        let ls: Vec<LPolynomial> = crate::ffpoly::enumerate(q, crate::ffpoly::PolySet::SquareFree(3), u64::MAX)
            .unwrap()
            .take(7)
            .map(|d| compute_l(&d).unwrap())
            .collect();
        let p = shard_path(&dir, q, 1, 0, 2);
        assert!(read_shard(&p, q, 1, 0, 2).unwrap().is_none());
        write_shard(&p, q, 1, 0, 2, &ls).unwrap();
        assert_eq!(read_shard(&p, q, 1, 0, 2).unwrap().unwrap(), ls);
        // wrong parameters are an error, not a silent miss
        assert!(matches!(read_shard(&p, q, 1, 1, 2), Err(Error::Cache(_))));
        // truncated file → recompute
        let text = fs::read_to_string(&p).unwrap();
        let cut: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        fs::write(&p, cut).unwrap();
        assert!(read_shard(&p, q, 1, 0, 2).unwrap().is_none());
        // other version
        fs::write(&p, text.replace(" v1 ", " v0 ")).unwrap();
        assert!(matches!(read_shard(&p, q, 1, 0, 2), Err(Error::Cache(_))));
        fs::remove_dir_all(&dir).ok();
    }
}

//! `key = value` configuration files, layered under the command-line flags.

use std::path::Path;

use ffmoment_core::RunConfig;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Everything a run depends on; the core [`RunConfig`] plus CLI plumbing.
#[derive(Clone, Debug)]
pub struct Settings {
    pub run: RunConfig,
    pub format: Format,
    pub workers: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            run: RunConfig::default(),
            format: Format::Json,
            workers: 1,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("cannot parse {key} = {v:?}")))
}

impl Settings {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        let r = &mut self.run;
        match key {
            "q" => r.q = parse(key, v)?,
            "g" => r.g = parse(key, v)?,
            "k" => r.k = parse(key, v)?,
            "cutoff" | "N" => r.cutoff = parse(key, v)?,
            "precision" => r.precision = parse(key, v)?,
            "budget" => r.budget = parse(key, v)?,
            "shards" => r.shards = parse(key, v)?,
            "nodes" => r.nodes = parse(key, v)?,
            "radius" => r.radius = parse(key, v)?,
            "alpha" => r.alpha = parse(key, v)?,
            "theta" => r.theta = parse(key, v)?,
            "cache_dir" => r.cache_dir = Some(v.to_string()),
            "workers" => self.workers = parse(key, v)?,
            "format" => {
                self.format = match v {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(CliError::Config(format!("format must be json or csv, got {v:?}"))),
                }
            }
            _ => return Err(CliError::Config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment, blank lines are
    /// ignored, values may be quoted.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            let v = v.trim().trim_matches('"');
            self.set(k.trim(), v)
                .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# test\nq = 13\ng=2 # inline\n\ncache_dir = \"/tmp/x\"\nformat = csv\n").unwrap();
        let mut s = Settings::default();
        s.apply_file(&p).unwrap();
        assert_eq!(s.run.q, 13);
        assert_eq!(s.run.g, 2);
        assert_eq!(s.run.cache_dir.as_deref(), Some("/tmp/x"));
        assert_eq!(s.format, Format::Csv);
    }

    #[test]
    fn bad_lines_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.conf");
        std::fs::write(&p, "q 13\n").unwrap();
        assert!(matches!(Settings::default().apply_file(&p), Err(CliError::Config(_))));
        std::fs::write(&p, "colour = red\n").unwrap();
        assert!(matches!(Settings::default().apply_file(&p), Err(CliError::Config(_))));
        std::fs::write(&p, "q = five\n").unwrap();
        assert!(matches!(Settings::default().apply_file(&p), Err(CliError::Config(_))));
    }
}

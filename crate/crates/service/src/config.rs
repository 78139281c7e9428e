use std::env;
use std::path::PathBuf;

/// Default upload cap: 50 MB.
pub const DEFAULT_UPLOAD_LIMIT: usize = 50 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub data_dir: PathBuf,
    pub port: u16,
    pub workers: usize,
    pub upload_limit: usize,
    /// Directory of replacement field-mapping JSON files, if any.
    pub mappings_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("biblio-data"),
            port: 8080,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            upload_limit: DEFAULT_UPLOAD_LIMIT,
            mappings_dir: None,
        }
    }
}

impl Config {
    /// Reads `BIBLIO_DATA_DIR`, `BIBLIO_PORT`, `BIBLIO_WORKERS`,
    /// `BIBLIO_UPLOAD_LIMIT` (bytes) and `BIBLIO_MAPPINGS_DIR`. Unset
    /// variables keep their defaults.
    pub fn from_env() -> Result<Self, String> {
        Self::from_lookup(|key| env::var(key).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let mut cfg = Self::default();
        if let Some(dir) = get("BIBLIO_DATA_DIR") {
            cfg.data_dir = dir.into();
        }
        if let Some(port) = get("BIBLIO_PORT") {
            cfg.port = port.parse().map_err(|_| format!("BIBLIO_PORT: `{port}` is not a port"))?;
        }
        if let Some(w) = get("BIBLIO_WORKERS") {
            cfg.workers = match w.parse() {
                Ok(n) if n > 0 => n,
                _ => return Err(format!("BIBLIO_WORKERS: `{w}` is not a positive integer")),
            };
        }
        if let Some(limit) = get("BIBLIO_UPLOAD_LIMIT") {
            cfg.upload_limit = limit
                .parse()
                .map_err(|_| format!("BIBLIO_UPLOAD_LIMIT: `{limit}` is not a byte count"))?;
        }
        cfg.mappings_dir = get("BIBLIO_MAPPINGS_DIR").map(PathBuf::from);
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides() {
        let cfg = Config::from_lookup(|k| match k {
            "BIBLIO_PORT" => Some("9000".into()),
            "BIBLIO_WORKERS" => Some("3".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(cfg.port, 9000);
        assert_eq!(cfg.workers, 3);
        assert_eq!(cfg.upload_limit, DEFAULT_UPLOAD_LIMIT);
        assert!(Config::from_lookup(|k| (k == "BIBLIO_WORKERS").then(|| "0".into())).is_err());
    }
}

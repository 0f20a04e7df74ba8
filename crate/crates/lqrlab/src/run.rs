//! Top-level runner: parse, validate, dispatch, and always leave a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::artifacts::{sha256_hex, versions, write_manifest, ArtifactDir, ErrorInfo, Manifest};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::HarnessError;
use crate::experiments::{dispatch, RunContext};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces `seeds` from the config.
    pub seeds: Option<Vec<u64>>,
    /// Replaces `out` from the config.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

pub fn default_out(kind: ExperimentKind) -> PathBuf {
    Path::new("runs").join(kind.as_str())
}

/// Reads the config file and runs it. Relative paths in the config resolve
/// against the file's directory.
pub fn run_experiment(kind: ExperimentKind, config_path: &Path, opts: &RunOptions) -> RunOutcome {
    match std::fs::read_to_string(config_path) {
        Ok(text) => {
            let base = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
            run_config_text(kind, &text, &base, opts)
        }
        Err(e) => {
            let err = HarnessError::config(format!("{}: {e}", config_path.display()));
            let out = opts.out.clone().unwrap_or_else(|| default_out(kind));
            finish(kind, "", opts.seeds.clone().unwrap_or_default(), out, Err(err), Vec::new(), BTreeMap::new())
        }
    }
}

pub fn run_config_text(kind: ExperimentKind, text: &str, base_dir: &Path, opts: &RunOptions) -> RunOutcome {
    let parsed = ExperimentConfig::from_toml_str(text, base_dir);
    let cfg = match parsed {
        Ok(c) => c,
        Err(e) => {
            let out = opts.out.clone().unwrap_or_else(|| default_out(kind));
            return finish(
                kind,
                text,
                opts.seeds.clone().unwrap_or_default(),
                out,
                Err(e),
                Vec::new(),
                BTreeMap::new(),
            );
        }
    };
    let out =
        opts.out.clone().or_else(|| cfg.out.as_ref().map(|p| cfg.resolve(p))).unwrap_or_else(|| default_out(kind));
    let seeds = opts.seeds.clone().or_else(|| cfg.seeds.clone()).unwrap_or_else(|| vec![1]);

    let checked = (|| {
        if let Some(k) = cfg.kind {
            if k != kind {
                return Err(HarnessError::config(format!("config is for {}, not {}", k.as_str(), kind.as_str())));
            }
        }
        if seeds.is_empty() {
            return Err(HarnessError::config("seed list is empty"));
        }
        Ok(())
    })();
    if let Err(e) = checked {
        return finish(kind, text, seeds, out, Err(e), Vec::new(), BTreeMap::new());
    }

    let dir = match ArtifactDir::create(&out) {
        Ok(d) => d,
        Err(e) => return finish(kind, text, seeds, out, Err(e), Vec::new(), BTreeMap::new()),
    };
    let mut ctx = RunContext { cfg: &cfg, seeds: &seeds, dir, results: BTreeMap::new() };
    let result = dispatch(kind, &mut ctx);
    let artifacts = ctx.dir.written().to_vec();
    let results = std::mem::take(&mut ctx.results);
    finish(kind, text, seeds, out, result, artifacts, results)
}

fn finish(
    kind: ExperimentKind,
    text: &str,
    seeds: Vec<u64>,
    out: PathBuf,
    result: Result<(), HarnessError>,
    artifacts: Vec<String>,
    results: BTreeMap<String, serde_json::Value>,
) -> RunOutcome {
    let (status, exit_code, error) = match &result {
        Ok(()) => ("ok", 0, None),
        Err(e) => {
            log::error!("{} failed: {e}", kind.as_str());
            let info = ErrorInfo { module: e.module().into(), name: e.name().into(), message: e.to_string() };
            (if e.exit_code() == 2 { "config-error" } else { "numerical-failure" }, e.exit_code(), Some(info))
        }
    };
    let manifest = Manifest {
        kind: kind.as_str().into(),
        config_sha256: sha256_hex(text.as_bytes()),
        seeds,
        versions: versions(),
        status: status.into(),
        exit_code,
        error,
        artifacts,
        results,
    };
    let exit_code = match write_manifest(&out, &manifest) {
        Ok(()) => exit_code,
        Err(e) => {
            log::error!("could not write manifest to {}: {e}", out.display());
            if exit_code == 0 {
                e.exit_code()
            } else {
                exit_code
            }
        }
    };
    RunOutcome { exit_code, out_dir: out, manifest }
}

//! `--seeds` syntax: `7`, `1,4,9`, `1..50` (inclusive) or `1..=50`.

use crate::error::HarnessError;

pub fn parse_seeds(text: &str) -> Result<Vec<u64>, HarnessError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let num =
        |s: &str| s.trim().parse::<u64>().map_err(|_| HarnessError::config(format!("bad seed {s:?} in {text:?}")));
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.strip_prefix('=').unwrap_or(hi))?);
        if lo > hi {
            return Err(HarnessError::config(format!("empty seed range {text:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(num).collect()
}

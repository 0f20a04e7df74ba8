//! Per-iteration descent records and their CSV form.

use std::io::Write;

/// Columns added by model-free loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateInfo {
    pub m: usize,
    pub r: f64,
    pub est_grad_fro_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub cost: f64,
    pub normalized_error: f64,
    /// `sqrt(Σ_t ‖∇_t C‖_F²)` of the exact gradient.
    pub grad_fro_norm: f64,
    /// Step taken from this iterate (the configured step on the last record).
    pub eta: f64,
    /// `Σ_t ‖G_t(K)‖_F²` for projected loops.
    pub grad_mapping_sq: Option<f64>,
    pub estimate: Option<EstimateInfo>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescentTrace {
    pub records: Vec<TraceRecord>,
}

impl DescentTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn normalized_errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.normalized_error).collect()
    }

    /// First iteration whose normalized error is at most `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.records.iter().find(|r| r.normalized_error <= threshold).map(|r| r.iter)
    }

    /// Writes `iter,cost,normalized_error,grad_fro_norm,eta`, then
    /// `grad_mapping_sq` for projected runs and `m,r,est_grad_fro_norm` for
    /// model-free runs.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mapping = self.records.iter().any(|r| r.grad_mapping_sq.is_some());
        let estimate = self.records.iter().any(|r| r.estimate.is_some());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["iter", "cost", "normalized_error", "grad_fro_norm", "eta"];
        if mapping {
            header.push("grad_mapping_sq");
        }
        if estimate {
            header.extend(["m", "r", "est_grad_fro_norm"]);
        }
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.iter.to_string(),
                r.cost.to_string(),
                r.normalized_error.to_string(),
                r.grad_fro_norm.to_string(),
                r.eta.to_string(),
            ];
            if mapping {
                row.push(r.grad_mapping_sq.map_or(String::new(), |v| v.to_string()));
            }
            if estimate {
                match r.estimate {
                    Some(e) => row.extend([e.m.to_string(), e.r.to_string(), e.est_grad_fro_norm.to_string()]),
                    None => row.extend([String::new(), String::new(), String::new()]),
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

//! Append-only per-step training records and their CSV form.

use std::io::Write;

use crate::drive::ZETA_DIM;
use crate::world::ActionSpec;

pub const RUNLOG_HEADER: &str =
    "step,clock,d1,d2,d3,d4,d5,d6,x,y,heading,action,drive,reward,loss_f,loss_j,epsilon";

/// Float rendering shared by every CSV output: 17 significant digits, so
/// values round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Clock after the step.
    pub clock: f64,
    /// `ζ` after the step.
    pub zeta: [f64; ZETA_DIM],
    pub action: ActionSpec,
    /// Unsmoothed drive after the step.
    pub drive: f64,
    pub reward: f64,
    pub loss_f: f64,
    /// Squared HJB residual before the update.
    pub loss_j: f64,
    pub epsilon: f64,
    /// Number of updates skipped this step because of non-finite values.
    pub skipped: u8,
}

impl StepRecord {
    pub fn csv_row(&self) -> String {
        let mut row = String::with_capacity(400);
        row.push_str(&self.step.to_string());
        row.push(',');
        row.push_str(&fmt_f64(self.clock));
        for v in &self.zeta {
            row.push(',');
            row.push_str(&fmt_f64(*v));
        }
        row.push(',');
        row.push_str(self.action.name());
        for v in [self.drive, self.reward, self.loss_f, self.loss_j, self.epsilon] {
            row.push(',');
            row.push_str(&fmt_f64(v));
        }
        row
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunLog {
    records: Vec<StepRecord>,
}

impl RunLog {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            records: Vec::with_capacity(n),
        }
    }

    /// Appends a record. Step indices must strictly increase.
    pub fn push(&mut self, record: StepRecord) {
        if let Some(last) = self.records.last() {
            assert!(record.step > last.step, "run log step indices must increase");
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn anomalies(&self) -> usize {
        self.records.iter().map(|r| r.skipped as usize).sum()
    }

    /// Mean of `field` over `windows` equal consecutive slices of the log.
    /// The last window absorbs the remainder.
    pub fn window_means(&self, windows: usize, field: impl Fn(&StepRecord) -> f64) -> Vec<f64> {
        let n = self.records.len();
        if n == 0 || windows == 0 {
            return Vec::new();
        }
        let size = (n / windows).max(1);
        let mut out = Vec::with_capacity(windows);
        let mut start = 0;
        while start < n && out.len() < windows {
            let end = if out.len() + 1 == windows { n } else { (start + size).min(n) };
            let slice = &self.records[start..end];
            out.push(slice.iter().map(&field).sum::<f64>() / slice.len() as f64);
            start = end;
        }
        out
    }

    /// Mean of `field` over the fraction `[from, to)` of the log.
    pub fn mean_over(&self, from: f64, to: f64, field: impl Fn(&StepRecord) -> f64) -> f64 {
        let n = self.records.len() as f64;
        let a = (from * n).floor() as usize;
        let b = ((to * n).ceil() as usize).min(self.records.len()).max(a + 1);
        let slice = &self.records[a..b];
        slice.iter().map(field).sum::<f64>() / slice.len() as f64
    }

    /// Writes the header and every `every`-th record.
    pub fn write_csv<W: Write>(&self, mut w: W, every: usize) -> std::io::Result<()> {
        writeln!(w, "{RUNLOG_HEADER}")?;
        let every = every.max(1);
        for r in self.records.iter().filter(|r| r.step % every == 0) {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }
}

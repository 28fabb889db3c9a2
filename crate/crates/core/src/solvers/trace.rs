use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// `‖y − Hxᵗ‖₂`.
    pub residual_norm: f64,
    /// `eₜ = (1/√(nB))‖xᵗ − x̃‖₂`, when a reference was supplied.
    pub error_to_reference: Option<f64>,
    /// Step used to leave `xᵗ`; 0 on the iteration where the loop stopped.
    pub chosen_mu: f64,
    /// Seconds since the solver started.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    /// Largest number of pixels clamped by the GAP step in any iteration.
    pub clamped_pixels: usize,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual_norm).collect()
    }

    pub fn errors(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.error_to_reference).collect()
    }
}

pub const TRACE_CSV_HEADER: &str = "iter,residual_norm,error_to_reference,chosen_mu,wall_time_s";

pub fn write_trace_csv<W: Write>(mut w: W, trace: &IterationTrace) -> std::io::Result<()> {
    writeln!(w, "{TRACE_CSV_HEADER}")?;
    for r in &trace.records {
        let err = r.error_to_reference.map(|e| e.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            r.iter, r.residual_norm, err, r.chosen_mu, r.wall_time
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_one_row_per_record() {
        let trace = IterationTrace {
            records: vec![
                IterationRecord {
                    iter: 0,
                    residual_norm: 1.5,
                    error_to_reference: Some(0.25),
                    chosen_mu: 2.0,
                    wall_time: 0.0,
                },
                IterationRecord {
                    iter: 1,
                    residual_norm: 0.5,
                    error_to_reference: None,
                    chosen_mu: 0.0,
                    wall_time: 0.0,
                },
            ],
            clamped_pixels: 0,
        };
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0,1.5,0.25,2,0");
        assert_eq!(lines[2], "1,0.5,,0,0");
    }
}

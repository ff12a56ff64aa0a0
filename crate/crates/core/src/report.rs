//! CSV report rendering for benchmark runs and sweeps.
//!
//! Every report is one flat table with columns `section,key,stage,value`.
//! Timing rows put the stage name (`particle_push`, `current_deposition`,
//! `other`, `overall`) in the stage column; non-timing rows reuse that
//! column as a sub-key (diagnostic quantity, byte estimate, checksum).
//! Sweep rows carry the swept parameters in their key (`2x4` for
//! subdomains×workers, `S=3` for supercell size); everything they share
//! is echoed once in the `config` section.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::sim::{RunReport, SupercellSweep, WorkerSweepRow};
use crate::supercell::bytes_as_kb;
use crate::timings::{StageTimings, STAGE_NAMES};

/// Renders one float with six significant digits; exact zero prints as `0`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{:.5e}", v)
    }
}

/// Accumulates `section,key,stage,value` rows and renders RFC-4180-style
/// CSV (fields containing commas, quotes or newlines are quoted).
pub struct CsvReport {
    body: String,
}

impl CsvReport {
    pub fn new() -> Self {
        CsvReport {
            body: "section,key,stage,value\n".to_string(),
        }
    }

    pub fn push(&mut self, section: &str, key: &str, stage: &str, value: &str) {
        let _ = writeln!(
            self.body,
            "{},{},{},{}",
            escape(section),
            escape(key),
            escape(stage),
            escape(value)
        );
    }

    fn push_timings(&mut self, section: &str, key: &str, timings: &StageTimings) {
        for (name, value) in STAGE_NAMES.iter().zip(timings.values()) {
            self.push(section, key, name, &format_float(value));
        }
    }

    fn push_config(&mut self, config: &SimulationConfig) {
        let [nx, ny, nz] = config.dims;
        let rows = [
            ("grid", format!("{}x{}x{}", nx, ny, nz)),
            ("particles_per_cell", config.particles_per_cell.to_string()),
            ("steps", config.steps.to_string()),
            ("dt", format_float(config.dt)),
            ("c", format_float(config.c)),
            ("supercell_size", config.supercell_size.to_string()),
            ("workers", config.workers.to_string()),
            ("subdomains", config.subdomains.to_string()),
            ("layout", config.layout.as_str().to_string()),
            ("interpolation", config.interpolation.as_str().to_string()),
            ("chunk_size", config.chunk_size.to_string()),
            ("seed", config.seed.to_string()),
        ];
        for (key, value) in rows {
            self.push("config", key, "", &value);
        }
    }

    pub fn render(self) -> String {
        self.body
    }
}

impl Default for CsvReport {
    fn default() -> Self {
        CsvReport::new()
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Report for a single benchmark run: config echo, stage timings,
/// diagnostics samples, migration count and the state checksum.
pub fn run_report_csv(config: &SimulationConfig, report: &RunReport) -> String {
    let mut csv = CsvReport::new();
    csv.push_config(config);
    csv.push_timings("timings", "", &report.timings);
    csv.push("summary", "steps_completed", "", &report.steps_completed.to_string());
    csv.push("summary", "migrations", "", &report.migrations.to_string());
    csv.push("summary", "checksum", "", &format!("{:016x}", report.checksum));
    if let Some(counts) = report.color_counts {
        for (color, count) in counts.iter().enumerate() {
            csv.push("summary", "color_supercells", &color.to_string(), &count.to_string());
        }
    }
    for d in &report.diagnostics {
        let key = format!("step{}", d.step);
        csv.push("diagnostics", &key, "field_energy", &format_float(d.field_energy));
        csv.push("diagnostics", &key, "kinetic_energy", &format_float(d.kinetic_energy));
        csv.push(
            "diagnostics",
            &key,
            "max_continuity_residual",
            &format_float(d.max_continuity_residual),
        );
        csv.push("diagnostics", &key, "gauss_drift", &format_float(d.gauss_drift));
    }
    csv.render()
}

/// Report for a worker-shape sweep: per-shape stage timings plus the
/// physics checksum that must agree across every row.
pub fn worker_sweep_csv(config: &SimulationConfig, rows: &[WorkerSweepRow]) -> String {
    let mut csv = CsvReport::new();
    csv.push_config(config);
    for row in rows {
        let key = format!("{}x{}", row.subdomains, row.workers);
        csv.push_timings("sweep_workers", &key, &row.timings);
        csv.push("sweep_workers", &key, "checksum", &format!("{:016x}", row.checksum));
    }
    csv.render()
}

/// Report for a supercell-size sweep: per-size working-set estimates
/// (bytes and decimal KB), stage timings, speedup over the naive
/// baseline, and the baseline's own timings.
pub fn supercell_sweep_csv(config: &SimulationConfig, sweep: &SupercellSweep) -> String {
    let mut csv = CsvReport::new();
    csv.push_config(config);
    for row in &sweep.rows {
        let key = format!("S={}", row.size);
        csv.push("sweep_supercell", &key, "push_bytes", &row.push_bytes.to_string());
        csv.push("sweep_supercell", &key, "push_kb", &bytes_as_kb(row.push_bytes));
        csv.push(
            "sweep_supercell",
            &key,
            "deposition_bytes",
            &row.deposition_bytes.to_string(),
        );
        csv.push(
            "sweep_supercell",
            &key,
            "deposition_kb",
            &bytes_as_kb(row.deposition_bytes),
        );
        match (&row.result, &row.note) {
            (Some((timings, checksum)), _) => {
                csv.push_timings("sweep_supercell", &key, timings);
                csv.push("sweep_supercell", &key, "checksum", &format!("{:016x}", checksum));
                if timings.overall > 0.0 {
                    csv.push(
                        "sweep_supercell",
                        &key,
                        "speedup",
                        &format_float(sweep.naive.overall / timings.overall),
                    );
                }
            }
            (None, Some(note)) => csv.push("sweep_supercell", &key, "skipped", note),
            (None, None) => {}
        }
    }
    csv.push_timings("sweep_supercell", "naive", &sweep.naive);
    csv.render()
}

/// Writes `content` to `path`, wrapping failures with the path.
pub fn write_csv(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timings::StageTimings;

    #[test]
    fn floats_render_with_six_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1.00000e0");
        assert_eq!(format_float(0.012345678), "1.23457e-2");
        assert_eq!(format_float(-31680.0), "-3.16800e4");
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(CsvReport::new().render(), "section,key,stage,value\n");
    }

    #[test]
    fn timing_rows_use_the_four_stage_names() {
        let mut csv = CsvReport::new();
        let t = StageTimings {
            particle_push: 1.5,
            current_deposition: 0.5,
            other: 0.25,
            overall: 2.25,
        };
        csv.push_timings("timings", "", &t);
        let text = csv.render();
        for name in ["particle_push", "current_deposition", "other", "overall"] {
            assert!(text.contains(&format!("timings,,{},", name)), "{text}");
        }
        assert!(text.contains("timings,,particle_push,1.50000e0"));
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        let mut csv = CsvReport::new();
        csv.push("sweep_supercell", "S=7", "skipped", "odd counts, rejected");
        let text = csv.render();
        assert!(text.contains("sweep_supercell,S=7,skipped,\"odd counts, rejected\""));
    }

    #[test]
    fn run_report_contains_config_and_diagnostics() {
        let mut config = SimulationConfig::benchmark_default();
        config.dims = [4, 4, 4];
        config.particles_per_cell = 1;
        config.steps = 1;
        let mut sim = crate::sim::setup_frozen_plasma(&config).unwrap();
        let report = sim.run(1).unwrap();
        let text = run_report_csv(&config, &report);
        assert!(text.starts_with("section,key,stage,value\n"));
        assert!(text.contains("config,grid,,4x4x4"));
        assert!(text.contains("timings,,overall,"));
        assert!(text.contains("diagnostics,step0,field_energy,0"));
        assert!(text.contains("diagnostics,step1,max_continuity_residual,0"));
        assert!(text.contains("summary,checksum,,"));
    }
}

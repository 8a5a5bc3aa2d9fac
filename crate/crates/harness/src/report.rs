//! Experiment results: manifests, criteria, curves, and their on-disk forms.
//!
//! A trajectory manifest captures every input that determines a solve, and
//! its SHA-256 hash keys the diagnostic records derived from that solve.
//! Reports serialize to NDJSON (one record per line) and curves additionally
//! to two-column whitespace-separated plot files.  All floats are written in
//! shortest round-trip form, so reading a plot file back reproduces each
//! value bit for bit.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::DatumSpec;

/// Everything that determines a single trajectory, plus its content hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    /// Human-readable run label, e.g. `"eps=0.05"`.
    pub label: String,
    pub grid_sizes: Vec<usize>,
    pub grid_lengths: Vec<f64>,
    pub a: f64,
    pub epsilon: f64,
    pub t_final: f64,
    pub dt_step: f64,
    pub stride: usize,
    pub integrator: String,
    pub datum: DatumSpec,
    /// SHA-256 over the canonical JSON of all other fields.
    pub hash: String,
}

impl TrajectoryManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        grid: &llg_core::Grid,
        a: f64,
        epsilon: f64,
        t_final: f64,
        dt_step: f64,
        stride: usize,
        integrator: impl Into<String>,
        datum: &DatumSpec,
    ) -> Self {
        let mut m = TrajectoryManifest {
            label: label.into(),
            grid_sizes: grid.sizes().to_vec(),
            grid_lengths: grid.lengths().to_vec(),
            a,
            epsilon,
            t_final,
            dt_step,
            stride,
            integrator: integrator.into(),
            datum: datum.clone(),
            hash: String::new(),
        };
        let canonical = serde_json::to_string(&m).expect("manifest serializes");
        m.hash = hex(&Sha256::digest(canonical.as_bytes()));
        m
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One asserted pass/fail check with the measured value and its threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        value: f64,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        CriterionOutcome {
            name: name.into(),
            passed,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    /// Check `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        let passed = value.is_finite() && value <= threshold;
        CriterionOutcome::new(name, passed, value, threshold, "")
    }

    /// Check `lo <= value <= hi`; the threshold column stores `hi`.
    pub fn in_window(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let passed = value.is_finite() && value >= lo && value <= hi;
        CriterionOutcome::new(name, passed, value, hi, format!("window [{lo}, {hi}]"))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// A named curve of (x, y) points, keyed to the manifest it came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    /// Hash of the trajectory that produced the points, when there is a
    /// single such trajectory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
    pub points: Vec<[f64; 2]>,
}

/// Grid/step metadata that accompanies every reported number.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Environment {
    pub package_version: String,
    pub grid_sizes: Vec<usize>,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub environment: Environment,
    pub manifests: Vec<TrajectoryManifest>,
    pub curves: Vec<Curve>,
    pub criteria: Vec<CriterionOutcome>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, environment: Environment) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            environment,
            manifests: Vec::new(),
            curves: Vec::new(),
            criteria: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn push_curve(
        &mut self,
        name: impl Into<String>,
        manifest: Option<&TrajectoryManifest>,
        points: Vec<[f64; 2]>,
    ) {
        self.curves.push(Curve {
            name: name.into(),
            manifest: manifest.map(|m| m.hash.clone()),
            points,
        });
    }

    /// One line per record: environment, then manifests, curve points, and
    /// criteria, in a fixed order.
    pub fn write_ndjson(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        push_line(&mut out, &Record::Environment {
            experiment: &self.experiment,
            environment: &self.environment,
        })?;
        for m in &self.manifests {
            push_line(&mut out, &Record::Manifest(m))?;
        }
        for curve in &self.curves {
            for p in &curve.points {
                push_line(&mut out, &Record::CurvePoint {
                    curve: &curve.name,
                    manifest: curve.manifest.as_deref(),
                    x: p[0],
                    y: p[1],
                })?;
            }
        }
        for c in &self.criteria {
            push_line(&mut out, &Record::Criterion(c))?;
        }
        std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
    }

    /// Write one two-column plot file per curve into `dir`, named after the
    /// curve with `/` flattened.  Returns the paths written, sorted.
    pub fn emit_plotdata(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        // Deterministic file order independent of insertion order.
        let mut by_name: BTreeMap<&str, &Curve> = BTreeMap::new();
        for c in &self.curves {
            by_name.insert(&c.name, c);
        }
        let mut written = Vec::new();
        for (name, curve) in by_name {
            let fname = format!("{}.dat", name.replace(['/', ' '], "_"));
            let path = dir.join(fname);
            let mut f = std::fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            writeln!(f, "# {name}")?;
            for p in &curve.points {
                // "{}" is Rust's shortest round-trip float form.
                writeln!(f, "{} {}", p[0], p[1])?;
            }
            written.push(path);
        }
        Ok(written)
    }

    /// Print one summary line per criterion and return overall success.
    pub fn print_summary(&self) -> bool {
        for c in &self.criteria {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            println!(
                "{verdict}  {}  value {:.6e}  threshold {:.6e}  {}",
                c.name, c.value, c.threshold, c.detail
            );
        }
        let ok = self.passed();
        println!(
            "{}: {}/{} criteria passed",
            self.experiment,
            self.criteria.iter().filter(|c| c.passed).count(),
            self.criteria.len()
        );
        ok
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Record<'a> {
    Environment {
        experiment: &'a str,
        environment: &'a Environment,
    },
    Manifest(&'a TrajectoryManifest),
    CurvePoint {
        curve: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        manifest: Option<&'a str>,
        x: f64,
        y: f64,
    },
    Criterion(&'a CriterionOutcome),
}

fn push_line<T: Serialize>(out: &mut Vec<u8>, record: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.push(b'\n');
    Ok(())
}

/// Parse a plot file written by [`ExperimentReport::emit_plotdata`].
pub fn read_plotdata(path: &Path) -> Result<Vec<[f64; 2]>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut points = Vec::new();
    for line in std::io::BufReader::new(f).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(x), Some(y)) = (it.next(), it.next()) else {
            anyhow::bail!("malformed plot line '{line}'");
        };
        points.push([x.parse()?, y.parse()?]);
    }
    Ok(points)
}

/// Least-squares slope of y against x.  Used for log-log rate fits.
pub fn fit_slope(points: &[[f64; 2]]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p[0] - mx) * (p[1] - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p[0] - mx) * (p[0] - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DatumFamily;
    use llg_core::grid::TAU;
    use llg_core::Grid;

    fn sample_datum() -> DatumSpec {
        DatumSpec {
            family: DatumFamily::Bump,
            amplitude: 0.1,
            seed: 3,
            width: 0.8,
            twist: 1,
            shell_decay: 2.0,
            shells: [1, 3],
        }
    }

    fn sample_report() -> ExperimentReport {
        let grid = Grid::new(&[8, 8], &[TAU, TAU]).unwrap();
        let m = TrajectoryManifest::new(
            "eps=0.1",
            &grid,
            1.0,
            0.1,
            0.5,
            0.01,
            5,
            "if-rk4",
            &sample_datum(),
        );
        let mut r = ExperimentReport::new(
            "sweep",
            Environment {
                package_version: "test".into(),
                grid_sizes: vec![8, 8],
                dt: 0.01,
                t_final: 0.5,
                seed: 3,
            },
        );
        r.push_curve(
            "error-vs-epsilon",
            Some(&m),
            vec![[0.1, 0.3], [0.05, 0.15000000000000002], [0.025, 7.5e-2]],
        );
        r.manifests.push(m);
        r.criteria.push(CriterionOutcome::at_most("sup-error", 0.3, 1.0));
        r
    }

    #[test]
    fn manifest_hash_is_stable_and_input_sensitive() {
        let grid = Grid::new(&[8, 8], &[TAU, TAU]).unwrap();
        let d = sample_datum();
        let m1 = TrajectoryManifest::new("x", &grid, 1.0, 0.1, 0.5, 0.01, 5, "if-rk4", &d);
        let m2 = TrajectoryManifest::new("x", &grid, 1.0, 0.1, 0.5, 0.01, 5, "if-rk4", &d);
        assert_eq!(m1.hash, m2.hash);
        assert_eq!(m1.hash.len(), 64);
        let m3 = TrajectoryManifest::new("x", &grid, 1.0, 0.2, 0.5, 0.01, 5, "if-rk4", &d);
        assert_ne!(m1.hash, m3.hash);
    }

    #[test]
    fn plot_files_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample_report();
        let files = r.emit_plotdata(dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        let back = read_plotdata(&files[0]).unwrap();
        assert_eq!(back.len(), 3);
        for (got, want) in back.iter().zip(&r.curves[0].points) {
            assert_eq!(got[0].to_bits(), want[0].to_bits());
            assert_eq!(got[1].to_bits(), want[1].to_bits());
        }
    }

    #[test]
    fn an_empty_report_emits_header_only_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = sample_report();
        r.curves[0].points.clear();
        let files = r.emit_plotdata(dir.path()).unwrap();
        let text = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with('#'));
        assert!(read_plotdata(&files[0]).unwrap().is_empty());
    }

    #[test]
    fn ndjson_lines_parse_individually_and_carry_the_manifest_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.ndjson");
        let r = sample_report();
        r.write_ndjson(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut kinds = Vec::new();
        let mut curve_manifest = None;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            kinds.push(v["kind"].as_str().unwrap().to_string());
            if v["kind"] == "curve-point" {
                curve_manifest = Some(v["manifest"].as_str().unwrap().to_string());
            }
        }
        assert_eq!(kinds[0], "environment");
        assert!(kinds.contains(&"manifest".to_string()));
        assert!(kinds.contains(&"criterion".to_string()));
        assert_eq!(curve_manifest.unwrap(), r.manifests[0].hash);
    }

    #[test]
    fn slope_fit_recovers_an_exact_line() {
        let pts: Vec<[f64; 2]> = (1..6).map(|i| [i as f64, 2.5 * i as f64 - 1.0]).collect();
        assert!((fit_slope(&pts) - 2.5).abs() < 1e-12);
    }
}

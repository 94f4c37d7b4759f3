//! Oracle-versus-asymptotic sweeps, order fitting, consistency checks and
//! deterministic result files.

mod convergence;
mod grid;
mod verify;

use std::io::{BufRead, Write};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{classify_region, eval_auto, AsymptoticOptions, RegionTag};
use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::oracle::{eval_pn, FamilyParams, ScaledComplex};

pub use convergence::{
    convergence, fit_order, section8_checks, ConvergenceReport, Quantity, Section8Entry, Section8Report,
};
pub use grid::{GridItem, GridSpec};
pub use verify::{
    overlap_report, pair_overlap, verify_airy, verify_jumps, verify_orthogonality, verify_overlaps, verify_phase, OverlapReport,
    OverlapSample, SoftEdge, VerifyReport,
};

/// Largest degree a sweep accepts.
pub const MAX_SWEEP_DEGREE: usize = 2000;

pub const CSV_HEADER: &str = "b,n,re_z,im_z,region,oracle_re,oracle_im,asym_re,asym_im,rel_err,log_scale_flag,time_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub asymptotic: AsymptoticOptions,
    /// Record wall time per point; off keeps files byte-stable.
    pub timing: bool,
}

/// One (n, z) comparison; failed evaluations keep their row with a reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub b: f64,
    pub n: usize,
    pub z: Complex64,
    pub region: RegionTag,
    pub oracle: Option<ScaledComplex>,
    pub asymptotic: Option<ScaledComplex>,
    pub rel_err: f64,
    pub log_scale: bool,
    pub time_ms: f64,
    pub flag: Option<String>,
}

/// Flat row as written to csv and jsonl; missing numbers are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub b: f64,
    pub n: usize,
    pub re_z: f64,
    pub im_z: f64,
    pub region: String,
    pub oracle_re: Option<f64>,
    pub oracle_im: Option<f64>,
    pub asym_re: Option<f64>,
    pub asym_im: Option<f64>,
    pub rel_err: Option<f64>,
    pub log_scale_flag: u8,
    pub time_ms: f64,
    pub flag: Option<String>,
}

fn parts(v: &Option<ScaledComplex>, log_scale: bool) -> (Option<f64>, Option<f64>) {
    match v {
        None => (None, None),
        Some(v) if log_scale => (Some(v.ln_abs()), Some(v.arg())),
        Some(v) => {
            let c = v.to_c64();
            (Some(c.re), Some(c.im))
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    if x.is_nan() {
        None
    } else {
        Some(x)
    }
}

impl ComparisonRecord {
    /// Oracle and asymptotic values at one point of degree `eq.n()`.
    pub fn compute(eq: &Equilibrium, z: Complex64, opts: &SweepOptions) -> Self {
        let start = opts.timing.then(Instant::now);
        let region = classify_region(eq, z, &opts.asymptotic.classifier).tag;
        let mut flags = Vec::new();
        let oracle = match eval_pn(&eq.params, eq.n(), z) {
            Ok(v) => Some(v.value),
            Err(e) => {
                flags.push(format!("oracle: {e}"));
                None
            }
        };
        let asymptotic = match eval_auto(eq, z, &opts.asymptotic) {
            Ok(v) => Some(v.value),
            Err(e) => {
                flags.push(format!("asymptotic: {e}"));
                None
            }
        };
        let log_scale = match (&oracle, &asymptotic) {
            (Some(o), _) => !o.in_f64_range(),
            (None, Some(a)) => !a.in_f64_range(),
            _ => false,
        };
        let rel_err = match (&oracle, &asymptotic) {
            (Some(o), Some(a)) if log_scale => a.log_rel_diff(o),
            (Some(o), Some(a)) => a.rel_diff(o),
            _ => f64::NAN,
        };
        let time_ms = start.map(|t| t.elapsed().as_secs_f64() * 1e3).unwrap_or(0.0);
        ComparisonRecord {
            b: eq.b(),
            n: eq.n(),
            z,
            region,
            oracle,
            asymptotic,
            rel_err,
            log_scale,
            time_ms,
            flag: if flags.is_empty() { None } else { Some(flags.join("; ")) },
        }
    }

    pub fn row(&self) -> RecordRow {
        let (oracle_re, oracle_im) = parts(&self.oracle, self.log_scale);
        let (asym_re, asym_im) = parts(&self.asymptotic, self.log_scale);
        RecordRow {
            b: self.b,
            n: self.n,
            re_z: self.z.re,
            im_z: self.z.im,
            region: self.region.to_string(),
            oracle_re,
            oracle_im,
            asym_re,
            asym_im,
            rel_err: finite(self.rel_err),
            log_scale_flag: self.log_scale as u8,
            time_ms: self.time_ms,
            flag: self.flag.clone(),
        }
    }
}

/// Comparison records for every degree and grid point, sorted by (n, re z, im z).
pub fn sweep(params: &FamilyParams, n_list: &[usize], grid: &GridSpec, opts: &SweepOptions) -> Result<Vec<ComparisonRecord>> {
    opts.asymptotic.classifier.validate()?;
    if let Some(&n) = n_list.iter().find(|&&n| n > MAX_SWEEP_DEGREE) {
        return Err(Error::InvalidParameter(format!("degree {n} exceeds the sweep limit {MAX_SWEEP_DEGREE}")));
    }
    let mut records = Vec::new();
    for &n in n_list {
        let eq = Equilibrium::new(*params, n)?;
        let points = grid.points(&eq);
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("grid points must be finite".into()));
        }
        let mut batch: Vec<ComparisonRecord> = points.par_iter().map(|&z| ComparisonRecord::compute(&eq, z, opts)).collect();
        records.append(&mut batch);
    }
    records.sort_by(|a, b| a.n.cmp(&b.n).then(a.z.re.total_cmp(&b.z.re)).then(a.z.im.total_cmp(&b.z.im)));
    Ok(records)
}

/// 17 significant digits, lowercase exponent.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_else(|| "nan".into())
}

fn json_opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format_number(v),
        _ => "null".into(),
    }
}

pub fn csv_line(r: &RecordRow) -> String {
    [
        format_number(r.b),
        r.n.to_string(),
        format_number(r.re_z),
        format_number(r.im_z),
        r.region.clone(),
        csv_opt(r.oracle_re),
        csv_opt(r.oracle_im),
        csv_opt(r.asym_re),
        csv_opt(r.asym_im),
        csv_opt(r.rel_err),
        r.log_scale_flag.to_string(),
        format_number(r.time_ms),
    ]
    .join(",")
}

pub fn json_line(r: &RecordRow) -> String {
    let flag = match &r.flag {
        Some(f) => serde_json::to_string(f).unwrap_or_else(|_| "null".into()),
        None => "null".into(),
    };
    format!(
        "{{\"b\":{},\"n\":{},\"re_z\":{},\"im_z\":{},\"region\":\"{}\",\"oracle_re\":{},\"oracle_im\":{},\"asym_re\":{},\"asym_im\":{},\"rel_err\":{},\"log_scale_flag\":{},\"time_ms\":{},\"flag\":{}}}",
        format_number(r.b),
        r.n,
        format_number(r.re_z),
        format_number(r.im_z),
        r.region,
        json_opt(r.oracle_re),
        json_opt(r.oracle_im),
        json_opt(r.asym_re),
        json_opt(r.asym_im),
        json_opt(r.rel_err),
        r.log_scale_flag,
        format_number(r.time_ms),
        flag
    )
}

/// Writes records; csv always starts with the header.
pub fn emit<W: Write>(records: &[ComparisonRecord], format: OutputFormat, mut out: W) -> Result<()> {
    if format == OutputFormat::Csv {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for rec in records {
        let row = rec.row();
        let line = match format {
            OutputFormat::Csv => csv_line(&row),
            OutputFormat::Jsonl => json_line(&row),
        };
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_to_path(records: &[ComparisonRecord], format: OutputFormat, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    emit(records, format, std::io::BufWriter::new(file))
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<RecordRow>> {
    let mut rows = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> FamilyParams {
        FamilyParams::new(1.0).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-2.5e-7), "-2.4999999999999999e-7");
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn band_sweep_is_region_b() {
        let g = GridSpec::real_points(&[-0.5, 0.0, 0.5]);
        let recs = sweep(&p1(), &[50, 100], &g, &SweepOptions::default()).unwrap();
        assert_eq!(recs.len(), 6);
        for r in &recs {
            assert_eq!(r.region, RegionTag::B);
            assert!(r.rel_err < 0.05, "{r:?}");
            assert!(!r.log_scale && r.flag.is_none() && r.time_ms == 0.0);
        }
        assert!(recs.windows(2).all(|w| (w[0].n, w[0].z.re) < (w[1].n, w[1].z.re)));
    }

    #[test]
    fn empty_grid_and_header() {
        let recs = sweep(&p1(), &[50], &GridSpec::default(), &SweepOptions::default()).unwrap();
        assert!(recs.is_empty());
        let mut buf = Vec::new();
        emit(&recs, OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_and_jsonl_round_trip() {
        let g = GridSpec::parse("point 0 0\npoint 1 0\npoint 1000 0").unwrap();
        let recs = sweep(&p1(), &[50], &g, &SweepOptions::default()).unwrap();
        assert_eq!(recs.len(), 3);
        let mut buf = Vec::new();
        emit(&recs, OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
        let singular = recs.iter().find(|r| r.z.re == 1.0).unwrap();
        assert!(singular.flag.is_some() && singular.oracle.is_some() && singular.rel_err.is_nan());
        let far = recs.iter().find(|r| r.z.re == 1000.0).unwrap();
        assert_eq!(far.region, RegionTag::A);
        assert!(far.rel_err < 1e-2);
        let mut buf = Vec::new();
        emit(&recs, OutputFormat::Jsonl, &mut buf).unwrap();
        let rows = read_jsonl(&buf[..]).unwrap();
        assert_eq!(rows, recs.iter().map(|r| r.row()).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_large_degree() {
        assert!(sweep(&p1(), &[MAX_SWEEP_DEGREE + 1], &GridSpec::default(), &SweepOptions::default()).is_err());
    }
}

//! CSV artifacts: number distributions, moment series and comparisons.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces every value bit for bit. Metadata lines start with `#`.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;
use trimer_core::{MomentSeries, NumberDistribution, StatsError, N_WELLS};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("{path}: {source}")]
    Stats { path: String, source: StatsError },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CsvError + '_ {
    move |source| CsvError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, msg: impl Into<String>) -> CsvError {
    CsvError::Format {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Splits a file into `# key=value` metadata and the CSV body.
fn split_metadata(text: &str) -> (Vec<(String, String)>, String) {
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else if !line.trim().is_empty() {
            body.push_str(line);
            body.push('\n');
        }
    }
    (meta, body)
}

fn meta_value<'a>(meta: &'a [(String, String)], key: &str) -> Option<&'a str> {
    meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn parse_meta<T: std::str::FromStr>(
    path: &Path,
    meta: &[(String, String)],
    key: &str,
) -> Result<T, CsvError> {
    let raw =
        meta_value(meta, key).ok_or_else(|| format_err(path, format!("missing `# {key}=`")))?;
    raw.parse()
        .map_err(|_| format_err(path, format!("bad value for {key}: `{raw}`")))
}

fn parse_f64(path: &Path, field: Option<&str>, what: &str) -> Result<f64, CsvError> {
    let raw = field.ok_or_else(|| format_err(path, format!("missing column {what}")))?;
    raw.trim()
        .parse()
        .map_err(|_| format_err(path, format!("bad {what}: `{raw}`")))
}

type Metadata = Vec<(String, String)>;
type BodyReader = csv::Reader<std::io::Cursor<Vec<u8>>>;

fn read_body(path: &Path) -> Result<(Metadata, BodyReader), CsvError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (meta, body) = split_metadata(&text);
    let reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(std::io::Cursor::new(body.into_bytes()));
    Ok((meta, reader))
}

fn check_header(path: &Path, reader: &mut BodyReader, want: &[&str]) -> Result<(), CsvError> {
    let header = reader.headers().map_err(|source| CsvError::Csv {
        path: path.display().to_string(),
        source,
    })?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != want {
        return Err(format_err(
            path,
            format!(
                "expected header `{}`, got `{}`",
                want.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CsvError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents.as_bytes()).map_err(io_err(path))
}

pub fn distribution_to_string(d: &NumberDistribution) -> String {
    let mut s = format!(
        "# well={}\n# time={}\n# bin_width={}\n# sample_count={}\n# clamped={}\nn,p\n",
        d.well, d.time, d.bin_width, d.sample_count, d.clamped
    );
    for (k, p) in d.probabilities.iter().enumerate() {
        s.push_str(&format!("{},{}\n", d.center(k), p));
    }
    s
}

pub fn write_distribution(path: &Path, d: &NumberDistribution) -> Result<(), CsvError> {
    write_file(path, &distribution_to_string(d))
}

pub fn read_distribution(path: &Path) -> Result<NumberDistribution, CsvError> {
    let (meta, mut reader) = read_body(path)?;
    check_header(path, &mut reader, &["n", "p"])?;
    let bin_width: f64 = parse_meta(path, &meta, "bin_width")?;
    let sample_count: u64 = parse_meta(path, &meta, "sample_count")?;
    let well: usize =
        meta_value(&meta, "well").map_or(Ok(0), |_| parse_meta(path, &meta, "well"))?;
    let time: f64 =
        meta_value(&meta, "time").map_or(Ok(0.0), |_| parse_meta(path, &meta, "time"))?;
    let clamped: u64 =
        meta_value(&meta, "clamped").map_or(Ok(0), |_| parse_meta(path, &meta, "clamped"))?;
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(format_err(
            path,
            format!("bin_width must be positive, got {bin_width}"),
        ));
    }

    let mut probabilities = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|source| CsvError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        let n = parse_f64(path, rec.get(0), "n")?;
        let p = parse_f64(path, rec.get(1), "p")?;
        let k = (n / bin_width).round();
        if k < 0.0 || (k * bin_width - n).abs() > 1e-9 * bin_width.max(n) {
            return Err(format_err(
                path,
                format!("row {}: n={n} is not on the bin grid", row + 1),
            ));
        }
        let k = k as usize;
        if k < probabilities.len() {
            return Err(format_err(
                path,
                format!("row {}: bins must be increasing", row + 1),
            ));
        }
        probabilities.resize(k, 0.0);
        probabilities.push(p);
    }
    let mut d = NumberDistribution::from_probabilities(bin_width, probabilities, sample_count)
        .map_err(|source| CsvError::Stats {
            path: path.display().to_string(),
            source,
        })?;
    d.clamped = clamped;
    Ok(d.with_meta(well, time))
}

/// Moment CSV contents as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub representation: String,
    pub trajectories: u64,
    pub discarded: u64,
    pub seed: u64,
    pub times: Vec<f64>,
    /// Per well: (mean, standard error) per time.
    pub wells: [Vec<(f64, f64)>; N_WELLS],
}

impl MomentTable {
    pub fn from_series(
        series: &MomentSeries,
        representation: &str,
        trajectories: u64,
        discarded: u64,
        seed: u64,
    ) -> Self {
        let mut wells: [Vec<(f64, f64)>; N_WELLS] = Default::default();
        for (w, dst) in wells.iter_mut().enumerate() {
            *dst = series.wells[w].iter().map(|m| (m.mean, m.stderr)).collect();
        }
        Self {
            representation: representation.to_string(),
            trajectories,
            discarded,
            seed,
            times: series.times.clone(),
            wells,
        }
    }

    /// Record index closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }
}

pub fn moments_to_string(m: &MomentTable) -> String {
    let mut s = format!(
        "# representation={}\n# trajectories={}\n# discarded={}\n# seed={}\nt,N1_mean,N1_err,N2_mean,N2_err,N3_mean,N3_err\n",
        m.representation, m.trajectories, m.discarded, m.seed
    );
    for (k, t) in m.times.iter().enumerate() {
        s.push_str(&t.to_string());
        for w in &m.wells {
            s.push_str(&format!(",{},{}", w[k].0, w[k].1));
        }
        s.push('\n');
    }
    s
}

pub fn write_moments(path: &Path, m: &MomentTable) -> Result<(), CsvError> {
    write_file(path, &moments_to_string(m))
}

pub fn read_moments(path: &Path) -> Result<MomentTable, CsvError> {
    let (meta, mut reader) = read_body(path)?;
    check_header(
        path,
        &mut reader,
        &[
            "t", "N1_mean", "N1_err", "N2_mean", "N2_err", "N3_mean", "N3_err",
        ],
    )?;
    let mut table = MomentTable {
        representation: meta_value(&meta, "representation")
            .unwrap_or("")
            .to_string(),
        trajectories: parse_meta(path, &meta, "trajectories").unwrap_or(0),
        discarded: parse_meta(path, &meta, "discarded").unwrap_or(0),
        seed: parse_meta(path, &meta, "seed").unwrap_or(0),
        times: Vec::new(),
        wells: Default::default(),
    };
    for rec in reader.records() {
        let rec = rec.map_err(|source| CsvError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        table.times.push(parse_f64(path, rec.get(0), "t")?);
        for w in 0..N_WELLS {
            let mean = parse_f64(path, rec.get(1 + 2 * w), "mean")?;
            let err = parse_f64(path, rec.get(2 + 2 * w), "err")?;
            table.wells[w].push((mean, err));
        }
    }
    Ok(table)
}

/// One row of a comparison CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub pair_label: String,
    pub b: f64,
    pub b_err: f64,
    pub d: f64,
}

pub fn write_comparisons(path: &Path, rows: &[Comparison]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |source| CsvError::Csv {
        path: path.display().to_string(),
        source,
    };
    w.write_record(["pair_label", "B", "B_err", "D"])
        .map_err(wrap)?;
    for r in rows {
        w.write_record([
            r.pair_label.clone(),
            r.b.to_string(),
            r.b_err.to_string(),
            r.d.to_string(),
        ])
        .map_err(wrap)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| format_err(path, e.to_string()))?;
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_comparisons(path: &Path) -> Result<Vec<Comparison>, CsvError> {
    let (_, mut reader) = read_body(path)?;
    check_header(path, &mut reader, &["pair_label", "B", "B_err", "D"])?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|source| CsvError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        rows.push(Comparison {
            pair_label: rec.get(0).unwrap_or("").to_string(),
            b: parse_f64(path, rec.get(1), "B")?,
            b_err: parse_f64(path, rec.get(2), "B_err")?,
            d: parse_f64(path, rec.get(3), "D")?,
        });
    }
    Ok(rows)
}

/// One row of a preset summary: computed values beside published ones.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub pair_label: String,
    pub b: f64,
    pub b_err: f64,
    pub d: f64,
    pub b_reference: f64,
    pub d_reference: f64,
    pub n_traj: u64,
}

const SUMMARY_HEADER: [&str; 7] = [
    "pair_label",
    "B",
    "B_err",
    "D",
    "B_reference",
    "D_reference",
    "n_traj",
];

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |source| CsvError::Csv {
        path: path.display().to_string(),
        source,
    };
    w.write_record(SUMMARY_HEADER).map_err(wrap)?;
    for r in rows {
        w.write_record([
            r.pair_label.clone(),
            r.b.to_string(),
            r.b_err.to_string(),
            r.d.to_string(),
            r.b_reference.to_string(),
            r.d_reference.to_string(),
            r.n_traj.to_string(),
        ])
        .map_err(wrap)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| format_err(path, e.to_string()))?;
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, CsvError> {
    let (_, mut reader) = read_body(path)?;
    check_header(path, &mut reader, &SUMMARY_HEADER)?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|source| CsvError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        let n_traj = rec.get(6).unwrap_or("");
        rows.push(SummaryRow {
            pair_label: rec.get(0).unwrap_or("").to_string(),
            b: parse_f64(path, rec.get(1), "B")?,
            b_err: parse_f64(path, rec.get(2), "B_err")?,
            d: parse_f64(path, rec.get(3), "D")?,
            b_reference: parse_f64(path, rec.get(4), "B_reference")?,
            d_reference: parse_f64(path, rec.get(5), "D_reference")?,
            n_traj: n_traj
                .trim()
                .parse()
                .map_err(|_| format_err(path, format!("bad n_traj: `{n_traj}`")))?,
        });
    }
    Ok(rows)
}

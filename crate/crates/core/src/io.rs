//! Text formats, seeded instance generation and scaling records.
//!
//! All formats are whitespace separated; everything after `#` on a line is
//! ignored, as are blank lines.
//!
//! Explicit set (`k` objectives, `m` images):
//! ```text
//! k m
//! y_1 ... y_k        (m rows, one image per row)
//! ```
//! A file with `k` rows of `m` values (one objective per row) is accepted as
//! well; when `k == m` rows are read as images.
//!
//! Knapsack (`k` objectives, `n` items, profits are maximized):
//! ```text
//! k n
//! p_11 ... p_1n      (k profit rows)
//! w_1 ... w_n
//! capacity
//! ```
//!
//! Tiny integer program (`m` constraints `A x <= b`, objectives minimized):
//! ```text
//! k n m
//! c_11 ... c_1n      (k objective rows)
//! a_11 ... a_1n b_1  (m constraint rows)
//! l_1 ... l_n
//! u_1 ... u_n
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::RunReport;
use crate::error::InstanceError;
use crate::instance::{KnapsackInstance, ProblemInstance, TinyIlpInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceFormat {
    ExplicitSet,
    Knapsack,
    TinyIlp,
}

impl std::str::FromStr for InstanceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "set" | "explicit" => Ok(InstanceFormat::ExplicitSet),
            "kp" | "knapsack" => Ok(InstanceFormat::Knapsack),
            "ilp" => Ok(InstanceFormat::TinyIlp),
            other => Err(format!(
                "unknown format {other:?} (expected set, kp or ilp)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("missing header")]
    MissingHeader,
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    RowLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {token:?} is not an integer")]
    NotInteger { line: usize, token: String },
    #[error("line {line}: expected {expected} data rows, found {found}")]
    RowCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: item {item} has negative weight {weight}")]
    NegativeWeight {
        line: usize,
        item: usize,
        weight: i64,
    },
    #[error("line {line}: capacity {capacity} is negative")]
    NegativeCapacity { line: usize, capacity: i64 },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: InstanceError,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

struct Row {
    line: usize,
    values: Vec<i64>,
}

fn tokenize(text: &str) -> Result<Vec<Row>, ParseError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let values = tokens
            .iter()
            .map(|t| {
                t.parse::<i64>().map_err(|_| ParseError::NotInteger {
                    line,
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(Row { line, values });
    }
    Ok(rows)
}

fn header_value(row: &Row, pos: usize, name: &str, min: i64) -> Result<usize, ParseError> {
    let v = row.values[pos];
    if v < min {
        return Err(ParseError::MalformedHeader {
            line: row.line,
            reason: format!("{name} = {v}, must be at least {min}"),
        });
    }
    Ok(v as usize)
}

fn expect_len(row: &Row, expected: usize) -> Result<(), ParseError> {
    if row.values.len() == expected {
        Ok(())
    } else {
        Err(ParseError::RowLength {
            line: row.line,
            expected,
            found: row.values.len(),
        })
    }
}

fn expect_rows(rows: &[Row], expected: usize, after: usize) -> Result<(), ParseError> {
    if rows.len() == expected {
        Ok(())
    } else {
        // first surplus row, or the last row present when rows are missing
        let line = rows.get(expected).or(rows.last()).map_or(after, |r| r.line);
        Err(ParseError::RowCount {
            line,
            expected,
            found: rows.len(),
        })
    }
}

fn detect(rows: &[Row]) -> Result<InstanceFormat, ParseError> {
    let header = &rows[0];
    match header.values.len() {
        3 => Ok(InstanceFormat::TinyIlp),
        2 => {
            let k = header.values[0].max(0) as usize;
            let data = &rows[1..];
            let knapsack_shape =
                data.len() == k + 2 && data.last().is_some_and(|r| r.values.len() == 1);
            Ok(if knapsack_shape {
                InstanceFormat::Knapsack
            } else {
                InstanceFormat::ExplicitSet
            })
        }
        n => Err(ParseError::MalformedHeader {
            line: header.line,
            reason: format!("expected 2 or 3 values, found {n}"),
        }),
    }
}

/// Parses an instance, detecting the format from its shape unless `format`
/// is given.
pub fn parse_instance(
    text: &str,
    format: Option<InstanceFormat>,
) -> Result<ProblemInstance, ParseError> {
    let rows = tokenize(text)?;
    if rows.is_empty() {
        return Err(ParseError::MissingHeader);
    }
    let format = match format {
        Some(f) => f,
        None => detect(&rows)?,
    };
    match format {
        InstanceFormat::ExplicitSet => parse_explicit(&rows),
        InstanceFormat::Knapsack => parse_knapsack(&rows),
        InstanceFormat::TinyIlp => parse_ilp(&rows),
    }
}

pub fn read_instance(
    path: &Path,
    format: Option<InstanceFormat>,
) -> Result<ProblemInstance, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text, format)
}

fn parse_explicit(rows: &[Row]) -> Result<ProblemInstance, ParseError> {
    let header = &rows[0];
    expect_len(header, 2)?;
    let k = header_value(header, 0, "k", 2)?;
    let m = header_value(header, 1, "m", 0)?;
    let data = &rows[1..];
    let by_image = data.len() == m && data.iter().all(|r| r.values.len() == k);
    let by_objective = m > 0 && data.len() == k && data.iter().all(|r| r.values.len() == m);
    let images: Vec<Vec<i64>> = if by_image {
        data.iter().map(|r| r.values.clone()).collect()
    } else if by_objective {
        (0..m)
            .map(|i| data.iter().map(|r| r.values[i]).collect())
            .collect()
    } else {
        expect_rows(data, m, header.line)?;
        let bad = data
            .iter()
            .find(|r| r.values.len() != k)
            .expect("a row of the wrong length");
        return Err(ParseError::RowLength {
            line: bad.line,
            expected: k,
            found: bad.values.len(),
        });
    };
    let instance = ProblemInstance::ExplicitSet { k, images };
    instance.validate().map_err(|source| {
        let line = match &source {
            InstanceError::DuplicateImage { index } if by_image => data[*index].line,
            _ => header.line,
        };
        ParseError::Invalid { line, source }
    })?;
    Ok(instance)
}

fn parse_knapsack(rows: &[Row]) -> Result<ProblemInstance, ParseError> {
    let header = &rows[0];
    expect_len(header, 2)?;
    let k = header_value(header, 0, "k", 2)?;
    let n = header_value(header, 1, "n", 1)?;
    let data = &rows[1..];
    expect_rows(data, k + 2, header.line)?;
    for r in &data[..=k] {
        expect_len(r, n)?;
    }
    let cap_row = &data[k + 1];
    expect_len(cap_row, 1)?;
    let weight_row = &data[k];
    if let Some((item, &weight)) = weight_row.values.iter().enumerate().find(|(_, &w)| w < 0) {
        return Err(ParseError::NegativeWeight {
            line: weight_row.line,
            item,
            weight,
        });
    }
    let capacity = cap_row.values[0];
    if capacity < 0 {
        return Err(ParseError::NegativeCapacity {
            line: cap_row.line,
            capacity,
        });
    }
    let kp = KnapsackInstance {
        profits: data[..k].iter().map(|r| r.values.clone()).collect(),
        weights: weight_row.values.clone(),
        capacity,
    };
    let instance = ProblemInstance::Knapsack(kp);
    instance.validate().map_err(|source| ParseError::Invalid {
        line: header.line,
        source,
    })?;
    Ok(instance)
}

fn parse_ilp(rows: &[Row]) -> Result<ProblemInstance, ParseError> {
    let header = &rows[0];
    expect_len(header, 3)?;
    let k = header_value(header, 0, "k", 2)?;
    let n = header_value(header, 1, "n", 1)?;
    let m = header_value(header, 2, "m", 0)?;
    let data = &rows[1..];
    expect_rows(data, k + m + 2, header.line)?;
    for r in &data[..k] {
        expect_len(r, n)?;
    }
    for r in &data[k..k + m] {
        expect_len(r, n + 1)?;
    }
    for r in &data[k + m..] {
        expect_len(r, n)?;
    }
    let upper_row = &data[k + m + 1];
    let ilp = TinyIlpInstance {
        objectives: data[..k].iter().map(|r| r.values.clone()).collect(),
        constraints: data[k..k + m]
            .iter()
            .map(|r| r.values[..n].to_vec())
            .collect(),
        rhs: data[k..k + m].iter().map(|r| r.values[n]).collect(),
        lower: data[k + m].values.clone(),
        upper: upper_row.values.clone(),
    };
    let instance = ProblemInstance::TinyIlp(ilp);
    instance.validate().map_err(|source| ParseError::Invalid {
        line: upper_row.line,
        source,
    })?;
    Ok(instance)
}

fn push_row(out: &mut String, values: &[i64]) {
    let row: Vec<String> = values.iter().map(i64::to_string).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

/// Writes an instance in its native format (explicit sets one image per
/// row).
pub fn serialize_instance(instance: &ProblemInstance) -> String {
    let mut out = String::new();
    match instance {
        ProblemInstance::ExplicitSet { k, images } => {
            let _ = writeln!(out, "{} {}", k, images.len());
            for y in images {
                push_row(&mut out, y);
            }
        }
        ProblemInstance::Knapsack(kp) => {
            let _ = writeln!(out, "{} {}", kp.k(), kp.n());
            for row in &kp.profits {
                push_row(&mut out, row);
            }
            push_row(&mut out, &kp.weights);
            let _ = writeln!(out, "{}", kp.capacity);
        }
        ProblemInstance::TinyIlp(ilp) => {
            let _ = writeln!(out, "{} {} {}", ilp.k(), ilp.n(), ilp.constraints.len());
            for row in &ilp.objectives {
                push_row(&mut out, row);
            }
            for (row, b) in ilp.constraints.iter().zip(&ilp.rhs) {
                let mut full = row.clone();
                full.push(*b);
                push_row(&mut out, &full);
            }
            push_row(&mut out, &ilp.lower);
            push_row(&mut out, &ilp.upper);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetShape {
    /// Coordinates uniform in `[0, range]`.
    Uniform,
    /// Points scattered just above the plane `sum = const`, so most of them
    /// are nondominated.
    Simplex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Knapsack,
    ExplicitSet {
        shape: SetShape,
        general_position: bool,
    },
    TinyIlp,
}

/// Inclusive range of knapsack profits and weights.
pub const KP_VALUE_RANGE: (i64, i64) = (1, 100);

/// Seeded instance; the same arguments always give the same text.
pub fn generate_instance(kind: GeneratorKind, k: usize, n: usize, seed: u64) -> String {
    assert!(k >= 2 && n >= 1, "generator needs k >= 2 and n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = KP_VALUE_RANGE;
    let mut out = String::new();
    match kind {
        GeneratorKind::Knapsack => {
            let _ = writeln!(
                out,
                "# 0-1 knapsack, {k} objectives, {n} items, seed {seed}"
            );
            let _ = writeln!(
                out,
                "# profits and weights uniform in [{lo},{hi}], capacity = ceil(sum of weights / 2)"
            );
            out.push_str("# the value range is an assumption, not a published constant\n");
            let profits: Vec<Vec<i64>> = (0..k)
                .map(|_| (0..n).map(|_| rng.random_range(lo..=hi)).collect())
                .collect();
            let weights: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
            let capacity = (weights.iter().sum::<i64>() + 1) / 2;
            out.push_str(&serialize_instance(&ProblemInstance::Knapsack(
                KnapsackInstance {
                    profits,
                    weights,
                    capacity,
                },
            )));
        }
        GeneratorKind::ExplicitSet {
            shape,
            general_position,
        } => {
            let range = 10 * n as i64;
            let _ = writeln!(
                out,
                "# explicit set, {k} objectives, {n} images, seed {seed}, shape {shape:?}, range {range}"
            );
            if general_position {
                out.push_str("# no two images share a coordinate value\n");
            }
            let mut images: Vec<Vec<i64>> = Vec::with_capacity(n);
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            let mut used: Vec<HashSet<i64>> = vec![HashSet::new(); k];
            while images.len() < n {
                let y: Vec<i64> = match shape {
                    SetShape::Uniform => (0..k).map(|_| rng.random_range(0..=range)).collect(),
                    SetShape::Simplex => {
                        let mut y: Vec<i64> =
                            (0..k - 1).map(|_| rng.random_range(0..=range)).collect();
                        let rest = (k as i64 - 1) * range - y.iter().sum::<i64>();
                        y.push(rest + rng.random_range(0..=range / 10));
                        y
                    }
                };
                if general_position && y.iter().zip(&used).any(|(v, u)| u.contains(v)) {
                    continue;
                }
                if seen.insert(y.clone()) {
                    for (v, u) in y.iter().zip(used.iter_mut()) {
                        u.insert(*v);
                    }
                    images.push(y);
                }
            }
            out.push_str(&serialize_instance(&ProblemInstance::ExplicitSet {
                k,
                images,
            }));
        }
        GeneratorKind::TinyIlp => {
            let _ = writeln!(
                out,
                "# integer program, {k} objectives, {n} variables in [0,2], seed {seed}"
            );
            out.push_str(
                "# objective coefficients in [-9,9]; constraints A x <= b with A in [0,5]\n",
            );
            let m = n.div_ceil(2);
            let constraints: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.random_range(0..=5)).collect())
                .collect();
            let rhs = constraints.iter().map(|r| r.iter().sum::<i64>()).collect();
            let ilp = TinyIlpInstance {
                objectives: (0..k)
                    .map(|_| (0..n).map(|_| rng.random_range(-9..=9)).collect())
                    .collect(),
                constraints,
                rhs,
                lower: vec![0; n],
                upper: vec![2; n],
            };
            out.push_str(&serialize_instance(&ProblemInstance::TinyIlp(ilp)));
        }
    }
    out
}

/// Result file: the nondominated set in explicit-set format, in the
/// instance's own sense (knapsack profits are positive again), preceded by
/// `# key: value` metadata.
pub fn format_result(
    instance: &ProblemInstance,
    report: &RunReport,
    extra: &[(String, String)],
) -> String {
    let mut out = String::new();
    let k = instance.k();
    let _ = writeln!(out, "# nondominated: {}", report.nondominated.len());
    let _ = writeln!(
        out,
        "# scalarizations_solved: {}",
        report.scalarizations_solved
    );
    let _ = writeln!(out, "# infeasible: {}", report.infeasible_count);
    let _ = writeln!(out, "# skipped: {}", report.skipped);
    let _ = writeln!(out, "# max_depth: {}", report.max_depth);
    let _ = writeln!(out, "# threads: {}", report.threads);
    let _ = writeln!(
        out,
        "# time_setup_seconds: {:.6}",
        report.timings.setup.as_secs_f64()
    );
    let _ = writeln!(
        out,
        "# time_traversal_seconds: {:.6}",
        report.timings.traversal.as_secs_f64()
    );
    let _ = writeln!(
        out,
        "# time_total_seconds: {:.6}",
        report.timings.total().as_secs_f64()
    );
    for (key, value) in extra {
        let _ = writeln!(out, "# {key}: {value}");
    }
    let _ = writeln!(out, "{} {}", k, report.nondominated.len());
    for s in &report.nondominated {
        push_row(&mut out, &instance.report_values(&s.image.values()));
    }
    out
}

/// Reads the `# key: value` lines of a result file.
pub fn result_metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// One line of the scaling CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub instance: String,
    pub k: usize,
    pub n: usize,
    pub nondominated: usize,
    pub scalarizations: u64,
    pub threads: usize,
    pub wall_time_seconds: f64,
    /// Wall time divided by the baseline configuration's wall time on the
    /// same instance.
    pub slowdown: f64,
}

/// Fills in `slowdown` against the record with `baseline_threads` for the
/// same instance. Records without a baseline get `NaN`.
pub fn assign_slowdown(records: &mut [ScalingRecord], baseline_threads: usize) {
    let base: Vec<(String, f64)> = records
        .iter()
        .filter(|r| r.threads == baseline_threads)
        .map(|r| (r.instance.clone(), r.wall_time_seconds))
        .collect();
    for r in records.iter_mut() {
        r.slowdown = base
            .iter()
            .find(|(id, _)| *id == r.instance)
            .map_or(f64::NAN, |(_, t)| r.wall_time_seconds / t);
    }
}

/// Mean slowdown of one thread budget over all instances that have one.
pub fn aggregate_slowdown(records: &[ScalingRecord], threads: usize) -> Option<f64> {
    let values: Vec<f64> = records
        .iter()
        .filter(|r| r.threads == threads && r.slowdown.is_finite())
        .map(|r| r.slowdown)
        .collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn write_scaling_csv<W: std::io::Write>(
    records: &[ScalingRecord],
    writer: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scaling_csv<R: std::io::Read>(reader: R) -> csv::Result<Vec<ScalingRecord>> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

//! Report files.
//!
//! JSON is pretty-printed with struct field order as key order and every
//! float written with 17 significant digits, so parse then re-emit is
//! byte-identical. CSV has one row per cell.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use kmpp::Counters;

use crate::data::format_f64;
use crate::error::HarnessError;
use crate::plan::{RunReport, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

pub const CSV_COLUMNS: [&str; 8] = [
    "variant",
    "k",
    "rep",
    "points_examined_update",
    "points_examined_sampling",
    "distances",
    "norms",
    "wall_time_ns",
];

struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value with the report's JSON conventions.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, HarnessError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn report_to_csv(report: &RunReport) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in &report.records {
        let c = &r.counters;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.variant,
            r.k,
            r.rep,
            c.points_examined_update,
            c.points_examined_sampling,
            c.distances_computed,
            c.norms_computed,
            c.wall_time_ns
        ));
    }
    out
}

pub fn emit_report(report: &RunReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let bytes = match format {
        ReportFormat::Json => to_json(report)?,
        ReportFormat::Csv => report_to_csv(report).into_bytes(),
    };
    write_file(path, &bytes)
}

pub fn write_file(path: impl AsRef<Path>, bytes: &[u8]) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<RunReport, HarnessError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// One parsed row of a CSV report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvRow {
    pub variant: Variant,
    pub k: usize,
    pub rep: usize,
    pub counters: Counters,
}

pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>, HarnessError> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(HarnessError::Load {
            row: 0,
            message: format!("unexpected report header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |m: String| HarnessError::Load { row, message: m };
        let int = |i: usize| {
            rec[i]
                .parse::<u64>()
                .map_err(|e| bad(format!("column {}: {e}", CSV_COLUMNS[i])))
        };
        rows.push(CsvRow {
            variant: rec[0].parse().map_err(bad)?,
            k: int(1)? as usize,
            rep: int(2)? as usize,
            counters: Counters {
                points_examined_update: int(3)?,
                points_examined_sampling: int(4)?,
                distances_computed: int(5)?,
                norms_computed: int(6)?,
                wall_time_ns: int(7)?,
            },
        });
    }
    Ok(rows)
}

use std::io;

use serde::Serialize;

use crate::fmi_map::Value;
use crate::time::RationalTime;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub time: RationalTime,
    pub values: Vec<Value>,
    /// Some instance finished a shortened final step at this row.
    pub truncated: bool,
}

/// Recorded variables, one row per master micro-step plus the initial row.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trace {
    /// `instance.variable` column names.
    pub columns: Vec<String>,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r.values[i]).collect())
    }

    /// Numeric column; Binary cells become NaN.
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn times(&self) -> Vec<RationalTime> {
        self.rows.iter().map(|r| r.time).collect()
    }

    pub fn has_truncated_step(&self) -> bool {
        self.rows.iter().any(|r| r.truncated)
    }

    pub fn write_header<W: io::Write>(columns: &[String], writer: &mut csv::Writer<W>) -> csv::Result<()> {
        writer.write_record(std::iter::once("time").chain(columns.iter().map(String::as_str)))
    }

    pub fn write_row<W: io::Write>(row: &TraceRow, writer: &mut csv::Writer<W>) -> csv::Result<()> {
        let cells = std::iter::once(row.time.to_string()).chain(row.values.iter().map(Value::to_string));
        writer.write_record(cells)
    }

    /// Writes `time,<instance.variable>...` followed by one line per row.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        Self::write_header(&self.columns, &mut writer)?;
        for row in &self.rows {
            Self::write_row(row, &mut writer)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

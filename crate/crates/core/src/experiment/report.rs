use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::ExperimentRow;
use crate::Error;

pub const CSV_HEADER: [&str; 21] = [
    "order",
    "refinements",
    "h",
    "h_jacobian",
    "p_comp",
    "p_err",
    "pmx_err",
    "u_comp",
    "u_err",
    "umx_err",
    "p_comp_normalized",
    "p_err_normalized",
    "pmx_err_normalized",
    "u_comp_normalized",
    "u_err_normalized",
    "umx_err_normalized",
    "cg_iters",
    "minres_iters",
    "cg_converged",
    "minres_converged",
    "wall_ms",
];

/// Columns of the plot data files. Metrics are the normalized ones.
pub const PLOT_COLUMNS: [&str; 8] = ["h", "h_jacobian", "p_comp", "p_err", "pmx_err", "u_comp", "u_err", "umx_err"];

/// Scientific notation with a 6-digit fraction and an exponent of at least
/// two digits, e.g. `7.549479e-02`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn record(row: &ExperimentRow) -> Vec<String> {
    let mut out = vec![row.order.to_string(), row.refinements.to_string()];
    out.extend(
        [
            row.h,
            row.h_jacobian,
            row.p_comp,
            row.p_err,
            row.pmx_err,
            row.u_comp,
            row.u_err,
            row.umx_err,
            row.p_comp_normalized,
            row.p_err_normalized,
            row.pmx_err_normalized,
            row.u_comp_normalized,
            row.u_err_normalized,
            row.umx_err_normalized,
        ]
        .map(format_sci),
    );
    out.push(row.cg_iters.to_string());
    out.push(row.minres_iters.to_string());
    out.push(row.cg_converged.to_string());
    out.push(row.minres_converged.to_string());
    out.push(format!("{:.3}", row.wall_ms));
    out
}

pub fn write_csv(out: impl Write, rows: &[ExperimentRow]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T, Error> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| Error::Format {
        line,
        message: format!("column `{}`: cannot parse {raw:?}", CSV_HEADER[i]),
    })
}

pub fn read_csv(input: impl Read) -> Result<Vec<ExperimentRow>, Error> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Format { line: 1, message: "unexpected header".into() });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Format {
                line,
                message: format!("expected {} columns, got {}", CSV_HEADER.len(), rec.len()),
            });
        }
        let f = |i| field::<f64>(&rec, i, line);
        rows.push(ExperimentRow {
            order: field(&rec, 0, line)?,
            refinements: field(&rec, 1, line)?,
            h: f(2)?,
            h_jacobian: f(3)?,
            p_comp: f(4)?,
            p_err: f(5)?,
            pmx_err: f(6)?,
            u_comp: f(7)?,
            u_err: f(8)?,
            umx_err: f(9)?,
            p_comp_normalized: f(10)?,
            p_err_normalized: f(11)?,
            pmx_err_normalized: f(12)?,
            u_comp_normalized: f(13)?,
            u_err_normalized: f(14)?,
            umx_err_normalized: f(15)?,
            cg_iters: field(&rec, 16, line)?,
            minres_iters: field(&rec, 17, line)?,
            cg_converged: field(&rec, 18, line)?,
            minres_converged: field(&rec, 19, line)?,
            wall_ms: f(20)?,
        });
    }
    Ok(rows)
}

pub fn parse_csv(text: &str) -> Result<Vec<ExperimentRow>, Error> {
    read_csv(text.as_bytes())
}

/// Contents of one plot data file.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub order: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotData {
    pub fn from_rows(order: usize, rows: &[&ExperimentRow]) -> Self {
        let mut sorted: Vec<&ExperimentRow> = rows.to_vec();
        sorted.sort_by_key(|r| r.refinements);
        PlotData {
            order,
            columns: PLOT_COLUMNS.iter().map(|s| s.to_string()).collect(),
            rows: sorted
                .iter()
                .map(|r| {
                    vec![
                        r.h,
                        r.h_jacobian,
                        r.p_comp_normalized,
                        r.p_err_normalized,
                        r.pmx_err_normalized,
                        r.u_comp_normalized,
                        r.u_err_normalized,
                        r.umx_err_normalized,
                    ]
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("# order {}\n# {}\n", self.order, self.columns.join(" "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_sci(v)).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Parses a plot data file written by [`emit_plot_data`].
pub fn parse_plot_data(text: &str) -> Result<PlotData, Error> {
    let mut order = None;
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let bad = |message: String| Error::Format { line: line_no, message };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(k) = comment.strip_prefix("order") {
                order = Some(k.trim().parse().map_err(|_| bad(format!("bad order {k:?}")))?);
            } else if columns.is_none() && order.is_some() {
                columns = Some(comment.split_whitespace().map(str::to_string).collect());
            }
            continue;
        }
        let ncols = columns.as_ref().ok_or_else(|| bad("data before column header".into()))?.len();
        let values = trimmed
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad(format!("bad number {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != ncols {
            return Err(bad(format!("expected {ncols} values, got {}", values.len())));
        }
        rows.push(values);
    }
    let order = order.ok_or(Error::Format { line: 1, message: "missing `# order` header".into() })?;
    let columns = columns.ok_or(Error::Format { line: 2, message: "missing column header".into() })?;
    Ok(PlotData { order, columns, rows })
}

/// Writes one `order_<k>.dat` file per order found in `rows`.
pub fn emit_plot_data(rows: &[ExperimentRow], out_dir: &Path) -> Result<Vec<PathBuf>, Error> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("no rows to plot".into()));
    }
    let mut by_order: BTreeMap<usize, Vec<&ExperimentRow>> = BTreeMap::new();
    for row in rows {
        by_order.entry(row.order).or_default().push(row);
    }
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (order, group) in by_order {
        let path = out_dir.join(format!("order_{order}.dat"));
        std::fs::write(&path, PlotData::from_rows(order, &group).render())?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(7.549479e-2), "7.549479e-02");
        assert_eq!(format_sci(1.021287), "1.021287e+00");
        assert_eq!(format_sci(0.0), "0.000000e+00");
        assert_eq!(format_sci(-3.5e120), "-3.500000e+120");
        assert_eq!(format_sci(f64::NAN), "NaN");
    }

    #[test]
    fn plot_header_required() {
        assert!(parse_plot_data("1 2 3\n").is_err());
        assert!(parse_plot_data("# order 1\n# h a\n1 2 3\n").is_err());
        let p = parse_plot_data("# order 2\n# h a\n1e-1 2\n").unwrap();
        assert_eq!(p.order, 2);
        assert_eq!(p.rows, vec![vec![0.1, 2.0]]);
    }
}

use std::fs;
use std::path::Path;

use super::HarnessError;
use crate::linear_response::{ratio_to_db, SpectrumResult, UNDERFLOW_TRANSMISSION};

/// Twelve significant digits in scientific notation, independent of locale.
/// Infinities and NaN are written as `inf`, `-inf` and `nan`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        // Drop the sign of negative zero.
        format!("{:.11e}", 0.0)
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

/// Header plus rows with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    /// Panics if the row width differs from the header or a text cell would
    /// need quoting; both are programming errors.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header {:?}", self.header);
        for cell in &row {
            if let Cell::Text(s) = cell {
                assert!(!s.contains([',', '\n', '\r', '"']), "text cell `{s}` needs quoting");
            }
        }
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        fs::write(path, self.render()).map_err(|e| HarnessError::io(path, e))
    }
}

/// Reads a measured spectrum. The header must name `delta_mhz`, `t_plus`
/// and `t_minus`; other columns are ignored, as are blank lines and lines
/// starting with `#`.
pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumResult, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_spectrum(&text).map_err(|(line, message)| HarnessError::Input { path: path.to_path_buf(), line, message })
}

fn parse_spectrum(text: &str) -> Result<SpectrumResult, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or((1, "file has no header".to_string()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let column = |name: &str| {
        names.iter().position(|n| *n == name).ok_or_else(|| (header_line, format!("header lacks column `{name}`")))
    };
    let cols = [column("delta_mhz")?, column("t_plus")?, column("t_minus")?];
    let mut out = SpectrumResult { delta_ac: 0.0, deltas: Vec::new(), t_plus: Vec::new(), t_minus: Vec::new(), isolation_db: Vec::new() };
    for (line, content) in lines {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err((line, format!("expected {} fields, found {}", names.len(), fields.len())));
        }
        let mut v = [0.0; 3];
        for (slot, &c) in v.iter_mut().zip(&cols) {
            *slot = fields[c]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| (line, format!("`{}` in column `{}` is not a finite number", fields[c], names[c])))?;
        }
        if let Some(&last) = out.deltas.last() {
            if !(v[0] > last) {
                return Err((line, format!("delta_mhz = {} does not increase", v[0])));
            }
        }
        out.deltas.push(v[0]);
        out.t_plus.push(v[1]);
        out.t_minus.push(v[2]);
        out.isolation_db.push(isolation_db(v[1], v[2]));
    }
    if out.deltas.is_empty() {
        return Err((header_line, "no data rows".into()));
    }
    Ok(out)
}

/// `10 log₁₀(T₋/T₊)`, `+∞` once `T₊` underflows.
pub(crate) fn isolation_db(t_plus: f64, t_minus: f64) -> f64 {
    if t_plus < UNDERFLOW_TRANSMISSION {
        f64::INFINITY
    } else {
        ratio_to_db(t_minus / t_plus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(format_number(9.80296049e-5), "9.80296049000e-5");
        assert_eq!(format_number(1.0), "1.00000000000e0");
        assert_eq!(format_number(-0.0), "0.00000000000e0");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_number(f64::NAN), "nan");
        let x = 1.0 / 3.0;
        assert!((format_number(x).parse::<f64>().unwrap() / x - 1.0).abs() < 1e-11);
    }

    #[test]
    fn three_rows_make_four_lines() {
        let mut t = CsvTable::new(&["delta_mhz", "t_plus", "label"]);
        for k in 0..3 {
            t.push(vec![Cell::from(k as f64), Cell::from(0.5), Cell::from("x")]);
        }
        let text = t.render();
        assert_eq!(text.lines().count(), 4);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(text.lines().next(), Some("delta_mhz,t_plus,label"));
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        CsvTable::new(&["a", "b"]).push(vec![Cell::from(1.0)]);
    }

    #[test]
    fn spectra_are_read_by_column_name() {
        let s = parse_spectrum("# measured\nt_minus,delta_mhz,extra,t_plus\n0.9,-1,a,0.1\n\n1.0,0,b,0\n").unwrap();
        assert_eq!(s.deltas, vec![-1.0, 0.0]);
        assert_eq!(s.t_plus, vec![0.1, 0.0]);
        assert_eq!(s.t_minus, vec![0.9, 1.0]);
        assert_eq!(s.isolation_db[1], f64::INFINITY);
    }

    #[test]
    fn malformed_spectra_name_the_line() {
        assert_eq!(parse_spectrum("delta_mhz,t_plus\n").unwrap_err().0, 1);
        assert_eq!(parse_spectrum("delta_mhz,t_plus,t_minus\n0,1,1\n1,x,1\n").unwrap_err().0, 3);
        assert_eq!(parse_spectrum("delta_mhz,t_plus,t_minus\n0,1,1\n0,1,1\n").unwrap_err().0, 3);
        assert_eq!(parse_spectrum("delta_mhz,t_plus,t_minus\n0,1\n").unwrap_err().0, 2);
    }
}

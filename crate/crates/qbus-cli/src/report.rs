//! The fixed-schema report row, its CSV encoding (header row, commas,
//! '.' decimals, blank for null), and the parser that round-trips it.

use qbus::ErrorModel;

pub const CSV_HEADER: &str = "l,p,eta,gamma,error_model,f_closed_paper,f_closed_oracle_convention,f_exact,f_after_purify,rounds_used,pairs_consumed,t_entswap,t_swap,f_gate";

/// One sweep result. Optional fields are emitted blank in CSV and null in
/// JSON, never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub l: usize,
    pub p: f64,
    pub eta: f64,
    pub gamma: f64,
    pub error_model: ErrorModel,
    /// Closed form with the exponents as published.
    pub f_closed_paper: Option<f64>,
    /// Closed form with the simulation-validated exponents (gamma = 0 only).
    pub f_closed_oracle_convention: Option<f64>,
    /// Exact simulation (trace-weighted overlap), when the length fits the
    /// register cap and is even.
    pub f_exact: Option<f64>,
    pub f_after_purify: Option<f64>,
    pub rounds_used: Option<u32>,
    pub pairs_consumed: Option<u64>,
    pub t_entswap: Option<f64>,
    pub t_swap: Option<f64>,
    pub f_gate: Option<f64>,
}

/// A malformed report file; `line` is 1-based (line 1 is the header).
#[derive(Clone, Debug, PartialEq)]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for CsvError {}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn write_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.l,
            r.p,
            r.eta,
            r.gamma,
            r.error_model.as_str(),
            fmt_opt_f64(r.f_closed_paper),
            fmt_opt_f64(r.f_closed_oracle_convention),
            fmt_opt_f64(r.f_exact),
            fmt_opt_f64(r.f_after_purify),
            r.rounds_used.map(|x| x.to_string()).unwrap_or_default(),
            r.pairs_consumed.map(|x| x.to_string()).unwrap_or_default(),
            fmt_opt_f64(r.t_entswap),
            fmt_opt_f64(r.t_swap),
            fmt_opt_f64(r.f_gate),
        ));
    }
    out
}

fn field_f64(s: &str, line: usize, name: &str) -> Result<f64, CsvError> {
    s.parse::<f64>().map_err(|_| CsvError {
        line,
        message: format!("{name}: not a number: '{s}'"),
    })
}

fn field_opt_f64(s: &str, line: usize, name: &str) -> Result<Option<f64>, CsvError> {
    if s.is_empty() {
        Ok(None)
    } else {
        field_f64(s, line, name).map(Some)
    }
}

/// Parses a report file produced by [`write_csv`]; re-serializing the
/// result reproduces the input byte for byte.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>, CsvError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(CsvError {
        line: 1,
        message: "empty file".into(),
    })?;
    if header != CSV_HEADER {
        return Err(CsvError {
            line: 1,
            message: format!("unexpected header '{header}'"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(CsvError {
                line: lineno,
                message: format!("expected 14 fields, got {}", fields.len()),
            });
        }
        let l = fields[0].parse::<usize>().map_err(|_| CsvError {
            line: lineno,
            message: format!("l: not an integer: '{}'", fields[0]),
        })?;
        let error_model = fields[4].parse::<ErrorModel>().map_err(|e| CsvError {
            line: lineno,
            message: format!("error_model: {e}"),
        })?;
        let rounds_used = if fields[9].is_empty() {
            None
        } else {
            Some(fields[9].parse::<u32>().map_err(|_| CsvError {
                line: lineno,
                message: format!("rounds_used: not an integer: '{}'", fields[9]),
            })?)
        };
        let pairs_consumed = if fields[10].is_empty() {
            None
        } else {
            Some(fields[10].parse::<u64>().map_err(|_| CsvError {
                line: lineno,
                message: format!("pairs_consumed: not an integer: '{}'", fields[10]),
            })?)
        };
        rows.push(ReportRow {
            l,
            p: field_f64(fields[1], lineno, "p")?,
            eta: field_f64(fields[2], lineno, "eta")?,
            gamma: field_f64(fields[3], lineno, "gamma")?,
            error_model,
            f_closed_paper: field_opt_f64(fields[5], lineno, "f_closed_paper")?,
            f_closed_oracle_convention: field_opt_f64(
                fields[6],
                lineno,
                "f_closed_oracle_convention",
            )?,
            f_exact: field_opt_f64(fields[7], lineno, "f_exact")?,
            f_after_purify: field_opt_f64(fields[8], lineno, "f_after_purify")?,
            rounds_used,
            pairs_consumed,
            t_entswap: field_opt_f64(fields[11], lineno, "t_entswap")?,
            t_swap: field_opt_f64(fields[12], lineno, "t_swap")?,
            f_gate: field_opt_f64(fields[13], lineno, "f_gate")?,
        });
    }
    Ok(rows)
}

impl ReportRow {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "l": self.l,
            "p": self.p,
            "eta": self.eta,
            "gamma": self.gamma,
            "error_model": self.error_model.as_str(),
            "f_closed_paper": self.f_closed_paper,
            "f_closed_oracle_convention": self.f_closed_oracle_convention,
            "f_exact": self.f_exact,
            "f_after_purify": self.f_after_purify,
            "rounds_used": self.rounds_used,
            "pairs_consumed": self.pairs_consumed,
            "t_entswap": self.t_entswap,
            "t_swap": self.t_swap,
            "f_gate": self.f_gate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ReportRow> {
        vec![
            ReportRow {
                l: 25,
                p: 0.995,
                eta: 0.99,
                gamma: 0.0,
                error_model: ErrorModel::Dep,
                f_closed_paper: Some(0.7343855694701659),
                f_closed_oracle_convention: Some(0.7465021),
                f_exact: None,
                f_after_purify: Some(0.99205),
                rounds_used: Some(6),
                pairs_consumed: Some(64),
                t_entswap: Some(7.0),
                t_swap: Some(50.0),
                f_gate: Some(0.96),
            },
            ReportRow {
                l: 4,
                p: 1.0,
                eta: 1.0,
                gamma: 0.0,
                error_model: ErrorModel::CpeLeakage,
                f_closed_paper: Some(1.0),
                f_closed_oracle_convention: None,
                f_exact: Some(1.0),
                f_after_purify: None,
                rounds_used: None,
                pairs_consumed: None,
                t_entswap: None,
                t_swap: None,
                f_gate: None,
            },
        ]
    }

    #[test]
    fn round_trips_exactly() {
        let rows = sample_rows();
        let text = write_csv(&rows);
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, rows);
        // Byte-identical on re-serialization.
        assert_eq!(write_csv(&parsed), text);
    }

    #[test]
    fn blank_fields_stay_blank() {
        let text = write_csv(&sample_rows());
        let second_row = text.lines().nth(2).unwrap();
        assert!(second_row.ends_with(",,,,,"));
        assert!(!second_row.contains("0,0,0,0,0,"));
    }

    #[test]
    fn header_is_validated() {
        let err = parse_csv("nope\n1,2\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn field_count_and_types_are_validated() {
        let text = format!("{CSV_HEADER}\n4,1,1,0,dep\n");
        let err = parse_csv(&text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("14 fields"));

        let text = format!("{CSV_HEADER}\n4,x,1,0,dep,,,,,,,,,\n");
        let err = parse_csv(&text).unwrap_err();
        assert!(err.message.contains("p:"));

        let text = format!("{CSV_HEADER}\n4,1,1,0,warp,,,,,,,,,\n");
        let err = parse_csv(&text).unwrap_err();
        assert!(err.message.contains("error_model"));
    }
}

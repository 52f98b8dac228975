//! CSV serialisation. Reals carry 17 significant digits, lines end in `\n`.

use std::fs;
use std::path::Path;

use interpolatron::TraceRow;

use crate::error::CliError;

pub const TRACE_COLUMNS: [&str; 6] = ["step", "epoch", "beta", "loss", "grad_norm", "alpha_logged"];
pub const SUMMARY_COLUMNS: [&str; 7] = [
    "name",
    "seed",
    "final_loss",
    "best_loss",
    "steps_to_threshold",
    "diverged",
    "alpha_in_unit_fraction",
];

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn optional<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

/// Generic table: a header and rows of already formatted cells.
pub fn table_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = writer();
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    finish(w)
}

/// One row per step; `iterate_<i>` columns follow when `with_iterates`.
pub fn trace_bytes(rows: &[TraceRow], with_iterates: bool) -> Result<Vec<u8>, CliError> {
    let dim = if with_iterates {
        rows.first().and_then(|r| r.iterate.as_ref()).map_or(0, Vec::len)
    } else {
        0
    };
    let mut header: Vec<String> = TRACE_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..dim).map(|i| format!("iterate_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    table_bytes(
        &header_refs,
        rows.iter().map(|r| {
            let mut cells = vec![
                r.step.to_string(),
                r.epoch.to_string(),
                real(r.beta),
                real(r.loss),
                real(r.grad_norm),
                r.alpha
                    .as_ref()
                    .map(|a| a.iter().map(|v| real(*v)).collect::<Vec<_>>().join(";"))
                    .unwrap_or_default(),
            ];
            if dim > 0 {
                cells.extend(r.iterate.iter().flatten().map(|v| real(*v)));
            }
            cells
        }),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub seed: u64,
    pub final_loss: f64,
    pub best_loss: f64,
    pub steps_to_threshold: Option<u64>,
    pub diverged: bool,
    pub alpha_in_unit_fraction: Option<f64>,
}

pub fn summary_bytes(rows: &[SummaryRow]) -> Result<Vec<u8>, CliError> {
    table_bytes(
        &SUMMARY_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.name.clone(),
                r.seed.to_string(),
                real(r.final_loss),
                real(r.best_loss),
                optional(r.steps_to_threshold),
                r.diverged.to_string(),
                optional(r.alpha_in_unit_fraction.map(real)),
            ]
        }),
    )
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(step: u64, alpha: Option<Vec<f64>>, iterate: Option<Vec<f64>>) -> TraceRow {
        TraceRow {
            step,
            epoch: 0,
            beta: 0.1,
            loss: 1.0 / 3.0,
            grad_norm: 2.0,
            alpha,
            iterate,
        }
    }

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(real(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn trace_layout() {
        let text = String::from_utf8(trace_bytes(&[row(1, Some(vec![0.25, 0.75]), None)], false).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("step,epoch,beta,loss,grad_norm,alpha_logged"));
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells[0], "1");
        assert_eq!(cells[5], "2.5000000000000000e-1;7.5000000000000000e-1");
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn iterate_columns_are_opt_in() {
        let rows = [row(1, None, Some(vec![1.5])), row(2, None, Some(vec![-0.5]))];
        let plain = String::from_utf8(trace_bytes(&rows, false).unwrap()).unwrap();
        assert!(!plain.contains("iterate_0"));
        let logged = String::from_utf8(trace_bytes(&rows, true).unwrap()).unwrap();
        assert!(logged.starts_with("step,epoch,beta,loss,grad_norm,alpha_logged,iterate_0\n"));
        assert!(logged.lines().nth(2).unwrap().ends_with(",,-5.0000000000000000e-1"));
    }

    #[test]
    fn summary_layout() {
        let rows = [SummaryRow {
            name: "sgd".into(),
            seed: 3,
            final_loss: 0.5,
            best_loss: 0.25,
            steps_to_threshold: None,
            diverged: false,
            alpha_in_unit_fraction: None,
        }];
        let text = String::from_utf8(summary_bytes(&rows).unwrap()).unwrap();
        assert_eq!(
            text,
            "name,seed,final_loss,best_loss,steps_to_threshold,diverged,alpha_in_unit_fraction\n\
             sgd,3,5.0000000000000000e-1,2.5000000000000000e-1,,false,\n"
        );
    }
}

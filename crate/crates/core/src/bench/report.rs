use std::fmt::Write as _;
use std::path::Path;

use super::{MeanSd, Procedure, ProcedureSummary, RawRow};
use crate::error::{Error, Result};
use crate::output::write_atomic;

pub const RAW_HEADER: &str = "trial,procedure,R,V,FDP";
pub const SUMMARY_HEADER: &str = "procedure,metric,mean,sd,n";

/// Floats use Rust's shortest round-trip formatting.
pub fn raw_csv_string(raw: &[RawRow]) -> String {
    let mut s = String::from(RAW_HEADER);
    s.push('\n');
    for r in raw {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.trial,
            r.procedure.id(),
            r.r,
            r.v,
            r.fdp
        );
    }
    s
}

pub fn summary_csv_string(summaries: &[ProcedureSummary]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for p in summaries {
        let mut row = |metric: &str, ms: MeanSd, n: usize| {
            let _ = writeln!(s, "{},{metric},{},{},{n}", p.procedure.id(), ms.mean, ms.sd);
        };
        row("FDP", p.fdp, p.n);
        row("R", p.r, p.n);
        row("V", p.v, p.n);
        if let Some(ppv) = p.ppv {
            row("PPV", ppv, p.ppv_n);
        }
    }
    s
}

pub fn write_raw_csv(raw: &[RawRow], path: &Path) -> Result<()> {
    write_atomic(path, raw_csv_string(raw).as_bytes())
}

pub fn write_summary_csv(summaries: &[ProcedureSummary], path: &Path) -> Result<()> {
    write_atomic(path, summary_csv_string(summaries).as_bytes())
}

pub fn read_raw_csv(path: &Path) -> Result<Vec<RawRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>().join(",") != RAW_HEADER {
        return Err(Error::Parse {
            context: path.display().to_string(),
            message: format!("expected header '{RAW_HEADER}'"),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let bad = |what: &str| Error::Parse {
            context: path.display().to_string(),
            message: format!("bad {what} in row {:?}", rec),
        };
        rows.push(RawRow {
            trial: rec[0].parse().map_err(|_| bad("trial"))?,
            procedure: rec[1].parse::<Procedure>().map_err(|_| bad("procedure"))?,
            r: rec[2].parse().map_err(|_| bad("R"))?,
            v: rec[3].parse().map_err(|_| bad("V"))?,
            fdp: rec[4].parse().map_err(|_| bad("FDP"))?,
        });
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            context: path.display().to_string(),
            message: format!("{other:?}"),
        },
    }
}

/// Aligned text table with mean and SD of V/R, R and V per procedure.
pub fn format_table(summaries: &[ProcedureSummary]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>6}",
        "Procedure", "V/R mean", "V/R SD", "R mean", "R SD", "V mean", "V SD", "n"
    );
    for p in summaries {
        let _ = writeln!(
            s,
            "{:<20} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>6}",
            p.procedure.label(),
            p.fdp.mean,
            p.fdp.sd,
            p.r.mean,
            p.r.sd,
            p.v.mean,
            p.v.sd,
            p.n
        );
    }
    s
}

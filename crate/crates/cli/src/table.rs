//! Aggregate CSV tables: `index,mean_<unit>,sem_<unit>,trials,censored`.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use crossent::estimate::{AggregateSeries, LogBase};

/// One parsed CSV row. Means and SEMs are in the table's unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub index: usize,
    pub mean: Option<f64>,
    pub sem: Option<f64>,
    pub trials: usize,
    pub censored: usize,
}

pub fn header(base: LogBase) -> [String; 5] {
    let u = base.suffix();
    ["index".into(), format!("mean_{u}"), format!("sem_{u}"), "trials".into(), "censored".into()]
}

fn cell(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn write_aggregate(series: &AggregateSeries, base: LogBase, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(base))?;
    for p in &series.points {
        w.write_record([
            p.index.to_string(),
            cell(p.mean.map(|m| base.convert(m))),
            cell(p.sem.map(|s| base.convert(s))),
            p.trials.to_string(),
            p.censored.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn aggregate_csv(series: &AggregateSeries, base: LogBase) -> String {
    let mut buf = Vec::new();
    write_aggregate(series, base, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        Ok(Some(s.parse().with_context(|| format!("bad number {s:?}"))?))
    }
}

/// Parses a table written by [`write_aggregate`], returning its unit.
pub fn read_aggregate(input: impl Read) -> Result<(LogBase, Vec<Row>)> {
    let mut r = csv::Reader::from_reader(input);
    let head = r.headers()?.clone();
    let base = match head.get(1) {
        Some("mean_nats") => LogBase::Nats,
        Some("mean_bits") => LogBase::Bits,
        other => bail!("unexpected mean column {other:?}"),
    };
    if head.iter().collect::<Vec<_>>() != header(base).iter().map(String::as_str).collect::<Vec<_>>() {
        bail!("unexpected header {:?}", head);
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(Row {
            index: rec[0].parse().context("index column")?,
            mean: parse_opt(&rec[1])?,
            sem: parse_opt(&rec[2])?,
            trials: rec[3].parse().context("trials column")?,
            censored: rec[4].parse().context("censored column")?,
        });
    }
    Ok((base, rows))
}

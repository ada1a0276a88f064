//! Text formats for spectra and plans.
//!
//! PSD file: line 1 is `f_start f_stop n_points`, followed by one value per
//! line with 17 significant digits. Lines starting with `#` are comments.
//!
//! Plan file: `K`, then the K+1 boundaries, the K occupancy bits and the K
//! powers, each on its own whitespace-separated line.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::grid::FrequencyGrid;
use crate::model::plan::SubchannelPlan;
use crate::model::psd::WidebandPsd;
use crate::scalar::Real;

/// Shortest exact rendering with 17 significant digits.
pub fn fmt_real<T: Real>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

fn parse_real<T: Real>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<f64>()
        .map(T::lit)
        .map_err(|e| Error::Parse { line, message: format!("{tok:?}: {e}") })
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|e| Error::Parse { line, message: format!("{tok:?}: {e}") })
}

/// Non-comment lines paired with their 1-based line numbers.
fn data_lines<R: BufRead>(reader: R) -> Result<(Vec<String>, Vec<(usize, String)>)> {
    let mut comments = Vec::new();
    let mut data = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(c) = trimmed.strip_prefix('#') {
            comments.push(c.to_string());
        } else {
            data.push((i + 1, trimmed.to_string()));
        }
    }
    Ok((comments, data))
}

/// Write a grid-indexed series (PSD or detector response).
pub fn write_series<T: Real, W: Write>(
    mut w: W,
    grid: &FrequencyGrid<T>,
    values: &[T],
    comment: Option<&str>,
) -> Result<()> {
    if let Some(c) = comment {
        writeln!(w, "#{c}")?;
    }
    writeln!(w, "{} {} {}", fmt_real(grid.f_start()), fmt_real(grid.f_stop()), grid.n_points())?;
    for &v in values {
        writeln!(w, "{}", fmt_real(v))?;
    }
    Ok(())
}

/// A grid-indexed series read back from text, with any comment lines.
#[derive(Debug, Clone)]
pub struct Series<T> {
    pub grid: FrequencyGrid<T>,
    pub values: Vec<T>,
    pub comments: Vec<String>,
}

pub fn read_series<T: Real, R: BufRead>(reader: R) -> Result<Series<T>> {
    let (comments, lines) = data_lines(reader)?;
    let (hdr_line, header) = lines
        .first()
        .ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::Parse {
            line: *hdr_line,
            message: "header must be `f_start f_stop n_points`".into(),
        });
    }
    let grid = FrequencyGrid::new(
        parse_real(toks[0], *hdr_line)?,
        parse_real(toks[1], *hdr_line)?,
        parse_usize(toks[2], *hdr_line)?,
    )?;
    let values = lines[1..]
        .iter()
        .map(|(n, l)| parse_real::<T>(l, *n))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != grid.n_points() {
        return Err(Error::DimensionMismatch { expected: grid.n_points(), actual: values.len() });
    }
    Ok(Series { grid, values, comments })
}

pub fn write_psd<T: Real, W: Write>(w: W, psd: &WidebandPsd<T>) -> Result<()> {
    write_series(w, psd.grid(), psd.values(), None)
}

pub fn read_psd<T: Real, R: BufRead>(reader: R) -> Result<WidebandPsd<T>> {
    let s = read_series(reader)?;
    WidebandPsd::new(s.grid, s.values)
}

pub fn write_plan<T: Real, W: Write>(mut w: W, plan: &SubchannelPlan<T>) -> Result<()> {
    let join = |it: Vec<String>| it.join(" ");
    writeln!(w, "{}", plan.channel_count())?;
    writeln!(w, "{}", join(plan.boundaries().iter().map(|&b| fmt_real(b)).collect()))?;
    writeln!(
        w,
        "{}",
        join(plan.occupancy().iter().map(|&o| if o { "1" } else { "0" }.to_string()).collect())
    )?;
    writeln!(w, "{}", join(plan.power().iter().map(|&p| fmt_real(p)).collect()))?;
    Ok(())
}

pub fn read_plan<T: Real, R: BufRead>(reader: R) -> Result<SubchannelPlan<T>> {
    let (_, lines) = data_lines(reader)?;
    if lines.len() != 4 {
        return Err(Error::Parse {
            line: lines.last().map_or(1, |l| l.0),
            message: format!("plan file needs 4 lines, found {}", lines.len()),
        });
    }
    let k = parse_usize(&lines[0].1, lines[0].0)?;
    let reals = |(n, l): &(usize, String)| -> Result<Vec<T>> {
        l.split_whitespace().map(|t| parse_real(t, *n)).collect()
    };
    let boundaries = reals(&lines[1])?;
    let occupancy = lines[2]
        .1
        .split_whitespace()
        .map(|t| match t {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::Parse { line: lines[2].0, message: format!("bad occupancy bit {t:?}") }),
        })
        .collect::<Result<Vec<_>>>()?;
    let power = reals(&lines[3])?;
    if occupancy.len() != k {
        return Err(Error::Parse {
            line: lines[2].0,
            message: format!("K = {k} but {} occupancy bits", occupancy.len()),
        });
    }
    SubchannelPlan::new(boundaries, occupancy, power)
}

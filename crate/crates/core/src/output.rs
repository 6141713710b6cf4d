//! CSV writers.
//!
//! Every file starts with a `# normsim-<kind> v<version>` line. Numbers are
//! written with 10 significant digits.
//!
//! - `summary.csv`: one row per scenario.
//! - `contour_<complexity>.csv` (or `contour_<complexity>_rho<rho>.csv`
//!   when the grid has several correlations): distance to maximum with rows
//!   ordered by ascending `w_soc` (top row `w_soc = 0`) and columns by
//!   descending `alpha` (leftmost `alpha = 1`).
//! - `series_mean.csv` and `series_runs.csv` with `emit_series`.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiment::{Coupling, ScenarioReport};

pub const SUMMARY_SCHEMA: &str = "# normsim-summary v1";
pub const SUMMARY_HEADER: &str = "scenario,complexity,K,C,S,w_inc,w_soc,alpha,beta,rho,runs,periods,distance,distance_se,final_phi,final_phi_se";
pub const CONTOUR_SCHEMA: &str = "# normsim-contour v1";
pub const CONTOUR_CORNER: &str = "w_inc/w_soc";
pub const SERIES_SCHEMA: &str = "# normsim-series v1";
pub const SERIES_MEAN_HEADER: &str = "scenario,t,phi_mean,phi_se";
pub const SERIES_RUNS_HEADER: &str = "scenario,run,seed,t,phi";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("nothing to write: no scenario summaries")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Formats `v` with 10 significant digits, trailing zeros removed.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.9e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific notation has an exponent");
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let decimals = (9 - exp).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    s
}

fn pair_label(a: f64, b: f64) -> String {
    format!("{}/{}", fmt_sig(a), fmt_sig(b))
}

pub fn write_summary<W: Write>(reports: &[ScenarioReport], mut out: W) -> io::Result<()> {
    writeln!(out, "{SUMMARY_SCHEMA}")?;
    writeln!(out, "{SUMMARY_HEADER}")?;
    for rep in reports {
        let s = &rep.scenario;
        let sum = &rep.summary;
        let last = sum.mean.len().saturating_sub(1);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.index,
            s.coupling.label(),
            s.coupling.k,
            s.coupling.c,
            s.coupling.s,
            fmt_sig(s.weights.incentive()),
            fmt_sig(s.weights.social()),
            fmt_sig(s.scheme.alpha()),
            fmt_sig(s.scheme.beta()),
            fmt_sig(s.rho),
            sum.runs,
            sum.mean.len(),
            fmt_sig(sum.distance),
            fmt_sig(sum.distance_se),
            fmt_sig(sum.mean.get(last).copied().unwrap_or(f64::NAN)),
            fmt_sig(sum.std_error.get(last).copied().unwrap_or(f64::NAN)),
        )?;
    }
    Ok(())
}

/// Reports sharing one complexity level and correlation.
#[derive(Debug)]
pub struct ContourGroup<'a> {
    pub coupling: Coupling,
    pub rho: f64,
    pub reports: Vec<&'a ScenarioReport>,
}

/// Groups reports by `(coupling, rho)` in order of first appearance.
pub fn contour_groups(reports: &[ScenarioReport]) -> Vec<ContourGroup<'_>> {
    let mut groups: Vec<ContourGroup<'_>> = Vec::new();
    for rep in reports {
        let (coupling, rho) = (rep.scenario.coupling, rep.scenario.rho);
        match groups
            .iter_mut()
            .find(|g| g.coupling == coupling && g.rho.to_bits() == rho.to_bits())
        {
            Some(g) => g.reports.push(rep),
            None => groups.push(ContourGroup {
                coupling,
                rho,
                reports: vec![rep],
            }),
        }
    }
    groups
}

fn dedup_sorted(mut v: Vec<(f64, f64)>, key: impl Fn(&(f64, f64)) -> f64, descending: bool) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| {
        let ord = key(a).total_cmp(&key(b));
        if descending {
            ord.reverse()
        } else {
            ord
        }
    });
    v.dedup_by(|a, b| a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits());
    v
}

pub fn write_contour<W: Write>(group: &ContourGroup<'_>, mut out: W) -> io::Result<()> {
    let weights = dedup_sorted(
        group
            .reports
            .iter()
            .map(|r| (r.scenario.weights.incentive(), r.scenario.weights.social()))
            .collect(),
        |w| w.1,
        false,
    );
    let schemes = dedup_sorted(
        group
            .reports
            .iter()
            .map(|r| (r.scenario.scheme.alpha(), r.scenario.scheme.beta()))
            .collect(),
        |s| s.0,
        true,
    );
    let c = group.coupling;
    writeln!(out, "{CONTOUR_SCHEMA}")?;
    writeln!(
        out,
        "# complexity={} K={} C={} S={} rho={}",
        c.label(),
        c.k,
        c.c,
        c.s,
        fmt_sig(group.rho)
    )?;
    write!(out, "{CONTOUR_CORNER}")?;
    for &(a, b) in &schemes {
        write!(out, ",{}", pair_label(a, b))?;
    }
    writeln!(out)?;
    for &(wi, ws) in &weights {
        write!(out, "{}", pair_label(wi, ws))?;
        for &(a, b) in &schemes {
            let cell = group.reports.iter().find(|r| {
                let s = &r.scenario;
                s.weights.incentive().to_bits() == wi.to_bits()
                    && s.weights.social().to_bits() == ws.to_bits()
                    && s.scheme.alpha().to_bits() == a.to_bits()
                    && s.scheme.beta().to_bits() == b.to_bits()
            });
            match cell {
                Some(r) => write!(out, ",{}", fmt_sig(r.summary.distance))?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_series_mean<W: Write>(reports: &[ScenarioReport], mut out: W) -> io::Result<()> {
    writeln!(out, "{SERIES_SCHEMA}")?;
    writeln!(out, "{SERIES_MEAN_HEADER}")?;
    for rep in reports {
        for (t, (m, se)) in rep.summary.mean.iter().zip(&rep.summary.std_error).enumerate() {
            writeln!(out, "{},{},{},{}", rep.scenario.index, t + 1, fmt_sig(*m), fmt_sig(*se))?;
        }
    }
    Ok(())
}

pub fn write_series_runs<W: Write>(reports: &[ScenarioReport], mut out: W) -> io::Result<()> {
    writeln!(out, "{SERIES_SCHEMA}")?;
    writeln!(out, "{SERIES_RUNS_HEADER}")?;
    for rep in reports {
        for run in rep.runs.iter().flatten() {
            for (t, v) in run.phi.iter().enumerate() {
                writeln!(out, "{},{},{},{},{}", rep.scenario.index, run.run, run.seed, t + 1, fmt_sig(*v))?;
            }
        }
    }
    Ok(())
}

fn write_file(path: PathBuf, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<PathBuf, OutputError> {
    let wrap = |source| OutputError::Io {
        path: path.clone(),
        source,
    };
    let file = File::create(&path).map_err(wrap)?;
    let mut out = BufWriter::new(file);
    f(&mut out).map_err(wrap)?;
    out.flush().map_err(wrap)?;
    Ok(path)
}

/// Writes all CSVs into `dir` (created if missing); returns the paths in
/// write order.
pub fn write_outputs(reports: &[ScenarioReport], dir: &Path, emit_series: bool) -> Result<Vec<PathBuf>, OutputError> {
    if reports.is_empty() {
        return Err(OutputError::Empty);
    }
    fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.to_path_buf(),
        source,
    })?;

    let mut written = vec![write_file(dir.join("summary.csv"), |out| write_summary(reports, out))?];
    let groups = contour_groups(reports);
    let several_rho = groups.iter().any(|g| g.rho.to_bits() != groups[0].rho.to_bits());
    for group in &groups {
        let name = if several_rho {
            format!("contour_{}_rho{}.csv", group.coupling.label(), fmt_sig(group.rho))
        } else {
            format!("contour_{}.csv", group.coupling.label())
        };
        written.push(write_file(dir.join(name), |out| write_contour(group, out))?);
    }
    if emit_series {
        written.push(write_file(dir.join("series_mean.csv"), |out| write_series_mean(reports, out))?);
        if reports.iter().any(|r| r.runs.is_some()) {
            written.push(write_file(dir.join("series_runs.csv"), |out| write_series_runs(reports, out))?);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.75), "0.75");
        assert_eq!(fmt_sig(0.3), "0.3");
        assert_eq!(fmt_sig(150.0), "150");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_sig(123.456789012345), "123.456789");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(9.99999999999), "10");
        assert_eq!(fmt_sig(1.5e-9), "1.500000000e-9");
    }
}

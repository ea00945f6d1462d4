//! CSV tables and JSON reports. Floats are written with `{:.17e}` so that
//! values round-trip exactly and identical runs give identical bytes.

use std::path::Path;

use serde::Serialize;

use super::mc::McReport;
use super::run::{RunReport, SweepTable};
use crate::geometry::SurfaceProfile;
use crate::solver::DiscreteField;
use crate::{Error, Result, C64};

pub fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(path, s + "\n")?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 16] = [
    "omega",
    "h",
    "lipschitz",
    "u_vh",
    "g_l2",
    "g_h1",
    "total_bound",
    "measured_ratio",
    "energy_flux",
    "source_work",
    "energy_residual",
    "radiated_power",
    "poincare_lhs",
    "poincare_rhs",
    "iterations",
    "solve_residual",
];

fn summary_row(r: &RunReport) -> Vec<String> {
    let d = &r.diagnostics;
    vec![
        fmt(r.config.physics.omega),
        fmt(r.config.geometry.h),
        fmt(r.lipschitz),
        fmt(r.u_vh),
        fmt(r.g_l2),
        fmt(r.g_h1),
        fmt(r.bound.total_bound),
        fmt(r.measured_ratio()),
        fmt(d.energy.flux),
        fmt(d.energy.source_work),
        fmt(d.energy.residual),
        fmt(d.energy.radiated_power),
        fmt(d.poincare.lhs),
        fmt(d.poincare.rhs),
        d.solve.iterations.to_string(),
        fmt(d.solve.residual),
    ]
}

pub fn write_summary_csv(path: &Path, reports: &[RunReport]) -> Result<()> {
    write_rows(path, &SUMMARY_HEADER, reports.iter().map(summary_row))
}

pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    let mut header = vec!["value"];
    header.extend_from_slice(&SUMMARY_HEADER);
    header.push("error");
    let rows = table.rows.iter().map(|row| {
        let mut out = vec![fmt(row.value)];
        match &row.report {
            Some(r) => out.extend(summary_row(r)),
            None => out.extend(std::iter::repeat_n(String::new(), SUMMARY_HEADER.len())),
        }
        out.push(row.error.clone().unwrap_or_default());
        out
    });
    write_rows(path, &header, rows)
}

pub fn write_field_csv(path: &Path, field: &DiscreteField) -> Result<()> {
    let mesh = field.mesh();
    let grid = mesh.grid();
    let header = ["j1", "j2", "node", "z", "u1_re", "u1_im", "u2_re", "u2_im", "u3_re", "u3_im"];
    let rows = (0..grid.n_modes()).flat_map(|m| {
        let j = grid.mode_index(m);
        (0..=mesh.nz()).map(move |k| {
            let u = field.node(m, k);
            let mut r = vec![j[0].to_string(), j[1].to_string(), k.to_string(), fmt(mesh.nodes()[k])];
            for c in u {
                r.push(fmt(c.re));
                r.push(fmt(c.im));
            }
            r
        })
    });
    write_rows(path, &header, rows)
}

pub fn write_mc_csv(path: &Path, report: &McReport) -> Result<()> {
    let header = [
        "sample_id",
        "rejections",
        "lipschitz",
        "u_sq",
        "g_sq",
        "iterations",
        "energy_residual",
        "radiated_power",
        "poincare_lhs",
        "poincare_rhs",
        "error",
    ];
    let rows = report.samples.iter().map(|s| {
        vec![
            s.sample_id.to_string(),
            s.rejections.to_string(),
            fmt(s.lipschitz),
            opt(s.u_sq),
            opt(s.g_sq),
            s.iterations.map(|i| i.to_string()).unwrap_or_default(),
            opt(s.energy_residual),
            opt(s.radiated_power),
            opt(s.poincare.map(|p| p[0])),
            opt(s.poincare.map(|p| p[1])),
            s.error.clone().unwrap_or_default(),
        ]
    });
    write_rows(path, &header, rows)
}

pub fn write_surface_csv(path: &Path, surface: &SurfaceProfile, dims: [usize; 2]) -> Result<()> {
    let rows = surface.grid_samples(dims).into_iter().map(|s| s.iter().map(|v| fmt(*v)).collect());
    write_rows(path, &["x1", "x2", "f"], rows)
}

/// `(name, value)` pairs.
pub fn write_pairs_csv(path: &Path, pairs: &[(&str, f64)]) -> Result<()> {
    write_rows(path, &["name", "value"], pairs.iter().map(|(n, v)| vec![n.to_string(), fmt(*v)]))
}

/// Points with three complex components: `x1, x2, x3, u1_re, …, u3_im`.
pub fn write_points_csv(path: &Path, points: &[([f64; 3], [C64; 3])]) -> Result<()> {
    let header = ["x1", "x2", "x3", "u1_re", "u1_im", "u2_re", "u2_im", "u3_re", "u3_im"];
    let rows = points.iter().map(|(x, u)| {
        let mut r: Vec<String> = x.iter().map(|v| fmt(*v)).collect();
        for c in u {
            r.push(fmt(c.re));
            r.push(fmt(c.im));
        }
        r
    });
    write_rows(path, &header, rows)
}

/// Read a trace file with columns `x1, x2, u1_re, u1_im, u2_re, u2_im,
/// u3_re, u3_im`, one row per collocation point in grid order.
pub fn read_trace_csv(path: &Path) -> Result<Vec<[C64; 3]>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 8 {
            return Err(Error::Config(format!("trace row {} has {} columns, expected 8", i + 1, rec.len())));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("trace row {}: {e}", i + 1))))
            .collect::<Result<_>>()?;
        out.push([C64::new(v[2], v[3]), C64::new(v[4], v[5]), C64::new(v[6], v[7])]);
    }
    Ok(out)
}

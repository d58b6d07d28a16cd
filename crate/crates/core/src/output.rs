//! Result serialization: field/modal CSV, slices, marching-squares
//! contours, and the run manifest. All CSV output uses a header row, LF
//! line endings, and 17-significant-digit floats that round-trip exactly.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::solution::DgSolution;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits; round-trips any f64 exactly.
pub fn fmt_csv(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Cell-average field: one row per cell, cell-center coordinates first.
pub fn field_csv(sol: &DgSolution) -> String {
    let mut s = String::new();
    if sol.mesh.dim == 1 {
        s.push_str("x,u\n");
    } else {
        s.push_str("x,y,u\n");
    }
    for c in 0..sol.mesh.n_cells() {
        let (x, y) = sol.mesh.cell_center(c);
        if sol.mesh.dim == 1 {
            let _ = writeln!(s, "{},{}", fmt_csv(x), fmt_csv(sol.cell_average(c)));
        } else {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_csv(x),
                fmt_csv(y),
                fmt_csv(sol.cell_average(c))
            );
        }
    }
    s
}

/// Full modal dump, one row per coefficient.
pub fn modal_csv(sol: &DgSolution) -> String {
    let nm = sol.n_modes();
    let mut s = String::from("cell,mode,value\n");
    for c in 0..sol.mesh.n_cells() {
        let block = sol.cell(c);
        for m in 0..nm {
            let _ = writeln!(s, "{c},{m},{}", fmt_csv(block[m]));
        }
    }
    s
}

/// Cell-average values on the structured grid of cell centers; the common
/// carrier for slices and contours whether built in memory or from a field
/// CSV on disk.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: values[j * xs.len() + i].
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn dim(&self) -> usize {
        if self.ys.len() <= 1 {
            1
        } else {
            2
        }
    }

    pub fn from_solution(sol: &DgSolution) -> Self {
        let nx = sol.mesh.nx;
        let ny = if sol.mesh.dim == 1 { 1 } else { sol.mesh.ny };
        let mut xs = Vec::with_capacity(nx);
        let mut ys = Vec::with_capacity(ny);
        let mut values = vec![0.0; nx * ny];
        for c in 0..sol.mesh.n_cells() {
            let (i, j) = sol.mesh.cell_coords(c);
            let (x, y) = sol.mesh.cell_center(c);
            if j == 0 {
                if xs.len() <= i {
                    xs.resize(i + 1, 0.0);
                }
                xs[i] = x;
            }
            if i == 0 {
                if ys.len() <= j {
                    ys.resize(j + 1, 0.0);
                }
                ys[j] = y;
            }
            values[j * nx + i] = sol.cell_average(c);
        }
        FieldGrid { xs, ys, values }
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Io("empty field file".into()))?;
        let two_d = match header {
            "x,u" => false,
            "x,y,u" => true,
            _ => {
                return Err(Error::Io(format!(
                    "unrecognized field header '{header}'"
                )))
            }
        };
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| -> Result<f64> {
                parts
                    .next()
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Io(format!("field row {}: bad {what}", idx + 2))
                    })
            };
            let x = next("x")?;
            let y = if two_d { next("y")? } else { 0.0 };
            let u = next("u")?;
            rows.push((x, y, u));
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if rows.len() != xs.len() * ys.len() {
            return Err(Error::Io("field rows do not form a full grid".into()));
        }
        let mut values = vec![f64::NAN; rows.len()];
        for (x, y, u) in rows {
            let i = xs.binary_search_by(|p| p.total_cmp(&x)).unwrap();
            let j = ys.binary_search_by(|p| p.total_cmp(&y)).unwrap();
            values[j * xs.len() + i] = u;
        }
        Ok(FieldGrid { xs, ys, values })
    }

    /// Strip index containing `v` along `axis`, from cell centers; a
    /// coordinate on a cell boundary belongs to the positive side.
    fn strip(&self, axis: usize, v: f64) -> Result<usize> {
        let cs = if axis == 0 { &self.xs } else { &self.ys };
        let n = cs.len();
        if n == 1 {
            return Ok(0);
        }
        let h = cs[1] - cs[0];
        let lo = cs[0] - 0.5 * h;
        let t = (v - lo) / h;
        let snapped = t.round();
        let mut idx = if (t - snapped).abs() <= 1e-9 * (1.0 + t.abs()) {
            snapped as i64
        } else {
            t.floor() as i64
        };
        if idx == n as i64 && (t - n as f64).abs() <= 1e-9 * (1.0 + t.abs()) {
            idx = n as i64 - 1;
        }
        if idx < 0 || idx >= n as i64 {
            return Err(Error::solver(format!(
                "coordinate {v} is outside the domain along axis {axis}"
            )));
        }
        Ok(idx as usize)
    }
}

/// Line of cell averages along the strip where the `fixed_axis` coordinate
/// equals `coord`; abscissae are cell centers of the other axis.
pub fn slice_csv(grid: &FieldGrid, fixed_axis: usize, coord: f64) -> Result<String> {
    if grid.dim() != 2 {
        return Err(Error::config("slice extraction requires a 2D field"));
    }
    if fixed_axis > 1 {
        return Err(Error::config("slice axis must be x or y"));
    }
    let strip = grid.strip(fixed_axis, coord)?;
    let nx = grid.xs.len();
    let (abscissa, mut s) = if fixed_axis == 1 {
        (&grid.xs, String::from("x,u\n"))
    } else {
        (&grid.ys, String::from("y,u\n"))
    };
    for (i, &a) in abscissa.iter().enumerate() {
        let v = if fixed_axis == 1 {
            grid.values[strip * nx + i]
        } else {
            grid.values[i * nx + strip]
        };
        let _ = writeln!(s, "{},{}", fmt_csv(a), fmt_csv(v));
    }
    Ok(s)
}

pub fn default_levels(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5];
    }
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy)]
enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

/// Marching squares on the cell-center grid; rows are line segments per
/// level. Corners strictly above the level count as inside, so a constant
/// field produces no segments at its own value.
pub fn contour_csv(grid: &FieldGrid, levels: &[f64]) -> Result<String> {
    if grid.dim() != 2 || grid.xs.len() < 2 || grid.ys.len() < 2 {
        return Err(Error::config("contour extraction requires a 2D field"));
    }
    let nx = grid.xs.len();
    let mut s = String::from("level,x1,y1,x2,y2\n");
    for &level in levels {
        for j in 0..grid.ys.len() - 1 {
            for i in 0..nx - 1 {
                let v = [
                    grid.values[j * nx + i],
                    grid.values[j * nx + i + 1],
                    grid.values[(j + 1) * nx + i + 1],
                    grid.values[(j + 1) * nx + i],
                ];
                let case = (v[0] > level) as usize
                    | ((v[1] > level) as usize) << 1
                    | ((v[2] > level) as usize) << 2
                    | ((v[3] > level) as usize) << 3;
                if case == 0 || case == 15 {
                    continue;
                }
                let point = |e: Edge| -> (f64, f64) {
                    let (x0, x1) = (grid.xs[i], grid.xs[i + 1]);
                    let (y0, y1) = (grid.ys[j], grid.ys[j + 1]);
                    let lerp = |a: f64, b: f64| (level - a) / (b - a);
                    match e {
                        Edge::Bottom => (x0 + lerp(v[0], v[1]) * (x1 - x0), y0),
                        Edge::Right => (x1, y0 + lerp(v[1], v[2]) * (y1 - y0)),
                        Edge::Top => (x0 + lerp(v[3], v[2]) * (x1 - x0), y1),
                        Edge::Left => (x0, y0 + lerp(v[0], v[3]) * (y1 - y0)),
                    }
                };
                let segs: &[(Edge, Edge)] = match case {
                    1 | 14 => &[(Edge::Left, Edge::Bottom)],
                    2 | 13 => &[(Edge::Bottom, Edge::Right)],
                    3 | 12 => &[(Edge::Left, Edge::Right)],
                    4 | 11 => &[(Edge::Right, Edge::Top)],
                    6 | 9 => &[(Edge::Bottom, Edge::Top)],
                    7 | 8 => &[(Edge::Left, Edge::Top)],
                    5 | 10 => {
                        let center_above = 0.25 * (v[0] + v[1] + v[2] + v[3]) > level;
                        // Saddle: split so the above-level corners stay
                        // connected exactly when the center is above.
                        if (case == 5) == center_above {
                            &[(Edge::Bottom, Edge::Right), (Edge::Top, Edge::Left)]
                        } else {
                            &[(Edge::Bottom, Edge::Left), (Edge::Top, Edge::Right)]
                        }
                    }
                    _ => unreachable!(),
                };
                for (e1, e2) in segs {
                    let (x1c, y1c) = point(*e1);
                    let (x2c, y2c) = point(*e2);
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        fmt_csv(level),
                        fmt_csv(x1c),
                        fmt_csv(y1c),
                        fmt_csv(x2c),
                        fmt_csv(y2c)
                    );
                }
            }
        }
    }
    Ok(s)
}

/// Run manifest: the exact canonical config (re-parseable to reproduce the
/// run) followed by run statistics as comment lines.
pub fn manifest_text(config: &RunConfig, stats: &[(&str, String)]) -> String {
    let mut s = config.serialize();
    for (name, value) in stats {
        let _ = writeln!(s, "# stat: {name} = {value}");
    }
    s
}

//! CSV readers and writers for sampled functions.
//!
//! | kind        | columns                 |
//! |-------------|-------------------------|
//! | finite      | `index, re, im`         |
//! | heisenberg  | `a, b, c, re, im`       |
//! | axb         | `log_a, b, re, im`      |
//! | radial      | `r, value`              |

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::axb::AxbFunction;
use crate::error::{Error, Result};
use crate::finite::{FiniteGroup, FiniteGroupFunction};
use crate::grid::UniformGrid;
use crate::heisenberg::HFunction;
use crate::spherical::RadialFunction;

fn records<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let got: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
    if got != header {
        return Err(Error::invalid(format!("expected CSV header {header:?}, got {got:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{s}' in CSV"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Recovers a uniform grid from the distinct sorted coordinates.
fn infer_grid(mut coords: Vec<f64>, name: &str) -> Result<UniformGrid> {
    coords.sort_by(f64::total_cmp);
    coords.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    if coords.len() < 2 {
        return Err(Error::invalid(format!("column {name} needs at least two distinct values")));
    }
    let step = (coords[coords.len() - 1] - coords[0]) / (coords.len() - 1) as f64;
    for (i, c) in coords.iter().enumerate() {
        if (c - (coords[0] + i as f64 * step)).abs() > 1e-9 * step {
            return Err(Error::invalid(format!("column {name} is not a uniform grid")));
        }
    }
    UniformGrid::new(coords[0], step, coords.len())
}

pub fn read_finite<R: Read>(input: R, group: FiniteGroup) -> Result<FiniteGroupFunction> {
    let rows = records(input, &["index", "re", "im"])?;
    let mut values = vec![None; group.order()];
    for r in rows {
        let i = r[0] as usize;
        if r[0] != i as f64 || i >= values.len() {
            return Err(Error::invalid(format!("index {} out of range for a group of order {}", r[0], group.order())));
        }
        values[i] = Some(Complex64::new(r[1], r[2]));
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::invalid(format!("missing value for index {i}"))))
        .collect::<Result<Vec<_>>>()?;
    FiniteGroupFunction::new(group, values)
}

pub fn write_finite<W: Write>(out: W, f: &FiniteGroupFunction) -> Result<()> {
    let mut w = writer(out, &["index", "re", "im"])?;
    for (i, v) in f.values.iter().enumerate() {
        w.write_record([i.to_string(), num(v.re), num(v.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads samples on a periodic box `[-R, R)³`.
pub fn read_heisenberg<R: Read>(input: R) -> Result<HFunction> {
    let rows = records(input, &["a", "b", "c", "re", "im"])?;
    let grid = infer_grid(rows.iter().map(|r| r[0]).collect(), "a")?;
    let n = grid.len;
    let half_width = -grid.start;
    if (grid.start + n as f64 * grid.step - half_width).abs() > 1e-9 * half_width {
        return Err(Error::invalid("Heisenberg samples must lie on a box [-R, R) with n nodes per axis"));
    }
    let mut values = vec![None; n * n * n];
    for r in &rows {
        let idx = |x: f64| grid.node_index(x).ok_or_else(|| Error::invalid(format!("coordinate {x} is off the grid")));
        let k = (idx(r[0])? * n + idx(r[1])?) * n + idx(r[2])?;
        values[k] = Some(Complex64::new(r[3], r[4]));
    }
    let values = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::invalid("missing grid points in Heisenberg CSV")))
        .collect::<Result<Vec<_>>>()?;
    HFunction::new(half_width, n, values)
}

pub fn write_heisenberg<W: Write>(out: W, f: &HFunction) -> Result<()> {
    let mut w = writer(out, &["a", "b", "c", "re", "im"])?;
    let pts = f.grid().points();
    let n = f.n();
    for (k, v) in f.values().iter().enumerate() {
        let (ia, ib, ic) = (k / (n * n), (k / n) % n, k % n);
        w.write_record([num(pts[ia]), num(pts[ib]), num(pts[ic]), num(v.re), num(v.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_axb<R: Read>(input: R) -> Result<AxbFunction> {
    let rows = records(input, &["log_a", "b", "re", "im"])?;
    let ga = infer_grid(rows.iter().map(|r| r[0]).collect(), "log_a")?;
    let gb = infer_grid(rows.iter().map(|r| r[1]).collect(), "b")?;
    let mut values = vec![None; ga.len * gb.len];
    for r in &rows {
        let ia = ga.node_index(r[0]).ok_or_else(|| Error::invalid("log_a off the grid"))?;
        let ib = gb.node_index(r[1]).ok_or_else(|| Error::invalid("b off the grid"))?;
        values[ia * gb.len + ib] = Some(Complex64::new(r[2], r[3]));
    }
    let values = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::invalid("missing grid points in ax+b CSV")))
        .collect::<Result<Vec<_>>>()?;
    AxbFunction::new(ga, gb, values)
}

pub fn write_axb<W: Write>(out: W, f: &AxbFunction) -> Result<()> {
    let mut w = writer(out, &["log_a", "b", "re", "im"])?;
    for (ia, a) in f.log_a.points().into_iter().enumerate() {
        for (ib, b) in f.b.points().into_iter().enumerate() {
            let v = f.at(ia, ib);
            w.write_record([num(a), num(b), num(v.re), num(v.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_radial<R: Read>(input: R) -> Result<RadialFunction> {
    let rows = records(input, &["r", "value"])?;
    let grid = infer_grid(rows.iter().map(|r| r[0]).collect(), "r")?;
    if grid.start.abs() > 1e-12 {
        return Err(Error::invalid("radial samples must start at r = 0"));
    }
    let grid = UniformGrid::new(0.0, grid.step, grid.len)?;
    let mut values = vec![None; grid.len];
    for r in &rows {
        let i = grid.node_index(r[0]).ok_or_else(|| Error::invalid("r off the grid"))?;
        values[i] = Some(r[1]);
    }
    let values = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::invalid("missing radii in radial CSV")))
        .collect::<Result<Vec<_>>>()?;
    RadialFunction::new(grid, values)
}

pub fn write_radial<W: Write>(out: W, f: &RadialFunction) -> Result<()> {
    let mut w = writer(out, &["r", "value"])?;
    for (r, v) in f.grid.points().into_iter().zip(&f.values) {
        w.write_record([num(r), num(*v)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn finite_round_trip() {
        let mut rng = random::rng(80);
        let f = FiniteGroupFunction::random(FiniteGroup::S3, &mut rng);
        let mut buf = Vec::new();
        write_finite(&mut buf, &f).unwrap();
        assert_eq!(read_finite(&buf[..], FiniteGroup::S3).unwrap(), f);
        assert!(read_finite(&b"index,re,im\n0,1,0\n"[..], FiniteGroup::S3).is_err());
        assert!(read_finite(&b"i,re,im\n0,1,0\n"[..], FiniteGroup::cyclic(1).unwrap()).is_err());
    }

    #[test]
    fn heisenberg_and_axb_round_trip() {
        let h = HFunction::gaussian(1.0, 2.0, 8).unwrap();
        let mut buf = Vec::new();
        write_heisenberg(&mut buf, &h).unwrap();
        let back = read_heisenberg(&buf[..]).unwrap();
        assert_eq!(back.n(), 8);
        assert!((back.half_width() - 2.0).abs() < 1e-12);
        assert_eq!(back.values(), h.values());

        let a = AxbFunction::product_bump(1.0, 1.0, 1.25, 8, 1.25, 10).unwrap();
        let mut buf = Vec::new();
        write_axb(&mut buf, &a).unwrap();
        let back = read_axb(&buf[..]).unwrap();
        assert_eq!(back.values, a.values);
        assert_eq!(back.b.len, 10);
    }

    #[test]
    fn radial_round_trip() {
        let f = RadialFunction::from_fn(1.0, 11, |r| 1.0 - r * r).unwrap();
        let mut buf = Vec::new();
        write_radial(&mut buf, &f).unwrap();
        let back = read_radial(&buf[..]).unwrap();
        assert_eq!(back.values, f.values);
        assert!(read_radial(&b"r,value\n0.5,1\n1.0,2\n1.5,3\n"[..]).is_err());
    }
}

//! Plain-text dump: a header line `size,resolution,origin_x,origin_y,origin_theta`
//! followed by `size` rows of comma-separated values, row `iy = 0` first.
//! `MAX_COST` is written as `max`.

use std::fmt::Write;

use super::grid::{CostMap, MapGeometry, MAX_COST};
use crate::error::{Error, Result};
use crate::geometry::FrameTransform;

pub fn costmap_to_csv(map: &CostMap) -> String {
    let g = map.geometry;
    let o = map.origin;
    let mut s = format!(
        "{},{},{},{},{}\n",
        g.size, g.resolution, o.translation.0, o.translation.1, o.rotation
    );
    for iy in 0..g.size {
        for ix in 0..g.size {
            if ix > 0 {
                s.push(',');
            }
            let v = map.get(ix, iy);
            if v == MAX_COST {
                s.push_str("max");
            } else {
                write!(s, "{v}").expect("write to string");
            }
        }
        s.push('\n');
    }
    s
}

fn parse_f64(tok: &str) -> Result<f64> {
    let tok = tok.trim();
    if tok == "max" {
        return Ok(MAX_COST);
    }
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad cost map value {tok:?}")))
}

pub fn costmap_from_csv(text: &str) -> Result<CostMap> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty cost map dump".into()))?;
    let h: Vec<&str> = header.split(',').collect();
    if h.len() != 5 {
        return Err(Error::Parse("cost map header needs 5 fields".into()));
    }
    let size: usize = h[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad cost map size".into()))?;
    let geometry = MapGeometry::new(size, parse_f64(h[1])?)?;
    let origin = FrameTransform {
        translation: (parse_f64(h[2])?, parse_f64(h[3])?),
        rotation: parse_f64(h[4])?,
    };
    let mut data = Vec::with_capacity(geometry.len());
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row = line.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
        if row.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: row.len(),
            });
        }
        data.extend(row);
    }
    CostMap::from_parts(geometry, origin, data)
}

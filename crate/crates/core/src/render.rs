//! Static SVG pictures of limit-set samples in the disk model.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::boundary::LimitSetSample;
use crate::embedding::minimal_subspace_restrict;
use crate::error::{Error, Result};

pub const CANVAS: u32 = 1000;
const CENTER: f64 = 500.0;
const SCALE: f64 = 480.0;
const DOT_RADIUS: f64 = 3.0;

/// Unit-disk coordinates of each sample point. Samples of dimension 2 use
/// their spatial directions; higher ones are first restricted to their
/// minimal Minkowski span, which must have rank at most 3.
pub fn planar_points(sample: &LimitSetSample) -> Result<Vec<(f64, f64)>> {
    let dim = sample
        .dim()
        .ok_or_else(|| Error::Empty("limit-set sample has no points".into()))?;
    if dim == 2 {
        return Ok(sample.points.iter().map(|p| (p.direction()[0], p.direction()[1])).collect());
    }
    if dim < 2 {
        return Err(Error::Render(format!("boundary of dimension-{dim} space has no disk picture")));
    }
    let vs: Vec<DVector<f64>> = sample.points.iter().map(|p| p.vector().coords().clone()).collect();
    let r = minimal_subspace_restrict(&vs)?;
    if r.rank > 3 {
        return Err(Error::Render(format!(
            "sample spans rank {} of {}; restrict it to a plane first (minimal_subspace_restrict)",
            r.rank,
            dim + 1
        )));
    }
    Ok(r.restricted
        .iter()
        .map(|v| {
            let t = v[0];
            let y = if v.len() > 2 { v[2] / t } else { 0.0 };
            (v[1] / t, y)
        })
        .collect())
}

/// Fixed 1000×1000 canvas, the unit circle, one dot per point.
pub fn render_svg(sample: &LimitSetSample) -> Result<String> {
    let pts = planar_points(sample)?;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&sample.group_label));
    let _ = writeln!(s, r#"<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<circle class="boundary" cx="{CENTER:.3}" cy="{CENTER:.3}" r="{SCALE:.3}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for (x, y) in pts {
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{:.3}" cy="{:.3}" r="{DOT_RADIUS:.1}" fill="black"/>"#,
            CENTER + SCALE * x,
            CENTER - SCALE * y
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_limit_set(sample: &LimitSetSample, path: &Path) -> Result<()> {
    let svg = render_svg(sample)?;
    std::fs::write(path, svg)?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::IdealPoint;

    fn dots(svg: &str) -> usize {
        svg.matches(r#"class="point""#).count()
    }

    #[test]
    fn two_points_two_dots() {
        let s = LimitSetSample::new(
            vec![IdealPoint::from_direction(&[1.0, 0.0]).unwrap(), IdealPoint::from_direction(&[-1.0, 0.0]).unwrap()],
            1,
            "axis",
        );
        let svg = render_svg(&s).unwrap();
        assert_eq!(dots(&svg), 2);
        assert_eq!(svg.matches(r#"class="boundary""#).count(), 1);
        assert!(svg.contains(r#"cx="980.000" cy="500.000""#));
        assert!(svg.contains(r#"cx="20.000" cy="500.000""#));
    }

    #[test]
    fn empty_is_an_error() {
        assert!(render_svg(&LimitSetSample::new(vec![], 0, "none")).is_err());
    }

    #[test]
    fn planar_sample_in_h3_reduces() {
        // Points on the equator x3 = 0 of the sphere at infinity of ℍ³.
        let pts = (0..5)
            .map(|k| {
                let a = k as f64;
                IdealPoint::from_direction(&[a.cos(), a.sin(), 0.0]).unwrap()
            })
            .collect();
        let s = LimitSetSample::new(pts, 1, "plane");
        for (x, y) in planar_points(&s).unwrap() {
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 1e-9);
        }
        let full = LimitSetSample::new(
            vec![
                IdealPoint::from_direction(&[1.0, 0.0, 0.0]).unwrap(),
                IdealPoint::from_direction(&[0.0, 1.0, 0.0]).unwrap(),
                IdealPoint::from_direction(&[0.0, 0.0, 1.0]).unwrap(),
                IdealPoint::from_direction(&[-1.0, 0.0, 0.0]).unwrap(),
            ],
            1,
            "full",
        );
        assert!(matches!(render_svg(&full), Err(Error::Render(_))));
    }
}

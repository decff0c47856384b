//! SVG rendering of a planar cover artifact.
//!
//! The renderer only reads the artifact: simplices, their perturbed
//! barycenters, the window box and the set. Inside a simplex with vertices
//! `w_i` and perturbed barycenter `b′`, the star of `w_i` is the quadrilateral
//! `w_i, mid(w_i, w_j), b′, mid(w_i, w_k)`.

use std::fmt::Write as _;

use serde_json::Value;

use crate::coarse::WindowSpec;
use crate::error::{input, Error, Result};
use crate::scale::{q_to_f64, serde_q::value_to_q, Q};

/// Nine fills indexed by vertex position mod 3, so adjacent stars differ.
const FILLS: [&str; 9] =
    ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#bfef45", "#9a6324"];

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn point(v: &Value) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::Input(format!("expected a coordinate array, got {v}")))?
        .iter()
        .map(value_to_q)
        .collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Input(format!("artifact lacks {key:?}")))
}

fn mid(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| (x + y) / Q::from_integer(2)).collect()
}

/// Render the JSON written by `cover-build` as an SVG 1.1 document.
pub fn render_cover(artifact: &Value) -> Result<String> {
    let spec: WindowSpec = serde_json::from_value(field(artifact, "window")?.clone())
        .map_err(|e| Error::Input(format!("bad window in artifact: {e}")))?;
    if spec.dim != 2 {
        return input(format!("only planar covers can be drawn, got dimension {}", spec.dim));
    }
    let res = Q::from_integer(spec.q as i128);
    let side = value_to_q(field(field(artifact, "report")?, "side")?)?;
    let [x0, x1] = [q_to_f64(&spec.bounds[0][0].0), q_to_f64(&spec.bounds[0][1].0)];
    let [y0, y1] = [q_to_f64(&spec.bounds[1][0].0), q_to_f64(&spec.bounds[1][1].0)];
    let (w, h) = ((x1 - x0).max(1.0), (y1 - y0).max(1.0));
    let dot = w.max(h) / 400.0;
    let px_w = 800.0;
    let px_h = (px_w * h / w).clamp(100.0, 4000.0);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(px_w),
        num(px_h),
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="window"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath></defs>"#,
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    // flip so that y grows upwards
    let _ = writeln!(out, r#"<g transform="matrix(1 0 0 -1 0 {})" clip-path="url(#window)">"#, num(y0 + y1));

    let simplices = field(artifact, "simplices")?
        .as_array()
        .ok_or_else(|| Error::Input("artifact \"simplices\" must be an array".into()))?;
    let mut outlines = String::new();
    let mut markers = String::new();
    let _ = writeln!(out, r#"<g id="stars" fill-opacity="0.55" stroke="none">"#);
    for s in simplices {
        let verts: Vec<Vec<Q>> = field(s, "vertices")?
            .as_array()
            .ok_or_else(|| Error::Input("simplex vertices must be an array".into()))?
            .iter()
            .map(point)
            .collect::<Result<_>>()?;
        if verts.len() != 3 || verts.iter().any(|v| v.len() != 2) {
            return input("planar simplices need three vertices with two coordinates");
        }
        let bp = point(field(s, "b_prime")?)?;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let poly = [verts[i].clone(), mid(&verts[i], &verts[j]), bp.clone(), mid(&verts[i], &verts[k])];
            let cx = (verts[i][0] / side).to_integer().rem_euclid(3) as usize;
            let cy = (verts[i][1] / side).to_integer().rem_euclid(3) as usize;
            let _ = writeln!(out, r#"<polygon fill="{}" points="{}"/>"#, FILLS[3 * cx + cy], polyline(&poly));
        }
        let _ = writeln!(outlines, r#"<polygon points="{}"/>"#, polyline(&verts));
        let _ = writeln!(
            markers,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(q_to_f64(&bp[0])),
            num(q_to_f64(&bp[1])),
            num(dot * 1.5)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<g id="simplices" fill="none" stroke="#333333" stroke-width="1" vector-effect="non-scaling-stroke">"##
    );
    out.push_str(&outlines);
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g id="set" fill="#000000">"##);
    for p in
        field(artifact, "set")?.as_array().ok_or_else(|| Error::Input("artifact \"set\" must be an array".into()))?
    {
        let c = point(p)?;
        if c.len() != 2 {
            return input("set points need two coordinates");
        }
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(q_to_f64(&(c[0] / res))),
            num(q_to_f64(&(c[1] / res))),
            num(dot)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<g id="b-prime" fill="#ffffff" stroke="#d00000" stroke-width="2" vector-effect="non-scaling-stroke">"##
    );
    out.push_str(&markers);
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000000" stroke-width="2" vector-effect="non-scaling-stroke"/>"##,
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn polyline(ps: &[Vec<Q>]) -> String {
    ps.iter().map(|p| format!("{},{}", num(q_to_f64(&p[0])), num(q_to_f64(&p[1])))).collect::<Vec<_>>().join(" ")
}

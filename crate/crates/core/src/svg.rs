//! Deterministic SVG 1.1 figures of planar bodies: the boundary, the
//! indicatrix of the gauge, and Funk/Hilbert metric balls.

use std::fmt::Write;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{axpy, scale};
use crate::norm::norm_from_body;
use crate::sampling::circle_grid;

pub const DEFAULT_RESOLUTION: usize = 360;
/// Unbounded outlines are cut at this Euclidean distance from their center.
pub const CLIP_RADIUS: f64 = 10.0;
const CANVAS: f64 = 400.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    pub resolution: usize,
    pub indicatrix: bool,
    pub funk_ball: Option<Ball>,
    pub hilbert_ball: Option<Ball>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            indicatrix: true,
            funk_ball: None,
            hilbert_ball: None,
        }
    }
}

fn planar(body: &ConvexBody) -> Result<()> {
    match body.dimension() {
        2 => Ok(()),
        n => Err(Error::InvalidArgument(format!(
            "rendering needs a planar body, got dimension {n}"
        ))),
    }
}

fn outline<F>(resolution: usize, center: &[f64], mut reach: F) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    circle_grid(resolution)
        .iter()
        .map(|u| Ok(axpy(center, reach(u)?.min(CLIP_RADIUS), u)))
        .collect()
}

/// Boundary points `t*(u)·u` of the body seen from the origin.
pub fn body_outline(body: &ConvexBody, resolution: usize) -> Result<Vec<Vec<f64>>> {
    planar(body)?;
    outline(resolution, &[0.0, 0.0], |u| body.ray_boundary(&[0.0, 0.0], u))
}

/// Level set `F = 1`, traced as `u / F(u)`.
pub fn indicatrix_outline(body: &ConvexBody, resolution: usize) -> Result<Vec<Vec<f64>>> {
    planar(body)?;
    let f = norm_from_body(body.clone());
    circle_grid(resolution)
        .iter()
        .map(|u| {
            let v = f.eval(u);
            let s = if v > 0.0 { (1.0 / v).min(CLIP_RADIUS) } else { CLIP_RADIUS };
            Ok(scale(u, s))
        })
        .collect()
}

/// Funk sphere of radius `r` about `c`: along each ray the point at
/// distance `t*·(1 − e^{−r})`.
pub fn funk_ball(body: &ConvexBody, center: &[f64], radius: f64, resolution: usize) -> Result<Vec<Vec<f64>>> {
    planar(body)?;
    let shrink = -(-radius).exp_m1();
    outline(resolution, center, |u| {
        let t = body.ray_boundary(center, u)?;
        Ok(t * shrink)
    })
}

/// Hilbert sphere of radius `r` about `c`. With forward exit `t`, backward
/// exit `b` and `K = e^{2r}`, the point at distance `s` satisfies
/// `(t/(t−s))·((b+s)/b) = K`, so `s = b·t·(K−1)/(t + K·b)`.
pub fn hilbert_ball(body: &ConvexBody, center: &[f64], radius: f64, resolution: usize) -> Result<Vec<Vec<f64>>> {
    planar(body)?;
    let k_minus_1 = (2.0 * radius).exp_m1();
    outline(resolution, center, |u| {
        let t = body.ray_boundary(center, u)?;
        let b = body.ray_boundary(center, &scale(u, -1.0))?;
        Ok(match (t.is_finite(), b.is_finite()) {
            (true, true) => b * t * k_minus_1 / (t + (k_minus_1 + 1.0) * b),
            (false, true) => b * k_minus_1,
            (true, false) => t * k_minus_1 / (k_minus_1 + 1.0),
            (false, false) => f64::INFINITY,
        })
    })
}

/// Fixed six-decimal formatting with negative zero folded to zero.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

struct Layer {
    id: &'static str,
    stroke: &'static str,
    dashed: bool,
    points: Vec<Vec<f64>>,
}

/// Renders the selected layers. Output bytes depend only on the inputs.
pub fn render_svg(body: &ConvexBody, opts: &RenderOptions) -> Result<String> {
    planar(body)?;
    if opts.resolution < 3 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 3, got {}",
            opts.resolution
        )));
    }
    let mut layers = vec![Layer {
        id: "body",
        stroke: "#000000",
        dashed: false,
        points: body_outline(body, opts.resolution)?,
    }];
    if opts.indicatrix {
        layers.push(Layer {
            id: "indicatrix",
            stroke: "#1f77b4",
            dashed: true,
            points: indicatrix_outline(body, opts.resolution)?,
        });
    }
    if let Some(b) = &opts.funk_ball {
        layers.push(Layer {
            id: "funk-ball",
            stroke: "#d62728",
            dashed: false,
            points: funk_ball(body, &b.center, b.radius, opts.resolution)?,
        });
    }
    if let Some(b) = &opts.hilbert_ball {
        layers.push(Layer {
            id: "hilbert-ball",
            stroke: "#2ca02c",
            dashed: false,
            points: hilbert_ball(body, &b.center, b.radius, opts.resolution)?,
        });
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in layers.iter().flat_map(|l| &l.points) {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let pad = 0.05 * span;
    let side = span + 2.0 * pad;
    let stroke = 0.004 * side;
    // The y axis is flipped so that the figure has the usual orientation.
    let (vx, vy) = (lo[0] - pad, -hi[1] - pad);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(CANVAS),
        num(CANVAS),
        num(vx),
        num(vy),
        num(side),
        num(side)
    )
    .unwrap();
    for l in &layers {
        let pts: Vec<String> = l
            .points
            .iter()
            .map(|p| format!("{},{}", num(p[0]), num(-p[1])))
            .collect();
        let dash = if l.dashed {
            format!(" stroke-dasharray=\"{} {}\"", num(3.0 * stroke), num(2.0 * stroke))
        } else {
            String::new()
        };
        writeln!(
            out,
            "  <polygon id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{} points=\"{}\"/>",
            l.id,
            l.stroke,
            num(stroke),
            dash,
            pts.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

//! SVG drawings of planar configurations.
//!
//! Supported projections: points in `Q^1` or `Q^2` drawn as they are (on a
//! line when the coordinates have constant sum, as for binary forms), and
//! points of `Q^3` with constant coordinate sum drawn on the plane of that
//! sum, as for the `m = 3` Veronese triangle.

use std::fmt::Write;

use num_traits::ToPrimitive;

use tropsec::rational::Rational;
use tropsec::{PartitionResult, PointConfig, RationalPoint, Witness};

use crate::error::{CliError, CliResult};

/// Pixels per lattice step.
pub const UNIT: f64 = 40.0;
const MARGIN: f64 = 40.0;
const POINT_RADIUS: f64 = 8.0;
const SITE_ARM: f64 = 6.0;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#393b79", "#637939",
];

#[derive(Clone, Debug, PartialEq)]
enum Projection {
    Line,
    Plane,
    Triangle { level: f64 },
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn constant_sum(points: &[RationalPoint]) -> Option<Rational> {
    let sums: Vec<Rational> = points.iter().map(|p| p.iter().sum()).collect();
    let first = sums.first()?.clone();
    sums.iter().all(|s| *s == first).then_some(first)
}

fn projection(config: &PointConfig) -> CliResult<Projection> {
    if !config.all_singletons() {
        return Err(CliError::Semantic("render needs a configuration of single points".into()));
    }
    let points = config.all_points();
    match config.ambient_dim() {
        1 => Ok(Projection::Line),
        2 if constant_sum(&points).is_some() => Ok(Projection::Line),
        2 => Ok(Projection::Plane),
        3 => match constant_sum(&points) {
            Some(level) => Ok(Projection::Triangle { level: to_f64(&level) }),
            None => Err(not_planar(3)),
        },
        n => Err(not_planar(n)),
    }
}

fn not_planar(n: usize) -> CliError {
    CliError::Semantic(format!(
        "configuration in dimension {n} has no planar projection; supported: Veronese m = 3 \
         (plane of constant degree), binary forms (line), Segre m = 2 with d <= 2, and any \
         configuration in dimension at most 2"
    ))
}

fn project(p: &RationalPoint, proj: &Projection) -> (f64, f64) {
    let c = p.to_f64();
    match proj {
        Projection::Line => (c[0], 0.0),
        Projection::Plane => (c[0], c[1]),
        Projection::Triangle { level } => {
            let h = (c.iter().sum::<f64>() - level) / 3.0;
            let (b, t) = (c[1] - h, c[2] - h);
            (b + t / 2.0, t * 3f64.sqrt() / 2.0)
        }
    }
}

/// Lattice points filled with their winner's colour, tie points hollow, and
/// a cross at every site that falls inside the drawing.
pub fn render_svg(config: &PointConfig, witness: &Witness, result: &PartitionResult) -> CliResult<String> {
    let proj = projection(config)?;
    let placed: Vec<(f64, f64)> = config.all_points().iter().map(|p| project(p, &proj)).collect();
    let min_x = placed.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = placed.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = placed.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = placed.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let width = (max_x - min_x) * UNIT + 2.0 * MARGIN;
    let height = (max_y - min_y) * UNIT + 2.0 * MARGIN;
    let screen = |(x, y): (f64, f64)| (MARGIN + (x - min_x) * UNIT, MARGIN + (max_y - y) * UNIT);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for ((set, pos), winner) in config.sets().iter().zip(&placed).zip(&result.winners) {
        let (x, y) = screen(*pos);
        let (class, paint) = match winner {
            Some(i) => (format!("player-{i}"), format!(r#"fill="{}" stroke="black""#, PALETTE[i % PALETTE.len()])),
            None => ("tie".to_string(), r#"fill="none" stroke="black" stroke-width="2""#.to_string()),
        };
        let _ = writeln!(
            svg,
            r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{POINT_RADIUS}" {paint}><title>{}</title></circle>"#,
            set.label
        );
    }
    for (i, site) in witness.sites.iter().enumerate() {
        let (x, y) = screen(project(site, &proj));
        if !(0.0..=width).contains(&x) || !(0.0..=height).contains(&y) {
            continue;
        }
        let _ = writeln!(
            svg,
            r#"<path class="site-{i}" d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}" stroke="{}" stroke-width="3"/>"#,
            x - SITE_ARM,
            y - SITE_ARM,
            x + SITE_ARM,
            y + SITE_ARM,
            x - SITE_ARM,
            y + SITE_ARM,
            x + SITE_ARM,
            y - SITE_ARM,
            PALETTE[i % PALETTE.len()]
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

//! Segment addressing: media fragment identifiers (including the `ptr`
//! by-reference key) and SVG region constraints with their geometry.

mod fragment;
mod geometry;
mod svg;

pub use fragment::{
    MediaFragment, ParsedFragment, SpatialDimension, SpatialUnit, TemporalDimension, parse_media_fragment,
    serialize_media_fragment,
};
pub use geometry::{bounding_box, contains_point, transform_shape};
pub use svg::parse_svg_constraint;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SegmentError {
    #[error("malformed `{key}` dimension: {reason}")]
    MalformedDimension { key: String, reason: String },
    #[error("duplicate fragment key `{0}`")]
    DuplicateKey(String),
    #[error("unsupported SVG element <{0}>")]
    UnsupportedElement(String),
    #[error("unsupported path command `{0}` (only absolute M, L and Z)")]
    UnsupportedPathCommand(char),
    #[error("malformed attribute `{attribute}`: {reason}")]
    MalformedAttribute { attribute: String, reason: String },
    #[error("invalid SVG snippet: {0}")]
    InvalidSvg(String),
    #[error("scale factors must be positive and finite, got ({0}, {1})")]
    NonPositiveScale(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned rectangle in target pixel space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn max_x(&self) -> f64 {
        self.x + self.w
    }

    pub fn max_y(&self) -> f64 {
        self.y + self.h
    }

    /// Closed-interval overlap; rectangles sharing only an edge intersect.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x <= other.max_x() && other.x <= self.max_x() && self.y <= other.max_y() && other.y <= self.max_y()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subpath {
    pub points: Vec<Point>,
    pub closed: bool,
}

/// The supported SVG subset. Coordinates are full-resolution target pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SvgShape {
    Rect(Rect),
    Circle { cx: f64, cy: f64, r: f64 },
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
    Polygon { points: Vec<Point> },
    Path { subpaths: Vec<Subpath> },
}

impl SvgShape {
    /// Checks the shape invariants (positive extents, at least three polygon
    /// vertices, finite coordinates).
    pub fn check(&self) -> Result<(), SegmentError> {
        let bad = |reason: &str| Err(SegmentError::InvalidSvg(reason.to_string()));
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        match self {
            SvgShape::Rect(r) => {
                if !finite(&[r.x, r.y, r.w, r.h]) {
                    return bad("non-finite coordinate");
                }
                if r.w <= 0.0 || r.h <= 0.0 {
                    return bad("rect width and height must be positive");
                }
            }
            SvgShape::Circle { cx, cy, r } => {
                if !finite(&[*cx, *cy, *r]) {
                    return bad("non-finite coordinate");
                }
                if *r <= 0.0 {
                    return bad("circle radius must be positive");
                }
            }
            SvgShape::Ellipse { cx, cy, rx, ry } => {
                if !finite(&[*cx, *cy, *rx, *ry]) {
                    return bad("non-finite coordinate");
                }
                if *rx <= 0.0 || *ry <= 0.0 {
                    return bad("ellipse radii must be positive");
                }
            }
            SvgShape::Polygon { points } => {
                if points.len() < 3 {
                    return bad("polygon needs at least 3 points");
                }
                if !points.iter().all(|p| finite(&[p.x, p.y])) {
                    return bad("non-finite coordinate");
                }
            }
            SvgShape::Path { subpaths } => {
                if subpaths.is_empty() || subpaths.iter().any(|s| s.points.is_empty()) {
                    return bad("path needs at least one non-empty subpath");
                }
                if !subpaths.iter().flat_map(|s| &s.points).all(|p| finite(&[p.x, p.y])) {
                    return bad("non-finite coordinate");
                }
            }
        }
        Ok(())
    }

    /// Single-element SVG text that [`parse_svg_constraint`] reads back.
    pub fn to_svg(&self) -> String {
        match self {
            SvgShape::Rect(r) => format!(r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#, r.x, r.y, r.w, r.h),
            SvgShape::Circle { cx, cy, r } => format!(r#"<circle cx="{cx}" cy="{cy}" r="{r}"/>"#),
            SvgShape::Ellipse { cx, cy, rx, ry } => {
                format!(r#"<ellipse cx="{cx}" cy="{cy}" rx="{rx}" ry="{ry}"/>"#)
            }
            SvgShape::Polygon { points } => {
                let pts: Vec<String> = points.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
                format!(r#"<polygon points="{}"/>"#, pts.join(" "))
            }
            SvgShape::Path { subpaths } => {
                let mut d = Vec::new();
                for sub in subpaths {
                    for (i, p) in sub.points.iter().enumerate() {
                        d.push(format!("{} {} {}", if i == 0 { 'M' } else { 'L' }, p.x, p.y));
                    }
                    if sub.closed {
                        d.push("Z".to_string());
                    }
                }
                format!(r#"<path d="{}"/>"#, d.join(" "))
            }
        }
    }
}

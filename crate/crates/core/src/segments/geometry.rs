use super::{Point, Rect, SegmentError, Subpath, SvgShape};

const EDGE_EPSILON: f64 = 1e-9;

/// Smallest axis-aligned rectangle containing the shape.
pub fn bounding_box(shape: &SvgShape) -> Rect {
    match shape {
        SvgShape::Rect(r) => *r,
        SvgShape::Circle { cx, cy, r } => Rect::new(cx - r, cy - r, 2.0 * r, 2.0 * r),
        SvgShape::Ellipse { cx, cy, rx, ry } => Rect::new(cx - rx, cy - ry, 2.0 * rx, 2.0 * ry),
        SvgShape::Polygon { points } => points_bbox(points.iter()),
        SvgShape::Path { subpaths } => points_bbox(subpaths.iter().flat_map(|s| s.points.iter())),
    }
}

fn points_bbox<'a>(points: impl Iterator<Item = &'a Point>) -> Rect {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    if min_x > max_x {
        return Rect::new(0.0, 0.0, 0.0, 0.0);
    }
    Rect::new(min_x, min_y, max_x - min_x, max_y - min_y)
}

/// Hit test. Polygons and paths use the even-odd rule (each subpath closed
/// implicitly); points on the boundary are inside.
pub fn contains_point(shape: &SvgShape, p: Point) -> bool {
    match shape {
        SvgShape::Rect(r) => within(p.x, r.x, r.max_x()) && within(p.y, r.y, r.max_y()),
        SvgShape::Circle { cx, cy, r } => {
            let (dx, dy) = (p.x - cx, p.y - cy);
            dx * dx + dy * dy <= r * r
        }
        SvgShape::Ellipse { cx, cy, rx, ry } => {
            let (dx, dy) = ((p.x - cx) / rx, (p.y - cy) / ry);
            dx * dx + dy * dy <= 1.0
        }
        SvgShape::Polygon { points } => ring_contains(std::slice::from_ref(&points.as_slice()), p),
        SvgShape::Path { subpaths } => {
            let rings: Vec<&[Point]> = subpaths.iter().map(|s: &Subpath| s.points.as_slice()).collect();
            ring_contains(&rings, p)
        }
    }
}

/// Closed-interval test that absorbs the rounding in `x + w`.
fn within(v: f64, lo: f64, hi: f64) -> bool {
    let slack = EDGE_EPSILON + 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
    v >= lo - slack && v <= hi + slack
}

fn edges<'a>(ring: &'a [Point]) -> impl Iterator<Item = (Point, Point)> + 'a {
    (0..ring.len()).map(move |i| (ring[i], ring[(i + 1) % ring.len()]))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let (apx, apy) = (p.x - a.x, p.y - a.y);
    let len = abx.hypot(aby);
    if len == 0.0 {
        return apx.hypot(apy) <= EDGE_EPSILON;
    }
    let cross = abx * apy - aby * apx;
    if cross.abs() > EDGE_EPSILON * len {
        return false;
    }
    let dot = apx * abx + apy * aby;
    dot >= -EDGE_EPSILON * len && dot <= len * len + EDGE_EPSILON * len
}

fn ring_contains(rings: &[&[Point]], p: Point) -> bool {
    if rings.iter().any(|ring| edges(ring).any(|(a, b)| on_segment(a, b, p))) {
        return true;
    }
    // horizontal ray towards +x, half-open vertex rule
    let mut inside = false;
    for ring in rings {
        for (a, b) in edges(ring) {
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Scale about the origin, then translate. A circle under anisotropic scale
/// becomes an ellipse.
pub fn transform_shape(shape: &SvgShape, scale: (f64, f64), translate: (f64, f64)) -> Result<SvgShape, SegmentError> {
    let (sx, sy) = scale;
    let (dx, dy) = translate;
    if !(sx.is_finite() && sy.is_finite() && sx > 0.0 && sy > 0.0) {
        return Err(SegmentError::NonPositiveScale(sx, sy));
    }
    let map = |p: &Point| Point::new(p.x * sx + dx, p.y * sy + dy);
    Ok(match shape {
        SvgShape::Rect(r) => SvgShape::Rect(Rect::new(r.x * sx + dx, r.y * sy + dy, r.w * sx, r.h * sy)),
        SvgShape::Circle { cx, cy, r } if sx == sy => SvgShape::Circle {
            cx: cx * sx + dx,
            cy: cy * sy + dy,
            r: r * sx,
        },
        SvgShape::Circle { cx, cy, r } => SvgShape::Ellipse {
            cx: cx * sx + dx,
            cy: cy * sy + dy,
            rx: r * sx,
            ry: r * sy,
        },
        SvgShape::Ellipse { cx, cy, rx, ry } => SvgShape::Ellipse {
            cx: cx * sx + dx,
            cy: cy * sy + dy,
            rx: rx * sx,
            ry: ry * sy,
        },
        SvgShape::Polygon { points } => SvgShape::Polygon {
            points: points.iter().map(map).collect(),
        },
        SvgShape::Path { subpaths } => SvgShape::Path {
            subpaths: subpaths
                .iter()
                .map(|s| Subpath {
                    points: s.points.iter().map(map).collect(),
                    closed: s.closed,
                })
                .collect(),
        },
    })
}

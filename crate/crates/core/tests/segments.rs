use oac_core::rdf::Iri;
use oac_core::segments::{
    MediaFragment, Point, Rect, SpatialDimension, SpatialUnit, Subpath, SvgShape, TemporalDimension, bounding_box,
    contains_point, parse_media_fragment, parse_svg_constraint, serialize_media_fragment, transform_shape,
};
use oac_core::testing::{random_shape, random_star_polygon};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TOL: f64 = 1e-9;

fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.x + t * vx, a.y + t * vy);
    ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt()
}

fn ring_edges(ring: &[Point]) -> Vec<(Point, Point)> {
    (0..ring.len()).map(|i| (ring[i], ring[(i + 1) % ring.len()])).collect()
}

/// Even-odd parity of an upward vertical ray.
fn vertical_ray_oracle(rings: &[Vec<Point>], p: Point) -> bool {
    let mut crossings = 0usize;
    for ring in rings {
        for (a, b) in ring_edges(ring) {
            let straddles = (a.x <= p.x && b.x > p.x) || (b.x <= p.x && a.x > p.x);
            if straddles {
                let y = a.y + (p.x - a.x) / (b.x - a.x) * (b.y - a.y);
                if y > p.y {
                    crossings += 1;
                }
            }
        }
    }
    crossings % 2 == 1
}

/// Winding number; for simple polygons nonzero ⇔ inside.
fn winding_number(ring: &[Point], p: Point) -> i32 {
    let mut wn = 0;
    for (a, b) in ring_edges(ring) {
        let side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn near_boundary(rings: &[Vec<Point>], p: Point) -> bool {
    rings
        .iter()
        .any(|r| ring_edges(r).into_iter().any(|(a, b)| segment_distance(a, b, p) < 1e-6))
}

#[test]
fn contains_point_agrees_with_vertical_ray_oracle() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut compared = 0;
    let mut mismatches = Vec::new();
    while compared < 20_000 {
        let n = rng.random_range(3..12);
        let ring: Vec<Point> = if rng.random_bool(0.5) {
            random_star_polygon(&mut rng, n, Point::new(50.0, 50.0), 40.0)
        } else {
            // arbitrary, usually self-intersecting
            (0..n)
                .map(|_| Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
                .collect()
        };
        let rings = vec![ring.clone()];
        let shape = SvgShape::Polygon { points: ring };
        for _ in 0..10 {
            let p = Point::new(rng.random_range(-5.0..105.0), rng.random_range(-5.0..105.0));
            if near_boundary(&rings, p) {
                continue;
            }
            compared += 1;
            if contains_point(&shape, p) != vertical_ray_oracle(&rings, p) {
                mismatches.push((shape.clone(), p));
            }
        }
    }
    assert!(
        mismatches.is_empty(),
        "{} mismatches, first {:?}",
        mismatches.len(),
        mismatches[0]
    );
}

#[test]
fn simple_polygons_agree_with_winding_number() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..2_000 {
        let ring = random_star_polygon(&mut rng, 7, Point::new(0.0, 0.0), 10.0);
        let p = Point::new(rng.random_range(-12.0..12.0), rng.random_range(-12.0..12.0));
        if near_boundary(std::slice::from_ref(&ring), p) {
            continue;
        }
        let shape = SvgShape::Polygon { points: ring.clone() };
        assert_eq!(
            contains_point(&shape, p),
            winding_number(&ring, p) != 0,
            "{ring:?} {p:?}"
        );
    }
}

#[test]
fn multi_subpath_paths_use_even_odd() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..2_000 {
        let rings: Vec<Vec<Point>> = (0..rng.random_range(1..4))
            .map(|_| {
                let c = Point::new(rng.random_range(20.0..80.0), rng.random_range(20.0..80.0));
                random_star_polygon(&mut rng, 5, c, 25.0)
            })
            .collect();
        let shape = SvgShape::Path {
            subpaths: rings
                .iter()
                .map(|r| Subpath {
                    points: r.clone(),
                    closed: true,
                })
                .collect(),
        };
        let p = Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0));
        if near_boundary(&rings, p) {
            continue;
        }
        assert_eq!(contains_point(&shape, p), vertical_ray_oracle(&rings, p));
    }
}

#[test]
fn analytic_shapes_match_closed_forms() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..5_000 {
        let (cx, cy) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let (rx, ry) = (rng.random_range(1.0..20.0), rng.random_range(1.0..20.0));
        let p = Point::new(rng.random_range(-80.0..80.0), rng.random_range(-80.0..80.0));

        // polar form of the ellipse boundary along the ray towards p
        let theta = (p.y - cy).atan2(p.x - cx);
        let boundary = (rx * ry) / ((ry * theta.cos()).powi(2) + (rx * theta.sin()).powi(2)).sqrt();
        let dist = (p.x - cx).hypot(p.y - cy);
        if (dist - boundary).abs() > 1e-6 {
            let shape = SvgShape::Ellipse { cx, cy, rx, ry };
            assert_eq!(contains_point(&shape, p), dist < boundary);
        }
        if (dist - rx).abs() > 1e-6 {
            let shape = SvgShape::Circle { cx, cy, r: rx };
            assert_eq!(contains_point(&shape, p), dist < rx);
        }
        let rect = Rect::new(cx, cy, rx, ry);
        let clamped = Point::new(p.x.clamp(rect.x, rect.max_x()), p.y.clamp(rect.y, rect.max_y()));
        let outside_by = (p.x - clamped.x).hypot(p.y - clamped.y);
        assert_eq!(contains_point(&SvgShape::Rect(rect), p), outside_by == 0.0);
    }
}

#[test]
fn boundary_points_are_inside() {
    let square = SvgShape::Polygon {
        points: vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ],
    };
    for p in [
        (0.0, 5.0),
        (10.0, 5.0),
        (5.0, 0.0),
        (5.0, 10.0),
        (0.0, 0.0),
        (10.0, 10.0),
    ] {
        assert!(contains_point(&square, p.into()), "{p:?}");
        assert!(contains_point(
            &SvgShape::Rect(Rect::new(0.0, 0.0, 10.0, 10.0)),
            p.into()
        ));
    }
    assert!(contains_point(
        &SvgShape::Circle {
            cx: 0.0,
            cy: 0.0,
            r: 1.0
        },
        Point::new(1.0, 0.0)
    ));
}

fn all_points(shape: &SvgShape) -> Vec<Point> {
    match shape {
        SvgShape::Polygon { points } => points.clone(),
        SvgShape::Path { subpaths } => subpaths.iter().flat_map(|s| s.points.clone()).collect(),
        _ => unreachable!(),
    }
}

#[test]
fn bounding_box_is_vertex_extent() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..2_000 {
        let shape = random_shape(&mut rng, 500.0);
        let bbox = bounding_box(&shape);
        let expected = match &shape {
            SvgShape::Rect(r) => *r,
            SvgShape::Circle { cx, cy, r } => Rect::new(cx - r, cy - r, r + r, r + r),
            SvgShape::Ellipse { cx, cy, rx, ry } => Rect::new(cx - rx, cy - ry, rx + rx, ry + ry),
            _ => {
                let pts = all_points(&shape);
                let min_x = pts.iter().map(|p| p.x).fold(f64::MAX, f64::min);
                let max_x = pts.iter().map(|p| p.x).fold(f64::MIN, f64::max);
                let min_y = pts.iter().map(|p| p.y).fold(f64::MAX, f64::min);
                let max_y = pts.iter().map(|p| p.y).fold(f64::MIN, f64::max);
                Rect::new(min_x, min_y, max_x - min_x, max_y - min_y)
            }
        };
        assert_rect_close(bbox, expected);
    }
    assert_eq!(
        bounding_box(&SvgShape::Circle {
            cx: 5.0,
            cy: 5.0,
            r: 2.0
        }),
        Rect::new(3.0, 3.0, 4.0, 4.0)
    );
}

fn assert_rect_close(a: Rect, b: Rect) {
    let close =
        (a.x - b.x).abs() <= TOL && (a.y - b.y).abs() <= TOL && (a.w - b.w).abs() <= TOL && (a.h - b.h).abs() <= TOL;
    assert!(close, "{a:?} != {b:?}");
}

fn as_ellipse(s: &SvgShape) -> SvgShape {
    match s {
        SvgShape::Circle { cx, cy, r } => SvgShape::Ellipse {
            cx: *cx,
            cy: *cy,
            rx: *r,
            ry: *r,
        },
        other => other.clone(),
    }
}

fn shapes_close(a: &SvgShape, b: &SvgShape) -> bool {
    let near = |x: f64, y: f64| (x - y).abs() <= TOL;
    let pts_near =
        |p: &[Point], q: &[Point]| p.len() == q.len() && p.iter().zip(q).all(|(p, q)| near(p.x, q.x) && near(p.y, q.y));
    match (as_ellipse(a), as_ellipse(b)) {
        (SvgShape::Rect(r), SvgShape::Rect(s)) => near(r.x, s.x) && near(r.y, s.y) && near(r.w, s.w) && near(r.h, s.h),
        (
            SvgShape::Ellipse { cx, cy, rx, ry },
            SvgShape::Ellipse {
                cx: cx2,
                cy: cy2,
                rx: rx2,
                ry: ry2,
            },
        ) => near(cx, cx2) && near(cy, cy2) && near(rx, rx2) && near(ry, ry2),
        (SvgShape::Polygon { points: p }, SvgShape::Polygon { points: q }) => pts_near(&p, &q),
        (SvgShape::Path { subpaths: p }, SvgShape::Path { subpaths: q }) => {
            p.len() == q.len()
                && p.iter()
                    .zip(&q)
                    .all(|(s, t)| s.closed == t.closed && pts_near(&s.points, &t.points))
        }
        _ => false,
    }
}

fn random_affine(rng: &mut StdRng) -> ((f64, f64), (f64, f64)) {
    let s = if rng.random_bool(0.3) {
        let k = rng.random_range(0.1..10.0);
        (k, k)
    } else {
        (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0))
    };
    (
        s,
        (rng.random_range(-1000.0..1000.0), rng.random_range(-1000.0..1000.0)),
    )
}

#[test]
fn transform_identities() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..3_000 {
        let shape = random_shape(&mut rng, 1000.0);
        assert_eq!(transform_shape(&shape, (1.0, 1.0), (0.0, 0.0)).unwrap(), shape);

        let ((s1x, s1y), (t1x, t1y)) = random_affine(&mut rng);
        let ((s2x, s2y), (t2x, t2y)) = random_affine(&mut rng);
        let twice = transform_shape(
            &transform_shape(&shape, (s1x, s1y), (t1x, t1y)).unwrap(),
            (s2x, s2y),
            (t2x, t2y),
        )
        .unwrap();
        let once = transform_shape(&shape, (s1x * s2x, s1y * s2y), (s2x * t1x + t2x, s2y * t1y + t2y)).unwrap();
        assert!(shapes_close(&twice, &once), "{twice:?} vs {once:?}");

        let b = bounding_box(&shape);
        let moved = transform_shape(&SvgShape::Rect(b), (s1x, s1y), (t1x, t1y)).unwrap();
        let SvgShape::Rect(moved) = moved else { unreachable!() };
        assert_rect_close(
            bounding_box(&transform_shape(&shape, (s1x, s1y), (t1x, t1y)).unwrap()),
            moved,
        );
    }
}

#[test]
fn transform_examples() {
    let r = SvgShape::Rect(Rect::new(0.0, 0.0, 10.0, 10.0));
    assert_eq!(
        transform_shape(&r, (2.0, 2.0), (5.0, 5.0)).unwrap(),
        SvgShape::Rect(Rect::new(5.0, 5.0, 20.0, 20.0))
    );
    let c = SvgShape::Circle {
        cx: 0.0,
        cy: 0.0,
        r: 1.0,
    };
    assert_eq!(
        transform_shape(&c, (2.0, 1.0), (0.0, 0.0)).unwrap(),
        SvgShape::Ellipse {
            cx: 0.0,
            cy: 0.0,
            rx: 2.0,
            ry: 1.0
        }
    );
    assert!(transform_shape(&c, (0.0, 1.0), (0.0, 0.0)).is_err());
    assert!(transform_shape(&c, (1.0, -1.0), (0.0, 0.0)).is_err());
}

fn finite() -> impl Strategy<Value = f64> {
    -1e6f64..1e6
}

fn positive() -> impl Strategy<Value = f64> {
    1e-3f64..1e4
}

fn point() -> impl Strategy<Value = Point> {
    (finite(), finite()).prop_map(|(x, y)| Point::new(x, y))
}

fn shape() -> impl Strategy<Value = SvgShape> {
    prop_oneof![
        (finite(), finite(), positive(), positive()).prop_map(|(x, y, w, h)| SvgShape::Rect(Rect::new(x, y, w, h))),
        (finite(), finite(), positive()).prop_map(|(cx, cy, r)| SvgShape::Circle { cx, cy, r }),
        (finite(), finite(), positive(), positive()).prop_map(|(cx, cy, rx, ry)| SvgShape::Ellipse { cx, cy, rx, ry }),
        prop::collection::vec(point(), 3..10).prop_map(|points| SvgShape::Polygon { points }),
        prop::collection::vec(
            (prop::collection::vec(point(), 2..6), any::<bool>())
                .prop_map(|(points, closed)| Subpath { points, closed }),
            1..4
        )
        .prop_map(|subpaths| SvgShape::Path { subpaths }),
    ]
}

fn fragment() -> impl Strategy<Value = MediaFragment> {
    let temporal =
        prop::option::of(
            (0.0f64..1e5, prop::option::of(1e-3f64..1e5)).prop_map(|(start, len)| TemporalDimension {
                start,
                end: len.map(|l| start + l).filter(|e| *e > start),
            }),
        );
    let spatial = prop::option::of(prop_oneof![
        (0.0f64..1e5, 0.0f64..1e5, 0.0f64..1e5, 0.0f64..1e5).prop_map(|(x, y, w, h)| SpatialDimension {
            unit: SpatialUnit::Pixel,
            x,
            y,
            w,
            h
        }),
        (0.0f64..=100.0, 0.0f64..=100.0, 0.0f64..=100.0, 0.0f64..=100.0).prop_map(|(x, y, w, h)| SpatialDimension {
            unit: SpatialUnit::Percent,
            x,
            y,
            w,
            h
        }),
    ]);
    let ptr = prop::option::of(
        "[a-z]{1,8}(/[a-zA-Z0-9é&=#%]{0,6}){0,3}"
            .prop_map(|path| Iri::parse(format!("http://example.org/{path}")).unwrap()),
    );
    (
        temporal,
        spatial,
        prop::option::of(".{0,8}"),
        prop::option::of(".{0,8}"),
        ptr,
    )
        .prop_map(|(temporal, spatial, track, id, ptr)| MediaFragment {
            temporal,
            spatial,
            track,
            id,
            ptr,
        })
}

proptest! {
    #[test]
    fn svg_text_round_trips(s in shape()) {
        prop_assert_eq!(parse_svg_constraint(&s.to_svg()).unwrap(), s);
    }

    #[test]
    fn media_fragments_round_trip(f in fragment()) {
        let text = serialize_media_fragment(&f);
        let parsed = parse_media_fragment(&text).unwrap();
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(&parsed.fragment, &f);
        prop_assert_eq!(serialize_media_fragment(&parsed.fragment), text);
    }

    #[test]
    fn bbox_contains_every_vertex(s in shape()) {
        let b = bounding_box(&s);
        if let SvgShape::Polygon { points } = &s {
            for p in points {
                prop_assert!(contains_point(&SvgShape::Rect(b), *p));
            }
        }
    }
}

#[test]
fn fragment_examples() {
    assert_eq!(serialize_media_fragment(&MediaFragment::default()), "");
    let f = parse_media_fragment("xywh=10,20,30,40").unwrap().fragment;
    assert_eq!(serialize_media_fragment(&f), "xywh=10,20,30,40");
    let f = parse_media_fragment("ptr=http%3A%2F%2Fexample.org%2Fregion.svg&t=10,20")
        .unwrap()
        .fragment;
    assert_eq!(f.ptr.as_ref().unwrap().as_str(), "http://example.org/region.svg");
    assert_eq!(
        serialize_media_fragment(&f),
        "t=10,20&ptr=http%3A%2F%2Fexample.org%2Fregion.svg"
    );
}

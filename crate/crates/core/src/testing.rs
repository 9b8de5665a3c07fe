//! Seeded random fixtures for tests and benchmarks.

use std::collections::BTreeMap;

use rand::Rng;
use rand::seq::IndexedRandom;

use crate::model::{
    Annotation, Body, GenericConstraint, Label, SegmentConstraint, SemanticTag, SvgConstraint, Target, TimeConstraint,
};
use crate::rdf::{Iri, Literal, Term};
use crate::segments::{Point, Rect, Subpath, SvgShape};
use crate::time::Timestamp;

const WORDS: &[&str] = &[
    "cnn",
    "front",
    "page",
    "cartoon",
    "map",
    "harbour",
    "Manuscript",
    "gilded",
    "initial",
    "margin",
    "Zoom",
    "région",
    "naïve",
    "日本",
    "detail",
    "caption",
    "river",
    "Bridge",
];

const LANGS: &[&str] = &["en", "de", "fr", "en-gb"];

fn iri(s: String) -> Iri {
    Iri::parse(s).expect("generated IRIs are absolute")
}

pub fn random_timestamp(rng: &mut impl Rng, from: i64, to: i64) -> Timestamp {
    Timestamp::from_unix(rng.random_range(from..=to)).expect("range within chrono bounds")
}

fn coord(rng: &mut impl Rng, max: f64) -> f64 {
    // Quarter-pixel grid keeps SVG text exact.
    (rng.random_range(0.0..max) * 4.0).round() / 4.0
}

fn extent(rng: &mut impl Rng, max: f64) -> f64 {
    (rng.random_range(1.0..max) * 4.0).round() / 4.0
}

/// Any shape of the supported subset inside `[0, size)²`.
pub fn random_shape(rng: &mut impl Rng, size: f64) -> SvgShape {
    let span = (size / 4.0).max(2.0);
    match rng.random_range(0..5) {
        0 => SvgShape::Rect(Rect::new(
            coord(rng, size),
            coord(rng, size),
            extent(rng, span),
            extent(rng, span),
        )),
        1 => SvgShape::Circle {
            cx: coord(rng, size),
            cy: coord(rng, size),
            r: extent(rng, span),
        },
        2 => SvgShape::Ellipse {
            cx: coord(rng, size),
            cy: coord(rng, size),
            rx: extent(rng, span),
            ry: extent(rng, span),
        },
        3 => SvgShape::Polygon {
            points: random_points(rng, size, 3..9),
        },
        _ => SvgShape::Path {
            subpaths: (0..rng.random_range(1..3))
                .map(|_| Subpath {
                    points: random_points(rng, size, 2..7),
                    closed: rng.random_bool(0.7),
                })
                .collect(),
        },
    }
}

fn random_points(rng: &mut impl Rng, size: f64, n: std::ops::Range<usize>) -> Vec<Point> {
    (0..rng.random_range(n))
        .map(|_| Point::new(coord(rng, size), coord(rng, size)))
        .collect()
}

/// A simple polygon: vertices at sorted angles around a centre with random
/// radii.
pub fn random_star_polygon(rng: &mut impl Rng, n: usize, centre: Point, radius: f64) -> Vec<Point> {
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles
        .into_iter()
        .map(|a| {
            let r = rng.random_range(0.15..1.0) * radius;
            Point::new(centre.x + r * a.cos(), centre.y + r * a.sin())
        })
        .collect()
}

fn random_text(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..7);
    let mut words: Vec<String> = (0..n).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    if rng.random_bool(0.1) {
        words.push("line\nbreak \"quoted\" \\ tab\t".into());
    }
    words.join(" ")
}

/// Parameters for [`AnnotationGen::generate`].
#[derive(Debug, Clone)]
pub struct AnnotationGen {
    pub base: String,
    /// Resources targets point at.
    pub resources: Vec<Iri>,
    pub image_size: f64,
    pub created_range: (i64, i64),
    /// Chance that a target points at an earlier generated annotation.
    pub reply_rate: f64,
}

impl Default for AnnotationGen {
    fn default() -> Self {
        AnnotationGen {
            base: "http://example.org".into(),
            resources: (0..8)
                .map(|i| iri(format!("http://images.example.org/img{i}.jp2")))
                .collect(),
            image_size: 1000.0,
            created_range: (1_262_304_000, 1_293_839_999),
            reply_rate: 0.1,
        }
    }
}

impl AnnotationGen {
    pub fn annotation_uri(&self, i: usize) -> Iri {
        iri(format!("{}/annotations/{i}", self.base))
    }

    fn node(&self, rng: &mut impl Rng, i: usize, role: &str, k: usize) -> Iri {
        if rng.random_bool(0.5) {
            iri(format!(
                "urn:uuid:{i:08x}-{k:04x}-4000-8000-{:012x}",
                role.len() as u64 * 7919 + k as u64
            ))
        } else {
            iri(format!("{}/{role}/{i}-{k}", self.base))
        }
    }

    fn time_constraint(&self, rng: &mut impl Rng, i: usize, k: usize) -> TimeConstraint {
        TimeConstraint {
            id: iri(format!("urn:uuid:{i:08x}-{k:04x}-4000-9000-000000000000")),
            when: random_timestamp(rng, self.created_range.0, self.created_range.1),
        }
    }

    /// Annotation number `i`, valid and covering every body, target,
    /// constraint and temporal variant over many draws.
    pub fn generate<R: Rng>(&self, rng: &mut R, i: usize) -> Annotation {
        let mut next_tc = 0;
        let varied = rng.random_range(0..3) == 2;
        let mut maybe_tc = |rng: &mut R| {
            if varied && rng.random_bool(0.6) {
                next_tc += 1;
                Some(self.time_constraint(rng, i, next_tc))
            } else {
                None
            }
        };

        let mut body = if rng.random_bool(0.5) {
            Body::inline(self.node(rng, i, "bodies", 0), random_text(rng))
        } else {
            Body::external(iri(format!(
                "http://media.example.org/{i}/body{}",
                rng.random_range(0..3)
            )))
        };
        body.time_constraint = maybe_tc(rng);

        let mut targets = Vec::new();
        for k in 0..rng.random_range(1..4) {
            let reply = i > 0 && rng.random_bool(self.reply_rate);
            let resource = if reply {
                self.annotation_uri(rng.random_range(0..i))
            } else {
                self.resources.choose(rng).unwrap().clone()
            };
            let mut target = if reply || rng.random_bool(0.4) {
                // Direct targets are distinct by construction of their id.
                if targets.iter().any(|t: &Target| t.id() == &resource) {
                    continue;
                }
                Target::direct(resource)
            } else {
                let constraint = if rng.random_bool(0.8) {
                    SegmentConstraint::Svg(SvgConstraint {
                        id: self.node(rng, i, "constraints", k),
                        source: random_shape(rng, self.image_size).to_svg(),
                    })
                } else {
                    let mut properties = BTreeMap::new();
                    properties.insert(
                        iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#value".into()),
                        Term::Literal(Literal::plain(format!("xywh={},{},20,20", k * 10, i % 100))),
                    );
                    SegmentConstraint::Generic(GenericConstraint {
                        id: self.node(rng, i, "constraints", k),
                        class: iri("http://example.org/ns#FragmentConstraint".into()),
                        properties,
                    })
                };
                Target::constrained(self.node(rng, i, "targets", k), resource, constraint)
            };
            target.time_constraint = maybe_tc(rng);
            targets.push(target);
        }
        if varied && next_tc == 0 {
            let tc = self.time_constraint(rng, i, 99);
            body.time_constraint = Some(tc);
        }

        let mut a = Annotation::new(self.annotation_uri(i), body, targets);
        if rng.random_bool(0.9) {
            a.created = Some(random_timestamp(rng, self.created_range.0, self.created_range.1));
        }
        if rng.random_bool(0.5) {
            a.creator = Some(format!("annotator {}", rng.random_range(0..20)));
        }
        if !varied && rng.random_bool(0.5) {
            a.when = Some(random_timestamp(rng, self.created_range.0, self.created_range.1));
        }
        for t in 0..rng.random_range(0..3) {
            let labels = (0..rng.random_range(0..3))
                .map(|_| Label {
                    text: WORDS.choose(rng).unwrap().to_string(),
                    lang: rng.random_bool(0.5).then(|| LANGS.choose(rng).unwrap().to_string()),
                })
                .collect();
            a.semantic_tags.push(SemanticTag {
                resource: iri(format!("http://dbpedia.org/resource/Tag_{i}_{t}")),
                labels,
            });
        }
        if rng.random_bool(0.2) {
            a.equivalences.insert(
                iri(format!("urn:uuid:{i:08x}-0000-4000-a000-000000000000")),
                a.uri.clone(),
            );
        }
        if rng.random_bool(0.2) {
            a.extra.insert((
                iri("http://purl.org/dc/terms/rights".into()),
                Term::Iri(iri("http://creativecommons.org/licenses/by/3.0/".into())),
            ));
        }
        a.normalize();
        a
    }
}

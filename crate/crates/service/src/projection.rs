//! Lossy JSON view of an annotation for browser clients. Not a
//! serialization format: it cannot be posted back.

use serde_json::{Map, Value, json};

use oac_core::model::{Annotation, BodyKind, SegmentConstraint, TargetKind, TimeConstraint, classify_temporal};
use oac_core::rdf::Iri;
use oac_core::segments::{Rect, SpatialUnit, SvgShape, bounding_box, parse_svg_constraint, serialize_media_fragment};

use crate::pointer::{Regions, fragment_of};

fn time(tc: &Option<TimeConstraint>, out: &mut Map<String, Value>) {
    if let Some(tc) = tc {
        out.insert("when".into(), json!(tc.when));
    }
}

/// Media fragment of a target and the region it denotes: `xywh` in pixels,
/// or the dereferenced `ptr` constraint.
fn fragment(uri: &Iri, regions: &Regions, out: &mut Map<String, Value>) {
    let Some(parsed) = fragment_of(uri) else { return };
    let f = &parsed.fragment;
    out.insert(
        "fragment".into(),
        json!({"canonical": serialize_media_fragment(f), "value": f}),
    );
    let region = match (&f.ptr, &f.spatial) {
        (Some(ptr), _) => match regions.get(ptr) {
            Some(Ok(shape)) => json!({"source": ptr, "shape": shape, "bbox": bounding_box(shape)}),
            Some(Err(e)) => json!({"source": ptr, "error": e}),
            None => return,
        },
        (None, Some(s)) if s.unit == SpatialUnit::Pixel => {
            let shape = SvgShape::Rect(Rect::new(s.x, s.y, s.w, s.h));
            json!({"shape": shape, "bbox": bounding_box(&shape)})
        }
        _ => return,
    };
    out.insert("region".into(), region);
}

pub fn project(a: &Annotation, replies: &[Iri], regions: &Regions) -> Value {
    let mut body = Map::new();
    body.insert("id".into(), json!(a.body.id()));
    match &a.body.kind {
        BodyKind::External { .. } => {
            body.insert("type".into(), json!("external"));
        }
        BodyKind::Inline { chars, encoding, .. } => {
            body.insert("type".into(), json!("inline"));
            body.insert("chars".into(), json!(chars));
            body.insert("encoding".into(), json!(encoding));
        }
    }
    time(&a.body.time_constraint, &mut body);

    let targets: Vec<Value> = a
        .targets
        .iter()
        .map(|t| {
            let mut out = Map::new();
            out.insert("id".into(), json!(t.id()));
            out.insert("resource".into(), json!(t.resource()));
            match &t.kind {
                TargetKind::Direct { .. } => {
                    out.insert("type".into(), json!("direct"));
                }
                TargetKind::Constrained { constraint, .. } => {
                    out.insert("type".into(), json!("constrained"));
                    let c = match constraint {
                        SegmentConstraint::Svg(svg) => {
                            let mut c = json!({"id": svg.id, "kind": "svg", "source": svg.source});
                            if let Ok(shape) = parse_svg_constraint(&svg.source) {
                                c["shape"] = json!(shape);
                                c["bbox"] = json!(bounding_box(&shape));
                            }
                            c
                        }
                        SegmentConstraint::Generic(g) => json!({"id": g.id, "kind": "other", "class": g.class}),
                    };
                    out.insert("constraint".into(), c);
                }
            }
            fragment(t.resource(), regions, &mut out);
            time(&t.time_constraint, &mut out);
            Value::Object(out)
        })
        .collect();

    let tags: Vec<Value> = a
        .semantic_tags
        .iter()
        .map(|t| json!({"resource": t.resource, "labels": t.labels}))
        .collect();

    let mut out = Map::new();
    out.insert("uri".into(), json!(a.uri));
    if let Ok(class) = classify_temporal(a) {
        out.insert("temporal".into(), json!(class.name()));
    }
    out.insert("body".into(), Value::Object(body));
    out.insert("targets".into(), Value::Array(targets));
    if let Some(c) = &a.creator {
        out.insert("creator".into(), json!(c));
    }
    if let Some(c) = a.created {
        out.insert("created".into(), json!(c));
    }
    if let Some(w) = a.when {
        out.insert("when".into(), json!(w));
    }
    out.insert("tags".into(), Value::Array(tags));
    out.insert("replies".into(), json!(replies));
    Value::Object(out)
}

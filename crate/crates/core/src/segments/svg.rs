use super::{Point, Rect, SegmentError, Subpath, SvgShape};

fn attr_error(attribute: &str, reason: impl Into<String>) -> SegmentError {
    SegmentError::MalformedAttribute {
        attribute: attribute.to_string(),
        reason: reason.into(),
    }
}

fn parse_number(attribute: &str, text: &str) -> Result<f64, SegmentError> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| attr_error(attribute, format!("{text:?} is not a number")))?;
    if !value.is_finite() {
        return Err(attr_error(attribute, "value must be finite"));
    }
    Ok(value)
}

fn required(node: &roxmltree::Node, name: &str) -> Result<f64, SegmentError> {
    match node.attribute(name) {
        Some(v) => parse_number(name, v),
        None => Err(attr_error(name, "missing")),
    }
}

fn optional(node: &roxmltree::Node, name: &str) -> Result<f64, SegmentError> {
    node.attribute(name).map_or(Ok(0.0), |v| parse_number(name, v))
}

fn positive(name: &str, value: f64) -> Result<f64, SegmentError> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(attr_error(name, "must be positive"))
    }
}

/// Parse a single SVG shape element: `rect`, `circle`, `ellipse`, `polygon`,
/// or `path` with absolute `M`/`L`/`Z` data. A wrapping `<svg>` element with
/// exactly one shape child is accepted too.
pub fn parse_svg_constraint(source: &str) -> Result<SvgShape, SegmentError> {
    let doc = roxmltree::Document::parse(source).map_err(|e| SegmentError::InvalidSvg(e.to_string()))?;
    let mut node = doc.root_element();
    if node.tag_name().name() == "svg" {
        let mut children = node.children().filter(|c| c.is_element());
        match (children.next(), children.next()) {
            (Some(only), None) => node = only,
            _ => return Err(SegmentError::InvalidSvg("expected exactly one shape element".into())),
        }
    }
    if node.attribute("transform").is_some() {
        return Err(attr_error("transform", "transforms are not supported"));
    }
    let shape = match node.tag_name().name() {
        "rect" => SvgShape::Rect(Rect {
            x: optional(&node, "x")?,
            y: optional(&node, "y")?,
            w: positive("width", required(&node, "width")?)?,
            h: positive("height", required(&node, "height")?)?,
        }),
        "circle" => SvgShape::Circle {
            cx: optional(&node, "cx")?,
            cy: optional(&node, "cy")?,
            r: positive("r", required(&node, "r")?)?,
        },
        "ellipse" => SvgShape::Ellipse {
            cx: optional(&node, "cx")?,
            cy: optional(&node, "cy")?,
            rx: positive("rx", required(&node, "rx")?)?,
            ry: positive("ry", required(&node, "ry")?)?,
        },
        "polygon" => {
            let raw = node
                .attribute("points")
                .ok_or_else(|| attr_error("points", "missing"))?;
            let points = parse_points(raw)?;
            if points.len() < 3 {
                return Err(attr_error("points", "a polygon needs at least 3 points"));
            }
            SvgShape::Polygon { points }
        }
        "path" => {
            let raw = node.attribute("d").ok_or_else(|| attr_error("d", "missing"))?;
            SvgShape::Path {
                subpaths: parse_path_data(raw)?,
            }
        }
        other => return Err(SegmentError::UnsupportedElement(other.to_string())),
    };
    Ok(shape)
}

fn parse_points(raw: &str) -> Result<Vec<Point>, SegmentError> {
    let numbers: Vec<f64> = raw
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| parse_number("points", s))
        .collect::<Result<_, _>>()?;
    if !numbers.len().is_multiple_of(2) {
        return Err(attr_error("points", "odd number of coordinates"));
    }
    Ok(numbers.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
}

enum PathToken {
    Command(char),
    Number(f64),
}

fn tokenize_path(d: &str) -> Result<Vec<PathToken>, SegmentError> {
    let mut tokens = Vec::new();
    let bytes = d.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() || c == ',' {
            i += 1;
        } else if c.is_ascii_alphabetic() && c != 'e' && c != 'E' {
            tokens.push(PathToken::Command(c));
            i += 1;
        } else if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') {
            let start = i;
            i += 1;
            let mut seen_dot = c == '.';
            while i < bytes.len() {
                let n = bytes[i] as char;
                if n.is_ascii_digit() {
                    i += 1;
                } else if n == '.' && !seen_dot {
                    seen_dot = true;
                    i += 1;
                } else if (n == 'e' || n == 'E') && i + 1 < bytes.len() {
                    i += 1;
                    if matches!(bytes[i], b'+' | b'-') {
                        i += 1;
                    }
                } else {
                    break;
                }
            }
            tokens.push(PathToken::Number(parse_number("d", &d[start..i])?));
        } else {
            return Err(attr_error("d", format!("unexpected character {c:?}")));
        }
    }
    Ok(tokens)
}

fn parse_path_data(d: &str) -> Result<Vec<Subpath>, SegmentError> {
    let tokens = tokenize_path(d)?;
    let mut subpaths: Vec<Subpath> = Vec::new();
    let mut current: Option<Subpath> = None;
    let mut command: Option<char> = None;
    let mut i = 0;
    while i < tokens.len() {
        match tokens[i] {
            PathToken::Command(c) => {
                i += 1;
                match c {
                    'M' => {
                        if let Some(done) = current.take() {
                            subpaths.push(done);
                        }
                        current = Some(Subpath {
                            points: Vec::new(),
                            closed: false,
                        });
                        command = Some('M');
                    }
                    'L' => {
                        if current.as_ref().is_none_or(|s| s.closed) {
                            return Err(attr_error("d", "L must follow an open subpath"));
                        }
                        command = Some('L');
                    }
                    'Z' => {
                        match current.as_mut() {
                            Some(sub) if !sub.points.is_empty() && !sub.closed => sub.closed = true,
                            _ => return Err(attr_error("d", "Z without an open subpath")),
                        }
                        command = None;
                    }
                    other => return Err(SegmentError::UnsupportedPathCommand(other)),
                }
            }
            PathToken::Number(x) => {
                let Some(PathToken::Number(y)) = tokens.get(i + 1) else {
                    return Err(attr_error("d", "coordinates must come in pairs"));
                };
                let sub = match (command, current.as_mut()) {
                    (Some(_), Some(sub)) => sub,
                    _ => return Err(attr_error("d", "coordinates without a command")),
                };
                sub.points.push(Point::new(x, *y));
                // extra pairs after a moveto are implicit linetos
                command = Some('L');
                i += 2;
            }
        }
    }
    if let Some(done) = current.take() {
        subpaths.push(done);
    }
    if subpaths.is_empty() {
        return Err(attr_error("d", "empty path data"));
    }
    if subpaths.iter().any(|s| s.points.is_empty()) {
        return Err(attr_error("d", "moveto without coordinates"));
    }
    Ok(subpaths)
}

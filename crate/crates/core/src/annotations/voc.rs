//! Pascal-VOC style annotation files.
//!
//! Only the subset of XML that VOC/ImageNet annotation files use is
//! understood: elements, attributes (ignored), text with the predefined and
//! numeric entities, comments, processing instructions, DOCTYPE and CDATA.
//! Unknown elements are skipped.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{AnnotationRecord, ObjectAnnotation};
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

#[derive(Debug, Default, Clone, PartialEq)]
struct Element {
    name: String,
    text: String,
    children: Vec<Element>,
}

impl Element {
    fn child(&self, name: &str) -> Option<&Element> {
        self.children.iter().find(|c| c.name == name)
    }

    fn children_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Element> + 'a {
        self.children.iter().filter(move |c| c.name == name)
    }

    fn required(&self, name: &str) -> Result<&Element> {
        self.child(name)
            .ok_or_else(|| Error::parse(format!("<{}> is missing <{name}>", self.name)))
    }

    fn required_text(&self, name: &str) -> Result<&str> {
        Ok(self.required(name)?.text.trim())
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn line(&self) -> usize {
        self.src[..self.pos].matches('\n').count() + 1
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse_at(self.line(), msg)
    }

    fn skip_past(&mut self, end: &str, what: &str) -> Result<()> {
        match self.rest().find(end) {
            Some(i) => {
                self.pos += i + end.len();
                Ok(())
            }
            None => Err(self.err(format!("unterminated {what}"))),
        }
    }

    /// Skips declarations, comments and doctype. Returns true if one was consumed.
    fn skip_misc(&mut self) -> Result<bool> {
        let rest = self.rest();
        if rest.starts_with("<?") {
            self.skip_past("?>", "processing instruction")?;
        } else if rest.starts_with("<!--") {
            self.skip_past("-->", "comment")?;
        } else if rest.starts_with("<!DOCTYPE") || rest.starts_with("<!doctype") {
            self.skip_past(">", "doctype")?;
        } else {
            return Ok(false);
        }
        Ok(true)
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn name(&mut self) -> Result<String> {
        let rest = self.rest();
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '>' || c == '/')
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(self.err("expected element name"));
        }
        self.pos += end;
        Ok(rest[..end].to_string())
    }

    /// Parses one element; the reader is positioned at its `<`.
    fn element(&mut self, depth: usize) -> Result<Element> {
        if depth > 64 {
            return Err(self.err("elements nested too deeply"));
        }
        self.pos += 1;
        let name = self.name()?;
        // attributes are not needed by VOC; skip to the end of the tag
        let rest = self.rest();
        let mut quote = None;
        let mut close = None;
        for (i, ch) in rest.char_indices() {
            match (quote, ch) {
                (Some(q), c) if c == q => quote = None,
                (Some(_), _) => {}
                (None, '"') | (None, '\'') => quote = Some(ch),
                (None, '>') => {
                    close = Some(i);
                    break;
                }
                (None, '<') => break,
                _ => {}
            }
        }
        let Some(close) = close else {
            return Err(self.err(format!("unterminated start tag <{name}>")));
        };
        let self_closing = rest[..close].trim_end().ends_with('/');
        self.pos += close + 1;
        let mut el = Element {
            name,
            ..Default::default()
        };
        if self_closing {
            return Ok(el);
        }
        loop {
            let rest = self.rest();
            if rest.is_empty() {
                return Err(self.err(format!("unexpected end of input inside <{}>", el.name)));
            }
            if let Some(body) = rest.strip_prefix("<![CDATA[") {
                let Some(end) = body.find("]]>") else {
                    return Err(self.err("unterminated CDATA section"));
                };
                el.text.push_str(&body[..end]);
                self.pos += "<![CDATA[".len() + end + 3;
            } else if rest.starts_with("</") {
                self.pos += 2;
                let closing = self.name()?;
                self.skip_ws();
                if !self.rest().starts_with('>') {
                    return Err(self.err(format!("malformed end tag </{closing}")));
                }
                self.pos += 1;
                if closing != el.name {
                    return Err(self.err(format!("</{closing}> does not close <{}>", el.name)));
                }
                return Ok(el);
            } else if self.skip_misc()? {
            } else if rest.starts_with('<') {
                let child = self.element(depth + 1)?;
                el.children.push(child);
            } else {
                let end = rest.find('<').unwrap_or(rest.len());
                let line = self.line();
                el.text.push_str(&unescape(&rest[..end], line)?);
                self.pos += end;
            }
        }
    }

    fn document(mut self) -> Result<Element> {
        loop {
            self.skip_ws();
            if !self.skip_misc()? {
                break;
            }
        }
        if !self.rest().starts_with('<') {
            return Err(self.err("expected root element"));
        }
        let root = self.element(0)?;
        loop {
            self.skip_ws();
            if !self.skip_misc()? {
                break;
            }
        }
        if !self.rest().is_empty() {
            return Err(self.err("content after root element"));
        }
        Ok(root)
    }
}

fn unescape(text: &str, line: usize) -> Result<String> {
    if !text.contains('&') {
        return Ok(text.to_string());
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp + 1..];
        let semi = tail
            .find(';')
            .ok_or_else(|| Error::parse_at(line, "unterminated entity"))?;
        let entity = &tail[..semi];
        let ch = match entity {
            "lt" => '<',
            "gt" => '>',
            "amp" => '&',
            "quot" => '"',
            "apos" => '\'',
            e if e.starts_with("#x") || e.starts_with("#X") => u32::from_str_radix(&e[2..], 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| Error::parse_at(line, format!("bad character reference &{e};")))?,
            e if e.starts_with('#') => e[1..]
                .parse::<u32>()
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| Error::parse_at(line, format!("bad character reference &{e};")))?,
            e => return Err(Error::parse_at(line, format!("unknown entity &{e};"))),
        };
        out.push(ch);
        rest = &tail[semi + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// An object removed at load time because its clamped box had no area.
#[derive(Debug, Clone, PartialEq)]
pub struct DroppedObject {
    pub class_label: String,
    /// Position of the `<object>` element in the file.
    pub element_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedAnnotation {
    pub record: AnnotationRecord,
    pub dropped: Vec<DroppedObject>,
}

fn parse_dim(el: &Element, name: &str) -> Result<u32> {
    let text = el.required_text(name)?;
    match text.parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::parse(format!("<{name}> must be a positive integer, got `{text}`"))),
    }
}

fn parse_coord(el: &Element, name: &str) -> Result<i64> {
    let text = el.required_text(name)?;
    let v: f64 = text
        .parse()
        .map_err(|_| Error::parse(format!("<{name}> is not a number: `{text}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(format!("<{name}> is not finite")));
    }
    Ok(v.round() as i64)
}

/// Parses a VOC annotation document.
///
/// VOC boxes are 1-based with inclusive corners; they come back 0-based with
/// exclusive `xmax`/`ymax`, clamped to the declared image size. Objects whose
/// clamped box is empty are reported in `dropped` instead of failing the
/// whole file. `image_id` is the stem of `<filename>` and `image_path` the
/// filename itself.
pub fn parse_voc_xml(bytes: &[u8]) -> Result<ParsedAnnotation> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(format!("invalid UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let root = Reader { src: text, pos: 0 }.document()?;
    if root.name != "annotation" {
        return Err(Error::parse(format!("root element is <{}>, expected <annotation>", root.name)));
    }
    let filename = root.required_text("filename")?.to_string();
    if filename.is_empty() {
        return Err(Error::parse("<filename> is empty"));
    }
    let size = root.required("size")?;
    let (w, h) = (parse_dim(size, "width")?, parse_dim(size, "height")?);

    let mut objects = Vec::new();
    let mut dropped = Vec::new();
    for (i, obj) in root.children_named("object").enumerate() {
        let label = obj.required_text("name")?.to_string();
        if label.is_empty() {
            return Err(Error::parse(format!("object {i} has an empty <name>")));
        }
        let bb = obj.required("bndbox")?;
        let xmin = parse_coord(bb, "xmin")? - 1;
        let ymin = parse_coord(bb, "ymin")? - 1;
        let xmax = parse_coord(bb, "xmax")?;
        let ymax = parse_coord(bb, "ymax")?;
        let cx = |v: i64| v.clamp(0, w as i64) as u32;
        let cy = |v: i64| v.clamp(0, h as i64) as u32;
        match BoundingBox::new(cx(xmin), cy(ymin), cx(xmax), cy(ymax)) {
            Ok(bbox) => objects.push(ObjectAnnotation {
                class_label: label,
                bbox,
            }),
            Err(_) => {
                log::warn!("{filename}: dropping object {i} ({label}): degenerate box after clamping");
                dropped.push(DroppedObject {
                    class_label: label,
                    element_index: i,
                });
            }
        }
    }

    let image_id = Path::new(&filename)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| filename.clone());
    Ok(ParsedAnnotation {
        record: AnnotationRecord {
            image_id,
            image_path: PathBuf::from(&filename),
            image_w: w,
            image_h: h,
            objects,
        },
        dropped,
    })
}

/// Writes a record back as VOC XML (1-based inclusive coordinates).
pub fn write_voc_xml(record: &AnnotationRecord) -> String {
    let filename = record
        .image_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| record.image_id.clone());
    let mut out = String::new();
    out.push_str("<annotation>\n");
    let _ = writeln!(out, "  <filename>{}</filename>", escape(&filename));
    let _ = writeln!(
        out,
        "  <size>\n    <width>{}</width>\n    <height>{}</height>\n    <depth>3</depth>\n  </size>",
        record.image_w, record.image_h
    );
    for obj in &record.objects {
        let b = obj.bbox;
        let _ = writeln!(
            out,
            "  <object>\n    <name>{}</name>\n    <bndbox>\n      <xmin>{}</xmin>\n      <ymin>{}</ymin>\n      <xmax>{}</xmax>\n      <ymax>{}</ymax>\n    </bndbox>\n  </object>",
            escape(&obj.class_label),
            b.xmin + 1,
            b.ymin + 1,
            b.xmax,
            b.ymax
        );
    }
    out.push_str("</annotation>\n");
    out
}

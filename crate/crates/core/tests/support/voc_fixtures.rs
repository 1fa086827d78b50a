//! Expected parse results for `tests/fixtures/voc`, converted by hand from
//! 1-based inclusive VOC corners to 0-based exclusive boxes.
#![allow(dead_code)]

use std::path::PathBuf;

pub enum Expect {
    Ok {
        size: (u32, u32),
        objects: Vec<(String, [u32; 4])>,
        dropped: usize,
    },
    ParseError,
}

fn ok(size: (u32, u32), objects: &[(&str, [u32; 4])], dropped: usize) -> Expect {
    Expect::Ok {
        size,
        objects: objects.iter().map(|(l, b)| (l.to_string(), *b)).collect(),
        dropped,
    }
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("core")
        .join("tests")
        .join("fixtures")
        .join("voc")
}

pub fn expectations() -> Vec<(&'static str, Expect)> {
    let many: Vec<(String, [u32; 4])> = (0..12u32)
        .map(|i| (format!("c{i}"), [i * 10, i * 5, 50 + i * 10, 40 + i * 5]))
        .collect();
    vec![
        ("ok_01_single.xml", ok((200, 200), &[("dog", [0, 0, 100, 100])], 0)),
        ("ok_02_zero_objects.xml", ok((64, 48), &[], 0)),
        (
            "ok_03_two_objects.xml",
            ok((500, 375), &[("dog", [11, 29, 250, 300]), ("car", [259, 39, 499, 370])], 0),
        ),
        ("ok_04_clamped_right.xml", ok((100, 80), &[("cup", [49, 9, 100, 60])], 0)),
        ("ok_05_clamped_all.xml", ok((100, 80), &[("cup", [0, 0, 100, 80])], 0)),
        ("ok_06_zero_based.xml", ok((50, 50), &[("cup", [0, 0, 10, 10])], 0)),
        ("ok_07_no_extension.xml", ok((250, 250), &[("tench", [2, 4, 220, 240])], 0)),
        ("ok_08_float_coords.xml", ok((90, 90), &[("ball", [9, 20, 51, 60])], 0)),
        (
            "ok_09_entities.xml",
            ok((40, 40), &[("salt & pepper", [0, 0, 40, 40]), ("<odd>", [4, 4, 9, 9])], 0),
        ),
        ("ok_10_degenerate_dropped.xml", ok((60, 60), &[("dog", [1, 1, 30, 30])], 1)),
        ("ok_11_unknown_elements.xml", ok((30, 30), &[("cat", [0, 0, 30, 30])], 0)),
        ("ok_12_comments.xml", ok((20, 20), &[("cup", [1, 1, 8, 8])], 0)),
        (
            "ok_13_many_objects.xml",
            Expect::Ok {
                size: (640, 480),
                objects: many,
                dropped: 0,
            },
        ),
        ("ok_14_single_pixel.xml", ok((10, 10), &[("dot", [4, 4, 5, 5])], 0)),
        ("ok_15_crlf.xml", ok((33, 22), &[("cup", [0, 1, 30, 20])], 0)),
        ("err_16_truncated.xml", Expect::ParseError),
        ("err_17_missing_size.xml", Expect::ParseError),
        ("err_18_bad_number.xml", Expect::ParseError),
        ("err_19_mismatched_tags.xml", Expect::ParseError),
        ("err_20_wrong_root.xml", Expect::ParseError),
    ]
}

/// Parses one fixture, compares it to its expectation, and for valid files
/// checks that writing and re-parsing (XML and JSON) reproduces the record.
pub fn check_fixture(name: &str, expect: &Expect) -> Result<(), String> {
    use zoomcrop::annotations::{parse_voc_xml, write_voc_xml, AnnotationRecord};
    use zoomcrop::Error;

    let bytes = std::fs::read(fixture_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
    let parsed = parse_voc_xml(&bytes);
    match (expect, parsed) {
        (Expect::ParseError, Err(Error::Parse { .. })) => Ok(()),
        (Expect::ParseError, other) => Err(format!("{name}: expected ParseError, got {other:?}")),
        (Expect::Ok { .. }, Err(e)) => Err(format!("{name}: unexpected error {e}")),
        (Expect::Ok { size, objects, dropped }, Ok(p)) => {
            let rec = &p.record;
            let got: Vec<(String, [u32; 4])> = rec
                .objects
                .iter()
                .map(|o| (o.class_label.clone(), [o.bbox.xmin, o.bbox.ymin, o.bbox.xmax, o.bbox.ymax]))
                .collect();
            if (rec.image_w, rec.image_h) != *size || &got != objects || p.dropped.len() != *dropped {
                return Err(format!("{name}: got {:?} {got:?} dropped {}", (rec.image_w, rec.image_h), p.dropped.len()));
            }
            let again = parse_voc_xml(write_voc_xml(rec).as_bytes()).map_err(|e| format!("{name}: reparse {e}"))?;
            if &again.record != rec {
                return Err(format!("{name}: XML round trip changed the record"));
            }
            let json = serde_json::to_string(rec).map_err(|e| e.to_string())?;
            let back: AnnotationRecord = serde_json::from_str(&json).map_err(|e| e.to_string())?;
            if &back != rec {
                return Err(format!("{name}: JSON round trip changed the record"));
            }
            Ok(())
        }
    }
}

//! Annotation records, the IS-A class hierarchy, and class selection for
//! clean and dirty crop datasets.

mod hierarchy;
mod voc;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::BoundingBox;

pub use hierarchy::{parse_hierarchy, ClassHierarchy};
pub use voc::{parse_voc_xml, write_voc_xml, DroppedObject, ParsedAnnotation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectAnnotation {
    pub class_label: String,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

/// One annotated image: identity, size and labelled boxes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub image_path: PathBuf,
    pub image_w: u32,
    pub image_h: u32,
    pub objects: Vec<ObjectAnnotation>,
}

impl AnnotationRecord {
    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.objects.iter().map(|o| o.class_label.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Drop classes that are ancestors of other selected classes.
    Clean,
    /// Keep every class, IS-A overlaps included.
    Dirty,
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(SelectionMode::Clean),
            "dirty" => Ok(SelectionMode::Dirty),
            other => Err(Error::Config(format!("unknown selection mode `{other}`"))),
        }
    }
}

/// Chooses the class set for a crop dataset.
///
/// In clean mode a class is removed whenever it is an ancestor of another
/// class in `all_classes`, so the more specific label wins. The test is made
/// against the full input set, which keeps the result independent of
/// iteration order.
pub fn select_classes(
    all_classes: &BTreeSet<String>,
    hierarchy: &ClassHierarchy,
    mode: SelectionMode,
) -> BTreeSet<String> {
    match mode {
        SelectionMode::Dirty => all_classes.clone(),
        SelectionMode::Clean => all_classes
            .iter()
            .filter(|a| !all_classes.iter().any(|b| hierarchy.is_ancestor(a, b)))
            .cloned()
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn clean_drops_ancestor() {
        let h = parse_hierarchy("dog\tanimal\n").unwrap();
        let all = set(&["dog", "animal", "car"]);
        assert_eq!(select_classes(&all, &h, SelectionMode::Clean), set(&["car", "dog"]));
        assert_eq!(select_classes(&all, &h, SelectionMode::Dirty), all);
    }

    #[test]
    fn clean_without_edges_is_identity() {
        let all = set(&["a", "b", "c"]);
        assert_eq!(select_classes(&all, &ClassHierarchy::default(), SelectionMode::Clean), all);
    }

    #[test]
    fn clean_through_absent_intermediate() {
        // canine is not in the set, but animal is still an ancestor of dog
        let h = parse_hierarchy("dog\tcanine\ncanine\tanimal\n").unwrap();
        let all = set(&["dog", "animal"]);
        assert_eq!(select_classes(&all, &h, SelectionMode::Clean), set(&["dog"]));
    }

    #[test]
    fn record_json_round_trip() {
        let rec = AnnotationRecord {
            image_id: "x".into(),
            image_path: "imgs/x.png".into(),
            image_w: 10,
            image_h: 8,
            objects: vec![ObjectAnnotation {
                class_label: "cup".into(),
                bbox: BoundingBox::new(1, 2, 3, 4).unwrap(),
            }],
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<AnnotationRecord>(&json).unwrap(), rec);
    }
}

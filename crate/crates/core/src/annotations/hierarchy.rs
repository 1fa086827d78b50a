use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Immutable IS-A graph with its transitive closure precomputed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassHierarchy {
    parents: BTreeMap<String, BTreeSet<String>>,
    ancestors: BTreeMap<String, BTreeSet<String>>,
}

impl ClassHierarchy {
    /// Builds the hierarchy from `(child, parent)` pairs, rejecting cycles.
    pub fn from_edges<I, S>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (child, parent) in edges {
            let (child, parent) = (child.into(), parent.into());
            if child == parent {
                return Err(Error::Cycle(child));
            }
            parents.entry(parent.clone()).or_default();
            parents.entry(child).or_default().insert(parent);
        }
        let ancestors = closure(&parents)?;
        Ok(ClassHierarchy { parents, ancestors })
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parents
            .iter()
            .flat_map(|(c, ps)| ps.iter().map(move |p| (c.as_str(), p.as_str())))
    }

    /// All strict ancestors; empty for unknown classes.
    pub fn ancestors(&self, class: &str) -> impl Iterator<Item = &str> {
        self.ancestors.get(class).into_iter().flatten().map(String::as_str)
    }

    pub fn is_ancestor(&self, ancestor: &str, of: &str) -> bool {
        self.ancestors.get(of).is_some_and(|a| a.contains(ancestor))
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }
}

fn closure(parents: &BTreeMap<String, BTreeSet<String>>) -> Result<BTreeMap<String, BTreeSet<String>>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    // iterative post-order DFS so deep WordNet chains cannot overflow the stack
    for start in parents.keys() {
        if marks.contains_key(start.as_str()) {
            continue;
        }
        let mut stack: Vec<(&str, Vec<&str>)> = Vec::new();
        marks.insert(start, Mark::Active);
        stack.push((start, parents[start].iter().map(String::as_str).collect()));
        while let Some((node, pending)) = stack.last_mut() {
            if let Some(next) = pending.pop() {
                match marks.get(next) {
                    Some(Mark::Active) => return Err(Error::Cycle(next.to_string())),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Active);
                        let ps = parents[next].iter().map(String::as_str).collect();
                        stack.push((next, ps));
                    }
                }
                continue;
            }
            let node = *node;
            let mut acc = BTreeSet::new();
            for p in &parents[node] {
                acc.insert(p.clone());
                acc.extend(out[p.as_str()].iter().cloned());
            }
            out.insert(node.to_string(), acc);
            marks.insert(node, Mark::Done);
            stack.pop();
        }
    }
    Ok(out)
}

/// Parses `child<TAB>parent` lines. Blank lines and lines starting with `#`
/// are ignored.
pub fn parse_hierarchy(text: &str) -> Result<ClassHierarchy> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(child), Some(parent), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse_at(i + 1, "expected `child<TAB>parent`"));
        };
        let (child, parent) = (child.trim(), parent.trim());
        if child.is_empty() || parent.is_empty() {
            return Err(Error::parse_at(i + 1, "empty class name"));
        }
        edges.push((child.to_string(), parent.to_string()));
    }
    ClassHierarchy::from_edges(edges)
}

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{make_curve, CurveSpec, PlanarDomain};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    name: String,
    curves: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

/// Named domain with the specs it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub domain: PlanarDomain,
    pub specs: Vec<CurveSpec>,
    pub metadata: BTreeMap<String, String>,
}

impl Scene {
    pub fn from_specs(name: impl Into<String>, specs: Vec<CurveSpec>) -> Result<Self> {
        let curves = specs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                make_curve(s).map_err(|e| match e {
                    Error::InvalidSpec(m) => Error::InvalidSpec(format!("curve {i}: {m}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { name: name.into(), domain: PlanarDomain::new(curves)?, specs, metadata: BTreeMap::new() })
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// JSON document text.
    pub fn to_text(&self) -> String {
        let doc = SceneDoc { name: self.name.clone(), curves: self.specs.clone(), metadata: self.metadata.clone() };
        serde_json::to_string_pretty(&doc).expect("scene documents always serialize")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text() + "\n")?;
        Ok(())
    }
}

/// Parses a scene document; syntax errors carry line and column.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let doc: SceneDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut scene = Scene::from_specs(doc.name, doc.curves)?;
    scene.metadata = doc.metadata;
    Ok(scene)
}

pub fn read_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    parse_scene(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse { location: format!("{}: {location}", path.display()), message },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{
  "name": "two_disks",
  "curves": [
    {"kind": "circle", "center": [-3.0, 0.0], "radius": 1.0},
    {"kind": "ellipse", "center": [3.0, 0.0], "a": 1.5, "b": 1.0, "angle": 0.25}
  ],
  "metadata": {"source": "test"}
}"#;

    #[test]
    fn round_trip() {
        let s = parse_scene(TWO).unwrap();
        assert_eq!(s.domain.connectivity(), 2);
        let again = parse_scene(&s.to_text()).unwrap();
        assert_eq!(s, again);
        let a: serde_json::Value = serde_json::from_str(TWO).unwrap();
        let b: serde_json::Value = serde_json::from_str(&s.to_text()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_scene("{\n  \"name\": \"x\",\n  \"curves\": [ {\"kind\": \"circle\", \"center\": [0, 0] \"radius\": 1} ]\n}").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_kind_is_a_parse_error() {
        let err = parse_scene(r#"{"name":"x","curves":[{"kind":"square","side":1}]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn overlapping_circles_violate_invariant() {
        let text = r#"{"name":"x","curves":[
            {"kind":"circle","center":[0,0],"radius":1},
            {"kind":"circle","center":[1,0],"radius":1}]}"#;
        assert!(matches!(parse_scene(text), Err(Error::Invariant(_))));
    }
}

//! JSON file format for knowledge libraries.
//!
//! ```text
//! {
//!   "_summary": { "category_index": [...], "_llm_instructions": "...", "routing_roles": {...} },
//!   "High_Impact_Skills_Library": {
//!     "<category name>": {
//!       "category_description": "...",
//!       "abstraction_level": "governance",
//!       "complement": "<category name>",
//!       "skills": [ { "skill_name": "...", "description": "..." } ]
//!     }
//!   },
//!   "<other keys>": ...
//! }
//! ```
//!
//! Key order is significant. The summary, when present, is always emitted
//! first; categories keep their order; unknown top-level keys land in
//! [`KnowledgeLibrary::provenance`]. Duplicate category keys are preserved so
//! that validation can report them.

use std::fmt;

use indexmap::IndexMap;
use serde::de::{DeserializeSeed, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AbstractionLevel, Category, DistractorTier, KnowledgeLibrary, Skill, SummaryBlock};

pub const SUMMARY_KEY: &str = "_summary";
pub const DEFAULT_BODY_KEY: &str = "High_Impact_Skills_Library";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed library JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("library file has no `{0}` object")]
    MissingBody(String),
}

/// Reads and writes libraries under a given body key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LibraryFormat {
    pub body_key: String,
}

impl Default for LibraryFormat {
    fn default() -> Self {
        Self { body_key: DEFAULT_BODY_KEY.to_string() }
    }
}

impl LibraryFormat {
    pub fn new(body_key: impl Into<String>) -> Self {
        Self { body_key: body_key.into() }
    }

    /// Pretty-printed JSON with a trailing newline. Deterministic for equal
    /// libraries.
    pub fn to_string(&self, lib: &KnowledgeLibrary) -> String {
        let mut out = serde_json::to_string_pretty(&LibraryView { lib, body_key: &self.body_key })
            .expect("library serializes");
        out.push('\n');
        out
    }

    pub fn to_compact_string(&self, lib: &KnowledgeLibrary) -> String {
        serde_json::to_string(&LibraryView { lib, body_key: &self.body_key })
            .expect("library serializes")
    }

    pub fn parse(&self, text: &str) -> Result<KnowledgeLibrary, FormatError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let parsed = LibrarySeed { body_key: &self.body_key }.deserialize(&mut de)?;
        de.end()?;
        match parsed {
            Some(lib) => Ok(lib),
            None => Err(FormatError::MissingBody(self.body_key.clone())),
        }
    }

    pub fn parse_bytes(&self, bytes: &[u8]) -> Result<KnowledgeLibrary, FormatError> {
        let text = std::str::from_utf8(bytes).map_err(|e| {
            FormatError::Json(serde::de::Error::custom(format!("invalid UTF-8: {e}")))
        })?;
        self.parse(text)
    }
}

#[derive(Serialize, Deserialize)]
struct SkillWire {
    skill_name: String,
    #[serde(default)]
    description: String,
}

#[derive(Serialize, Deserialize)]
struct CategoryWire {
    category_description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    abstraction_level: Option<AbstractionLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complement: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distractor_tier: Option<DistractorTier>,
    #[serde(default)]
    skills: Vec<SkillWire>,
}

impl CategoryWire {
    fn from_category(c: &Category) -> Self {
        Self {
            category_description: c.description.clone(),
            abstraction_level: c.abstraction_level,
            complement: c.complement.clone(),
            distractor_tier: c.distractor_tier,
            skills: c
                .skills
                .iter()
                .map(|s| SkillWire { skill_name: s.name.clone(), description: s.description.clone() })
                .collect(),
        }
    }

    fn into_category(self, name: String) -> Category {
        Category {
            name,
            description: self.category_description,
            skills: self.skills.into_iter().map(|s| Skill::new(s.skill_name, s.description)).collect(),
            abstraction_level: self.abstraction_level,
            complement: self.complement,
            distractor_tier: self.distractor_tier,
        }
    }
}

struct LibraryView<'a> {
    lib: &'a KnowledgeLibrary,
    body_key: &'a str,
}

struct CategoriesView<'a>(&'a [Category]);

impl Serialize for CategoriesView<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for c in self.0 {
            map.serialize_entry(&c.name, &CategoryWire::from_category(c))?;
        }
        map.end()
    }
}

impl Serialize for LibraryView<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let lib = self.lib;
        let len = 1 + usize::from(lib.summary.is_some()) + lib.provenance.len();
        let mut map = serializer.serialize_map(Some(len))?;
        if let Some(summary) = &lib.summary {
            map.serialize_entry(SUMMARY_KEY, summary)?;
        }
        map.serialize_entry(self.body_key, &CategoriesView(&lib.categories))?;
        for (k, v) in &lib.provenance {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct CategoryList(Vec<Category>);

impl<'de> Deserialize<'de> for CategoryList {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CategoryList;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping category names to category bodies")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<CategoryList, A::Error> {
                let mut out = Vec::new();
                while let Some((name, body)) = access.next_entry::<String, CategoryWire>()? {
                    out.push(body.into_category(name));
                }
                Ok(CategoryList(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

struct LibrarySeed<'a> {
    body_key: &'a str,
}

impl<'de> DeserializeSeed<'de> for LibrarySeed<'_> {
    type Value = Option<KnowledgeLibrary>;

    fn deserialize<D: Deserializer<'de>>(self, deserializer: D) -> Result<Self::Value, D::Error> {
        deserializer.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for LibrarySeed<'_> {
    type Value = Option<KnowledgeLibrary>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a library object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
        let mut summary: Option<SummaryBlock> = None;
        let mut categories: Option<Vec<Category>> = None;
        let mut provenance = IndexMap::new();
        while let Some(key) = access.next_key::<String>()? {
            if key == SUMMARY_KEY {
                summary = Some(access.next_value()?);
            } else if key == self.body_key {
                categories = Some(access.next_value::<CategoryList>()?.0);
            } else {
                provenance.insert(key, access.next_value::<serde_json::Value>()?);
            }
        }
        Ok(categories.map(|categories| KnowledgeLibrary { summary, categories, provenance }))
    }
}

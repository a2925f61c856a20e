use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// ODSL entity types, ordered by containment depth.
///
/// `Presentation` sits at depth 0 and `TextRanges` at depth 3. An entity can be
/// selected only from a scope strictly above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EntityType {
    Presentation,
    Slides,
    Shapes,
    TextRanges,
}

impl EntityType {
    pub const ALL: [EntityType; 4] =
        [EntityType::Presentation, EntityType::Slides, EntityType::Shapes, EntityType::TextRanges];

    pub fn depth(self) -> u8 {
        match self {
            EntityType::Presentation => 0,
            EntityType::Slides => 1,
            EntityType::Shapes => 2,
            EntityType::TextRanges => 3,
        }
    }

    /// True when `self` may serve as the scope of a selection of `child`.
    pub fn contains(self, child: EntityType) -> bool {
        self.depth() < child.depth()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Presentation => "presentation",
            EntityType::Slides => "slides",
            EntityType::Shapes => "shapes",
            EntityType::TextRanges => "textRanges",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "presentation" => Ok(EntityType::Presentation),
            "slides" => Ok(EntityType::Slides),
            "shapes" => Ok(EntityType::Shapes),
            "textRanges" => Ok(EntityType::TextRanges),
            other => Err(format!("unknown entity type `{other}`")),
        }
    }
}

/// Classifier-level entity categories. A superset of [`EntityType`] that
/// separates images from other shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityTag {
    Presentation,
    Slide,
    Text,
    Image,
    Shape,
}

impl EntityTag {
    pub const ALL: [EntityTag; 5] =
        [EntityTag::Presentation, EntityTag::Slide, EntityTag::Text, EntityTag::Image, EntityTag::Shape];

    pub fn entity_type(self) -> EntityType {
        match self {
            EntityTag::Presentation => EntityType::Presentation,
            EntityTag::Slide => EntityType::Slides,
            EntityTag::Text => EntityType::TextRanges,
            EntityTag::Image | EntityTag::Shape => EntityType::Shapes,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityTag::Presentation => "presentation",
            EntityTag::Slide => "slide",
            EntityTag::Text => "text",
            EntityTag::Image => "image",
            EntityTag::Shape => "shape",
        }
    }

    /// Bit used by [`TagSet`].
    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for EntityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "presentation" | "presentations" => Ok(EntityTag::Presentation),
            "slide" | "slides" => Ok(EntityTag::Slide),
            "text" | "texts" | "textrange" | "textranges" => Ok(EntityTag::Text),
            "image" | "images" | "picture" | "pictures" => Ok(EntityTag::Image),
            "shape" | "shapes" => Ok(EntityTag::Shape),
            other => Err(format!("unknown entity tag `{other}`")),
        }
    }
}

/// A small ordered set of [`EntityTag`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TagSet(u8);

impl TagSet {
    pub fn empty() -> Self {
        TagSet(0)
    }

    pub fn all() -> Self {
        EntityTag::ALL.iter().copied().collect()
    }

    pub fn insert(&mut self, tag: EntityTag) -> bool {
        let fresh = !self.contains(tag);
        self.0 |= tag.bit();
        fresh
    }

    pub fn contains(self, tag: EntityTag) -> bool {
        self.0 & tag.bit() != 0
    }

    pub fn is_subset(self, other: TagSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: TagSet) -> TagSet {
        TagSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TagSet) -> TagSet {
        TagSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = EntityTag> {
        EntityTag::ALL.into_iter().filter(move |t| self.contains(*t))
    }
}

impl FromIterator<EntityTag> for TagSet {
    fn from_iter<I: IntoIterator<Item = EntityTag>>(iter: I) -> Self {
        let mut set = TagSet::empty();
        for tag in iter {
            set.insert(tag);
        }
        set
    }
}

impl fmt::Display for TagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(EntityTag::as_str).collect();
        f.write_str(&names.join(", "))
    }
}

impl Serialize for TagSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for TagSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let tags = Vec::<EntityTag>::deserialize(deserializer)?;
        Ok(tags.into_iter().collect())
    }
}

/// Literal value types accepted by statement parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueType {
    Number,
    String,
    Boolean,
    RangedNumber {
        lo: f64,
        hi: f64,
    },
    StringOrRegex,
    /// Named CSS color or `#RRGGBB`.
    Color,
    Enum {
        name: String,
        values: Vec<String>,
    },
    EntityRef(EntityType),
    ScopeRef,
}

impl ValueType {
    pub fn describe(&self) -> String {
        match self {
            ValueType::Number => "Number".into(),
            ValueType::String => "String".into(),
            ValueType::Boolean => "Boolean".into(),
            ValueType::RangedNumber { lo, hi } => format!("RangedNumber[{lo}, {hi}]"),
            ValueType::StringOrRegex => "StringOrRegex".into(),
            ValueType::Color => "Color".into(),
            ValueType::Enum { name, .. } => format!("Enum({name})"),
            ValueType::EntityRef(e) => format!("{e}"),
            ValueType::ScopeRef => "Scope".into(),
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ValueType::Number | ValueType::RangedNumber { .. })
    }
}

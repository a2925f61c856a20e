//! Statement schema registry.
//!
//! The registry is data: statements, enums, alias and injection tables, prompt
//! rules and the entity-tag to statement mapping all come from one JSON
//! document carrying a `schemaVersion`. The built-in copy is bundled at
//! compile time.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{Literal, SpecialScope, Value};
use super::types::{EntityTag, EntityType, ValueType};

pub const SCHEMA_VERSION: u32 = 1;

static BUILTIN_JSON: &str = include_str!("../../data/registry.json");

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("invalid registry JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schemaVersion {0}")]
    Version(u32),
    #[error("statement `{statement}`: {message}")]
    Statement { statement: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Select,
    Insert,
    Format,
    Delete,
    Delegation,
}

#[derive(Debug, Clone)]
pub struct ParamSchema {
    pub name: String,
    pub ty: ValueType,
    pub required: bool,
    pub default: Option<Value>,
    /// Free-form text; replaced by a placeholder when desensitizing.
    pub free_form: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub comment: String,
    pub code: String,
}

#[derive(Debug, Clone)]
pub struct StatementSchema {
    pub name: String,
    pub family: Family,
    pub target: EntityType,
    pub params: Vec<ParamSchema>,
    pub returns: Option<EntityType>,
    pub snippets: Vec<Snippet>,
}

impl StatementSchema {
    pub fn param(&self, name: &str) -> Option<&ParamSchema> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// The parameter naming the entities a format/delete/insert acts on.
    pub fn entity_param(&self) -> Option<&ParamSchema> {
        self.params.iter().find(|p| matches!(p.ty, ValueType::EntityRef(_)))
    }
}

/// A statement appended by an injection rule. The new statement receives the
/// rewritten statement's binding through `entity_param`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InjectedStatement {
    pub name: String,
    pub entity_param: String,
    pub args: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InjectionTemplate {
    pub statement: String,
    pub param: String,
    pub value: String,
    pub replacement: String,
    pub binding_hint: String,
    pub append: InjectedStatement,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptRule {
    /// Empty means the rule always applies.
    pub tags: Vec<EntityTag>,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct Registry {
    pub schema_version: u32,
    statements: Vec<StatementSchema>,
    by_name: HashMap<String, usize>,
    pub enums: BTreeMap<String, Vec<String>>,
    pub aliases: BTreeMap<String, String>,
    pub injections: Vec<InjectionTemplate>,
    pub rules: Vec<PromptRule>,
    pub tag_statements: BTreeMap<EntityTag, Vec<String>>,
    colors: HashSet<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawRegistry {
    schema_version: u32,
    enums: BTreeMap<String, Vec<String>>,
    statements: Vec<RawStatement>,
    #[serde(default)]
    tag_statements: BTreeMap<EntityTag, Vec<String>>,
    #[serde(default)]
    rules: Vec<PromptRule>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
    #[serde(default)]
    injections: Vec<InjectionTemplate>,
    #[serde(default)]
    colors: Vec<String>,
}

#[derive(Deserialize)]
struct RawStatement {
    name: String,
    family: Family,
    target: EntityType,
    #[serde(default)]
    returns: Option<EntityType>,
    params: Vec<RawParam>,
    #[serde(default)]
    snippets: Vec<Snippet>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawParam {
    name: String,
    #[serde(rename = "type")]
    ty: RawType,
    #[serde(default)]
    required: bool,
    #[serde(default)]
    default: Option<serde_json::Value>,
    #[serde(default)]
    free_form: bool,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
enum RawType {
    Number,
    String,
    Boolean,
    StringOrRegex,
    Color,
    Scope,
    RangedNumber {
        lo: f64,
        hi: f64,
    },
    Enum {
        #[serde(rename = "enum")]
        name: String,
    },
    Entity {
        entity: EntityType,
    },
}

fn is_snake_case(s: &str) -> bool {
    !s.is_empty()
        && s.starts_with(|c: char| c.is_ascii_lowercase())
        && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn is_camel_case(s: &str) -> bool {
    !s.is_empty() && s.starts_with(|c: char| c.is_ascii_lowercase()) && s.chars().all(|c| c.is_ascii_alphanumeric())
}

/// Converts a JSON scalar to an ODSL value. Strings naming a special scope
/// become [`Value::Special`] only when `scope_param` is set.
pub fn json_to_value(json: &serde_json::Value, scope_param: bool) -> Option<Value> {
    match json {
        serde_json::Value::Bool(b) => Some(Value::boolean(*b)),
        serde_json::Value::Number(n) => n.as_f64().map(Value::number),
        serde_json::Value::String(s) => match SpecialScope::parse(s) {
            Some(sp) if scope_param => Some(Value::Special(sp)),
            _ => Some(Value::string(s.clone())),
        },
        _ => None,
    }
}

impl Registry {
    /// The registry bundled with the crate.
    pub fn builtin() -> &'static Registry {
        static BUILTIN: OnceLock<Registry> = OnceLock::new();
        BUILTIN.get_or_init(|| Registry::from_json(BUILTIN_JSON).expect("bundled registry is valid"))
    }

    pub fn builtin_json() -> &'static str {
        BUILTIN_JSON
    }

    pub fn from_json(text: &str) -> Result<Registry, RegistryError> {
        let raw: RawRegistry = serde_json::from_str(text)?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(RegistryError::Version(raw.schema_version));
        }
        for (name, values) in &raw.enums {
            let unique: HashSet<_> = values.iter().collect();
            if unique.len() != values.len() {
                return Err(RegistryError::Invalid(format!("enum `{name}` has duplicate values")));
            }
        }

        let mut statements = Vec::with_capacity(raw.statements.len());
        let mut by_name = HashMap::new();
        for rs in raw.statements {
            let schema = resolve_statement(rs, &raw.enums)?;
            if by_name.insert(schema.name.clone(), statements.len()).is_some() {
                return Err(RegistryError::Invalid(format!("duplicate statement `{}`", schema.name)));
            }
            statements.push(schema);
        }

        let registry = Registry {
            schema_version: raw.schema_version,
            statements,
            by_name,
            enums: raw.enums,
            aliases: raw.aliases,
            injections: raw.injections,
            rules: raw.rules,
            tag_statements: raw.tag_statements,
            colors: raw.colors.into_iter().map(|c| c.to_ascii_lowercase()).collect(),
        };
        registry.validate_tables()?;
        Ok(registry)
    }

    fn validate_tables(&self) -> Result<(), RegistryError> {
        for (alias, target) in &self.aliases {
            if self.lookup(target).is_none() {
                return Err(RegistryError::Invalid(format!("alias `{alias}` points at unknown statement `{target}`")));
            }
        }
        for inj in &self.injections {
            let schema = self.lookup(&inj.statement).ok_or_else(|| {
                RegistryError::Invalid(format!("injection for unknown statement `{}`", inj.statement))
            })?;
            if schema.returns.is_none() {
                return Err(RegistryError::Invalid(format!(
                    "injection on `{}` needs a statement that returns entities",
                    inj.statement
                )));
            }
            if self.lookup(&inj.append.name).is_none() {
                return Err(RegistryError::Invalid(format!(
                    "injection appends unknown statement `{}`",
                    inj.append.name
                )));
            }
        }
        for names in self.tag_statements.values() {
            if let Some(missing) = names.iter().find(|n| self.lookup(n).is_none()) {
                return Err(RegistryError::Invalid(format!("tag maps to unknown statement `{missing}`")));
            }
        }
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&StatementSchema> {
        self.by_name.get(name).map(|&i| &self.statements[i])
    }

    pub fn statements(&self) -> &[StatementSchema] {
        &self.statements
    }

    pub fn is_color(&self, s: &str) -> bool {
        let hex = s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit());
        hex || self.colors.contains(&s.to_ascii_lowercase())
    }

    pub fn injection_for(&self, statement: &str, param: &str, value: &str) -> Option<&InjectionTemplate> {
        self.injections.iter().find(|i| i.statement == statement && i.param == param && i.value == value)
    }

    /// Statements whose syntax belongs in a prompt for the given tags, in
    /// registry order.
    pub fn statements_for_tags(&self, tags: impl IntoIterator<Item = EntityTag>) -> Vec<&StatementSchema> {
        let wanted: HashSet<&str> =
            tags.into_iter().filter_map(|t| self.tag_statements.get(&t)).flatten().map(String::as_str).collect();
        self.statements.iter().filter(|s| wanted.contains(s.name.as_str())).collect()
    }
}

fn resolve_statement(
    rs: RawStatement,
    enums: &BTreeMap<String, Vec<String>>,
) -> Result<StatementSchema, RegistryError> {
    let err = |message: String| RegistryError::Statement { statement: rs.name.clone(), message };
    if !is_snake_case(&rs.name) {
        return Err(err("statement names must be snake_case".into()));
    }
    let returns_entities = matches!(rs.family, Family::Select | Family::Insert | Family::Delegation);
    if returns_entities != rs.returns.is_some() {
        return Err(err("select/insert/delegation return entities; format/delete return none".into()));
    }
    let mut params = Vec::with_capacity(rs.params.len());
    let mut seen = HashSet::new();
    for rp in &rs.params {
        if !is_camel_case(&rp.name) {
            return Err(err(format!("parameter `{}` must be camelCase", rp.name)));
        }
        if !seen.insert(rp.name.as_str()) {
            return Err(err(format!("duplicate parameter `{}`", rp.name)));
        }
        let ty = match &rp.ty {
            RawType::Number => ValueType::Number,
            RawType::String => ValueType::String,
            RawType::Boolean => ValueType::Boolean,
            RawType::StringOrRegex => ValueType::StringOrRegex,
            RawType::Color => ValueType::Color,
            RawType::Scope => ValueType::ScopeRef,
            RawType::RangedNumber { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(err(format!("parameter `{}` has an invalid range", rp.name)));
                }
                ValueType::RangedNumber { lo: *lo, hi: *hi }
            }
            RawType::Enum { name } => {
                let values = enums.get(name).ok_or_else(|| err(format!("unknown enum `{name}`")))?.clone();
                ValueType::Enum { name: name.clone(), values }
            }
            RawType::Entity { entity } => ValueType::EntityRef(*entity),
        };
        let is_scope = matches!(ty, ValueType::ScopeRef);
        let default = match &rp.default {
            None => None,
            Some(json) => Some(
                json_to_value(json, is_scope).ok_or_else(|| err(format!("unsupported default for `{}`", rp.name)))?,
            ),
        };
        params.push(ParamSchema { name: rp.name.clone(), ty, required: rp.required, default, free_form: rp.free_form });
    }
    if rs.family == Family::Select {
        let scope_ok = params.first().is_some_and(|p| {
            p.name == "scope"
                && p.ty == ValueType::ScopeRef
                && p.default == Some(Value::Special(SpecialScope::Selection))
        });
        if !scope_ok {
            return Err(err("select statements need a leading `scope` defaulting to Selection".into()));
        }
    }
    Ok(StatementSchema {
        name: rs.name,
        family: rs.family,
        target: rs.target,
        params,
        returns: rs.returns,
        snippets: rs.snippets,
    })
}

/// Whether a desensitization placeholder may stand in for a value of type `ty`.
pub fn literal_matches_placeholder(ty: &ValueType, lit: &Literal) -> bool {
    use super::ast::Placeholder;
    match lit {
        Literal::Placeholder(Placeholder::Num) => ty.is_numeric(),
        Literal::Placeholder(Placeholder::Str) => {
            matches!(ty, ValueType::String | ValueType::StringOrRegex | ValueType::Color | ValueType::Enum { .. })
        }
        _ => false,
    }
}

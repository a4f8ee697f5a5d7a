//! Prompt templates: ordered named sections with `{placeholder}` slots.
//!
//! Templates ship as versioned TOML files under `prompts/`, one per pipeline
//! stage and context configuration, and are embedded into the library.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use super::GatewayError;

/// A structured prompt: ordered sections whose text carries named
/// placeholders of the form `{snake_case_name}`.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    template_id: String,
    sections: Vec<TemplateSection>,
    required_placeholders: BTreeSet<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TemplateSection {
    pub name: String,
    pub text: String,
}

#[derive(Deserialize)]
struct TemplateFile {
    template_id: String,
    sections: Vec<TemplateSection>,
}

impl PromptTemplate {
    /// Parses a TOML template definition. Every placeholder must appear in
    /// exactly one section.
    pub fn from_toml(text: &str) -> Result<PromptTemplate, GatewayError> {
        let file: TemplateFile = toml::from_str(text)
            .map_err(|e| GatewayError::Template(format!("template parse error: {e}")))?;
        let mut required_placeholders = BTreeSet::new();
        let mut seen_in: BTreeMap<String, String> = BTreeMap::new();
        for section in &file.sections {
            for placeholder in scan_placeholders(&section.text) {
                if let Some(previous) = seen_in.get(&placeholder) {
                    if previous != &section.name {
                        return Err(GatewayError::Template(format!(
                            "placeholder '{placeholder}' appears in sections '{previous}' and '{}'",
                            section.name
                        )));
                    }
                }
                seen_in.insert(placeholder.clone(), section.name.clone());
                required_placeholders.insert(placeholder);
            }
        }
        Ok(PromptTemplate {
            template_id: file.template_id,
            sections: file.sections,
            required_placeholders,
        })
    }

    pub fn template_id(&self) -> &str {
        &self.template_id
    }

    pub fn sections(&self) -> &[TemplateSection] {
        &self.sections
    }

    pub fn required_placeholders(&self) -> &BTreeSet<String> {
        &self.required_placeholders
    }

    /// Substitutes bindings into every section, in declared order. The
    /// bindings must cover the required placeholders exactly; rendering
    /// leaves no placeholder unresolved.
    pub fn render(&self, bindings: &BTreeMap<String, String>) -> Result<String, GatewayError> {
        for required in &self.required_placeholders {
            if !bindings.contains_key(required) {
                return Err(GatewayError::MissingPlaceholder {
                    template_id: self.template_id.clone(),
                    placeholder: required.clone(),
                });
            }
        }
        for bound in bindings.keys() {
            if !self.required_placeholders.contains(bound) {
                return Err(GatewayError::UnknownPlaceholder {
                    template_id: self.template_id.clone(),
                    placeholder: bound.clone(),
                });
            }
        }

        let mut rendered = Vec::with_capacity(self.sections.len());
        for section in &self.sections {
            let mut text = section.text.trim().to_string();
            for (name, value) in bindings {
                text = text.replace(&format!("{{{name}}}"), value);
            }
            rendered.push(text);
        }
        Ok(rendered.join("\n\n"))
    }
}

/// Placeholder names found in `text`: `{name}` where name is
/// `[a-z][a-z0-9_]*`. Brace pairs that do not match this shape (e.g. JSON
/// examples) are left alone.
fn scan_placeholders(text: &str) -> Vec<String> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let mut j = i + 1;
            if j < bytes.len() && bytes[j].is_ascii_lowercase() {
                while j < bytes.len() && (bytes[j].is_ascii_lowercase() || bytes[j].is_ascii_digit() || bytes[j] == b'_')
                {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'}' {
                    out.push(text[i + 1..j].to_string());
                    i = j + 1;
                    continue;
                }
            }
        }
        i += 1;
    }
    out
}

/// The builtin template set, embedded from `prompts/`.
#[derive(Debug, Clone)]
pub struct TemplateRegistry {
    templates: BTreeMap<String, PromptTemplate>,
}

const BUILTIN_TEMPLATES: &[&str] = &[
    include_str!("../../prompts/classify.v1.toml"),
    include_str!("../../prompts/screen-desc.v1.toml"),
    include_str!("../../prompts/localize.v1.toml"),
    include_str!("../../prompts/s2r-gen.no-info.v1.toml"),
    include_str!("../../prompts/s2r-gen.interactions.v1.toml"),
    include_str!("../../prompts/s2r-gen.interactions-screens.v1.toml"),
    include_str!("../../prompts/s2r-gen.full.v1.toml"),
    include_str!("../../prompts/obeb-gen.no-info.v1.toml"),
    include_str!("../../prompts/obeb-gen.buggy-screen.v1.toml"),
    include_str!("../../prompts/obeb-gen.s2rs-buggy-screen.v1.toml"),
    include_str!("../../prompts/obeb-gen.full.v1.toml"),
    include_str!("../../prompts/judge-elements.v1.toml"),
];

impl TemplateRegistry {
    pub fn builtin() -> TemplateRegistry {
        let mut templates = BTreeMap::new();
        for text in BUILTIN_TEMPLATES {
            let template = PromptTemplate::from_toml(text).expect("builtin template parses");
            templates.insert(template.template_id().to_string(), template);
        }
        TemplateRegistry { templates }
    }

    pub fn get(&self, template_id: &str) -> Result<&PromptTemplate, GatewayError> {
        self.templates
            .get(template_id)
            .ok_or_else(|| GatewayError::UnknownTemplate(template_id.to_string()))
    }

    pub fn template_ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn template_without_placeholders_renders_its_literal_text() {
        let template = PromptTemplate::from_toml(
            "template_id = \"t\"\n[[sections]]\nname = \"only\"\ntext = \"hello world\"\n",
        )
        .unwrap();
        assert_eq!(template.render(&BTreeMap::new()).unwrap(), "hello world");
    }

    #[test]
    fn rendering_is_deterministic() {
        let registry = TemplateRegistry::builtin();
        let template = registry.get("screen-desc.v1").unwrap();
        let b = bindings(&[
            ("screen_id", "abc"),
            ("activity_name", "MainActivity"),
            ("is_dialog", "false"),
            ("components", "button 'OK'"),
        ]);
        assert_eq!(template.render(&b).unwrap(), template.render(&b).unwrap());
    }

    #[test]
    fn missing_placeholder_is_named_in_the_error() {
        let registry = TemplateRegistry::builtin();
        let template = registry.get("screen-desc.v1").unwrap();
        let err = template.render(&bindings(&[("screen_id", "abc")])).unwrap_err();
        match err {
            GatewayError::MissingPlaceholder { placeholder, .. } => {
                assert_eq!(placeholder, "activity_name");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_binding_is_rejected() {
        let template = PromptTemplate::from_toml(
            "template_id = \"t\"\n[[sections]]\nname = \"only\"\ntext = \"hi {name}\"\n",
        )
        .unwrap();
        let err = template.render(&bindings(&[("name", "x"), ("extra", "y")])).unwrap_err();
        assert!(matches!(err, GatewayError::UnknownPlaceholder { .. }));
    }

    #[test]
    fn duplicate_placeholder_across_sections_is_rejected() {
        let err = PromptTemplate::from_toml(
            "template_id = \"t\"\n[[sections]]\nname = \"a\"\ntext = \"{x}\"\n[[sections]]\nname = \"b\"\ntext = \"{x}\"\n",
        )
        .unwrap_err();
        assert!(matches!(err, GatewayError::Template(_)));
    }

    #[test]
    fn json_examples_are_not_placeholders() {
        let found = scan_placeholders("answer {\"label\": \"Correct\"} with {real_one} inside");
        assert_eq!(found, vec!["real_one".to_string()]);
    }

    #[test]
    fn all_builtin_templates_parse() {
        let registry = TemplateRegistry::builtin();
        assert_eq!(registry.template_ids().count(), 12);
    }
}

use std::collections::HashSet;
use std::path::Path;

use regex::Regex;

use super::AutoCategory;
use crate::error::{Error, Result};

const BUILTIN_RULES: &str = include_str!("../../data/rules.tsv");

#[derive(Debug, Clone)]
pub struct FilterRule {
    pub name: String,
    pub pattern: Regex,
    pub category: AutoCategory,
}

/// Ordered regex filters. The first matching rule decides the category.
///
/// File format: one rule per line, `name<TAB>regex<TAB>category`, where
/// category is `negative`, `neutral` or `excluding`. Blank lines and lines
/// starting with `#` are skipped.
#[derive(Debug, Clone, Default)]
pub struct FilterRuleSet {
    rules: Vec<FilterRule>,
}

impl FilterRuleSet {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_RULES).expect("builtin rules are valid")
    }

    pub fn new(rules: Vec<FilterRule>) -> Self {
        FilterRuleSet { rules }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        let mut names = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let invalid = |detail: String| Error::InvalidRule {
                line: line_no,
                detail,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let [name, pattern, category] = fields[..] else {
                return Err(invalid(format!(
                    "expected 3 tab-separated fields, found {}",
                    fields.len()
                )));
            };
            let name = name.trim();
            if name.is_empty() {
                return Err(invalid("empty rule name".into()));
            }
            if !names.insert(name.to_string()) {
                return Err(invalid(format!("duplicate rule name {name:?}")));
            }
            let category = match category.trim() {
                "negative" => AutoCategory::Negative,
                "neutral" => AutoCategory::Neutral,
                "excluding" => AutoCategory::Excluding,
                other => return Err(invalid(format!("bad category {other:?}"))),
            };
            let pattern = Regex::new(pattern).map_err(|e| invalid(e.to_string()))?;
            rules.push(FilterRule {
                name: name.to_string(),
                pattern,
                category,
            });
        }
        Ok(FilterRuleSet { rules })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn rules(&self) -> &[FilterRule] {
        &self.rules
    }

    /// The first rule matching `sentence`, if any.
    pub fn first_match(&self, sentence: &str) -> Option<&FilterRule> {
        self.rules.iter().find(|r| r.pattern.is_match(sentence))
    }

    pub fn apply(&self, sentence: &str) -> AutoCategory {
        self.first_match(sentence)
            .map_or(AutoCategory::Candidate, |r| r.category)
    }
}

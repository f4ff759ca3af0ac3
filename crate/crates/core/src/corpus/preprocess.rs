use fancy_regex::Regex;

use crate::error::{Error, Result};

/// One row of the preprocessing table: every match of `pattern` is replaced
/// by the literal `replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessingRule {
    pub name: String,
    pub pattern: String,
    pub replacement: String,
}

impl PreprocessingRule {
    pub fn new(name: &str, pattern: &str, replacement: &str) -> Self {
        Self {
            name: name.to_string(),
            pattern: pattern.to_string(),
            replacement: replacement.to_string(),
        }
    }
}

/// The general preprocessing rules, in table order.
///
/// Line-break runs become `". "` rather than a bare `"."` so that the
/// inserted period is followed by whitespace and the segmenter treats it as
/// a sentence boundary.
pub fn default_rules() -> Vec<PreprocessingRule> {
    vec![
        PreprocessingRule::new("emoji", r"[\x{10000}-\x{10ffff}]", "XX_EMOJI"),
        PreprocessingRule::new("line_break", r"([\r\n\t\f\v]+( )*)+", ". "),
        PreprocessingRule::new(
            "url_http",
            r"https?:\/\/([\w\-_]+\.)+([\w\-_]+)+(\/[^\s]+)*",
            "XX_URL",
        ),
        PreprocessingRule::new("email", r"[\SÑñ]+@([\SÑñ]+\.)+[\SÑñ]+", "XX_EMAIL"),
        PreprocessingRule::new(
            "url_domain",
            r"([\w\-_]+\.)+(com|net|org|co|us|ph|io)(\/[^\s]+)*",
            "XX_URL",
        ),
        PreprocessingRule::new("username", r"@[^\s.,!?]+", "XX_USERNAME"),
        PreprocessingRule::new("hashtag", r"#[a-zA-ZÑñ0-9_]+", "XX_HASHTAG"),
        PreprocessingRule::new("comma", r"(?<!,),(?!,)", "XX_COMMA"),
        PreprocessingRule::new("semicolon", r"(?<!;);(?!;)", "XX_SEMICOLON"),
        PreprocessingRule::new(
            "same_symbols",
            r"(?<!\S)([^a-zA-Z0-9\s])\1+(?!\S)",
            "XX_SEQSAMESYMBOLS",
        ),
        PreprocessingRule::new("mixed_symbols", r"[^a-zA-Z0-9\s]{2,}", "XX_SEQNOTSAMESYMBOLS"),
        PreprocessingRule::new("whitespace", r"\s\s+", " "),
    ]
}

/// Parses a rule override file.
///
/// One rule per line as `name<TAB>pattern<TAB>replacement`. Blank lines and
/// lines starting with `#` are skipped. The replacement is taken verbatim,
/// including any trailing spaces.
pub fn parse_rule_config(text: &str) -> Result<Vec<PreprocessingRule>> {
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, '\t').collect();
        if fields.len() != 3 {
            return Err(Error::RuleConfig {
                line: line_no,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::RuleConfig {
                line: line_no,
                reason: "empty rule name or pattern".to_string(),
            });
        }
        rules.push(PreprocessingRule::new(fields[0], fields[1], fields[2]));
    }
    Ok(rules)
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: PreprocessingRule,
    regex: Regex,
}

/// An ordered, compiled rule list. Each rule is applied globally before the
/// next one runs.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    rules: Vec<CompiledRule>,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Self::new(default_rules()).expect("default preprocessing rules compile")
    }
}

impl Preprocessor {
    pub fn new(rules: Vec<PreprocessingRule>) -> Result<Self> {
        let rules = rules
            .into_iter()
            .map(|rule| match Regex::new(&rule.pattern) {
                Ok(regex) => Ok(CompiledRule { rule, regex }),
                Err(e) => Err(Error::Regex {
                    rule: rule.name.clone(),
                    source: Box::new(e),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rules })
    }

    pub fn rules(&self) -> impl Iterator<Item = &PreprocessingRule> {
        self.rules.iter().map(|c| &c.rule)
    }

    pub fn apply(&self, raw: &str) -> Result<String> {
        let mut text = raw.to_string();
        for compiled in &self.rules {
            text = replace_all_literal(&compiled.regex, &text, &compiled.rule.replacement)
                .map_err(|e| Error::RegexRuntime {
                    rule: compiled.rule.name.clone(),
                    source: Box::new(e),
                })?;
        }
        Ok(text)
    }
}

fn replace_all_literal(
    regex: &Regex,
    text: &str,
    replacement: &str,
) -> std::result::Result<String, fancy_regex::Error> {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for m in regex.find_iter(text) {
        let m = m?;
        out.push_str(&text[last..m.start()]);
        out.push_str(replacement);
        last = m.end();
    }
    out.push_str(&text[last..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(text: &str) -> String {
        Preprocessor::default().apply(text).unwrap()
    }

    #[test]
    fn email_is_replaced() {
        assert_eq!(pp("email me at juan@abc.com"), "email me at XX_EMAIL");
    }

    #[test]
    fn clean_text_passes_through() {
        assert_eq!(pp("plain words only"), "plain words only");
    }

    #[test]
    fn mentions_hashtags_and_commas() {
        assert_eq!(
            pp("kita tayo , bukas #tara @ana"),
            "kita tayo XX_COMMA bukas XX_HASHTAG XX_USERNAME"
        );
    }

    #[test]
    fn line_break_becomes_period() {
        assert_eq!(pp("unang linya\n  pangalawa"), "unang linya. pangalawa");
    }

    #[test]
    fn default_rule_order_matches_table() {
        let names: Vec<_> = default_rules().into_iter().map(|r| r.name).collect();
        assert_eq!(
            names,
            [
                "emoji",
                "line_break",
                "url_http",
                "email",
                "url_domain",
                "username",
                "hashtag",
                "comma",
                "semicolon",
                "same_symbols",
                "mixed_symbols",
                "whitespace"
            ]
        );
    }

    #[test]
    fn bad_custom_pattern_is_reported() {
        let err = Preprocessor::new(vec![PreprocessingRule::new("broken", "(", "X")]).unwrap_err();
        assert!(matches!(err, Error::Regex { ref rule, .. } if rule == "broken"));
    }

    #[test]
    fn rule_config_parses_and_keeps_trailing_space() {
        let rules =
            parse_rule_config("# comment\n\nperiod\t\\.\t. \nx\ty\tZ\n").unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].pattern, r"\.");
        assert_eq!(rules[0].replacement, ". ");
        let err = parse_rule_config("only\ttwo").unwrap_err();
        assert!(matches!(err, Error::RuleConfig { line: 1, .. }));
    }

    #[test]
    fn custom_rules_apply_in_order() {
        let p = Preprocessor::new(vec![
            PreprocessingRule::new("a", "a", "b"),
            PreprocessingRule::new("b", "b", "c"),
        ])
        .unwrap();
        assert_eq!(p.apply("ab").unwrap(), "cc");
    }
}

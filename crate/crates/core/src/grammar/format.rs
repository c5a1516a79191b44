//! Line-oriented grammar files.
//!
//! ```text
//! # comment
//! @start C
//! @agr T {per, num}
//! @agr V.pp^M {num, gen}
//! @param delayed_expectation off
//! _ :: C +D =T
//! ha :: T {per.3, num.s} +D =V
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{
    AgrEntry, AgrFeature, AgrSet, Category, ExpectFeature, Grammar, LexicalItem, Linearization,
    MemoryPolicy, MemoryProbe, ParameterSet,
};
use crate::error::GrammarError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for GrammarWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

const EMPTY_FORMS: [&str; 2] = ["_", "ε"];

#[derive(Default)]
struct Switches {
    delayed_expectation: Option<bool>,
    memory: Option<MemoryPolicy>,
    linearization: Option<Linearization>,
    memory_probe: Option<MemoryProbe>,
}

pub fn load_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut start: Option<Category> = None;
    let mut agr: BTreeMap<Category, AgrEntry> = BTreeMap::new();
    let mut switches = Switches::default();
    let mut items = Vec::new();
    let mut item_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('@') {
            let (directive, args) = split_word(rest);
            match directive {
                "start" => {
                    if start.is_some() {
                        return Err(GrammarError::DuplicateParam {
                            line: line_no,
                            name: "start".into(),
                        });
                    }
                    start = Some(args.parse().map_err(|e: GrammarError| e.at_line(line_no))?);
                }
                "agr" => parse_agr(args, line_no, &mut agr)?,
                "param" => parse_param(args, line_no, &mut switches)?,
                other => return Err(syntax(line_no, format!("unknown directive `@{other}`"))),
            }
            continue;
        }
        items.push(parse_entry(line, line_no)?);
        item_lines.push(line_no);
    }

    let start = start.ok_or(GrammarError::MissingStart)?;
    let mut params = ParameterSet::new(start);
    params.agr = agr;
    params.delayed_expectation = switches.delayed_expectation.unwrap_or(false);
    params.memory_policy = switches.memory.unwrap_or_default();
    params.linearization = switches.linearization.unwrap_or_default();
    params.memory_probe = switches.memory_probe.unwrap_or_default();

    let governed: HashSet<&str> = params
        .agr
        .values()
        .flat_map(|e| e.attributes.iter().map(String::as_str))
        .collect();
    let mut warnings = Vec::new();
    for (item, &line) in items.iter().zip(&item_lines) {
        for attr in item.agr.attributes() {
            if !governed.contains(attr) {
                warnings.push(GrammarWarning {
                    line,
                    message: format!(
                        "agreement attribute `{attr}` is not governed by any @agr declaration"
                    ),
                });
            }
        }
    }

    let mut g = Grammar::new(items, params);
    g.warnings = warnings;
    Ok(g)
}

fn syntax(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        message: message.into(),
    }
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim()),
        None => (s, ""),
    }
}

/// Splits `head {a, b} tail` into its three parts.
fn split_braces(s: &str, line: usize) -> Result<(&str, Option<&str>, &str), GrammarError> {
    match s.find('{') {
        None => {
            if s.contains('}') {
                return Err(syntax(line, "unbalanced `}`"));
            }
            Ok((s, None, ""))
        }
        Some(open) => {
            let close = s[open..]
                .find('}')
                .map(|c| c + open)
                .ok_or_else(|| syntax(line, "unclosed `{`"))?;
            let tail = &s[close + 1..];
            if tail.contains('{') || tail.contains('}') {
                return Err(syntax(line, "only one `{...}` group is allowed"));
            }
            Ok((&s[..open], Some(&s[open + 1..close]), tail))
        }
    }
}

fn comma_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_agr(
    args: &str,
    line: usize,
    agr: &mut BTreeMap<Category, AgrEntry>,
) -> Result<(), GrammarError> {
    let (head, attrs, tail) = split_braces(args, line)?;
    let attrs = attrs.ok_or_else(|| syntax(line, "@agr needs an attribute list `{...}`"))?;
    if !tail.trim().is_empty() {
        return Err(syntax(line, "trailing text after @agr attribute list"));
    }
    let attributes: BTreeSet<String> = comma_list(attrs)
        .map(|a| {
            a.parse::<AgrFeature>()
                .map_err(|e| e.at_line(line))
                .and_then(|f| match f.value {
                    None => Ok(f.attribute),
                    Some(_) => Err(syntax(line, format!("@agr takes bare attributes, got `{a}`"))),
                })
        })
        .collect::<Result<_, _>>()?;
    if attributes.is_empty() {
        return Err(syntax(line, "@agr attribute list is empty"));
    }
    let mut any = false;
    for key in comma_list(head) {
        any = true;
        let (cat, moved_only) = match key.strip_suffix("^M") {
            Some(c) => (c, true),
            None => (key, false),
        };
        let cat: Category = cat.parse().map_err(|e: GrammarError| e.at_line(line))?;
        if agr.contains_key(&cat) {
            return Err(GrammarError::DuplicateParam {
                line,
                name: format!("@agr {cat}"),
            });
        }
        agr.insert(
            cat,
            AgrEntry {
                attributes: attributes.clone(),
                moved_only,
            },
        );
    }
    if !any {
        return Err(syntax(line, "@agr needs at least one category"));
    }
    Ok(())
}

fn parse_param(args: &str, line: usize, sw: &mut Switches) -> Result<(), GrammarError> {
    let (name, value) = split_word(args);
    let dup = || GrammarError::DuplicateParam {
        line,
        name: name.to_string(),
    };
    let bad = || syntax(line, format!("invalid value `{value}` for @param {name}"));
    match name {
        "delayed_expectation" => {
            let v = match value {
                "on" => true,
                "off" => false,
                _ => return Err(bad()),
            };
            if sw.delayed_expectation.replace(v).is_some() {
                return Err(dup());
            }
        }
        "memory" => {
            let v = match value {
                "fifo" => MemoryPolicy::Fifo,
                "lifo" => MemoryPolicy::Lifo,
                _ => return Err(bad()),
            };
            if sw.memory.replace(v).is_some() {
                return Err(dup());
            }
        }
        "linearization" => {
            let v = match value {
                "default" => Linearization::Default,
                "head_medial" => Linearization::HeadMedial,
                _ => return Err(bad()),
            };
            if sw.linearization.replace(v).is_some() {
                return Err(dup());
            }
        }
        "memory_probe" => {
            let v = match value {
                "prefix" => MemoryProbe::Prefix,
                "first_match" => MemoryProbe::FirstMatch,
                _ => return Err(bad()),
            };
            if sw.memory_probe.replace(v).is_some() {
                return Err(dup());
            }
        }
        _ => return Err(syntax(line, format!("unknown parameter `{name}`"))),
    }
    Ok(())
}

fn parse_entry(line: &str, line_no: usize) -> Result<LexicalItem, GrammarError> {
    let (phon, rest) = line
        .split_once("::")
        .ok_or_else(|| syntax(line_no, "expected `PHON :: CATEGORIES`"))?;
    let phon = phon.trim();
    if phon.is_empty() || phon.contains(char::is_whitespace) {
        return Err(syntax(line_no, format!("invalid surface form `{phon}`")));
    }
    let phon = if EMPTY_FORMS.contains(&phon) {
        None
    } else {
        Some(phon.to_string())
    };

    let (head, agr, tail) = split_braces(rest, line_no)?;
    // Without braces, expected categories run until the first `=`/`+` token.
    let (expected_part, expect_part) = match agr {
        Some(_) => (head, tail),
        None => match head.find(['=', '+']) {
            Some(i) => (&head[..i], &head[i..]),
            None => (head, ""),
        },
    };
    if agr.is_some() && head.contains(['=', '+']) {
        return Err(syntax(line_no, "expectations must follow the agreement set"));
    }

    let expected: Vec<Category> = expected_part
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e: GrammarError| e.at_line(line_no)))
        .collect::<Result<_, _>>()?;
    if expected.is_empty() {
        return Err(syntax(line_no, "an item needs at least one expected category"));
    }

    let agr = match agr {
        Some(body) => {
            let feats = comma_list(body)
                .map(|f| f.parse::<AgrFeature>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.at_line(line_no))?;
            AgrSet::from_features(feats).map_err(|e| e.at_line(line_no))?
        }
        None => AgrSet::new(),
    };

    let expect: Vec<ExpectFeature> = expect_part
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e: GrammarError| e.at_line(line_no)))
        .collect::<Result<_, _>>()?;

    Ok(LexicalItem::new(phon, expected, expect, agr))
}

pub(super) fn write_grammar(g: &Grammar, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = &g.params;
    writeln!(f, "@start {}", p.start)?;
    writeln!(
        f,
        "@param delayed_expectation {}",
        if p.delayed_expectation { "on" } else { "off" }
    )?;
    writeln!(
        f,
        "@param memory {}",
        match p.memory_policy {
            MemoryPolicy::Fifo => "fifo",
            MemoryPolicy::Lifo => "lifo",
        }
    )?;
    writeln!(
        f,
        "@param linearization {}",
        match p.linearization {
            Linearization::Default => "default",
            Linearization::HeadMedial => "head_medial",
        }
    )?;
    writeln!(
        f,
        "@param memory_probe {}",
        match p.memory_probe {
            MemoryProbe::Prefix => "prefix",
            MemoryProbe::FirstMatch => "first_match",
        }
    )?;
    for (cat, entry) in &p.agr {
        let attrs: Vec<&str> = entry.attributes.iter().map(String::as_str).collect();
        writeln!(
            f,
            "@agr {}{} {{{}}}",
            cat,
            if entry.moved_only { "^M" } else { "" },
            attrs.join(", ")
        )?;
    }
    for item in g.items() {
        let expected: Vec<String> = item.expected.iter().map(|c| c.to_string()).collect();
        write!(f, "{} :: {}", item.form(), expected.join(", "))?;
        if !item.agr.is_empty() {
            write!(f, " {}", item.agr)?;
        }
        for e in &item.expect {
            write!(f, " {e}")?;
        }
        writeln!(f)?;
    }
    Ok(())
}

//! Instance files.
//!
//! ```toml
//! name = "m0"
//! field = 5                 # prime, at least 5
//! ground = "d1 d2"          # labels of A
//! poset = "p r"             # elements, then relations such as `r<p`
//! family = """
//! p: d1
//! r: d2
//! """
//! policy = "exhaustive"     # optional default for `verify`
//! ```
//!
//! Instead of `ground` and `family`, `generator = "sliding:2"` or
//! `"disjoint:2"` builds a family of windows or disjoint blocks.

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::linmodel::{Field, LinError};
use crate::monoid::{MonoidError, MonoidInstance};
use crate::poset::{build_sperner, parse_poset, parse_sperner, PosetError, SpernerSpec};
use crate::report::Policy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, field `{field}`: {message}")]
    Field {
        field: &'static str,
        line: usize,
        message: String,
    },
    #[error("field `{0}` is required")]
    Missing(&'static str),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    name: Option<String>,
    field: Option<Spanned<u32>>,
    ground: Option<Spanned<String>>,
    poset: Option<Spanned<String>>,
    family: Option<Spanned<String>>,
    generator: Option<Spanned<String>>,
    policy: Option<Spanned<String>>,
}

/// A parsed instance file.
#[derive(Debug, Clone)]
pub struct InstanceConfig {
    pub name: String,
    pub instance: MonoidInstance,
    pub policy: Option<Policy>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// File line of line `inner` (1-based) inside the string value at `span`.
fn value_line(text: &str, span: &Range<usize>, inner: usize) -> usize {
    let rest = &text[span.start.min(text.len())..];
    let skip = usize::from(rest.starts_with("\"\"\"\n") || rest.starts_with("'''\n"));
    line_of(text, span.start) + skip + inner.saturating_sub(1)
}

pub fn parse_instance(text: &str) -> Result<InstanceConfig, ConfigError> {
    let raw: RawInstance = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let field_err = |field: &'static str, span: &Range<usize>, inner: usize, message: String| ConfigError::Field {
        field,
        line: value_line(text, span, inner),
        message,
    };
    // errors inside a multi-line value point at the offending inner line
    let poset_err = |field: &'static str, span: &Range<usize>, e: PosetError| match e {
        PosetError::Malformed { line, message } => field_err(field, span, line, message),
        other => field_err(field, span, 1, other.to_string()),
    };

    let field = match &raw.field {
        Some(f) => Field::new(*f.get_ref()).map_err(|e| field_err("field", &f.span(), 1, e.to_string()))?,
        None => Field::new(5).expect("5 is prime"),
    };
    let poset_raw = raw.poset.as_ref().ok_or(ConfigError::Missing("poset"))?;
    let poset = parse_poset(poset_raw.get_ref()).map_err(|e| poset_err("poset", &poset_raw.span(), e))?;

    let (spec, ground, spec_span, spec_field) = match (&raw.generator, &raw.family) {
        (Some(_), Some(f)) => {
            return Err(field_err(
                "family",
                &f.span(),
                1,
                "give either `family` or `generator`, not both".into(),
            ))
        }
        (Some(g), None) => {
            let spec = parse_generator(g.get_ref()).ok_or_else(|| {
                field_err(
                    "generator",
                    &g.span(),
                    1,
                    format!("expected `sliding:<m>` or `disjoint:<m>`, found `{}`", g.get_ref()),
                )
            })?;
            (spec, Vec::new(), g.span(), "generator")
        }
        (None, Some(f)) => {
            let ground = raw.ground.as_ref().ok_or(ConfigError::Missing("ground"))?;
            let labels: Vec<String> = ground.get_ref().split_whitespace().map(str::to_string).collect();
            let spec = parse_sperner(f.get_ref()).map_err(|e| poset_err("family", &f.span(), e))?;
            (spec, labels, f.span(), "family")
        }
        (None, None) => return Err(ConfigError::Missing("family")),
    };
    let family = build_sperner(&ground, &poset, &spec).map_err(|e| poset_err(spec_field, &spec_span, e))?;

    let policy = raw
        .policy
        .as_ref()
        .map(|p| {
            p.get_ref()
                .parse::<Policy>()
                .map_err(|e| field_err("policy", &p.span(), 1, e.to_string()))
        })
        .transpose()?;

    let instance = MonoidInstance::new(field, poset, family).map_err(|e| match e {
        MonoidError::Lin(LinError::DuplicateLabel(l)) => match &raw.ground {
            Some(g) => field_err("ground", &g.span(), 1, format!("duplicate label `{l}`")),
            None => field_err(spec_field, &spec_span, 1, format!("duplicate label `{l}`")),
        },
        other => field_err(spec_field, &spec_span, 1, other.to_string()),
    })?;
    Ok(InstanceConfig {
        name: raw.name.unwrap_or_else(|| "instance".to_string()),
        instance,
        policy,
    })
}

fn parse_generator(text: &str) -> Option<SpernerSpec> {
    let (kind, m) = text.trim().split_once(':')?;
    let m: usize = m.trim().parse().ok().filter(|&m| m > 0)?;
    match kind.trim() {
        "sliding" => Some(SpernerSpec::Sliding { m }),
        "disjoint" => Some(SpernerSpec::Disjoint { m }),
        _ => None,
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_instance(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M0: &str = r#"name = "m0"
field = 5
ground = "d1 d2"
poset = "p r"
family = """
p: d1
r: d2
"""
policy = "exhaustive"
"#;

    #[test]
    fn parses_m0() {
        let c = parse_instance(M0).unwrap();
        assert_eq!(c.name, "m0");
        assert_eq!(c.instance.monoid_size(), 11);
        assert_eq!(c.policy, Some(Policy::Exhaustive));
    }

    #[test]
    fn generated_family() {
        let c = parse_instance("poset = \"x y z\"\ngenerator = \"disjoint:1\"\n").unwrap();
        assert_eq!(c.instance.basis().a_len(), 3);
        assert!(!c.instance.singletons_small());
    }

    #[test]
    fn diagnostics_name_the_line() {
        let bad = M0.replace("r: d2", "r d2");
        match parse_instance(&bad) {
            Err(ConfigError::Field {
                field: "family",
                line: 7,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        let bad = M0.replace("field = 5", "field = 4");
        assert!(matches!(
            parse_instance(&bad),
            Err(ConfigError::Field {
                field: "field",
                line: 2,
                ..
            })
        ));
        let bad = M0.replace("name = \"m0\"", "name = ");
        assert!(matches!(parse_instance(&bad), Err(ConfigError::Syntax { line: 1, .. })));
        let bad = M0.replace("r: d2", "r: d1 d2");
        assert!(matches!(
            parse_instance(&bad),
            Err(ConfigError::Field { field: "family", .. })
        ));
        let bad = M0.replace("poset = \"p r\"", "poset = \"p r\\nr<p<\"");
        assert!(matches!(
            parse_instance(&bad),
            Err(ConfigError::Field { field: "poset", .. })
        ));
        assert!(matches!(
            parse_instance("poset = \"p\"\nextra = 1\n"),
            Err(ConfigError::Syntax { .. })
        ));
        assert_eq!(
            parse_instance("field = 5\n").unwrap_err(),
            ConfigError::Missing("poset")
        );
    }
}

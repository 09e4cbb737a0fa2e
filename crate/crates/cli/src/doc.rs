//! Presentation documents: the line-oriented text format read by every
//! subcommand that takes a file.
//!
//! A document is a `kind = ...` line followed by `key = value` entries, one
//! per line. `#` starts a comment. Surface specs may also put several
//! `key=value` pairs on one line (`genus=0 punctures=0 group=2`).
//!
//! | kind | keys |
//! |------|------|
//! | `cdga` | `generators = x:2, y:3`, `d(y) = x^2`, optional `truncation`, `base` |
//! | `lie` | `generators = a, b` with `relator = [a,b]`, or `basis = x:1, a:2` with `bracket(x, y) = a` and optional `cap` |
//! | `quadratic` | `generators = w12, w13`, `relation = w12*w13` |
//! | `surface-spec` | `genus`, `punctures`, `group`, optional `orientation = preserving/reversing` |
//! | `poincare-fixture` | `polynomial = 1 + 3t + 2t^2` |
//! | `cohomology` | `basis = a:2, b:3`, `product(a, b) = c` |

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use rht_core::catalog::{QuadraticPresentation, SurfaceSpec};
use rht_core::exactla::SparseVec;
use rht_core::gca::{GcaError, GcaPresentation, Generator, DEFAULT_TRUNCATION};
use rht_core::gradedlie::{LieError, LieGradedData, LiePresentation};
use rht_core::sullivan::CohomologyTable;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Cdga,
    Lie,
    Quadratic,
    SurfaceSpec,
    Poincare,
    Cohomology,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Cdga,
        Kind::Lie,
        Kind::Quadratic,
        Kind::SurfaceSpec,
        Kind::Poincare,
        Kind::Cohomology,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Cdga => "cdga",
            Kind::Lie => "lie",
            Kind::Quadratic => "quadratic",
            Kind::SurfaceSpec => "surface-spec",
            Kind::Poincare => "poincare-fixture",
            Kind::Cohomology => "cohomology",
        }
    }

    /// Canonical names, plus `poincare` for `poincare-fixture`.
    pub fn from_name(name: &str) -> Option<Kind> {
        if name == "poincare" {
            return Some(Kind::Poincare);
        }
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// `.cdga`, `.lie`, `.quad`, `.surface`, `.poincare`, `.coh`.
    pub fn from_extension(path: &Path) -> Option<Kind> {
        match path.extension()?.to_str()? {
            "cdga" => Some(Kind::Cdga),
            "lie" => Some(Kind::Lie),
            "quad" => Some(Kind::Quadratic),
            "surface" => Some(Kind::SurfaceSpec),
            "poincare" => Some(Kind::Poincare),
            "coh" => Some(Kind::Cohomology),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> DocError {
    DocError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn semantic(line: usize, message: impl Into<String>) -> DocError {
    DocError::Semantic {
        line,
        message: message.into(),
    }
}

/// One `key = value` entry. Positions are 1-based and ignored by equality.
#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// Column of the first character of `value`.
    pub column: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.value == other.value
    }
}

impl Eq for Entry {}

impl Entry {
    fn value_error(&self, offset_chars: usize, message: impl Into<String>) -> DocError {
        syntax(self.line, self.column + offset_chars, message)
    }

    /// `head(a, b)` split into `head` and trimmed arguments.
    fn call(&self) -> Option<(&str, Vec<&str>)> {
        let open = self.key.find('(')?;
        let inner = self.key[open + 1..].strip_suffix(')')?;
        Some((self.key[..open].trim(), inner.split(',').map(str::trim).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub kind: Kind,
    pub entries: Vec<Entry>,
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn char_offset(s: &str, byte: usize) -> usize {
    s[..byte.min(s.len())].chars().count()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Document {
    /// Parses `text`. The kind comes from a leading `kind = ...` line, or
    /// from `hint` when that line is absent.
    pub fn parse(text: &str, hint: Option<Kind>) -> Result<Document, DocError> {
        let mut kind: Option<Kind> = None;
        let mut entries = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            if kind.is_none() {
                if let Some((key, value)) = content.split_once('=') {
                    if key.trim() == "kind" {
                        let name = value.trim();
                        let column = char_offset(content, content.find('=').unwrap_or(0) + 1)
                            + value.chars().take_while(|c| c.is_whitespace()).count()
                            + 1;
                        kind = Some(Kind::from_name(name).ok_or_else(|| {
                            syntax(line, column, format!("unknown document kind `{name}`"))
                        })?);
                        continue;
                    }
                }
                kind = Some(hint.ok_or_else(|| syntax(line, 1, "expected a `kind = ...` line"))?);
            }
            if kind == Some(Kind::SurfaceSpec) {
                entries.extend(split_pairs(content, line)?);
            } else {
                entries.push(split_entry(content, line)?);
            }
        }
        let kind = kind.or(hint).ok_or_else(|| DocError::Invalid("empty document".into()))?;
        Ok(Document { kind, entries })
    }

    pub fn from_file(path: &Path) -> Result<Document, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Document::parse(&text, Kind::from_extension(path)).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Canonical text. Re-parsing it gives an equal document; compared with
    /// the source only whitespace and comments change.
    pub fn render(&self) -> String {
        let mut out = format!("kind = {}\n", self.kind);
        for e in &self.entries {
            out.push_str(&format!("{} = {}\n", e.key, e.value));
        }
        out
    }

    fn expect_kind(&self, kind: Kind) -> Result<(), DocError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(DocError::Invalid(format!("expected a {kind} document, found {}", self.kind)))
        }
    }

    fn single(&self, key: &str) -> Result<Option<&Entry>, DocError> {
        let mut found = self.entries.iter().filter(|e| e.key == key);
        let first = found.next();
        if let Some(dup) = found.next() {
            return Err(semantic(dup.line, format!("`{key}` given twice")));
        }
        Ok(first)
    }

    fn required(&self, key: &str) -> Result<&Entry, DocError> {
        self.single(key)?
            .ok_or_else(|| DocError::Invalid(format!("{} document needs a `{key}` entry", self.kind)))
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), DocError> {
        for e in &self.entries {
            let head = e.call().map_or(e.key.as_str(), |(h, _)| h);
            if !allowed.contains(&head) {
                return Err(semantic(e.line, format!("unknown key `{}` in {} document", e.key, self.kind)));
            }
        }
        Ok(())
    }

    pub fn cdga(&self) -> Result<CdgaDoc, DocError> {
        self.expect_kind(Kind::Cdga)?;
        self.reject_unknown(&["generators", "truncation", "d", "base"])?;
        let gens_entry = self.required("generators")?;
        let gens = graded_list(gens_entry)?;
        let top = gens.iter().map(|g| g.1).max().unwrap_or(1);
        let truncation = match self.single("truncation")? {
            Some(e) => parse_number(e)?,
            None => DEFAULT_TRUNCATION.max(top + 1),
        };
        let mut p = GcaPresentation::new(
            gens.iter().map(|(n, d)| Generator::new(n.clone(), *d)).collect(),
            truncation,
        )
        .map_err(|e| semantic(gens_entry.line, e.to_string()))?;
        for e in &self.entries {
            let Some(("d", args)) = e.call() else { continue };
            let [name] = args[..] else {
                return Err(semantic(e.line, "`d(...)` takes one generator"));
            };
            let image = p.parse_element(&e.value).map_err(|err| gca_error(e, err))?;
            p.set_differential(name, image).map_err(|err| semantic(e.line, err.to_string()))?;
        }
        p.validate().map_err(|e| DocError::Invalid(e.to_string()))?;
        let base = match self.single("base")? {
            Some(e) => Some(name_list(e)?),
            None => None,
        };
        Ok(CdgaDoc { presentation: p, base })
    }

    pub fn lie(&self) -> Result<LieDoc, DocError> {
        self.expect_kind(Kind::Lie)?;
        self.reject_unknown(&["generators", "relator", "basis", "bracket", "cap"])?;
        match (self.single("generators")?, self.single("basis")?) {
            (Some(g), None) => {
                if let Some(e) = self.entries.iter().find(|e| e.key != "generators" && e.key != "relator") {
                    return Err(semantic(e.line, format!("`{}` does not belong in a presented Lie document", e.key)));
                }
                let mut p = LiePresentation::new(name_list(g)?, Vec::new())
                    .map_err(|err| semantic(g.line, err.to_string()))?;
                for e in self.entries.iter().filter(|e| e.key == "relator") {
                    let r = p.parse_relator(&e.value).map_err(|err| match err {
                        LieError::Parse { offset, message } => e.value_error(char_offset(&e.value, offset), message),
                        other => semantic(e.line, other.to_string()),
                    })?;
                    p = p.with_relator(r).map_err(|err| match err {
                        LieError::InhomogeneousRelator { .. } => {
                            semantic(e.line, format!("relator `{}` is not homogeneous", e.value))
                        }
                        other => semantic(e.line, other.to_string()),
                    })?;
                }
                Ok(LieDoc::Presented(p))
            }
            (None, Some(b)) => {
                if let Some(e) = self.entries.iter().find(|e| e.key == "relator") {
                    return Err(semantic(e.line, "relators need `generators`, not `basis`"));
                }
                let basis = graded_list(b)?;
                let top = basis.iter().map(|x| x.1).max().unwrap_or(1);
                let cap = match self.single("cap")? {
                    Some(e) => parse_number(e)?,
                    None => top,
                };
                let labels: Vec<String> = basis.iter().map(|x| x.0.clone()).collect();
                let degrees: Vec<u32> = basis.iter().map(|x| x.1).collect();
                let linear = LinearParser::new(&basis).map_err(|err| semantic(b.line, err.to_string()))?;
                let mut table = Vec::new();
                for e in &self.entries {
                    let Some(("bracket", args)) = e.call() else { continue };
                    let [x, y] = args[..] else {
                        return Err(semantic(e.line, "`bracket(...)` takes two basis elements"));
                    };
                    table.push(((index_in(&labels, x, e)?, index_in(&labels, y, e)?), linear.parse(e)?));
                }
                let l = LieGradedData::new(labels, degrees, cap, table).map_err(|e| DocError::Invalid(e.to_string()))?;
                Ok(LieDoc::Table(l))
            }
            (Some(g), Some(_)) => Err(semantic(g.line, "use either `generators` or `basis`, not both")),
            (None, None) => Err(DocError::Invalid("lie document needs `generators` or `basis`".into())),
        }
    }

    pub fn quadratic(&self) -> Result<QuadraticPresentation, DocError> {
        self.expect_kind(Kind::Quadratic)?;
        self.reject_unknown(&["generators", "relation"])?;
        let g = self.required("generators")?;
        let names = name_list(g)?;
        let p = GcaPresentation::new(names.iter().map(|n| Generator::new(n.clone(), 1)).collect(), 3)
            .map_err(|e| semantic(g.line, e.to_string()))?;
        let position = |i: usize| names.iter().position(|n| *n == p.generator(i).name).expect("same names");
        let mut relations = Vec::new();
        for e in self.entries.iter().filter(|e| e.key == "relation") {
            let element = p.parse_element(&e.value).map_err(|err| gca_error(e, err))?;
            let mut terms = Vec::new();
            for (m, c) in element.terms() {
                let factors: Vec<usize> = (0..names.len()).filter(|&i| m.exponent(i) > 0).map(position).collect();
                match factors[..] {
                    [a, b] if a < b => terms.push(((a, b), c.clone())),
                    [a, b] => terms.push(((b, a), -c.clone())),
                    _ => return Err(semantic(e.line, format!("relation `{}` is not quadratic", e.value))),
                }
            }
            relations.push(terms);
        }
        QuadraticPresentation::new(names, relations).map_err(|e| DocError::Invalid(e.to_string()))
    }

    pub fn surface(&self) -> Result<SurfaceSpec, DocError> {
        self.expect_kind(Kind::SurfaceSpec)?;
        self.reject_unknown(&["genus", "punctures", "group", "orientation"])?;
        let genus = parse_number(self.required("genus")?)?;
        let punctures = parse_number(self.required("punctures")?)?;
        let group = parse_number(self.required("group")?)?;
        let mut spec = SurfaceSpec::new(genus, punctures, group);
        if let Some(e) = self.single("orientation")? {
            spec = spec.with_orientation(match e.value.as_str() {
                "preserving" => true,
                "reversing" => false,
                _ => return Err(e.value_error(0, "orientation must be `preserving` or `reversing`")),
            });
        }
        spec.validate().map_err(|e| DocError::Invalid(e.to_string()))?;
        Ok(spec)
    }

    /// Coefficients of the Poincaré polynomial, constant term first.
    pub fn poincare(&self) -> Result<Vec<BigInt>, DocError> {
        self.expect_kind(Kind::Poincare)?;
        self.reject_unknown(&["polynomial"])?;
        parse_polynomial(self.required("polynomial")?)
    }

    pub fn cohomology(&self) -> Result<CohomologyTable, DocError> {
        self.expect_kind(Kind::Cohomology)?;
        self.reject_unknown(&["basis", "product"])?;
        let b = self.required("basis")?;
        let basis = graded_list(b)?;
        let labels: Vec<String> = basis.iter().map(|x| x.0.clone()).collect();
        let linear = LinearParser::new(&basis).map_err(|err| semantic(b.line, err.to_string()))?;
        let mut products = Vec::new();
        for e in &self.entries {
            let Some(("product", args)) = e.call() else { continue };
            let [x, y] = args[..] else {
                return Err(semantic(e.line, "`product(...)` takes two basis elements"));
            };
            products.push(((index_in(&labels, x, e)?, index_in(&labels, y, e)?), linear.parse(e)?));
        }
        CohomologyTable::new(basis, products).map_err(|e| DocError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct CdgaDoc {
    pub presentation: GcaPresentation,
    /// Base generators, when the document describes a relative model.
    pub base: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub enum LieDoc {
    Presented(LiePresentation),
    Table(LieGradedData),
}

fn split_entry(content: &str, line: usize) -> Result<Entry, DocError> {
    let Some(eq) = content.find('=') else {
        return Err(syntax(line, content.trim_end().chars().count() + 1, "expected `=`"));
    };
    let key = collapse(&content[..eq]);
    if key.is_empty() {
        return Err(syntax(line, char_offset(content, eq) + 1, "missing key before `=`"));
    }
    let rest = &content[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let value = collapse(rest);
    let column = char_offset(content, eq + 1 + lead) + 1;
    if value.is_empty() {
        return Err(syntax(line, column, format!("missing value for `{key}`")));
    }
    if key.contains('(') && !key.ends_with(')') {
        return Err(syntax(line, 1, format!("unbalanced parentheses in `{key}`")));
    }
    Ok(Entry {
        key,
        value,
        line,
        column,
    })
}

/// `genus=0 punctures=0 group=2`, spaces around `=` allowed.
fn split_pairs(content: &str, line: usize) -> Result<Vec<Entry>, DocError> {
    let chars: Vec<char> = content.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let skip = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip(&mut i);
        if i == chars.len() {
            return Ok(out);
        }
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
            i += 1;
        }
        if i == start {
            return Err(syntax(line, i + 1, format!("unexpected `{}`", chars[i])));
        }
        let key: String = chars[start..i].iter().collect();
        skip(&mut i);
        if i == chars.len() || chars[i] != '=' {
            return Err(syntax(line, i + 1, format!("expected `=` after `{key}`")));
        }
        i += 1;
        skip(&mut i);
        let vstart = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        if i == vstart {
            return Err(syntax(line, i + 1, format!("missing value for `{key}`")));
        }
        out.push(Entry {
            key,
            value: chars[vstart..i].iter().collect(),
            line,
            column: vstart + 1,
        });
    }
}

/// Comma-separated items with the character offset of each within the value.
fn items(e: &Entry) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in e.value.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        out.push((char_offset(&e.value, start + lead), piece.trim()));
        start += piece.len() + 1;
    }
    out
}

fn name_list(e: &Entry) -> Result<Vec<String>, DocError> {
    items(e)
        .into_iter()
        .map(|(at, name)| {
            if is_identifier(name) {
                Ok(name.to_string())
            } else {
                Err(e.value_error(at, format!("`{name}` is not a valid name")))
            }
        })
        .collect()
}

fn graded_list(e: &Entry) -> Result<Vec<(String, u32)>, DocError> {
    items(e)
        .into_iter()
        .map(|(at, item)| {
            let Some((name, degree)) = item.split_once(':') else {
                return Err(e.value_error(at, format!("expected `name:degree`, found `{item}`")));
            };
            let name = name.trim();
            if !is_identifier(name) {
                return Err(e.value_error(at, format!("`{name}` is not a valid name")));
            }
            let degree_at = at + item.find(':').map_or(0, |k| char_offset(item, k + 1));
            let degree = degree
                .trim()
                .parse::<u32>()
                .map_err(|_| e.value_error(degree_at, format!("`{}` is not a degree", degree.trim())))?;
            Ok((name.to_string(), degree))
        })
        .collect()
}

fn parse_number(e: &Entry) -> Result<u32, DocError> {
    e.value
        .parse()
        .map_err(|_| e.value_error(0, format!("`{}` is not a nonnegative integer", e.value)))
}

fn index_in(labels: &[String], name: &str, e: &Entry) -> Result<usize, DocError> {
    labels
        .iter()
        .position(|l| l == name)
        .ok_or_else(|| semantic(e.line, format!("unknown basis element `{name}`")))
}

fn gca_error(e: &Entry, err: GcaError) -> DocError {
    match err {
        GcaError::Parse { offset, message } => e.value_error(char_offset(&e.value, offset), message),
        other => semantic(e.line, other.to_string()),
    }
}

/// Reads linear combinations of basis labels through the expression parser
/// of a free algebra on those labels.
struct LinearParser {
    algebra: GcaPresentation,
    labels: Vec<String>,
}

impl LinearParser {
    fn new(basis: &[(String, u32)]) -> Result<Self, GcaError> {
        let top = basis.iter().map(|b| b.1).max().unwrap_or(1);
        let algebra = GcaPresentation::new(basis.iter().map(|(n, d)| Generator::new(n.clone(), *d)).collect(), top + 1)?;
        Ok(LinearParser {
            algebra,
            labels: basis.iter().map(|b| b.0.clone()).collect(),
        })
    }

    fn parse(&self, e: &Entry) -> Result<SparseVec, DocError> {
        if e.value == "0" {
            return Ok(SparseVec::new());
        }
        let element = self.algebra.parse_element(&e.value).map_err(|err| gca_error(e, err))?;
        let mut v = SparseVec::new();
        for (m, c) in element.terms() {
            let Some(g) = m.as_generator() else {
                return Err(semantic(e.line, format!("`{}` is not a linear combination of basis elements", e.value)));
            };
            let name = &self.algebra.generator(g).name;
            let k = self.labels.iter().position(|l| l == name).expect("same labels");
            v.insert(k, c.clone());
        }
        Ok(v)
    }
}

/// `1 + 3t + 2t^2`, `1 + t^3`, `2*t`; integer coefficients only.
fn parse_polynomial(e: &Entry) -> Result<Vec<BigInt>, DocError> {
    let s: Vec<char> = e.value.chars().collect();
    let mut i = 0;
    let mut coeffs: Vec<BigInt> = Vec::new();
    let skip = |i: &mut usize| {
        while *i < s.len() && s[*i] == ' ' {
            *i += 1;
        }
    };
    let mut first = true;
    loop {
        skip(&mut i);
        if i == s.len() {
            if first {
                return Err(e.value_error(i, "empty polynomial"));
            }
            break;
        }
        let mut sign = BigInt::from(1);
        if !first || s[i] == '-' || s[i] == '+' {
            match s[i] {
                '+' => {}
                '-' => sign = -sign,
                c => return Err(e.value_error(i, format!("expected `+` or `-`, found `{c}`"))),
            }
            i += 1;
            skip(&mut i);
        }
        first = false;
        let start = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        let coefficient = if i > start {
            s[start..i].iter().collect::<String>().parse::<BigInt>().expect("digits")
        } else {
            BigInt::from(1)
        };
        skip(&mut i);
        if i < s.len() && s[i] == '*' {
            i += 1;
            skip(&mut i);
            if i == s.len() || s[i] != 't' {
                return Err(e.value_error(i, "expected `t` after `*`"));
            }
        }
        let mut power = 0usize;
        if i < s.len() && s[i] == 't' {
            i += 1;
            power = 1;
            skip(&mut i);
            if i < s.len() && s[i] == '^' {
                i += 1;
                skip(&mut i);
                let pstart = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                if i == pstart {
                    return Err(e.value_error(i, "expected an exponent after `^`"));
                }
                power = s[pstart..i].iter().collect::<String>().parse().map_err(|_| e.value_error(pstart, "exponent too large"))?;
            }
        } else if i == start {
            let found = s.get(i).map_or("end of input".to_string(), |c| format!("`{c}`"));
            return Err(e.value_error(i, format!("expected a coefficient or `t`, found {found}")));
        }
        if power > 64 {
            return Err(e.value_error(start, "degree above 64"));
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += sign * coefficient;
    }
    Ok(coeffs)
}

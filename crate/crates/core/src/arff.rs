//! Reader and writer for a subset of the ARFF attribute-relation format, plus
//! a CSV ingest path that reuses the same row conversion.
//!
//! Supported: `@relation`, `@attribute <name> {v1,...}`,
//! `@attribute <name> numeric|real|integer`, `@data`, `%` comments and
//! quoted names or values. Sparse rows and string/date/relational attributes
//! are rejected.

use std::fmt;

use crate::data::{AttributeKind, AttributeSpec, Dataset, Instance, Schema, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned parser message. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Warning,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, sev, self.message)
    }
}

/// All diagnostics from a failed parse. Contains at least one error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseDiagnostic>);

impl ParseErrors {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Error)
    }
}

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

struct Field {
    text: String,
    quoted: bool,
    column: usize,
}

/// Cursor over one line. Byte offsets double as columns for ASCII input.
struct Cursor<'a> {
    line: &'a str,
    pos: usize,
    comments: bool,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str, comments: bool) -> Self {
        Cursor {
            line,
            pos: 0,
            comments,
        }
    }

    fn column(&self) -> usize {
        self.line[..self.pos].chars().count() + 1
    }

    fn peek(&self) -> Option<char> {
        self.line[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn at_end(&self) -> bool {
        match self.peek() {
            None => true,
            Some('%') => self.comments,
            Some(_) => false,
        }
    }

    /// Reads a quoted string; the cursor sits on the opening quote.
    fn quoted(&mut self) -> Result<String, String> {
        let q = self.bump().expect("caller checked quote");
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated quoted value".to_string()),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('r') => out.push('\r'),
                    Some('t') => out.push('\t'),
                    Some(c) => out.push(c),
                    None => return Err("dangling escape at end of line".into()),
                },
                Some(c) if c == q => {
                    if q == '"' && self.peek() == Some('"') {
                        self.bump();
                        out.push('"');
                    } else {
                        return Ok(out);
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// Reads a name: quoted, or a run of characters up to whitespace or a
    /// structural character.
    fn name(&mut self) -> Result<Field, String> {
        self.skip_ws();
        let column = self.column();
        match self.peek() {
            Some('\'') | Some('"') => Ok(Field {
                text: self.quoted()?,
                quoted: true,
                column,
            }),
            _ => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '{' | '}' | ',') || (c == '%' && self.comments) {
                        break;
                    }
                    self.bump();
                }
                if self.pos == start {
                    return Err("expected a name".into());
                }
                Ok(Field {
                    text: self.line[start..self.pos].to_string(),
                    quoted: false,
                    column,
                })
            }
        }
    }

    /// Splits the remainder of the line into comma-separated fields, stopping
    /// at `close` when given (used for `{...}` value lists).
    fn fields(&mut self, close: Option<char>) -> Result<Vec<Field>, (usize, String)> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let column = self.column();
            let field = match self.peek() {
                Some('\'') | Some('"') => {
                    let text = self.quoted().map_err(|m| (column, m))?;
                    Field {
                        text,
                        quoted: true,
                        column,
                    }
                }
                _ => {
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c == ',' || Some(c) == close || (c == '%' && self.comments) {
                            break;
                        }
                        self.bump();
                    }
                    let text = self.line[start..self.pos].trim_end().to_string();
                    if text.is_empty() {
                        return Err((column, "empty value".into()));
                    }
                    Field {
                        text,
                        quoted: false,
                        column,
                    }
                }
            };
            out.push(field);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(c) if Some(c) == close => return Ok(out),
                _ if self.at_end() => {
                    return match close {
                        Some(c) => Err((self.column(), format!("expected '{c}'"))),
                        None => Ok(out),
                    };
                }
                Some(c) => return Err((self.column(), format!("unexpected character '{c}'"))),
                None => unreachable!(),
            }
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l))
}

fn is_blank_or_comment(line: &str, comments: bool) -> bool {
    let t = line.trim_start();
    t.is_empty() || (comments && t.starts_with('%'))
}

/// Splits a leading `@keyword` off a header line.
fn keyword(line: &str) -> Option<(String, usize)> {
    let t = line.trim_start();
    let lead = line.len() - t.len();
    let rest = t.strip_prefix('@')?;
    let end = rest.find(|c: char| c.is_whitespace()).unwrap_or(rest.len());
    Some((rest[..end].to_ascii_lowercase(), lead + 1 + end))
}

/// Parses ARFF text; the last declared attribute is the class.
pub fn parse_arff(text: &str) -> Result<Dataset, ParseErrors> {
    parse_arff_with_class(text, None)
}

/// Parses ARFF text with an explicit class attribute (the last one when `None`).
pub fn parse_arff_with_class(text: &str, class: Option<&str>) -> Result<Dataset, ParseErrors> {
    let mut diags = Vec::new();
    let mut attributes: Vec<AttributeSpec> = Vec::new();
    let mut attr_lines: Vec<usize> = Vec::new();
    let mut saw_relation = false;
    let mut data_start = None;
    let mut last_line = 0;

    for (lineno, line) in lines(text) {
        last_line = lineno;
        if is_blank_or_comment(line, true) {
            continue;
        }
        let Some((kw, after)) = keyword(line) else {
            let col = line.len() - line.trim_start().len() + 1;
            diags.push(ParseDiagnostic::error(lineno, col, "expected @relation, @attribute or @data"));
            continue;
        };
        let mut cur = Cursor::new(line, true);
        cur.pos = after;
        match kw.as_str() {
            "relation" => {
                if let Err(m) = cur.name() {
                    diags.push(ParseDiagnostic::error(lineno, cur.column(), m));
                }
                saw_relation = true;
            }
            "attribute" => match parse_attribute(&mut cur) {
                Ok((spec, name_col)) => {
                    if attributes.iter().any(|a| a.name == spec.name) {
                        diags.push(ParseDiagnostic::error(
                            lineno,
                            name_col,
                            format!("duplicate attribute name '{}'", spec.name),
                        ));
                    } else {
                        attributes.push(spec);
                        attr_lines.push(lineno);
                    }
                }
                Err((col, m)) => diags.push(ParseDiagnostic::error(lineno, col, m)),
            },
            "data" => {
                cur.skip_ws();
                if !cur.at_end() {
                    diags.push(ParseDiagnostic::error(lineno, cur.column(), "unexpected text after @data"));
                }
                data_start = Some(lineno);
                break;
            }
            other => diags.push(ParseDiagnostic::error(
                lineno,
                line.len() - line.trim_start().len() + 1,
                format!("unknown keyword '@{other}'"),
            )),
        }
    }

    if !saw_relation {
        diags.push(ParseDiagnostic::warning(1, 1, "missing @relation declaration"));
    }
    let Some(data_line) = data_start else {
        diags.push(ParseDiagnostic::error(last_line.max(1), 1, "missing @data section"));
        return Err(ParseErrors(diags));
    };
    if attributes.is_empty() {
        diags.push(ParseDiagnostic::error(data_line, 1, "no attributes declared"));
        return Err(ParseErrors(diags));
    }

    let class_pos = match class {
        None => attributes.len() - 1,
        Some(name) => match attributes.iter().position(|a| a.name == name) {
            Some(p) => p,
            None => {
                diags.push(ParseDiagnostic::error(data_line, 1, format!("class attribute '{name}' is not declared")));
                return Err(ParseErrors(diags));
            }
        },
    };
    let schema = match Schema::new(attributes, class_pos) {
        Ok(s) => s,
        Err(e) => {
            diags.push(ParseDiagnostic::error(attr_lines[class_pos], 1, e.to_string()));
            return Err(ParseErrors(diags));
        }
    };

    let instances = parse_rows(
        lines(text).skip_while(|&(n, _)| n <= data_line),
        &schema,
        true,
        &mut diags,
    );
    finish(schema, instances, diags)
}

fn parse_attribute(cur: &mut Cursor<'_>) -> Result<(AttributeSpec, usize), (usize, String)> {
    let name = cur.name().map_err(|m| (cur.column(), m))?;
    cur.skip_ws();
    let col = cur.column();
    let kind = if cur.peek() == Some('{') {
        cur.bump();
        let fields = cur.fields(Some('}'))?;
        cur.bump();
        let mut values: Vec<String> = Vec::with_capacity(fields.len());
        for f in fields {
            if values.contains(&f.text) {
                return Err((f.column, format!("duplicate nominal value '{}'", f.text)));
            }
            values.push(f.text);
        }
        AttributeKind::Nominal { values }
    } else {
        let ty = cur.name().map_err(|_| (col, "expected an attribute type".to_string()))?;
        match ty.text.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttributeKind::Numeric,
            "string" | "date" | "relational" => {
                return Err((col, format!("unsupported attribute type '{}'", ty.text)))
            }
            _ => return Err((col, format!("unknown attribute type '{}'", ty.text))),
        }
    };
    cur.skip_ws();
    if !cur.at_end() {
        return Err((cur.column(), "unexpected text after attribute type".into()));
    }
    Ok((AttributeSpec { name: name.text, kind }, name.column))
}

fn parse_rows<'a>(
    rows: impl Iterator<Item = (usize, &'a str)>,
    schema: &Schema,
    comments: bool,
    diags: &mut Vec<ParseDiagnostic>,
) -> Vec<Instance> {
    let mut out = Vec::new();
    for (lineno, line) in rows {
        if is_blank_or_comment(line, comments) {
            continue;
        }
        if line.trim_start().starts_with('{') {
            let col = line.len() - line.trim_start().len() + 1;
            diags.push(ParseDiagnostic::error(lineno, col, "sparse data rows are not supported"));
            continue;
        }
        let mut cur = Cursor::new(line, comments);
        let fields = match cur.fields(None) {
            Ok(f) => f,
            Err((col, m)) => {
                diags.push(ParseDiagnostic::error(lineno, col, m));
                continue;
            }
        };
        if fields.len() != schema.len() {
            diags.push(ParseDiagnostic::error(
                lineno,
                1,
                format!("expected {} values, found {}", schema.len(), fields.len()),
            ));
            continue;
        }
        let mut values = Vec::with_capacity(fields.len());
        let mut ok = true;
        for (field, attr) in fields.iter().zip(schema.attributes()) {
            match convert(field, attr) {
                Ok(v) => values.push(v),
                Err(m) => {
                    diags.push(ParseDiagnostic::error(lineno, field.column, m));
                    ok = false;
                }
            }
        }
        if ok {
            out.push(Instance::new(values));
        }
    }
    out
}

fn convert(field: &Field, attr: &AttributeSpec) -> Result<Value, String> {
    if !field.quoted && field.text == "?" {
        return Ok(Value::Missing);
    }
    match &attr.kind {
        AttributeKind::Nominal { values } => values
            .iter()
            .position(|v| *v == field.text)
            .map(Value::Nominal)
            .ok_or_else(|| format!("undeclared nominal value '{}' for attribute '{}'", field.text, attr.name)),
        AttributeKind::Numeric => match field.text.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Value::Numeric(x)),
            _ => Err(format!("cannot parse '{}' as a number for attribute '{}'", field.text, attr.name)),
        },
    }
}

fn finish(schema: Schema, instances: Vec<Instance>, diags: Vec<ParseDiagnostic>) -> Result<Dataset, ParseErrors> {
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(ParseErrors(diags));
    }
    Ok(Dataset { schema, instances })
}

/// Parses comma-separated text whose header row names the schema's
/// attributes in order.
pub fn parse_csv(text: &str, schema: &Schema) -> Result<Dataset, ParseErrors> {
    let mut diags = Vec::new();
    let mut it = lines(text).skip_while(|(_, l)| l.trim().is_empty());
    let Some((hline, header)) = it.next() else {
        diags.push(ParseDiagnostic::error(1, 1, "missing header row"));
        return Err(ParseErrors(diags));
    };
    let fields = match Cursor::new(header, false).fields(None) {
        Ok(f) => f,
        Err((col, m)) => {
            diags.push(ParseDiagnostic::error(hline, col, m));
            return Err(ParseErrors(diags));
        }
    };
    let expected: Vec<&str> = schema.attributes().iter().map(|a| a.name.as_str()).collect();
    for (i, name) in expected.iter().enumerate() {
        match fields.get(i) {
            Some(f) if f.text == *name => {}
            Some(f) => {
                diags.push(ParseDiagnostic::error(
                    hline,
                    f.column,
                    format!("header mismatch: expected '{name}', found '{}'", f.text),
                ));
                return Err(ParseErrors(diags));
            }
            None => {
                diags.push(ParseDiagnostic::error(
                    hline,
                    header.len() + 1,
                    format!("header mismatch: expected {} columns, found {}", expected.len(), fields.len()),
                ));
                return Err(ParseErrors(diags));
            }
        }
    }
    if fields.len() > expected.len() {
        diags.push(ParseDiagnostic::error(
            hline,
            fields[expected.len()].column,
            format!("header mismatch: expected {} columns, found {}", expected.len(), fields.len()),
        ));
        return Err(ParseErrors(diags));
    }
    let instances = parse_rows(it, schema, false, &mut diags);
    finish(schema.clone(), instances, diags)
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s.chars().any(|c| {
            c.is_whitespace() || c.is_control() || matches!(c, ',' | '{' | '}' | '\'' | '"' | '%' | '\\')
        })
}

fn quote(s: &str) -> String {
    if !needs_quotes(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Serializes a dataset as ARFF text with LF line endings.
pub fn write_arff(dataset: &Dataset, relation_name: &str) -> String {
    let schema = &dataset.schema;
    let mut out = format!("@relation {}\n\n", quote(relation_name));
    for attr in schema.attributes() {
        out.push_str("@attribute ");
        out.push_str(&quote(&attr.name));
        match &attr.kind {
            AttributeKind::Nominal { values } => {
                let vals: Vec<String> = values.iter().map(|v| quote(v)).collect();
                out.push_str(&format!(" {{{}}}\n", vals.join(",")));
            }
            AttributeKind::Numeric => out.push_str(" numeric\n"),
        }
    }
    out.push_str("\n@data\n");
    for inst in &dataset.instances {
        let cells: Vec<String> = inst
            .values
            .iter()
            .zip(schema.attributes())
            .map(|(v, attr)| match v {
                Value::Missing => "?".to_string(),
                Value::Nominal(i) => quote(attr.value_name(*i).unwrap_or("?")),
                Value::Numeric(x) => format!("{x}"),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

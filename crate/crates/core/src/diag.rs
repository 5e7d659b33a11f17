//! Positioned diagnostics shared by every stage of the pipeline.
//!
//! Stages never abort on the first problem; they push into a [`Diagnostics`]
//! sink and the caller decides what an error-severity entry means.

use std::fmt;

/// A 1-based line/column position in a source text. Columns count chars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Note,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        })
    }
}

/// Stable diagnostic codes. The kebab-case rendering is part of the CLI
/// output contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    // frame-logic source
    LexError,
    SyntaxError,
    UnsafeRule,
    DuplicateVariable,
    UnsafeQuery,
    // ontology
    ClassConflict,
    ClassCycle,
    UnknownClass,
    ImplicitClass,
    ReservedName,
    SignatureConflict,
    SignatureType,
    UnknownAttribute,
    KindMismatch,
    // inference
    IllTypedDerivation,
    // xml
    XmlSyntax,
    MismatchedTag,
    UnterminatedTag,
    UnknownEntity,
    Encoding,
    DtdSyntax,
    DtdIncomplete,
    AmbiguousContentModel,
    DoctypeSource,
    UnknownElement,
    InvalidContent,
    MarkupRepaired,
    // rdf
    RdfStructure,
    UnresolvedPrefix,
    ResourceSpelling,
    EmptyAlternative,
    UnmappedProperty,
    MappingSyntax,
    VersionOutdated,
    VersionTooNew,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::LexError => "lex-error",
            Code::SyntaxError => "syntax-error",
            Code::UnsafeRule => "unsafe-rule",
            Code::DuplicateVariable => "duplicate-variable",
            Code::UnsafeQuery => "unsafe-query",
            Code::ClassConflict => "class-conflict",
            Code::ClassCycle => "class-cycle",
            Code::UnknownClass => "unknown-class",
            Code::ImplicitClass => "implicit-class",
            Code::ReservedName => "reserved-name",
            Code::SignatureConflict => "signature-conflict",
            Code::SignatureType => "signature-type",
            Code::UnknownAttribute => "unknown-attribute",
            Code::KindMismatch => "kind-mismatch",
            Code::IllTypedDerivation => "ill-typed-derivation",
            Code::XmlSyntax => "xml-syntax",
            Code::MismatchedTag => "mismatched-tag",
            Code::UnterminatedTag => "unterminated-tag",
            Code::UnknownEntity => "unknown-entity",
            Code::Encoding => "encoding",
            Code::DtdSyntax => "dtd-syntax",
            Code::DtdIncomplete => "dtd-incomplete",
            Code::AmbiguousContentModel => "ambiguous-content-model",
            Code::DoctypeSource => "doctype-source",
            Code::UnknownElement => "unknown-element",
            Code::InvalidContent => "invalid-content",
            Code::MarkupRepaired => "markup-repaired",
            Code::RdfStructure => "rdf-structure",
            Code::UnresolvedPrefix => "unresolved-prefix",
            Code::ResourceSpelling => "resource-spelling",
            Code::EmptyAlternative => "empty-alternative",
            Code::UnmappedProperty => "unmapped-property",
            Code::MappingSyntax => "mapping-syntax",
            Code::VersionOutdated => "version-outdated",
            Code::VersionTooNew => "version-too-new",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub pos: Option<Pos>,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), pos: None }
    }

    pub fn warning(code: Code, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), pos: None }
    }

    pub fn at(mut self, pos: impl Into<Option<Pos>>) -> Self {
        self.pos = pos.into();
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders as `file:line:col: severity CODE message`.
    pub fn render(&self, file: &str) -> String {
        match self.pos {
            Some(p) => format!("{file}:{}:{}: {} {} {}", p.line, p.col, self.severity, self.code, self.message),
            None => format!("{file}: {} {} {}", self.severity, self.code, self.message),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.pos {
            write!(f, "{p}: ")?;
        }
        write!(f, "{} {} {}", self.severity, self.code, self.message)
    }
}

/// Accumulating sink for diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    items: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, d: Diagnostic) {
        self.items.push(d);
    }

    pub fn error(&mut self, code: Code, pos: impl Into<Option<Pos>>, message: impl Into<String>) {
        self.push(Diagnostic::error(code, message).at(pos));
    }

    pub fn warning(&mut self, code: Code, pos: impl Into<Option<Pos>>, message: impl Into<String>) {
        self.push(Diagnostic::warning(code, message).at(pos));
    }

    /// Reports at error severity in strict mode, warning otherwise.
    pub fn report(&mut self, mode: Mode, code: Code, pos: impl Into<Option<Pos>>, message: impl Into<String>) {
        match mode {
            Mode::Strict => self.error(code, pos, message),
            Mode::Lenient => self.warning(code, pos, message),
        }
    }

    pub fn has_errors(&self) -> bool {
        self.items.iter().any(Diagnostic::is_error)
    }

    pub fn error_count(&self) -> usize {
        self.items.iter().filter(|d| d.is_error()).count()
    }

    pub fn warning_count(&self) -> usize {
        self.items.iter().filter(|d| d.severity == Severity::Warning).count()
    }

    pub fn has_code(&self, code: Code) -> bool {
        self.items.iter().any(|d| d.code == code)
    }

    pub fn with_code(&self, code: Code) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter().filter(move |d| d.code == code)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Diagnostic> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.items.extend(other.items);
    }

    pub fn into_vec(self) -> Vec<Diagnostic> {
        self.items
    }
}

impl<'a> IntoIterator for &'a Diagnostics {
    type Item = &'a Diagnostic;
    type IntoIter = std::slice::Iter<'a, Diagnostic>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.items {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Typing discipline applied to facts, rules and ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Mode {
    #[default]
    Strict,
    Lenient,
}

use thiserror::Error;

/// Structural problems with a complex, a subcomplex or a map between complexes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("cell `{cell}` has an empty attaching word")]
    EmptyWord { cell: String },
    #[error("attaching word of cell `{cell}` is not closed at position {position}")]
    OpenWord { cell: String, position: usize },
    #[error("subcomplex is not closed under faces: {0}")]
    NotFaceClosed(String),
    #[error("invalid id `{0}` (ids are alphanumeric plus underscore)")]
    InvalidId(String),
    #[error("{0}")]
    Precondition(String),
}

/// A parse failure with the 1-based line it was found on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("malformed line: {0}")]
    Malformed(String),
}

impl ParseError {
    pub fn malformed(line: usize, msg: impl Into<String>) -> Self {
        ParseError { line, kind: ParseErrorKind::Malformed(msg.into()) }
    }

    pub fn complex(line: usize, err: ComplexError) -> Self {
        ParseError { line, kind: ParseErrorKind::Complex(err) }
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("invalid category `{0}`")]
    InvalidCategory(String),
    #[error("invalid feature `{0}`")]
    InvalidFeature(String),
    #[error("attribute `{0}` given twice in one feature set")]
    DuplicateAttribute(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate parameter `{name}`")]
    DuplicateParam { line: usize, name: String },
    #[error("missing `@start` declaration")]
    MissingStart,
}

impl GrammarError {
    pub(crate) fn at_line(self, line: usize) -> GrammarError {
        match self {
            GrammarError::Syntax { .. } | GrammarError::DuplicateParam { .. } => self,
            GrammarError::MissingStart => self,
            other => GrammarError::Syntax {
                line,
                message: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("search aborted after expanding {explored} states (branch limit {limit})")]
    BranchLimit { explored: usize, limit: usize },
    #[error("analysis failed its replay check: {0}")]
    ReplayMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TsvError {
    #[error("missing `# status:` header")]
    MissingStatus,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

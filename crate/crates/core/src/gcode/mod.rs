//! G-Code frontend: tokenizer, modal interpreter and canonical writer for
//! an RS-274 style subset (G0-G3, G17, G20/G21, G90/G91, M0/M2/M3/M5/M30).
//!
//! Anything outside that subset is an error, never skipped.

mod canonical;
mod interp;
mod lexer;

pub use canonical::to_canonical;
pub use interp::{
    interpret, Annotation, ArcSense, DistanceMode, ModalState, MotionCommand, MotionKind, MotionMode, Plane,
    Program, Units, ARC_RADIUS_TOLERANCE_MM,
};
pub use lexer::{tokenize, Block, Letter, Word};

/// Every variant names the 1-based source line it refers to.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GcodeError {
    #[error("line {line}, column {column}: cannot read `{fragment}`")]
    Lex {
        line: usize,
        column: usize,
        fragment: String,
    },
    #[error("line {line}: more than one motion word (G0-G3) in a block")]
    ConflictingMotion { line: usize },
    #[error("line {line}: {word} unsupported")]
    UnsupportedCode { line: usize, word: String },
    #[error("line {line}: feed motion before any F word")]
    MissingFeed { line: usize },
    #[error("line {line}: bad arc, {detail}")]
    BadArc { line: usize, detail: String },
    #[error("line {line}: coordinates given with no active motion mode")]
    NoMotionMode { line: usize },
    #[error("line {line}: {word}: {reason}")]
    InvalidWord {
        line: usize,
        word: String,
        reason: &'static str,
    },
}

impl GcodeError {
    pub fn line(&self) -> usize {
        match self {
            GcodeError::Lex { line, .. }
            | GcodeError::ConflictingMotion { line }
            | GcodeError::UnsupportedCode { line, .. }
            | GcodeError::MissingFeed { line }
            | GcodeError::BadArc { line, .. }
            | GcodeError::NoMotionMode { line }
            | GcodeError::InvalidWord { line, .. } => *line,
        }
    }
}

/// Tokenizes and interprets a whole program.
pub fn compile(text: &str, initial: &ModalState) -> Result<Program, GcodeError> {
    interpret(&tokenize(text)?, initial)
}

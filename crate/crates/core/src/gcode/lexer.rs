use std::fmt;

use super::GcodeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    G,
    M,
    X,
    Y,
    Z,
    A,
    B,
    C,
    I,
    J,
    K,
    R,
    F,
    S,
    N,
    T,
}

impl Letter {
    fn from_char(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'G' => Letter::G,
            'M' => Letter::M,
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            'A' => Letter::A,
            'B' => Letter::B,
            'C' => Letter::C,
            'I' => Letter::I,
            'J' => Letter::J,
            'K' => Letter::K,
            'R' => Letter::R,
            'F' => Letter::F,
            'S' => Letter::S,
            'N' => Letter::N,
            'T' => Letter::T,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::G => 'G',
            Letter::M => 'M',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
            Letter::I => 'I',
            Letter::J => 'J',
            Letter::K => 'K',
            Letter::R => 'R',
            Letter::F => 'F',
            Letter::S => 'S',
            Letter::N => 'N',
            Letter::T => 'T',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Word {
    pub letter: Letter,
    pub value: f64,
}

impl Word {
    pub fn new(letter: Letter, value: f64) -> Self {
        Self { letter, value }
    }

    /// `G0`..`G3`.
    pub fn is_motion(&self) -> bool {
        self.letter == Letter::G && [0.0, 1.0, 2.0, 3.0].contains(&self.value)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter.as_char(), self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// Value of an `N` word, if present.
    pub line_number: Option<u32>,
    pub words: Vec<Word>,
    /// 1-based line in the source text.
    pub source_line: usize,
}

struct LineLexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> LineLexer<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Self {
            chars: text.char_indices().collect(),
            pos: 0,
            line,
            text,
        }
    }

    fn error(&self, start: usize, end: usize) -> GcodeError {
        let byte_start = self.chars.get(start).map_or(self.text.len(), |c| c.0);
        let byte_end = self.chars.get(end).map_or(self.text.len(), |c| c.0);
        GcodeError::Lex {
            line: self.line,
            column: start + 1,
            fragment: self.text[byte_start..byte_end].to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn skip_blank(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn number(&mut self, word_start: usize) -> Result<f64, GcodeError> {
        self.skip_blank();
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.pos += 1;
            self.skip_blank();
        }
        let body = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        let run: String = self.chars[body..self.pos].iter().map(|c| c.1).collect();
        let digits = run.chars().filter(char::is_ascii_digit).count();
        if digits == 0 || run.len() - digits > 1 {
            return Err(self.error(word_start, self.pos.max(word_start + 1)));
        }
        text.push_str(&run);
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.error(word_start, self.pos))
    }

    fn words(mut self) -> Result<Vec<Word>, GcodeError> {
        let mut words = Vec::new();
        loop {
            self.skip_blank();
            let Some(c) = self.peek() else { break };
            match c {
                ';' => break,
                '(' => {
                    let open = self.pos;
                    while !matches!(self.peek(), Some(')') | None) {
                        self.pos += 1;
                    }
                    if self.peek().is_none() {
                        return Err(self.error(open, self.pos));
                    }
                    self.pos += 1;
                }
                _ => {
                    let start = self.pos;
                    let letter = Letter::from_char(c).ok_or_else(|| self.error(start, start + 1))?;
                    self.pos += 1;
                    let value = self.number(start)?;
                    words.push(Word::new(letter, value));
                }
            }
        }
        Ok(words)
    }
}

/// Splits program text into blocks, one per non-empty line.
///
/// Letters are case-insensitive, whitespace between and inside words is
/// ignored, `( ... )` and `;` comments are dropped, and a line holding only
/// `%` is treated as blank.
pub fn tokenize(text: &str) -> Result<Vec<Block>, GcodeError> {
    let mut blocks = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim() == "%" {
            continue;
        }
        let mut words = LineLexer::new(raw, line).words()?;
        if words.is_empty() {
            continue;
        }
        let mut line_number = None;
        if let Some(pos) = words.iter().position(|w| w.letter == Letter::N) {
            let n = words.remove(pos);
            if n.value < 0.0 || n.value.fract() != 0.0 || n.value > u32::MAX as f64 {
                return Err(GcodeError::InvalidWord {
                    line,
                    word: n.to_string(),
                    reason: "line number must be a non-negative integer",
                });
            }
            line_number = Some(n.value as u32);
        }
        if words.iter().filter(|w| w.is_motion()).count() > 1 {
            return Err(GcodeError::ConflictingMotion { line });
        }
        if words.is_empty() {
            continue;
        }
        blocks.push(Block {
            line_number,
            words,
            source_line: line,
        });
    }
    Ok(blocks)
}

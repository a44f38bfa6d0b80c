//! Indentation-aware tokenizer.
//!
//! Emits `Newline`/`Indent`/`Dedent` tokens the way CPython's tokenizer
//! does: blank and comment-only lines produce nothing, newlines inside
//! brackets are ignored, and tabs advance indentation to the next multiple
//! of eight columns.

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(StrTok),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrKind {
    Str,
    Bytes,
    FString,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrTok {
    pub kind: StrKind,
    /// Decoded contents. For bytes every char is in `0..=255`.
    pub value: String,
    /// Literal source text, prefix and quotes included.
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub start: (u32, u32),
    pub end: (u32, u32),
}

const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", ">>", "<<", "<=", ">=", "==", "!=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "+", "-", "*", "/", "%", "@", "&", "|",
    "^", "~", "<", ">", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "=",
];

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    depth: usize,
    indents: Vec<u32>,
    at_line_start: bool,
    out: Vec<Token>,
    path: &'a str,
}

pub fn tokenize(text: &str, path: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        col: 0,
        depth: 0,
        indents: vec![0],
        at_line_start: true,
        out: Vec::new(),
        path,
    };
    lx.run()?;
    Ok(lx.out)
}

impl<'a> Lexer<'a> {
    fn err(&self, line: u32, col: u32, msg: impl Into<String>) -> ParseError {
        ParseError {
            path: self.path.to_string(),
            line,
            col,
            message: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 0;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn push(&mut self, tok: Tok, start: (u32, u32)) {
        self.out.push(Token {
            tok,
            start,
            end: (self.line, self.col),
        });
    }

    fn last_is_newline(&self) -> bool {
        matches!(
            self.out.last().map(|t| &t.tok),
            None | Some(Tok::Newline) | Some(Tok::Indent) | Some(Tok::Dedent)
        )
    }

    fn run(&mut self) -> Result<(), ParseError> {
        loop {
            if self.at_line_start && self.depth == 0 && !self.indentation()? {
                continue;
            }
            let Some(c) = self.peek() else {
                return self.finish();
            };
            match c {
                ' ' | '\t' | '\x0c' => {
                    self.bump();
                }
                '\r' if self.peek_at(1) == Some('\n') => {
                    self.bump();
                }
                '#' => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                '\\' => {
                    let (l, cl) = (self.line, self.col);
                    self.bump();
                    if self.peek() == Some('\r') {
                        self.bump();
                    }
                    if self.peek() != Some('\n') {
                        return Err(self.err(
                            l,
                            cl,
                            "unexpected character after line continuation",
                        ));
                    }
                    self.bump();
                    if self.peek().is_none() {
                        return Err(self.err(
                            l,
                            cl,
                            "unexpected end of file after line continuation",
                        ));
                    }
                }
                '\n' => {
                    let start = (self.line, self.col);
                    self.bump();
                    if self.depth == 0 {
                        self.out.push(Token {
                            tok: Tok::Newline,
                            start,
                            end: start,
                        });
                        self.at_line_start = true;
                    }
                }
                c if c.is_ascii_digit() => self.number()?,
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number()?,
                '"' | '\'' => {
                    let start = (self.line, self.col);
                    self.string(start, String::new())?;
                }
                c if c == '_' || c.is_alphabetic() => self.name()?,
                _ => self.operator()?,
            }
        }
    }

    /// Handles leading whitespace of a logical line. Returns false when the
    /// line was blank (and consumed).
    fn indentation(&mut self) -> Result<bool, ParseError> {
        let mut width = 0u32;
        loop {
            match self.peek() {
                Some(' ') => width += 1,
                Some('\t') => width = (width / 8 + 1) * 8,
                Some('\x0c') => width = 0,
                _ => break,
            }
            self.bump();
        }
        match self.peek() {
            None => {
                self.at_line_start = false;
                return Ok(true);
            }
            Some('#') => {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
                if self.peek() == Some('\n') {
                    self.bump();
                }
                return Ok(false);
            }
            Some('\n') => {
                self.bump();
                return Ok(false);
            }
            Some('\r') if self.peek_at(1) == Some('\n') => {
                self.bump();
                self.bump();
                return Ok(false);
            }
            _ => {}
        }
        self.at_line_start = false;
        let here = (self.line, self.col);
        let top = *self.indents.last().unwrap_or(&0);
        if width > top {
            self.indents.push(width);
            self.out.push(Token {
                tok: Tok::Indent,
                start: here,
                end: here,
            });
        } else if width < top {
            while *self.indents.last().unwrap_or(&0) > width {
                self.indents.pop();
                self.out.push(Token {
                    tok: Tok::Dedent,
                    start: here,
                    end: here,
                });
            }
            if *self.indents.last().unwrap_or(&0) != width {
                return Err(self.err(
                    here.0,
                    here.1,
                    "unindent does not match any outer indentation level",
                ));
            }
        }
        Ok(true)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.depth > 0 {
            return Err(self.err(
                self.line,
                self.col,
                "unexpected end of file inside brackets",
            ));
        }
        let here = (self.line, self.col);
        if !self.last_is_newline() {
            self.out.push(Token {
                tok: Tok::Newline,
                start: here,
                end: here,
            });
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.out.push(Token {
                tok: Tok::Dedent,
                start: here,
                end: here,
            });
        }
        self.out.push(Token {
            tok: Tok::End,
            start: here,
            end: here,
        });
        Ok(())
    }

    fn name(&mut self) -> Result<(), ParseError> {
        let start = (self.line, self.col);
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c == '_' || c.is_alphanumeric() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if matches!(self.peek(), Some('"') | Some('\''))
            && s.len() <= 2
            && s.chars().all(|c| "rRbBuUfF".contains(c))
        {
            return self.string(start, s);
        }
        self.push(Tok::Name(s), start);
        Ok(())
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let start = (self.line, self.col);
        let mut text = String::new();
        if self.peek() == Some('0')
            && matches!(self.peek_at(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B'))
        {
            self.bump();
            let radix = match self.bump() {
                Some('x' | 'X') => 16,
                Some('o' | 'O') => 8,
                _ => 2,
            };
            while let Some(c) = self.peek() {
                if c == '_' {
                    self.bump();
                } else if c.is_digit(radix) {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if self.peek().is_some_and(|c| c.is_alphanumeric()) {
                return Err(self.err(self.line, self.col, "invalid digit in numeric literal"));
            }
            let v = i64::from_str_radix(&text, radix)
                .map_err(|_| self.err(start.0, start.1, "integer literal out of range"))?;
            self.push(Tok::Int(v), start);
            return Ok(());
        }
        let mut is_float = false;
        self.digits(&mut text);
        if self.peek() == Some('.') {
            is_float = true;
            text.push('.');
            self.bump();
            self.digits(&mut text);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = self.peek_at(1);
            let has_digits = match sign {
                Some('+' | '-') => self.peek_at(2).is_some_and(|c| c.is_ascii_digit()),
                Some(c) => c.is_ascii_digit(),
                None => false,
            };
            if has_digits {
                is_float = true;
                text.push('e');
                self.bump();
                if let Some(s @ ('+' | '-')) = self.peek() {
                    text.push(s);
                    self.bump();
                }
                self.digits(&mut text);
            }
        }
        if matches!(self.peek(), Some('j' | 'J')) {
            return Err(self.err(start.0, start.1, "complex literals are not supported"));
        }
        if self.peek().is_some_and(|c| c == '_' || c.is_alphabetic()) {
            return Err(self.err(self.line, self.col, "invalid numeric literal"));
        }
        if is_float {
            let v: f64 = text
                .parse()
                .map_err(|_| self.err(start.0, start.1, "invalid float literal"))?;
            self.push(Tok::Float(v), start);
        } else {
            let v: i64 = text
                .parse()
                .map_err(|_| self.err(start.0, start.1, "integer literal out of range"))?;
            self.push(Tok::Int(v), start);
        }
        Ok(())
    }

    fn digits(&mut self, text: &mut String) {
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else if c == '_' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn string(&mut self, start: (u32, u32), prefix: String) -> Result<(), ParseError> {
        let lower = prefix.to_ascii_lowercase();
        let raw_mode = lower.contains('r');
        let kind = if lower.contains('b') {
            StrKind::Bytes
        } else if lower.contains('f') {
            StrKind::FString
        } else {
            StrKind::Str
        };
        if lower.contains('u') && lower.len() > 1 {
            return Err(self.err(start.0, start.1, "invalid string prefix"));
        }
        let begin = self.pos - prefix.chars().count();
        let quote = self.bump().unwrap_or('"');
        let triple = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if triple {
            self.bump();
            self.bump();
        }
        let mut value = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.err(start.0, start.1, "unterminated string literal"));
            };
            if c == quote {
                if !triple {
                    self.bump();
                    break;
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    self.bump();
                    self.bump();
                    self.bump();
                    break;
                }
                value.push(c);
                self.bump();
                continue;
            }
            if c == '\n' && !triple {
                return Err(self.err(start.0, start.1, "unterminated string literal"));
            }
            if c == '\\' {
                let (l, cl) = (self.line, self.col);
                self.bump();
                let Some(e) = self.bump() else {
                    return Err(self.err(l, cl, "unterminated string literal"));
                };
                if raw_mode || kind == StrKind::FString {
                    value.push('\\');
                    value.push(e);
                    continue;
                }
                self.escape(e, kind, &mut value, (l, cl))?;
                continue;
            }
            if kind == StrKind::Bytes && !c.is_ascii() {
                return Err(self.err(
                    self.line,
                    self.col,
                    "bytes can only contain ASCII characters",
                ));
            }
            value.push(c);
            self.bump();
        }
        let raw: String = self.chars[begin..self.pos].iter().collect();
        self.push(Tok::Str(StrTok { kind, value, raw }), start);
        Ok(())
    }

    fn escape(
        &mut self,
        e: char,
        kind: StrKind,
        value: &mut String,
        at: (u32, u32),
    ) -> Result<(), ParseError> {
        match e {
            '\n' => {}
            '\\' => value.push('\\'),
            '\'' => value.push('\''),
            '"' => value.push('"'),
            'a' => value.push('\x07'),
            'b' => value.push('\x08'),
            'f' => value.push('\x0c'),
            'n' => value.push('\n'),
            'r' => value.push('\r'),
            't' => value.push('\t'),
            'v' => value.push('\x0b'),
            '0'..='7' => {
                let mut n = e.to_digit(8).unwrap_or(0);
                for _ in 0..2 {
                    match self.peek().and_then(|c| c.to_digit(8)) {
                        Some(d) => {
                            n = n * 8 + d;
                            self.bump();
                        }
                        None => break,
                    }
                }
                let ch = if kind == StrKind::Bytes { n & 0xff } else { n };
                value.push(char::from_u32(ch).unwrap_or('\u{fffd}'));
            }
            'x' => {
                let n = self.hex_digits(2, at)?;
                value.push(char::from_u32(n).unwrap_or('\u{fffd}'));
            }
            'u' | 'U' if kind == StrKind::Str => {
                let n = self.hex_digits(if e == 'u' { 4 } else { 8 }, at)?;
                let ch = char::from_u32(n)
                    .ok_or_else(|| self.err(at.0, at.1, "invalid unicode escape"))?;
                value.push(ch);
            }
            'N' if kind == StrKind::Str => {
                return Err(self.err(at.0, at.1, "named unicode escapes are not supported"));
            }
            other => {
                value.push('\\');
                value.push(other);
            }
        }
        Ok(())
    }

    fn hex_digits(&mut self, n: usize, at: (u32, u32)) -> Result<u32, ParseError> {
        let mut v = 0u32;
        for _ in 0..n {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.err(at.0, at.1, "truncated escape sequence"))?;
            v = v * 16 + d;
            self.bump();
        }
        Ok(v)
    }

    fn operator(&mut self) -> Result<(), ParseError> {
        let start = (self.line, self.col);
        for op in OPERATORS {
            let len = op.chars().count();
            if op
                .chars()
                .enumerate()
                .all(|(i, c)| self.peek_at(i) == Some(c))
            {
                for _ in 0..len {
                    self.bump();
                }
                match *op {
                    "(" | "[" | "{" => self.depth += 1,
                    ")" | "]" | "}" => {
                        if self.depth == 0 {
                            return Err(self.err(start.0, start.1, format!("unmatched '{op}'")));
                        }
                        self.depth -= 1;
                    }
                    _ => {}
                }
                self.push(Tok::Op(op), start);
                return Ok(());
            }
        }
        let c = self.peek().unwrap_or(' ');
        Err(self.err(start.0, start.1, format!("unexpected character {c:?}")))
    }
}

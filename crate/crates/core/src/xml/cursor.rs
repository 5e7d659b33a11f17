//! Character cursor with line/column tracking.

use crate::diag::Pos;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    idx: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, idx: 0, line: 1, col: 1 }
    }

    pub fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    pub fn offset(&self) -> usize {
        self.idx
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.idx..]
    }

    pub fn is_eof(&self) -> bool {
        self.idx >= self.src.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn skip_ws(&mut self) -> bool {
        let mut any = false;
        while self.peek().is_some_and(is_space) {
            self.bump();
            any = true;
        }
        any
    }

    /// Consumes up to (not including) `end`; `None` if `end` never occurs,
    /// in which case the cursor is at end of input.
    pub fn take_until(&mut self, end: &str) -> Option<&'a str> {
        let start = self.idx;
        match self.rest().find(end) {
            Some(n) => {
                let stop = start + n;
                while self.idx < stop {
                    self.bump();
                }
                Some(&self.src[start..stop])
            }
            None => {
                while self.bump().is_some() {}
                None
            }
        }
    }

    pub fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.idx;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.src[start..self.idx]
    }

    pub fn take_name(&mut self) -> Option<&'a str> {
        if !self.peek().is_some_and(is_name_start) {
            return None;
        }
        Some(self.take_while(is_name_char))
    }
}

pub(crate) fn is_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == ':'
}

pub(crate) fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_numeric() || c == '-' || c == '.' || c == '\u{B7}'
}

/// Normalizes `\r\n` and lone `\r` to `\n`.
pub(crate) fn normalize_newlines(src: &str) -> std::borrow::Cow<'_, str> {
    if src.contains('\r') {
        src.replace("\r\n", "\n").replace('\r', "\n").into()
    } else {
        src.into()
    }
}

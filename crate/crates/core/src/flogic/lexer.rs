use crate::diag::{Code, Diagnostics, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Backquoted object-id: `` `Beispiel.pdf` ``
    Quoted(String),
    Str(String),
    ColonColon,
    Colon,
    /// `==>`
    SigArrow,
    /// `->>`
    SetArrow,
    /// `->`
    Implies,
    /// `<->`
    Equiv,
    /// `<-`
    ImpliedBy,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Quoted(s) => format!("object-id `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::ColonColon => "`::`".into(),
            Tok::Colon => "`:`".into(),
            Tok::SigArrow => "`==>`".into(),
            Tok::SetArrow => "`->>`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Equiv => "`<->`".into(),
            Tok::ImpliedBy => "`<-`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

pub fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

struct Cursor<'s> {
    chars: std::iter::Peekable<std::str::Chars<'s>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }
}

/// Tokenizes `src`. Never fails: bad characters are reported and skipped,
/// and the stream always ends with [`Tok::Eof`].
pub fn tokenize(src: &str, diags: &mut Diagnostics) -> Vec<Token> {
    let mut cur = Cursor { chars: src.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        let pos = cur.pos();
        let Some(c) = cur.bump() else {
            out.push(Token { tok: Tok::Eof, pos });
            return out;
        };
        let tok = match c {
            c if c.is_whitespace() || c == '\u{feff}' => continue,
            '/' if cur.peek() == Some('/') => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                continue;
            }
            c if is_ident_start(c) => {
                let mut s = String::from(c);
                while let Some(c) = cur.peek().filter(|c| is_ident_continue(*c)) {
                    s.push(c);
                    cur.bump();
                }
                Tok::Ident(s)
            }
            '"' => match read_delimited(&mut cur, '"') {
                Ok(s) => Tok::Str(s),
                Err(msg) => {
                    diags.error(Code::LexError, pos, msg);
                    continue;
                }
            },
            '`' => match read_delimited(&mut cur, '`') {
                Ok(s) if !s.is_empty() => Tok::Quoted(s),
                Ok(_) => {
                    diags.error(Code::LexError, pos, "empty backquoted object-id");
                    continue;
                }
                Err(msg) => {
                    diags.error(Code::LexError, pos, msg);
                    continue;
                }
            },
            ':' => {
                if cur.eat(':') {
                    Tok::ColonColon
                } else {
                    Tok::Colon
                }
            }
            '=' if cur.peek() == Some('=') => {
                cur.bump();
                if cur.eat('>') {
                    Tok::SigArrow
                } else {
                    diags.error(Code::LexError, pos, "expected `==>`");
                    continue;
                }
            }
            '-' if cur.peek() == Some('>') => {
                cur.bump();
                if cur.eat('>') {
                    Tok::SetArrow
                } else {
                    Tok::Implies
                }
            }
            '<' if cur.peek() == Some('-') => {
                cur.bump();
                if cur.eat('>') {
                    Tok::Equiv
                } else {
                    Tok::ImpliedBy
                }
            }
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => {
                if cur.peek() == Some('.') {
                    while cur.eat('.') {}
                    diags.error(Code::LexError, pos, "`...` elision is not part of the language");
                    continue;
                }
                Tok::Dot
            }
            other => {
                diags.error(Code::LexError, pos, format!("unexpected character `{}`", other.escape_debug()));
                continue;
            }
        };
        out.push(Token { tok, pos });
    }
}

/// Reads up to the closing `delim`, honouring `\delim` and `\\` escapes.
fn read_delimited(cur: &mut Cursor<'_>, delim: char) -> Result<String, String> {
    let mut s = String::new();
    loop {
        match cur.bump() {
            None => return Err(format!("unterminated {}", if delim == '"' { "string literal" } else { "backquoted object-id" })),
            Some('\\') => match cur.bump() {
                Some(c) if c == delim || c == '\\' => s.push(c),
                Some(c) => return Err(format!("unsupported escape `\\{}`", c.escape_debug())),
                None => return Err("unterminated escape".into()),
            },
            Some(c) if c == delim => return Ok(s),
            Some(c) => s.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let mut d = Diagnostics::new();
        let t = tokenize(src, &mut d);
        assert!(d.is_empty(), "{d}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows() {
        assert_eq!(
            toks(":: : ==> ->> -> <-> <-"),
            vec![
                Tok::ColonColon,
                Tok::Colon,
                Tok::SigArrow,
                Tok::SetArrow,
                Tok::Implies,
                Tok::Equiv,
                Tok::ImpliedBy,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn strings_and_comments() {
        assert_eq!(
            toks("x // comment\n\"a \\\"b\\\" \\\\\" `B.pdf`"),
            vec![Tok::Ident("x".into()), Tok::Str("a \"b\" \\".into()), Tok::Quoted("B.pdf".into()), Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let mut d = Diagnostics::new();
        let t = tokenize("a\n  b", &mut d);
        assert_eq!(t[0].pos, Pos::new(1, 1));
        assert_eq!(t[1].pos, Pos::new(2, 3));
    }

    #[test]
    fn ellipsis_and_strays_are_errors() {
        let mut d = Diagnostics::new();
        let t = tokenize("A[ ... ] # \"open", &mut d);
        assert_eq!(d.with_code(Code::LexError).count(), 3, "{d}");
        assert_eq!(t.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn umlaut_identifiers() {
        assert_eq!(toks("TVeröffentlichung"), vec![Tok::Ident("TVeröffentlichung".into()), Tok::Eof]);
    }
}

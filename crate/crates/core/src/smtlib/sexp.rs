//! S-expression reader for SMT-LIB2 text.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    /// Simple or `|quoted|` symbol, stored without the bars.
    Symbol(String, Pos),
    /// Numeral or decimal literal.
    Number(String, Pos),
    /// `:keyword`, stored with the colon.
    Keyword(String, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::Number(_, p) | Sexp::Keyword(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Symbol(s, _) => f.write_str(&quote_symbol(s)),
            Sexp::Number(s, _) | Sexp::Keyword(s, _) => f.write_str(s),
            Sexp::Str(s, _) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/'".contains(c)
}

/// Writes `s` as an SMT-LIB symbol, adding `|bars|` when needed.
pub fn quote_symbol(s: &str) -> String {
    let simple = !s.is_empty()
        && s.chars().all(|c| is_symbol_char(c) && c != '\'')
        && !s.starts_with(|c: char| c.is_ascii_digit());
    if simple {
        s.to_string()
    } else {
        format!("|{s}|")
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn err<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos, msg: msg.into() })
    }

    fn read(&mut self) -> Result<Option<Sexp>, SyntaxError> {
        self.skip_trivia();
        let start = self.pos;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return self.err(start, "unclosed parenthesis"),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, start)));
                        }
                        Some(_) => items.push(self.read()?.expect("non-empty input")),
                    }
                }
            }
            ')' => self.err(start, "unexpected `)`"),
            '|' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return self.err(start, "unterminated quoted symbol"),
                        Some('|') => return Ok(Some(Sexp::Symbol(s, start))),
                        Some(c) => s.push(c),
                    }
                }
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return self.err(start, "unterminated string literal"),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                return Ok(Some(Sexp::Str(s, start)));
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' || c == '|' {
                        break;
                    }
                    if !is_symbol_char(c) && c != ':' && c != '#' {
                        return self.err(self.pos, format!("unexpected character `{c}`"));
                    }
                    s.push(c);
                    self.bump();
                }
                if s.starts_with(':') {
                    Ok(Some(Sexp::Keyword(s, start)))
                } else if s.starts_with(|c: char| c.is_ascii_digit()) {
                    let valid = s.bytes().filter(|b| *b == b'.').count() <= 1
                        && s.bytes().all(|b| b.is_ascii_digit() || b == b'.')
                        && !s.ends_with('.');
                    if !valid {
                        return self.err(start, format!("malformed number `{s}`"));
                    }
                    Ok(Some(Sexp::Number(s, start)))
                } else {
                    Ok(Some(Sexp::Symbol(s, start)))
                }
            }
        }
    }
}

/// Reads every top-level s-expression of `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut lx = Lexer {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(s) = lx.read()? {
        out.push(s);
    }
    Ok(out)
}

/// Reads exactly one s-expression.
pub fn parse_one(text: &str) -> Result<Sexp, SyntaxError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(SyntaxError {
            pos: Pos { line: 1, col: 1 },
            msg: "empty input".into(),
        }),
        _ => Err(SyntaxError {
            pos: all[1].pos(),
            msg: "trailing input after expression".into(),
        }),
    }
}

/// Incremental paren-depth tracker used to cut a byte stream into complete
/// top-level expressions.
#[derive(Default)]
pub struct Splitter {
    depth: i64,
    in_quote: bool,
    in_string: bool,
    buf: String,
}

impl Splitter {
    /// Feeds one line (including its newline); returns a complete expression
    /// when the line closes one.
    pub fn feed(&mut self, line: &str) -> Option<String> {
        for c in line.chars() {
            if self.in_string {
                self.in_string = c != '"';
            } else if self.in_quote {
                self.in_quote = c != '|';
            } else {
                match c {
                    '(' => self.depth += 1,
                    ')' => self.depth -= 1,
                    '"' => self.in_string = true,
                    '|' => self.in_quote = true,
                    _ => {}
                }
            }
        }
        self.buf.push_str(line);
        if self.depth <= 0 && !self.in_quote && !self.in_string && !self.buf.trim().is_empty() {
            self.depth = 0;
            Some(std::mem::take(&mut self.buf))
        } else {
            if self.buf.trim().is_empty() {
                self.buf.clear();
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = parse_one("(and (>= x 2) (<= |y z| 3.5)) ").unwrap();
        let items = s.as_list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[2].as_list().unwrap()[1].as_symbol(), Some("y z"));
        assert_eq!(
            items[2].as_list().unwrap()[2],
            Sexp::Number("3.5".into(), Pos { line: 1, col: 25 })
        );
    }

    #[test]
    fn reports_positions() {
        let err = parse_all("(a\n  (b c)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 1 });
        let err = parse_all("(a)\n )").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 2 });
    }

    #[test]
    fn comments_and_keywords() {
        let all = parse_all("; hi\n(! x :next y) ; trailing\n").unwrap();
        assert_eq!(all.len(), 1);
        assert!(matches!(&all[0].as_list().unwrap()[2], Sexp::Keyword(k, _) if k == ":next"));
    }

    #[test]
    fn splitter_waits_for_balance() {
        let mut sp = Splitter::default();
        assert_eq!(sp.feed("sat\n").as_deref(), Some("sat\n"));
        assert_eq!(sp.feed("((x 1)\n"), None);
        assert_eq!(sp.feed(" (y |a)b|))\n").as_deref(), Some("((x 1)\n (y |a)b|))\n"));
    }

    #[test]
    fn symbol_quoting() {
        assert_eq!(quote_symbol("x"), "x");
        assert_eq!(quote_symbol("x'"), "|x'|");
        assert_eq!(quote_symbol("x@3"), "x@3");
        assert_eq!(quote_symbol("a b"), "|a b|");
    }
}

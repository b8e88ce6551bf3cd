use super::ast::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Numeric literal, kept as text so each scalar type parses it itself.
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Eq => "=",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Ne => "!=",
            Tok::Ident(_) | Tok::Number(_) => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.src[self.pos..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column, start: self.pos, end: self.pos }
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut c = Cursor { src, pos: 0, line: 1, column: 1 };
    let mut out = Vec::new();
    while let Some(ch) = c.peek() {
        if ch.is_whitespace() {
            c.bump();
            continue;
        }
        if ch == '#' {
            c.eat_while(|x| x != '\n');
            continue;
        }
        let start = c.here();
        let tok = if ch.is_ascii_alphabetic() || ch == '_' {
            c.eat_while(|x| x.is_ascii_alphanumeric() || x == '_' || x == '\'');
            Tok::Ident(src[start.start..c.pos].to_string())
        } else if ch.is_ascii_digit() || (ch == '.' && c.peek2().is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut c)?
        } else {
            c.bump();
            let two = |c: &mut Cursor, t2: Tok, t1: Tok| {
                if c.peek() == Some('=') {
                    c.bump();
                    t2
                } else {
                    t1
                }
            };
            match ch {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '<' => two(&mut c, Tok::Le, Tok::Lt),
                '>' => two(&mut c, Tok::Ge, Tok::Gt),
                '=' => two(&mut c, Tok::Eq, Tok::Eq),
                '!' if c.peek() == Some('=') => {
                    c.bump();
                    Tok::Ne
                }
                other => {
                    return Err(ParseError::Syntax {
                        message: format!("unexpected character `{other}`"),
                        span: start.to(c.here()),
                    })
                }
            }
        };
        out.push(Token { tok, span: start.to(c.here()) });
    }
    Ok(out)
}

fn lex_number(c: &mut Cursor) -> Result<Tok, ParseError> {
    let start = c.pos;
    c.eat_while(|x| x.is_ascii_digit());
    if c.peek() == Some('.') {
        c.bump();
        c.eat_while(|x| x.is_ascii_digit());
    }
    if matches!(c.peek(), Some('e' | 'E')) {
        let save = (c.pos, c.line, c.column);
        c.bump();
        if matches!(c.peek(), Some('+' | '-')) {
            c.bump();
        }
        if c.peek().is_some_and(|d| d.is_ascii_digit()) {
            c.eat_while(|x| x.is_ascii_digit());
        } else {
            (c.pos, c.line, c.column) = save;
        }
    }
    Ok(Tok::Number(c.src[start..c.pos].to_string()))
}

use super::ParseDiagnostic;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Semicolon,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    EqEq,
    Other(char),
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("'{s}'"),
            TokenKind::Int(v) => format!("'{v}'"),
            TokenKind::Real(v) => format!("'{v}'"),
            TokenKind::Str(s) => format!("\"{s}\""),
            TokenKind::Semicolon => "';'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::LBracket => "'['".into(),
            TokenKind::RBracket => "']'".into(),
            TokenKind::LBrace => "'{'".into(),
            TokenKind::RBrace => "'}'".into(),
            TokenKind::Arrow => "'->'".into(),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Slash => "'/'".into(),
            TokenKind::Caret => "'^'".into(),
            TokenKind::EqEq => "'=='".into(),
            TokenKind::Other(c) => format!("'{c}'"),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        // whitespace and comments
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') => {
                    let mut ahead = cur.chars.clone();
                    ahead.next();
                    match ahead.next() {
                        Some('/') => {
                            while let Some(c) = cur.peek() {
                                if c == '\n' {
                                    break;
                                }
                                cur.bump();
                            }
                        }
                        Some('*') => {
                            let (line, column) = (cur.line, cur.column);
                            cur.bump();
                            cur.bump();
                            let mut prev = '\0';
                            loop {
                                match cur.bump() {
                                    Some('/') if prev == '*' => break,
                                    Some(c) => prev = c,
                                    None => {
                                        return Err(ParseDiagnostic::error(line, column, "unterminated block comment"))
                                    }
                                }
                            }
                        }
                        _ => break,
                    }
                }
                _ => break,
            }
        }

        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.bump() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                line,
                column,
            });
            return Ok(tokens);
        };
        let kind = match c {
            ';' => TokenKind::Semicolon,
            ',' => TokenKind::Comma,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '+' => TokenKind::Plus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '-' => {
                if cur.peek() == Some('>') {
                    cur.bump();
                    TokenKind::Arrow
                } else {
                    TokenKind::Minus
                }
            }
            '=' if cur.peek() == Some('=') => {
                cur.bump();
                TokenKind::EqEq
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(ParseDiagnostic::error(line, column, "unterminated string literal"))
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                TokenKind::Str(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(n) = cur.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        s.push(n);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Ident(s)
            }
            c if c.is_ascii_digit() || c == '.' => lex_number(c, &mut cur, line, column)?,
            other => TokenKind::Other(other),
        };
        tokens.push(Token { kind, line, column });
    }
}

fn lex_number(first: char, cur: &mut Cursor<'_>, line: usize, column: usize) -> Result<TokenKind, ParseDiagnostic> {
    let mut s = String::from(first);
    let mut is_real = first == '.';
    while let Some(c) = cur.peek() {
        if c.is_ascii_digit() {
            s.push(c);
        } else if c == '.' && !is_real {
            is_real = true;
            s.push(c);
        } else {
            break;
        }
        cur.bump();
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut ahead = cur.chars.clone();
        ahead.next();
        let next = ahead.next();
        let exponent_follows = match next {
            Some(d) if d.is_ascii_digit() => true,
            Some('+' | '-') => ahead.next().is_some_and(|d| d.is_ascii_digit()),
            _ => false,
        };
        if exponent_follows {
            is_real = true;
            s.push(cur.bump().unwrap());
            if matches!(cur.peek(), Some('+' | '-')) {
                s.push(cur.bump().unwrap());
            }
            while let Some(c) = cur.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                cur.bump();
            }
        }
    }
    if is_real {
        s.parse::<f64>()
            .map(TokenKind::Real)
            .map_err(|_| ParseDiagnostic::error(line, column, format!("malformed number '{s}'")))
    } else {
        s.parse::<u64>()
            .map(TokenKind::Int)
            .map_err(|_| ParseDiagnostic::error(line, column, format!("integer literal '{s}' too large")))
    }
}

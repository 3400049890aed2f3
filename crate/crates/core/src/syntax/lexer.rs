use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TokenKind {
    /// Lowercase-initial symbol, including the keyword `not`.
    Ident,
    /// Uppercase-initial symbol.
    Variable,
    /// A lone `_`.
    Anonymous,
    Number,
    String,
    /// `#name`
    Directive,
    Dot,
    DotDot,
    Comma,
    Semi,
    Colon,
    If,
    WeakIf,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    At,
    Eq,
    EqEq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Pow,
    Bar,
    /// A character the lexer does not recognise, or an unterminated string.
    Unknown,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(self) -> &'static str {
        match self {
            TokenKind::Ident => "identifier",
            TokenKind::Variable => "variable",
            TokenKind::Anonymous => "'_'",
            TokenKind::Number => "number",
            TokenKind::String => "string",
            TokenKind::Directive => "directive",
            TokenKind::Dot => "'.'",
            TokenKind::DotDot => "'..'",
            TokenKind::Comma => "','",
            TokenKind::Semi => "';'",
            TokenKind::Colon => "':'",
            TokenKind::If => "':-'",
            TokenKind::WeakIf => "':~'",
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
            TokenKind::LBrace => "'{'",
            TokenKind::RBrace => "'}'",
            TokenKind::LBracket => "'['",
            TokenKind::RBracket => "']'",
            TokenKind::At => "'@'",
            TokenKind::Eq => "'='",
            TokenKind::EqEq => "'=='",
            TokenKind::Neq => "'!='",
            TokenKind::Lt => "'<'",
            TokenKind::Le => "'<='",
            TokenKind::Gt => "'>'",
            TokenKind::Ge => "'>='",
            TokenKind::Plus => "'+'",
            TokenKind::Minus => "'-'",
            TokenKind::Star => "'*'",
            TokenKind::Slash => "'/'",
            TokenKind::Backslash => "'\\'",
            TokenKind::Pow => "'**'",
            TokenKind::Bar => "'|'",
            TokenKind::Unknown => "invalid character",
            TokenKind::Eof => "end of file",
        }
    }

    pub(crate) fn is_comparison(self) -> bool {
        matches!(
            self,
            TokenKind::Eq
                | TokenKind::EqEq
                | TokenKind::Neq
                | TokenKind::Lt
                | TokenKind::Le
                | TokenKind::Gt
                | TokenKind::Ge
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub(crate) fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawComment {
    pub range: Range<usize>,
    pub block: bool,
    pub terminated: bool,
}

pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<RawComment>,
}

pub(crate) fn lex(source: &str) -> Lexed {
    let mut lexer = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        tokens: Vec::new(),
        comments: Vec::new(),
    };
    lexer.run();
    Lexed {
        tokens: lexer.tokens,
        comments: lexer.comments,
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    tokens: Vec<Token>,
    comments: Vec<RawComment>,
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

impl Lexer<'_> {
    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.tokens.push(Token {
            kind,
            start,
            end: self.pos,
        });
    }

    fn run(&mut self) {
        while let Some(b) = self.peek(0) {
            let start = self.pos;
            match b {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'%' => self.comment(),
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => self.symbol(),
                b'0'..=b'9' => {
                    while self.peek(0).is_some_and(|b| b.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    self.push(TokenKind::Number, start);
                }
                b'"' => self.string(),
                b'#' => {
                    self.pos += 1;
                    if self.peek(0).is_some_and(|b| b.is_ascii_lowercase()) {
                        while self.peek(0).is_some_and(is_ident_continue) {
                            self.pos += 1;
                        }
                        self.push(TokenKind::Directive, start);
                    } else {
                        self.push(TokenKind::Unknown, start);
                    }
                }
                _ => self.punct(b, start),
            }
        }
        let end = self.src.len();
        self.tokens.push(Token {
            kind: TokenKind::Eof,
            start: end,
            end,
        });
    }

    fn comment(&mut self) {
        let start = self.pos;
        if self.peek(1) == Some(b'*') {
            self.pos += 2;
            let terminated = match self.src[self.pos..].find("*%") {
                Some(i) => {
                    self.pos += i + 2;
                    true
                }
                None => {
                    self.pos = self.src.len();
                    false
                }
            };
            self.comments.push(RawComment {
                range: start..self.pos,
                block: true,
                terminated,
            });
        } else {
            while self.peek(0).is_some_and(|b| b != b'\n') {
                self.pos += 1;
            }
            let mut end = self.pos;
            if end > start && self.bytes[end - 1] == b'\r' {
                end -= 1;
            }
            self.comments.push(RawComment {
                range: start..end,
                block: false,
                terminated: true,
            });
        }
    }

    fn symbol(&mut self) {
        let start = self.pos;
        while self.peek(0) == Some(b'_') {
            self.pos += 1;
        }
        let kind = match self.peek(0) {
            Some(b'a'..=b'z') => TokenKind::Ident,
            Some(b'A'..=b'Z') => TokenKind::Variable,
            _ if self.pos - start == 1 => TokenKind::Anonymous,
            _ => TokenKind::Unknown,
        };
        if kind != TokenKind::Anonymous && kind != TokenKind::Unknown {
            while self.peek(0).is_some_and(is_ident_continue) {
                self.pos += 1;
            }
        }
        self.push(kind, start);
    }

    fn string(&mut self) {
        let start = self.pos;
        self.pos += 1;
        loop {
            match self.peek(0) {
                Some(b'"') => {
                    self.pos += 1;
                    self.push(TokenKind::String, start);
                    return;
                }
                Some(b'\\') if self.peek(1).is_some_and(|b| b != b'\n') => self.pos += 2,
                Some(b'\n') | None => {
                    self.push(TokenKind::Unknown, start);
                    return;
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    fn punct(&mut self, b: u8, start: usize) {
        let next = self.peek(1);
        let (kind, len) = match (b, next) {
            (b'.', Some(b'.')) => (TokenKind::DotDot, 2),
            (b'.', _) => (TokenKind::Dot, 1),
            (b',', _) => (TokenKind::Comma, 1),
            (b';', _) => (TokenKind::Semi, 1),
            (b':', Some(b'-')) => (TokenKind::If, 2),
            (b':', Some(b'~')) => (TokenKind::WeakIf, 2),
            (b':', _) => (TokenKind::Colon, 1),
            (b'(', _) => (TokenKind::LParen, 1),
            (b')', _) => (TokenKind::RParen, 1),
            (b'{', _) => (TokenKind::LBrace, 1),
            (b'}', _) => (TokenKind::RBrace, 1),
            (b'[', _) => (TokenKind::LBracket, 1),
            (b']', _) => (TokenKind::RBracket, 1),
            (b'@', _) => (TokenKind::At, 1),
            (b'=', Some(b'=')) => (TokenKind::EqEq, 2),
            (b'=', _) => (TokenKind::Eq, 1),
            (b'!', Some(b'=')) => (TokenKind::Neq, 2),
            (b'<', Some(b'=')) => (TokenKind::Le, 2),
            (b'<', _) => (TokenKind::Lt, 1),
            (b'>', Some(b'=')) => (TokenKind::Ge, 2),
            (b'>', _) => (TokenKind::Gt, 1),
            (b'+', _) => (TokenKind::Plus, 1),
            (b'-', _) => (TokenKind::Minus, 1),
            (b'*', Some(b'*')) => (TokenKind::Pow, 2),
            (b'*', _) => (TokenKind::Star, 1),
            (b'/', _) => (TokenKind::Slash, 1),
            (b'\\', _) => (TokenKind::Backslash, 1),
            (b'|', _) => (TokenKind::Bar, 1),
            _ => {
                let width = self.src[start..].chars().next().map_or(1, char::len_utf8);
                (TokenKind::Unknown, width)
            }
        };
        self.pos += len;
        self.push(kind, start);
    }
}

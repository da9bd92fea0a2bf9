use crate::ast::{Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Integer literal: value, `u` suffix, written in decimal.
    Int(u64, bool, bool),
    /// Floating literal: value, `f` suffix.
    Float(f64, bool),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

// longest first
const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "(", ")", "[", "]", "{", "}", ";", ",", ".", "+",
    "-", "*", "/", "%", "<", ">", "&", "|", "^", "~", "!", "?", ":", "=",
];

struct Lexer<'a> {
    src: &'a [u8],
    i: usize,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self, k: usize) -> u8 {
        self.src.get(self.i + k).copied().unwrap_or(0)
    }

    fn bump(&mut self) -> u8 {
        let c = self.peek(0);
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn err<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, Diagnostic> {
        Err(Diagnostic::error(Some(pos), msg))
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (c, _) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                (b'/', b'/') => {
                    while self.i < self.src.len() && self.peek(0) != b'\n' {
                        self.bump();
                    }
                }
                (b'/', b'*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        if self.i >= self.src.len() {
                            return self.err(start, "unterminated comment");
                        }
                        if self.peek(0) == b'*' && self.peek(1) == b'/' {
                            self.bump();
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn number(&mut self, pos: Pos) -> Result<Tok, Diagnostic> {
        let start = self.i;
        let hex = self.peek(0) == b'0' && matches!(self.peek(1), b'x' | b'X');
        if hex {
            self.bump();
            self.bump();
            while self.peek(0).is_ascii_hexdigit() {
                self.bump();
            }
        } else {
            while self.peek(0).is_ascii_digit() {
                self.bump();
            }
        }
        let mut is_float = false;
        if !hex && self.peek(0) == b'.' {
            is_float = true;
            self.bump();
            while self.peek(0).is_ascii_digit() {
                self.bump();
            }
        }
        if !hex && matches!(self.peek(0), b'e' | b'E') {
            let sign = usize::from(matches!(self.peek(1), b'+' | b'-'));
            if self.peek(1 + sign).is_ascii_digit() {
                is_float = true;
                for _ in 0..=sign {
                    self.bump();
                }
                while self.peek(0).is_ascii_digit() {
                    self.bump();
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.i]).expect("ascii");
        let mut suffix = String::new();
        while self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
            suffix.push(self.bump() as char);
        }
        let suffix = suffix.to_ascii_lowercase();
        if is_float {
            let value: f64 = text
                .parse()
                .or_else(|_| self.err(pos, format!("malformed number `{}`", text)))?;
            return match suffix.as_str() {
                "" => Ok(Tok::Float(value, false)),
                "f" => Ok(Tok::Float(value, true)),
                "l" => self.err(pos, "`long double` is not supported"),
                _ => self.err(pos, format!("invalid suffix `{}` on floating constant", suffix)),
            };
        }
        let unsigned = match suffix.as_str() {
            "" | "l" => false,
            "u" | "ul" | "lu" => true,
            "ll" | "ull" | "llu" => return self.err(pos, "64-bit integers are not supported"),
            _ => return self.err(pos, format!("invalid suffix `{}` on integer constant", suffix)),
        };
        let (digits, radix) = if hex {
            (&text[2..], 16)
        } else if text.len() > 1 && text.starts_with('0') {
            (&text[1..], 8)
        } else {
            (text, 10)
        };
        if digits.is_empty() {
            return self.err(pos, format!("malformed number `{}`", text));
        }
        match u64::from_str_radix(digits, radix) {
            Ok(v) if v <= u64::from(u32::MAX) => Ok(Tok::Int(v, unsigned, radix == 10)),
            Ok(_) | Err(_) if digits.bytes().all(|c| (c as char).is_digit(radix)) => {
                self.err(pos, format!("integer constant `{}` does not fit in 32 bits", text))
            }
            _ => self.err(pos, format!("malformed number `{}`", text)),
        }
    }

    fn char_lit(&mut self, pos: Pos) -> Result<Tok, Diagnostic> {
        self.bump();
        let c = match self.bump() {
            b'\\' => match self.bump() {
                b'n' => b'\n',
                b't' => b'\t',
                b'r' => b'\r',
                b'0' => 0,
                b'\\' => b'\\',
                b'\'' => b'\'',
                b'"' => b'"',
                other => {
                    return self.err(pos, format!("unknown escape `\\{}`", other as char))
                }
            },
            b'\'' | b'\n' | 0 => return self.err(pos, "empty or unterminated character constant"),
            c => c,
        };
        if self.bump() != b'\'' {
            return self.err(pos, "unterminated character constant");
        }
        Ok(Tok::Int(u64::from(c), false, true))
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer {
        src: src.as_bytes(),
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia()?;
        let pos = lx.pos();
        let c = lx.peek(0);
        let tok = if lx.i >= lx.src.len() {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let mut s = String::new();
            while lx.peek(0).is_ascii_alphanumeric() || lx.peek(0) == b'_' {
                s.push(lx.bump() as char);
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() || (c == b'.' && lx.peek(1).is_ascii_digit()) {
            lx.number(pos)?
        } else if c == b'\'' {
            lx.char_lit(pos)?
        } else if c == b'"' {
            return lx.err(pos, "string literals are not supported");
        } else if c == b'#' {
            return lx.err(pos, "preprocessor directives are not supported");
        } else if let Some(p) = PUNCTS
            .iter()
            .find(|p| lx.src[lx.i..].starts_with(p.as_bytes()))
        {
            for _ in 0..p.len() {
                lx.bump();
            }
            Tok::Punct(p)
        } else {
            let ch = src[lx.i..].chars().next().unwrap_or('?');
            return lx.err(pos, format!("unexpected character `{}`", ch));
        };
        out.push(Token { tok, pos });
    }
}

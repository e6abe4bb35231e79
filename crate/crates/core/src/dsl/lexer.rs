use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eq,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Eq => "'='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let single = |tok| Token {
            tok,
            line: start_line,
            col: start_col,
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            '+' => out.push(single(Tok::Plus)),
            '-' => out.push(single(Tok::Minus)),
            '*' => out.push(single(Tok::Star)),
            '/' => out.push(single(Tok::Slash)),
            '^' => out.push(single(Tok::Caret)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '[' => out.push(single(Tok::LBracket)),
            ']' => out.push(single(Tok::RBracket)),
            ',' => out.push(single(Tok::Comma)),
            ';' => out.push(single(Tok::Semi)),
            '=' => out.push(single(Tok::Eq)),
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                let value: f64 = text.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::Lexical,
                    line: start_line,
                    col: start_col,
                    message: format!("malformed number '{text}'"),
                })?;
                out.push(Token {
                    tok: Tok::Num(value),
                    line: start_line,
                    col: start_col,
                });
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: start_line,
                    col: start_col,
                });
                continue;
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Lexical,
                    line,
                    col,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("dim 3 # three\nvar x\n  form w = 1.5e-3*dx").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(kinds[1], Tok::Num(3.0));
        assert_eq!(kinds[2], Tok::Ident("var".into()));
        assert_eq!((toks[2].line, toks[2].col), (2, 1));
        assert_eq!((toks[4].line, toks[4].col), (3, 3));
        assert!(kinds.contains(&Tok::Num(1.5e-3)));
        assert_eq!(kinds.last(), Some(&Tok::Eof));
    }

    #[test]
    fn bad_character() {
        let err = tokenize("var x\nform w = dx $").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Lexical);
        assert_eq!((err.line, err.col), (2, 13));
    }
}

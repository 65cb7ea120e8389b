use super::{PatternError, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Int(u64),
    Arrow,
    Punct(char),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Int(n) => n.to_string(),
            Tok::Arrow => "`->`".into(),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, PatternError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        let err = |message: String| PatternError::Syntax {
            line: span.line,
            col: span.col,
            message,
        };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() != Some(&'/') {
                    return Err(err("expected `//` comment".into()));
                }
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '-' => {
                bump!();
                if chars.peek() != Some(&'>') {
                    return Err(err("expected `->`".into()));
                }
                bump!();
                out.push(Token {
                    tok: Tok::Arrow,
                    span,
                });
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\n') | None => return Err(err("unterminated string".into())),
                        Some(c) => s.push(c),
                    }
                }
                out.push(Token {
                    tok: Tok::Str(s),
                    span,
                });
            }
            '{' | '}' | ':' | ';' | ',' | '[' | ']' | '(' | ')' => {
                bump!();
                out.push(Token {
                    tok: Tok::Punct(c),
                    span,
                });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                let n = s
                    .parse::<u64>()
                    .map_err(|_| err(format!("integer `{s}` out of range")))?;
                out.push(Token {
                    tok: Tok::Int(n),
                    span,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                out.push(Token {
                    tok: Tok::Ident(s),
                    span,
                });
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("a // note\n  b -> \"x y\" 12;").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Ident("b".into()),
                Tok::Arrow,
                Tok::Str("x y".into()),
                Tok::Int(12),
                Tok::Punct(';'),
                Tok::Eof
            ]
        );
        assert_eq!(toks[1].span, Span { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(matches!(
            tokenize("a $"),
            Err(PatternError::Syntax { line: 1, col: 3, .. })
        ));
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("a / b").is_err());
    }
}

use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Token {
    pub(super) fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::End => "end of input".into(),
        }
    }
}

/// A token with the character offset where it starts.
#[derive(Debug, Clone, PartialEq)]
pub(super) struct Spanned {
    pub token: Token,
    pub pos: usize,
}

pub(super) fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            ',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(token) = single {
            out.push(Spanned { token, pos: start });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            i = scan_number(&chars, i);
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError {
                kind: ParseErrorKind::InvalidNumber(text.clone()),
                position: start,
            })?;
            out.push(Spanned {
                token: Token::Num(value),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                token: Token::Ident(chars[start..i].iter().collect()),
                pos: start,
            });
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(c),
                position: start,
            });
        }
    }
    out.push(Spanned {
        token: Token::End,
        pos: chars.len(),
    });
    Ok(out)
}

/// Digits, an optional fraction and an optional exponent. An `e` only starts an
/// exponent when digits follow, so `2e` lexes as `2` then the constant `e`.
fn scan_number(chars: &[char], mut i: usize) -> usize {
    let digits = |mut j: usize| {
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    i = digits(i);
    if i < chars.len() && chars[i] == '.' {
        i = digits(i + 1);
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        if j < chars.len() && chars[j].is_ascii_digit() {
            i = digits(j);
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(src: &str) -> Vec<Token> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|s| s.token)
            .collect()
    }

    #[test]
    fn numbers() {
        assert_eq!(tokens("1.5e-3"), vec![Token::Num(1.5e-3), Token::End]);
        assert_eq!(tokens(".25"), vec![Token::Num(0.25), Token::End]);
        assert_eq!(
            tokens("2e"),
            vec![Token::Num(2.0), Token::Ident("e".into()), Token::End]
        );
        assert_eq!(
            tokenize("1 + .").unwrap_err(),
            ParseError {
                kind: ParseErrorKind::InvalidNumber(".".into()),
                position: 4
            }
        );
    }

    #[test]
    fn positions_count_characters() {
        let t = tokenize("π + x").unwrap_err();
        assert_eq!(t.position, 0);
        let t = tokenize("x1 *  $").unwrap_err();
        assert_eq!(t.kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!(t.position, 6);
        let s = tokenize("x1*").unwrap();
        assert_eq!(s.last().unwrap().pos, 3);
    }
}

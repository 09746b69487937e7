//! Tokenizer for the PDDL subset. Tracks line and column for error spans;
//! `;` starts a comment that runs to end of line.

use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    LParen,
    RParen,
    Symbol(String),
    Number(f64),
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::LParen => "'('".to_string(),
            Token::RParen => "')'".to_string(),
            Token::Symbol(s) => format!("'{s}'"),
            Token::Number(n) => format!("number {n}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub token: Token,
    pub line: u32,
    pub col: u32,
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                tokens.push(Spanned { token: Token::LParen, line, col });
                chars.next();
                col += 1;
            }
            ')' => {
                tokens.push(Spanned { token: Token::RParen, line, col });
                chars.next();
                col += 1;
            }
            _ => {
                let (start_line, start_col) = (line, col);
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                let first = word.chars().next().expect("word is non-empty");
                let numeric_start = first.is_ascii_digit()
                    || ((first == '-' || first == '+' || first == '.')
                        && word.chars().nth(1).is_some_and(|c| c.is_ascii_digit()));
                let token = if numeric_start {
                    match word.parse::<f64>() {
                        Ok(n) => Token::Number(n),
                        Err(_) => {
                            return Err(ParseError {
                                line: start_line,
                                col: start_col,
                                kind: ParseErrorKind::Syntax {
                                    expected: "a number".to_string(),
                                    found: format!("'{word}'"),
                                },
                            })
                        }
                    }
                } else {
                    Token::Symbol(word)
                };
                tokens.push(Spanned { token, line: start_line, col: start_col });
            }
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_and_comments() {
        let toks = tokenize("(a ; note\n  b2 -3.5)").unwrap();
        assert_eq!(toks.len(), 5);
        assert_eq!(toks[1].token, Token::Symbol("a".into()));
        assert_eq!((toks[2].line, toks[2].col), (2, 3));
        assert_eq!(toks[3].token, Token::Number(-3.5));
    }

    #[test]
    fn question_and_colon_symbols() {
        let toks = tokenize("?from :action total-cost").unwrap();
        let syms: Vec<_> = toks
            .iter()
            .map(|t| match &t.token {
                Token::Symbol(s) => s.clone(),
                _ => panic!(),
            })
            .collect();
        assert_eq!(syms, vec!["?from", ":action", "total-cost"]);
    }
}

use super::lexer::{tokenize, Spanned, Token};
use super::{BinOp, Constant, Func, Node, ParseError, ParseErrorKind};

// Binding powers: (left, right). Lower binds looser.
const ADD: (u8, u8) = (1, 2);
const MUL: (u8, u8) = (3, 4);
const POW: (u8, u8) = (6, 5);
const PREFIX_MINUS: u8 = 7;

pub(super) fn parse(src: &str, dims: usize) -> Result<Node, ParseError> {
    let tokens = tokenize(src)?;
    if tokens.len() == 1 {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            position: 0,
        });
    }
    let mut p = Parser {
        tokens,
        at: 0,
        dims,
    };
    let root = p.expr(0)?;
    match p.peek() {
        Token::End => Ok(root),
        _ => Err(p.unexpected("an operator or end of input")),
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    at: usize,
    dims: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].token
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Token::End => ParseErrorKind::UnexpectedEnd { expected },
            t => ParseErrorKind::UnexpectedToken {
                found: t.describe(),
                expected,
            },
        };
        ParseError {
            kind,
            position: self.pos(),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Node, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, (l_bp, r_bp)) = match self.peek() {
                Token::Plus => (BinOp::Add, ADD),
                Token::Minus => (BinOp::Sub, ADD),
                Token::Star => (BinOp::Mul, MUL),
                Token::Slash => (BinOp::Div, MUL),
                Token::Caret => (BinOp::Pow, POW),
                _ => break,
            };
            if l_bp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(r_bp)?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Node, ParseError> {
        match self.peek().clone() {
            Token::Num(v) => {
                self.bump();
                Ok(Node::Num(v))
            }
            Token::Minus => {
                self.bump();
                Ok(Node::Neg(Box::new(self.expr(PREFIX_MINUS)?)))
            }
            Token::LParen => {
                self.bump();
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::Ident(name) => {
                let pos = self.pos();
                self.bump();
                self.identifier(&name, pos)
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Token::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }

    fn identifier(&mut self, name: &str, pos: usize) -> Result<Node, ParseError> {
        if let Some(func) = Func::from_name(name) {
            return self.call(func, pos);
        }
        match name {
            "pi" => return Ok(Node::Const(Constant::Pi)),
            "e" => return Ok(Node::Const(Constant::E)),
            _ => {}
        }
        if let Some(index) = variable_index(name, self.dims) {
            if index >= self.dims {
                return Err(ParseError {
                    kind: ParseErrorKind::VariableOutOfRange {
                        name: name.to_string(),
                        dims: self.dims,
                    },
                    position: pos,
                });
            }
            return Ok(Node::Var(index));
        }
        Err(ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            position: pos,
        })
    }

    fn call(&mut self, func: Func, pos: usize) -> Result<Node, ParseError> {
        if *self.peek() != Token::LParen {
            return Err(self.unexpected("`(` after a function name"));
        }
        self.bump();
        let mut args = Vec::new();
        if *self.peek() != Token::RParen {
            args.push(self.expr(0)?);
            while *self.peek() == Token::Comma {
                self.bump();
                args.push(self.expr(0)?);
            }
        }
        self.expect_rparen()?;
        if args.len() != 1 {
            return Err(ParseError {
                kind: ParseErrorKind::Arity {
                    name: func.name(),
                    found: args.len(),
                },
                position: pos,
            });
        }
        Ok(Node::Call(
            func,
            Box::new(args.pop().expect("one argument")),
        ))
    }
}

/// Zero-based index for `x` (one-dimensional only) or `x1`, `x2`, ...
fn variable_index(name: &str, dims: usize) -> Option<usize> {
    if name == "x" && dims == 1 {
        return Some(0);
    }
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().map(|k| k - 1)
}

use thiserror::Error;

use super::{BinOp, Constant, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: String },
    UnexpectedEnd { expected: String },
    UnknownIdentifier(String),
    Arity { func: String, expected: usize, found: usize },
    InvalidNumber(String),
}

/// Syntax error with 1-based line and column of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {}", describe(.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Empty => "empty expression".into(),
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
        ParseErrorKind::UnexpectedToken { found, expected } => {
            format!("expected {expected}, found '{found}'")
        }
        ParseErrorKind::UnexpectedEnd { expected } => {
            format!("unexpected end of input, expected {expected}")
        }
        ParseErrorKind::UnknownIdentifier(name) => format!("unknown identifier '{name}'"),
        ParseErrorKind::Arity {
            func,
            expected,
            found,
        } => format!("function '{func}' takes {expected} argument(s), got {found}"),
        ParseErrorKind::InvalidNumber(s) => format!("invalid number '{s}'"),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<(Vec<(Tok, Pos)>, Pos), ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when followed by digits, so `2e` stays `2` `e`
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
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Tok::Num(v),
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidNumber(text),
                        line: pos.line,
                        column: pos.column,
                    })
                }
            }
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnexpectedChar(c),
                        line: pos.line,
                        column: pos.column,
                    })
                }
            }
        };
        column += i - start;
        out.push((tok, pos));
    }
    Ok((out, Pos { line, column }))
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let p = self.pos();
        ParseError {
            kind,
            line: p.line,
            column: p.column,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.err(ParseErrorKind::UnexpectedToken {
                found: t.text(),
                expected: expected.into(),
            }),
            None => self.err(ParseErrorKind::UnexpectedEnd {
                expected: expected.into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.at += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.at += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.at += 1;
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("an operand"));
        };
        match tok {
            Tok::Num(v) => {
                self.at += 1;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.at += 1;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let here = self.pos();
                self.at += 1;
                match name.as_str() {
                    "t" => return Ok(Expr::Var(Var::T)),
                    "x" => return Ok(Expr::Var(Var::X)),
                    "pi" => return Ok(Expr::Const(Constant::Pi)),
                    "e" => return Ok(Expr::Const(Constant::E)),
                    _ => {}
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        line: here.line,
                        column: here.column,
                    });
                };
                if self.peek() != Some(&Tok::LParen) {
                    return Err(self.unexpected(&format!("'(' after '{name}'")));
                }
                self.at += 1;
                let mut args = Vec::new();
                if self.peek() != Some(&Tok::RParen) {
                    args.push(self.expr()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.at += 1;
                        args.push(self.expr()?);
                    }
                }
                self.expect_rparen()?;
                if args.len() != 1 {
                    return Err(ParseError {
                        kind: ParseErrorKind::Arity {
                            func: name,
                            expected: 1,
                            found: args.len(),
                        },
                        line: here.line,
                        column: here.column,
                    });
                }
                Ok(Expr::Call(func, Box::new(args.pop().unwrap())))
            }
            _ => Err(self.unexpected("an operand")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::RParen) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected("')'"))
        }
    }
}

pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let (toks, end) = lex(source)?;
    if toks.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            line: 1,
            column: 1,
        });
    }
    let mut p = Parser { toks, at: 0, end };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(src: &str) -> (usize, usize) {
        let e = parse(src).unwrap_err();
        (e.line, e.column)
    }

    #[test]
    fn parses_call_with_product() {
        let e = parse("sin(pi*x/2)").unwrap();
        match e {
            Expr::Call(Func::Sin, arg) => {
                assert!(matches!(*arg, Expr::Binary(BinOp::Div, _, _)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_caret_is_error_at_column_three() {
        let err = parse("t^^2").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(err.to_string().starts_with("1:3:"));
    }

    #[test]
    fn precedence_and_associativity() {
        let v = |s: &str| parse(s).unwrap().evaluate(0.0, 0.0).unwrap();
        assert_eq!(v("1+2*3"), 7.0);
        assert_eq!(v("2^3^2"), 512.0);
        assert_eq!(v("-2^2"), -4.0);
        assert_eq!(v("8/4/2"), 1.0);
        assert_eq!(v("8-4-2"), 2.0);
        assert_eq!(v("2^-1"), 0.5);
        assert_eq!(v("1.5e2 + 2E-1"), 150.2);
        assert_eq!(v("--3"), 3.0);
    }

    #[test]
    fn error_kinds_and_positions() {
        assert!(matches!(
            parse("foo(t)").unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
        assert!(matches!(
            parse("sin(t, x)").unwrap_err().kind,
            ParseErrorKind::Arity { found: 2, .. }
        ));
        assert!(matches!(
            parse("sin()").unwrap_err().kind,
            ParseErrorKind::Arity { found: 0, .. }
        ));
        assert!(matches!(parse("   ").unwrap_err().kind, ParseErrorKind::Empty));
        assert_eq!(col("1 + $"), (1, 5));
        assert_eq!(col("1 +\n  * 2"), (2, 3));
        assert_eq!(col("(1 + 2"), (1, 7));
        assert_eq!(col("1 2"), (1, 3));
        assert_eq!(col("sin x"), (1, 5));
        assert!(matches!(
            parse("1.2.3").unwrap_err().kind,
            ParseErrorKind::InvalidNumber(_)
        ));
    }
}

use super::{
    BinOp, Constant, Expr, ExprKind, Func, ParseError, ParseErrorKind, SourceSpan, Var,
    PREFIX_NEG_BP,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(BinOp),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn err(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> ParseError {
    ParseError {
        kind,
        span,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |tok| Token {
            tok,
            span: SourceSpan::new(start, start + 1),
        };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push(single(Tok::Op(BinOp::Add))),
            b'-' => out.push(single(Tok::Op(BinOp::Sub))),
            b'*' => out.push(single(Tok::Op(BinOp::Mul))),
            b'/' => out.push(single(Tok::Op(BinOp::Div))),
            b'^' => out.push(single(Tok::Op(BinOp::Pow))),
            b'(' => out.push(single(Tok::LParen)),
            b')' => out.push(single(Tok::RParen)),
            b',' => out.push(single(Tok::Comma)),
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[i..j];
                let span = SourceSpan::new(i, j);
                let v: f64 = text.parse().map_err(|_| {
                    err(
                        ParseErrorKind::Lexical,
                        span,
                        format!("malformed number `{text}`"),
                    )
                })?;
                if !v.is_finite() {
                    return Err(err(
                        ParseErrorKind::Lexical,
                        span,
                        format!("number `{text}` is out of range"),
                    ));
                }
                out.push(Token {
                    tok: Tok::Num(v),
                    span,
                });
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[i..j].to_string()),
                    span: SourceSpan::new(i, j),
                });
                i = j;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(err(
                    ParseErrorKind::Lexical,
                    SourceSpan::new(i, i + ch.len_utf8()),
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn end_span(&self) -> SourceSpan {
        SourceSpan::new(self.src.len(), self.src.len())
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Some(Token {
                    tok: Tok::Op(op), ..
                }) => *op,
                _ => break,
            };
            let (lbp, rbp) = op.binding_power();
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expr(rbp)?;
            let span = lhs.span().join(rhs.span());
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next() else {
            return Err(err(
                ParseErrorKind::UnexpectedEnd,
                self.end_span(),
                "expected an operand, found end of input",
            ));
        };
        match tok.tok {
            Tok::Num(v) => Ok(Expr::new(ExprKind::Num(v), tok.span)),
            Tok::Op(BinOp::Sub) => {
                let operand = self.expr(PREFIX_NEG_BP)?;
                let span = tok.span.join(operand.span());
                Ok(Expr::new(ExprKind::Neg(Box::new(operand)), span))
            }
            Tok::LParen => {
                let inner = self.expr(0)?;
                match self.next() {
                    Some(Token {
                        tok: Tok::RParen,
                        span,
                    }) => {
                        let full = tok.span.join(span);
                        // Parentheses do not create nodes; widen the span so
                        // errors point at the whole group.
                        Ok(Expr::new(inner.kind, full))
                    }
                    Some(other) => Err(unexpected(&other, "`)`")),
                    None => Err(err(
                        ParseErrorKind::UnbalancedParen,
                        tok.span,
                        "unclosed `(`",
                    )),
                }
            }
            Tok::Ident(name) => self.identifier(name, tok.span),
            Tok::RParen => Err(err(
                ParseErrorKind::UnbalancedParen,
                tok.span,
                "`)` without matching `(`",
            )),
            _ => Err(unexpected(&tok, "an operand")),
        }
    }

    fn identifier(&mut self, name: String, span: SourceSpan) -> Result<Expr, ParseError> {
        match name.as_str() {
            "t" => return Ok(Expr::new(ExprKind::Var(Var::T), span)),
            "x" => return Ok(Expr::new(ExprKind::Var(Var::X), span)),
            "pi" => return Ok(Expr::new(ExprKind::Const(Constant::Pi), span)),
            "e" => return Ok(Expr::new(ExprKind::Const(Constant::E), span)),
            _ => {}
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(err(
                ParseErrorKind::UnknownIdentifier,
                span,
                format!(
                    "unknown identifier `{name}` (variables: t, x; constants: pi, e; \
                     functions: sin, cos, exp, ln, abs, sqrt, erfc)"
                ),
            ));
        };
        let open = match self.next() {
            Some(Token {
                tok: Tok::LParen,
                span,
            }) => span,
            _ => {
                return Err(err(
                    ParseErrorKind::Arity,
                    span,
                    format!("function `{name}` needs an argument in parentheses"),
                ))
            }
        };
        let mut args = Vec::new();
        if matches!(self.peek(), Some(Token { tok: Tok::RParen, .. })) {
            let close = self.next().unwrap().span;
            return Err(err(
                ParseErrorKind::Arity,
                span.join(close),
                format!("`{name}` takes {} argument, got 0", func.arity()),
            ));
        }
        loop {
            args.push(self.expr(0)?);
            match self.next() {
                Some(Token {
                    tok: Tok::Comma, ..
                }) => continue,
                Some(Token {
                    tok: Tok::RParen,
                    span: close,
                }) => {
                    let full = span.join(close);
                    if args.len() != func.arity() {
                        return Err(err(
                            ParseErrorKind::Arity,
                            full,
                            format!(
                                "`{name}` takes {} argument, got {}",
                                func.arity(),
                                args.len()
                            ),
                        ));
                    }
                    let arg = args.pop().unwrap();
                    return Ok(Expr::new(ExprKind::Call(func, Box::new(arg)), full));
                }
                Some(other) => return Err(unexpected(&other, "`,` or `)`")),
                None => {
                    return Err(err(
                        ParseErrorKind::UnbalancedParen,
                        open,
                        format!("unclosed `(` in call to `{name}`"),
                    ))
                }
            }
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(op) => format!("`{}`", op.symbol()),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
    }
}

fn unexpected(tok: &Token, expected: &str) -> ParseError {
    err(
        ParseErrorKind::UnexpectedToken,
        tok.span,
        format!("expected {expected}, found {}", describe(&tok.tok)),
    )
}

/// Parses an expression in t and x.
pub fn parse(src: &str) -> Result<super::Expr, ParseError> {
    let tokens = lex(src)?;
    if tokens.is_empty() {
        return Err(err(
            ParseErrorKind::UnexpectedEnd,
            SourceSpan::new(0, src.len()),
            "empty expression",
        ));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        src,
    };
    let e = p.expr(0)?;
    if let Some(tok) = p.next() {
        if tok.tok == Tok::RParen {
            return Err(err(
                ParseErrorKind::UnbalancedParen,
                tok.span,
                "`)` without matching `(`",
            ));
        }
        return Err(unexpected(&tok, "an operator or end of input"));
    }
    Ok(e)
}

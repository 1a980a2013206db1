//! A small expression language for the forcing term f(t, x).
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          right associative
//! atom    := number | 't' | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | ln | abs | sqrt | erfc
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`, and `2^-1` is
//! accepted. Absolute values are written `abs(x)`.

mod parse;

use std::fmt;

use thiserror::Error;

use crate::special::erfc;

pub use parse::parse;

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn join(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// Two-line excerpt with a caret underline, for terminal messages.
    pub fn underline(&self, src: &str) -> String {
        let start = self.start.min(src.len());
        let end = self.end.clamp(start, src.len());
        let lead = src[..start].chars().count();
        let width = src[start..end].chars().count().max(1);
        format!("  {src}\n  {}{}", " ".repeat(lead), "^".repeat(width))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    /// Left and right binding power.
    pub(crate) fn binding_power(self) -> (u8, u8) {
        match self {
            BinOp::Add | BinOp::Sub => (1, 2),
            BinOp::Mul | BinOp::Div => (3, 4),
            BinOp::Pow => (8, 7),
        }
    }
}

/// Binding power of prefix minus.
pub(crate) const PREFIX_NEG_BP: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
    Sqrt,
    Erfc,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Ln,
        Func::Abs,
        Func::Sqrt,
        Func::Erfc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Erfc => "erfc",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        1
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Ln => {
                if v > 0.0 {
                    v.ln()
                } else {
                    f64::NAN
                }
            }
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
            Func::Erfc => erfc(v),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Parsed expression. Equality compares structure and ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    kind: ExprKind,
    span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    UnknownIdentifier,
    Arity,
    UnbalancedParen,
    UnexpectedToken,
    UnexpectedEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at {span})")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} (at {span}, t = {t}, x = {x})")]
pub struct EvalError {
    pub span: SourceSpan,
    pub message: String,
    pub t: f64,
    pub x: f64,
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Self { kind, span }
    }

    pub fn kind(&self) -> &ExprKind {
        &self.kind
    }

    pub fn span(&self) -> SourceSpan {
        self.span
    }

    pub fn num(v: f64) -> Self {
        Self::new(ExprKind::Num(v), SourceSpan::default())
    }

    pub fn var(v: Var) -> Self {
        Self::new(ExprKind::Var(v), SourceSpan::default())
    }

    pub fn constant(c: Constant) -> Self {
        Self::new(ExprKind::Const(c), SourceSpan::default())
    }

    pub fn neg(e: Expr) -> Self {
        Self::new(ExprKind::Neg(Box::new(e)), SourceSpan::default())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Self::new(
            ExprKind::Binary(op, Box::new(l), Box::new(r)),
            SourceSpan::default(),
        )
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Self::new(ExprKind::Call(f, Box::new(arg)), SourceSpan::default())
    }

    /// Evaluates at (t, x). Any NaN or infinite intermediate is an error
    /// located at the innermost node that produced it.
    pub fn eval(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        let v = match &self.kind {
            ExprKind::Num(v) => *v,
            ExprKind::Var(Var::T) => t,
            ExprKind::Var(Var::X) => x,
            ExprKind::Const(c) => c.value(),
            ExprKind::Neg(e) => -e.eval(t, x)?,
            ExprKind::Binary(op, l, r) => {
                let a = l.eval(t, x)?;
                let b = r.eval(t, x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ExprKind::Call(f, arg) => f.apply(arg.eval(t, x)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError {
                span: self.span,
                message: format!("`{self}` evaluates to {v}"),
                t,
                x,
            })
        }
    }

    /// Precedence level used by the printer; higher binds tighter.
    fn level(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, _, _) => op.binding_power().0,
            ExprKind::Neg(_) => PREFIX_NEG_BP,
            _ => u8::MAX,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Num(a), ExprKind::Num(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Const(a), ExprKind::Const(b)) => a == b,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a == b,
            (ExprKind::Binary(o1, l1, r1), ExprKind::Binary(o2, l2, r2)) => {
                o1 == o2 && l1 == l2 && r1 == r2
            }
            (ExprKind::Call(f1, a1), ExprKind::Call(f2, a2)) => f1 == f2 && a1 == a2,
            _ => false,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimum parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => {
                if *v < 0.0 || v.is_sign_negative() {
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            ExprKind::Var(Var::T) => f.write_str("t"),
            ExprKind::Var(Var::X) => f.write_str("x"),
            ExprKind::Const(Constant::Pi) => f.write_str("pi"),
            ExprKind::Const(Constant::E) => f.write_str("e"),
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                write_wrapped(f, e, e.level() < PREFIX_NEG_BP)
            }
            ExprKind::Binary(op, l, r) => {
                let (lbp, _) = op.binding_power();
                let wrap_left = match op {
                    BinOp::Pow => l.level() <= lbp,
                    _ => l.level() < lbp,
                };
                let wrap_right = match (op, &r.kind) {
                    (_, ExprKind::Neg(_)) => true,
                    (BinOp::Pow, _) => r.level() < lbp,
                    _ => r.level() <= lbp,
                };
                write_wrapped(f, l, wrap_left)?;
                write!(f, "{}", op.symbol())?;
                write_wrapped(f, r, wrap_right)
            }
            ExprKind::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

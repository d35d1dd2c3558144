//! A tiny scalar expression language for defining analytic fields on grids.
//!
//! Grammar (standard precedence, left associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := NUMBER | 'pi' | 'x'DIGITS | FUNC '(' expr (',' expr)* ')' | '(' expr ')'
//! FUNC    := sin cos tan sinh cosh tanh exp sqrt atan2
//! ```
//!
//! Variables `x1..xr` are the grid coordinates. Every error carries the byte
//! offset it was detected at.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Sqrt,
    Atan2,
}

impl Func {
    fn parse(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "tan" => Some(Func::Tan),
            "sinh" => Some(Func::Sinh),
            "cosh" => Some(Func::Cosh),
            "tanh" => Some(Func::Tanh),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "atan2" => Some(Func::Atan2),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Atan2 => "atan2",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }
}

/// A parsed expression node. Equality ignores source offsets, so
/// parse(print(t)) == t structurally.
#[derive(Clone, Debug)]
pub struct ScalarExpr {
    pub kind: ExprKind,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Pi,
    /// 1-based coordinate index.
    Var(usize),
    Neg(Box<ScalarExpr>),
    Bin(BinOp, Box<ScalarExpr>, Box<ScalarExpr>),
    Call(Func, Vec<ScalarExpr>),
}

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at byte {}: expected {}", self.offset, self.expected)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "evaluation error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for EvalError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8, what: &str) -> Result<(), SyntaxError> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(SyntaxError {
                offset: self.pos,
                expected: what.to_string(),
            })
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let offset = lhs.offset;
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ScalarExpr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let offset = lhs.offset;
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ScalarExpr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, SyntaxError> {
        if self.peek() == Some(b'-') {
            let offset = self.pos;
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(ScalarExpr {
                kind: ExprKind::Neg(Box::new(inner)),
                offset,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<ScalarExpr, SyntaxError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')', "closing parenthesis")?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(SyntaxError {
                offset: self.pos,
                expected: "a number, variable, function or parenthesis".to_string(),
            }),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr, SyntaxError> {
        let offset = self.pos;
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == b'.')
        {
            self.pos += 1;
        }
        if self.src.get(self.pos).is_some_and(|c| *c == b'e' || *c == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.src.get(self.pos).is_some_and(|c| *c == b'+' || *c == b'-') {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| SyntaxError {
            offset,
            expected: "a valid number".to_string(),
        })?;
        Ok(ScalarExpr {
            kind: ExprKind::Num(value),
            offset,
        })
    }

    fn identifier(&mut self) -> Result<ScalarExpr, SyntaxError> {
        let offset = self.pos;
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric())
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if name == "pi" {
            return Ok(ScalarExpr {
                kind: ExprKind::Pi,
                offset,
            });
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| SyntaxError {
                    offset,
                    expected: "a coordinate index".to_string(),
                })?;
                if index == 0 {
                    return Err(SyntaxError {
                        offset,
                        expected: "coordinate indices start at x1".to_string(),
                    });
                }
                return Ok(ScalarExpr {
                    kind: ExprKind::Var(index),
                    offset,
                });
            }
        }
        let func = Func::parse(name).ok_or_else(|| SyntaxError {
            offset,
            expected: format!("a known function, found {name:?}"),
        })?;
        self.expect(b'(', "opening parenthesis after function name")?;
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')', "closing parenthesis of the argument list")?;
        if args.len() != func.arity() {
            return Err(SyntaxError {
                offset,
                expected: format!("{} takes {} argument(s)", func.name(), func.arity()),
            });
        }
        Ok(ScalarExpr {
            kind: ExprKind::Call(func, args),
            offset,
        })
    }
}

/// Parse an expression; the whole input must be consumed.
pub fn parse_expr(src: &str) -> Result<ScalarExpr, SyntaxError> {
    let mut parser = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(SyntaxError {
            offset: parser.pos,
            expected: "an operator or end of input".to_string(),
        });
    }
    Ok(expr)
}

impl ScalarExpr {
    /// Largest coordinate index used (0 when constant).
    pub fn max_var(&self) -> usize {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Pi => 0,
            ExprKind::Var(i) => *i,
            ExprKind::Neg(inner) => inner.max_var(),
            ExprKind::Bin(_, a, b) => a.max_var().max(b.max_var()),
            ExprKind::Call(_, args) => args.iter().map(ScalarExpr::max_var).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, coords: &[f64]) -> Result<f64, EvalError> {
        let fail = |message: String| EvalError {
            offset: self.offset,
            message,
        };
        let value = match &self.kind {
            ExprKind::Num(v) => *v,
            ExprKind::Pi => std::f64::consts::PI,
            ExprKind::Var(i) => *coords.get(*i - 1).ok_or_else(|| {
                fail(format!(
                    "variable x{} exceeds the grid dimension r = {}",
                    i,
                    coords.len()
                ))
            })?,
            ExprKind::Neg(inner) => -inner.eval(coords)?,
            ExprKind::Bin(op, a, b) => {
                let x = a.eval(coords)?;
                let y = b.eval(coords)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(fail("division by zero".to_string()));
                        }
                        x / y
                    }
                }
            }
            ExprKind::Call(func, args) => {
                let x = args[0].eval(coords)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(fail(format!("sqrt of negative value {x}")));
                        }
                        x.sqrt()
                    }
                    Func::Atan2 => x.atan2(args[1].eval(coords)?),
                }
            }
        };
        if !value.is_finite() {
            return Err(fail("expression evaluated to a non-finite value".to_string()));
        }
        Ok(value)
    }
}

impl fmt::Display for ScalarExpr {
    /// Canonical fully parenthesized printing; parse(print(t)) == t.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => write!(f, "{v}"),
            ExprKind::Pi => write!(f, "pi"),
            ExprKind::Var(i) => write!(f, "x{i}"),
            ExprKind::Neg(inner) => write!(f, "(-{inner})"),
            ExprKind::Bin(op, a, b) => {
                let symbol = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a}{symbol}{b})")
            }
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{arg}")?;
                }
                write!(f, ")")
            }
        }
    }
}

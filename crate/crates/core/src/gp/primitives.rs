//! The primitive set G-heuristics are built from.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Largest magnitude any intermediate value may take.
pub const VALUE_BOUND: f64 = 1e100;
/// Divisors at or below this magnitude make `PDIV` return 1.
pub const PDIV_EPSILON: f64 = 1e-12;
/// Ephemeral constants are drawn from `[0, EPHEMERAL_MAX]`.
pub const EPHEMERAL_MAX: f64 = 10.0;

/// Edge-dependent inputs and fixed constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terminal {
    GHatT,
    HHatT,
    CHat,
    EBarS,
    EBarEdge,
    DBarT,
    Dim,
    US,
    UT,
    WDyn,
    NSamples,
    ConstPi,
    ConstOne,
}

impl Terminal {
    pub const ALL: [Terminal; 13] = [
        Terminal::GHatT,
        Terminal::HHatT,
        Terminal::CHat,
        Terminal::EBarS,
        Terminal::EBarEdge,
        Terminal::DBarT,
        Terminal::Dim,
        Terminal::US,
        Terminal::UT,
        Terminal::WDyn,
        Terminal::NSamples,
        Terminal::ConstPi,
        Terminal::ConstOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Terminal::GHatT => "G_HAT_T",
            Terminal::HHatT => "H_HAT_T",
            Terminal::CHat => "C_HAT",
            Terminal::EBarS => "E_BAR_S",
            Terminal::EBarEdge => "E_BAR_EDGE",
            Terminal::DBarT => "D_BAR_T",
            Terminal::Dim => "DIM",
            Terminal::US => "U_S",
            Terminal::UT => "U_T",
            Terminal::WDyn => "W_DYN",
            Terminal::NSamples => "N_SAMPLES",
            Terminal::ConstPi => "CONST_PI",
            Terminal::ConstOne => "CONST_ONE",
        }
    }
}

/// Fixed-arity operators. Every one of them is total on finite inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Add,
    Sub,
    Mul,
    PDiv,
    PLog1p,
    PSqrt,
    Abs,
    Min,
    Max,
}

impl Function {
    pub const ALL: [Function; 9] = [
        Function::Add,
        Function::Sub,
        Function::Mul,
        Function::PDiv,
        Function::PLog1p,
        Function::PSqrt,
        Function::Abs,
        Function::Min,
        Function::Max,
    ];
    pub const BINARY: [Function; 6] = [
        Function::Add,
        Function::Sub,
        Function::Mul,
        Function::PDiv,
        Function::Min,
        Function::Max,
    ];
    pub const UNARY: [Function; 3] = [Function::PLog1p, Function::PSqrt, Function::Abs];

    pub fn arity(self) -> usize {
        match self {
            Function::PLog1p | Function::PSqrt | Function::Abs => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::Add => "ADD",
            Function::Sub => "SUB",
            Function::Mul => "MUL",
            Function::PDiv => "PDIV",
            Function::PLog1p => "PLOG1P",
            Function::PSqrt => "PSQRT",
            Function::Abs => "ABS",
            Function::Min => "MIN",
            Function::Max => "MAX",
        }
    }

    /// Applies the operator. `b` is ignored by unary operators.
    pub fn apply(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Function::Add => a + b,
            Function::Sub => a - b,
            Function::Mul => a * b,
            Function::PDiv => {
                if b.abs() > PDIV_EPSILON {
                    a / b
                } else {
                    1.0
                }
            }
            Function::PLog1p => a.abs().ln_1p(),
            Function::PSqrt => a.abs().sqrt(),
            Function::Abs => a.abs(),
            Function::Min => a.min(b),
            Function::Max => a.max(b),
        };
        sanitize(v)
    }
}

/// Maps NaN to 0 and clamps to `±VALUE_BOUND`.
pub fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-VALUE_BOUND, VALUE_BOUND)
    }
}

/// One node of a prefix-encoded expression tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    Func(Function),
    Term(Terminal),
    Const(f64),
}

impl Symbol {
    pub fn arity(self) -> usize {
        match self {
            Symbol::Func(f) => f.arity(),
            _ => 0,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Func(func) => f.write_str(func.name()),
            Symbol::Term(t) => f.write_str(t.name()),
            Symbol::Const(c) => write!(f, "{c:?}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if let Some(t) = Terminal::ALL.iter().find(|t| t.name() == s) {
            return Ok(Symbol::Term(*t));
        }
        if let Some(f) = Function::ALL.iter().find(|f| f.name() == s) {
            return Ok(Symbol::Func(*f));
        }
        match s.parse::<f64>() {
            Ok(c) if c.is_finite() => Ok(Symbol::Const(c)),
            _ => Err(Error::Expression(format!("unknown symbol `{s}`"))),
        }
    }
}

/// Values of every terminal for one `(x_s, x_t)` edge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeContext {
    pub g_hat_t: f64,
    pub h_hat_t: f64,
    pub c_hat: f64,
    pub e_bar_s: f64,
    pub e_bar_edge: f64,
    pub d_bar_t: f64,
    pub dim: f64,
    pub u_s: f64,
    pub u_t: f64,
    pub w_dyn: f64,
    pub n_samples: f64,
}

impl EdgeContext {
    pub fn get(&self, t: Terminal) -> f64 {
        match t {
            Terminal::GHatT => self.g_hat_t,
            Terminal::HHatT => self.h_hat_t,
            Terminal::CHat => self.c_hat,
            Terminal::EBarS => self.e_bar_s,
            Terminal::EBarEdge => self.e_bar_edge,
            Terminal::DBarT => self.d_bar_t,
            Terminal::Dim => self.dim,
            Terminal::US => self.u_s,
            Terminal::UT => self.u_t,
            Terminal::WDyn => self.w_dyn,
            Terminal::NSamples => self.n_samples,
            Terminal::ConstPi => PI,
            Terminal::ConstOne => 1.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.g_hat_t,
            self.h_hat_t,
            self.c_hat,
            self.e_bar_s,
            self.e_bar_edge,
            self.d_bar_t,
            self.dim,
            self.u_s,
            self.u_t,
            self.w_dyn,
            self.n_samples,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

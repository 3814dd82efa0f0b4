//! The arithmetic-term AST and its text rendering.

use rug::Integer;
use std::fmt;

/// An arithmetic term: integer literals and variables combined with
/// addition, subtraction, multiplication, floored division, exponentiation
/// and the derived remainder operation.
///
/// `Mod(l, r)` is definitionally `l - r*floor(l/r)`; evaluating either form
/// yields the same value for every valid input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Non-negative integer constant.
    Literal(Integer),
    /// Named variable, resolved through [`crate::Bindings`] at evaluation time.
    Variable(String),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// Floored division: rounds toward negative infinity.
    FloorDiv(Box<Term>, Box<Term>),
    Pow(Box<Term>, Box<Term>),
    /// Remainder paired with floored division; its sign follows the divisor.
    Mod(Box<Term>, Box<Term>),
}

impl Term {
    pub fn lit(v: impl Into<Integer>) -> Term {
        let v = v.into();
        debug_assert!(v >= 0, "literals are non-negative; negate via Sub");
        Term::Literal(v)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Variable(name.into())
    }

    pub fn add(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: Term) -> Term {
        Term::FloorDiv(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, rhs: Term) -> Term {
        Term::Pow(Box::new(self), Box::new(rhs))
    }

    pub fn modulo(self, rhs: Term) -> Term {
        Term::Mod(Box::new(self), Box::new(rhs))
    }

    /// Expands `l % r` into `l - r*(l/r)`.
    pub fn mod_expansion(l: Term, r: Term) -> Term {
        l.clone().sub(r.clone().mul(l.div(r)))
    }

    /// Binding strength: additive 1, multiplicative 2, power 3, atoms 4.
    pub(crate) fn precedence(&self) -> u8 {
        match self {
            Term::Literal(_) | Term::Variable(_) => 4,
            Term::Pow(..) => 3,
            Term::Mul(..) | Term::FloorDiv(..) | Term::Mod(..) => 2,
            Term::Add(..) | Term::Sub(..) => 1,
        }
    }

    pub(crate) fn op_name(&self) -> &'static str {
        match self {
            Term::Literal(_) => "literal",
            Term::Variable(_) => "variable",
            Term::Add(..) => "add",
            Term::Sub(..) => "sub",
            Term::Mul(..) => "mul",
            Term::FloorDiv(..) => "floordiv",
            Term::Pow(..) => "pow",
            Term::Mod(..) => "mod",
        }
    }

    /// Visits every node in pre-order (parent before children, left to right).
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Literal(_) | Term::Variable(_) => {}
            Term::Add(l, r)
            | Term::Sub(l, r)
            | Term::Mul(l, r)
            | Term::FloorDiv(l, r)
            | Term::Pow(l, r)
            | Term::Mod(l, r) => {
                l.walk(f);
                r.walk(f);
            }
        }
    }

    /// Renders with minimal parenthesization; `crate::parse` recovers the
    /// exact tree from the result.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.fmt_into(&mut out);
        out
    }

    fn fmt_into(&self, out: &mut String) {
        let (l, op, r) = match self {
            Term::Literal(v) => {
                out.push_str(&v.to_string());
                return;
            }
            Term::Variable(name) => {
                out.push_str(name);
                return;
            }
            Term::Add(l, r) => (l, '+', r),
            Term::Sub(l, r) => (l, '-', r),
            Term::Mul(l, r) => (l, '*', r),
            Term::FloorDiv(l, r) => (l, '/', r),
            Term::Mod(l, r) => (l, '%', r),
            Term::Pow(l, r) => (l, '^', r),
        };
        let prec = self.precedence();
        // `^` is right-associative, the rest left-associative, so the parens
        // rule flips between the two sides.
        let (need_l, need_r) = if op == '^' {
            (l.precedence() <= prec, r.precedence() < prec)
        } else {
            (l.precedence() < prec, r.precedence() <= prec)
        };
        Self::fmt_child(l, need_l, out);
        out.push(op);
        Self::fmt_child(r, need_r, out);
    }

    fn fmt_child(child: &Term, parens: bool, out: &mut String) {
        if parens {
            out.push('(');
            child.fmt_into(out);
            out.push(')');
        } else {
            child.fmt_into(out);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

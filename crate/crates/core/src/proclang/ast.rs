//! Abstract syntax of process specification files.

use std::fmt;

/// A right-hand-side process term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Successful termination, written `tick`.
    Tick,
    /// The empty choice, written `0`.
    Stop,
    Var(String),
    /// `name.t`: an action, `delay`, or a declared unary operation symbol.
    Prefix(String, Box<Term>),
    /// `name(t1,...,tk)`: a declared operation symbol applied to arguments.
    Call(String, Vec<Term>),
    /// `t + u`, associating to the left.
    Choice(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigDecl {
    Actions(Vec<String>),
    Ops(Vec<(String, usize)>),
    Delay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonadChoice {
    Powerset,
    Maybe,
    Traces,
}

impl MonadChoice {
    pub fn name(self) -> &'static str {
        match self {
            MonadChoice::Powerset => "powerset",
            MonadChoice::Maybe => "maybe",
            MonadChoice::Traces => "traces",
        }
    }
}

/// A parsed specification: header plus one equation per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecAst {
    pub monad: MonadChoice,
    pub sig: SigDecl,
    pub equations: Vec<(String, Term)>,
}

impl Term {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, under_prefix: bool) -> fmt::Result {
        match self {
            Term::Tick => write!(f, "tick"),
            Term::Stop => write!(f, "0"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Prefix(a, t) => {
                write!(f, "{a}.")?;
                t.fmt_prec(f, true)
            }
            Term::Call(g, args) => {
                write!(f, "{g}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    arg.fmt_prec(f, false)?;
                }
                write!(f, ")")
            }
            Term::Choice(l, r) => {
                if under_prefix {
                    write!(f, "(")?;
                }
                l.fmt_prec(f, false)?;
                write!(f, " + ")?;
                // the right operand of a left-associated chain needs parens
                // only if it is itself a choice
                if matches!(r.as_ref(), Term::Choice(..)) {
                    write!(f, "(")?;
                    r.fmt_prec(f, false)?;
                    write!(f, ")")?;
                } else {
                    r.fmt_prec(f, false)?;
                }
                if under_prefix {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// Prints a specification in the canonical concrete syntax; parsing the
/// output reproduces the input.
pub fn print_spec(ast: &SpecAst) -> String {
    let mut out = String::new();
    match &ast.sig {
        SigDecl::Actions(letters) => {
            out.push_str("sig actions");
            for a in letters {
                out.push(' ');
                out.push_str(a);
            }
            out.push('\n');
        }
        SigDecl::Ops(ops) => {
            out.push_str("sig ops");
            for (name, arity) in ops {
                out.push_str(&format!(" {name}/{arity}"));
            }
            out.push('\n');
        }
        SigDecl::Delay => out.push_str("sig delay\n"),
    }
    out.push_str(&format!("monad {}\n", ast.monad.name()));
    for (v, t) in &ast.equations {
        out.push_str(&format!("{v} = {t}\n"));
    }
    out
}

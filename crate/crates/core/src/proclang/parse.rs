//! Lexer and recursive-descent parser for process specification files.
//!
//! Statements are newline-separated; `#` starts a line comment. Choice `+`
//! associates to the left and prefixing `.` binds tighter; parentheses
//! group.

use super::ast::{MonadChoice, SigDecl, SpecAst, Term};
use super::ProcError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(usize),
    Equals,
    Plus,
    Dot,
    Slash,
    Comma,
    LParen,
    RParen,
    Newline,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ProcError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut chars = line.char_indices().peekable();
        while let Some(&(col, c)) = chars.peek() {
            let pos = (lineno + 1, col + 1);
            match c {
                ' ' | '\t' | '\r' => {
                    chars.next();
                }
                '=' | '+' | '.' | '/' | ',' | '(' | ')' => {
                    chars.next();
                    let tok = match c {
                        '=' => Tok::Equals,
                        '+' => Tok::Plus,
                        '.' => Tok::Dot,
                        '/' => Tok::Slash,
                        ',' => Tok::Comma,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    };
                    out.push(Spanned {
                        tok,
                        line: pos.0,
                        col: pos.1,
                    });
                }
                '0'..='9' => {
                    let mut n = 0usize;
                    while let Some(&(_, d)) = chars.peek() {
                        if let Some(v) = d.to_digit(10) {
                            n = n * 10 + v as usize;
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push(Spanned {
                        tok: Tok::Number(n),
                        line: pos.0,
                        col: pos.1,
                    });
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut ident = String::new();
                    while let Some(&(_, d)) = chars.peek() {
                        if d.is_alphanumeric() || d == '_' {
                            ident.push(d);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push(Spanned {
                        tok: Tok::Ident(ident),
                        line: pos.0,
                        col: pos.1,
                    });
                }
                other => {
                    return Err(ProcError::Lex {
                        line: pos.0,
                        col: pos.1,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
        out.push(Spanned {
            tok: Tok::Newline,
            line: lineno + 1,
            col: line.len() + 1,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ProcError {
        let (line, col) = self
            .peek()
            .map(|s| (s.line, s.col))
            .unwrap_or((self.toks.last().map(|s| s.line).unwrap_or(1), 1));
        ProcError::Parse {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<Spanned, ProcError> {
        match self.peek() {
            Some(s) if &s.tok == tok => Ok(self.next().unwrap()),
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize), ProcError> {
        match self.peek().cloned() {
            Some(Spanned {
                tok: Tok::Ident(name),
                line,
                col,
            }) => {
                self.next();
                Ok((name, line, col))
            }
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Newline)) {
            self.next();
        }
    }

    fn at_line_end(&self) -> bool {
        matches!(self.peek().map(|s| &s.tok), None | Some(Tok::Newline))
    }

    fn term(&mut self) -> Result<Term, ProcError> {
        let mut acc = self.prefixed()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Plus)) {
            self.next();
            let rhs = self.prefixed()?;
            acc = Term::Choice(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn prefixed(&mut self) -> Result<Term, ProcError> {
        // ident '.' ...  is a prefix; anything else is primary
        if let Some(Spanned {
            tok: Tok::Ident(name),
            ..
        }) = self.peek().cloned()
        {
            if matches!(self.toks.get(self.pos + 1).map(|s| &s.tok), Some(Tok::Dot)) {
                self.next();
                self.next();
                let body = self.prefixed()?;
                return Ok(Term::Prefix(name, Box::new(body)));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Term, ProcError> {
        match self.peek().cloned() {
            Some(Spanned {
                tok: Tok::Number(0),
                ..
            }) => {
                self.next();
                Ok(Term::Stop)
            }
            Some(Spanned {
                tok: Tok::Number(_),
                ..
            }) => Err(self.err_here("only `0` may appear as a process term")),
            Some(Spanned {
                tok: Tok::Ident(name),
                ..
            }) => {
                self.next();
                if name == "tick" {
                    return Ok(Term::Tick);
                }
                if matches!(self.peek().map(|s| &s.tok), Some(Tok::LParen)) {
                    self.next();
                    if matches!(self.peek().map(|s| &s.tok), Some(Tok::RParen)) {
                        self.next();
                        return Ok(Term::Call(name, Vec::new()));
                    }
                    let mut args = vec![self.term()?];
                    while matches!(self.peek().map(|s| &s.tok), Some(Tok::Comma)) {
                        self.next();
                        args.push(self.term()?);
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    return Ok(Term::Call(name, args));
                }
                Ok(Term::Var(name))
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                self.next();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err_here("expected a process term")),
        }
    }
}

/// Parses a specification file into its syntax tree.
pub fn parse(text: &str) -> Result<SpecAst, ProcError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut monad: Option<MonadChoice> = None;
    let mut sig: Option<SigDecl> = None;
    let mut equations: Vec<(String, Term)> = Vec::new();

    loop {
        p.skip_newlines();
        if p.peek().is_none() {
            break;
        }
        let (head, line, col) = p.ident("a statement (`sig`, `monad`, or an equation)")?;
        match head.as_str() {
            "sig" => {
                if sig.is_some() {
                    return Err(ProcError::Parse {
                        line,
                        col,
                        message: "duplicate `sig` declaration".into(),
                    });
                }
                let (kind, kline, kcol) = p.ident("`actions`, `ops`, or `delay`")?;
                let decl = match kind.as_str() {
                    "actions" => {
                        let mut letters = Vec::new();
                        while !p.at_line_end() {
                            let (a, aline, acol) = p.ident("an action name")?;
                            if letters.contains(&a) {
                                return Err(ProcError::Parse {
                                    line: aline,
                                    col: acol,
                                    message: format!("duplicate action `{a}`"),
                                });
                            }
                            letters.push(a);
                        }
                        SigDecl::Actions(letters)
                    }
                    "ops" => {
                        let mut ops = Vec::new();
                        while !p.at_line_end() {
                            let (name, oline, ocol) = p.ident("an operation name")?;
                            p.expect(&Tok::Slash, "`/arity`")?;
                            let arity = match p.next() {
                                Some(Spanned {
                                    tok: Tok::Number(n),
                                    ..
                                }) => n,
                                _ => {
                                    return Err(ProcError::Parse {
                                        line: oline,
                                        col: ocol,
                                        message: format!("missing arity for `{name}`"),
                                    })
                                }
                            };
                            if ops.iter().any(|(n, _)| n == &name) {
                                return Err(ProcError::Parse {
                                    line: oline,
                                    col: ocol,
                                    message: format!("duplicate operation `{name}`"),
                                });
                            }
                            ops.push((name, arity));
                        }
                        SigDecl::Ops(ops)
                    }
                    "delay" => SigDecl::Delay,
                    other => {
                        return Err(ProcError::Parse {
                            line: kline,
                            col: kcol,
                            message: format!("unknown signature kind `{other}`"),
                        })
                    }
                };
                sig = Some(decl);
            }
            "monad" => {
                if monad.is_some() {
                    return Err(ProcError::Parse {
                        line,
                        col,
                        message: "duplicate `monad` declaration".into(),
                    });
                }
                let (name, mline, mcol) = p.ident("`powerset`, `maybe`, or `traces`")?;
                monad = Some(match name.as_str() {
                    "powerset" => MonadChoice::Powerset,
                    "maybe" => MonadChoice::Maybe,
                    "traces" => MonadChoice::Traces,
                    other => {
                        return Err(ProcError::Parse {
                            line: mline,
                            col: mcol,
                            message: format!("unknown monad `{other}`"),
                        })
                    }
                });
            }
            var => {
                if equations.iter().any(|(v, _)| v == var) {
                    return Err(ProcError::DuplicateDefinition {
                        name: var.to_string(),
                    });
                }
                p.expect(&Tok::Equals, "`=`")?;
                let t = p.term()?;
                if !p.at_line_end() {
                    return Err(p.err_here("unexpected input after equation"));
                }
                equations.push((var.to_string(), t));
            }
        }
        p.skip_newlines();
    }

    let mut ast = SpecAst {
        monad: monad.unwrap_or(MonadChoice::Powerset),
        sig: sig.unwrap_or(SigDecl::Actions(Vec::new())),
        equations,
    };
    resolve_nullary(&mut ast);
    validate_names(&ast)?;
    Ok(ast)
}

/// A bare identifier naming a declared nullary symbol is that symbol, not a
/// variable.
fn resolve_nullary(ast: &mut SpecAst) {
    let nullary: Vec<String> = declared_prefixes(&ast.sig)
        .into_iter()
        .filter(|(_, arity)| *arity == 0)
        .map(|(name, _)| name)
        .collect();
    if nullary.is_empty() {
        return;
    }
    fn walk(t: &mut Term, nullary: &[String]) {
        match t {
            Term::Var(v) if nullary.contains(v) => {
                *t = Term::Call(v.clone(), Vec::new());
            }
            Term::Prefix(_, body) => walk(body, nullary),
            Term::Call(_, args) => args.iter_mut().for_each(|a| walk(a, nullary)),
            Term::Choice(l, r) => {
                walk(l, nullary);
                walk(r, nullary);
            }
            _ => {}
        }
    }
    for (_, t) in &mut ast.equations {
        walk(t, &nullary);
    }
}

fn declared_prefixes(sig: &SigDecl) -> Vec<(String, usize)> {
    match sig {
        SigDecl::Actions(letters) => letters.iter().map(|a| (a.clone(), 1)).collect(),
        SigDecl::Ops(ops) => ops.clone(),
        SigDecl::Delay => vec![("delay".to_string(), 1)],
    }
}

fn validate_names(ast: &SpecAst) -> Result<(), ProcError> {
    let symbols = declared_prefixes(&ast.sig);
    let defined: Vec<&String> = ast.equations.iter().map(|(v, _)| v).collect();
    for (_, t) in &ast.equations {
        validate_term(t, &symbols, &defined)?;
    }
    Ok(())
}

fn validate_term(
    t: &Term,
    symbols: &[(String, usize)],
    defined: &[&String],
) -> Result<(), ProcError> {
    match t {
        Term::Tick | Term::Stop => Ok(()),
        Term::Var(v) => {
            if defined.contains(&v) {
                Ok(())
            } else {
                Err(ProcError::UndefinedVariable { name: v.clone() })
            }
        }
        Term::Prefix(a, body) => {
            match symbols.iter().find(|(n, _)| n == a) {
                Some((_, 1)) => validate_term(body, symbols, defined),
                Some((_, arity)) => Err(ProcError::ArityMismatch {
                    name: a.clone(),
                    expected: *arity,
                    got: 1,
                }),
                None => Err(ProcError::UnknownAction { name: a.clone() }),
            }
        }
        Term::Call(g, args) => {
            match symbols.iter().find(|(n, _)| n == g) {
                Some((_, arity)) if *arity == args.len() => {
                    args.iter().try_for_each(|a| validate_term(a, symbols, defined))
                }
                Some((_, arity)) => Err(ProcError::ArityMismatch {
                    name: g.clone(),
                    expected: *arity,
                    got: args.len(),
                }),
                None => Err(ProcError::UnknownAction { name: g.clone() }),
            }
        }
        Term::Choice(l, r) => {
            validate_term(l, symbols, defined)?;
            validate_term(r, symbols, defined)
        }
    }
}

//! Guardedness analysis and compilation of parsed specifications into
//! equation systems over the chosen effect monad and signature, plus
//! solving by coiteration (with optional least-fixpoint resolution of
//! unguarded occurrences).

use std::collections::BTreeSet;
use std::rc::Rc;

use super::ast::{MonadChoice, SigDecl, SpecAst, Term};
use super::ProcError;
use crate::effects::{Approx, Carrier, EffectValue, IterPolicy, MonadId, Point, Space};
use crate::effects::EffectError;
use crate::pmonad::{HashItem, HashValue, Inst, PMonadInstance};
use crate::resumption::{ResTree, Unfolder};
use crate::signatures::{Signature, SigmaLayer};

/// Which side of a choice an unguarded occurrence sits under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceSide {
    Left,
    Right,
}

/// An unguarded variable occurrence: the defining equation, the choice path
/// to the occurrence, and the variable found there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub equation: String,
    pub path: Vec<ChoiceSide>,
    pub occurrence: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "unguarded occurrence of `{}` in the equation for `{}`",
            self.occurrence, self.equation
        )?;
        if !self.path.is_empty() {
            let path: Vec<&str> = self
                .path
                .iter()
                .map(|s| match s {
                    ChoiceSide::Left => "left",
                    ChoiceSide::Right => "right",
                })
                .collect();
            write!(f, " (choice path: {})", path.join("."))?;
        }
        Ok(())
    }
}

/// Syntactic guardedness: every variable occurrence lies beneath at least
/// one prefix or operation symbol. Returns the first violation otherwise.
pub fn check_guarded(ast: &SpecAst) -> Result<(), Violation> {
    for (v, t) in &ast.equations {
        let mut path = Vec::new();
        if let Some(violation) = unguarded_occurrence(v, t, &mut path) {
            return Err(violation);
        }
    }
    Ok(())
}

fn unguarded_occurrence(
    equation: &str,
    t: &Term,
    path: &mut Vec<ChoiceSide>,
) -> Option<Violation> {
    match t {
        Term::Tick | Term::Stop => None,
        // everything under a symbol is guarded by it
        Term::Prefix(..) | Term::Call(..) => None,
        Term::Var(v) => Some(Violation {
            equation: equation.to_string(),
            path: path.clone(),
            occurrence: v.clone(),
        }),
        Term::Choice(l, r) => {
            path.push(ChoiceSide::Left);
            if let Some(v) = unguarded_occurrence(equation, l, path) {
                return Some(v);
            }
            path.pop();
            path.push(ChoiceSide::Right);
            let out = unguarded_occurrence(equation, r, path);
            path.pop();
            out
        }
    }
}

/// One raw transition of a compiled state: termination, a guarded step, or
/// an unguarded jump to another state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum RawItem {
    Exit,
    Step(usize, Vec<Point>),
    Jump(Point),
}

/// A compiled specification: states are the declared variables followed by
/// auxiliary states for non-variable prefix bodies; the step table is in
/// `T((tick + Σ P) + P)` form, with the `+ P` summand holding unguarded
/// jumps.
#[derive(Debug, Clone)]
pub struct EquationSystem {
    pub inst: Inst,
    pub states: Space,
    pub state_names: Vec<String>,
    pub var_count: usize,
    pub leaf: Space,
    raw: Vec<EffectValue<RawItem>>,
    pub violation: Option<Violation>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Maybe,
    Powerset,
    Traces,
}

struct Compiler {
    mode: Mode,
    sig: Signature,
    alphabet: Option<Rc<Carrier>>,
    state_names: Vec<String>,
    state_terms: Vec<Term>,
}

impl Compiler {
    fn unit(&self, item: RawItem) -> EffectValue<RawItem> {
        match self.mode {
            Mode::Maybe => EffectValue::Maybe(Some(item)),
            Mode::Powerset => EffectValue::Set([item].into_iter().collect()),
            Mode::Traces => EffectValue::Traces([(vec![], item)].into_iter().collect()),
        }
    }

    fn state_of(&mut self, t: &Term) -> usize {
        if let Term::Var(v) = t {
            return self
                .state_names
                .iter()
                .position(|n| n == v)
                .expect("validated variable");
        }
        let printed = t.to_string();
        if let Some(i) = self.state_names.iter().position(|n| n == &printed) {
            return i;
        }
        self.state_names.push(printed);
        self.state_terms.push(t.clone());
        self.state_names.len() - 1
    }

    fn flatten(&mut self, t: &Term) -> Result<EffectValue<RawItem>, ProcError> {
        match t {
            Term::Tick => Ok(self.unit(RawItem::Exit)),
            Term::Stop => match self.mode {
                Mode::Maybe => Err(ProcError::StopUnsupported {
                    monad: "maybe".into(),
                }),
                Mode::Powerset => Ok(EffectValue::Set(BTreeSet::new())),
                Mode::Traces => Ok(EffectValue::Traces(BTreeSet::new())),
            },
            Term::Var(v) => {
                let i = self
                    .state_names
                    .iter()
                    .position(|n| n == v)
                    .expect("validated variable");
                Ok(self.unit(RawItem::Jump(Point::At(i))))
            }
            Term::Prefix(a, body) => {
                let child = Point::At(self.state_of(body));
                match self.mode {
                    Mode::Traces => {
                        // actions are emitted as monad words; the unique
                        // signature symbol is the silent step
                        let word = if a == "delay" {
                            Vec::new()
                        } else {
                            let alphabet =
                                self.alphabet.as_ref().expect("trace mode has an alphabet");
                            vec![alphabet
                                .index_of(a)
                                .ok_or_else(|| ProcError::UnknownAction { name: a.clone() })?]
                        };
                        Ok(EffectValue::Traces(
                            [(word, RawItem::Step(0, vec![child]))].into_iter().collect(),
                        ))
                    }
                    Mode::Maybe | Mode::Powerset => {
                        let sym = self
                            .sig
                            .index_of(a)
                            .ok_or_else(|| ProcError::UnknownAction { name: a.clone() })?;
                        Ok(self.unit(RawItem::Step(sym, vec![child])))
                    }
                }
            }
            Term::Call(g, args) => {
                if self.mode == Mode::Traces {
                    return Err(ProcError::TraceModeNeedsActions);
                }
                let sym = self
                    .sig
                    .index_of(g)
                    .ok_or_else(|| ProcError::UnknownAction { name: g.clone() })?;
                let children = args.iter().map(|a| Point::At(self.state_of(a))).collect();
                Ok(self.unit(RawItem::Step(sym, children)))
            }
            Term::Choice(l, r) => {
                let lv = self.flatten(l)?;
                let rv = self.flatten(r)?;
                match (lv, rv) {
                    (EffectValue::Set(mut a), EffectValue::Set(b)) => {
                        a.extend(b);
                        Ok(EffectValue::Set(a))
                    }
                    (EffectValue::Traces(mut a), EffectValue::Traces(b)) => {
                        a.extend(b);
                        Ok(EffectValue::Traces(a))
                    }
                    _ => Err(ProcError::ChoiceUnsupported {
                        monad: "maybe".into(),
                    }),
                }
            }
        }
    }
}

/// Compiles a validated specification into an equation system.
pub fn compile(ast: &SpecAst) -> Result<EquationSystem, ProcError> {
    let violation = check_guarded(ast).err();
    let (mode, monad, sig, alphabet) = match (ast.monad, &ast.sig) {
        (MonadChoice::Traces, SigDecl::Actions(letters)) => {
            let alphabet = Rc::new(Carrier::new("A", letters.clone())?);
            let monad = MonadId::traces((*alphabet).clone())?;
            (Mode::Traces, monad, Signature::delay(), Some(alphabet))
        }
        (MonadChoice::Traces, SigDecl::Delay) => {
            // silent steps only; a one-letter alphabet keeps the monad
            // well-formed while no letter is ever emitted
            let alphabet = Rc::new(Carrier::of("A", &["u"]));
            let monad = MonadId::traces((*alphabet).clone())?;
            (Mode::Traces, monad, Signature::delay(), Some(alphabet))
        }
        (MonadChoice::Traces, SigDecl::Ops(_)) => return Err(ProcError::TraceModeNeedsActions),
        (choice, decl) => {
            let sig = match decl {
                SigDecl::Actions(letters) => {
                    Signature::actions(Rc::new(Carrier::new("A", letters.clone())?))
                }
                SigDecl::Ops(ops) => {
                    Signature::operations(ops.iter().map(|(n, a)| (n.clone(), *a)).collect())?
                }
                SigDecl::Delay => Signature::delay(),
            };
            let (mode, monad) = match choice {
                MonadChoice::Maybe => (Mode::Maybe, MonadId::Maybe),
                MonadChoice::Powerset => (Mode::Powerset, MonadId::FinPowerset),
                MonadChoice::Traces => unreachable!("handled above"),
            };
            (mode, monad, sig, None)
        }
    };

    let mut compiler = Compiler {
        mode,
        sig: sig.clone(),
        alphabet,
        state_names: ast.equations.iter().map(|(v, _)| v.clone()).collect(),
        state_terms: ast.equations.iter().map(|(_, t)| t.clone()).collect(),
    };

    let mut raw: Vec<EffectValue<RawItem>> = Vec::new();
    let mut i = 0usize;
    while i < compiler.state_names.len() {
        let term = compiler.state_terms[i].clone();
        raw.push(compiler.flatten(&term)?);
        i += 1;
    }

    let state_names = compiler.state_names.clone();
    let states = Space::atoms(Carrier::new("P", state_names.clone())?);
    let leaf = Space::atoms(Carrier::of("V", &["tick"]));
    Ok(EquationSystem {
        inst: PMonadInstance::new(monad, sig),
        states,
        state_names,
        var_count: ast.equations.len(),
        leaf,
        raw,
        violation,
    })
}

impl EquationSystem {
    pub fn var_point(&self, name: &str) -> Option<Point> {
        let i = self.state_names[..self.var_count]
            .iter()
            .position(|n| n == name)?;
        Some(Point::At(i))
    }

    pub fn is_guarded(&self) -> bool {
        self.violation.is_none()
    }

    /// The step table in guarded form `P -> T(tick + Σ P)`. Unguarded jumps
    /// are resolved first by least-fixpoint iteration; a purely guarded
    /// system needs no iteration and is always exact.
    pub fn step_table(
        &self,
        policy: IterPolicy,
    ) -> Result<Approx<Vec<HashValue<Point, Point>>>, EffectError> {
        let has_jumps = self
            .raw
            .iter()
            .any(|v| v.elements().iter().any(|i| matches!(i, RawItem::Jump(_))));
        let resolved: Approx<Vec<EffectValue<RawItem>>> = if has_jumps {
            let bottom = bottom_like(&self.raw[0]);
            let mut current: Vec<EffectValue<RawItem>> =
                self.raw.iter().map(|_| bottom.clone()).collect();
            let advance = |s: &[EffectValue<RawItem>]| -> Vec<EffectValue<RawItem>> {
                self.raw
                    .iter()
                    .map(|v| {
                        v.bind(|item| match item {
                            RawItem::Jump(p) => {
                                let i = match p {
                                    Point::At(i) => *i,
                                    _ => unreachable!("states are atoms"),
                                };
                                s[i].clone()
                            }
                            other => unit_like(v, other.clone()),
                        })
                    })
                    .collect()
            };
            let window = policy.window();
            let mut settled = false;
            for _ in 0..window {
                let next = advance(&current);
                settled = next == current;
                current = next;
                if settled {
                    break;
                }
            }
            if settled {
                Approx::exact(current)
            } else {
                match policy {
                    IterPolicy::Exact { window } => {
                        return Err(EffectError::NonConvergence {
                            window,
                            last: "unguarded jumps did not resolve".into(),
                        })
                    }
                    IterPolicy::Depth(_) => Approx::approximate(current),
                }
            }
        } else {
            Approx::exact(self.raw.clone())
        };

        let table = resolved
            .value
            .iter()
            .map(|v| {
                v.map(|item| match item {
                    RawItem::Exit => HashItem::Leaf(Point::At(0)),
                    RawItem::Step(sym, children) => HashItem::Node(SigmaLayer {
                        symbol: *sym,
                        children: children.clone(),
                    }),
                    RawItem::Jump(_) => unreachable!("jumps resolved above"),
                })
            })
            .collect();
        Ok(Approx {
            value: table,
            exact: resolved.exact,
        })
    }

    /// Solves the system by coiteration, returning one tree per declared
    /// variable. Unguarded systems are refused unless `least` is set, in
    /// which case unguarded occurrences are resolved by least fixpoint
    /// first.
    pub fn solve(
        &self,
        least: bool,
        policy: IterPolicy,
    ) -> Result<Vec<ResTree<Point>>, ProcError> {
        if let Some(v) = &self.violation {
            if !least {
                return Err(ProcError::Unguarded {
                    violation: v.clone(),
                });
            }
        }
        let table = self.step_table(policy)?.value;
        let inst = Rc::clone(&self.inst);
        let unfolder = Unfolder::new(inst, move |p: &Point| match p {
            Point::At(i) => table[*i].clone(),
            _ => unreachable!("states are atoms"),
        });
        Ok((0..self.var_count)
            .map(|i| unfolder.tree(&Point::At(i)))
            .collect())
    }
}

fn bottom_like(sample: &EffectValue<RawItem>) -> EffectValue<RawItem> {
    match sample {
        EffectValue::Maybe(_) => EffectValue::Maybe(None),
        EffectValue::Set(_) => EffectValue::Set(BTreeSet::new()),
        EffectValue::Traces(_) => EffectValue::Traces(BTreeSet::new()),
    }
}

fn unit_like(sample: &EffectValue<RawItem>, item: RawItem) -> EffectValue<RawItem> {
    match sample {
        EffectValue::Maybe(_) => EffectValue::Maybe(Some(item)),
        EffectValue::Set(_) => EffectValue::Set([item].into_iter().collect()),
        EffectValue::Traces(_) => EffectValue::Traces([(vec![], item)].into_iter().collect()),
    }
}

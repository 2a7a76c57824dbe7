//! Concrete effect monads and their values: the maybe monad, the finite
//! powerset monad, and the finite-trace powerset monad over a fixed action
//! alphabet.

use std::collections::BTreeSet;
use std::rc::Rc;

use super::space::Carrier;
use super::EffectError;

/// A finite word over an alphabet carrier, stored as letter indices.
pub type Word = Vec<usize>;

pub fn render_word(w: &Word, alphabet: &Carrier) -> String {
    if w.is_empty() {
        "\u{03b5}".to_string() // ε
    } else {
        w.iter().map(|&i| alphabet.element(i)).collect()
    }
}

/// Identifies one of the supported effect monads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonadId {
    Maybe,
    FinPowerset,
    TracePowerset(Rc<Carrier>),
}

impl MonadId {
    pub fn traces(alphabet: Carrier) -> Result<MonadId, EffectError> {
        if alphabet.is_empty() {
            return Err(EffectError::EmptyAlphabet);
        }
        Ok(MonadId::TracePowerset(Rc::new(alphabet)))
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonadId::Maybe => "maybe",
            MonadId::FinPowerset => "powerset",
            MonadId::TracePowerset(_) => "traces",
        }
    }

    pub fn alphabet(&self) -> Option<&Carrier> {
        match self {
            MonadId::TracePowerset(a) => Some(a),
            _ => None,
        }
    }

    /// The monad unit applied to one element.
    pub fn unit<E: Ord>(&self, e: E) -> EffectValue<E> {
        match self {
            MonadId::Maybe => EffectValue::Maybe(Some(e)),
            MonadId::FinPowerset => {
                let mut s = BTreeSet::new();
                s.insert(e);
                EffectValue::Set(s)
            }
            MonadId::TracePowerset(_) => {
                let mut s = BTreeSet::new();
                s.insert((Word::new(), e));
                EffectValue::Traces(s)
            }
        }
    }

    /// The least element of `T X` under the pointwise information order.
    pub fn bottom<E: Ord>(&self) -> EffectValue<E> {
        match self {
            MonadId::Maybe => EffectValue::Maybe(None),
            MonadId::FinPowerset => EffectValue::Set(BTreeSet::new()),
            MonadId::TracePowerset(_) => EffectValue::Traces(BTreeSet::new()),
        }
    }

    /// All values of `T X` for `X` given by `items`, in a fixed canonical
    /// order. Unsupported for the trace monad, whose value space is infinite.
    pub fn enumerate_values<E: Ord + Clone>(
        &self,
        items: &[E],
    ) -> Result<Vec<EffectValue<E>>, EffectError> {
        match self {
            MonadId::Maybe => {
                let mut out = vec![EffectValue::Maybe(None)];
                out.extend(items.iter().map(|e| EffectValue::Maybe(Some(e.clone()))));
                Ok(out)
            }
            MonadId::FinPowerset => {
                let n = items.len();
                if n > 16 {
                    return Err(EffectError::BudgetExceeded {
                        required: format!("2^{n} powerset values"),
                    });
                }
                let mut out = Vec::with_capacity(1 << n);
                for mask in 0u32..(1 << n) {
                    let mut s = BTreeSet::new();
                    for (i, item) in items.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            s.insert(item.clone());
                        }
                    }
                    out.push(EffectValue::Set(s));
                }
                Ok(out)
            }
            MonadId::TracePowerset(_) => Err(EffectError::Unsupported {
                what: "enumerating the trace monad's value space".into(),
            }),
        }
    }
}

/// A concrete element of `T X` for one of the supported monads; the payload
/// variant doubles as the monad tag. Set payloads are canonically sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum EffectValue<E> {
    Maybe(Option<E>),
    Set(BTreeSet<E>),
    Traces(BTreeSet<(Word, E)>),
}

impl<E: Ord + Clone> EffectValue<E> {
    pub fn kind(&self) -> &'static str {
        match self {
            EffectValue::Maybe(_) => "maybe",
            EffectValue::Set(_) => "powerset",
            EffectValue::Traces(_) => "traces",
        }
    }

    pub fn matches(&self, monad: &MonadId) -> bool {
        matches!(
            (self, monad),
            (EffectValue::Maybe(_), MonadId::Maybe)
                | (EffectValue::Set(_), MonadId::FinPowerset)
                | (EffectValue::Traces(_), MonadId::TracePowerset(_))
        )
    }

    pub fn is_bottom(&self) -> bool {
        match self {
            EffectValue::Maybe(o) => o.is_none(),
            EffectValue::Set(s) => s.is_empty(),
            EffectValue::Traces(s) => s.is_empty(),
        }
    }

    /// Kleisli extension: substitutes `f` for each element. Words multiply by
    /// concatenation in the trace monad. Panics if `f` produces a value of a
    /// different monad than `self`, which is a caller bug.
    pub fn bind<F: Ord + Clone>(&self, mut f: impl FnMut(&E) -> EffectValue<F>) -> EffectValue<F> {
        match self {
            EffectValue::Maybe(None) => EffectValue::Maybe(None),
            EffectValue::Maybe(Some(e)) => match f(e) {
                v @ EffectValue::Maybe(_) => v,
                v => panic!("bind: maybe value combined with {} value", v.kind()),
            },
            EffectValue::Set(s) => {
                let mut out = BTreeSet::new();
                for e in s {
                    match f(e) {
                        EffectValue::Set(t) => out.extend(t),
                        v => panic!("bind: powerset value combined with {} value", v.kind()),
                    }
                }
                EffectValue::Set(out)
            }
            EffectValue::Traces(s) => {
                let mut out = BTreeSet::new();
                for (w, e) in s {
                    match f(e) {
                        EffectValue::Traces(t) => {
                            for (w2, y) in t {
                                let mut ww = w.clone();
                                ww.extend_from_slice(&w2);
                                out.insert((ww, y));
                            }
                        }
                        v => panic!("bind: trace value combined with {} value", v.kind()),
                    }
                }
                EffectValue::Traces(out)
            }
        }
    }

    /// Functorial action on elements; words are unchanged.
    pub fn map<F: Ord + Clone>(&self, mut f: impl FnMut(&E) -> F) -> EffectValue<F> {
        match self {
            EffectValue::Maybe(o) => EffectValue::Maybe(o.as_ref().map(&mut f)),
            EffectValue::Set(s) => EffectValue::Set(s.iter().map(&mut f).collect()),
            EffectValue::Traces(s) => {
                EffectValue::Traces(s.iter().map(|(w, e)| (w.clone(), f(e))).collect())
            }
        }
    }

    /// Fallible functorial action: stops at the first error.
    pub fn try_map<F: Ord + Clone, Er>(
        &self,
        mut f: impl FnMut(&E) -> Result<F, Er>,
    ) -> Result<EffectValue<F>, Er> {
        Ok(match self {
            EffectValue::Maybe(None) => EffectValue::Maybe(None),
            EffectValue::Maybe(Some(e)) => EffectValue::Maybe(Some(f(e)?)),
            EffectValue::Set(s) => {
                let mut out = BTreeSet::new();
                for e in s {
                    out.insert(f(e)?);
                }
                EffectValue::Set(out)
            }
            EffectValue::Traces(s) => {
                let mut out = BTreeSet::new();
                for (w, e) in s {
                    out.insert((w.clone(), f(e)?));
                }
                EffectValue::Traces(out)
            }
        })
    }

    /// The information order: flat on maybe, inclusion on the set monads.
    pub fn leq(&self, other: &Self) -> Result<bool, EffectError> {
        match (self, other) {
            (EffectValue::Maybe(a), EffectValue::Maybe(b)) => Ok(match (a, b) {
                (None, _) => true,
                (Some(x), Some(y)) => x == y,
                (Some(_), None) => false,
            }),
            (EffectValue::Set(a), EffectValue::Set(b)) => Ok(a.is_subset(b)),
            (EffectValue::Traces(a), EffectValue::Traces(b)) => Ok(a.is_subset(b)),
            _ => Err(EffectError::MonadMismatch {
                expected: self.kind(),
                got: other.kind(),
            }),
        }
    }

    /// Keeps only trace entries whose word is shorter than `n`; identity on
    /// the other monads. Used to compare depth-`n` approximants.
    pub fn traces_below(&self, n: usize) -> Self {
        match self {
            EffectValue::Traces(s) => EffectValue::Traces(
                s.iter()
                    .filter(|(w, _)| w.len() < n)
                    .cloned()
                    .collect(),
            ),
            other => other.clone(),
        }
    }

    pub fn elements(&self) -> Vec<&E> {
        match self {
            EffectValue::Maybe(o) => o.iter().collect(),
            EffectValue::Set(s) => s.iter().collect(),
            EffectValue::Traces(s) => s.iter().map(|(_, e)| e).collect(),
        }
    }

    /// Renders the value with a caller-supplied element renderer, following
    /// the textual conventions `nothing`, `just x`, `{x1,x2}`,
    /// `{(ab,x),(ε,y)}`.
    pub fn render_with(
        &self,
        mut elem: impl FnMut(&E) -> String,
        alphabet: Option<&Carrier>,
    ) -> String {
        match self {
            EffectValue::Maybe(None) => "nothing".to_string(),
            EffectValue::Maybe(Some(e)) => format!("just {}", elem(e)),
            EffectValue::Set(s) => {
                let items: Vec<String> = s.iter().map(elem).collect();
                format!("{{{}}}", items.join(","))
            }
            EffectValue::Traces(s) => {
                let items: Vec<String> = s
                    .iter()
                    .map(|(w, e)| {
                        let word = match alphabet {
                            Some(a) => render_word(w, a),
                            None => {
                                if w.is_empty() {
                                    "\u{03b5}".into()
                                } else {
                                    w.iter().map(|i| i.to_string()).collect()
                                }
                            }
                        };
                        format!("({},{})", word, elem(e))
                    })
                    .collect();
                format!("{{{}}}", items.join(","))
            }
        }
    }
}

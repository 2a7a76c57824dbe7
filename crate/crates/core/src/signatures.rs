//! Polynomial signatures: finite families of operation symbols with fixed
//! arities, including action-prefix signatures (one unary symbol per
//! alphabet letter) and the single-symbol delay signature.

use std::rc::Rc;

use crate::effects::{Carrier, EffectError};

/// An operation symbol with a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSym {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigKind {
    Generic,
    ActionPrefix(Rc<Carrier>),
    Delay,
}

/// A polynomial signature functor: applying it to a set forms one layer of
/// symbols over that set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<OpSym>,
    kind: SigKind,
}

impl Signature {
    /// A generic signature from `(name, arity)` pairs; names must be
    /// distinct. Zero symbols are allowed and make the functor constant on
    /// the empty set.
    pub fn operations(symbols: Vec<(String, usize)>) -> Result<Self, EffectError> {
        for (i, (name, _)) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|(n, _)| n == name) {
                return Err(EffectError::Signature(format!(
                    "duplicate operation symbol `{name}`"
                )));
            }
        }
        Ok(Signature {
            symbols: symbols
                .into_iter()
                .map(|(name, arity)| OpSym { name, arity })
                .collect(),
            kind: SigKind::Generic,
        })
    }

    /// The empty signature.
    pub fn constant() -> Self {
        Signature {
            symbols: Vec::new(),
            kind: SigKind::Generic,
        }
    }

    /// One unary prefixing symbol per letter of the alphabet.
    pub fn actions(alphabet: Rc<Carrier>) -> Self {
        let symbols = alphabet
            .elements()
            .map(|a| OpSym {
                name: a.to_string(),
                arity: 1,
            })
            .collect();
        Signature {
            symbols,
            kind: SigKind::ActionPrefix(alphabet),
        }
    }

    /// A single unary symbol, modelling one computation step with no
    /// observable output.
    pub fn delay() -> Self {
        Signature {
            symbols: vec![OpSym {
                name: "delay".into(),
                arity: 1,
            }],
            kind: SigKind::Delay,
        }
    }

    pub fn kind(&self) -> &SigKind {
        &self.kind
    }

    pub fn is_delay(&self) -> bool {
        matches!(self.kind, SigKind::Delay)
    }

    pub fn alphabet(&self) -> Option<&Rc<Carrier>> {
        match &self.kind {
            SigKind::ActionPrefix(a) => Some(a),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[OpSym] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &OpSym {
        &self.symbols[i]
    }

    pub fn arity(&self, i: usize) -> Option<usize> {
        self.symbols.get(i).map(|s| s.arity)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Builds a layer, checking the symbol exists and the child count
    /// matches its arity.
    pub fn layer<P>(&self, symbol: usize, children: Vec<P>) -> Result<SigmaLayer<P>, EffectError> {
        let arity = self.arity(symbol).ok_or_else(|| {
            EffectError::Signature(format!("unknown symbol index {symbol}"))
        })?;
        if children.len() != arity {
            return Err(EffectError::Signature(format!(
                "symbol `{}` expects {arity} children, got {}",
                self.symbols[symbol].name,
                children.len()
            )));
        }
        Ok(SigmaLayer { symbol, children })
    }

    /// Functorial action on one layer: applies `f` to every child.
    pub fn map_layer<P, Q>(
        &self,
        layer: &SigmaLayer<P>,
        mut f: impl FnMut(&P) -> Q,
    ) -> Result<SigmaLayer<Q>, EffectError> {
        let arity = self.arity(layer.symbol).ok_or_else(|| {
            EffectError::Signature(format!("unknown symbol index {}", layer.symbol))
        })?;
        if layer.children.len() != arity {
            return Err(EffectError::Signature(format!(
                "layer for `{}` has {} children, expects {arity}",
                self.symbols[layer.symbol].name,
                layer.children.len()
            )));
        }
        Ok(SigmaLayer {
            symbol: layer.symbol,
            children: layer.children.iter().map(&mut f).collect(),
        })
    }

    /// All layers whose children are drawn from `pool`, in canonical order.
    pub fn layers_over<P: Clone>(&self, pool: &[P]) -> Vec<SigmaLayer<P>> {
        let mut out = Vec::new();
        for (sym, op) in self.symbols.iter().enumerate() {
            let mut idx = vec![0usize; op.arity];
            loop {
                if op.arity == 0 {
                    out.push(SigmaLayer {
                        symbol: sym,
                        children: Vec::new(),
                    });
                    break;
                }
                if pool.is_empty() {
                    break;
                }
                out.push(SigmaLayer {
                    symbol: sym,
                    children: idx.iter().map(|&i| pool[i].clone()).collect(),
                });
                // odometer over child indices
                let mut k = op.arity;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < pool.len() {
                        break;
                    }
                    idx[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
        }
        out
    }
}

/// One application of the signature functor: a symbol plus one child per
/// arity slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SigmaLayer<P> {
    pub symbol: usize,
    pub children: Vec<P>,
}

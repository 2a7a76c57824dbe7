//! The parametrized monad sending `(A, X)` to `T(A + Σ X)`: its values,
//! parameterized unit and multiplication, bifunctor action, and the
//! correspondence between its algebras and pairs of a `T`-algebra with a
//! `Σ`-algebra on the same carrier.

use std::rc::Rc;

use crate::effects::{EffectError, EffectValue, MonadId};
use crate::signatures::{Signature, SigmaLayer};

/// One item of `A + Σ X`: a leaf drawn from the left component or a
/// signature layer over the right one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum HashItem<L, N> {
    Leaf(L),
    Node(SigmaLayer<N>),
}

/// An element of `T(A + Σ X)` with leaves of type `L` and node children of
/// type `N`.
pub type HashValue<L, N> = EffectValue<HashItem<L, N>>;

/// An effect monad paired with a signature, fixing one parametrized monad
/// `(A, X) ↦ T(A + Σ X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMonadInstance {
    pub monad: MonadId,
    pub sig: Signature,
}

pub type Inst = Rc<PMonadInstance>;

impl PMonadInstance {
    pub fn new(monad: MonadId, sig: Signature) -> Inst {
        Rc::new(PMonadInstance { monad, sig })
    }
}

/// The parameterized unit: inject a leaf and apply the monad unit.
pub fn hash_unit<L: Ord + Clone, N: Ord + Clone>(
    inst: &PMonadInstance,
    a: L,
) -> HashValue<L, N> {
    inst.monad.unit(HashItem::Leaf(a))
}

/// The parameterized multiplication `T(T(A+ΣX) + ΣX) -> T(A+ΣX)`: inner
/// values on the leaf side are flattened in, node layers are kept.
pub fn hash_mult<L: Ord + Clone, N: Ord + Clone>(
    inst: &PMonadInstance,
    v: &EffectValue<HashItem<HashValue<L, N>, N>>,
) -> HashValue<L, N> {
    v.bind(|item| match item {
        HashItem::Leaf(inner) => inner.clone(),
        HashItem::Node(layer) => inst.monad.unit(HashItem::Node(layer.clone())),
    })
}

/// Bifunctor action `T(f + Σ g)`.
pub fn hash_bimap<L, L2, N, N2>(
    inst: &PMonadInstance,
    mut f: impl FnMut(&L) -> L2,
    mut g: impl FnMut(&N) -> N2,
    v: &HashValue<L, N>,
) -> Result<HashValue<L2, N2>, EffectError>
where
    L: Ord + Clone,
    L2: Ord + Clone,
    N: Ord + Clone,
    N2: Ord + Clone,
{
    let mut err = None;
    let out = v.map(|item| match item {
        HashItem::Leaf(l) => HashItem::Leaf(f(l)),
        HashItem::Node(layer) => match inst.sig.map_layer(layer, &mut g) {
            Ok(mapped) => HashItem::Node(mapped),
            Err(e) => {
                err.get_or_insert(e);
                HashItem::Node(SigmaLayer {
                    symbol: layer.symbol,
                    children: Vec::new(),
                })
            }
        },
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Substitutes a hash value for every leaf, keeping node layers:
/// the composite of the multiplication with `T(f + Σ id)`.
pub fn graft<L, L2, N>(
    inst: &PMonadInstance,
    v: &HashValue<L, N>,
    mut f: impl FnMut(&L) -> HashValue<L2, N>,
) -> HashValue<L2, N>
where
    L: Ord + Clone,
    L2: Ord + Clone,
    N: Ord + Clone,
{
    v.bind(|item| match item {
        HashItem::Leaf(l) => f(l),
        HashItem::Node(layer) => inst.monad.unit(HashItem::Node(layer.clone())),
    })
}

/// All values of `T(A + Σ X)` with leaves from `leaves` and node children
/// from `pool`, in canonical order. Only for enumerable monads.
pub fn enumerate_hash_values<L, N>(
    inst: &PMonadInstance,
    leaves: &[L],
    pool: &[N],
) -> Result<Vec<HashValue<L, N>>, EffectError>
where
    L: Ord + Clone,
    N: Ord + Clone,
{
    let mut items: Vec<HashItem<L, N>> = leaves
        .iter()
        .map(|l| HashItem::Leaf(l.clone()))
        .collect();
    items.extend(
        inst.sig
            .layers_over(pool)
            .into_iter()
            .map(HashItem::Node),
    );
    inst.monad.enumerate_values(&items)
}

/// An Eilenberg-Moore algebra of the base effect monad, given by an
/// evaluator on values over the carrier's elements.
pub struct TAlgebra<C> {
    pub monad: MonadId,
    pub elements: Option<Vec<C>>,
    app: Rc<dyn Fn(&EffectValue<C>) -> C>,
}

impl<C: Clone> Clone for TAlgebra<C> {
    fn clone(&self) -> Self {
        TAlgebra {
            monad: self.monad.clone(),
            elements: self.elements.clone(),
            app: Rc::clone(&self.app),
        }
    }
}

impl<C: Ord + Clone + 'static> TAlgebra<C> {
    pub fn new(
        monad: MonadId,
        elements: Option<Vec<C>>,
        app: impl Fn(&EffectValue<C>) -> C + 'static,
    ) -> Self {
        TAlgebra {
            monad,
            elements,
            app: Rc::new(app),
        }
    }

    pub fn apply(&self, v: &EffectValue<C>) -> C {
        (self.app)(v)
    }

    /// Checks the two Eilenberg-Moore laws extensionally; requires an
    /// enumerable carrier.
    pub fn check_laws(&self) -> Result<bool, EffectError> {
        let elements = self.elements.as_ref().ok_or_else(|| EffectError::Unsupported {
            what: "checking algebra laws on a non-enumerable carrier".into(),
        })?;
        // unit law: a ∘ unit = id
        for c in elements {
            if self.apply(&self.monad.unit(c.clone())) != *c {
                return Ok(false);
            }
        }
        // multiplication law: a ∘ T a = a ∘ join, on all values of T T C
        let values = self.monad.enumerate_values(elements)?;
        let doubles = self.monad.enumerate_values(&values)?;
        for vv in &doubles {
            let lhs = self.apply(&vv.map(|v| self.apply(v)));
            let rhs = self.apply(&vv.bind(|v| v.clone()));
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Splits an algebra `T(A+ΣA) -> A` of the parametrized monad into its
/// effect part `a ∘ T inl` and its symbol interpretation `a ∘ unit ∘ inr`.
pub fn split_bialgebra<C: Ord + Clone + 'static>(
    inst: &Inst,
    elements: &[C],
    structure: impl Fn(&HashValue<C, C>) -> C + Clone + 'static,
) -> (TAlgebra<C>, Rc<dyn Fn(&SigmaLayer<C>) -> C>) {
    let s1 = structure.clone();
    let effect_part = TAlgebra::new(
        inst.monad.clone(),
        Some(elements.to_vec()),
        move |v: &EffectValue<C>| s1(&v.map(|c| HashItem::Leaf(c.clone()))),
    );
    let inst2 = Rc::clone(inst);
    let symbol_part: Rc<dyn Fn(&SigmaLayer<C>) -> C> = Rc::new(move |layer| {
        structure(&inst2.monad.unit(HashItem::Node(layer.clone())))
    });
    (effect_part, symbol_part)
}

/// Recomposes an algebra of the parametrized monad from an effect algebra
/// and a symbol interpretation: `a ∘ T [id, interp]`.
pub fn join_bialgebra<C: Ord + Clone + 'static>(
    effect_part: &TAlgebra<C>,
    symbol_part: Rc<dyn Fn(&SigmaLayer<C>) -> C>,
) -> impl Fn(&HashValue<C, C>) -> C + Clone {
    let a = effect_part.clone();
    move |v: &HashValue<C, C>| {
        a.apply(&v.map(|item| match item {
            HashItem::Leaf(c) => c.clone(),
            HashItem::Node(layer) => symbol_part(layer),
        }))
    }
}

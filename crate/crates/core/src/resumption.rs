//! Lazy, memoized trees forming the final coalgebra of `T(X + Σ -)`: one
//! effect layer per level, with node children deferred until observed.
//!
//! Trees are handles with identity semantics: `==` and the ordering compare
//! handles, never structure. Semantic comparison is depth-bounded, via
//! [`ResTree::truncate`] and [`ResTree::bisim_depth`]. One unit of depth is
//! one `Σ`-layer; the effect layer of a node is flattened into that level.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use crate::pmonad::{graft, hash_unit, HashItem, HashValue, Inst, PMonadInstance};
use crate::signatures::SigmaLayer;

/// Leaf payloads of resumption trees.
pub trait Leaf: Ord + Clone + fmt::Debug + 'static {}
impl<T: Ord + Clone + fmt::Debug + 'static> Leaf for T {}

/// One forced level of a tree: an effect value over leaves and deferred
/// subtrees.
pub type Layer<L> = HashValue<L, ResTree<L>>;

enum TreeCell<L: Leaf> {
    Pending(Box<dyn FnOnce() -> Layer<L>>),
    Forcing,
    Forced(Layer<L>),
}

thread_local! {
    static NEXT_TREE_ID: Cell<u64> = const { Cell::new(0) };
}

fn fresh_id() -> u64 {
    NEXT_TREE_ID.with(|c| {
        let id = c.get();
        c.set(id + 1);
        id
    })
}

/// A node of the final coalgebra: a shared handle to a memoized level.
pub struct ResTree<L: Leaf> {
    id: u64,
    inst: Inst,
    cell: Rc<RefCell<TreeCell<L>>>,
}

impl<L: Leaf> Clone for ResTree<L> {
    fn clone(&self) -> Self {
        ResTree {
            id: self.id,
            inst: Rc::clone(&self.inst),
            cell: Rc::clone(&self.cell),
        }
    }
}

impl<L: Leaf> fmt::Debug for ResTree<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResTree#{}", self.id)
    }
}

impl<L: Leaf> PartialEq for ResTree<L> {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl<L: Leaf> Eq for ResTree<L> {}

impl<L: Leaf> PartialOrd for ResTree<L> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<L: Leaf> Ord for ResTree<L> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl<L: Leaf> ResTree<L> {
    pub fn instance(&self) -> &Inst {
        &self.inst
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Wraps an already-computed level.
    pub fn from_layer(inst: Inst, layer: Layer<L>) -> Self {
        validate_layer(&inst, &layer);
        ResTree {
            id: fresh_id(),
            inst,
            cell: Rc::new(RefCell::new(TreeCell::Forced(layer))),
        }
    }

    /// Wraps a level to be computed on first observation.
    pub fn deferred(inst: Inst, thunk: impl FnOnce() -> Layer<L> + 'static) -> Self {
        ResTree {
            id: fresh_id(),
            inst,
            cell: Rc::new(RefCell::new(TreeCell::Pending(Box::new(thunk)))),
        }
    }

    /// The tree that immediately returns `leaf`.
    pub fn pure(inst: Inst, leaf: L) -> Self {
        let layer = hash_unit(&inst, leaf);
        ResTree::from_layer(inst, layer)
    }

    /// Forces and returns this node's level. Memoized: repeated calls
    /// return identical payloads.
    pub fn out(&self) -> Layer<L> {
        {
            let borrow = self.cell.borrow();
            if let TreeCell::Forced(layer) = &*borrow {
                return layer.clone();
            }
        }
        let thunk = {
            let mut borrow = self.cell.borrow_mut();
            match std::mem::replace(&mut *borrow, TreeCell::Forcing) {
                TreeCell::Pending(t) => t,
                TreeCell::Forced(layer) => {
                    let out = layer.clone();
                    *borrow = TreeCell::Forced(layer);
                    return out;
                }
                TreeCell::Forcing => panic!("cyclic force of a resumption tree"),
            }
        };
        let layer = thunk();
        validate_layer(&self.inst, &layer);
        *self.cell.borrow_mut() = TreeCell::Forced(layer.clone());
        layer
    }

    /// Monadic extension: substitutes a tree for every leaf. The level of
    /// the result is the level of `self` with substituted leaf levels
    /// flattened in.
    pub fn bind<M: Leaf>(&self, f: impl Fn(&L) -> ResTree<M> + 'static) -> ResTree<M> {
        let op = Rc::new(BindOp {
            f: Box::new(f),
            memo: RefCell::new(BTreeMap::new()),
        });
        bind_tree(&op, self)
    }

    /// Relabels leaves without touching the branching structure.
    pub fn map_leaves<M: Leaf>(&self, g: impl Fn(&L) -> M + 'static) -> ResTree<M> {
        let op = Rc::new(MapOp {
            g: Box::new(g),
            memo: RefCell::new(BTreeMap::new()),
        });
        map_tree(&op, self)
    }

    /// Cuts the tree at depth `n`, replacing deeper subtrees by a marker.
    /// The result is a finite value with canonical set ordering.
    pub fn truncate(&self, n: usize) -> Trunc<L> {
        let mut memo = BTreeMap::new();
        truncate_memo(self, n, &mut memo)
    }

    /// Depth-bounded bisimilarity: equality of depth-`n` truncations.
    pub fn bisim_depth(&self, other: &ResTree<L>, n: usize) -> bool {
        self.truncate(n) == other.truncate(n)
    }
}

fn validate_layer<L: Leaf>(inst: &Inst, layer: &Layer<L>) {
    for item in layer.elements() {
        if let HashItem::Node(sl) = item {
            let arity = inst
                .sig
                .arity(sl.symbol)
                .unwrap_or_else(|| panic!("layer uses unknown symbol index {}", sl.symbol));
            assert_eq!(
                sl.children.len(),
                arity,
                "layer child count does not match symbol arity"
            );
        }
    }
}

/// Flattens a tree of trees: an inner tree is entered when the outer tree
/// reaches it as a leaf.
pub fn flatten<M: Leaf>(t: &ResTree<ResTree<M>>) -> ResTree<M> {
    t.bind(|inner| inner.clone())
}

struct BindOp<L: Leaf, M: Leaf> {
    f: Box<dyn Fn(&L) -> ResTree<M>>,
    memo: RefCell<BTreeMap<u64, ResTree<M>>>,
}

fn bind_tree<L: Leaf, M: Leaf>(op: &Rc<BindOp<L, M>>, t: &ResTree<L>) -> ResTree<M> {
    if let Some(done) = op.memo.borrow().get(&t.id) {
        return done.clone();
    }
    let out = ResTree::deferred(Rc::clone(&t.inst), {
        let op = Rc::clone(op);
        let t = t.clone();
        move || {
            let layer = t.out();
            let relocated: HashValue<L, ResTree<M>> = layer.map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
                HashItem::Node(sl) => HashItem::Node(
                    t.inst
                        .sig
                        .map_layer(sl, |child| bind_tree(&op, child))
                        .expect("forced layer is well-formed"),
                ),
            });
            graft(&t.inst, &relocated, |l| (op.f)(l).out())
        }
    });
    op.memo.borrow_mut().insert(t.id, out.clone());
    out
}

struct MapOp<L: Leaf, M: Leaf> {
    g: Box<dyn Fn(&L) -> M>,
    memo: RefCell<BTreeMap<u64, ResTree<M>>>,
}

fn map_tree<L: Leaf, M: Leaf>(op: &Rc<MapOp<L, M>>, t: &ResTree<L>) -> ResTree<M> {
    if let Some(done) = op.memo.borrow().get(&t.id) {
        return done.clone();
    }
    let out = ResTree::deferred(Rc::clone(&t.inst), {
        let op = Rc::clone(op);
        let t = t.clone();
        move || {
            t.out().map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf((op.g)(l)),
                HashItem::Node(sl) => HashItem::Node(
                    t.inst
                        .sig
                        .map_layer(sl, |child| map_tree(&op, child))
                        .expect("forced layer is well-formed"),
                ),
            })
        }
    });
    op.memo.borrow_mut().insert(t.id, out.clone());
    out
}

/// Embeds a one-level value whose leaf and child alphabets coincide:
/// children become immediately-returning trees.
pub fn ext<L: Leaf>(inst: &Inst, v: &HashValue<L, L>) -> ResTree<L> {
    let layer: Layer<L> = v.map(|item| match item {
        HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
            symbol: sl.symbol,
            children: sl
                .children
                .iter()
                .map(|c| ResTree::pure(Rc::clone(inst), c.clone()))
                .collect(),
        }),
    });
    ResTree::from_layer(Rc::clone(inst), layer)
}

/// Coiteration: unfolds a step function into trees, one state at a time.
/// States are memoized, so finitely many states produce finitely many
/// handles and cyclic state graphs stay finite.
pub struct Unfolder<S, L: Leaf> {
    inner: Rc<UnfolderInner<S, L>>,
}

struct UnfolderInner<S, L: Leaf> {
    inst: Inst,
    step: Box<dyn Fn(&S) -> HashValue<L, S>>,
    memo: RefCell<BTreeMap<S, ResTree<L>>>,
}

impl<S, L: Leaf> Clone for Unfolder<S, L> {
    fn clone(&self) -> Self {
        Unfolder {
            inner: Rc::clone(&self.inner),
        }
    }
}

impl<S: Ord + Clone + 'static, L: Leaf> Unfolder<S, L> {
    pub fn new(inst: Inst, step: impl Fn(&S) -> HashValue<L, S> + 'static) -> Self {
        Unfolder {
            inner: Rc::new(UnfolderInner {
                inst,
                step: Box::new(step),
                memo: RefCell::new(BTreeMap::new()),
            }),
        }
    }

    /// The tree over state `s`: its level is the step of `s` with child
    /// states unfolded recursively.
    pub fn tree(&self, s: &S) -> ResTree<L> {
        tree_of(&self.inner, s)
    }
}

fn tree_of<S: Ord + Clone + 'static, L: Leaf>(
    inner: &Rc<UnfolderInner<S, L>>,
    s: &S,
) -> ResTree<L> {
    if let Some(t) = inner.memo.borrow().get(s) {
        return t.clone();
    }
    let t = ResTree::deferred(Rc::clone(&inner.inst), {
        let inner = Rc::clone(inner);
        let s = s.clone();
        move || {
            let layer = (inner.step)(&s);
            layer.map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
                HashItem::Node(sl) => HashItem::Node(
                    inner
                        .inst
                        .sig
                        .map_layer(sl, |child| tree_of(&inner, child))
                        .expect("step produced a well-formed layer"),
                ),
            })
        }
    });
    inner.memo.borrow_mut().insert(s.clone(), t.clone());
    t
}

/// Builds a single tree from a coalgebra state.
pub fn unfold<S: Ord + Clone + 'static, L: Leaf>(
    inst: Inst,
    step: impl Fn(&S) -> HashValue<L, S> + 'static,
    start: &S,
) -> ResTree<L> {
    Unfolder::new(inst, step).tree(start)
}

/// A child position in a primitive-corecursion step: either an existing
/// tree spliced in as-is, or a state to keep unfolding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Splice<S, L: Leaf> {
    Done(ResTree<L>),
    More(S),
}

struct PrimInner<S, L: Leaf> {
    inst: Inst,
    step: Box<dyn Fn(&S) -> HashValue<L, Splice<S, L>>>,
    memo: RefCell<BTreeMap<S, ResTree<L>>>,
}

/// Primitive corecursion: like [`unfold`], but any child may be an existing
/// tree, which is grafted without being re-unfolded.
pub fn unfold_prim<S: Ord + Clone + 'static, L: Leaf>(
    inst: Inst,
    step: impl Fn(&S) -> HashValue<L, Splice<S, L>> + 'static,
) -> impl Fn(&S) -> ResTree<L> {
    let inner = Rc::new(PrimInner {
        inst,
        step: Box::new(step),
        memo: RefCell::new(BTreeMap::new()),
    });
    move |s: &S| prim_tree(&inner, s)
}

fn prim_tree<S: Ord + Clone + 'static, L: Leaf>(
    inner: &Rc<PrimInner<S, L>>,
    s: &S,
) -> ResTree<L> {
    if let Some(t) = inner.memo.borrow().get(s) {
        return t.clone();
    }
    let t = ResTree::deferred(Rc::clone(&inner.inst), {
        let inner = Rc::clone(inner);
        let s = s.clone();
        move || {
            let layer = (inner.step)(&s);
            layer.map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
                HashItem::Node(sl) => HashItem::Node(
                    inner
                        .inst
                        .sig
                        .map_layer(sl, |child| match child {
                            Splice::Done(done) => done.clone(),
                            Splice::More(next) => prim_tree(&inner, next),
                        })
                        .expect("step produced a well-formed layer"),
                ),
            })
        }
    });
    inner.memo.borrow_mut().insert(s.clone(), t.clone());
    t
}

struct GraftInner<S, B, L: Leaf> {
    inst: Inst,
    system: Box<dyn Fn(&S) -> HashValue<B, S>>,
    exit: Box<dyn Fn(&B) -> Layer<L>>,
    memo: RefCell<BTreeMap<S, ResTree<L>>>,
}

/// Two-stage coiteration: unfolds `system` over states, passing exits of
/// type `B` through `exit`, whose output level (over existing trees) is
/// flattened into the current level.
pub fn unfold_graft<S, B, L>(
    inst: Inst,
    system: impl Fn(&S) -> HashValue<B, S> + 'static,
    exit: impl Fn(&B) -> Layer<L> + 'static,
) -> impl Fn(&S) -> ResTree<L>
where
    S: Ord + Clone + 'static,
    B: Ord + Clone + 'static,
    L: Leaf,
{
    let inner = Rc::new(GraftInner {
        inst,
        system: Box::new(system),
        exit: Box::new(exit),
        memo: RefCell::new(BTreeMap::new()),
    });
    move |s: &S| graft_tree(&inner, s)
}

fn graft_tree<S, B, L>(inner: &Rc<GraftInner<S, B, L>>, s: &S) -> ResTree<L>
where
    S: Ord + Clone + 'static,
    B: Ord + Clone + 'static,
    L: Leaf,
{
    if let Some(t) = inner.memo.borrow().get(s) {
        return t.clone();
    }
    let t = ResTree::deferred(Rc::clone(&inner.inst), {
        let inner = Rc::clone(inner);
        let s = s.clone();
        move || {
            let layer = (inner.system)(&s);
            let relocated: HashValue<B, ResTree<L>> = layer.map(|item| match item {
                HashItem::Leaf(b) => HashItem::Leaf(b.clone()),
                HashItem::Node(sl) => HashItem::Node(
                    inner
                        .inst
                        .sig
                        .map_layer(sl, |child| graft_tree(&inner, child))
                        .expect("system produced a well-formed layer"),
                ),
            });
            graft(&inner.inst, &relocated, |b| (inner.exit)(b))
        }
    });
    inner.memo.borrow_mut().insert(s.clone(), t.clone());
    t
}

/// All distinct tree handles reachable from `t` through forced levels, in
/// breadth-first order; `None` if more than `budget` handles are found.
pub fn reachable<L: Leaf>(t: &ResTree<L>, budget: usize) -> Option<Vec<ResTree<L>>> {
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut order: Vec<ResTree<L>> = Vec::new();
    let mut queue: VecDeque<ResTree<L>> = VecDeque::new();
    seen.insert(t.id);
    order.push(t.clone());
    queue.push_back(t.clone());
    while let Some(current) = queue.pop_front() {
        for item in current.out().elements() {
            if let HashItem::Node(sl) = item {
                for child in &sl.children {
                    if seen.insert(child.id) {
                        if order.len() >= budget {
                            return None;
                        }
                        order.push(child.clone());
                        queue.push_back(child.clone());
                    }
                }
            }
        }
    }
    Some(order)
}

/// A finite observation of a tree: the tree cut at some depth, with cut
/// positions marked. Structural equality and ordering are canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Trunc<L: Leaf> {
    Cut,
    Level(HashValue<L, Trunc<L>>),
}

fn truncate_memo<L: Leaf>(
    t: &ResTree<L>,
    n: usize,
    memo: &mut BTreeMap<(u64, usize), Trunc<L>>,
) -> Trunc<L> {
    if n == 0 {
        return Trunc::Cut;
    }
    if let Some(done) = memo.get(&(t.id, n)) {
        return done.clone();
    }
    let level = t.out().map(|item| match item {
        HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
            symbol: sl.symbol,
            children: sl
                .children
                .iter()
                .map(|c| truncate_memo(c, n - 1, memo))
                .collect(),
        }),
    });
    let out = Trunc::Level(level);
    memo.insert((t.id, n), out.clone());
    out
}

impl<L: Leaf> Trunc<L> {
    /// Renders the truncation in the textual tree format: `@cut` marks the
    /// frontier, levels print as `T{ item | item }` with set items in
    /// canonical order.
    pub fn render(&self, inst: &PMonadInstance, leaf: &impl Fn(&L) -> String) -> String {
        match self {
            Trunc::Cut => "@cut".to_string(),
            Trunc::Level(v) => {
                let items: Vec<String> = match v {
                    HashValue::Maybe(None) => Vec::new(),
                    HashValue::Maybe(Some(item)) => vec![render_item(item, inst, leaf)],
                    HashValue::Set(s) => {
                        s.iter().map(|item| render_item(item, inst, leaf)).collect()
                    }
                    HashValue::Traces(s) => s
                        .iter()
                        .map(|(w, item)| {
                            let word = match inst.monad.alphabet() {
                                Some(a) => crate::effects::render_word(w, a),
                                None => w.iter().map(|i| i.to_string()).collect(),
                            };
                            format!("({},{})", word, render_item(item, inst, leaf))
                        })
                        .collect(),
                };
                format!("T{{{}}}", items.join(" | "))
            }
        }
    }
}

fn render_item<L: Leaf>(
    item: &HashItem<L, Trunc<L>>,
    inst: &PMonadInstance,
    leaf: &impl Fn(&L) -> String,
) -> String {
    match item {
        HashItem::Leaf(l) => format!("leaf {}", leaf(l)),
        HashItem::Node(sl) => {
            let name = &inst.sig.symbol(sl.symbol).name;
            if sl.children.is_empty() {
                name.clone()
            } else {
                let children: Vec<String> =
                    sl.children.iter().map(|c| c.render(inst, leaf)).collect();
                format!("{}({})", name, children.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::{Carrier, EffectValue, MonadId};
    use crate::pmonad::enumerate_hash_values;
    use crate::signatures::Signature;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn actions_inst() -> Inst {
        let alphabet = Rc::new(Carrier::of("A", &["a", "b"]));
        PMonadInstance::new(MonadId::FinPowerset, Signature::actions(alphabet))
    }

    fn delay_inst() -> Inst {
        PMonadInstance::new(MonadId::FinPowerset, Signature::delay())
    }

    fn set<T: Ord>(items: impl IntoIterator<Item = T>) -> BTreeSet<T> {
        items.into_iter().collect()
    }

    /// The running example system over actions {a,b} with four states:
    /// x1 = a.(x2+x3), x2 = a.x1 + b.x3, x3 = a.x1 + tick, s = x2+x3.
    /// States 0..3 are x1, x2, x3, s; leaves are `0u8` (tick).
    fn example_step(s: &u8) -> HashValue<u8, u8> {
        let a = 0usize;
        let b = 1usize;
        let node = |sym: usize, st: u8| {
            HashItem::Node(SigmaLayer {
                symbol: sym,
                children: vec![st],
            })
        };
        EffectValue::Set(match s {
            0 => set([node(a, 3)]),
            1 => set([node(a, 0), node(b, 2)]),
            2 => set([node(a, 0), HashItem::Leaf(0u8)]),
            3 => set([node(a, 0), node(b, 2), HashItem::Leaf(0u8)]),
            _ => unreachable!(),
        })
    }

    /// A random finite coalgebra over the actions signature, used to sample
    /// trees.
    fn random_step(
        rng: &mut ChaCha8Rng,
        states: u8,
        leaves: u8,
    ) -> impl Fn(&u8) -> HashValue<u8, u8> + 'static {
        let mut table = Vec::new();
        for _ in 0..states {
            let mut items = BTreeSet::new();
            for _ in 0..rng.gen_range(1..=3u8) {
                if rng.gen_bool(0.3) {
                    items.insert(HashItem::Leaf(rng.gen_range(0..leaves)));
                } else {
                    items.insert(HashItem::Node(SigmaLayer {
                        symbol: rng.gen_range(0..2usize),
                        children: vec![rng.gen_range(0..states)],
                    }));
                }
            }
            table.push(EffectValue::Set(items));
        }
        move |s: &u8| table[*s as usize].clone()
    }

    fn random_tree(rng: &mut ChaCha8Rng) -> ResTree<u8> {
        let states = rng.gen_range(1..=3u8);
        let step = random_step(rng, states, 2);
        unfold(actions_inst(), step, &rng.gen_range(0..states))
    }

    #[test]
    fn lambek_round_trip_depth_one() {
        let inst = actions_inst();
        // out(from_layer(v)) = v for one-level payloads
        let leaf_layer: Layer<u8> = hash_unit(&inst, 7u8);
        let t = ResTree::from_layer(Rc::clone(&inst), leaf_layer.clone());
        assert_eq!(t.out(), leaf_layer);
        // from_layer(out(t)) is bisimilar to t at tested depths
        let t = unfold(Rc::clone(&inst), example_step, &2u8);
        let back = ResTree::from_layer(Rc::clone(&inst), t.out());
        for n in 0..6 {
            assert!(back.bisim_depth(&t, n));
        }
    }

    #[test]
    fn out_of_pure_is_hash_unit() {
        let inst = actions_inst();
        let t = ResTree::pure(Rc::clone(&inst), 5u8);
        assert_eq!(t.out(), hash_unit(&inst, 5u8));
    }

    #[test]
    fn round_trip_on_random_payloads() {
        // out ∘ from_layer = id on 20 random depth-1 payloads
        let inst = actions_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t0 = random_tree(&mut rng);
            let t1 = random_tree(&mut rng);
            let pool = [t0, t1];
            let mut items = BTreeSet::new();
            for _ in 0..rng.gen_range(1..=3u8) {
                if rng.gen_bool(0.4) {
                    items.insert(HashItem::Leaf(rng.gen_range(0..2u8)));
                } else {
                    items.insert(HashItem::Node(SigmaLayer {
                        symbol: rng.gen_range(0..2usize),
                        children: vec![pool[rng.gen_range(0..2usize)].clone()],
                    }));
                }
            }
            let layer: Layer<u8> = EffectValue::Set(items);
            let t = ResTree::from_layer(Rc::clone(&inst), layer.clone());
            assert_eq!(t.out(), layer);
        }
    }

    #[test]
    fn unfold_immediate_termination() {
        let inst = actions_inst();
        let t = unfold(
            Rc::clone(&inst),
            |_: &u8| hash_unit::<u8, u8>(&inst_static(), 9u8),
            &0u8,
        );
        assert_eq!(t.out(), hash_unit(&inst, 9u8));
    }

    fn inst_static() -> PMonadInstance {
        let alphabet = Rc::new(Carrier::of("A", &["a", "b"]));
        PMonadInstance {
            monad: MonadId::FinPowerset,
            sig: Signature::actions(alphabet),
        }
    }

    #[test]
    fn example_system_depth2_matches_hand_unfolding() {
        let inst = actions_inst();
        let x3 = unfold(Rc::clone(&inst), example_step, &2u8);
        // hand-unfolded: out(x3) = {leaf, a(x1)}; out(x1) = {a(s)}
        let expected: Trunc<u8> = Trunc::Level(EffectValue::Set(set([
            HashItem::Leaf(0u8),
            HashItem::Node(SigmaLayer {
                symbol: 0,
                children: vec![Trunc::Level(EffectValue::Set(set([HashItem::Node(
                    SigmaLayer {
                        symbol: 0,
                        children: vec![Trunc::Cut],
                    },
                )])))],
            }),
        ])));
        assert_eq!(x3.truncate(2), expected);
    }

    #[test]
    fn delay_self_loop_unfolds_forever() {
        let inst = delay_inst();
        let t: ResTree<u8> = unfold(
            Rc::clone(&inst),
            |s: &u8| {
                EffectValue::Set(set([HashItem::Node(SigmaLayer {
                    symbol: 0,
                    children: vec![*s],
                })]))
            },
            &0u8,
        );
        assert!(t.bisim_depth(&t, 10));
        // the re-solved tree over the same coalgebra agrees at depth 10
        let t2: ResTree<u8> = unfold(
            Rc::clone(&inst),
            |s: &u8| {
                EffectValue::Set(set([HashItem::Node(SigmaLayer {
                    symbol: 0,
                    children: vec![*s],
                })]))
            },
            &0u8,
        );
        assert!(t.bisim_depth(&t2, 10));
        assert_ne!(t, t2, "distinct handles, equal observations");
    }

    #[test]
    fn memoization_is_transparent_and_shared() {
        let inst = actions_inst();
        let t = unfold(Rc::clone(&inst), example_step, &3u8);
        let first = t.out();
        let second = t.out();
        assert_eq!(first, second);
        // the same state reached twice yields the same handle
        let un = Unfolder::new(Rc::clone(&inst), example_step);
        assert_eq!(un.tree(&0u8), un.tree(&0u8));
    }

    #[test]
    fn unfold_prim_without_splices_equals_unfold() {
        let inst = actions_inst();
        let plain = unfold(Rc::clone(&inst), example_step, &2u8);
        let prim = unfold_prim(Rc::clone(&inst), |s: &u8| {
            example_step(s).map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf(*l),
                HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                    symbol: sl.symbol,
                    children: sl.children.iter().map(|c| Splice::More(*c)).collect(),
                }),
            })
        })(&2u8);
        for n in 0..7 {
            assert!(plain.bisim_depth(&prim, n));
        }
    }

    #[test]
    fn unfold_prim_splices_existing_tree() {
        let inst = actions_inst();
        let base = unfold(Rc::clone(&inst), example_step, &0u8);
        // one a-step, then the pre-existing tree
        let spliced = unfold_prim(Rc::clone(&inst), {
            let base = base.clone();
            move |_: &u8| {
                EffectValue::Set(set([HashItem::Node(SigmaLayer {
                    symbol: 0,
                    children: vec![Splice::Done(base.clone())],
                })]))
            }
        })(&0u8);
        for n in 0..6 {
            let expected = Trunc::Level(EffectValue::Set(set([HashItem::Node(SigmaLayer {
                symbol: 0,
                children: vec![base.truncate(n)],
            })])));
            assert_eq!(spliced.truncate(n + 1), expected);
        }
    }

    #[test]
    fn unfold_graft_with_unit_exit_is_unfold() {
        let inst = actions_inst();
        let plain = unfold(Rc::clone(&inst), example_step, &1u8);
        let inst2 = Rc::clone(&inst);
        let grafted = unfold_graft(Rc::clone(&inst), example_step, move |b: &u8| {
            hash_unit(&inst2, *b)
        })(&1u8);
        for n in 0..7 {
            assert!(plain.bisim_depth(&grafted, n));
        }
    }

    #[test]
    fn unfold_graft_agrees_with_bind_after_unfold() {
        // grafting exits through f is the same as unfolding first and then
        // substituting the exit trees for the leaves
        let inst = actions_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let states = rng.gen_range(1..=3u8);
            let step_table: Vec<HashValue<u8, u8>> = {
                let step = random_step(&mut rng, states, 2);
                (0..states).map(|s| step(&s)).collect()
            };
            let start = rng.gen_range(0..states);
            // random exit layers over a two-element alphabet; children of
            // exit layers are existing random trees
            let exit_layers: Vec<Layer<u8>> = (0..2)
                .map(|_| {
                    let sub = random_tree(&mut rng);
                    let mut items = BTreeSet::new();
                    if rng.gen_bool(0.5) {
                        items.insert(HashItem::Leaf(rng.gen_range(0..2u8)));
                    }
                    items.insert(HashItem::Node(SigmaLayer {
                        symbol: rng.gen_range(0..2usize),
                        children: vec![sub],
                    }));
                    EffectValue::Set(items)
                })
                .collect();

            let grafted = {
                let table = step_table.clone();
                let exits = exit_layers.clone();
                unfold_graft(
                    Rc::clone(&inst),
                    move |s: &u8| table[*s as usize].clone(),
                    move |b: &u8| exits[*b as usize].clone(),
                )(&start)
            };
            let reference = {
                let table = step_table.clone();
                let exits = exit_layers.clone();
                let inst2 = Rc::clone(&inst);
                unfold(
                    Rc::clone(&inst),
                    move |s: &u8| table[*s as usize].clone(),
                    &start,
                )
                .bind(move |b: &u8| {
                    ResTree::from_layer(Rc::clone(&inst2), exits[*b as usize].clone())
                })
            };
            assert!(grafted.bisim_depth(&reference, 6));
        }
    }

    #[test]
    fn monad_laws_randomized() {
        let inst = actions_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let t = random_tree(&mut rng);
            // right unit: bind pure = id
            let bound = t.bind({
                let inst = Rc::clone(&inst);
                move |l: &u8| ResTree::pure(Rc::clone(&inst), *l)
            });
            assert!(bound.bisim_depth(&t, 8));
            // left unit: pure then bind = apply
            let target = random_tree(&mut rng);
            let l0 = rng.gen_range(0..2u8);
            let p = ResTree::pure(Rc::clone(&inst), l0);
            let applied = p.bind({
                let target = target.clone();
                move |_| target.clone()
            });
            assert!(applied.bisim_depth(&target, 8));
            // flatten of a pure wrapper
            let tt = ResTree::pure(Rc::clone(&inst), t.clone());
            assert!(flatten(&tt).bisim_depth(&t, 8));
        }
    }

    #[test]
    fn bind_associativity_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..15 {
            let t = random_tree(&mut rng);
            let f0 = random_tree(&mut rng);
            let f1 = random_tree(&mut rng);
            let g0 = random_tree(&mut rng);
            let g1 = random_tree(&mut rng);
            let f = {
                let (f0, f1) = (f0.clone(), f1.clone());
                move |l: &u8| if *l == 0 { f0.clone() } else { f1.clone() }
            };
            let g = {
                let (g0, g1) = (g0.clone(), g1.clone());
                move |l: &u8| if *l == 0 { g0.clone() } else { g1.clone() }
            };
            let lhs = t.bind(f.clone()).bind(g.clone());
            let rhs = t.bind(move |l| f(l).bind(g.clone()));
            assert!(lhs.bisim_depth(&rhs, 8));
        }
    }

    #[test]
    fn map_after_unfold_is_unfold_of_relabeled_step() {
        let inst = actions_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let states = rng.gen_range(1..=3u8);
            let step = random_step(&mut rng, states, 2);
            let step2 = {
                let step = {
                    let mut table = Vec::new();
                    for s in 0..states {
                        table.push(step(&s));
                    }
                    table
                };
                move |s: &u8| step[*s as usize].clone()
            };
            let start = rng.gen_range(0..states);
            let g = |l: &u8| l + 10;
            let mapped = unfold(Rc::clone(&inst), step, &start).map_leaves(g);
            let relabeled = unfold(
                Rc::clone(&inst),
                move |s: &u8| {
                    step2(s).map(|item| match item {
                        HashItem::Leaf(l) => HashItem::Leaf(g(l)),
                        HashItem::Node(sl) => HashItem::Node(sl.clone()),
                    })
                },
                &start,
            );
            assert!(mapped.bisim_depth(&relabeled, 6));
        }
    }

    #[test]
    fn ext_embeds_one_level() {
        let inst = actions_inst();
        // ext of a unit layer is the pure tree
        let v: HashValue<u8, u8> = hash_unit(&inst, 1u8);
        assert!(ext(&inst, &v).bisim_depth(&ResTree::pure(Rc::clone(&inst), 1u8), 8));
        // ext of a pure node layer is the symbol over leaf-trees
        let v: HashValue<u8, u8> = EffectValue::Set(set([HashItem::Node(SigmaLayer {
            symbol: 1,
            children: vec![0u8],
        })]));
        let t = ext(&inst, &v);
        let expected = Trunc::Level(EffectValue::Set(set([HashItem::Node(SigmaLayer {
            symbol: 1,
            children: vec![Trunc::Level(hash_unit(&inst, 0u8))],
        })])));
        assert_eq!(t.truncate(2), expected);
    }

    #[test]
    fn ext_is_natural_in_the_alphabet() {
        // relabeling before ext agrees with mapping leaves after ext
        let inst = actions_inst();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let values = enumerate_hash_values(&inst, &[0u8, 1], &[0u8, 1]).unwrap();
        let g = |l: &u8| l + 5;
        for _ in 0..20 {
            let v = values[rng.gen_range(0..values.len())].clone();
            let relabeled: HashValue<u8, u8> = v.map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf(g(l)),
                HashItem::Node(sl) => HashItem::Node(
                    inst.sig.map_layer(sl, g).unwrap(),
                ),
            });
            let lhs = ext(&inst, &relabeled);
            let rhs = ext(&inst, &v).map_leaves(g);
            assert!(lhs.bisim_depth(&rhs, 2));
        }
    }

    #[test]
    fn truncate_at_zero_is_cut() {
        let inst = actions_inst();
        let t = unfold(Rc::clone(&inst), example_step, &0u8);
        assert_eq!(t.truncate(0), Trunc::Cut);
        assert_eq!(ResTree::pure(Rc::clone(&inst), 1u8).truncate(0), Trunc::Cut);
    }

    #[test]
    fn distinct_steps_differ_at_depth_one() {
        let inst = actions_inst();
        let t1 = unfold(Rc::clone(&inst), example_step, &0u8);
        // same shape but through action b instead of a
        let t2 = unfold(
            Rc::clone(&inst),
            |s: &u8| {
                example_step(s).map(|item| match item {
                    HashItem::Leaf(l) => HashItem::Leaf(*l),
                    HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                        symbol: 1 - sl.symbol,
                        children: sl.children.clone(),
                    }),
                })
            },
            &0u8,
        );
        assert!(t1.bisim_depth(&t2, 0));
        assert!(!t1.bisim_depth(&t2, 1));
    }

    #[test]
    fn reachable_closes_on_finite_state_trees() {
        let inst = actions_inst();
        let t = unfold(Rc::clone(&inst), example_step, &2u8);
        let r = reachable(&t, 100).unwrap();
        // x3 steps to x1, x1 to the choice state s, and s back to x1 and x3;
        // x2 appears only inside s and is never a child itself
        assert_eq!(r.len(), 3);
        // an infinite-state tree exceeds any budget
        let counter: ResTree<u8> = unfold(
            Rc::clone(&inst),
            |s: &u64| {
                EffectValue::Set(set([HashItem::Node(SigmaLayer {
                    symbol: 0,
                    children: vec![s + 1],
                })]))
            },
            &0u64,
        );
        assert!(reachable(&counter, 10).is_none());
    }

    #[test]
    fn finality_probe_square_solutions_agree() {
        // the same coalgebra unfolded through renamed states satisfies the
        // defining square, and agrees with the original to every tested
        // depth; perturbing the step breaks agreement at depth 1
        let inst = actions_inst();
        let t = unfold(Rc::clone(&inst), example_step, &2u8);
        let renamed = unfold(
            Rc::clone(&inst),
            |s: &u8| {
                example_step(&(3 - s)).map(|item| match item {
                    HashItem::Leaf(l) => HashItem::Leaf(*l),
                    HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                        symbol: sl.symbol,
                        children: sl.children.iter().map(|c| 3 - c).collect(),
                    }),
                })
            },
            &1u8,
        );
        for n in 0..9 {
            assert!(t.bisim_depth(&renamed, n));
        }
        let perturbed = unfold(
            Rc::clone(&inst),
            |s: &u8| {
                if *s == 2 {
                    EffectValue::Set(set([HashItem::Leaf(0u8)]))
                } else {
                    example_step(s)
                }
            },
            &2u8,
        );
        assert!(!t.bisim_depth(&perturbed, 1));
    }

    #[test]
    fn render_formats_cut_and_levels() {
        let inst = actions_inst();
        let t = unfold(Rc::clone(&inst), example_step, &2u8);
        assert_eq!(t.truncate(0).render(&inst, &|l| format!("v{l}")), "@cut");
        assert_eq!(
            t.truncate(1).render(&inst, &|_| "tick".to_string()),
            "T{leaf tick | a(@cut)}"
        );
    }
}

//! Algebras of the parametrized monad equipped with an iteration operator
//! satisfying the solution, functoriality, and compositionality laws;
//! continuous algebras iterated by ascending chains; free algebras carried
//! by resumption trees; and the passage between such algebras and
//! evaluators of resumption trees.

use std::fmt;
use std::rc::Rc;

use crate::effects::{Approx, Carrier, EffectError, IterPolicy, Point, PureMap, Space};
use crate::pmonad::{enumerate_hash_values, graft, HashItem, HashValue, Inst};
use crate::resumption::{ext, reachable, Leaf, ResTree, Unfolder};
use crate::signatures::SigmaLayer;

/// A finite equation system `e : X -> T(A + Σ X)`: one entry per point of
/// the domain, with leaves in the carrier `A` and node children back in `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashSystem<C> {
    inst: Inst,
    domain: Space,
    entries: Vec<HashValue<C, Point>>,
}

impl<C: Leaf> HashSystem<C> {
    pub fn new(
        inst: Inst,
        domain: Space,
        entries: Vec<HashValue<C, Point>>,
    ) -> Result<Self, EffectError> {
        if entries.len() != domain.size() {
            return Err(EffectError::NotTotal {
                expected: domain.size(),
                got: entries.len(),
            });
        }
        for v in &entries {
            if !v.matches(&inst.monad) {
                return Err(EffectError::MonadMismatch {
                    expected: inst.monad.name(),
                    got: v.kind(),
                });
            }
            for item in v.elements() {
                if let HashItem::Node(sl) = item {
                    let arity = inst.sig.arity(sl.symbol).ok_or_else(|| {
                        EffectError::Signature(format!("unknown symbol index {}", sl.symbol))
                    })?;
                    if sl.children.len() != arity {
                        return Err(EffectError::Signature(format!(
                            "layer for `{}` has wrong arity",
                            inst.sig.symbol(sl.symbol).name
                        )));
                    }
                    for p in &sl.children {
                        if !domain.contains(p) {
                            return Err(EffectError::UnknownElement {
                                point: format!("{p:?}"),
                                space: domain.describe(),
                            });
                        }
                    }
                }
            }
        }
        Ok(HashSystem {
            inst,
            domain,
            entries,
        })
    }

    pub fn from_fn(
        inst: Inst,
        domain: Space,
        f: impl Fn(&Point) -> HashValue<C, Point>,
    ) -> Result<Self, EffectError> {
        let entries = domain.points().iter().map(&f).collect();
        HashSystem::new(inst, domain, entries)
    }

    pub fn inst(&self) -> &Inst {
        &self.inst
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn entries(&self) -> &[HashValue<C, Point>] {
        &self.entries
    }

    pub fn entry(&self, p: &Point) -> Result<&HashValue<C, Point>, EffectError> {
        Ok(&self.entries[self.domain.index_of(p)?])
    }

    pub fn entry_at(&self, i: usize) -> &HashValue<C, Point> {
        &self.entries[i]
    }

    /// Relabels the leaves, keeping the recursion structure.
    pub fn relabel_leaves<D: Leaf>(&self, mut f: impl FnMut(&C) -> D) -> HashSystem<D> {
        HashSystem {
            inst: Rc::clone(&self.inst),
            domain: self.domain.clone(),
            entries: self
                .entries
                .iter()
                .map(|v| {
                    v.map(|item| match item {
                        HashItem::Leaf(c) => HashItem::Leaf(f(c)),
                        HashItem::Node(sl) => HashItem::Node(sl.clone()),
                    })
                })
                .collect(),
        }
    }
}

/// Applies `T(id + Σ s)` to one entry: node children (domain points) are
/// replaced by their current solution values.
fn plug_values<C: Leaf>(
    domain: &Space,
    entry: &HashValue<C, Point>,
    s: &[C],
) -> Result<HashValue<C, C>, EffectError> {
    entry.try_map(|item| {
        Ok(match item {
            HashItem::Leaf(c) => HashItem::Leaf(c.clone()),
            HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                symbol: sl.symbol,
                children: sl
                    .children
                    .iter()
                    .map(|p| Ok(s[domain.index_of(p)?].clone()))
                    .collect::<Result<_, EffectError>>()?,
            }),
        })
    })
}

/// Substitutes a known solution for the leaves of a follow-up system:
/// leaves of `g` are points of `leaf_space`, replaced by `solution` values.
pub fn substitute_solution<C: Leaf>(
    solution: &[C],
    leaf_space: &Space,
    g: &HashSystem<Point>,
) -> Result<HashSystem<C>, EffectError> {
    let entries = g
        .entries
        .iter()
        .map(|v| {
            v.try_map(|item| {
                Ok(match item {
                    HashItem::Leaf(p) => {
                        HashItem::Leaf(solution[leaf_space.index_of(p)?].clone())
                    }
                    HashItem::Node(sl) => HashItem::Node(sl.clone()),
                })
            })
        })
        .collect::<Result<Vec<_>, EffectError>>()?;
    Ok(HashSystem {
        inst: Rc::clone(&g.inst),
        domain: g.domain.clone(),
        entries,
    })
}

/// Combines a system `f` on `Y` with a follow-up system `g : X -> T(Y+ΣX)`
/// into a single system on `Y+X`: entering on the left runs `f` (children
/// tagged left), entering on the right runs `g` with its leaves expanded
/// through `f`.
pub fn combine_systems<C: Leaf>(
    f: &HashSystem<C>,
    g: &HashSystem<Point>,
) -> Result<HashSystem<C>, EffectError> {
    let yspace = f.domain.clone();
    let xspace = g.domain.clone();
    let combined = Space::sum(&yspace, &xspace);
    let inst = Rc::clone(&f.inst);
    let tag_left = |v: &HashValue<C, Point>| {
        v.map(|item| match item {
            HashItem::Leaf(c) => HashItem::Leaf(c.clone()),
            HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                symbol: sl.symbol,
                children: sl.children.iter().cloned().map(Point::inl).collect(),
            }),
        })
    };
    let mut entries = Vec::with_capacity(combined.size());
    for y in yspace.points() {
        entries.push(tag_left(f.entry(&y)?));
    }
    for x in xspace.points() {
        let tagged_right = g.entry(&x)?.map(|item| match item {
            HashItem::Leaf(p) => HashItem::Leaf(p.clone()),
            HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                symbol: sl.symbol,
                children: sl.children.iter().cloned().map(Point::inr).collect(),
            }),
        });
        // leaves of g are entered into f with left-tagged children
        let mut lookup_err = None;
        let expanded = graft(&inst, &tagged_right, |y: &Point| match f.entry(y) {
            Ok(v) => tag_left(v),
            Err(e) => {
                lookup_err.get_or_insert(e);
                inst.monad.bottom()
            }
        });
        if let Some(e) = lookup_err {
            return Err(e);
        }
        entries.push(expanded);
    }
    HashSystem::new(inst, combined, entries)
}

/// An algebra of the parametrized monad together with an iteration operator
/// solving finite equation systems into the carrier.
pub struct ElgotAlgebra<C> {
    inst: Inst,
    elements: Option<Vec<C>>,
    structure: Rc<dyn Fn(&HashValue<C, C>) -> Result<C, EffectError>>,
    iter: Rc<dyn Fn(&HashSystem<C>, IterPolicy) -> Result<Approx<Vec<C>>, EffectError>>,
}

impl<C> Clone for ElgotAlgebra<C>
where
    C: Clone,
{
    fn clone(&self) -> Self {
        ElgotAlgebra {
            inst: Rc::clone(&self.inst),
            elements: self.elements.clone(),
            structure: Rc::clone(&self.structure),
            iter: Rc::clone(&self.iter),
        }
    }
}

impl<C: fmt::Debug> fmt::Debug for ElgotAlgebra<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ElgotAlgebra over {}", self.inst.monad.name())
    }
}

impl<C: Leaf> ElgotAlgebra<C> {
    pub fn new(
        inst: Inst,
        elements: Option<Vec<C>>,
        structure: impl Fn(&HashValue<C, C>) -> Result<C, EffectError> + 'static,
        iter: impl Fn(&HashSystem<C>, IterPolicy) -> Result<Approx<Vec<C>>, EffectError> + 'static,
    ) -> Self {
        ElgotAlgebra {
            inst,
            elements,
            structure: Rc::new(structure),
            iter: Rc::new(iter),
        }
    }

    pub fn inst(&self) -> &Inst {
        &self.inst
    }

    pub fn elements(&self) -> Option<&[C]> {
        self.elements.as_deref()
    }

    pub fn structure(&self, v: &HashValue<C, C>) -> Result<C, EffectError> {
        (self.structure)(v)
    }

    /// Solves `e : X -> T(A+ΣX)`, returning one carrier value per point of
    /// the domain in canonical order.
    pub fn iterate(
        &self,
        e: &HashSystem<C>,
        policy: IterPolicy,
    ) -> Result<Approx<Vec<C>>, EffectError> {
        (self.iter)(e, policy)
    }
}

/// A pointed, ordered carrier with a structure map, from which a continuous
/// algebra is built.
pub struct CppoAlgebraSpec<C> {
    pub inst: Inst,
    pub elements: Vec<C>,
    pub bottom: C,
    pub leq: Rc<dyn Fn(&C, &C) -> bool>,
    pub structure: Rc<dyn Fn(&HashValue<C, C>) -> C>,
}

impl<C: Leaf> CppoAlgebraSpec<C> {
    /// Checks that the structure map is monotone on all enumerable inputs
    /// under the pointwise order of values.
    pub fn check_monotone(&self) -> Result<bool, EffectError> {
        let values = enumerate_hash_values(&self.inst, &self.elements, &self.elements)?;
        for a in &values {
            for b in &values {
                let pointwise = match (a, b) {
                    (HashValue::Maybe(x), HashValue::Maybe(y)) => match (x, y) {
                        (None, _) => true,
                        (Some(i), Some(j)) => item_leq(i, j, &self.leq),
                        _ => false,
                    },
                    (HashValue::Set(x), HashValue::Set(y)) => x
                        .iter()
                        .all(|i| y.iter().any(|j| item_leq(i, j, &self.leq))),
                    _ => continue,
                };
                if pointwise && !(self.leq)(&(self.structure)(a), &(self.structure)(b)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn item_leq<C>(a: &HashItem<C, C>, b: &HashItem<C, C>, leq: &Rc<dyn Fn(&C, &C) -> bool>) -> bool {
    match (a, b) {
        (HashItem::Leaf(x), HashItem::Leaf(y)) => leq(x, y),
        (HashItem::Node(x), HashItem::Node(y)) => {
            x.symbol == y.symbol && x.children.iter().zip(&y.children).all(|(c, d)| leq(c, d))
        }
        _ => false,
    }
}

/// Builds the algebra whose iteration is the join of the ascending chain
/// `s_0 = ⊥`, `s_{i+1}(x) = a(T(id + Σ s_i)(e(x)))`.
pub fn continuous_algebra<C: Leaf>(spec: CppoAlgebraSpec<C>) -> ElgotAlgebra<C> {
    let structure = Rc::clone(&spec.structure);
    let structure2 = Rc::clone(&spec.structure);
    let leq = Rc::clone(&spec.leq);
    let bottom = spec.bottom.clone();
    ElgotAlgebra::new(
        Rc::clone(&spec.inst),
        Some(spec.elements.clone()),
        move |v| Ok(structure(v)),
        move |e, policy| {
            let n = e.domain().size();
            let mut current = vec![bottom.clone(); n];
            let advance = |s: &[C]| -> Result<Vec<C>, EffectError> {
                e.entries()
                    .iter()
                    .map(|entry| Ok(structure2(&plug_values(e.domain(), entry, s)?)))
                    .collect()
            };
            let window = policy.window();
            for _ in 0..window {
                let next = advance(&current)?;
                if next == current {
                    return Ok(Approx::exact(current));
                }
                if !current.iter().zip(&next).all(|(a, b)| leq(a, b)) {
                    return Err(EffectError::NonMonotoneChain);
                }
                current = next;
            }
            let next = advance(&current)?;
            if next == current {
                return Ok(Approx::exact(current));
            }
            match policy {
                IterPolicy::Exact { window } => Err(EffectError::NonConvergence {
                    window,
                    last: format!("{current:?}"),
                }),
                IterPolicy::Depth(_) => Ok(Approx::approximate(current)),
            }
        },
    )
}

/// A state of the coalgebra underlying free-algebra iteration: an existing
/// tree being copied out, or a variable of the system being solved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum FreeState {
    Tree(ResTree<Point>),
    Var(Point),
}

fn tree_to_states(layer: &crate::resumption::Layer<Point>) -> HashValue<Point, FreeState> {
    layer.map(|item| match item {
        HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
            symbol: sl.symbol,
            children: sl
                .children
                .iter()
                .map(|c| FreeState::Tree(c.clone()))
                .collect(),
        }),
    })
}

/// The free algebra on a leaf space, carried by resumption trees over it.
/// The structure map flattens one level; iteration unfolds the system into
/// trees, entering existing trees as they are reached.
pub fn free_algebra(inst: &Inst, leaf_space: &Space) -> ElgotAlgebra<ResTree<Point>> {
    let _ = leaf_space;
    let inst_s = Rc::clone(inst);
    let inst_i = Rc::clone(inst);
    ElgotAlgebra::new(
        Rc::clone(inst),
        None,
        move |v: &HashValue<ResTree<Point>, ResTree<Point>>| {
            let layer = graft(&inst_s, v, |t| t.out());
            Ok(ResTree::from_layer(Rc::clone(&inst_s), layer))
        },
        move |e: &HashSystem<ResTree<Point>>, _policy| {
            let domain = e.domain().clone();
            let e = e.clone();
            let inst2 = Rc::clone(&inst_i);
            let unfolder = Unfolder::new(Rc::clone(&inst_i), move |s: &FreeState| match s {
                FreeState::Tree(t) => tree_to_states(&t.out()),
                FreeState::Var(x) => {
                    let entry = e.entry(x).expect("system is total");
                    let tagged = entry.map(|item| match item {
                        HashItem::Leaf(t) => HashItem::Leaf(t.clone()),
                        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                            symbol: sl.symbol,
                            children: sl
                                .children
                                .iter()
                                .map(|p| FreeState::Var(p.clone()))
                                .collect(),
                        }),
                    });
                    graft(&inst2, &tagged, |t: &ResTree<Point>| {
                        tree_to_states(&t.out())
                    })
                }
            });
            let values = domain
                .points()
                .into_iter()
                .map(|x| unfolder.tree(&FreeState::Var(x)))
                .collect();
            Ok(Approx::exact(values))
        },
    )
}

/// An evaluator of resumption trees over a carrier, compatible with unit
/// and multiplication on observable depths.
pub struct EMAlgebra<C: Leaf> {
    inst: Inst,
    elements: Option<Vec<C>>,
    chi: Rc<dyn Fn(&ResTree<C>, IterPolicy) -> Result<Approx<C>, EffectError>>,
}

impl<C: Leaf> Clone for EMAlgebra<C> {
    fn clone(&self) -> Self {
        EMAlgebra {
            inst: Rc::clone(&self.inst),
            elements: self.elements.clone(),
            chi: Rc::clone(&self.chi),
        }
    }
}

impl<C: Leaf> EMAlgebra<C> {
    pub fn new(
        inst: Inst,
        elements: Option<Vec<C>>,
        chi: impl Fn(&ResTree<C>, IterPolicy) -> Result<Approx<C>, EffectError> + 'static,
    ) -> Self {
        EMAlgebra {
            inst,
            elements,
            chi: Rc::new(chi),
        }
    }

    pub fn inst(&self) -> &Inst {
        &self.inst
    }

    pub fn elements(&self) -> Option<&[C]> {
        self.elements.as_deref()
    }

    pub fn eval(&self, t: &ResTree<C>, policy: IterPolicy) -> Result<Approx<C>, EffectError> {
        (self.chi)(t, policy)
    }

    /// Builds an evaluator from a pointed ordered carrier: the value of a
    /// tree is the join of evaluating its depth-n truncations with bottom at
    /// the frontier.
    pub fn via_truncation(spec: &CppoAlgebraSpec<C>) -> EMAlgebra<C> {
        let bottom = spec.bottom.clone();
        let leq = Rc::clone(&spec.leq);
        let structure = Rc::clone(&spec.structure);
        EMAlgebra::new(
            Rc::clone(&spec.inst),
            Some(spec.elements.clone()),
            move |t, policy| {
                let mut memo = std::collections::BTreeMap::new();
                let window = policy.window();
                let mut current = eval_depth(t, 0, &bottom, &structure, &mut memo);
                let mut settled = false;
                for n in 1..=window {
                    let next = eval_depth(t, n, &bottom, &structure, &mut memo);
                    if !leq(&current, &next) {
                        return Err(EffectError::NonMonotoneChain);
                    }
                    settled = next == current;
                    current = next;
                }
                if settled {
                    Ok(Approx::exact(current))
                } else {
                    match policy {
                        IterPolicy::Exact { window } => Err(EffectError::NonConvergence {
                            window,
                            last: format!("{current:?}"),
                        }),
                        IterPolicy::Depth(_) => Ok(Approx::approximate(current)),
                    }
                }
            },
        )
    }
}

fn eval_depth<C: Leaf>(
    t: &ResTree<C>,
    n: usize,
    bottom: &C,
    structure: &Rc<dyn Fn(&HashValue<C, C>) -> C>,
    memo: &mut std::collections::BTreeMap<(u64, usize), C>,
) -> C {
    if n == 0 {
        return bottom.clone();
    }
    if let Some(v) = memo.get(&(t.id(), n)) {
        return v.clone();
    }
    let plugged: HashValue<C, C> = t.out().map(|item| match item {
        HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
            symbol: sl.symbol,
            children: sl
                .children
                .iter()
                .map(|c| eval_depth(c, n - 1, bottom, structure, memo))
                .collect(),
        }),
    });
    let out = structure(&plugged);
    memo.insert((t.id(), n), out.clone());
    out
}

/// From an evaluator to an algebra with iteration: the structure evaluates
/// one embedded level, and a system is solved by unfolding it into a tree
/// and evaluating.
pub fn algebra_from_evaluator<C: Leaf>(em: &EMAlgebra<C>, policy: IterPolicy) -> ElgotAlgebra<C> {
    let em_s = em.clone();
    let em_i = em.clone();
    ElgotAlgebra::new(
        Rc::clone(&em.inst),
        em.elements.clone(),
        move |v| Ok(em_s.eval(&ext(&em_s.inst, v), policy)?.value),
        move |e, p| {
            let mut values = Vec::with_capacity(e.domain().size());
            let mut exact = true;
            let unfolder = Unfolder::new(Rc::clone(&em_i.inst), {
                let e2 = e.clone();
                move |x: &Point| e2.entry(x).expect("system is total").clone()
            });
            for x in e.domain().points() {
                let r = em_i.eval(&unfolder.tree(&x), p)?;
                exact &= r.exact;
                values.push(r.value);
            }
            Ok(Approx {
                value: values,
                exact,
            })
        },
    )
}

/// From an algebra with iteration to an evaluator: a tree is evaluated by
/// solving the system formed by its reachable handles. The policy's window
/// bounds the number of handles explored.
pub fn evaluator_from_algebra<C: Leaf>(alg: &ElgotAlgebra<C>) -> EMAlgebra<C> {
    let alg = alg.clone();
    EMAlgebra::new(
        Rc::clone(&alg.inst),
        alg.elements.clone(),
        move |t, policy| {
            let budget = policy.window().max(16) * 64;
            let states = reachable(t, budget).ok_or(EffectError::NonConvergence {
                window: budget,
                last: "reachable tree handles exceeded the state budget".into(),
            })?;
            let domain = Space::atoms(Carrier::indexed("s", states.len()));
            let entries: Vec<HashValue<C, Point>> = states
                .iter()
                .map(|u| {
                    u.out().map(|item| match item {
                        HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
                        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                            symbol: sl.symbol,
                            children: sl
                                .children
                                .iter()
                                .map(|c| {
                                    let i = states
                                        .iter()
                                        .position(|u2| u2 == c)
                                        .expect("child of a reachable tree is reachable");
                                    Point::At(i)
                                })
                                .collect(),
                        }),
                    })
                })
                .collect();
            let system = HashSystem::new(Rc::clone(&alg.inst), domain, entries)?;
            let solved = alg.iterate(&system, policy)?;
            Ok(Approx {
                value: solved.value[0].clone(),
                exact: solved.exact,
            })
        },
    )
}

/// The axioms an algebra's iteration operator is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Solution,
    Functoriality,
    Compositionality,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Solution => "SOLUTION",
            Axiom::Functoriality => "FUNCTORIALITY",
            Axiom::Compositionality => "COMPOSITIONALITY",
        }
    }
}

/// One concrete instance of an axiom to check.
pub enum AxiomInstance<C> {
    /// `iter(e) = a ∘ T(id + Σ iter(e)) ∘ e`.
    Solution { e: HashSystem<C> },
    /// `f ∘ h = T(id + Σ h) ∘ e` implies `iter(f) ∘ h = iter(e)`.
    Functoriality {
        e: HashSystem<C>,
        f: HashSystem<C>,
        h: PureMap,
    },
    /// `iter(combine(f,g)) ∘ inr = iter(substitute(iter(f), g))`.
    Compositionality {
        f: HashSystem<C>,
        g: HashSystem<Point>,
    },
}

/// The verdict of one law check; non-convergence is reported separately
/// from failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass { vacuous: bool },
    Fail { witness: String },
    NonConvergence,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass { .. })
    }

    /// One machine-parsable report line:
    /// `AXIOM instance-id PASS|FAIL|NONCONV [witness]`.
    pub fn report_line(&self, axiom: &str, instance_id: &str) -> String {
        match self {
            CheckOutcome::Pass { .. } => format!("{axiom} {instance_id} PASS"),
            CheckOutcome::Fail { witness } => format!("{axiom} {instance_id} FAIL {witness}"),
            CheckOutcome::NonConvergence => format!("{axiom} {instance_id} NONCONV"),
        }
    }
}

/// Evaluates both sides of the chosen axiom under the given policy.
/// Carrier values are compared with `eq`: structural equality for concrete
/// carriers, depth-bounded bisimilarity for tree carriers.
pub fn check_axiom<C: Leaf>(
    alg: &ElgotAlgebra<C>,
    instance: &AxiomInstance<C>,
    policy: IterPolicy,
    eq: impl Fn(&C, &C) -> bool,
) -> CheckOutcome {
    match run_axiom(alg, instance, policy, &eq) {
        Ok(outcome) => outcome,
        Err(EffectError::NonConvergence { .. }) => CheckOutcome::NonConvergence,
        Err(e) => CheckOutcome::Fail {
            witness: format!("error: {e}"),
        },
    }
}

fn run_axiom<C: Leaf>(
    alg: &ElgotAlgebra<C>,
    instance: &AxiomInstance<C>,
    policy: IterPolicy,
    eq: &impl Fn(&C, &C) -> bool,
) -> Result<CheckOutcome, EffectError> {
    match instance {
        AxiomInstance::Solution { e } => {
            let solved = alg.iterate(e, policy)?.value;
            for (i, x) in e.domain().points().iter().enumerate() {
                let rhs = alg.structure(&plug_values(e.domain(), e.entry(x)?, &solved)?)?;
                if !eq(&solved[i], &rhs) {
                    return Ok(CheckOutcome::Fail {
                        witness: format!(
                            "at {}: iter = {:?}, one-step unfolding = {:?}",
                            e.domain().render_point(x),
                            solved[i],
                            rhs
                        ),
                    });
                }
            }
            Ok(CheckOutcome::Pass { vacuous: false })
        }
        AxiomInstance::Functoriality { e, f, h } => {
            // premise f ∘ h = T(id + Σ h) ∘ e, checked extensionally
            for x in e.domain().points() {
                let lhs = f.entry(h.apply(&x)?)?.clone();
                let rhs = e.entry(&x)?.try_map(|item| {
                    Ok(match item {
                        HashItem::Leaf(c) => HashItem::Leaf(c.clone()),
                        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                            symbol: sl.symbol,
                            children: sl
                                .children
                                .iter()
                                .map(|p| h.apply(p).cloned())
                                .collect::<Result<_, EffectError>>()?,
                        }),
                    })
                })?;
                if lhs != rhs {
                    return Ok(CheckOutcome::Pass { vacuous: true });
                }
            }
            let fsol = alg.iterate(f, policy)?.value;
            let esol = alg.iterate(e, policy)?.value;
            for (i, x) in e.domain().points().iter().enumerate() {
                let fx = &fsol[f.domain().index_of(h.apply(x)?)?];
                if !eq(fx, &esol[i]) {
                    return Ok(CheckOutcome::Fail {
                        witness: format!(
                            "at {}: iter(f)∘h = {:?}, iter(e) = {:?}",
                            e.domain().render_point(x),
                            fx,
                            esol[i]
                        ),
                    });
                }
            }
            Ok(CheckOutcome::Pass { vacuous: false })
        }
        AxiomInstance::Compositionality { f, g } => {
            let fsol = alg.iterate(f, policy)?.value;
            let sequential = substitute_solution(&fsol, f.domain(), g)?;
            let rhs = alg.iterate(&sequential, policy)?.value;
            let combined = combine_systems(f, g)?;
            let both = alg.iterate(&combined, policy)?.value;
            let y_size = f.domain().size();
            for (i, x) in g.domain().points().iter().enumerate() {
                if !eq(&both[y_size + i], &rhs[i]) {
                    return Ok(CheckOutcome::Fail {
                        witness: format!(
                            "at {}: combined = {:?}, sequential = {:?}",
                            g.domain().render_point(x),
                            both[y_size + i],
                            rhs[i]
                        ),
                    });
                }
            }
            Ok(CheckOutcome::Pass { vacuous: false })
        }
    }
}

/// Report for a homomorphism check between algebras.
#[derive(Debug, Clone)]
pub struct HomReport {
    /// `iter_B(T(f+Σid) ∘ e) = f ∘ iter_A(e)` on every sampled system.
    pub iteration_preserved: bool,
    /// `f(a(v)) = b(T(f+Σf)(v))` on all enumerable inputs, when available.
    pub structure_preserved: Option<bool>,
    /// Whether preservation of iteration implied preservation of structure
    /// on this evidence.
    pub implication_held: bool,
    pub failures: Vec<String>,
}

/// Checks the morphism condition on sampled systems, then the underlying
/// algebra-map condition on enumerable inputs.
pub fn check_hom<C: Leaf, D: Leaf>(
    f: impl Fn(&C) -> D,
    alg_a: &ElgotAlgebra<C>,
    alg_b: &ElgotAlgebra<D>,
    systems: &[HashSystem<C>],
    policy: IterPolicy,
) -> Result<HomReport, EffectError> {
    let mut failures = Vec::new();
    let mut iteration_preserved = true;
    for (k, e) in systems.iter().enumerate() {
        let relabeled = e.relabel_leaves(&f);
        let lhs = alg_b.iterate(&relabeled, policy)?.value;
        let rhs: Vec<D> = alg_a.iterate(e, policy)?.value.iter().map(&f).collect();
        if lhs != rhs {
            iteration_preserved = false;
            failures.push(format!("system {k}: {lhs:?} != {rhs:?}"));
        }
    }
    let structure_preserved = match alg_a.elements() {
        Some(elements) => {
            let values = enumerate_hash_values(alg_a.inst(), elements, elements)?;
            let mut ok = true;
            for v in &values {
                let lhs = f(&alg_a.structure(v)?);
                let mapped: HashValue<D, D> = v.map(|item| match item {
                    HashItem::Leaf(c) => HashItem::Leaf(f(c)),
                    HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                        symbol: sl.symbol,
                        children: sl.children.iter().map(&f).collect(),
                    }),
                });
                let rhs = alg_b.structure(&mapped)?;
                if lhs != rhs {
                    ok = false;
                    failures.push(format!("structure at {v:?}: {lhs:?} != {rhs:?}"));
                }
            }
            Some(ok)
        }
        None => None,
    };
    let implication_held = !iteration_preserved || structure_preserved.unwrap_or(true);
    Ok(HomReport {
        iteration_preserved,
        structure_preserved,
        implication_held,
        failures,
    })
}

/// Probes uniqueness of solutions in the free algebra: reports which
/// candidate assignments satisfy the solution equation to depth `n`, and
/// whether all satisfying candidates agree pairwise to that depth.
pub struct UniqueSolutionReport {
    pub satisfies: Vec<bool>,
    pub satisfying_agree: bool,
}

pub fn probe_unique_solution(
    free: &ElgotAlgebra<ResTree<Point>>,
    e: &HashSystem<ResTree<Point>>,
    candidates: &[Vec<ResTree<Point>>],
    depth: usize,
) -> Result<UniqueSolutionReport, EffectError> {
    let mut satisfies = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let mut ok = true;
        for (i, x) in e.domain().points().iter().enumerate() {
            let rhs = free.structure(&plug_values(e.domain(), e.entry(x)?, cand)?)?;
            if !cand[i].bisim_depth(&rhs, depth) {
                ok = false;
                break;
            }
        }
        satisfies.push(ok);
    }
    let mut satisfying_agree = true;
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            if satisfies[i] && satisfies[j] {
                for (a, b) in candidates[i].iter().zip(&candidates[j]) {
                    satisfying_agree &= a.bisim_depth(b, depth);
                }
            }
        }
    }
    Ok(UniqueSolutionReport {
        satisfies,
        satisfying_agree,
    })
}

/// All systems `X -> T(A+ΣX)` over the given leaves, for enumerable monads,
/// within a budget on the number of systems.
pub fn enumerate_systems<C: Leaf>(
    inst: &Inst,
    domain: &Space,
    leaves: &[C],
    budget: usize,
) -> Result<Vec<HashSystem<C>>, EffectError> {
    let values = enumerate_hash_values(inst, leaves, &domain.points())?;
    let n = domain.size();
    let total = values.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > budget {
        return Err(EffectError::BudgetExceeded {
            required: format!("{total} systems (budget {budget})"),
        });
    }
    if n == 0 {
        return Ok(vec![HashSystem::new(
            Rc::clone(inst),
            domain.clone(),
            Vec::new(),
        )?]);
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    loop {
        let entries: Vec<HashValue<C, Point>> = idx.iter().map(|&i| values[i].clone()).collect();
        out.push(HashSystem::new(Rc::clone(inst), domain.clone(), entries)?);
        let mut k = n;
        let mut rolled_over = true;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < values.len() {
                rolled_over = false;
                break;
            }
            idx[k] = 0;
        }
        if rolled_over {
            break;
        }
    }
    Ok(out)
}

/// The algebra on `T(Y + Σ A)` induced by an algebra on `A` and a map
/// `f : Y -> A`, together with the collapse map (relabel leaves through
/// `f`, then evaluate), which is a morphism back to the base algebra.
pub struct AuxAlgebra<C> {
    pub algebra: ElgotAlgebra<HashValue<Point, C>>,
    pub collapse: Rc<dyn Fn(&HashValue<Point, C>) -> Result<C, EffectError>>,
}

pub fn aux_algebra<C: Leaf>(
    base: &ElgotAlgebra<C>,
    leaf_space: &Space,
    f: &[C],
) -> AuxAlgebra<C> {
    let base_c = base.clone();
    let f_values = f.to_vec();
    let leaves = leaf_space.clone();
    let collapse: Rc<dyn Fn(&HashValue<Point, C>) -> Result<C, EffectError>> =
        Rc::new(move |v: &HashValue<Point, C>| {
            let relabeled: HashValue<C, C> = v.try_map(|item| {
                Ok(match item {
                    HashItem::Leaf(p) => HashItem::Leaf(f_values[leaves.index_of(p)?].clone()),
                    HashItem::Node(sl) => HashItem::Node(sl.clone()),
                })
            })?;
            base_c.structure(&relabeled)
        });

    // structure: children of node layers are collapsed into the base
    // carrier, then the whole level is flattened on the leaf side
    let structure_collapse = Rc::clone(&collapse);
    let inst_s = Rc::clone(base.inst());
    let structure = move |v: &HashValue<HashValue<Point, C>, HashValue<Point, C>>| {
        let lowered: HashValue<HashValue<Point, C>, C> = v.try_map(|item| {
            Ok(match item {
                HashItem::Leaf(inner) => HashItem::Leaf(inner.clone()),
                HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                    symbol: sl.symbol,
                    children: sl
                        .children
                        .iter()
                        .map(|c| structure_collapse(c))
                        .collect::<Result<_, EffectError>>()?,
                }),
            })
        })?;
        Ok(graft(&inst_s, &lowered, |inner| inner.clone()))
    };

    // iteration: solve the collapsed system in the base algebra, then plug
    // the base solution into the original entries
    let iter_collapse = Rc::clone(&collapse);
    let base_i = base.clone();
    let iter = move |e: &HashSystem<HashValue<Point, C>>,
                     policy: IterPolicy|
          -> Result<Approx<Vec<HashValue<Point, C>>>, EffectError> {
        let lowered_entries = e
            .entries()
            .iter()
            .map(|v| {
                v.try_map(|item| {
                    Ok(match item {
                        HashItem::Leaf(inner) => HashItem::Leaf(iter_collapse(inner)?),
                        HashItem::Node(sl) => HashItem::Node(sl.clone()),
                    })
                })
            })
            .collect::<Result<Vec<_>, EffectError>>()?;
        let lowered =
            HashSystem::new(Rc::clone(base_i.inst()), e.domain().clone(), lowered_entries)?;
        let solved = base_i.iterate(&lowered, policy)?;
        let out = e
            .entries()
            .iter()
            .map(|v| {
                let plugged: HashValue<HashValue<Point, C>, C> = v.try_map(|item| {
                    Ok(match item {
                        HashItem::Leaf(inner) => HashItem::Leaf(inner.clone()),
                        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                            symbol: sl.symbol,
                            children: sl
                                .children
                                .iter()
                                .map(|x| Ok(solved.value[e.domain().index_of(x)?].clone()))
                                .collect::<Result<_, EffectError>>()?,
                        }),
                    })
                })?;
                Ok(graft(base_i.inst(), &plugged, |inner| inner.clone()))
            })
            .collect::<Result<Vec<_>, EffectError>>()?;
        Ok(Approx {
            value: out,
            exact: solved.exact,
        })
    };
    AuxAlgebra {
        algebra: ElgotAlgebra::new(Rc::clone(base.inst()), None, structure, iter),
        collapse,
    }
}

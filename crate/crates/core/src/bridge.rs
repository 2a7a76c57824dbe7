//! Connections between stepwise processes and one-shot effects: collapsing
//! a delay-signature tree into a single effect value, trace extraction for
//! process systems, and the passage between the monad-level iteration
//! operator and iteration through algebras of the monad.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::rc::Rc;

use crate::effects::{
    iterate, Approx, Carrier, EffectError, EffectValue, IterPolicy, KleisliMap, MonadId, Point,
    PureMap, Space, Word,
};
use crate::elgot::{ElgotAlgebra, EMAlgebra, HashSystem};
use crate::pmonad::{HashItem, HashValue, Inst, TAlgebra};
use crate::proclang::EquationSystem;
use crate::resumption::{reachable, Leaf, ResTree, Unfolder};
use crate::signatures::SigmaLayer;

fn require_delay(inst: &Inst) -> Result<(), EffectError> {
    if inst.sig.is_delay() {
        Ok(())
    } else {
        Err(EffectError::Unsupported {
            what: "collapsing is defined for the delay signature".into(),
        })
    }
}

/// Collapses a delay-signature tree into one effect value: the iteration of
/// the tree's own observation map. Finite-state trees are solved exactly by
/// an ascending chain over their reachable handles; otherwise the depth
/// policy evaluates a bounded unfolding.
pub fn collapse<C: Leaf>(
    t: &ResTree<C>,
    policy: IterPolicy,
) -> Result<Approx<EffectValue<C>>, EffectError> {
    require_delay(t.instance())?;
    match policy {
        IterPolicy::Exact { window } => {
            let states = reachable(t, window.max(16) * 64).ok_or_else(|| {
                EffectError::NonConvergence {
                    window,
                    last: "reachable tree handles exceeded the state budget".into(),
                }
            })?;
            let index_of = |u: &ResTree<C>| {
                states
                    .iter()
                    .position(|s| s == u)
                    .expect("child of a reachable tree is reachable")
            };
            let outs: Vec<HashValue<C, usize>> = states
                .iter()
                .map(|s| {
                    s.out().map(|item| match item {
                        HashItem::Leaf(l) => HashItem::Leaf(l.clone()),
                        HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                            symbol: sl.symbol,
                            children: sl.children.iter().map(&index_of).collect(),
                        }),
                    })
                })
                .collect();
            let bottom: EffectValue<C> = t.instance().monad.bottom();
            let mut current = vec![bottom; states.len()];
            let advance = |s: &[EffectValue<C>]| -> Vec<EffectValue<C>> {
                outs.iter()
                    .map(|v| {
                        v.bind(|item| match item {
                            HashItem::Leaf(l) => t.instance().monad.unit(l.clone()),
                            HashItem::Node(sl) => s[sl.children[0]].clone(),
                        })
                    })
                    .collect()
            };
            for _ in 0..window {
                let next = advance(&current);
                if next == current {
                    return Ok(Approx::exact(current.swap_remove(0)));
                }
                current = next;
            }
            let next = advance(&current);
            if next == current {
                return Ok(Approx::exact(current.swap_remove(0)));
            }
            Err(EffectError::NonConvergence {
                window,
                last: format!("{:?}", current[0]),
            })
        }
        IterPolicy::Depth(n) => {
            let mut memo: BTreeMap<(u64, usize), EffectValue<C>> = BTreeMap::new();
            Ok(Approx::approximate(collapse_depth(t, n, &mut memo)))
        }
    }
}

fn collapse_depth<C: Leaf>(
    t: &ResTree<C>,
    n: usize,
    memo: &mut BTreeMap<(u64, usize), EffectValue<C>>,
) -> EffectValue<C> {
    if n == 0 {
        return t.instance().monad.bottom();
    }
    if let Some(v) = memo.get(&(t.id(), n)) {
        return v.clone();
    }
    let out = t.out().bind(|item| match item {
        HashItem::Leaf(l) => t.instance().monad.unit(l.clone()),
        HashItem::Node(sl) => collapse_depth(&sl.children[0], n - 1, memo),
    });
    memo.insert((t.id(), n), out.clone());
    out
}

/// The evaluator sending a tree of effect values to the flattening of its
/// collapse; its carrier is the set of one-shot values themselves.
pub fn flattened_collapse_evaluator(
    inst: &Inst,
    value_space: &Space,
) -> Result<EMAlgebra<EffectValue<Point>>, EffectError> {
    require_delay(inst)?;
    let elements = inst.monad.enumerate_values(&value_space.points()).ok();
    Ok(EMAlgebra::new(
        Rc::clone(inst),
        elements,
        |t: &ResTree<EffectValue<Point>>, policy| {
            let collapsed = collapse(t, policy)?;
            Ok(Approx {
                value: collapsed.value.bind(|inner| inner.clone()),
                exact: collapsed.exact,
            })
        },
    ))
}

/// The successful traces of a process variable, up to a maximum length, in
/// shortlex order. The system's action prefixes are re-expressed inside the
/// trace monad, the solution tree is collapsed to the needed depth, and
/// exit-complete words are kept.
pub fn trace_set(
    system: &EquationSystem,
    var: &str,
    maxlen: usize,
) -> Result<Vec<Word>, crate::proclang::ProcError> {
    let trace_system = to_trace_steps(system)?;
    let point = system
        .var_point(var)
        .ok_or_else(|| crate::proclang::ProcError::UndefinedVariable {
            name: var.to_string(),
        })?;
    let unfolder = Unfolder::new(Rc::clone(&trace_system.inst), {
        let table = trace_system.table.clone();
        move |p: &Point| match p {
            Point::At(i) => table[*i].clone(),
            _ => unreachable!("states are atoms"),
        }
    });
    let tree = unfolder.tree(&point);
    // a trace of length k completes after at most k actions and one exit
    let collapsed = collapse(&tree, IterPolicy::Depth(maxlen + 1))?;
    let mut words: Vec<Word> = match collapsed.value {
        EffectValue::Traces(s) => s
            .into_iter()
            .map(|(w, _)| w)
            .filter(|w| w.len() <= maxlen)
            .collect(),
        _ => unreachable!("trace re-expression produces trace values"),
    };
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    words.dedup();
    Ok(words)
}

struct TraceSteps {
    inst: Inst,
    table: Vec<HashValue<Point, Point>>,
}

/// Re-expresses a compiled system inside the trace monad: action layers
/// become one-letter words over a delay step; exits and trace-monad systems
/// pass through unchanged.
fn to_trace_steps(system: &EquationSystem) -> Result<TraceSteps, crate::proclang::ProcError> {
    if let Some(v) = &system.violation {
        return Err(crate::proclang::ProcError::Unguarded {
            violation: v.clone(),
        });
    }
    let table = system
        .step_table(IterPolicy::Exact { window: 256 })?
        .value;
    match &system.inst.monad {
        MonadId::TracePowerset(_) => Ok(TraceSteps {
            inst: Rc::clone(&system.inst),
            table,
        }),
        MonadId::FinPowerset => {
            // action layers emit their letter; the delay symbol (and any
            // empty alphabet) emits nothing
            let silent = system.inst.sig.is_delay();
            let alphabet = match system.inst.sig.alphabet() {
                Some(a) if !a.is_empty() => (**a).clone(),
                Some(_) => Carrier::of("A", &["u"]),
                None if silent => Carrier::of("A", &["u"]),
                None => return Err(crate::proclang::ProcError::TraceModeNeedsActions),
            };
            let monad = MonadId::traces(alphabet)?;
            let inst = crate::pmonad::PMonadInstance::new(
                monad,
                crate::signatures::Signature::delay(),
            );
            let converted = table
                .iter()
                .map(|v| match v {
                    EffectValue::Set(items) => EffectValue::Traces(
                        items
                            .iter()
                            .map(|item| match item {
                                HashItem::Leaf(l) => (Vec::new(), HashItem::Leaf(l.clone())),
                                HashItem::Node(sl) => (
                                    if silent { Vec::new() } else { vec![sl.symbol] },
                                    HashItem::Node(SigmaLayer {
                                        symbol: 0,
                                        children: sl.children.clone(),
                                    }),
                                ),
                            })
                            .collect::<BTreeSet<_>>(),
                    ),
                    _ => unreachable!("powerset system"),
                })
                .collect();
            Ok(TraceSteps {
                inst,
                table: converted,
            })
        }
        MonadId::Maybe => Err(crate::proclang::ProcError::TraceModeNeedsActions),
    }
}

/// Iteration through an algebra of the monad: solves `e : X -> T(A+X)` by
/// the monad-level operator, then evaluates through the algebra.
pub fn iterate_into_algebra(
    a: &TAlgebra<Point>,
    carrier: &Space,
    e: &KleisliMap,
    policy: IterPolicy,
) -> Result<Approx<Vec<Point>>, EffectError> {
    let solved = iterate(e, policy)?;
    let values = solved
        .value
        .values()
        .iter()
        .map(|v| a.apply(v))
        .collect::<Vec<_>>();
    let _ = carrier;
    Ok(Approx {
        value: values,
        exact: solved.exact,
    })
}

/// The same operator phrased through the combined-carrier algebra
/// `a ∘ T∇ ∘ T inl`; agrees with [`iterate_into_algebra`] extensionally.
pub fn iterate_into_algebra_tagged(
    a: &TAlgebra<Point>,
    carrier: &Space,
    e: &KleisliMap,
    policy: IterPolicy,
) -> Result<Approx<Vec<Point>>, EffectError> {
    let solved = iterate(e, policy)?;
    let inl = PureMap::inl(carrier, carrier);
    let codiag = PureMap::codiag(carrier);
    let values = solved
        .value
        .values()
        .iter()
        .map(|v| {
            let tagged = v.try_map(|p| inl.apply(p).cloned())?;
            let folded = tagged.try_map(|p| codiag.apply(p).cloned())?;
            Ok(a.apply(&folded))
        })
        .collect::<Result<Vec<_>, EffectError>>()?;
    Ok(Approx {
        value: values,
        exact: solved.exact,
    })
}

/// The free-algebra-of-values instance: carrier `T Y`, structure the
/// flattening of one level, iteration `e ↦ flatten ∘ e†`. Only enumerable
/// monads carry the element list.
pub fn value_algebra(monad: &MonadId, y: &Space) -> Result<ElgotAlgebra<EffectValue<Point>>, EffectError> {
    let inst = crate::pmonad::PMonadInstance::new(
        monad.clone(),
        crate::signatures::Signature::delay(),
    );
    let elements = monad.enumerate_values(&y.points())?;
    let y = y.clone();
    let monad_s = monad.clone();
    let monad_i = monad.clone();
    let elements_i = elements.clone();
    Ok(ElgotAlgebra::new(
        Rc::clone(&inst),
        Some(elements),
        move |v: &HashValue<EffectValue<Point>, EffectValue<Point>>| {
            let _ = &monad_s;
            Ok(v.bind(|item| match item {
                HashItem::Leaf(inner) => inner.clone(),
                HashItem::Node(sl) => sl.children[0].clone(),
            }))
        },
        move |e: &HashSystem<EffectValue<Point>>, policy| {
            // leaves index the enumerated values of T Y
            let b_space = Space::atoms(Carrier::indexed("b", elements_i.len()));
            let cod = Space::sum(&b_space, e.domain());
            let as_kleisli = KleisliMap::from_fn(
                monad_i.clone(),
                e.domain().clone(),
                cod.clone(),
                |x| {
                    e.entry(x).expect("system is total").map(|item| match item {
                        HashItem::Leaf(inner) => {
                            let i = elements_i
                                .iter()
                                .position(|v| v == inner)
                                .expect("leaf value is enumerable");
                            Point::inl(Point::At(i))
                        }
                        HashItem::Node(sl) => Point::inr(sl.children[0].clone()),
                    })
                },
            )?;
            let solved = iterate(&as_kleisli, policy)?;
            let _ = &y;
            let values = solved
                .value
                .values()
                .iter()
                .map(|v| {
                    v.bind(|p| match p {
                        Point::At(i) => elements_i[*i].clone(),
                        _ => unreachable!("iteration lands in the leaf space"),
                    })
                })
                .collect();
            Ok(Approx {
                value: values,
                exact: solved.exact,
            })
        },
    ))
}

/// Recovers the monad-level operator from algebra-level iteration:
/// `e† = iter(T(unit + id) ∘ e)` through the value algebra on `T Y`.
pub fn iterate_from_algebra(
    alg: &ElgotAlgebra<EffectValue<Point>>,
    e: &KleisliMap,
    policy: IterPolicy,
) -> Result<Approx<KleisliMap>, EffectError> {
    let (y, x) = e.codomain().as_sum().ok_or_else(|| EffectError::SpaceMismatch {
        expected: "Y+X".into(),
        got: e.codomain().describe(),
    })?;
    let y = y.clone();
    let x = x.clone();
    let system = HashSystem::from_fn(
        Rc::clone(alg.inst()),
        x.clone(),
        |p| {
            e.apply(p).expect("map is total").map(|q| match q {
                Point::L(yy) => HashItem::Leaf(e.monad().unit(yy.as_ref().clone())),
                Point::R(xx) => HashItem::Node(SigmaLayer {
                    symbol: 0,
                    children: vec![xx.as_ref().clone()],
                }),
                Point::At(_) => unreachable!("sum point"),
            })
        },
    )?;
    let solved = alg.iterate(&system, policy)?;
    let map = KleisliMap::new(e.monad().clone(), x, y, solved.value)?;
    Ok(Approx {
        value: map,
        exact: solved.exact,
    })
}

/// Checks the combined-iteration condition for a nested system
/// `e : X -> T(T(A+X) + X)`: flattening first and iterating through the
/// algebra agrees with iterating in two stages. `inner_values` enumerates
/// `T(A+X)` in the canonical order used by `e`'s left summand.
pub fn check_algebra_codiagonal(
    a: &TAlgebra<Point>,
    carrier: &Space,
    x_space: &Space,
    inner_values: &[EffectValue<Point>],
    e: &KleisliMap,
    policy: IterPolicy,
    truncated_first_stage: bool,
) -> Result<bool, EffectError> {
    let ax = Space::sum(carrier, x_space);
    // flatten the inner layer into one system X -> T(A+X)
    let flattened = KleisliMap::from_fn(
        e.monad().clone(),
        x_space.clone(),
        ax.clone(),
        |p| {
            e.apply(p).expect("total").bind(|q| match q {
                Point::L(b) => match b.as_ref() {
                    Point::At(i) => inner_values[*i].clone(),
                    _ => unreachable!("inner leaf space is atomic"),
                },
                Point::R(xx) => e.monad().unit(Point::inr(xx.as_ref().clone())),
                Point::At(_) => unreachable!("sum point"),
            })
        },
    )?;
    let lhs = iterate_into_algebra(a, carrier, &flattened, policy)?.value;

    // two stages: solve over the value carrier, flatten, then iterate again
    let first_policy = if truncated_first_stage {
        IterPolicy::Depth(1)
    } else {
        policy
    };
    let first = iterate(e, first_policy)?;
    let second_system = KleisliMap::from_fn(
        e.monad().clone(),
        x_space.clone(),
        ax.clone(),
        |p| {
            first
                .value
                .apply(p)
                .expect("total")
                .bind(|b| match b {
                    Point::At(i) => inner_values[*i].clone(),
                    _ => unreachable!("inner leaf space is atomic"),
                })
        },
    )?;
    let rhs = iterate_into_algebra(a, carrier, &second_system, policy)?.value;
    Ok(lhs == rhs)
}

//! Least-fixed-point iteration for the supported monads, computed as the
//! join of the ascending chain `s_0 = ⊥`, `s_{n+1} = [unit, s_n]* ∘ f`.
//!
//! Over finite carriers the chain stabilizes for the maybe and powerset
//! monads; trace-monad chains may ascend forever, so those are iterated to a
//! fixed depth and tagged as approximate.

use super::kleisli::KleisliMap;
use super::value::EffectValue;
use super::EffectError;

/// How far to drive an ascending chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterPolicy {
    /// Iterate until two consecutive approximants coincide; give up with a
    /// non-convergence error after `window` steps.
    Exact { window: usize },
    /// Return the n-th approximant, tagged approximate unless the chain
    /// happens to stabilize earlier.
    Depth(usize),
}

impl IterPolicy {
    pub fn window(self) -> usize {
        match self {
            IterPolicy::Exact { window } => window,
            IterPolicy::Depth(n) => n,
        }
    }
}

/// A value together with a flag recording whether it is exact or a
/// depth-bounded approximant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approx<T> {
    pub value: T,
    pub exact: bool,
}

impl<T> Approx<T> {
    pub fn exact(value: T) -> Self {
        Approx { value, exact: true }
    }

    pub fn approximate(value: T) -> Self {
        Approx {
            value,
            exact: false,
        }
    }
}

/// One step of the Kleene chain: `s ↦ [unit, s]* ∘ f`.
fn kleene_step(f: &KleisliMap, s: &KleisliMap) -> Result<KleisliMap, EffectError> {
    let unit = KleisliMap::unit_of(f.monad(), s.codomain());
    KleisliMap::copair(&unit, s)?.after(f)
}

/// Solves `f : X -> T(Y+X)` by iteration, returning a map `X -> T Y`.
///
/// The result is the least fixed point of `s ↦ [unit, s]* ∘ f` whenever the
/// chain stabilizes within the policy's window.
pub fn iterate(f: &KleisliMap, policy: IterPolicy) -> Result<Approx<KleisliMap>, EffectError> {
    let (exit, cont) = f.codomain().as_sum().ok_or_else(|| EffectError::SpaceMismatch {
        expected: format!("{}+{}", "Y", f.domain().describe()),
        got: f.codomain().describe(),
    })?;
    if cont != f.domain() {
        return Err(EffectError::SpaceMismatch {
            expected: f.domain().describe(),
            got: cont.describe(),
        });
    }
    let exit = exit.clone();
    let mut current = KleisliMap::bottom(f.monad(), f.domain(), &exit);
    let steps = policy.window();
    for _ in 0..steps {
        let next = kleene_step(f, &current)?;
        if next == current {
            return Ok(Approx::exact(current));
        }
        if !current.leq(&next)? {
            return Err(EffectError::NonMonotoneChain);
        }
        current = next;
    }
    // One more look to tell a just-stabilized chain from a truncated one.
    let next = kleene_step(f, &current)?;
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
}

/// A chain of approximants indexed by depth.
pub struct ApproximantSeq<E> {
    generator: Box<dyn Fn(usize) -> EffectValue<E>>,
    monotone: bool,
}

impl<E: Ord + Clone> ApproximantSeq<E> {
    pub fn new(generator: impl Fn(usize) -> EffectValue<E> + 'static, monotone: bool) -> Self {
        ApproximantSeq {
            generator: Box::new(generator),
            monotone,
        }
    }

    pub fn at(&self, n: usize) -> EffectValue<E> {
        (self.generator)(n)
    }

    /// Join of the chain: the exact limit if the chain has settled by the
    /// end of the window (a plateau in the middle of a chain does not count,
    /// since the chain may still rise later), otherwise the window-th
    /// approximant tagged approximate. A monotonicity violation in a chain
    /// declared monotone is a contract violation.
    pub fn lub(&self, window: usize) -> Result<Approx<EffectValue<E>>, EffectError> {
        let mut current = self.at(0);
        let mut settled = false;
        for n in 1..=window {
            let next = self.at(n);
            if self.monotone && !current.leq(&next)? {
                return Err(EffectError::NonMonotoneChain);
            }
            settled = next == current;
            current = next;
        }
        if settled {
            Ok(Approx::exact(current))
        } else {
            Ok(Approx::approximate(current))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::space::{Carrier, Point, Space};
    use crate::effects::value::MonadId;
    use std::collections::BTreeSet;

    fn space(name: &str, els: &[&str]) -> Space {
        Space::atoms(Carrier::of(name, els))
    }

    /// Brute-force Kleene chain over explicit tables, used as the oracle for
    /// the iteration operator.
    fn oracle_chain(f: &KleisliMap, steps: usize) -> Vec<KleisliMap> {
        let (exit, _) = f.codomain().as_sum().unwrap();
        let mut chain = vec![KleisliMap::bottom(f.monad(), f.domain(), exit)];
        for _ in 0..steps {
            let s = chain.last().unwrap();
            let unit = KleisliMap::unit_of(f.monad(), exit);
            let next = KleisliMap::copair(&unit, s).unwrap().after(f).unwrap();
            chain.push(next);
        }
        chain
    }

    #[test]
    fn immediate_exit_solves_in_one_step() {
        let x = space("x", &["x0"]);
        let y = space("y", &["y0"]);
        let yx = Space::sum(&y, &x);
        // f = unit ∘ inl ∘ g with g(x0) = y0
        let f = KleisliMap::from_fn(MonadId::Maybe, x.clone(), yx, |_| {
            MonadId::Maybe.unit(Point::inl(Point::At(0)))
        })
        .unwrap();
        let r = iterate(&f, IterPolicy::Exact { window: 10 }).unwrap();
        assert!(r.exact);
        assert_eq!(
            r.value.apply(&Point::At(0)).unwrap(),
            &MonadId::Maybe.unit(Point::At(0))
        );
    }

    #[test]
    fn pure_self_loop_yields_bottom() {
        let x = space("x", &["x0"]);
        let y = space("y", &["y0"]);
        let yx = Space::sum(&y, &x);
        let f = KleisliMap::from_fn(MonadId::Maybe, x.clone(), yx, |p| {
            MonadId::Maybe.unit(Point::inr(p.clone()))
        })
        .unwrap();
        let r = iterate(&f, IterPolicy::Exact { window: 10 }).unwrap();
        assert!(r.exact);
        assert!(r.value.apply(&Point::At(0)).unwrap().is_bottom());
    }

    #[test]
    fn powerset_exit_and_loop_stabilizes_at_exit() {
        // f(x) = {inl y, inr x}: the oracle chain reaches {y} in two steps
        // and stays there.
        let x = space("x", &["x0"]);
        let y = space("y", &["y0"]);
        let yx = Space::sum(&y, &x);
        let f = KleisliMap::from_fn(MonadId::FinPowerset, x.clone(), yx, |p| {
            let mut s = BTreeSet::new();
            s.insert(Point::inl(Point::At(0)));
            s.insert(Point::inr(p.clone()));
            EffectValue::Set(s)
        })
        .unwrap();
        let chain = oracle_chain(&f, 4);
        assert_eq!(chain[1], chain[2], "oracle chain stabilizes after step 1");
        let singleton_y: EffectValue<Point> =
            EffectValue::Set([Point::At(0)].into_iter().collect());
        assert_eq!(chain[1].apply(&Point::At(0)).unwrap(), &singleton_y);

        let r = iterate(&f, IterPolicy::Exact { window: 10 }).unwrap();
        assert!(r.exact);
        assert_eq!(r.value.apply(&Point::At(0)).unwrap(), &singleton_y);
    }

    #[test]
    fn trace_loop_reports_nonconvergence_and_depth_approximates() {
        let a = Carrier::of("A", &["a"]);
        let monad = MonadId::traces(a).unwrap();
        let x = space("x", &["x0"]);
        let y = space("y", &["y0"]);
        let yx = Space::sum(&y, &x);
        // f(x) = {(ε, inl y), (a, inr x)}: every loop pass appends a letter.
        let f = KleisliMap::from_fn(monad, x.clone(), yx, |p| {
            EffectValue::Traces(
                [
                    (vec![], Point::inl(Point::At(0))),
                    (vec![0], Point::inr(p.clone())),
                ]
                .into_iter()
                .collect(),
            )
        })
        .unwrap();
        assert!(matches!(
            iterate(&f, IterPolicy::Exact { window: 5 }),
            Err(EffectError::NonConvergence { .. })
        ));
        let r = iterate(&f, IterPolicy::Depth(4)).unwrap();
        assert!(!r.exact);
        // depth-4 approximant: words of length < 4 end in y
        match r.value.apply(&Point::At(0)).unwrap() {
            EffectValue::Traces(s) => {
                let words: Vec<usize> = s.iter().map(|(w, _)| w.len()).collect();
                assert_eq!(words, vec![0, 1, 2, 3]);
            }
            _ => panic!("trace value expected"),
        }
    }

    #[test]
    fn depth_agreement_on_short_traces() {
        // The depth-n and depth-(n+1) approximants agree on traces shorter
        // than n.
        let a = Carrier::of("A", &["a"]);
        let monad = MonadId::traces(a).unwrap();
        let x = space("x", &["x0"]);
        let y = space("y", &["y0"]);
        let yx = Space::sum(&y, &x);
        let f = KleisliMap::from_fn(monad, x.clone(), yx, |p| {
            EffectValue::Traces(
                [
                    (vec![0], Point::inl(Point::At(0))),
                    (vec![0], Point::inr(p.clone())),
                ]
                .into_iter()
                .collect(),
            )
        })
        .unwrap();
        for n in 1..5 {
            let vn = iterate(&f, IterPolicy::Depth(n)).unwrap().value;
            let vn1 = iterate(&f, IterPolicy::Depth(n + 1)).unwrap().value;
            let a = vn.apply(&Point::At(0)).unwrap().traces_below(n);
            let b = vn1.apply(&Point::At(0)).unwrap().traces_below(n);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn lub_of_constant_chain() {
        let v: EffectValue<usize> = EffectValue::Set([3].into_iter().collect());
        let seq = {
            let v = v.clone();
            ApproximantSeq::new(move |_| v.clone(), true)
        };
        let r = seq.lub(5).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, v);
    }

    #[test]
    fn lub_detects_non_monotone_chain() {
        let seq: ApproximantSeq<usize> = ApproximantSeq::new(
            |n| {
                if n == 0 {
                    EffectValue::Set([1].into_iter().collect())
                } else {
                    EffectValue::Set(BTreeSet::new())
                }
            },
            true,
        );
        assert!(matches!(seq.lub(3), Err(EffectError::NonMonotoneChain)));
    }

    #[test]
    fn lub_of_kleene_chain_matches_iterate() {
        let x = space("x", &["x0", "x1"]);
        let y = space("y", &["y0"]);
        let yx = Space::sum(&y, &x);
        // x0 -> {inr x1}, x1 -> {inl y0, inr x0}
        let f = KleisliMap::from_fn(MonadId::FinPowerset, x.clone(), yx, |p| match p {
            Point::At(0) => EffectValue::Set([Point::inr(Point::At(1))].into_iter().collect()),
            _ => EffectValue::Set(
                [Point::inl(Point::At(0)), Point::inr(Point::At(0))]
                    .into_iter()
                    .collect(),
            ),
        })
        .unwrap();
        let it = iterate(&f, IterPolicy::Exact { window: 10 }).unwrap();
        assert!(it.exact);
        let chain = oracle_chain(&f, 10);
        for (i, p) in x.points().iter().enumerate() {
            let seq = {
                let chain = chain.clone();
                let p = p.clone();
                ApproximantSeq::new(move |n| chain[n.min(10)].apply(&p).unwrap().clone(), true)
            };
            let l = seq.lub(10).unwrap();
            assert!(l.exact);
            assert_eq!(&l.value, it.value.value_at(i));
        }
    }
}

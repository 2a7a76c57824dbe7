//! Exhaustive law checking at the acceptance bounds: every law over the
//! maybe monad with all carrier sizes up to one, over the finite powerset
//! monad with unit recursion carriers, the depth-1 negative control, the
//! derivability cross-check, and depth-bounded agreement for the trace
//! monad.

mod common;

use common::rng;
use elgot_core::effects::{IterPolicy, MonadId};
use elgot_core::laws::{
    enumerate_instances, run_instances, sample_instances, standard_op, Law, Sizes,
};
use elgot_core::Carrier;

const BUDGET: usize = 1 << 20;

fn exact_op() -> impl Fn(
    &elgot_core::KleisliMap,
) -> Result<elgot_core::Approx<elgot_core::KleisliMap>, elgot_core::EffectError> {
    standard_op(IterPolicy::Exact { window: 256 })
}

#[test]
fn maybe_all_laws_all_sizes_up_to_one() {
    let op = exact_op();
    for law in Law::ALL {
        for x in 0..=1 {
            for y in 0..=1 {
                for z in 0..=1 {
                    let sizes = Sizes { x, y, z };
                    let instances =
                        enumerate_instances(law, &MonadId::Maybe, sizes, BUDGET).unwrap();
                    let report = run_instances(law, &instances, &op, None);
                    assert!(
                        report.failed == 0 && report.nonconv == 0,
                        "{} at {:?}: {:?}",
                        report.summary(),
                        sizes,
                        report.failures
                    );
                }
            }
        }
    }
}

#[test]
fn powerset_all_laws_unit_recursion_carriers() {
    let op = exact_op();
    for law in Law::ALL {
        for z in 0..=1 {
            let sizes = Sizes { x: 1, y: 1, z };
            let instances =
                enumerate_instances(law, &MonadId::FinPowerset, sizes, BUDGET).unwrap();
            let report = run_instances(law, &instances, &op, None);
            assert!(
                report.failed == 0 && report.nonconv == 0,
                "{} at {:?}: {:?}",
                report.summary(),
                sizes,
                report.failures
            );
        }
    }
}

#[test]
fn derivability_cross_check() {
    // on any instance set where the four defining laws pass exhaustively,
    // the derived identities (dinaturality, the two-variable simultaneous
    // recursion identity) pass as well
    let op = exact_op();
    for monad in [MonadId::Maybe, MonadId::FinPowerset] {
        let sizes = Sizes { x: 1, y: 1, z: 1 };
        let defining = [
            Law::Fixpoint,
            Law::Naturality,
            Law::Uniformity,
            Law::Codiagonal,
        ];
        for law in defining {
            let instances = enumerate_instances(law, &monad, sizes, BUDGET).unwrap();
            let report = run_instances(law, &instances, &op, None);
            assert!(report.failed == 0, "{}", report.summary());
        }
        for law in [Law::Dinaturality, Law::Bekic, Law::WeakSeq, Law::CodiagonalAlt] {
            let instances = enumerate_instances(law, &monad, sizes, BUDGET).unwrap();
            let report = run_instances(law, &instances, &op, None);
            assert!(
                report.failed == 0 && report.nonconv == 0,
                "derived law must follow: {} {:?}",
                report.summary(),
                report.failures
            );
        }
    }
}

#[test]
fn truncated_iteration_negative_control() {
    let op = standard_op(IterPolicy::Depth(1));
    let instances = enumerate_instances(
        Law::Fixpoint,
        &MonadId::FinPowerset,
        Sizes { x: 2, y: 1, z: 1 },
        BUDGET,
    )
    .unwrap();
    let report = run_instances(Law::Fixpoint, &instances, &op, None);
    assert!(report.failed > 0, "the cut chain must fail the fixpoint law");
    assert!(
        report.failures.iter().any(|l| l.contains("lhs")),
        "failures carry a witness: {:?}",
        report.failures.first()
    );
}

#[test]
fn trace_monad_agreement_on_short_words() {
    // both sides of every law agree on words shorter than n, for n up to 6
    let monad = MonadId::traces(Carrier::of("A", &["a", "b"])).unwrap();
    let mut r = rng(401);
    for law in Law::ALL {
        for n in 1..=6 {
            let instances = sample_instances(law, &monad, Sizes { x: 1, y: 1, z: 1 }, 10, &mut r);
            let op = standard_op(IterPolicy::Depth(n));
            let report = run_instances(law, &instances, &op, Some(n));
            assert!(
                report.failed == 0,
                "{} at depth {}: {:?}",
                report.summary(),
                n,
                report.failures
            );
        }
    }
}

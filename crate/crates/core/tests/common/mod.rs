//! Shared generators for the integration suites: random finite coalgebras,
//! random trees, and random equation systems over small carriers.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::rc::Rc;

use elgot_core::effects::{EffectValue, MonadId, Point, Space};
use elgot_core::pmonad::{HashItem, HashValue, Inst, PMonadInstance};
use elgot_core::resumption::{unfold, ResTree};
use elgot_core::signatures::{Signature, SigmaLayer};
use elgot_core::Carrier;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn actions_inst() -> Inst {
    let alphabet = Rc::new(Carrier::of("A", &["a", "b"]));
    PMonadInstance::new(MonadId::FinPowerset, Signature::actions(alphabet))
}

pub fn delay_inst(monad: MonadId) -> Inst {
    PMonadInstance::new(monad, Signature::delay())
}

pub fn space(name: &str, n: usize) -> Space {
    Space::atoms(Carrier::indexed(name, n))
}

/// A random step table over `states` states, `leaves` leaf labels, and
/// `symbols` unary symbols.
pub fn random_step_table_sym(
    rng: &mut ChaCha8Rng,
    states: u8,
    leaves: u8,
    symbols: usize,
) -> Vec<HashValue<u8, u8>> {
    (0..states)
        .map(|_| {
            let mut items = BTreeSet::new();
            for _ in 0..rng.gen_range(1..=3u8) {
                if rng.gen_bool(0.35) {
                    items.insert(HashItem::Leaf(rng.gen_range(0..leaves)));
                } else {
                    items.insert(HashItem::Node(SigmaLayer {
                        symbol: rng.gen_range(0..symbols),
                        children: vec![rng.gen_range(0..states)],
                    }));
                }
            }
            EffectValue::Set(items)
        })
        .collect()
}

/// A random step table over the two-action signature.
pub fn random_step_table(
    rng: &mut ChaCha8Rng,
    states: u8,
    leaves: u8,
) -> Vec<HashValue<u8, u8>> {
    random_step_table_sym(rng, states, leaves, 2)
}

/// A random finite-state tree over the given powerset instance with
/// `leaves` leaf labels; layers use the instance's own symbols.
pub fn random_tree(rng: &mut ChaCha8Rng, inst: &Inst, leaves: u8) -> ResTree<u8> {
    let states = rng.gen_range(1..=3u8);
    let table = random_step_table_sym(rng, states, leaves, inst.sig.len());
    let start = rng.gen_range(0..states);
    unfold(
        Rc::clone(inst),
        move |s: &u8| table[*s as usize].clone(),
        &start,
    )
}

/// Random point-leaf trees over a leaf space, via a random coalgebra.
pub fn random_point_tree(
    rng: &mut ChaCha8Rng,
    inst: &Inst,
    leaf_space: &Space,
) -> ResTree<Point> {
    let states = rng.gen_range(1..=3u8);
    let n_leaves = leaf_space.size().max(1) as u8;
    let table = random_step_table(rng, states, n_leaves);
    let table: Vec<HashValue<Point, u8>> = table
        .iter()
        .map(|v| {
            v.map(|item| match item {
                HashItem::Leaf(l) => HashItem::Leaf(Point::At(*l as usize)),
                HashItem::Node(sl) => HashItem::Node(sl.clone()),
            })
        })
        .collect();
    let start = rng.gen_range(0..states);
    unfold(
        Rc::clone(inst),
        move |s: &u8| table[*s as usize].clone(),
        &start,
    )
}

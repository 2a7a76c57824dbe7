//! Randomized suite for the tree monad: unit and associativity laws up to
//! depth-8 bisimilarity, the level equation of the monadic extension, and
//! the naturality identities of coiteration, each on at least fifty random
//! instances.

// Tree handles key ordered collections; their ordering is the immutable
// node id.
#![allow(clippy::mutable_key_type)]

mod common;

use std::rc::Rc;

use common::{actions_inst, random_step_table, random_tree, rng};
use elgot_core::pmonad::{graft, HashItem, HashValue};
use elgot_core::resumption::{flatten, unfold, unfold_graft, ResTree};
use elgot_core::signatures::SigmaLayer;
use rand::Rng;

const TREE_DEPTH: usize = 8;
const IDENTITY_DEPTH: usize = 6;
const SAMPLES: usize = 50;

#[test]
fn right_unit_law() {
    let inst = actions_inst();
    let mut r = rng(101);
    for _ in 0..SAMPLES {
        let t = random_tree(&mut r, &inst, 2);
        let inst2 = Rc::clone(&inst);
        let bound = t.bind(move |l: &u8| ResTree::pure(Rc::clone(&inst2), *l));
        assert!(bound.bisim_depth(&t, TREE_DEPTH));
    }
}

#[test]
fn left_unit_law() {
    let inst = actions_inst();
    let mut r = rng(102);
    for _ in 0..SAMPLES {
        let targets = [random_tree(&mut r, &inst, 2), random_tree(&mut r, &inst, 2)];
        let leaf = r.gen_range(0..2u8);
        let p = ResTree::pure(Rc::clone(&inst), leaf);
        let picked = targets[leaf as usize].clone();
        let applied = p.bind({
            let targets = targets.clone();
            move |l: &u8| targets[*l as usize].clone()
        });
        assert!(applied.bisim_depth(&picked, TREE_DEPTH));
    }
}

#[test]
fn associativity_law() {
    let inst = actions_inst();
    let mut r = rng(103);
    for _ in 0..SAMPLES {
        let t = random_tree(&mut r, &inst, 2);
        let fs = [random_tree(&mut r, &inst, 2), random_tree(&mut r, &inst, 2)];
        let gs = [random_tree(&mut r, &inst, 2), random_tree(&mut r, &inst, 2)];
        let f = {
            let fs = fs.clone();
            move |l: &u8| fs[*l as usize].clone()
        };
        let g = {
            let gs = gs.clone();
            move |l: &u8| gs[*l as usize].clone()
        };
        let lhs = t.bind(f.clone()).bind(g.clone());
        let rhs = t.bind(move |l| f(l).bind(g.clone()));
        assert!(lhs.bisim_depth(&rhs, TREE_DEPTH));
    }
}

#[test]
fn flatten_is_bind_of_identity() {
    let inst = actions_inst();
    let mut r = rng(104);
    for _ in 0..SAMPLES {
        let t = random_tree(&mut r, &inst, 2);
        let wrapped = ResTree::pure(Rc::clone(&inst), t.clone());
        assert!(flatten(&wrapped).bisim_depth(&t, TREE_DEPTH));
    }
}

/// The level of a bound tree equals the flattening of the relabeled level:
/// substituting leaf levels in and unfolding once commute.
#[test]
fn bind_level_equation() {
    let inst = actions_inst();
    let mut r = rng(105);
    for _ in 0..SAMPLES {
        let t = random_tree(&mut r, &inst, 2);
        let fs = [random_tree(&mut r, &inst, 2), random_tree(&mut r, &inst, 2)];
        let f = {
            let fs = fs.clone();
            move |l: &u8| fs[*l as usize].clone()
        };
        let lhs = t.bind(f.clone());

        let f2 = f.clone();
        let relocated: HashValue<u8, ResTree<u8>> = t.out().map(|item| match item {
            HashItem::Leaf(l) => HashItem::Leaf(*l),
            HashItem::Node(sl) => HashItem::Node(SigmaLayer {
                symbol: sl.symbol,
                children: sl.children.iter().map(|c| c.bind(f2.clone())).collect(),
            }),
        });
        let rhs_layer = graft(&inst, &relocated, |l| f(l).out());
        let rhs = ResTree::from_layer(Rc::clone(&inst), rhs_layer);
        assert!(lhs.bisim_depth(&rhs, IDENTITY_DEPTH));
    }
}

/// Grafting exits while unfolding equals unfolding first and substituting
/// the exit levels afterwards.
#[test]
fn graft_unfold_identity() {
    let inst = actions_inst();
    let mut r = rng(106);
    for _ in 0..SAMPLES {
        let states = r.gen_range(1..=3u8);
        let table = random_step_table(&mut r, states, 2);
        let start = r.gen_range(0..states);
        let exits: Vec<elgot_core::resumption::Layer<u8>> = (0..2)
            .map(|_| {
                let sub = random_tree(&mut r, &inst, 2);
                let mut items = std::collections::BTreeSet::new();
                if r.gen_bool(0.5) {
                    items.insert(HashItem::Leaf(r.gen_range(0..2u8)));
                }
                items.insert(HashItem::Node(SigmaLayer {
                    symbol: r.gen_range(0..2usize),
                    children: vec![sub],
                }));
                elgot_core::EffectValue::Set(items)
            })
            .collect();

        let grafted = {
            let table = table.clone();
            let exits = exits.clone();
            unfold_graft(
                Rc::clone(&inst),
                move |s: &u8| table[*s as usize].clone(),
                move |b: &u8| exits[*b as usize].clone(),
            )(&start)
        };
        let reference = {
            let table = table.clone();
            let exits = exits.clone();
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
        assert!(grafted.bisim_depth(&reference, IDENTITY_DEPTH));
    }
}

/// Relabeling after unfolding equals unfolding the relabeled coalgebra.
#[test]
fn relabel_unfold_identity() {
    let inst = actions_inst();
    let mut r = rng(107);
    for _ in 0..SAMPLES {
        let states = r.gen_range(1..=3u8);
        let table = random_step_table(&mut r, states, 2);
        let start = r.gen_range(0..states);
        let g = |l: &u8| l + 7;
        let mapped = {
            let table = table.clone();
            unfold(
                Rc::clone(&inst),
                move |s: &u8| table[*s as usize].clone(),
                &start,
            )
            .map_leaves(g)
        };
        let relabeled = {
            let table = table.clone();
            unfold(
                Rc::clone(&inst),
                move |s: &u8| {
                    table[*s as usize].map(|item| match item {
                        HashItem::Leaf(l) => HashItem::Leaf(g(l)),
                        HashItem::Node(sl) => HashItem::Node(sl.clone()),
                    })
                },
                &start,
            )
        };
        assert!(mapped.bisim_depth(&relabeled, IDENTITY_DEPTH));
    }
}

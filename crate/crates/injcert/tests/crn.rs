//! Round trips and matrix invariants for generated reaction networks.

use injcert::crn::{build_problem, parse_network, to_text, KineticsMode, Network, Reaction};
use injcert_core::linalg::{int, rat};
use injcert_core::{Rational, SignSet};
use proptest::prelude::*;

fn stoich(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0i64..3, n).prop_map(|v| v.into_iter().map(int).collect())
}

fn orders(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..5, 1i64..4), n).prop_map(|v| v.into_iter().map(|(p, q)| rat(p, q)).collect())
}

fn network() -> impl Strategy<Value = (Network, bool)> {
    (1usize..4, 1usize..4, any::<bool>()).prop_flat_map(|(n, r, with_orders)| {
        let reaction = (
            stoich(n),
            stoich(n),
            prop::option::of(orders(n)),
            prop::option::of(prop::collection::vec(prop::sample::select(SignSet::ALL.to_vec()), n)),
        );
        prop::collection::vec(reaction, r).prop_map(move |rs| {
            let reactions = rs
                .into_iter()
                .enumerate()
                .map(|(j, (reactants, products, o, infl))| Reaction {
                    label: format!("r{j}"),
                    reactants,
                    products,
                    orders: if with_orders { o } else { None },
                    influence: if with_orders { None } else { infl },
                })
                .collect();
            let species = (0..n).map(|i| format!("X{i}")).collect();
            (Network { species, reactions }, with_orders)
        })
    })
}

proptest! {
    #[test]
    fn text_round_trip((net, _) in network()) {
        let text = to_text(&net);
        let back = parse_network(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, net);
    }

    #[test]
    fn stoichiometry_is_products_minus_reactants((net, _) in network()) {
        let a = net.stoichiometric_matrix();
        let y = net.reactant_matrix();
        for (j, r) in net.reactions.iter().enumerate() {
            for i in 0..net.species.len() {
                prop_assert_eq!(&a[(i, j)], &(&r.products[i] - &r.reactants[i]));
                prop_assert_eq!(&y[(j, i)], &r.reactants[i]);
            }
        }
    }

    #[test]
    fn mass_action_builds_whenever_dynamics_exist((mut net, _) in network()) {
        for r in &mut net.reactions {
            r.orders = None;
            r.influence = None;
        }
        let moving = net.reactions.iter().any(|r| r.reactants != r.products);
        prop_assert_eq!(build_problem(&net, KineticsMode::MassAction).is_ok(), moving);
    }
}

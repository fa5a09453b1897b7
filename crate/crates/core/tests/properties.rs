use proptest::prelude::*;
use sepval::belief::{
    belief_to_mass, combine_commonality, combine_mass, commonality_to_mass, mass_to_belief, MassFunction,
};
use sepval::model::Model;
use sepval::{Domain, Partition, Valuation, VarSet};

/// A random partition of `n` atoms from a block label per atom.
fn partition(n: u32) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0..n, n as usize).prop_map(move |labels| {
        let mut masks = vec![0u64; n as usize];
        for (atom, &l) in labels.iter().enumerate() {
            masks[l as usize] |= 1 << atom;
        }
        Partition::from_masks(n, masks.into_iter().filter(|&m| m != 0).collect()).unwrap()
    })
}

/// Brute-force order: every block of `fine` lies inside a block of `coarse`.
fn refines(fine: &Partition, coarse: &Partition) -> bool {
    fine.blocks().iter().all(|&b| coarse.blocks().iter().any(|&c| b & !c == 0))
}

fn mass(frame: Partition) -> impl Strategy<Value = MassFunction> {
    let full = frame.full_set();
    prop::collection::vec((1..=full, 0.05f64..1.0), 1..6)
        .prop_map(move |entries| MassFunction::new(frame.clone(), entries).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn partition_join_and_meet_are_bounds(a in partition(6), b in partition(6), c in partition(6)) {
        let (j, m) = (a.join(&b), a.meet(&b));
        prop_assert!(refines(&j, &a) && refines(&j, &b));
        prop_assert!(refines(&a, &m) && refines(&b, &m));
        // least upper bound / greatest lower bound against a third partition
        if refines(&c, &a) && refines(&c, &b) {
            prop_assert!(refines(&c, &j));
        }
        if refines(&a, &c) && refines(&b, &c) {
            prop_assert!(refines(&m, &c));
        }
        prop_assert_eq!(a.leq(&b), refines(&b, &a));
        prop_assert_eq!(a.join(&a.meet(&b)), a.clone());
    }

    #[test]
    fn subsets_are_distributive(x in any::<u64>(), y in any::<u64>(), z in any::<u64>()) {
        let (x, y, z) = (VarSet::from_bits(x), VarSet::from_bits(y), VarSet::from_bits(z));
        prop_assert_eq!(x.meet(&y.join(&z)), x.meet(&y).join(&x.meet(&z)));
        prop_assert_eq!(x.join(&y.meet(&z)), x.join(&y).meet(&x.join(&z)));
    }

    #[test]
    fn combination_routes_agree(a in mass(Partition::discrete(4)), b in mass(Partition::discrete(4))) {
        let direct = combine_mass(&a, &b).unwrap();
        let q = combine_commonality(&a.commonality(), &b.commonality()).unwrap();
        let via = commonality_to_mass(&q).into_mass().unwrap();
        prop_assert!(direct.approx_eq(&via, 1e-12), "{:?} vs {:?}", direct, via);
    }

    #[test]
    fn belief_roundtrip(m in mass(Partition::discrete(5))) {
        let back = belief_to_mass(&mass_to_belief(&m)).into_mass().unwrap();
        prop_assert!(back.approx_eq(&m, 1e-12));
    }

    #[test]
    fn eval_output_reparses(values in prop::collection::vec(0.0f64..10.0, 6)) {
        let text = format!(
            "instance = \"potential\"\n[[variable]]\nname = \"A\"\nstates = 2\n[[variable]]\nname = \"B\"\nstates = 3\n\
             [valuation.p]\nscope = [\"A\", \"B\"]\nvalues = {values:?}\n"
        );
        let Model::Potential(m) = Model::parse(&text).unwrap() else { unreachable!() };
        let e = m.lookup("p").unwrap();
        for compact in [false, true] {
            let back = m.parse_result(&m.render(&e, compact)).unwrap();
            prop_assert!(back.equals0(&e, 0.0));
        }
    }
}

use std::cmp::Ordering;

use proptest::prelude::*;

use ostronet::gaps::AmEnumerator;
use ostronet::intervals::{contains, count_hits, count_hits_brute, level_partition};
use ostronet::net::{IntervalSpec, NetConfig, WindowSpec};
use ostronet::ostrowski::{decode_int, encode_int, encode_real, lex_compare, validate};
use ostronet::{cf_digits, cf_until, make_interval, ConvergentTable, Irrational, Lin, Net, Real};

/// Eventually periodic partial quotients, as an exact quadratic surd.
fn periodic_alpha() -> impl Strategy<Value = Irrational> {
    (
        prop::collection::vec(1u64..6, 0..3),
        prop::collection::vec(1u64..7, 1..4),
    )
        .prop_map(|(pre, per)| Irrational::periodic(&pre, &per).expect("periodic slope"))
}

fn table(a: &Irrational, bound: i128) -> ConvergentTable {
    cf_until(a, bound, 4).expect("table")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_digits_round_trip(a in periodic_alpha(), n in 0i128..1_000_000_000_000) {
        let t = table(&a, 1_000_000_000_000);
        let c = encode_int(n, &t).unwrap();
        prop_assert!(validate(c.digits(), &t).is_ok());
        prop_assert_eq!(decode_int(&c, &t).unwrap(), n);
    }

    #[test]
    fn digit_order_is_numeric_order(a in periodic_alpha(), x in 0i128..1_000_000, y in 0i128..1_000_000) {
        let t = table(&a, 1_000_000);
        let (cx, cy) = (encode_int(x, &t).unwrap(), encode_int(y, &t).unwrap());
        prop_assert_eq!(lex_compare(&cx, &cy).unwrap(), x.cmp(&y));
    }

    #[test]
    fn enumerator_start_is_first_visit(a in periodic_alpha(), m in 1usize..6, from in 0i128..5_000) {
        let t = table(&a, 1 << 30);
        let j = make_interval(m, &Lin::zero(), &t).unwrap();
        let first = AmEnumerator::starting_at(m, &t, from).unwrap().current();
        prop_assert!(first >= from);
        prop_assert!(contains(&j, &Lin::int([0, first]), &t).unwrap());
        for n in from..first {
            prop_assert!(!contains(&j, &Lin::int([0, n]), &t).unwrap());
        }
    }

    #[test]
    fn gaps_take_two_values(a in periodic_alpha(), m in 1usize..7) {
        let t = table(&a, 1 << 30);
        let (long, short) = (t.q(m as isize), t.q(m as isize - 1));
        let mut e = AmEnumerator::new(m, &t).unwrap();
        let mut prev = 0;
        for _ in 0..500 {
            let n = e.advance().unwrap();
            prop_assert!(n - prev == long || n - prev == short);
            prev = n;
        }
    }

    #[test]
    fn partitions_tile_their_parent(a in periodic_alpha(), m in 2usize..8) {
        let t = cf_digits(&a, m + 3).unwrap();
        let arcs = level_partition(m, &t).unwrap();
        let total = arcs.iter().fold(Lin::zero(), |s, x| s.add(x.length()));
        let parent = make_interval(m - 1, &Lin::zero(), &t).unwrap();
        prop_assert_eq!(&total, parent.length());
        for w in arcs.windows(2) {
            prop_assert!(w[0].disjoint(&w[1], t.frame()).unwrap());
        }
    }

    #[test]
    fn fast_counts_match_direct_counts(
        a in periodic_alpha(),
        m in 1usize..6,
        ell in -3_000i128..3_000,
        n in 1u64..2_000,
    ) {
        let t = table(&a, 1 << 40);
        let j = make_interval(m, &Lin::int([0, -ell]), &t).unwrap();
        prop_assert_eq!(count_hits(&j, n, &t).unwrap().count, count_hits_brute(&j, n, &t).unwrap());
    }

    #[test]
    fn real_digits_bracket_beta(a in periodic_alpha(), num in -1_000i128..1_000) {
        let t = cf_digits(&a, 14).unwrap();
        let beta = Real::from(num_rational::BigRational::new(num.into(), 1000.into()));
        let (beta, _) = ostronet::ostrowski::reduce_to_window(&beta, &t).unwrap();
        let r = match encode_real(&beta, &t, 12) {
            Ok(r) => r,
            Err(ostronet::Error::OrbitPoint) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let mut sum = Real::zero();
        for (k, &c) in r.digits().iter().enumerate() {
            sum = sum.add(&t.remainder(k as isize).unwrap().scale(c as i128));
        }
        let gap = beta.sub(&sum).abs().unwrap();
        prop_assert_ne!(gap.cmp_real(r.tail_bound()).unwrap(), Ordering::Greater);
    }

    #[test]
    fn net_fibers_match_membership(
        t2 in -50i128..50,
        lo in -200i128..200,
        m in 1usize..5,
        second in prop::sample::select(vec!["surd:-1,1,2,1", "1/3", "0.25"]),
    ) {
        let cfg = NetConfig {
            slopes: vec!["surd:-1,1,5,2".into(), second.into()],
            shift: "lin:1,1/7".into(),
            designated: 1,
            window: WindowSpec::Intervals { intervals: vec![IntervalSpec { m: m + 1, gamma: "0".into() }], bound: 1 },
            bounds: None,
        };
        let net = Net::new(&cfg).unwrap();
        let got = net.fiber_points(&[t2], lo, lo + 150).unwrap();
        let want: Vec<i128> = (lo..=lo + 150).filter(|&n| net.contains(&[n, t2]).unwrap()).collect();
        prop_assert_eq!(got, want);
    }
}

use bartnik_core::symring::{bindings, pseudo_rem, rat, Monomial, Poly, RationalExpr, SymMatrix, Var, NVARS};
use num_rational::BigRational;
use proptest::prelude::*;

const VARS: [Var; 4] = [Var::Xi1, Var::Xi2, Var::Z, Var::N];

fn monomial(exps: &[u16]) -> Monomial {
    VARS.iter()
        .zip(exps)
        .fold(Monomial::one(), |m, (&v, &e)| m.mul(&Monomial::var(v, e)))
}

/// Polynomials in four indeterminates with total degree at most `max_deg`.
fn poly(max_deg: u16, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, 4), -5i64..=5), 0..=max_terms).prop_map(move |terms| {
        Poly::from_terms(terms.into_iter().filter_map(|(mut e, c)| {
            while e.iter().sum::<u16>() > max_deg {
                let k = e.iter().position(|&x| x > 0).unwrap();
                e[k] -= 1;
            }
            (c != 0).then(|| (monomial(&e), rat(c, 1)))
        }))
    })
}

fn rational_values() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-7i64..=7, 1i64..=4), NVARS)
}

fn values(v: &[(i64, i64)]) -> [BigRational; NVARS] {
    std::array::from_fn(|i| rat(v[i].0, v[i].1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms(a in poly(3, 5), b in poly(3, 5), c in poly(3, 5)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &Poly::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bareiss_matches_cofactor(
        n in 1usize..=5,
        entries in prop::collection::vec(poly(1, 2), 25),
        dens in prop::collection::vec(prop_oneof![Just(1i64), Just(2), Just(3)], 25),
    ) {
        let rows: Vec<Vec<RationalExpr>> = (0..n)
            .map(|i| (0..n).map(|j| {
                let k = i * 5 + j;
                let num = RationalExpr::from_poly(entries[k].clone());
                // a few genuinely rational entries
                if dens[k] == 3 {
                    &num / &(&RationalExpr::var(Var::N) + &RationalExpr::int(1))
                } else {
                    num.scale(&rat(1, dens[k]))
                }
            }).collect())
            .collect();
        let m = SymMatrix::from_rows(rows).unwrap();
        prop_assert_eq!(m.det_bareiss().unwrap(), m.det_cofactor().unwrap());
    }

    #[test]
    fn pseudo_remainder_reconstructs(f in poly(3, 5), p in poly(2, 3)) {
        prop_assume!(p.degree_in(Var::Z) > 0);
        let (r, k) = pseudo_rem(&f, &p, Var::Z).unwrap();
        prop_assert!(r.degree_in(Var::Z) < p.degree_in(Var::Z));
        let lc = p.coeffs_in(Var::Z).pop().unwrap();
        let lhs = &(&lc.pow(k) * &f) - &r;
        let q = lhs.div_exact(&p);
        prop_assert!(q.is_some());
        prop_assert_eq!(&q.unwrap() * &p, lhs);
    }

    #[test]
    fn substitution_is_a_homomorphism(
        a in poly(3, 4),
        b in poly(3, 4),
        image in poly(2, 3),
        vals in rational_values(),
    ) {
        let bind = bindings(&[(Var::Xi1, RationalExpr::from_poly(image))]);
        let ra = RationalExpr::from_poly(a);
        let rb = RationalExpr::from_poly(b);
        let sum = (&ra + &rb).substitute(&bind).unwrap();
        let prod = (&ra * &rb).substitute(&bind).unwrap();
        let sa = ra.substitute(&bind).unwrap();
        let sb = rb.substitute(&bind).unwrap();
        prop_assert_eq!(&sum, &(&sa + &sb));
        prop_assert_eq!(&prod, &(&sa * &sb));
        let x = values(&vals);
        prop_assert_eq!(
            prod.eval_rational(&x).unwrap(),
            sa.eval_rational(&x).unwrap() * sb.eval_rational(&x).unwrap()
        );
    }
}

use germforge::certificate::{parse_certificate, print_certificate, Certificate};
use germforge::format::*;
use germforge_core::ideal::{IdealPresentation, NormalForm, Relation};
use germforge_core::ratio::witness_check;
use germforge_core::weierstrass::WeierstrassPoly;
use germforge_core::{decompose, FormalCurve, GaussRat, HermitianForm, Multidegree, TruncSeries};
use proptest::prelude::*;

fn coef() -> impl Strategy<Value = GaussRat> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6).prop_map(|(a, b, c, d)| GaussRat::from_parts(a, b, c, d))
}

fn exponent(n: usize, max_total: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max_total, n).prop_filter("degree", move |v| v.iter().sum::<u32>() <= max_total)
}

fn series(n: usize, prec: u32, min_degree: u32) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec((exponent(n, prec), coef()), 0..6).prop_map(move |t| {
        let t = t.into_iter().filter(|(e, _)| e.iter().sum::<u32>() >= min_degree).map(|(e, c)| (Multidegree(e), c));
        TruncSeries::from_terms(n, prec, t).unwrap()
    })
}

fn form(n: usize, prec: u32) -> impl Strategy<Value = HermitianForm> {
    prop::collection::vec((exponent(n, prec), exponent(n, prec), coef()), 1..6).prop_map(move |t| {
        let mut terms = Vec::new();
        for (j, k, c) in t {
            if j.iter().sum::<u32>() + k.iter().sum::<u32>() > prec {
                continue;
            }
            if j == k {
                terms.push((Multidegree(j.clone()), Multidegree(k), GaussRat::real(c.re)));
            } else {
                terms.push((Multidegree(k.clone()), Multidegree(j.clone()), c.conj()));
                terms.push((Multidegree(j), Multidegree(k), c));
            }
        }
        HermitianForm::new(n, prec, terms).unwrap()
    })
}

fn curve(n: usize, prec: u32) -> impl Strategy<Value = FormalCurve> {
    prop::collection::vec(prop::collection::vec(coef(), 0..prec as usize), n).prop_map(move |comps| {
        let comps = comps
            .into_iter()
            .map(|mut c| {
                if !c.is_empty() {
                    c[0] = GaussRat::from_int(0);
                }
                c
            })
            .collect();
        FormalCurve::from_coefficients(comps, prec).unwrap()
    })
}

fn sized() -> impl Strategy<Value = (usize, u32)> {
    (1usize..=3, 1u32..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_roundtrip(s in sized().prop_flat_map(|(n, p)| series(n, p, 0))) {
        prop_assert_eq!(parse_series(&print_series(&s)).unwrap(), s);
    }

    #[test]
    fn hypersurface_roundtrip(
        (f, at) in sized().prop_flat_map(|(n, p)| (form(n, p), prop::option::of(prop::collection::vec(coef(), n))))
    ) {
        let h = Hypersurface { form: f, base_point: at };
        prop_assert_eq!(parse_hermitian(&print_hermitian(&h)).unwrap(), h);
    }

    #[test]
    fn curve_roundtrip(c in sized().prop_flat_map(|(n, p)| curve(n, p))) {
        prop_assert_eq!(parse_curve(&print_curve(&c)).unwrap(), c);
    }

    #[test]
    fn ideal_roundtrip(
        (n, p, gens) in sized().prop_flat_map(|(n, p)| (Just(n), Just(p), prop::collection::vec(series(n, p, 1), 1..4)))
    ) {
        let ideal = IdealPresentation::new(n, gens, p).unwrap();
        prop_assert_eq!(parse_ideal(&print_ideal(&ideal)).unwrap(), ideal);
    }

    #[test]
    fn unitary_roundtrip(swap in any::<bool>(), phase in 0usize..4) {
        let ph = [
            GaussRat::from_int(1),
            GaussRat::i(),
            GaussRat::from_parts(3, 5, 4, 5),
            GaussRat::from_parts(-5, 13, 12, 13),
        ][phase].clone();
        let z = GaussRat::from_int(0);
        let rows = if swap {
            vec![vec![z.clone(), ph.clone(), z.clone()], vec![GaussRat::from_int(1), z.clone(), z.clone()], vec![z.clone(), z.clone(), ph]]
        } else {
            vec![vec![ph, z.clone(), z.clone()], vec![z.clone(), GaussRat::from_int(1), z.clone()], vec![z.clone(), z, GaussRat::from_int(1)]]
        };
        prop_assert_eq!(parse_unitary(&print_unitary(&rows)).unwrap(), rows);
    }

    #[test]
    fn jets_roundtrip(
        (f, g) in (1usize..4, 1usize..4).prop_flat_map(|(m, w)| (
            prop::collection::vec(prop::collection::vec(coef(), w), m),
            prop::collection::vec(prop::collection::vec(coef(), w), m),
        ))
    ) {
        prop_assert_eq!(parse_jets(&print_jets(&f, &g)).unwrap(), (f, g));
    }

    #[test]
    fn decomposition_roundtrip((f, k) in sized().prop_flat_map(|(n, p)| (form(n, p), 1..=p))) {
        let d = decompose(&f, k).unwrap();
        prop_assert_eq!(parse_decomposition(&print_decomposition(&d)).unwrap(), d);
    }

    #[test]
    fn certificate_roundtrip(
        (f, c) in (1usize..=3).prop_flat_map(|n| (form(n, 6), curve(n, 6)))
    ) {
        let h = Hypersurface::new(f.clone());
        let w = witness_check(&f, &c, 2);
        prop_assume!(w.is_ok());
        let mut cert = Certificate::from_witness("witness", h, c, &w.unwrap());
        cert.decomposition = Some(decompose(&f, 2).unwrap());
        cert.notes.push("checked at order 2".into());
        prop_assert_eq!(parse_certificate(&print_certificate(&cert)).unwrap(), cert);
    }
}

#[test]
fn ideal_with_normal_form_roundtrip() {
    let prec = 8;
    let ser = |t: &[(&[u32], i64)]| {
        TruncSeries::from_terms(3, prec, t.iter().map(|(e, c)| (Multidegree(e.to_vec()), GaussRat::from_int(*c)))).unwrap()
    };
    let p = WeierstrassPoly::new(
        1,
        vec![
            TruncSeries::from_terms(1, prec, [(Multidegree(vec![2]), GaussRat::from_int(-1))]).unwrap(),
            TruncSeries::zero(1, prec),
        ],
        prec,
    )
    .unwrap();
    let q3 = ser(&[(&[2, 0, 1], 4), (&[2, 1, 0], -4)]);
    let nf = NormalForm::new(
        3,
        p,
        vec![Relation { j: 2, q: q3.clone(), big_q: ser(&[(&[2, 1, 0], 4)]) }],
        ser(&[(&[2, 0, 0], 4)]),
    )
    .unwrap();
    let ideal = IdealPresentation::new(3, vec![nf.p_series(3), q3], prec).unwrap().with_normal_form(nf);
    let text = print_ideal(&ideal);
    assert!(text.contains("normal_form k=1;"));
    assert_eq!(parse_ideal(&text).unwrap(), ideal);
}

#[test]
fn malformed_inputs_report_positions() {
    let err = parse_series("vars 2; N=4;\n+ 1 z1^ z2\n").unwrap_err();
    assert_eq!((err.pos.line, err.message.as_str()), (2, "malformed exponent"));
    let err = parse_hermitian("vars 1; N=2;\n+ 1 z1 + 2 zbar1\n").unwrap_err();
    assert_eq!(err.pos.line, 2);
    let err = parse_hermitian("vars 1; N=2;\n+ 1 z1^2 zbar1\n").unwrap_err();
    assert_eq!(err.pos.line, 2);
    let err = parse_ideal("ideal 2; N=4;\ngen = z1;\ngen = 1 + z2;\n").unwrap_err();
    assert_eq!(err.pos.line, 3);
    assert!(parse_unitary("unitary 2;\nrow 1 1;\nrow 0 1;\n").is_err());
}

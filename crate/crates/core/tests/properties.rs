use hypermix_core::dynamics::{hm_witnesses, s_power_bound, verify_certificate, EngineOptions};
use hypermix_core::kernels::{gk_density_table, is_in_kernel, kernel_project, predicted_saturation};
use hypermix_core::operators::{apply_s, apply_t, OperatorConfig};
use hypermix_core::spaces::{
    self, quadrature::GaussLegendre, BallSpec, Element, ExpTerm, NormalizedBivarPoly, Piece, PiecewiseExpPoly,
    TaylorCoeffs,
};
use hypermix_core::{Complex64, Rational64};
use proptest::prelude::*;

fn taylor() -> impl Strategy<Value = TaylorCoeffs> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 0..12)
        .prop_map(|c| TaylorCoeffs::new(c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap())
}

fn bivar() -> impl Strategy<Value = NormalizedBivarPoly> {
    prop::collection::vec(((0u32..8, 0u32..8), -3.0..3.0f64), 0..10)
        .prop_map(|t| NormalizedBivarPoly::new(t).unwrap())
}

fn rational() -> impl Strategy<Value = Rational64> {
    (0i64..8, 1i64..4).prop_map(|(p, q)| Rational64::new(p, q))
}

/// Sorted, non-overlapping pieces with up to cubic exponential-polynomial terms.
fn piecewise(w: f64) -> impl Strategy<Value = PiecewiseExpPoly> {
    let term = (-3.0..3.0f64, 0u32..4, -2i64..3).prop_map(|(c, d, q)| ExpTerm::new(c, d, Rational64::new(q, 2)));
    let piece = (1i64..4, 1i64..3, prop::collection::vec(term, 1..4));
    prop::collection::vec(piece, 1..4).prop_map(move |layout| {
        let mut lo = Rational64::from_integer(0);
        let mut pieces = Vec::new();
        for (len, den, terms) in layout {
            let hi = lo + Rational64::new(len, den);
            pieces.push(Piece::new(lo, hi, terms));
            lo = hi;
        }
        PiecewiseExpPoly::new(w, pieces).unwrap()
    })
}

/// Continuous elements: an optional ramp `h·(1 − s/L)` at the origin followed by
/// bumps `c·s(L − s)·w^{qs}` vanishing at both ends of their pieces.
fn continuous(w: f64) -> impl Strategy<Value = PiecewiseExpPoly> {
    let bump = (1i64..4, -2.0..2.0f64, -1i64..2);
    (-2.0..2.0f64, prop::collection::vec(bump, 0..3)).prop_map(move |(h, bumps)| {
        let mut pieces = Vec::new();
        let one = Rational64::from_integer(1);
        let mut lo = Rational64::from_integer(0);
        if h != 0.0 {
            pieces.push(Piece::new(lo, one, vec![ExpTerm::constant(h), ExpTerm::new(-h, 1, lo)]));
            lo = one;
        }
        for (len, c, q) in bumps {
            let l = len as f64;
            let rate = Rational64::from_integer(q);
            let hi = lo + Rational64::from_integer(len);
            pieces.push(Piece::new(lo, hi, vec![ExpTerm::new(c * l, 1, rate), ExpTerm::new(-c, 2, rate)]));
            lo = hi;
        }
        PiecewiseExpPoly::new(w, pieces).unwrap()
    })
}

fn lp(w: f64, a: Rational64, p: f64) -> OperatorConfig {
    OperatorConfig::translation_lp(w, a, p).unwrap()
}

/// `∬_{(0,1)²} p²` by a 24×24 tensor Gauss–Legendre rule evaluating `p` from
/// its monomial expansion.
fn gram_by_quadrature(p: &NormalizedBivarPoly) -> f64 {
    let gl = GaussLegendre::new(24);
    let eval = |x: f64, y: f64| -> f64 {
        p.terms()
            .map(|((n, l), _)| p.monomial_coeff(n, l) * x.powi(n as i32) * y.powi(l as i32))
            .sum()
    };
    gl.integrate(&|x| gl.integrate(&|y| eval(x, y).powi(2), 0.0, 1.0), 0.0, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hardy_norm_is_a_norm(f in taylor(), g in taylor(), re in -4.0..4.0f64, im in -4.0..4.0f64) {
        let alpha = Complex64::new(re, im);
        prop_assert!(f.add(&g).norm() <= f.norm() + g.norm() + 1e-12);
        prop_assert!((f.scale(alpha).norm() - alpha.norm() * f.norm()).abs() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn bivar_norm_is_a_norm(f in bivar(), g in bivar(), alpha in -4.0..4.0f64) {
        prop_assert!(f.add(&g).norm() <= f.norm() + g.norm() + 1e-12);
        prop_assert!((f.scale(alpha).norm() - alpha.abs() * f.norm()).abs() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn piecewise_norms_are_norms(f in piecewise(2.0), g in piecewise(2.0), alpha in -4.0..4.0f64, p in 1.0..4.0f64) {
        let fg = f.add(&g).unwrap();
        for (a, b, c) in [(fg.norm_lp(p), f.norm_lp(p), g.norm_lp(p)), (fg.norm_sup(), f.norm_sup(), g.norm_sup())] {
            prop_assert!(a <= (b + c) * (1.0 + 1e-9) + 1e-12);
        }
        let scaled = f.scale(alpha).norm_lp(p);
        prop_assert!((scaled - alpha.abs() * f.norm_lp(p)).abs() <= 1e-9 * (1.0 + scaled));
    }

    #[test]
    fn canonical_forms_are_idempotent(f in bivar(), g in taylor()) {
        prop_assert_eq!(NormalizedBivarPoly::new(f.terms()).unwrap(), f.clone());
        prop_assert_eq!(TaylorCoeffs::new(g.coeffs().to_vec()).unwrap(), g);
    }

    #[test]
    fn gram_norm_matches_quadrature(f in prop::collection::vec(((0u32..=10, 0u32..=10), -2.0..2.0f64), 1..6)) {
        let f = NormalizedBivarPoly::new(f).unwrap();
        let exact = f.norm();
        let quad = gram_by_quadrature(&f).sqrt();
        prop_assert!((exact - quad).abs() <= 1e-10 * (1.0 + quad), "{} vs {}", exact, quad);
    }

    #[test]
    fn norms_do_not_depend_on_breakpoints(f in piecewise(1.5), at in rational(), p in 1.0..4.0f64) {
        let g = f.split_at(at);
        prop_assert!((g.norm_lp(p) - f.norm_lp(p)).abs() <= 1e-10 * (1.0 + f.norm_lp(p)));
        prop_assert!((g.norm_sup() - f.norm_sup()).abs() <= 1e-12 * (1.0 + f.norm_sup()));
    }

    #[test]
    fn s_is_a_right_inverse(f in taylor(), g in bivar(), h in piecewise(2.0), c in continuous(3.0), a in 1i64..4) {
        let a = Rational64::new(a, 2);
        let cases = [
            (OperatorConfig::Derivative, Element::Hardy(f)),
            (OperatorConfig::Laplacian, Element::Bivar(g)),
            (lp(2.0, a, 2.0), Element::Piecewise(h)),
            (OperatorConfig::translation_c0(3.0, a).unwrap(), Element::Piecewise(c)),
        ];
        for (op, y) in cases {
            let back = apply_t(&op, &apply_s(&op, &y).unwrap()).unwrap();
            let space = op.space();
            let err = spaces::distance(&space, &back, &y).unwrap();
            prop_assert!(err <= 1e-10 * (1.0 + spaces::norm(&space, &y).unwrap()), "{}: {}", op.name(), err);
        }
    }

    #[test]
    fn degree_laws(f in taylor(), g in bivar()) {
        let d = f.degree();
        prop_assert_eq!(f.integral().degree(), d.map(|d| d + 1));
        prop_assert_eq!(f.derivative().degree(), d.and_then(|d| d.checked_sub(1)));
        prop_assert_eq!(g.laplacian_inverse().total_degree(), g.total_degree().map(|d| d + 2));
        if let (Some(before), Some(after)) = (g.total_degree(), g.laplacian().total_degree()) {
            prop_assert!(after + 2 <= before);
        }
    }

    #[test]
    fn translation_decay(f in piecewise(2.0), w in prop::sample::select(vec![1.5, 2.0, 4.0]), p in 1.0..3.0f64) {
        let f = PiecewiseExpPoly::new(w, f.pieces().to_vec()).unwrap();
        let op = lp(w, Rational64::new(1, 2), p);
        let y = Element::Piecewise(f);
        let norm = spaces::norm(&op.space(), &y).unwrap();
        let mut s = y.clone();
        for n in 1..=8usize {
            s = apply_s(&op, &s).unwrap();
            let nf = n as f64;
            let bound = w.powf(-nf * (nf - 1.0) / 4.0) * norm;
            let actual = spaces::norm(&op.space(), &s).unwrap();
            prop_assert!(actual <= bound * (1.0 + 1e-8), "n = {}: {} > {}", n, actual, bound);
            prop_assert!(actual <= s_power_bound(&op, &y, n).unwrap() * (1.0 + 1e-8));
        }
    }

    #[test]
    fn c0_decay_respects_the_ramp_bound(c in continuous(2.0)) {
        let op = OperatorConfig::translation_c0(2.0, Rational64::from_integer(1)).unwrap();
        let y = Element::Piecewise(c);
        let mut s = y.clone();
        for n in 1..=8usize {
            s = apply_s(&op, &s).unwrap();
            let actual = spaces::norm(&op.space(), &s).unwrap();
            prop_assert!(actual <= s_power_bound(&op, &y, n).unwrap() * (1.0 + 1e-9) + 1e-15);
        }
    }

    #[test]
    fn kernel_projections_land_in_the_kernel(f in taylor(), g in bivar(), h in piecewise(2.0), c in continuous(2.0)) {
        let one = Rational64::from_integer(1);
        let cases = [
            (OperatorConfig::Derivative, Element::Hardy(f)),
            (OperatorConfig::Laplacian, Element::Bivar(g)),
            (lp(2.0, one, 1.0), Element::Piecewise(h)),
            (OperatorConfig::translation_c0(2.0, one).unwrap(), Element::Piecewise(c)),
        ];
        for (op, x) in cases {
            let table = gk_density_table(&op, &x, 12).unwrap();
            for n in 1..=12 {
                let w_n = kernel_project(&op, &x, n).unwrap().w_n;
                prop_assert!(is_in_kernel(&op, &w_n, n).unwrap());
            }
            if op != OperatorConfig::Laplacian {
                for pair in table.rows.windows(2) {
                    prop_assert!(pair[1].gap <= pair[0].gap * (1.0 + 1e-12) + 1e-15);
                }
            }
            if let Some(sat) = predicted_saturation(&op, &x) {
                prop_assert!(table.rows.iter().filter(|r| r.n >= sat).all(|r| r.gap == 0.0));
            }
        }
    }

    #[test]
    fn hardy_certificates_reverify(center in taylor(), y in taylor(), radius in 0.05..2.0f64) {
        let op = OperatorConfig::Derivative;
        let ball = BallSpec::new(op.space(), Element::Hardy(center), radius).unwrap();
        let y = Element::Hardy(y);
        let opts = EngineOptions::default();
        let w = hm_witnesses(&op, &ball, &y, &opts).unwrap();
        for cert in &w.certificates {
            prop_assert!(cert.n >= w.n_start);
            prop_assert!(verify_certificate(cert, &y, &ball.center, opts.tolerance).unwrap());
        }
    }

    #[test]
    fn translation_certificates_reverify(center in piecewise(2.0), y in piecewise(2.0), radius in 0.1..2.0f64) {
        let op = lp(2.0, Rational64::from_integer(1), 2.0);
        let ball = BallSpec::new(op.space(), Element::Piecewise(center), radius).unwrap();
        let y = Element::Piecewise(y);
        let opts = EngineOptions { n_max: 16, ..EngineOptions::default() };
        let w = hm_witnesses(&op, &ball, &y, &opts).unwrap();
        for cert in &w.certificates {
            prop_assert!(verify_certificate(cert, &y, &ball.center, opts.tolerance).unwrap());
        }
    }
}

#[test]
fn laplacian_inverse_is_exact_on_the_basis() {
    for n in 0..=20 {
        for l in 0..=20 {
            let b = NormalizedBivarPoly::basis(n, l, 1.0);
            assert_eq!(b.laplacian_inverse().laplacian(), b, "X{n}Y{l}");
        }
    }
}

/// The Gram inner product does not make the normalized monomials orthogonal, so
/// dropping fewer terms can still enlarge the truncation gap.
#[test]
fn laplacian_gap_can_grow_before_saturation() {
    let x = NormalizedBivarPoly::new([((2, 7), -0.027029453583385116), ((3, 7), 2.672507409206944)]).unwrap();
    let table = gk_density_table(&OperatorConfig::Laplacian, &Element::Bivar(x.clone()), 8).unwrap();
    assert_eq!(table.rows[3].gap, x.norm());
    assert!(table.rows[4].gap > table.rows[3].gap);
    assert!(table.rows[5..].iter().all(|r| r.gap == 0.0));
    assert_eq!(table.saturation, Some(6));
}

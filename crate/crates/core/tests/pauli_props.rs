use mubforge::states::{realize_word, ALGEBRAIC_TOL};
use mubforge::{PauliWord, Prime};
use num_complex::Complex64;
use proptest::prelude::*;

fn word(p: u32) -> impl Strategy<Value = PauliWord> {
    let q = p as u8;
    (0..q, 0..q, 0..q, 0..q).prop_map(|(m, n, k, l)| PauliWord::new(m, n, k, l))
}

fn prime_and_words() -> impl Strategy<Value = (Prime, PauliWord, PauliWord, PauliWord)> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)]
        .prop_flat_map(|p| (Just(Prime::new(p).unwrap()), word(p), word(p), word(p)))
}

proptest! {
    #[test]
    fn form_is_alternating((p, u, v, _) in prime_and_words()) {
        prop_assert_eq!(u.symplectic_form(&u, p), 0);
        prop_assert_eq!(p.add(u.symplectic_form(&v, p), v.symplectic_form(&u, p)), 0);
    }

    #[test]
    fn form_is_bilinear((p, u, v, w) in prime_and_words(), a in 0u8..7) {
        let a = a % p.get() as u8;
        let lhs = u.compose(&v, p).symplectic_form(&w, p);
        prop_assert_eq!(lhs, p.add(u.symplectic_form(&w, p), v.symplectic_form(&w, p)));
        prop_assert_eq!(u.power(a, p).symplectic_form(&w, p), p.mul(a, u.symplectic_form(&w, p)));
    }

    #[test]
    fn compose_is_an_abelian_group((p, u, v, w) in prime_and_words()) {
        prop_assert_eq!(u.compose(&v, p).compose(&w, p), u.compose(&v.compose(&w, p), p));
        prop_assert_eq!(u.compose(&v, p), v.compose(&u, p));
        prop_assert_eq!(u.compose(&PauliWord::IDENTITY, p), u);
        prop_assert!(u.compose(&u.power(p.get() as u8 - 1, p), p).is_identity());
    }

    #[test]
    fn index_roundtrip((p, u, _, _) in prime_and_words()) {
        prop_assert_eq!(PauliWord::from_index(u.index(p), p), u);
    }
}

fn max_abs(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `U V = ω^{s(u,v)} V U` for the monomial realization, for every pair of words.
fn commutation_phases_match(p: Prime) {
    let q = p.get() as f64;
    let words: Vec<PauliWord> = PauliWord::nonidentity(p).collect();
    let mats: Vec<_> = words.iter().map(|w| realize_word(w, p)).collect();
    for (u, mu) in words.iter().zip(&mats) {
        for (v, mv) in words.iter().zip(&mats) {
            let s = u.symplectic_form(v, p) as f64;
            let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s / q);
            let diff = mu * mv - mv * mu * phase;
            assert!(max_abs(&diff) < ALGEBRAIC_TOL, "{u} {v}");
        }
    }
}

#[test]
fn commutation_phases_p2() {
    commutation_phases_match(Prime::new(2).unwrap());
}

#[test]
fn commutation_phases_p3() {
    commutation_phases_match(Prime::new(3).unwrap());
}

#[test]
fn realized_words_have_order_p_up_to_phase_at_p3() {
    let p = Prime::new(3).unwrap();
    for w in PauliWord::nonidentity(p) {
        let m = realize_word(&w, p);
        let cube = &m * &m * &m;
        let id = nalgebra::DMatrix::<Complex64>::identity(9, 9);
        assert!(max_abs(&(cube - id)) < ALGEBRAIC_TOL, "{w}");
    }
}

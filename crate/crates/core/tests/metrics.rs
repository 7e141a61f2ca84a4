use msc_core::channel::ChannelParams;
use msc_core::metrics::{
    biawgn_capacity_dispersion, biawgn_capacity_dispersion_with, bleu, bler_update, gauss_hermite, levenshtein, na_bound, rouge_l,
    ScoreReport,
};
use proptest::prelude::*;

// Reference values from NLTK `sentence_bleu` with `SmoothingFunction(epsilon=1e-9).method1`,
// scaled to 0..100.
const BLEU_CASES: &[(&str, &str, f64)] = &[
    ("the cat sat", "the cat sat on the mat", 0.206873812459),
    ("the cat sat on the mat", "the cat sat on the mat", 100.0),
    ("a dog runs in the park today", "the dog runs in the park", 61.478815295126),
    ("Everythi##g went back to normal in the town.", "Everything went back to normal in the town.", 84.089641525371),
    ("the the the the the the", "the cat is on the mat", 0.000004854918),
    ("man riding a horse on the beach at sunset", "a man is riding a horse along the beach", 0.156196996846),
    ("xyz qqq", "abc def ghi", 0.0),
];

#[test]
fn bleu_matches_reference_implementation() {
    for &(h, r, want) in BLEU_CASES {
        let got = bleu(h, r);
        assert!((got - want).abs() < 1e-6, "{h:?} vs {r:?}: {got} != {want}");
    }
    assert_eq!(bleu("", "the cat"), 0.0);
    assert_eq!(bleu("the cat\0\0\0", "the cat"), bleu("the cat", "the cat"));
}

#[test]
fn rouge_l_examples() {
    let h = "man riding a horse on the beach at sunset";
    let r = "a man is riding a horse along the beach";
    // LCS "man riding a horse the beach", 6 of 9 words on each side
    let p = 6.0 / 9.0;
    let rc = 6.0 / 9.0;
    assert!((rouge_l(h, r) - 100.0 * 2.0 * p * rc / (p + rc)).abs() < 1e-12);
}

#[test]
fn levenshtein_examples() {
    assert_eq!(levenshtein("Everythi##g", "Everything"), 2);
    assert_eq!(levenshtein("flaw", "lawn"), 2);
    assert_eq!(levenshtein("\u{263a}\u{2400}", "ab"), 2);
}

#[test]
fn bler_counting() {
    let mut r = ScoreReport::default();
    assert!(!bler_update(&[0, 1, 1], &[0, 1, 1], &mut r).unwrap());
    assert!(bler_update(&[0, 1, 1], &[0, 0, 1], &mut r).unwrap());
    assert!(bler_update(&[0, 1], &[0, 1, 1], &mut r).is_err());
    assert_eq!((r.n_trials, r.errored_blocks), (2, 1));
    assert_eq!(r.bler(), 0.5);
}

// (snr dB, C bits, V bits^2) by adaptive quadrature of the information density.
const CAPACITY_CASES: &[(f64, f64, f64)] = &[
    (-2.0, 0.348878854547, 0.606548687957),
    (0.0, 0.485944154133, 0.659680834305),
    (1.0, 0.562788137759, 0.648400294026),
    (2.0, 0.642148645592, 0.606315236700),
    (3.0, 0.720660888666, 0.534154840736),
];

#[test]
fn capacity_and_dispersion_match_reference() {
    for &(snr, c, v) in CAPACITY_CASES {
        let (gc, gv) = biawgn_capacity_dispersion(ChannelParams::from_snr_db(snr).sigma());
        assert!((gc - c).abs() < 1e-9, "C at {snr} dB: {gc}");
        assert!((gv - v).abs() < 1e-9, "V at {snr} dB: {gv}");
    }
}

#[test]
fn capacity_limits() {
    let (hi, v_hi) = biawgn_capacity_dispersion(ChannelParams::from_snr_db(15.0).sigma());
    assert!((1.0 - hi).abs() < 1e-3 && v_hi < 1e-3);
    let (lo, _) = biawgn_capacity_dispersion(ChannelParams::from_snr_db(-30.0).sigma());
    assert!(lo.abs() < 1e-3);
}

#[test]
fn quadrature_is_converged() {
    let (x, w) = gauss_hermite(96);
    assert!((w.iter().sum::<f64>() - core::f64::consts::PI.sqrt()).abs() < 1e-12);
    let mut sorted = x.clone();
    sorted.sort_by(f64::total_cmp);
    assert!(sorted.windows(2).all(|p| p[0] < p[1]));
    assert!(sorted.iter().zip(sorted.iter().rev()).all(|(a, b)| (a + b).abs() < 1e-12), "nodes are symmetric");
    let sigma = ChannelParams::from_snr_db(1.0).sigma();
    let (a, b) = (biawgn_capacity_dispersion_with(sigma, 64), biawgn_capacity_dispersion_with(sigma, 96));
    assert!((a.0 - b.0).abs() < 1e-7 && (a.1 - b.1).abs() < 1e-7, "{a:?} {b:?}");
}

// (snr dB, eps(128, 64), eps(1024, 512)) from the same formula evaluated in double
// precision on the reference C and V.
const NA_CASES: &[(f64, f64, f64)] = &[
    (-2.0, 9.639193e-01, 1.0),
    (0.0, 4.265773e-01, 6.411022e-01),
    (1.0, 1.026897e-01, 3.580673e-03),
    (2.0, 6.895367e-03, 7.590921e-10),
    (3.0, 6.173911e-05, 2.665600e-23),
];

#[test]
fn normal_approximation_matches_reference() {
    for &(snr, short, long) in NA_CASES {
        let sigma = ChannelParams::from_snr_db(snr).sigma();
        let (a, b) = (na_bound(128, 64, sigma), na_bound(1024, 512, sigma));
        assert!((a - short).abs() <= 1e-5 * short, "n=128 at {snr} dB: {a}");
        assert!((b - long).abs() <= 1e-5 * long, "n=1024 at {snr} dB: {b}");
    }
}

/// Above the capacity crossover the longer code's bound is lower; below it the
/// order reverses, since the bound of a rate above capacity tends to 1 with n.
#[test]
fn normal_approximation_ordering() {
    for snr in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let s = ChannelParams::from_snr_db(snr).sigma();
        assert!(na_bound(128, 64, s) > na_bound(1024, 512, s), "{snr} dB");
    }
    for snr in [-2.0, -1.0, 0.0] {
        let s = ChannelParams::from_snr_db(snr).sigma();
        assert!(na_bound(128, 64, s) < na_bound(1024, 512, s), "{snr} dB");
    }
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![Just("a"), Just("the"), Just("cat"), Just("on"), Just("mat"), Just("dog")].prop_map(String::from)
}

fn sentence() -> impl Strategy<Value = String> {
    proptest::collection::vec(word(), 0..10).prop_map(|w| w.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn levenshtein_is_a_metric(a in "[a-c]{0,8}", b in "[a-c]{0,8}", c in "[a-c]{0,8}") {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        prop_assert!(levenshtein(&a, &b) <= a.len().max(b.len()));
    }

    #[test]
    fn scores_stay_in_range(h in sentence(), r in sentence()) {
        let b = bleu(&h, &r);
        let l = rouge_l(&h, &r);
        prop_assert!((0.0..=100.0 + 1e-9).contains(&b));
        prop_assert!((0.0..=100.0 + 1e-9).contains(&l));
        prop_assert!((l - rouge_l(&r, &h)).abs() < 1e-9);
        // a sentence shorter than four words has no 4-grams and scores near zero
        if r.split_whitespace().count() >= 4 {
            prop_assert!((bleu(&r, &r) - 100.0).abs() < 1e-9);
        }
        if !r.is_empty() {
            prop_assert!((rouge_l(&r, &r) - 100.0).abs() < 1e-9);
        }
    }
}

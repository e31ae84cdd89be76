use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergolab::cli::exit_code;
use ergolab::koopman::{cesaro_average, weighted_average, Observable};
use ergolab::oracle::{empirical_measure, geometric_oracle, integrate};
use ergolab::semigroup::{Character, FolnerBox};
use ergolab::systems::{golden_alpha, DynamicalSystem, StatePoint, SubshiftPoint};
use ergolab::{Complex64, ErgoError};

#[test]
fn weighted_averages_match_geometric_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for draw in 0..100 {
        let alpha: f64 = rng.gen();
        let theta: f64 = rng.gen();
        let x: f64 = rng.gen();
        let k: i64 = rng.gen_range(-3..=3);
        let n = [10u64, 1_000, 100_000][draw % 3];
        let sys = DynamicalSystem::circle_rotation(alpha, false).unwrap();
        let r = weighted_average(
            &sys,
            &Observable::exp(k),
            &Character::new(vec![theta]).unwrap(),
            &FolnerBox::new(n, 1).unwrap(),
            &[StatePoint::circle(x)],
        )
        .unwrap();
        worst = worst.max((r.value(0)[0] - geometric_oracle(theta, alpha, k, n, x)).norm());
    }
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn empirical_integration_equals_cesaro_bitwise() {
    let rot = DynamicalSystem::golden_rotation();
    let dern = DynamicalSystem::derndinger();
    let rot2 = DynamicalSystem::rotation(vec![vec![golden_alpha()], vec![0.1]], true).unwrap();
    let anzai = DynamicalSystem::anzai(golden_alpha(), true).unwrap();
    let fiber = Observable::tensor(&Observable::exp(1), &Observable::fiber_character(2)).unwrap();
    let cases = [
        (rot, Observable::exp(3), StatePoint::circle(0.17), 777u64),
        (dern, Observable::coord(2).unwrap(), StatePoint::Subshift(SubshiftPoint::minus(9)), 500),
        (rot2, Observable::exp(1), StatePoint::circle(0.5), 40),
        (
            anzai,
            fiber,
            StatePoint::product(StatePoint::circle(0.2), ergolab::cocycle_rep::GroupElement::torus(0.7)),
            300,
        ),
    ];
    for (sys, f, x, n) in cases {
        let w = FolnerBox::new(n, sys.dim()).unwrap();
        let a = cesaro_average(&sys, &f, &w, &[x.clone()]).unwrap();
        let b = integrate(&empirical_measure(&sys, &x, &w).unwrap(), &f).unwrap();
        for (u, v) in a.value(0).iter().zip(&b) {
            assert_eq!(u.re.to_bits(), v.re.to_bits(), "{}", sys.id());
            assert_eq!(u.im.to_bits(), v.im.to_bits(), "{}", sys.id());
        }
    }
}

#[test]
fn nan_is_a_numerical_failure() {
    let rot = DynamicalSystem::golden_rotation();
    let f = Observable::custom("nan", 1, |_, out| {
        out[0] = Complex64::new(f64::NAN, 0.0);
        Ok(())
    });
    let err = weighted_average(
        &rot,
        &f,
        &Character::trivial(1),
        &FolnerBox::new(5, 1).unwrap(),
        &[StatePoint::circle(0.0)],
    )
    .unwrap_err();
    assert!(matches!(err, ErgoError::Numerical(_)));
    assert_eq!(exit_code(&err), 3);
}

use conmorse::discrete::{constrained_morse_index, unconstrained_morse_index};
use conmorse::model;
use conmorse::morse::{morse_report, Numerics, Route};
use conmorse::{BoundaryCondition, ConstraintFunction, Error, Interval, Potential, SchroedingerProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cosine_problem(seed: u64, m: usize, bc: BoundaryCondition) -> SchroedingerProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..6).map(|_| rng.gen_range(-8.0..4.0)).collect();
    let v = move |x: f64| a.iter().enumerate().map(|(k, c)| c * (k as f64 * 1.3 * x).cos()).sum::<f64>();
    let mut cons = Vec::new();
    if m >= 1 {
        let b = rng.gen_range(-0.8..0.8);
        cons.push(ConstraintFunction::new(move |x| 1.0 + b * x, move |_| b));
    }
    if m >= 2 {
        cons.push(ConstraintFunction::new(|x: f64| x.exp(), |x: f64| x.exp()));
    }
    SchroedingerProblem::new(Interval::new(-1.5, 1.0).unwrap(), Potential::new(v), bc, cons).unwrap()
}

#[test]
fn routes_agree_on_random_dirichlet_problems() {
    for seed in 0..6 {
        let p = cosine_problem(seed, (seed % 3) as usize, BoundaryCondition::Dirichlet);
        let r = morse_report(&p, &Route::ALL, &Numerics::default()).unwrap();
        assert_eq!(r.indices().len(), 4);
        assert!(r.agreement(), "seed {seed}: {:?}", r.indices());
        let c = r.conjugate.unwrap();
        assert!(!c.spectral_flow_only);
        assert!(c.conjugate_points.iter().all(|x| x.is_negative_definite()));
        assert!(r.maslov.unwrap().monotone);
    }
}

#[test]
fn routes_agree_on_random_neumann_problems() {
    for seed in 10..14 {
        let p = cosine_problem(seed, 1 + (seed % 2) as usize, BoundaryCondition::Neumann);
        let r = morse_report(&p, &[Route::Direct, Route::Matrix, Route::Maslov], &Numerics::default()).unwrap();
        assert!(r.agreement(), "seed {seed}: {:?}", r.indices());
    }
}

#[test]
fn single_precision_discrete_count() {
    let p = model::SchroedingerProblem::<f32>::new(
        model::Interval::new(-1.0, 1.0).unwrap(),
        model::Potential::constant(-25.0),
        BoundaryCondition::Dirichlet,
        vec![model::ConstraintFunction::constant(1.0)],
    )
    .unwrap();
    assert_eq!(constrained_morse_index(&p, 200).unwrap(), 2);
    assert_eq!(unconstrained_morse_index(&p, 200).unwrap(), 3);
}

#[test]
fn dependent_constraints_are_rejected() {
    let r = SchroedingerProblem::new(
        Interval::new(0.0, 1.0).unwrap(),
        Potential::constant(0.0),
        BoundaryCondition::Dirichlet,
        vec![ConstraintFunction::constant(1.0), ConstraintFunction::constant(2.0)],
    );
    assert!(matches!(r, Err(Error::DependentConstraints { .. })));
    assert!(matches!(Interval::new(1.0, 1.0), Err(Error::InvalidInterval { .. })));
}

#[test]
fn free_operator_has_index_zero_everywhere() {
    let p = SchroedingerProblem::new(
        Interval::new(0.0, 1.0).unwrap(),
        Potential::constant(0.0),
        BoundaryCondition::Dirichlet,
        vec![],
    )
    .unwrap();
    let r = morse_report(&p, &Route::ALL, &Numerics::default()).unwrap();
    assert_eq!(r.indices().iter().map(|x| x.1).collect::<Vec<_>>(), vec![0, 0, 0, 0]);
}

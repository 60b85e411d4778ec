use proptest::prelude::*;
use switchwave_core::spectral::{pointwise_conditioning, pointwise_spectral_radius};
use switchwave_core::*;

const N: usize = 8;

fn grid() -> Grid {
    Grid::new(1.0, N).unwrap()
}

fn data(du0: Vec<f64>, u1: Vec<f64>) -> InitialData {
    InitialData::from_samples(&grid(), du0, u1).unwrap()
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * N + 1)
}

fn combine(x: &[f64], y: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| p + s * q).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pointwise_traces_are_linear(
        a in 0.0..2.0f64,
        s in -2.0..2.0f64,
        d1 in samples(), v1 in samples(), d2 in samples(), v2 in samples(),
    ) {
        let t = 12.0;
        let run = |d: Vec<f64>, v: Vec<f64>| {
            let mut st = PointwiseState::new(&data(d, v), grid(), a).unwrap();
            st.extend(t);
            (st.trace_minus().values().to_vec(), st.trace_plus().values().to_vec())
        };
        let (m1, p1) = run(d1.clone(), v1.clone());
        let (m2, p2) = run(d2.clone(), v2.clone());
        let (m, p) = run(combine(&d1, &d2, s), combine(&v1, &v2, s));
        for (got, want) in m.iter().zip(combine(&m1, &m2, s)).chain(p.iter().zip(combine(&p1, &p2, s))) {
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn boundary_traces_are_linear(
        mu1 in -3.0..0.9f64,
        mu2 in -3.0..3.0f64,
        s in -2.0..2.0f64,
        d1 in samples(), v1 in samples(), d2 in samples(), v2 in samples(),
    ) {
        let t = 12.0;
        let run = |d: Vec<f64>, v: Vec<f64>| {
            let mut st = BoundaryState::new(&data(d, v), grid(), mu1, mu2).unwrap();
            st.extend(t);
            st.trace().values().to_vec()
        };
        let x1 = run(d1.clone(), v1.clone());
        let x2 = run(d2.clone(), v2.clone());
        let x = run(combine(&d1, &d2, s), combine(&v1, &v2, s));
        for (got, want) in x.iter().zip(combine(&x1, &x2, s)) {
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn extension_is_append_only(
        a in 0.0..2.0f64,
        t1 in 0.0..6.0f64,
        t2 in 6.0..14.0f64,
        d in samples(), v in samples(),
    ) {
        let init = data(d, v);
        let mut step = PointwiseState::new(&init, grid(), a).unwrap();
        step.extend(t1);
        let before = step.trace_minus().values().to_vec();
        step.extend(t2);
        prop_assert_eq!(&step.trace_minus().values()[..before.len()], &before[..]);

        let mut once = PointwiseState::new(&init, grid(), a).unwrap();
        once.extend(t2);
        prop_assert_eq!(once.trace_minus().values(), step.trace_minus().values());
        prop_assert_eq!(once.trace_plus().values(), step.trace_plus().values());
    }
}

#[test]
fn iterates_obey_conditioning_bound() {
    let g = Grid::new(1.0, 16).unwrap();
    let d = InitialData::preset(Preset::Bump, &g);
    let four_ell = g.half_ells(8);
    for a in [0.1, 0.5, 1.0, 1.5, 1.9] {
        let mut st = PointwiseState::new(&d, g, a).unwrap();
        st.extend(60.0);
        let (c, rho) = (pointwise_conditioning(a), pointwise_spectral_radius(a));
        let y0 = g.half_ells(6);
        for offset in 0..four_ell {
            let start = st.state_vector(y0 + offset).unwrap().norm();
            let mut k = 1;
            while let Ok(v) = st.state_vector(y0 + offset + k * four_ell) {
                let bound = c * rho.powi(k as i32) * start;
                assert!(v.norm() <= bound + 1e-12, "a = {a}, k = {k}");
                k += 1;
            }
        }
    }
}

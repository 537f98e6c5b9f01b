use laffaille::functors::fl_to_breuil;
use laffaille::gen::{self, rng_for};
use laffaille::json::{self, Object};
use laffaille::kisin::kisin_to_breuil;
use laffaille::*;
use proptest::prelude::*;
use serde_json::json;

#[test]
fn hand_written_document_decodes() {
    let params = AmbientParams::new(3, 2, 6).unwrap();
    let doc = json!({
        "schema": "laffaille/v1",
        "params": params,
        "object": { "fl_module": {
            "d": 2,
            "jumps": [0, 1],
            "Ftil": { "rows": 2, "cols": 2, "entries": [
                [{ "coeffs": ["1"], "prec": 20 }, { "coeffs": ["0"], "prec": 20 }],
                [{ "coeffs": ["5"], "prec": 20 }, { "coeffs": ["2"], "prec": 20 }]
            ]}
        }}
    });
    let (a, obj) = json::from_str(&doc.to_string()).unwrap();
    let Object::Fl(m) = obj else { panic!("expected an FL module") };
    assert_eq!(m.jumps, vec![0, 1]);
    assert_eq!(m.ftil, RingMatrix::from_ints(&a.witt, &[&[1, 0], &[5, 2]]));
}

#[test]
fn residues_above_the_modulus_are_rejected() {
    let params = AmbientParams::new(3, 2, 6).unwrap();
    let too_big = 3u64.pow(20).to_string();
    let doc = json!({
        "schema": "laffaille/v1",
        "params": params,
        "object": { "fl_module": { "d": 1, "jumps": [0], "Ftil": { "rows": 1, "cols": 1,
            "entries": [[{ "coeffs": [too_big], "prec": 20 }]] } } }
    });
    assert!(matches!(json::from_str(&doc.to_string()), Err(Error::PrecisionMismatch(..))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn objects_survive_serialization(seed in any::<u64>(), d in 1usize..=3) {
        let a = Ambient::standard(5, 3, 6).unwrap();
        let mut rng = rng_for(seed);
        let j = gen::random_jumps(&a, &mut rng, d);
        let m = gen::fl_random(&a, &mut rng, j.clone()).unwrap();
        let k = gen::kisin_random_gls(&a, &mut rng, j).unwrap();
        let bs = [fl_to_breuil(&a, &m), kisin_to_breuil(&a, &k).unwrap()];

        let Object::Fl(m2) = json::from_str(&json::to_string(&a, &Object::Fl(m.clone()))).unwrap().1 else { panic!() };
        prop_assert_eq!(m2, m);
        let Object::Kisin(k2) = json::from_str(&json::to_string(&a, &Object::Kisin(k.clone()))).unwrap().1 else { panic!() };
        prop_assert_eq!(k2, k);
        for b in bs {
            let s = json::to_string(&a, &Object::Breuil(b.clone()));
            let Object::Breuil(b2) = json::from_str(&s).unwrap().1 else { panic!() };
            // serialization is canonical
            prop_assert_eq!(&json::to_string(&a, &Object::Breuil(b2.clone())), &s);
            prop_assert_eq!(b2, b);
        }
    }
}

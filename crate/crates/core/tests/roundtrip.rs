use proptest::prelude::*;
use regen::collector::collect;
use regen::file::{split_striped, unsplit_striped};
use regen::gf::{BaseField, ExtField};
use regen::params::{validate_params, Mode, ParamSpec, SystemParams};
use regen::repair::execute_round;
use regen::state;
use regen::system::build_system;

fn small(mode: Mode) -> SystemParams {
    validate_params(&ParamSpec::new(6, 2, 4, 2, mode).with_base_bits(4)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn striping_round_trips(data in prop::collection::vec(any::<u8>(), 0..200)) {
        let p = small(Mode::Mbr);
        let f = ExtField::new(BaseField::new(p.b).unwrap(), p.m).unwrap();
        let polys = split_striped(&f, &data, &p);
        prop_assert_eq!(polys.len(), regen::file::stripes_needed(&p, data.len()));
        prop_assert_eq!(unsplit_striped(&f, &polys, &p).unwrap(), data);
    }

    #[test]
    fn fresh_systems_reconstruct_bit_exact(data in prop::collection::vec(any::<u8>(), 1..120), interior in any::<bool>()) {
        let mode = if interior { Mode::Interior } else { Mode::Mbr };
        let sys = build_system(&small(mode), &data).unwrap();
        for nodes in regen::mds::combinations(6, 2) {
            let ids: Vec<usize> = nodes.iter().map(|i| i + 1).collect();
            prop_assert_eq!(collect(&sys, &ids).unwrap(), data.clone());
        }
    }
}

#[test]
fn loaded_state_behaves_identically() {
    let params = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
    let data: Vec<u8> = (0..9000u32).map(|i| (i * 7 + 3) as u8).collect();
    let mut original = build_system(&params, &data).unwrap();
    assert_eq!(original.stripes(), 2);
    execute_round(&mut original, &[11, 12], None).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    state::save(&original, 5, &path).unwrap();
    let (mut loaded, seed) = state::load(&path).unwrap();
    assert_eq!(seed, 5);

    for failed in [[1, 2], [5, 9]] {
        let a = execute_round(&mut original, &failed, None).unwrap();
        let b = execute_round(&mut loaded, &failed, None).unwrap();
        assert_eq!(a, b);
    }
    assert_eq!(original.nodes(), loaded.nodes());
    assert_eq!(state::to_json(&original, 5), state::to_json(&loaded, 5));
}

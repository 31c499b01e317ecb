#![no_main]

use balmoment::invariant::catalog;
use balmoment::moment::MapSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = MapSpec::from_text(text, catalog::model_by_name) {
        let again = MapSpec::from_text(&map.to_text(), catalog::model_by_name)
            .expect("printed map reparses");
        assert_eq!(again.to_text(), map.to_text());
    }
});

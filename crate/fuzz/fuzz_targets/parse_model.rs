#![no_main]

use balmoment::invariant::LieModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = LieModel::from_text(text) {
        let again = LieModel::from_text(&model.to_text()).expect("printed model reparses");
        assert_eq!(again.to_text(), model.to_text());
    }
});

#![no_main]

use balmoment::moment::MomentTuple;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = MomentTuple::from_text(text) {
        let again = MomentTuple::from_text(&t.to_text()).expect("printed tuple reparses");
        assert_eq!(again.to_text(), t.to_text());
    }
});

#![no_main]

use balmoment::masolver::{parse_modes, ScalarField, TorusGrid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(modes) = parse_modes(text) else {
        return;
    };
    let Some(first) = modes.first() else {
        return;
    };
    if first.k.len() % 2 != 0 || first.k.len() > 6 || first.k.is_empty() {
        return;
    }
    let grid = TorusGrid::new(first.k.len() / 2, 8).expect("small grid");
    let _ = ScalarField::from_modes(grid, &modes);
});

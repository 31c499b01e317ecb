#![no_main]

use balmoment::masolver::{field_from_samples, parse_samples, TorusGrid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok((shape, values)) = parse_samples(text) else {
        return;
    };
    assert_eq!(shape.iter().product::<usize>(), values.len());
    if shape.len() % 2 == 0 && (2..=6).contains(&shape.len()) {
        let grid = TorusGrid::new(shape.len() / 2, 8).expect("small grid");
        let _ = field_from_samples(grid, text);
    }
});

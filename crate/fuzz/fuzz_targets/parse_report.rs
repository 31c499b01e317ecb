#![no_main]

use balmoment_cli::report::validate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = validate(text) {
        let again = validate(&report.to_jsonl()).expect("printed report validates");
        assert_eq!(again, report);
    }
});

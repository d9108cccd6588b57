#![no_main]

use lazy_oco::losses::{parse_loss_sequence, peek_dimension, write_loss_sequence};
use lazy_oco::Domain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let peeked = peek_dimension(text);
    let _ = parse_loss_sequence(text, None);
    let Ok(d) = peeked else {
        return;
    };
    if d > 64 {
        return;
    }
    let domain = Domain::cube(d, -1.0, 1.0).unwrap();
    if let Ok(seq) = parse_loss_sequence(text, Some(&domain)) {
        assert_eq!(seq.dimension(), d);
        let written = write_loss_sequence(&seq).unwrap();
        let again = parse_loss_sequence(&written, Some(&domain)).unwrap();
        assert_eq!(again.len(), seq.len());
    }
});

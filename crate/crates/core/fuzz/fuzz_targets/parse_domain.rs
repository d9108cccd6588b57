#![no_main]

use lazy_oco::Domain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(domain) = serde_json::from_slice::<Domain>(data) else {
        return;
    };
    if domain.dimension() > 1024 {
        return;
    }
    let center = domain.center();
    assert!(domain.contains(&center, 1e-9).unwrap());
    let far = vec![1e6; domain.dimension()];
    let p = domain.project(&far).unwrap();
    assert!(domain.contains(&p, 1e-6 * (1.0 + domain.diameter())).unwrap());
});

#![no_main]

use cylris::harness::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ScenarioConfig::parse(text) {
        let again = ScenarioConfig::parse(&cfg.emit()).expect("emitted config must parse");
        assert_eq!(again, cfg);
        let _ = cfg.scenario();
    }
});

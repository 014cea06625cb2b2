#![no_main]

use libfuzzer_sys::fuzz_target;
use structured_bandit::reward_model::exchange::ModelDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = ModelDocument::from_json(text) else {
        return;
    };
    if let Ok(model) = doc.to_model() {
        // A valid model must survive the exchange format unchanged.
        let again = ModelDocument::from_model(&model).to_model().expect("round trip");
        assert_eq!(model.means(), again.means());
        let _ = doc.to_pool(&model);
    }
});

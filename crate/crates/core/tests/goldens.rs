//! Golden-file checks: the screen identity digest against an independently
//! hand-built canonicalization, and the rendered S2R prompt.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use bugscribe_core::model::screen_identity;
use bugscribe_core::testutil::node;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn screen_identity_matches_the_oracle_and_the_golden_file() {
    let hierarchy = vec![
        node("button", "ok", "OK"),
        node("label", "msg", "Saved"),
        node("text-field", "name", "typed text is ignored"),
    ];
    let id = screen_identity(&hierarchy, "ExampleActivity", false);

    // independent oracle: the canonical form written out by hand. The
    // text-field label must canonicalize to the empty string, the others
    // lowercase; bounds never participate.
    let canonical = concat!(
        "[\"ExampleActivity\",false,[",
        "[\"button\",\"ok\",\"ok\"],",
        "[\"label\",\"msg\",\"saved\"],",
        "[\"text-field\",\"name\",\"\"]",
        "]]"
    );
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let oracle = hex::encode(hasher.finalize());
    assert_eq!(id.as_str(), oracle, "identity diverges from the hand-built canonical form");

    let golden = fs::read_to_string(data_dir().join("golden/screen_identity.txt")).unwrap();
    assert_eq!(id.as_str(), golden.trim(), "identity diverges from the frozen golden digest");
}

#[test]
fn rendered_s2r_prompt_matches_golden_and_orders_its_context_sections() {
    let golden = fs::read_to_string(data_dir().join("golden/s2r_prompt_render.txt")).unwrap();

    // the four context sections appear, in declared order
    let headers = ["## Bug Report", "## GUI Interactions", "## Screen Descriptions", "## Buggy Screen"];
    let mut last = 0;
    for header in headers {
        let at = golden.find(header).unwrap_or_else(|| panic!("missing section header {header}"));
        assert!(at >= last, "section {header} out of order");
        last = at;
    }

    // no unresolved placeholders survive rendering
    for placeholder in ["{report}", "{interactions}", "{screen_descriptions}", "{buggy_screen}", "{correction}"] {
        assert!(!golden.contains(placeholder), "unresolved {placeholder}");
    }
}

//! Bundled presentation files.

use crate::presentation::{parse_presentation, Presentation};

pub const COM: &str = include_str!("../fixtures/com.op");
pub const PERM: &str = include_str!("../fixtures/perm.op");
pub const ALG_A: &str = include_str!("../fixtures/algA.op");
pub const ALG_B: &str = include_str!("../fixtures/algB.op");
pub const CEX1: &str = include_str!("../fixtures/cex1.op");
pub const CEX1_SWAPPED_ORDER: &str = include_str!("../fixtures/cex1_swapped.order");
pub const CEX2: &str = include_str!("../fixtures/cex2.op");

/// Names accepted by [`bundled`].
pub const NAMES: [&str; 6] = ["com", "perm", "algA", "algB", "cex1", "cex2"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "com" => Some(COM),
        "perm" => Some(PERM),
        "algA" => Some(ALG_A),
        "algB" => Some(ALG_B),
        "cex1" => Some(CEX1),
        "cex2" => Some(CEX2),
        _ => None,
    }
}

/// Parses a bundled presentation; panics only if a shipped file is broken.
pub fn bundled(name: &str) -> Presentation {
    let src = source(name).unwrap_or_else(|| panic!("no bundled presentation named {name}"));
    parse_presentation(src).unwrap_or_else(|e| panic!("bundled presentation {name}: {e}"))
}

pub fn com() -> Presentation {
    bundled("com")
}

pub fn perm() -> Presentation {
    bundled("perm")
}

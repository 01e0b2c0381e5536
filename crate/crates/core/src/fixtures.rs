//! The example decompositions shipped with the crate.

use crate::error::Result;
use crate::novikov_pipeline::CircleMorseData;
use crate::schema::{parse_document, DecompositionDoc, Document};

pub const TORUS: &str = include_str!("../fixtures/torus.json");
pub const TORUS_CIRCLE: &str = include_str!("../fixtures/torus_circle.json");
pub const KLEIN: &str = include_str!("../fixtures/klein.json");
pub const DOUBLE_TORUS: &str = include_str!("../fixtures/double_torus.json");
pub const SOLID_DOUBLE_TORUS: &str = include_str!("../fixtures/solid_double_torus.json");
pub const EMPTY: &str = include_str!("../fixtures/empty.json");
/// Orbits run both ways between two sets.
pub const CYCLIC_ORDER: &str = include_str!("../fixtures/cyclic_order.json");
/// The torus file cut off halfway.
pub const TRUNCATED: &str = include_str!("../fixtures/truncated.json");

/// The valid decomposition fixtures by name.
pub const DECOMPOSITIONS: [(&str, &str); 5] = [
    ("torus", TORUS),
    ("klein", KLEIN),
    ("double_torus", DOUBLE_TORUS),
    ("solid_double_torus", SOLID_DOUBLE_TORUS),
    ("empty", EMPTY),
];

pub fn decomposition(text: &str) -> Result<DecompositionDoc> {
    match parse_document(text)? {
        Document::Decomposition(d) => Ok(*d),
        other => Err(crate::Error::Schema(format!("expected a decomposition, found {}", other.type_name()))),
    }
}

pub fn torus() -> DecompositionDoc {
    decomposition(TORUS).expect("shipped fixture")
}

pub fn klein() -> DecompositionDoc {
    decomposition(KLEIN).expect("shipped fixture")
}

pub fn double_torus() -> DecompositionDoc {
    decomposition(DOUBLE_TORUS).expect("shipped fixture")
}

pub fn solid_double_torus() -> DecompositionDoc {
    decomposition(SOLID_DOUBLE_TORUS).expect("shipped fixture")
}

pub fn torus_circle() -> CircleMorseData {
    match parse_document(TORUS_CIRCLE).expect("shipped fixture") {
        Document::CircleMorse(d) => d,
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::group::GroupElement;
    use crate::algebra::group_ring::GroupRingElem;
    use crate::algebra::ring::RingElem;
    use crate::error::Error;
    use crate::novikov_pipeline::to_decomposition;
    use crate::pconnection::assembly::assemble_ndelta;

    fn sum(d: &DecompositionDoc, words: &[&str]) -> RingElem {
        let g = d.decomposition.group();
        let terms = words.iter().map(|w| (GroupElement::parse(g, w).unwrap(), 1.into()));
        RingElem::Group(GroupRingElem::from_terms(g, terms).unwrap())
    }

    #[test]
    fn every_valid_fixture_loads() {
        for (name, text) in DECOMPOSITIONS {
            assert!(decomposition(text).is_ok(), "{name}");
        }
    }

    #[test]
    fn broken_fixtures_fail() {
        assert!(matches!(decomposition(CYCLIC_ORDER), Err(Error::NotAdmissible(_))));
        assert!(matches!(decomposition(TRUNCATED), Err(Error::Schema(_))));
    }

    #[test]
    fn circle_fixture_matches_torus() {
        let a = assemble_ndelta(&to_decomposition(&torus_circle()).unwrap(), 32).unwrap();
        let b = assemble_ndelta(&torus().decomposition, 32).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn klein_blocks() {
        let d = klein();
        let m = assemble_ndelta(&d.decomposition, 32).unwrap();
        assert_eq!(m.entry("y1", "x"), sum(&d, &["e", "b"]));
        assert_eq!(m.entry("y2", "x"), sum(&d, &["e", "a"]));
        assert_eq!(m.entry("z", "y1"), sum(&d, &["b", "a"]));
        assert_eq!(m.entry("z", "y2"), sum(&d, &["e", "b"]));
    }

    #[test]
    fn double_torus_blocks() {
        let d = double_torus();
        let m = assemble_ndelta(&d.decomposition, 32).unwrap();
        assert_eq!(m.entry("y", "x"), sum(&d, &["e", "a"]));
        assert_eq!(m.entry("gamma.r0", "y"), sum(&d, &["a", "ab"]));
        assert_eq!(m.blocks().len(), 2);
    }

    #[test]
    fn solid_double_torus_support() {
        let d = solid_double_torus();
        let m = assemble_ndelta(&d.decomposition, 32).unwrap();
        match m.entry("q", "p") {
            RingElem::Group(e) => assert_eq!(e.support_len(), 17),
            other => panic!("{other}"),
        }
    }
}

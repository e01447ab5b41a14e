//! Artifacts generated at build time from the opcode semantics source.
//!
//! Each artifact records the sha256 of the source it was generated from;
//! the const assertion below fails the build if the backends and the
//! template library ever disagree on their provenance.

#[allow(clippy::all)]
pub(crate) mod bodies {
    include!(concat!(env!("OUT_DIR"), "/op_bodies.rs"));
}

pub(crate) mod switch {
    include!(concat!(env!("OUT_DIR"), "/switch_dispatch.rs"));
}

pub(crate) mod threaded {
    include!(concat!(env!("OUT_DIR"), "/threaded_handlers.rs"));
}

#[allow(dead_code)]
pub(crate) mod templates {
    include!(concat!(env!("OUT_DIR"), "/templates_gen.rs"));
}

const fn str_eq(a: &str, b: &str) -> bool {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    if a.len() != b.len() {
        return false;
    }
    let mut i = 0;
    while i < a.len() {
        if a[i] != b[i] {
            return false;
        }
        i += 1;
    }
    true
}

const _: () = {
    assert!(
        str_eq(bodies::SEMANTICS_SHA256, switch::SEMANTICS_SHA256)
            && str_eq(bodies::SEMANTICS_SHA256, threaded::SEMANTICS_SHA256)
            && str_eq(bodies::SEMANTICS_SHA256, templates::SEMANTICS_SHA256),
        "generated artifacts disagree on their semantics source"
    );
};

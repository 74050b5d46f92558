mod common;

use common::runner;

#[test]
fn context_splice() {
    common::prop_context_splice(&mut runner()).unwrap();
}

#[test]
fn congruence_splice() {
    common::prop_congruence_splice(&mut runner()).unwrap();
}

#[test]
fn nf_of_a_product() {
    common::prop_nf_product(&mut runner()).unwrap();
}

#[test]
fn nf_through_a_homomorphism() {
    common::prop_nf_hom(&mut runner()).unwrap();
}

#[test]
fn induced_maps_compose() {
    common::prop_induced_functorial(&mut runner()).unwrap();
}

#[test]
fn steps_project_to_the_collapse() {
    common::prop_step_projects(&mut runner()).unwrap();
}

#[test]
fn collapsed_steps_lift() {
    common::prop_lifting(&mut runner()).unwrap();
}

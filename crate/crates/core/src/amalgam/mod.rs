//! Amalgamated products `G = A ∗_C B` of free groups.

pub mod conjugacy;
pub mod context;
pub mod forms;
pub mod regular;
pub mod systems;

pub use conjugacy::{brute_conjugacy_oracle, conjugacy_search, ConjugacyOutcome, NotConjugateReason, UndecidedReason};
pub use context::{AmalgamContext, FactorData, Side, Syllable};
pub use forms::{
    conjugate_into_c, cyclic_form, cyclic_permutation, normal_form, normal_form_traced, reduced_form, CyclicForm,
    NormalForm, ReducedForm, RepPolicy,
};
pub use regular::{classify, classify_normal_form, cr_membership, CrClass, CrMembership, RegularityReport, Verdict, Witness};
pub use systems::{principal_system_solve, propagate};

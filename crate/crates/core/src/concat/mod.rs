//! The concatenated construction against bit tampering.

mod attack;
mod code;
mod plan;

pub use attack::{
    attack_experiment, attack_sweep, canonical_adversaries, case1_adversaries, classify, measure_seed_code_error,
    write_attack_csv, AttackReport, CaseClass, ATTACK_ETA,
};
pub use code::{
    Codeword, ConcatCode, EncoderCoins, LABEL_INNER, LABEL_LECSS, LABEL_SEED, LABEL_SEED_CODE, PERM_CACHE_LIMIT,
};
pub use plan::{
    assemble, plan_concat, ConcatPlan, Derived, Enforcement, ErrorTerm, PlanParts, MAX_PLANNED_BLOCK,
    NEAREST_SEARCH,
};

#[cfg(test)]
mod tests;

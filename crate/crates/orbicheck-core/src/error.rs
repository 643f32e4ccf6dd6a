use thiserror::Error;

/// Domain errors. Every failure mode the operations can report is a variant
/// here; the CLI maps all of them to exit status 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_{conductor})")]
    DivisionByZero { conductor: u32 },

    #[error("not rational: coefficient at basis index {index} of Q(zeta_{conductor}) is {coeff}, expected 0 (a caller assumed a Galois-stable sum)")]
    NotRational {
        conductor: u32,
        index: u32,
        coeff: String,
    },

    #[error("not a real value: element differs from its conjugate")]
    NotReal,

    #[error("conductor {0} is not supported (reduction table would overflow)")]
    ConductorTooLarge(u32),

    #[error("conductor mismatch: {0} does not divide {1}")]
    ConductorMismatch(u32, u32),

    #[error("element does not descend to Q(zeta_{0})")]
    NoDescent(u32),

    #[error("order cap exceeded: closure passed {cap} elements")]
    OrderCapExceeded { cap: usize },

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("not index 2: block-diagonal part of the closure has index {index} over the base group")]
    NotIndexTwo { index: usize },

    #[error("projections not injective: group is not a graph subgroup")]
    ProjectionsNotInjective,

    #[error("not block-diagonal: element {0} has a nonzero off-diagonal block")]
    NotBlockDiagonal(usize),

    #[error("non-free action: element {element} fixes a nonzero vector (det(id - g) = 0)")]
    NonFreeAction { element: usize },

    #[error("non-rational sum while aggregating {what}: internal bug")]
    NonRationalSum { what: String },

    #[error("matrix is not symplectic for the fixed form J")]
    NotSymplectic,

    #[error("non-integral s: {0} (the configuration is geometrically impossible)")]
    NonIntegralS(String),

    #[error("negative Hodge number: {0}")]
    NegativeHodgeNumber(String),

    #[error("Gauss-Bonnet inconsistency: chi_top = {via_chern} from c4 + eta but {via_hodge} from the Hodge diamond")]
    GaussBonnetInconsistency {
        via_chern: String,
        via_hodge: String,
    },

    #[error("mirror hypothesis violated: h^{{{p},{q}}} = {lhs} but h^{{{np},{q}}} = {rhs}")]
    MirrorViolated {
        p: usize,
        q: usize,
        np: usize,
        lhs: u64,
        rhs: u64,
    },

    #[error("cap exceeded: {what} = {requested} is beyond the supported bound {max}")]
    CapExceeded {
        what: String,
        requested: u64,
        max: u64,
    },

    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error("budget infeasible: the empty configuration already violates the bound (budget = {budget})")]
    BudgetInfeasible { budget: String },

    #[error("result cap reached: more than {cap} configurations")]
    ResultCapReached { cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

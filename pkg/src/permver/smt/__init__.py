from .terms import (
    BOOL,
    FALSE,
    FIELDID,
    INT,
    NULL,
    REAL,
    REF,
    SNAP,
    TRUE,
    App,
    BoolLit,
    Const,
    IntLit,
    Quant,
    RealLit,
    Sort,
    Term,
    add,
    and_,
    const_array,
    distinct,
    eq,
    forall,
    ge,
    gt,
    heap_arr,
    idiv,
    implies,
    ite,
    le,
    lt,
    mask_arr,
    min_term,
    mul,
    ne,
    neg,
    not_,
    or_,
    real,
    select,
    sort_to_smt,
    store,
    sub,
    to_smt,
    ufapp,
)
from .session import (
    SAT,
    TIMED_OUT,
    UNSAT,
    ProtocolError,
    SatResult,
    Session,
    SessionDead,
    SolverConfig,
    SolverStartError,
    StackUnderflow,
    find_default_solver,
    replay_transcript,
    unknown,
)

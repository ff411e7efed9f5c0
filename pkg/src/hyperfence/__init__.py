"""Runtime enforcement of universal hyperproperties via parity and safety games."""

from .automata import (
    Dpa,
    Nba,
    SafetyAutomaton,
    dpa_accepts_lasso,
    dpa_to_hoa,
    ltl_to_dpa,
    ltl_to_nba,
    nba_accepts_lasso,
    nba_to_dpa,
    product_automaton,
    restrict_dpa_to_word,
    restrict_safety_to_word,
    safety_ltl_to_safety_automaton,
)
from .bench import BenchRow, bench_od, write_report
from .compose import (
    DEFAULT_NODE_BUDGET,
    FiniteTrace,
    IndexedAlphabet,
    build_undecidability_gadget,
    encode_finished_session,
    indexed_name,
    self_compose,
)
from .enforce_parallel import (
    EnforcerSession,
    RunStats,
    Verdict,
    drive,
    harden_for_session_end,
    initialize,
    run_stream,
)
from .enforce_sequential import (
    SequentialState,
    SessionOutcome,
    SessionReport,
    close_session,
    monolithic_session,
    run_sequential,
    split_sessions,
    start_session,
)
from .errors import (
    AlphabetError,
    BudgetExceededError,
    FormulaSyntaxError,
    HyperfenceError,
    SessionOrderError,
    StreamFormatError,
    UnrealizableError,
)
from .games import (
    GraphGame,
    ParityGame,
    SafetyGame,
    Solution,
    dpa_to_game,
    export_pgsolver,
    game_product,
    import_pgsolver,
    restrict_to_winning_region,
    safety_automaton_to_game,
    solve_graph,
    solve_parity,
    solve_safety,
)
from .gen import GenConfig, SplitMix64, gen_lines
from .logic import (
    Alphabet,
    Atom,
    Formula,
    HyperSpec,
    LassoWord,
    classify_syntactic_safety,
    evaluate_hyperltl,
    evaluate_ltl,
    format_formula,
    formula_size,
    parse_hyperltl,
    parse_ltl,
    parse_spec_file,
    simplify,
    to_nnf,
)
from .streams import (
    StreamItem,
    format_input_line,
    format_output_line,
    parse_stream,
)

__version__ = "0.1.0"

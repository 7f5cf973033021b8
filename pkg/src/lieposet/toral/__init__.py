from .blocks import (
    BlockError,
    BuildingBlock,
    CatalogFamily,
    PairReport,
    block,
    catalog,
    derive_small_frobenius_form,
    search_contact_form,
    verify_contact_toral_pair,
    verify_toral_pair,
)
from .gluing import (
    ConstructionScript,
    GlueError,
    GlueResult,
    RULES,
    ScriptError,
    ScriptResult,
    ScriptStep,
    disconnected_contact_check,
    ext_hasse_has_cycle,
    glue,
    index_delta_check,
    index_formula,
    is_contact_sequence,
    random_toral_script,
    run_script,
)

__all__ = [
    "BlockError",
    "BuildingBlock",
    "CatalogFamily",
    "ConstructionScript",
    "GlueError",
    "GlueResult",
    "PairReport",
    "RULES",
    "ScriptError",
    "ScriptResult",
    "ScriptStep",
    "block",
    "catalog",
    "derive_small_frobenius_form",
    "disconnected_contact_check",
    "ext_hasse_has_cycle",
    "glue",
    "index_delta_check",
    "index_formula",
    "is_contact_sequence",
    "random_toral_script",
    "run_script",
    "search_contact_form",
    "verify_contact_toral_pair",
    "verify_toral_pair",
]

"""Wigmorean inference networks: charts, compilation, likelihood ratios, sweeps."""

from ._backend import BACKEND as KERNEL_BACKEND
from .bayesnet import (
    BayesNet,
    Cpt,
    EnumerationResult,
    Variable,
    eliminate,
    enumerate_joint,
    load_model_file,
    net_from_dict,
    net_to_dict,
    net_to_json,
    pair_cpt,
    prior_cpt,
    probability_of,
)
from .chart import (
    AncillaryAttachment,
    Chart,
    KeyListEntry,
    ReasoningArc,
    RelevanceReport,
    ValidationReport,
    Violation,
    chart,
    chart_from_dict,
    classify_relevance,
    export_chart,
    load_case_file,
    validate_chart,
)
from .compiler import (
    DEFAULT_FORCE_LIKELIHOODS,
    DEFAULT_PRIOR,
    AnnotationReport,
    CompilationSpec,
    CompiledModel,
    CredibilityParams,
    EventTable,
    annotate_from_ancillary,
    compile_chart,
    load_compilation_spec,
    node_var_name,
    spec_from_dict,
)
from .errors import (
    CapacityError,
    ChartParseError,
    CompileError,
    ConditioningError,
    ImpossibleEvidenceError,
    UndefinedForceError,
    WigmoreError,
)
from .lr import (
    InteractionReport,
    LikelihoodReport,
    SecondTestimonyParams,
    SingleTestimonyParams,
    decompose,
    diagnose_interaction,
    lr_general,
    lr_second_given_first,
    lr_single,
    second_testimony_net,
    single_testimony_net,
)
from .sensitivity import (
    Scenario,
    SweepAxis,
    SweepResult,
    SweepSpec,
    grid_axis,
    result_to_csv,
    result_to_json,
    run_sweep,
    story_table,
)

__version__ = "0.1.0"

"""Interval-scan and Benjamini-Hochberg FDR procedures with mixture-model
simulation, asymptotic oracles, and a Monte Carlo experiment harness."""

from .core import (
    CapExceededError,
    ConfusionTable,
    EmptySampleError,
    InvalidAlphaError,
    InvalidIntervalError,
    MissingLabelsError,
    NoAlternativesError,
    PValueFileError,
    PValueSample,
    RejectionOutcome,
    bh_procedure,
    confusion,
    empirical_fdr_hat,
    fdp,
    fnp,
    read_pvalue_file,
    scan_bruteforce,
    scan_procedure,
    write_pvalue_file,
)
from .models import (
    LabeledSample,
    MixtureModel,
    NullDistribution,
    TailSpec,
    alt_density_at_zero,
    alt_pvalue_cdf,
    alt_pvalue_density,
    cauchy,
    format_model_spec,
    normal,
    parse_model_spec,
    sample_labeled,
)
from .asymptotics import (
    DeltaScanResult,
    OracleReport,
    PowerLawLimit,
    asymptotic_fdr,
    beta_constant,
    check_assumption_A,
    check_property1,
    delta_bh,
    delta_scan,
    fnr_limits,
    leftmost_crossing,
    oracle_report,
    power_law_limit,
)
from .harness import (
    ExperimentConfig,
    MalformedCSVError,
    RepRecord,
    SummaryRow,
    derive_seed,
    gcurve,
    read_records,
    read_summary,
    run_experiment,
    summarize,
    write_gcurve,
    write_records,
    write_summary,
)

__version__ = "0.1.0"

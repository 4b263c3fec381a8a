from .manifest import ExampleSpec, ManifestError, format_positions, load_manifest, parse_positions
from .records import (
    AggregateRecord,
    RpdRecord,
    RunRecord,
    aggregate,
    apply_overhead_correction,
    baseline_correction,
    classify,
    completeness_table,
    export_aggregates,
    export_completeness,
    export_rpds,
    export_runs,
    import_runs,
    mean_mid,
    rpd,
    rpd_records,
)
from .runner import SuiteError, baseline_overhead, file_verdict, load_program, run_suite

"""Secure data-compressed multi-step MEC offloading: simulator,
optimizer suite, experiment harness."""

from .scenario import (ConfigurationError, Scenario, ScenarioParams,
                       build_scenario, cluster_sbs, pathloss_gain,
                       scenario_from_json, scenario_to_json)
from .sysmodel import (EvaluationReport, Solution, breach_cost,
                       breach_probability, codec_cycles, evaluate_solution,
                       fitness, mbs_uplink_rate, noma_uplink_rate,
                       subchannel_bandwidth)
from .encoding import (Bounds, Wave, decode_wave, init_wave, repair_wave,
                       virtual_index, wave_from_json, wave_to_json)
from .optimizers import (AGA, AGWWO, ALGORITHMS, CMT, WWO, OptimizerConfig,
                         RunTrace, run_aga, run_agwwo, run_cmt, run_wwo)
from .harness import (ExperimentSpec, MetricRow, load_config, run_experiment,
                      support_ratios, write_csv)

__version__ = "0.1.0"

__all__ = [
    "AGA", "AGWWO", "ALGORITHMS", "Bounds", "CMT", "ConfigurationError",
    "EvaluationReport", "ExperimentSpec", "MetricRow", "OptimizerConfig",
    "RunTrace", "Scenario", "ScenarioParams", "Solution", "WWO", "Wave",
    "breach_cost", "breach_probability", "build_scenario", "cluster_sbs",
    "codec_cycles", "decode_wave", "evaluate_solution", "fitness",
    "init_wave", "load_config", "mbs_uplink_rate", "noma_uplink_rate",
    "pathloss_gain", "repair_wave", "run_aga", "run_agwwo", "run_cmt",
    "run_experiment", "run_wwo", "scenario_from_json", "scenario_to_json",
    "subchannel_bandwidth", "support_ratios", "virtual_index",
    "wave_from_json", "wave_to_json", "write_csv",
]

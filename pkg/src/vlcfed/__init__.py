"""Federated learning over a hybrid visible-light/RF network.

Simulates the physical layer (Lambertian VLC downlink, log-distance RF),
jointly optimizes user selection and per-block bandwidth by alternating
fixed-point iteration, and trains a small regression network federatedly to
compare the hybrid system against an RF-only baseline.
"""

from .allocation import (
    BandwidthAllocation,
    EmptySelectionError,
    Selection,
    UsbaResult,
    get_b,
    get_s,
    is_feasible,
    oracle_enumerate,
    selection_objective,
    usba,
)
from .channel import (
    RfParams,
    VlcParams,
    concentrator_gain,
    lambertian_order,
    rf_channel_gain,
    rf_rate,
    vlc_channel_gain,
    vlc_rate,
    vlc_sinr,
)
from .compute import (
    CostBreakdown,
    InfeasibleLinkError,
    computation_energy,
    computation_time,
    cost_breakdown,
    transmission_time,
)
from .config import ConfigError, SimConfig, build_config, load_config_file
from .dataset import (
    DataShard,
    Dataset,
    DatasetParseError,
    DatasetSchemaError,
    load_bundled_dataset,
    load_dataset,
    make_synthetic,
    save_dataset,
    split_and_partition,
)
from .fl import (
    MlpModel,
    NoParticipantsError,
    Standardizer,
    TrainingReport,
    UndefinedMetricError,
    aggregate,
    forward,
    forward_batch,
    local_train,
    loss_gradients,
    mse_loss,
    r_squared,
    required_global_rounds,
    run_federated_training,
)
from .runner import (
    ExperimentError,
    ExperimentRecord,
    ExperimentReport,
    emit_report,
    quick_validate,
    run_experiment,
    run_rf_only,
    sweep_bandwidth,
    sweep_users,
)
from .topology import Topology, UserNode, distance, generate_topology

__version__ = "0.1.0"

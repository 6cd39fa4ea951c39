"""Few-photon simulator for Hong-Ou-Mandel interference on lossless and lossy samples."""

__version__ = "0.1.0"

from .errors import AntihomError, CapacityError, ConfigError, FitError, PhysicsError
from .experiment import (
    BellTestResult,
    ScanConfig,
    ScanResult,
    analytic_coincidence,
    bell_parameter,
    bell_test,
    classical_limit,
    hom_scan,
    pair_output,
    polarization_scan,
    synthesize_counts,
    visibility,
)
from .fitting import HomFit, fit_hom_curve
from .fock import (
    FockDistribution,
    FockState,
    ModeLabel,
    ModeRegister,
    coincidence_probability,
    conditional,
    dilate,
    distribution,
    evolve,
    extend_internal,
    loss_distribution,
    marginal,
    port_distribution,
)
from .optics import (
    BeamsplitterSpec,
    Layer,
    LayerStack,
    QswChannel,
    coherent_response,
    design_stack,
    lossless_bs,
    lossy_bs,
    qsw_composite,
    stack_response,
)
from .states import (
    WavePacketSpec,
    analyzer_coincidence,
    apply_delay,
    bell_input,
    overlap_from_position,
    qhq_phase,
    symmetry_weights,
)

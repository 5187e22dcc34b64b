"""Search R1CS circuits for weak assignments whose edits change public outputs.

Found edits are certified with a sum-check proof over a committed
row-selection polynomial, and the edit is extracted back out of the proof.
"""

from .circuit import R1CSInstance, Witness, execute, load_circuit
from .driver import PipelineConfig, run_pipeline, select_backend
from .ff import BN254_SCALAR, TEST101, Field
from .slicer import SlicerConfig, select_pool
from .viop import IopConfig, prove, verify

__version__ = "0.1.0"

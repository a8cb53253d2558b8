"""Binary hashing by direct quantization-loss minimization with orthonormal or orthogonal projections."""

from .codes import BinaryCodes, compute_B, quantization_loss
from .errors import (ConvergenceFailure, CorruptModel, DegenerateColumn, FormatError, InvalidConfig,
                     InvalidData, InvalidInput, NumericalFailure, SCQError, UnsupportedVersion)
from .itq import fit_itq, train_itq
from .linalg import FeatureMatrix, ProjectionMatrix, gram_eigendecomposition, zero_center
from .model import HashModel, load_model, save_model
from .oge import train_oge
from .one import LossTrace, TrainConfig, train_one
from .pipeline import fit_model
from .retrieval import EvalResult, encode, evaluate
from .scale import compute_s_max_var, compute_scale, sweep_scale

__version__ = "0.1.0"

"""Time-frequency localization operators, Hermite-diagonal isomorphisms,
Gabor multipliers and Bargmann-Fock Toeplitz operators, numerically."""

__version__ = "0.1.0"

from .bargmann import (FockFunction, bargmann, fock_norm, intertwine_check,  # noqa: E402,F401
                       toeplitz_apply)
from .gamma import product_inequality_scan, tau, tau_spectrum, vst_condition  # noqa: E402,F401
from .hermite import (Grid, GridFunction, HermiteBasis, HermiteCoeffs,  # noqa: E402,F401
                      hermite_coeffs, hermite_eval, hermite_synthesize, hermite_tensor,
                      stft_hermite_analytic)
from .lifting import (hilbert_iso_pair_check, iso_condition, lifting_ratio,  # noqa: E402,F401
                      precond_solve)
from .operators import (canonical_diagonal, compose, envelope_check,  # noqa: E402,F401
                        gabor_multiplier_apply, localization_matrix, tf_kernel)
from .phase_space import (frame_bounds, gabor_coeffs, gabor_system, istft,  # noqa: E402,F401
                          mod_norm_frame, mod_norm_grid, mod_norm_hermite, stft)
from .weights import (RadialWeight, eval_weight, grs_diagnostic, make_weight,  # noqa: E402,F401
                      moderateness_report)

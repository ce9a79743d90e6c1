"""Differential phase contrast ultrasound workbench.

Synthesizes plane-wave pulse-echo data through thin speed-of-sound delay
screens, beamforms per-angle complex images, forms shear-compounded
differential-phase maps with an adjustable shear depth, and cross-checks
them against a paraxial wave-acoustic forward model.
"""

from .domain import (AberratorProfile, ImageGrid, MediumConfig, Scene,
                     SceneError, SequenceConfig, TransducerConfig,
                     make_angles, validate_scene, with_aberrator)
from .synth import (RfDataset, ScattererField, SynthesisError,
                    constant_delay_profile, gauss_delay_profile,
                    gen_scatterers, inclusion_delay_from_sos, merge_fields,
                    pulse, sphere_delay_profile, synthesize_rf)
from .beamform import (BeamformedStack, BeamformError, ScalarImage,
                       analytic_signal, compound_bmode, das_beamform)
from .dpc import (CModeImage, DpcImage, FocusMap, PhasePairMap,
                  cmode_assemble, compound_dpc, enhance_integrate, focus_map,
                  focus_sharpness, gaussian_filter, localize_depth,
                  pair_phase, roi_mean_abs, roi_slices, shear_untilt,
                  subtract_reference, wrap_phase)
from .forward import (ComparisonReport, ForwardParams, QuadratureError,
                      compare_images, eval_forward_dpc, params_from_scene,
                      ray_limit_dpc)

__version__ = "0.1.0"

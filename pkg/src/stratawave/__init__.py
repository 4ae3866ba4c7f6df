"""Wavelet frames on stratified Lie groups: spectral frame bounds, kernel
synthesis on R^n and the Heisenberg group, and desk-scale frame experiments."""

from .groups import GroupDescriptor, LatticeSpec, abelian_group, heisenberg_group, step2_group
from .grids import GridSpec, SampledKernel, line_grid, h1_grid
from .spectral import (SpectralProfile, MultiplierAnalysis, mexican_hat_profile,
                       heat_power_profile, zero_lattice_profile, eval_multiplier,
                       frame_bounds, multi_generator_bounds, calderon_constant,
                       daubechies_check, tightness_asymptotics, midpoint_error_bound)
from .kernels import (wavelet_kernel, wavelet_evaluator_1d, group_convolve,
                      dilate_kernel, moments, moment_table,
                      calderon_reproducing_check, calderon_spectral_value,
                      cwt_isometry_check)
from .heat import HeatKernelH1, h1_mexican_hat, twisted_convolve
from .frames import (LineWaveletSystem, H1WaveletSystem, FrameReport,
                     r_apply_line, lattice_average_residual, deviation_scan,
                     empirical_frame_ratio, gram_extremes, cz_decay_check,
                     decay_envelope_check, make_test_family, family_spectral_band,
                     select_j_window)

__version__ = "0.1.0"

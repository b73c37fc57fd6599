"""Reconstruction of incompressible and trace-free symmetric 2-tensor fields
on the unit disk from their exponential X-ray transform."""

import warnings

# an outdated system TBB only disables that numba backend; omp/workqueue are used instead
warnings.filterwarnings("ignore", message="The TBB threading layer")

__version__ = "0.1.0"

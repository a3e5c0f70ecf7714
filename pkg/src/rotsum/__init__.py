"""rotsum: exact ergodic sums of step observables over circle rotations.

Subpackages:

* ``contfrac``    -- exact continued fractions, convergents, Ostrowski digits
* ``observables`` -- zero-mean BV step observables and their Fourier data
* ``ergosum``     -- exact O(log N) ergodic-sum engines and piecewise profiles
* ``variance``    -- Fourier-side variance kernels, bounds and diagnostics
* ``sequences``   -- certified subsequence plans (growth, parity, lacunarity)
* ``stats``       -- samplers, KS instruments and the CLT experiments
* ``billiard``    -- the rectangular periodic billiard at the diagonal direction
* ``cli``         -- command-line front end
"""

__version__ = "0.1.0"

from . import contfrac, observables  # noqa: F401  (lightweight, no cycles)

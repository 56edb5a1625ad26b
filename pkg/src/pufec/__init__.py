"""Error-corrected key regeneration for noisy PUF responses.

Building blocks: GF(2) linear algebra (:mod:`pufec.bits`), Reed-Muller and
repetition codes with ML / majority-logic / error-erasure decoders
(:mod:`pufec.codes`), generalized minimum distance decoding
(:mod:`pufec.gmd`), the two-level generalized concatenated construction and
its (2048, 131) instance (:mod:`pufec.concat`), syndrome and code-offset
secure sketches (:mod:`pufec.sketch`), and a Monte Carlo / importance
sampling evaluation harness (:mod:`pufec.sim`).  The ``pufec`` command line
front end lives in :mod:`pufec.cli`.
"""

from ._accel import NUMBA_ENABLED

__version__ = "0.1.0"

__all__ = ["NUMBA_ENABLED", "__version__"]

"""EIT simulation toolkit.

Numerical models of electromagnetically induced transparency in three- and
four-level atomic media: absorption/dispersion spectra, slow and superluminal
gaussian-pulse propagation with inversionless gain, dark-state-polariton light
storage, tripod two-polariton transport, generalized deformed-oscillator
spectra, and quantum-memory fidelity analytics.
"""

__version__ = "0.1.0"

"""Dyad EEG hyperscanning analysis and collaborative BCI session tooling.

Subpackages and modules:

* :mod:`dyadbci.signal_core` — montage, bands, filtering, epoching.
* :mod:`dyadbci.phase_sync` — phase-locking values and inter-brain synchrony.
* :mod:`dyadbci.brain_network` — functional network construction and metrics.
* :mod:`dyadbci.stats` — paired t, Kruskal-Wallis, F1, special functions.
* :mod:`dyadbci.synth_eeg` — deterministic synthetic dyad EEG.
* :mod:`dyadbci.classifier` — log band-power softmax baseline with CV.
* :mod:`dyadbci.cbci_hub` — TCP hub/client session simulation.
* :mod:`dyadbci.cli` — batch command-line entry points.
"""

__version__ = "0.1.0"

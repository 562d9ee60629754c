"""Hindi speech-corpus workbench.

Library layers, roughly bottom-up:

- ``audio``: PCM WAV parsing/writing, channel mixdown, decimation resampling
- ``vad``: peak-amplitude voice activity detection and speech gating
- ``textnorm``: digits-to-Hindi-words and abbreviation expansion
- ``g2p``: Devanagari grapheme-to-phoneme conversion and lexicon building
- ``features``: log triangular-band energy frames
- ``net``: sigmoid feedforward nets, co-activation statistics, training
  and statistics-matching adaptation
- ``align``: 3-state-per-phone HMM topologies and Viterbi forced alignment
- ``modelio``: on-disk model container (weights + co-activation priors)
- ``service``: the collaborative transcript-correction HTTP service
- ``cli``: command-line entry points for every stage
"""

__version__ = "0.1.0"

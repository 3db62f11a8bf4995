"""Channel-adaptive multisine waveform design for wireless power transfer."""

__version__ = "0.1.0"

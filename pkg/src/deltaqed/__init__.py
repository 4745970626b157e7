"""Single-photon frequency conversion with a driven Delta-type emitter in a waveguide."""

__version__ = "0.1.0"

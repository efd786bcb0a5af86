"""Application layer: configuration, file formats, reports and sweeps."""

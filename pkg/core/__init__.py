"""Physics of the photon-added detector: Fock primitives, post-selection and loss."""

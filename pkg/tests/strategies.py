"""Hypothesis strategies for valid interferometer inputs."""

import math

from hypothesis import strategies as st

from sksmzi.params import InputParams, LossParams

# amplitudes and squeezing spanning every regime of the reference rows
amplitude = st.floats(0.0, 60.0, allow_nan=False)
squeezing = st.floats(0.0, 2.0, allow_nan=False)
angle = st.floats(0.0, 2 * math.pi, allow_nan=False, exclude_max=True)
transmissivity = st.floats(0.05, 1.0, allow_nan=False)


@st.composite
def input_params(draw, min_photons: float = 1e-3):
    p = InputParams(draw(amplitude), draw(amplitude), theta=draw(angle), gamma=draw(angle), r=draw(squeezing))
    if p.alpha_mag**2 + p.beta_mag**2 + math.sinh(p.r) ** 2 < min_photons:
        p = p.with_(alpha_mag=1.0)
    return p


loss_params = st.builds(LossParams, transmissivity, transmissivity)

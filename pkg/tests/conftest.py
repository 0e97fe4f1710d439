import numpy as np
import pytest

from eoreadout import reference_params


@pytest.fixture(scope="session")
def params():
    return reference_params()


@pytest.fixture(scope="session")
def mw_envelopes():
    """Windowed mw-mw averaged envelopes shared by the detection tests."""
    from eoreadout import GROUND, EXCITED, readout_scenario
    from eoreadout.detection import REFERENCE_OPERATING_POINTS
    from eoreadout.scenarios import default_readout_pulse

    p = reference_params()
    res_g = readout_scenario("mw-mw", p, GROUND)
    res_e = readout_scenario("mw-mw", p, EXCITED)
    pulse = default_readout_pulse()
    point = REFERENCE_OPERATING_POINTS["mw-mw"]
    sel = ((res_g.t >= pulse.start)
           & (res_g.t < pulse.start + point.integration_time))
    return {"avg_g": res_g.envelope[sel], "avg_e": res_e.envelope[sel],
            "dt": res_g.dt, "point": point,
            "scenario_g": res_g, "scenario_e": res_e}


@pytest.fixture()
def rng():
    return np.random.default_rng(1202)

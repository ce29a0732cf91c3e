import math

import pytest

from rspcat import gaussianmodel as gm

PAPER_VS, PAPER_VA = 0.24, 1.3


@pytest.fixture(scope="session")
def paper_params():
    cm = gm.lossy_cm(gm.tmss_cm(PAPER_VS, PAPER_VA), 0.9, 0.9)
    return gm.effective_params(cm)


@pytest.fixture(scope="session")
def paper_rho(paper_params):
    from rspcat.protocol import ProjectionSpec, bob_mixed_conditional

    return bob_mixed_conditional(paper_params, ProjectionSpec(theta=math.pi / 2), 40)

import pytest

from efapprox.systems import bundled_document


@pytest.fixture(scope="session")
def exp_doc():
    return bundled_document("exp")


@pytest.fixture(scope="session")
def j0_doc():
    return bundled_document("j0")


@pytest.fixture(scope="session")
def exp_run20():
    from fractions import Fraction
    from efapprox.pipeline import run_pipeline
    doc = bundled_document("exp")
    return run_pipeline(doc.diff_system(), doc.series_list(), N=1, M=20,
                        eta=Fraction(1, 8))


@pytest.fixture(scope="session")
def j0_run20():
    from fractions import Fraction
    from efapprox.pipeline import run_pipeline
    doc = bundled_document("j0")
    return run_pipeline(doc.diff_system(), doc.series_list(), N=2, M=20,
                        eta=Fraction(1, 9))

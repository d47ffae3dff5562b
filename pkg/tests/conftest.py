import pytest

from moonshine import ops
from moonshine.chartab import load_character_table
from moonshine.qseries import QSeries, eta_pochhammer, j_series
from moonshine.rademacher import PrecisionConfig

BUNDLED_CLASSES = ["1A", "2A", "2B", "3A", "3B", "3C", "4A", "4B", "4C", "4D"]


def eta_quotient_2b(prec: int) -> QSeries:
    """(eta(tau)/eta(2tau))^24 + 24 = q^-1 + 276 q - 2048 q^2 + ...

    Independent closed-form route for the involution class with the
    split symbol; used as an oracle against the rounded numeric series.
    """
    one = eta_pochhammer(prec + 2)
    two_coeffs = [0] * (prec + 2)
    for k, a in enumerate(one.coeffs):
        if 2 * k < prec + 2:
            two_coeffs[2 * k] = a
    two = QSeries(0, two_coeffs)
    f = QSeries(-1, [1] + [0] * (prec + 1)) * (one ** 24) * two.invert() ** 24
    return (f + 24).truncate(prec - 1).map_integral()


def eta_quotient_2a(prec: int) -> QSeries:
    """Fricke-symmetrized partner: f + 24 + 4096/f for f the 2B quotient shifted."""
    one = eta_pochhammer(prec + 4)
    two_coeffs = [0] * (prec + 4)
    for k, a in enumerate(one.coeffs):
        if 2 * k < prec + 4:
            two_coeffs[2 * k] = a
    two = QSeries(0, two_coeffs)
    f = QSeries(-1, [1] + [0] * (prec + 3)) * (one ** 24) * two.invert() ** 24
    finv = QSeries(1, [1] + [0] * (prec + 3)) * (two ** 24) * (one ** 24).invert()
    return (f + 24 + finv * 4096).truncate(prec - 1).map_integral()


@pytest.fixture(scope="session")
def cfg():
    return PrecisionConfig(working_bits=256, c_max=200)


@pytest.fixture(scope="session")
def bundled_table():
    return load_character_table()


@pytest.fixture(scope="session")
def tg_series(cfg):
    """Exact expansions (window [-1, 15)) for the bundled classes."""
    return {name: ops.class_series(name, 16, cfg) for name in BUNDLED_CLASSES}

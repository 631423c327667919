"""Table construction and CSV/JSON serialization."""

import json
import math

import numpy as np
import pytest
from scipy import stats

from fmd.completions import PaNAssertion, build_predictive
from fmd.core import MassFunction, PredictiveVector, invert_to_mass
from fmd.errors import FMDError, InvalidMassError
from fmd.io import (
    COLUMNS,
    LOG_COLUMNS,
    distribution_table,
    format_value,
    mass_from_table,
    read_table,
    render_table,
    table_from_records,
    write_table,
)

APIARY = PaNAssertion(100, 25, 60, 0.1, 0.7)


@pytest.fixture
def apiary():
    p = build_predictive(APIARY, "strict")
    return p, invert_to_mass(p)


class TestDistributionTable:
    def test_shape_with_mass(self, apiary):
        p, q = apiary
        t = distribution_table(p, q)
        assert t.columns == COLUMNS and len(t.rows) == 102
        assert t.rows[-1][2] is None
        assert t.rows[50][1] == 50 / 101

    def test_predictive_only(self, apiary):
        t = distribution_table(apiary[0], None)
        assert len(t.rows) == 101 and t.rows[0][3] is None

    def test_density_column(self, apiary):
        t = distribution_table(*apiary)
        dens = np.array(t.column("density"))
        assert math.fsum(dens / 102) == pytest.approx(1.0, abs=1e-12)

    def test_mismatched(self):
        with pytest.raises(FMDError):
            distribution_table(PredictiveVector([0.5] * 3), MassFunction.from_linear([0.5, 0.5]))

    def test_log_columns(self, apiary):
        t = distribution_table(*apiary, log_output=True)
        assert t.columns == LOG_COLUMNS
        assert t.rows[0][3] == apiary[1].log_values[0]

    def test_underflow_floor(self):
        p = PredictiveVector(np.linspace(1e-6, 0.5, 2000))
        t = distribution_table(None, invert_to_mass(p))
        assert min(v for v in t.column("q_aNp1")) == 0.0


class TestFormatting:
    @pytest.mark.parametrize(
        "value,text", [(None, ""), (True, "1"), (3, "3"), (0.0, "0"), (0.1, "0.10000000000000001"), (-math.inf, "-inf")]
    )
    def test_format_value(self, value, text):
        assert format_value(value) == text

    def test_csv_roundtrip_exact(self, apiary, tmp_path):
        t = distribution_table(*apiary)
        path = write_table(t, tmp_path / "x.csv")
        back = read_table(path)
        assert back.columns == t.columns
        assert back.column("p_aN")[:101] == list(apiary[0].values)
        np.testing.assert_array_equal(mass_from_table(back).values, apiary[1].values)

    def test_json_roundtrip(self, apiary, tmp_path):
        t = distribution_table(*apiary, meta={"assertion": str(APIARY)})
        path = write_table(t, tmp_path / "x.json", "json")
        doc = json.loads(path.read_text())
        assert doc["meta"]["assertion"] == "Pa100[25,60,0.1,0.7]"
        back = read_table(path)
        assert back.meta["assertion"] == "Pa100[25,60,0.1,0.7]"
        np.testing.assert_array_equal(mass_from_table(back).values, apiary[1].values)

    def test_log_roundtrip_with_zero_mass(self, tmp_path):
        q = MassFunction.from_linear([0.5, 0.0, 0.5])
        t = distribution_table(None, q, log_output=True)
        for fmt in ("csv", "json"):
            back = read_table(write_table(t, tmp_path / f"z.{fmt}", fmt))
            np.testing.assert_array_equal(mass_from_table(back).values, [0.5, 0.0, 0.5])

    def test_deterministic(self, apiary):
        assert render_table(distribution_table(*apiary)) == render_table(distribution_table(*apiary))

    def test_unknown_format(self, apiary):
        with pytest.raises(ValueError):
            render_table(distribution_table(*apiary), "xml")

    def test_binomial_values_survive(self, tmp_path):
        q = MassFunction.from_linear(stats.binom.pmf(np.arange(31), 30, 0.3))
        back = read_table(write_table(distribution_table(None, q), tmp_path / "b.csv"))
        np.testing.assert_array_equal(mass_from_table(back).values, q.values)

    def test_no_mass_column(self):
        with pytest.raises(InvalidMassError):
            mass_from_table(table_from_records(["a"], [[0], [1]]))

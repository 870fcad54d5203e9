import json

import numpy as np
import pytest

from setwise_cd.errors import InconsistentSetSpec
from setwise_cd.experiments import (
    SUMMARY_SCHEMA_KEYS,
    decentralized_problem,
    experiment_decentralized,
    experiment_paramserver,
    paper_quadratics,
    paramserver_problem,
    write_summary,
)


class TestProblemBuilders:
    def test_paper_quadratic_pattern(self):
        fns = paper_quadratics(24, 8)
        hot = [i for i, f in enumerate(fns) if f.mu == pytest.approx(100.0)]
        assert hot == [0, 8, 16]
        assert all(f.mu == pytest.approx(2.0) for i, f in enumerate(fns) if i not in hot)

    def test_decentralized_constants(self):
        p = decentralized_problem(8)
        assert p.n == 24 and p.sets.max_degree == 8
        assert p.mu_min == pytest.approx(2.0) and p.M_max == pytest.approx(100.0)
        assert p.F_star == 0.0

    def test_paramserver_geometry(self):
        p, x0 = paramserver_problem(24, 4)
        assert p.num_coordinates == 48
        assert int((x0 == 100.0).sum()) == 12
        assert int((x0 == 1.0).sum()) == 36
        p2, x02 = paramserver_problem(12, 8)
        assert p2.num_coordinates == 48
        assert int((x02 == 100.0).sum()) == 6

    def test_parity_rejected(self):
        with pytest.raises(InconsistentSetSpec):
            paramserver_problem(5, 3)


class TestSmallRuns:
    def test_degenerate_config_no_crash(self):
        with pytest.warns(UserWarning):
            summary = experiment_decentralized(
                degree=4, seeds=1, iterations=120, record_every=1
            )
        assert summary.seeds == 1 and summary.iterations == 120
        assert summary.ratio > 0

    def test_summary_schema(self, tmp_path):
        summary = experiment_decentralized(
            degree=8, seeds=2, iterations=800, record_every=4
        )
        payload = summary.to_dict()
        for key in SUMMARY_SCHEMA_KEYS:
            assert key in payload
        path = tmp_path / "summary.json"
        write_summary(summary, path)
        on_disk = json.loads(path.read_text())
        assert "timestamp" in on_disk

    def test_deterministic_modulo_timestamp(self, tmp_path):
        kwargs = dict(degree=8, seeds=2, iterations=600, record_every=3)
        s1 = experiment_decentralized(**kwargs)
        s2 = experiment_decentralized(**kwargs)
        assert s1.to_dict() == s2.to_dict()
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        write_summary(s1, p1)
        write_summary(s2, p2)
        d1, d2 = json.loads(p1.read_text()), json.loads(p2.read_text())
        d1.pop("timestamp")
        d2.pop("timestamp")
        assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)

    def test_out_dir_artifacts(self, tmp_path):
        experiment_paramserver(
            n_sets=24, set_size=4, seeds=2, iterations=400, record_every=2,
            out_dir=tmp_path,
        )
        csvs = sorted(tmp_path.glob("*.csv"))
        assert len(csvs) == 4  # 2 algorithms x 2 seeds
        assert (tmp_path / "summary_paramserver_24x4.json").exists()

    def test_master_seed_changes_diag(self):
        p1, _ = paramserver_problem(24, 4, diag_seed=1)
        p2, _ = paramserver_problem(24, 4, diag_seed=2)
        assert not np.array_equal(p1.diag, p2.diag)

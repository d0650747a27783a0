"""End-to-end tests for the coxhess command line."""

import json
import logging
from io import StringIO

import pytest
from rich.console import Console

import src.logger as logger_module
from src.cache import cache_path
from src.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from src.ui_display import UIDisplay


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    """Fresh cache and log directories, no config file and no global logger."""
    for name in ("COXHESS_CACHE_DIR", "COXHESS_THREADS", "COXHESS_LOG_DIR", "COXHESS_NUMERATOR"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr(logger_module, "_logger_instance", None)
    yield tmp_path
    for name in ("coxhess.runs", "coxhess.errors", "coxhess.system"):
        for handler in list(logging.getLogger(name).handlers):
            handler.close()
            logging.getLogger(name).removeHandler(handler)


class TestCommandLine:
    """Exit codes and JSON output of each sub-command."""

    @pytest.fixture(autouse=True)
    def setup(self, workspace):
        self.tmp = workspace
        self.out = StringIO()
        self.err = StringIO()
        self.display = UIDisplay(Console(file=self.out, width=160), Console(file=self.err, width=160))

    def run(self, *args):
        argv = list(args) + [
            '--config', str(self.tmp / "missing.json"),
            '--cache-dir', str(self.tmp / "cache"),
            '--log-dir', str(self.tmp / "logs"),
        ]
        return main(argv, self.display)

    def read_json(self, name):
        with open(self.tmp / name, encoding='utf-8') as f:
            return json.load(f)

    def test_certify_h3(self):
        assert self.run('certify', 'H3', '--json', str(self.tmp / "h3.json")) == EXIT_OK
        report = self.read_json("h3.json")
        assert report['verdict'] == "PASS"
        assert report['degrees'] == [2, 6, 10]
        assert len(report['candidate_sets']) == 2
        assert "PASS" in self.out.getvalue()
        history = logger_module.get_logger().get_run_history()
        assert history[-1]['label'] == "H3"

    def test_certify_at_origin_fails(self):
        assert self.run('certify', 'H3', '--v', '0,0,0') == EXIT_FAIL
        assert "FAIL" in self.out.getvalue()

    def test_unknown_label(self):
        assert self.run('certify', 'Q7') == EXIT_INPUT
        assert "UnknownLabel" in self.err.getvalue()

    def test_zero_threads_rejected(self):
        assert self.run('certify', 'H3', '--threads', '0') == EXIT_INPUT
        assert "workers" in self.err.getvalue()

    def test_missing_command(self):
        assert main([], self.display) == EXIT_INPUT

    def test_orbit_json(self):
        assert self.run('orbit', 'A2', '--json', str(self.tmp / "orbit.json")) == EXIT_OK
        assert len(self.read_json("orbit.json")) == 3

    def test_orbit_prints_without_json(self):
        assert self.run('orbit', 'A1') == EXIT_OK
        assert self.out.getvalue().strip().startswith("[")

    def test_vector_molien_numerator(self):
        code = self.run('molien', 'H3', '--class', 'vector', '--json', str(self.tmp / "molien.json"))
        assert code == EXIT_OK
        data = self.read_json("molien.json")
        assert data['numerator'] == [0, 1, 0, 0, 0, 1, 0, 0, 0, 1]
        assert data['order'] == "120"
        assert data['degrees'] == [2, 6, 10]

    def test_tables_h3(self):
        assert self.run('tables', 'H3', '--json', str(self.tmp / "tables.json")) == EXIT_OK
        rows = self.read_json("tables.json")
        assert {row['quantity'] for row in rows} == {"|O|", "order", "degrees", "numerator", "choices"}
        assert all(row['status'] == "MATCH" for row in rows)

    def test_tables_report_corrupt_cache(self):
        assert self.run('tables', 'H3') == EXIT_OK
        path = cache_path(self.tmp / "cache", "H3")
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
        data['total'] = "121"
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f)

        assert self.run('tables', 'H3', '--json', str(self.tmp / "tables.json")) == EXIT_FAIL
        rows = self.read_json("tables.json")
        cache_rows = [row for row in rows if row['quantity'] == "cache"]
        assert len(cache_rows) == 1
        assert cache_rows[0]['status'] == "MISMATCH"

    def test_e8_tables_skip_enumeration_without_long(self):
        assert self.run('tables', 'E8', '--json', str(self.tmp / "e8.json")) == EXIT_OK
        rows = {row['quantity']: row for row in self.read_json("e8.json")}
        assert rows["|O|"]['computed'] == "240"
        for quantity in ("order", "degrees", "numerator"):
            assert rows[quantity]['status'] == "SKIPPED"
        assert rows["choices"]['computed'] == "96"

    @pytest.mark.slow
    def test_e8_certify_from_reference_numerator(self):
        code = self.run('certify', 'E8', '--numerator', 'paper-table', '--json', str(self.tmp / "e8.json"))
        assert code == EXIT_OK
        assert len(self.read_json("e8.json")['candidate_sets']) == 96

    def test_product_label_certifies(self):
        assert self.run('certify', 'A1xA2', '--v', '1,1,3', '--json', str(self.tmp / "a1a2.json")) == EXIT_OK
        report = self.read_json("a1a2.json")
        assert report['verdict'] == "PASS"
        assert report['degrees'] == [2, 2, 3]
        assert len(report['candidate_sets']) == 1

    def test_bfs_budget_is_enforced(self):
        assert self.run('molien', 'H3', '--mode', 'bfs', '--bfs-budget', '50') == EXIT_INPUT
        assert "budget of 50" in self.err.getvalue()
        assert not cache_path(self.tmp / "cache", "H3").exists()

    def test_bfs_mode_within_budget(self):
        code = self.run('molien', 'A3', '--mode', 'bfs', '--bfs-budget', '24', '--class', 'vector',
                        '--json', str(self.tmp / "a3.json"))
        assert code == EXIT_OK
        data = self.read_json("a3.json")
        assert data['order'] == "24"
        assert data['numerator'] == [0, 1, 1, 1]

    @pytest.mark.parametrize("args,line", [
        (('certify', 'Q7'), "certify Q7 - ERROR: UnknownLabel"),
        (('certify', 'H3', '--threads', '0'), "certify H3 - ERROR: ValueError: Configuration validation failed"),
        (('molien', 'H3', '--mode', 'bfs', '--bfs-budget', '10'), "molien H3 - ERROR: BudgetExceeded"),
    ])
    def test_errors_reach_the_error_log(self, args, line):
        assert self.run(*args) == EXIT_INPUT
        with open(self.tmp / "logs" / "errors.log", encoding='utf-8') as f:
            content = f.read()
        assert line in content
        assert "Stack Trace" in content

    def test_run_start_and_finish_are_logged(self):
        assert self.run('orbit', 'A2') == EXIT_OK
        with open(self.tmp / "logs" / "system.log", encoding='utf-8') as f:
            content = f.read()
        assert "orbit A2 started" in content
        assert "orbit A2 finished with exit code 0" in content

    def test_tables_skip_rows_past_the_bfs_budget(self):
        code = self.run('tables', 'H3', '--mode', 'bfs', '--bfs-budget', '10', '--json', str(self.tmp / "t.json"))
        assert code == EXIT_OK
        rows = {row['quantity']: row for row in self.read_json("t.json")}
        assert rows["order"]['status'] == "SKIPPED"
        assert "budget of 10" in rows["order"]['note']
        assert rows["choices"]['computed'] == "2"

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from epiwarn.cli import main
from epiwarn.store import Store
from epiwarn.weeks import Disease


@pytest.fixture
def env(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "store_path": str(tmp_path / "cli.db"),
                "artifacts_dir": str(tmp_path / "artifacts"),
                "alert_log_path": str(tmp_path / "alerts.out"),
            }
        )
    )
    return CliRunner(), config_path, tmp_path


def run(runner, config_path, *args, expect_exit=0):
    result = runner.invoke(main, ["--config", str(config_path), *args])
    if result.exit_code != expect_exit:  # pragma: no cover - debugging aid
        raise AssertionError(f"exit {result.exit_code}: {result.output}\n{result.exception}")
    return result


@pytest.fixture
def seeded(env):
    runner, config_path, tmp_path = env
    run(runner, config_path, "seed-demo", "--weeks", "80")
    return runner, config_path, tmp_path


class TestSeedDemo:
    def test_seeds_store_and_accounts(self, env):
        runner, config_path, tmp_path = env
        result = run(runner, config_path, "seed-demo", "--weeks", "80")
        assert "admin@example.org" in result.output
        store = Store(tmp_path / "cli.db")
        assert store.count_weeks(Disease.INFLUENZA) == 80
        assert len(store.list_users("pharmacy")) == 2
        assert len(store.list_users("hospital")) == 1

    def test_reseed_is_safe(self, seeded):
        runner, config_path, tmp_path = seeded
        run(runner, config_path, "seed-demo", "--weeks", "80")
        store = Store(tmp_path / "cli.db")
        assert store.count_weeks(Disease.INFLUENZA) == 80


class TestTrainAndForecast:
    def test_lstm_round_trip(self, seeded):
        runner, config_path, tmp_path = seeded
        result = run(
            runner, config_path, "train-forecaster", "--disease", "influenza", "--model", "lstm", "--epochs", "5"
        )
        assert "test-rmse" in result.output
        assert (tmp_path / "artifacts" / "lstm_influenza.txt").exists()

        result = run(runner, config_path, "forecast", "--disease", "influenza")
        numbers = [float(line) for line in result.output.strip().splitlines()]
        assert len(numbers) == 5
        assert all(v >= 0 for v in numbers)

    def test_arima_artifact(self, seeded):
        runner, config_path, tmp_path = seeded
        result = run(runner, config_path, "train-forecaster", "--disease", "malaria", "--model", "arima")
        assert "order" in result.output
        assert (tmp_path / "artifacts" / "arima_malaria.txt").exists()

    def test_forecast_without_artifact_fails(self, seeded):
        runner, config_path, _ = seeded
        result = run(runner, config_path, "forecast", "--disease", "hepatitis", expect_exit=1)
        assert "model_not_trained" in result.output

    def test_classifier_and_probability(self, seeded):
        runner, config_path, tmp_path = seeded
        result = run(runner, config_path, "train-classifier", "--disease", "influenza")
        assert "selected" in result.output
        assert (tmp_path / "artifacts" / "classifier_influenza.pkl").exists()
        result = run(runner, config_path, "probability", "--disease", "influenza")
        p = float(result.output.strip())
        assert 0.0 <= p <= 1.0


class TestEvaluate:
    def test_report_has_ten_classifier_rows(self, seeded):
        runner, config_path, _ = seeded
        result = run(
            runner, config_path, "evaluate", "--disease", "malaria", "--epochs", "5"
        )
        lines = result.output.splitlines()
        start = lines.index("kind,train_accuracy,test_accuracy,overfit,degenerate")
        table = []
        for line in lines[start + 1 :]:
            if line.startswith("selected"):
                break
            table.append(line)
        assert len(table) == 10
        assert "== forecasting ==" in result.output
        assert any(line.startswith("arima,") for line in lines)
        assert any(line.startswith("lstm,") for line in lines)


class TestExportPlot:
    def test_deterministic_bytes(self, seeded):
        runner, config_path, tmp_path = seeded
        run(runner, config_path, "train-forecaster", "--disease", "influenza", "--model", "lstm", "--epochs", "5")
        out1 = tmp_path / "plot1.json"
        out2 = tmp_path / "plot2.json"
        run(runner, config_path, "export-plot", "--disease", "influenza", "--out", str(out1))
        run(runner, config_path, "export-plot", "--disease", "influenza", "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()
        payload = json.loads(out1.read_text())
        assert len(payload["history"]) == 50
        assert len(payload["forecast"]) == 5
        assert payload["forecast"][0]["week"] not in {h["week"] for h in payload["history"]}

    def test_empty_store_fails(self, env):
        runner, config_path, tmp_path = env
        run(runner, config_path, "seed-demo", "--weeks", "80")
        run(runner, config_path, "train-forecaster", "--disease", "influenza", "--model", "lstm", "--epochs", "5")
        # wipe the store but keep artifacts
        (tmp_path / "cli.db").unlink()
        result = run(runner, config_path, "export-plot", "--disease", "influenza", "--out", str(tmp_path / "x.json"), expect_exit=1)
        assert "insufficient_history" in result.output


class TestSendAlert:
    def test_fan_out_summary_and_log(self, seeded):
        runner, config_path, tmp_path = seeded
        result = run(
            runner,
            config_path,
            "send-alert",
            "--diseases",
            "influenza",
            "--categories",
            "pharmacy",
            "--message",
            "stock up",
        )
        assert "2 sent, 0 failed" in result.output
        lines = Path(tmp_path / "alerts.out").read_text().strip().splitlines()
        assert len(lines) == 2
        store = Store(tmp_path / "cli.db")
        logged = store.get_alert(1)
        assert logged.recipient_count == 2

    def test_no_recipients(self, seeded):
        runner, config_path, _ = seeded
        result = run(
            runner, config_path, "send-alert", "--categories", "health_center", "--message", "x", expect_exit=1
        )
        assert "no recipients" in result.output.lower()


class TestIngest:
    def test_ingest_files(self, env):
        runner, config_path, tmp_path = env
        weather_lines = ["date,tavg_c,prcp_mm"]
        import datetime as dt

        start = dt.date(2019, 1, 7)
        for day in range(28):
            weather_lines.append(f"{(start + dt.timedelta(days=day)).isoformat()},5.0,1.0")
        mondays = [(start + dt.timedelta(weeks=w)).isoformat() for w in range(4)]
        trends = ["week_start,disease,volume"] + [f"{m},malaria,40" for m in mondays]
        tweets = ["week_start,keyword,count"] + [f"{m},malaria,9" for m in mondays]
        incidence = ["week_start,disease,cases"] + [f"{m},malaria,{50 + i}" for i, m in enumerate(mondays)]
        (tmp_path / "w.csv").write_text("\n".join(weather_lines) + "\n")
        (tmp_path / "t.csv").write_text("\n".join(trends) + "\n")
        (tmp_path / "x.csv").write_text("\n".join(tweets) + "\n")
        (tmp_path / "i.csv").write_text("\n".join(incidence) + "\n")
        result = run(
            runner,
            config_path,
            "ingest",
            "--disease",
            "malaria",
            "--weather",
            str(tmp_path / "w.csv"),
            "--trends",
            str(tmp_path / "t.csv"),
            "--tweets",
            str(tmp_path / "x.csv"),
            "--incidence",
            str(tmp_path / "i.csv"),
        )
        assert "stored 4 weeks" in result.output
        store = Store(tmp_path / "cli.db")
        assert store.count_weeks(Disease.MALARIA) == 4


class TestUsageErrors:
    def test_unknown_flag_exit_2(self, env):
        runner, config_path, _ = env
        result = runner.invoke(main, ["--config", str(config_path), "forecast", "--bogus"])
        assert result.exit_code == 2

    def test_unknown_disease_exit_2(self, env):
        runner, config_path, _ = env
        result = runner.invoke(main, ["--config", str(config_path), "forecast", "--disease", "plague"])
        assert result.exit_code == 2

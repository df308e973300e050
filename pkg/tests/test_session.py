import copy

import pytest

from ctrlbench.battery import generate_acquisition_battery, generate_musical_battery
from ctrlbench.errors import DomainError, ParseError, ProtocolError, StateError, VersionError
from ctrlbench.session import (
    Session,
    comparison_report,
    export_log,
    import_log,
    session_from_records,
    task_class,
    trial_messages,
)
from ctrlbench.simulate import SimConfig, simulate_plan
from ctrlbench.taxonomy import DeviceDescriptor, SenseDimension


@pytest.fixture
def plan():
    return generate_acquisition_battery([10, 30, 70, 150], [10], 2, 2, seed=7, device="probe")


@pytest.fixture
def device():
    return DeviceDescriptor("probe", (
        SenseDimension("delta-position", "linear", "X", "continuous", "ball"),
        SenseDimension("delta-position", "linear", "Y", "continuous", "ball"),
    ))


def snapshot(session):
    return (
        copy.deepcopy(session.record.trials),
        session.active_trial,
        copy.deepcopy(session.record.trial_metrics),
    )


class TestIngestProtocol:
    def test_normal_trial_stream(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        for k in range(3):
            session.ingest({"v": 1, "type": "sample", "trial": "t-0000",
                            "t": 0.1 * k, "values": [float(k)]})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.3})
        assert len(session.record.trials["t-0000"].samples) == 3

    def test_sample_before_start_rejected(self, plan, device):
        session = Session("s1", device, plan)
        before = snapshot(session)
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.0, "values": [1.0]})
        assert snapshot(session) == before

    def test_duplicate_trial_end_rejected(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.1})
        before = snapshot(session)
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.2})
        assert snapshot(session) == before

    def test_out_of_order_timestamp_rejected_prefix_safe(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        session.ingest({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.5, "values": [1.0]})
        before = snapshot(session)
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.2, "values": [2.0]})
        assert snapshot(session) == before
        # stream continues cleanly after the rejection
        session.ingest({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.6, "values": [2.0]})

    def test_unknown_trial_id_rejected(self, plan, device):
        session = Session("s1", device, plan)
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "trial_start", "trial": "t-9999", "t": 0.0})

    def test_duplicate_trial_start_rejected(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.1})
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.2})

    def test_second_open_trial_rejected(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "trial_start", "trial": "t-0001", "t": 0.1})

    def test_message_after_close_rejected(self, plan, device):
        session = Session("s1", device, plan)
        session.close()
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})

    def test_bad_version_rejected(self, plan, device):
        session = Session("s1", device, plan)
        with pytest.raises(ProtocolError):
            session.ingest({"v": 2, "type": "trial_start", "trial": "t-0000", "t": 0.0})

    def test_unknown_type_rejected(self, plan, device):
        session = Session("s1", device, plan)
        with pytest.raises(ProtocolError):
            session.ingest({"v": 1, "type": "telemetry", "t": 0.0})


class TestFinalize:
    def test_acquisition_metrics_attached(self, plan, device):
        session = Session("s1", device, plan)
        task = plan.task_for("t-0000")
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.42,
                        "kind": "selection", "position": task.amplitude})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.42})
        metrics = session.finalize_trial("t-0000")
        assert metrics["kind"] == "movement"
        assert metrics["mt"] == pytest.approx(0.42)
        assert metrics["hit"] is True

    def test_rhythm_metrics_attached(self, device):
        plan = generate_musical_battery("rhythm", {"count": 4}, tempi=(120,), seed=0, device="probe")
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        for k in range(4):
            session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.5 * k,
                            "kind": "note_on", "pitch": 60, "velocity": 90})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 1.6})
        metrics = session.finalize_trial("t-0000")
        assert metrics["kind"] == "timing"
        assert metrics["matched"] == 4
        assert metrics["mean_asynchrony"] == 0.0

    def test_finalize_is_idempotent(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.3})
        first = session.finalize_trial("t-0000")
        assert session.finalize_trial("t-0000") is first

    def test_unfinished_trial_rejected(self, plan, device):
        session = Session("s1", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        with pytest.raises(StateError):
            session.finalize_trial("t-0000")


class TestLogRoundtrip:
    def build_session(self, plan, device):
        records = simulate_plan(plan, SimConfig(a=0.2, b=0.1, noise_sd=0.01, seed=4))
        return session_from_records("s-log", device, plan, records)

    def test_export_import_identity(self, plan, device):
        record = self.build_session(plan, device)
        restored = import_log(export_log(record))
        assert restored.session_id == record.session_id
        assert restored.device == record.device
        assert restored.plan == record.plan
        assert restored.trials == record.trials
        assert restored.trial_metrics == record.trial_metrics
        assert restored.status == record.status

    def test_reexport_byte_identical(self, plan, device):
        record = self.build_session(plan, device)
        blob = export_log(record)
        assert export_log(import_log(blob)) == blob

    def test_every_message_kind_roundtrips(self, device):
        # one session holding samples, note events, selections, an aborted
        # trial, and attached metrics
        plan = generate_musical_battery("rhythm", {"count": 2}, tempi=(120,), reps_per_block=2,
                                        seed=0, device="probe")
        session = Session("s-mixed", device, plan)
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        session.ingest({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.01, "values": [0.5, 1.5]})
        session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.02,
                        "kind": "note_on", "pitch": 60.0, "velocity": 101.0})
        session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.40,
                        "kind": "note_off", "pitch": 60.0})
        session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.55,
                        "kind": "selection", "position": 3.25})
        session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.6})
        session.ingest({"v": 1, "type": "trial_start", "trial": "t-0001", "t": 1.0})
        session.abort_active_trial()
        record = session.close()
        blob = export_log(record)
        restored = import_log(blob)
        assert restored.trials == record.trials
        assert restored.trials["t-0001"].aborted
        assert export_log(restored) == blob

    def test_truncated_log_names_line(self, plan, device):
        blob = export_log(self.build_session(plan, device))
        lines = blob.decode().strip().split("\n")
        truncated = "\n".join(lines[:-1]) + "\n"
        with pytest.raises(ParseError) as err:
            import_log(truncated)
        assert err.value.line == len(lines)

    def test_malformed_line_names_line(self, plan, device):
        blob = export_log(self.build_session(plan, device)).decode()
        lines = blob.strip().split("\n")
        lines[2] = "{broken"
        with pytest.raises(ParseError) as err:
            import_log("\n".join(lines) + "\n")
        assert err.value.line == 3

    def test_unknown_version_rejected(self, plan, device):
        blob = export_log(self.build_session(plan, device)).decode()
        lines = blob.strip().split("\n")
        lines[0] = lines[0].replace('"v":1', '"v":9', 1)
        with pytest.raises(VersionError):
            import_log("\n".join(lines) + "\n")

    def test_empty_log_rejected(self):
        with pytest.raises(ParseError):
            import_log(b"")


class TestComparisonReport:
    def simulated_session(self, name, b, seed=3):
        plan = generate_acquisition_battery([10, 30, 70, 150], [10], 2, 2, seed=7, device=name)
        device = DeviceDescriptor(name)
        records = simulate_plan(plan, SimConfig(a=0.2, b=b, seed=seed))
        return session_from_records(f"s-{name}", device, plan, records)

    def test_two_device_ranking(self):
        fast = self.simulated_session("fast", 0.1)
        slow = self.simulated_session("slow", 0.2)
        report = comparison_report([fast, slow])
        cells = {c.device: c for c in report.cells}
        assert cells["fast"].ip == pytest.approx(10.0, abs=1e-6)
        assert cells["slow"].ip == pytest.approx(5.0, abs=1e-6)
        assert report.rankings[0] == ("acquisition", ("fast", "slow"))

    def test_permutation_invariant(self):
        fast = self.simulated_session("fast", 0.1)
        slow = self.simulated_session("slow", 0.2)
        a = comparison_report([fast, slow])
        b = comparison_report([slow, fast])
        assert a == b
        assert a.to_text() == b.to_text()

    def test_single_device(self):
        report = comparison_report([self.simulated_session("solo", 0.15)])
        assert report.rankings[0][1] == ("solo",)

    def test_undefined_ip_ranked_last(self):
        improving = self.simulated_session("weird", -0.01)  # faster at higher difficulty
        normal = self.simulated_session("normal", 0.1)
        report = comparison_report([improving, normal])
        cells = {c.device: c for c in report.cells}
        assert cells["weird"].ip is None
        assert report.rankings[0][1] == ("normal", "weird")

    def test_open_session_rejected(self, plan, device):
        session = Session("s1", device, plan)
        with pytest.raises(DomainError):
            comparison_report([session.record])

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            comparison_report([])

    def test_cells_traceable_to_sessions(self):
        report = comparison_report([self.simulated_session("solo", 0.1)])
        assert report.cells[0].sessions == ("s-solo",)

    def test_modulation_class_reports_feature_and_coverage(self):
        plan = generate_musical_battery(
            "feature-modulation", {"preset": "circle-of-four", "depth": 100.0},
            tempi=(120,), reps_per_block=2, seed=3, device="pad")
        device = DeviceDescriptor("pad")
        records = simulate_plan(plan, SimConfig(seed=5))
        session = session_from_records("s-mod", device, plan, records)
        report = comparison_report([session])
        cell = next(c for c in report.cells if c.task_class == "modulation")
        # the simulated performer tracks the commanded reference exactly;
        # sampled range stops just short of the triangular peak
        assert cell.feature is not None
        assert cell.feature["accuracy"] == pytest.approx(0.0, abs=1e-9)
        assert 95.0 < cell.feature["range"] <= 100.0
        assert cell.explorability_coverage is not None
        assert 0.0 < cell.explorability_coverage <= 1.0

    def test_pitch_acquisition_class_is_separate(self):
        plan = generate_acquisition_battery(
            [100, 300, 700], [50], 2, 1, seed=2, device="voice", units="cents")
        device = DeviceDescriptor("voice")
        session = session_from_records(
            "s-pitch", device, plan, simulate_plan(plan, SimConfig(a=0.3, b=0.12, seed=1)))
        report = comparison_report([session])
        classes = {c.task_class for c in report.cells}
        assert classes == {"pitch-acquisition"}
        cell = report.cells[0]
        assert cell.fit is not None
        assert cell.fit.params.b == pytest.approx(0.12, abs=1e-9)


class TestTaskClass:
    def test_mapping(self, plan):
        assert task_class(plan.trials[0]) == "acquisition"
        musical = generate_musical_battery("rhythm", {}, tempi=(120,), seed=0)
        assert task_class(musical.trials[0]) == "rhythm"
        modulation = generate_musical_battery("feature-modulation", {}, tempi=(120,), seed=0)
        assert task_class(modulation.trials[0]) == "modulation"
        sync = generate_musical_battery("synchronization", {}, tempi=(120,), seed=0)
        assert task_class(sync.trials[0]) == "synchronization"


class TestTrialMessages:
    def test_merged_stream_is_monotone(self, device):
        plan = generate_musical_battery("scale", {"root": 60}, tempi=(120,), seed=0, device="probe")
        record = simulate_plan(plan, SimConfig())[0]
        ts = [m["t"] for m in trial_messages("t-0000", record) if "t" in m]
        assert all(b >= a for a, b in zip(ts, ts[1:]))

import json
import socket
import time

import pytest

from ctrlbench.battery import generate_acquisition_battery
from ctrlbench.gateway import Gateway, GatewayChannel
from ctrlbench.session import trial_messages
from ctrlbench.simulate import SimConfig, simulate_plan
from ctrlbench.taxonomy import DeviceDescriptor


@pytest.fixture
def plan():
    return generate_acquisition_battery([10, 30], [10], 1, 1, seed=2, device="probe")


@pytest.fixture
def device():
    return DeviceDescriptor("probe")


class TestChannel:
    def test_hello_returns_plan(self, plan, device):
        channel = GatewayChannel(plan, device)
        replies = channel.handle({"v": 1, "type": "hello", "session": "s-x"})
        assert len(replies) == 1
        assert replies[0]["type"] == "plan"
        assert len(replies[0]["payload"]["plan"]["trials"]) == 2

    def test_trial_stream_acked_with_metrics(self, plan, device):
        channel = GatewayChannel(plan, device)
        channel.handle({"v": 1, "type": "hello"})
        task = plan.task_for("t-0000")
        assert channel.handle({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0}) == []
        channel.handle({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.1, "values": [1.0]})
        channel.handle({"v": 1, "type": "event", "trial": "t-0000", "t": 0.5,
                        "kind": "selection", "position": task.amplitude})
        replies = channel.handle({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.5})
        assert replies[0]["type"] == "ack"
        assert replies[0]["metrics"]["hit"] is True

    def test_violation_answered_not_fatal(self, plan, device):
        channel = GatewayChannel(plan, device)
        channel.handle({"v": 1, "type": "hello"})
        replies = channel.handle({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.0,
                                  "values": [1.0]})
        assert replies[0]["type"] == "protocol_error"
        # channel still serves subsequent valid messages
        assert channel.handle({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0}) == []

    def test_messages_before_hello_rejected(self, plan, device):
        channel = GatewayChannel(plan, device)
        replies = channel.handle({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        assert replies[0]["type"] == "protocol_error"

    def test_disconnect_aborts_open_trial(self, plan, device):
        channel = GatewayChannel(plan, device)
        channel.handle({"v": 1, "type": "hello"})
        channel.handle({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
        record = channel.finish()
        assert record.status == "closed"
        assert record.trials["t-0000"].aborted

    def test_simulated_stream_passes_cleanly(self, plan, device):
        # the simulator and the UI share the ingestion path: no errors, every
        # trial acked
        channel = GatewayChannel(plan, device)
        channel.handle({"v": 1, "type": "hello"})
        acks = 0
        for record in simulate_plan(plan, SimConfig(a=0.2, b=0.1)):
            for message in trial_messages(record.trial_id, record):
                for reply in channel.handle(message):
                    assert reply["type"] == "ack"
                    acks += 1
        assert acks == len(plan.trials)


class LineClient:
    def __init__(self, address):
        self.sock = socket.create_connection(address, timeout=5)
        self.file = self.sock.makefile("rw", encoding="utf-8")

    def send(self, message):
        self.file.write(json.dumps(message) + "\n")
        self.file.flush()

    def recv(self):
        line = self.file.readline()
        assert line, "connection closed unexpectedly"
        return json.loads(line)

    def close(self):
        self.file.close()
        self.sock.close()


class TestTcpGateway:
    def test_full_session_over_socket(self, plan, device, tmp_path):
        gateway = Gateway(plan, device, out_dir=tmp_path / "logs")
        gateway.start()
        try:
            client = LineClient(gateway.address)
            client.send({"v": 1, "type": "hello", "session": "live-1"})
            reply = client.recv()
            assert reply["type"] == "plan"
            trial_ids = [f"t-{i:04d}" for i in range(len(reply["payload"]["plan"]["trials"]))]
            for i, trial_id in enumerate(trial_ids):
                task = plan.task_for(trial_id)
                t0 = float(i)
                client.send({"v": 1, "type": "trial_start", "trial": trial_id, "t": t0})
                client.send({"v": 1, "type": "sample", "trial": trial_id, "t": t0 + 0.1,
                             "values": [0.0]})
                client.send({"v": 1, "type": "event", "trial": trial_id, "t": t0 + 0.4,
                             "kind": "selection", "position": task.amplitude})
                client.send({"v": 1, "type": "trial_end", "trial": trial_id, "t": t0 + 0.4})
                ack = client.recv()
                assert ack["type"] == "ack" and ack["trial"] == trial_id
            client.close()
            deadline = time.time() + 5
            while time.time() < deadline and not gateway.sessions:
                time.sleep(0.02)
            assert len(gateway.sessions) == 1
            record = gateway.sessions[0]
            assert record.session_id == "live-1"
            assert record.status == "closed"
            assert len(record.trials) == len(plan.trials)
            assert (tmp_path / "logs" / "live-1.ndjson").exists()
        finally:
            gateway.stop()

    def test_malformed_frame_answered(self, plan, device):
        gateway = Gateway(plan, device)
        gateway.start()
        try:
            client = LineClient(gateway.address)
            client.file.write("{nonsense\n")
            client.file.flush()
            assert client.recv()["type"] == "protocol_error"
            client.close()
        finally:
            gateway.stop()

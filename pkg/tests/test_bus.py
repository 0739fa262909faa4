import io

import pytest

from teacar.bus import Bus, BusMode
from teacar.errors import KindMismatchError, ModeError, UnknownTopicError, ValidationError
from teacar.messages import IMAGE_BYTES, Header, ImageMsg, JoyMsg, MotionCmd


def motion(t_ns, source="test", value=0.0):
    return MotionCmd(header=Header.at(t_ns), source=source, value=value)


def make_bus():
    bus = Bus(BusMode.STEPPED)
    bus.register_topic("motion/steering", MotionCmd)
    return bus


def test_publish_returns_subscriber_count():
    bus = make_bus()
    got = []
    bus.subscribe("motion/steering", got.append)
    bus.subscribe("motion/steering", got.append)
    assert bus.publish("motion/steering", motion(0)) == 2
    bus.step(1)
    assert len(got) == 2


def test_publish_without_subscribers_drops():
    bus = make_bus()
    assert bus.publish("motion/steering", motion(0)) == 0
    assert bus.step(1) == 0


def test_kind_mismatch_rejected():
    bus = make_bus()
    img = ImageMsg(header=Header.at(0), data=bytes(IMAGE_BYTES))
    with pytest.raises(KindMismatchError):
        bus.publish("motion/steering", img)


def test_unregistered_topic_rejected():
    bus = make_bus()
    with pytest.raises(UnknownTopicError):
        bus.publish("nope", motion(0))
    with pytest.raises(UnknownTopicError):
        bus.subscribe("nope", lambda m: None)


def test_handler_invoked_once_per_message():
    bus = make_bus()
    got = []
    bus.subscribe("motion/steering", got.append)
    for i in range(3):
        bus.publish("motion/steering", motion(i, value=i / 10))
    bus.step(1)
    assert [m.value for m in got] == [0.0, 0.1, 0.2]


def test_stepped_delivery_order_follows_registration():
    bus = make_bus()
    order = []
    bus.subscribe("motion/steering", lambda m: order.append("A"))
    bus.subscribe("motion/steering", lambda m: order.append("B"))
    bus.publish("motion/steering", motion(0))
    bus.publish("motion/steering", motion(1))
    bus.step(1)
    assert order == ["A", "B", "A", "B"]


def test_unsubscribe_stops_delivery():
    bus = make_bus()
    got = []
    sid = bus.subscribe("motion/steering", got.append)
    bus.unsubscribe(sid)
    assert bus.publish("motion/steering", motion(0)) == 0
    bus.step(1)
    assert got == []


def test_periodic_fires_floor_of_window():
    # 30 FPS camera: first frame due one period after registration.
    bus = Bus(BusMode.STEPPED)
    frames = []
    bus.add_periodic(33_333_333, frames.append, name="camera")
    bus.step(100_000_000)
    assert len(frames) == 3
    assert frames == [33_333_333, 66_666_666, 99_999_999]
    assert bus.now_ns == 100_000_000


def test_empty_step_processes_zero_events():
    bus = Bus(BusMode.STEPPED)
    assert bus.step(1_000_000) == 0


def test_step_rejected_in_live_mode():
    bus = Bus(BusMode.LIVE)
    with pytest.raises(ModeError):
        bus.step(1)
    with pytest.raises(ModeError):
        bus.add_periodic(10, lambda t: None)


def test_live_mode_delivers_synchronously():
    bus = Bus(BusMode.LIVE)
    bus.register_topic("motion/steering", MotionCmd)
    got = []
    bus.subscribe("motion/steering", got.append)
    count = bus.publish("motion/steering", motion(bus.now_ns, value=0.5))
    assert count == 1
    assert len(got) == 1 and got[0].value == 0.5


def test_cascade_settles_within_one_step():
    bus = Bus(BusMode.STEPPED)
    bus.register_topic("a", MotionCmd)
    bus.register_topic("b", MotionCmd)
    seen_b = []
    bus.subscribe("a", lambda m: bus.publish("b", motion(bus.now_ns, source="relay", value=m.value)))
    bus.subscribe("b", seen_b.append)
    bus.publish("a", motion(0, value=0.25))
    bus.step(1)
    assert len(seen_b) == 1 and seen_b[0].value == 0.25


def test_runaway_cascade_detected():
    bus = Bus(BusMode.STEPPED)
    bus.register_topic("loop", MotionCmd)
    bus.subscribe("loop", lambda m: bus.publish("loop", motion(bus.now_ns)))
    bus.publish("loop", motion(0))
    with pytest.raises(ModeError):
        bus.step(1)


def run_logged_session(seed):
    import random

    rng = random.Random(seed)
    bus = Bus(BusMode.STEPPED)
    bus.register_topic("motion/steering", MotionCmd)
    bus.register_topic("sensors/joy", JoyMsg)
    bus.subscribe("motion/steering", lambda m: None)
    bus.subscribe("sensors/joy", lambda m: None)
    bus.add_periodic(
        5_000_000,
        lambda t: bus.publish("motion/steering", motion(t, source="osc", value=round(rng.uniform(-1, 1), 6))),
    )
    log = io.StringIO()
    bus.set_message_log(log)
    for _ in range(20):
        bus.publish("sensors/joy", JoyMsg(header=Header.at(bus.now_ns), axes=(rng.uniform(-1, 1),), buttons=(1,)))
        bus.step(7_000_000)
    return log.getvalue()


def test_seeded_runs_produce_byte_identical_logs():
    assert run_logged_session(42) == run_logged_session(42)
    assert run_logged_session(42) != run_logged_session(43)


def test_image_payload_length_enforced():
    with pytest.raises(ValidationError):
        ImageMsg(header=Header.at(0), data=bytes(IMAGE_BYTES - 1))
    img = ImageMsg(header=Header.at(0), data=bytes(IMAGE_BYTES))
    assert len(img.data) == 96_768


def test_motioncmd_validation():
    with pytest.raises(ValidationError):
        MotionCmd(header=Header.at(0), source="", value=0.0)
    with pytest.raises(ValidationError):
        MotionCmd(header=Header.at(0), source="x", value=float("nan"))
    with pytest.raises(ValidationError):
        MotionCmd(header=Header.at(0), source="x", value=1.5)


def test_timestamps_non_decreasing_per_publisher():
    bus = Bus(BusMode.STEPPED)
    bus.register_topic("motion/steering", MotionCmd)
    stamps = []
    bus.subscribe("motion/steering", lambda m: stamps.append(m.header.stamp.nanos))
    bus.add_periodic(3_000_000, lambda t: bus.publish("motion/steering", motion(t)))
    for _ in range(10):
        bus.step(10_000_000)
    assert stamps == sorted(stamps)

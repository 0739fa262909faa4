"""Topic-based publish/subscribe bus with a deterministic stepped mode.

The node graph of the vehicle stack hangs off this bus: controllers
publish MotionCmds, actuator nodes consume them and publish PWM
commands, the camera publishes frames, and so on.

Two modes:

* ``STEPPED`` — a virtual clock owned by the caller. ``publish`` queues;
  ``step(dt_ns)`` advances the clock, fires due periodic callbacks in
  chronological order (registration order on ties), then drains topic
  queues (FIFO per topic, topics in registration order) until quiescent,
  so a pipeline of handlers settles within one step. Runs with identical
  seeds, node sets and step sequences are bit-reproducible.
* ``LIVE`` — wall clock; ``publish`` delivers synchronously to current
  subscribers. Publishing is safe from multiple threads; one delivery
  lock serializes all handler invocations.

An optional message log records every delivery as one JSON line
(image payloads logged as a content digest, not bytes).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .errors import KindMismatchError, ModeError, UnknownTopicError, ValidationError
from .messages import ImageMsg

# Safety valve for handler chains that republish forever within one step.
MAX_DRAIN_ROUNDS = 10_000


class BusMode(Enum):
    STEPPED = "stepped"
    LIVE = "live"


@dataclass(frozen=True)
class Topic:
    name: str
    kind: type


@dataclass
class _Subscription:
    sid: int
    handler: Callable
    active: bool = True


@dataclass
class _TopicState:
    topic: Topic
    subs: list = field(default_factory=list)
    queue: list = field(default_factory=list)  # (msg, [sids snapshot])


@dataclass
class _Periodic:
    pid: int
    period_ns: int
    callback: Callable[[int], None]
    next_due_ns: int
    name: str = ""


class Bus:
    def __init__(self, mode: BusMode = BusMode.STEPPED, start_ns: int = 0):
        self.mode = mode
        self._now_ns = int(start_ns)
        self._topics: dict[str, _TopicState] = {}
        self._topic_order: list[str] = []
        self._periodics: list[_Periodic] = []
        self._next_sid = 1
        self._next_pid = 1
        self._sub_index: dict[int, tuple[str, _Subscription]] = {}
        self._stepping = False
        self._lock = threading.RLock()  # live-mode publish/delivery serialization
        self._log_fh = None
        self._event_listeners: list[Callable[[str, dict], None]] = []

    # -- clock ---------------------------------------------------------

    @property
    def now_ns(self) -> int:
        if self.mode is BusMode.LIVE:
            return time.time_ns()
        return self._now_ns

    # -- topics and subscriptions --------------------------------------

    def register_topic(self, name: str, kind: type) -> Topic:
        if name in self._topics:
            existing = self._topics[name].topic
            if existing.kind is not kind:
                raise KindMismatchError(
                    f"topic {name!r} already registered with kind {existing.kind.__name__}"
                )
            return existing
        topic = Topic(name=name, kind=kind)
        self._topics[name] = _TopicState(topic=topic)
        self._topic_order.append(name)
        return topic

    def _state(self, name: str) -> _TopicState:
        try:
            return self._topics[name]
        except KeyError:
            raise UnknownTopicError(f"topic {name!r} is not registered") from None

    def subscribe(self, name: str, handler: Callable) -> int:
        state = self._state(name)
        sub = _Subscription(sid=self._next_sid, handler=handler)
        self._next_sid += 1
        state.subs.append(sub)
        self._sub_index[sub.sid] = (name, sub)
        return sub.sid

    def unsubscribe(self, sid: int) -> None:
        name, sub = self._sub_index.pop(sid)
        sub.active = False
        self._topics[name].subs.remove(sub)

    # -- publish -------------------------------------------------------

    def publish(self, name: str, msg) -> int:
        state = self._state(name)
        if not isinstance(msg, state.topic.kind):
            raise KindMismatchError(
                f"topic {name!r} carries {state.topic.kind.__name__}, got {type(msg).__name__}"
            )
        if msg.header is None or msg.header.stamp is None:
            raise ValidationError("message header timestamp must be set before publish")

        if self.mode is BusMode.STEPPED:
            snapshot = [s.sid for s in state.subs]
            if snapshot:
                state.queue.append((msg, snapshot))
            return len(snapshot)

        with self._lock:
            subs = list(state.subs)
            for sub in subs:
                if sub.active:
                    self._log_delivery(name, msg)
                    sub.handler(msg)
            return len(subs)

    # -- periodic callbacks (stepped mode) ------------------------------

    def add_periodic(self, period_ns: int, callback: Callable[[int], None], name: str = "") -> int:
        if self.mode is not BusMode.STEPPED:
            raise ModeError("periodic callbacks are only available in stepped mode")
        if period_ns <= 0:
            raise ValidationError(f"period must be > 0 ns, got {period_ns}")
        p = _Periodic(
            pid=self._next_pid,
            period_ns=int(period_ns),
            callback=callback,
            next_due_ns=self._now_ns + int(period_ns),
            name=name,
        )
        self._next_pid += 1
        self._periodics.append(p)
        return p.pid

    def remove_periodic(self, pid: int) -> None:
        self._periodics = [p for p in self._periodics if p.pid != pid]

    # -- stepping -------------------------------------------------------

    def step(self, dt_ns: int) -> int:
        if self.mode is not BusMode.STEPPED:
            raise ModeError("step() is only available in stepped mode")
        if dt_ns <= 0:
            raise ValidationError(f"dt_ns must be > 0, got {dt_ns}")
        if self._stepping:
            raise ModeError("re-entrant step() is not allowed")

        self._stepping = True
        events = 0
        end_ns = self._now_ns + int(dt_ns)
        try:
            while True:
                due = [p for p in self._periodics if p.next_due_ns <= end_ns]
                if not due:
                    break
                # Chronological firing; registration order breaks ties.
                due.sort(key=lambda p: (p.next_due_ns, p.pid))
                p = due[0]
                self._now_ns = p.next_due_ns
                p.next_due_ns += p.period_ns
                p.callback(self._now_ns)
                events += 1
                events += self._drain_queues()
            self._now_ns = end_ns
            events += self._drain_queues()
        finally:
            self._stepping = False
        return events

    def _drain_queues(self) -> int:
        delivered = 0
        dequeued = 0
        while True:
            progressed = False
            for name in self._topic_order:
                state = self._topics[name]
                while state.queue:
                    msg, sids = state.queue.pop(0)
                    progressed = True
                    dequeued += 1
                    if dequeued > MAX_DRAIN_ROUNDS:
                        raise ModeError(
                            "message cascade did not quiesce; a handler republishes unboundedly"
                        )
                    for sid in sids:
                        entry = self._sub_index.get(sid)
                        if entry is None or not entry[1].active:
                            continue  # unsubscribed between publish and delivery
                        self._log_delivery(name, msg)
                        entry[1].handler(msg)
                        delivered += 1
            if not progressed:
                return delivered

    # -- side-channel events (non-payload notifications, e.g. power trips)

    def add_event_listener(self, listener: Callable[[str, dict], None]) -> None:
        self._event_listeners.append(listener)

    def emit_event(self, name: str, payload: dict) -> None:
        if self._log_fh is not None:
            rec = {"t": self.now_ns, "topic": "__events__", "kind": name, "payload": payload}
            self._log_fh.write(json.dumps(rec, sort_keys=True) + "\n")
        for listener in list(self._event_listeners):
            listener(name, payload)

    # -- message log -----------------------------------------------------

    def set_message_log(self, fh) -> None:
        """Attach a writable text file handle (or None to detach)."""
        self._log_fh = fh

    def _log_delivery(self, topic: str, msg) -> None:
        if self._log_fh is None:
            return
        self._log_fh.write(json.dumps(self._log_record(topic, msg), sort_keys=True) + "\n")

    def _log_record(self, topic: str, msg) -> dict:
        if isinstance(msg, ImageMsg):
            payload = {"height": msg.height, "width": msg.width, "sha256": msg.digest()}
        else:
            payload = {}
            for key, value in vars(msg).items():
                if key == "header":
                    continue
                payload[key] = list(value) if isinstance(value, tuple) else value
        return {
            "t": self.now_ns,
            "topic": topic,
            "kind": type(msg).__name__,
            "payload": payload,
            "stamp": msg.header.stamp.nanos,
        }


def make_live_bus() -> Bus:
    return Bus(mode=BusMode.LIVE)

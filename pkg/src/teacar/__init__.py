"""TEACar: a software-in-the-loop small-scale autonomous driving stack.

Subsystems mirror the onboard platform one-to-one: a typed pub/sub bus
(`bus`), controller nodes (`controllers`), the two-layer actuator driver
(`actuation`), register-level device emulation (`devemu`), a from-scratch
CNN engine (`nncore`), the simulated world and camera (`simworld`), the
dataset recorder (`recorder`), and the WebSocket gateway plus benchmark
harness (`gateway`).
"""

__version__ = "0.1.0"

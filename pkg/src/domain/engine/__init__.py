from domain.engine.scheduler import EventHandle, EventQueue, SimEvent, SimTime
from domain.engine.links import LinkClock, Transmitter

__all__ = ["EventHandle", "EventQueue", "LinkClock", "SimEvent", "SimTime", "Transmitter"]

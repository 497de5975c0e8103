"""Slot-level simulator and scheduling policies for a two-stage wireless relay network."""

__version__ = "0.1.0"

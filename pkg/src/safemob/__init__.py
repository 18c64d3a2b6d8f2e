"""Desk-scale safe-mobility platform: Bluetooth-detector trip analytics,
robust traffic estimation, time-dependent routing and intersection alerts."""

__version__ = "0.1.0"

"""Kinematics and control toolkit for teleoperating a tendon-driven continuum
instrument mounted on a 7-DoF arm through a fixed remote center of motion."""

__version__ = "0.1.0"

"""Helpers shared by the command layer: file codecs and curve fits."""

"""Tests for cfpoisson"""
